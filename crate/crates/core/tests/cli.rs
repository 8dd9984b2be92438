//! End-to-end runs of the `stein` subcommands.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use stable_stein::cli::{run, EXIT_CONFIG, EXIT_OK, EXIT_OUT_OF_SCOPE};

struct Scratch {
    dir: tempfile::TempDir,
}

impl Scratch {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn config(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn stein(command: &str, config: Option<&Path>, out: &Path) -> i32 {
    let mut args: Vec<OsString> = vec!["stein".into(), command.into(), "--out".into(), out.into()];
    if let Some(c) = config {
        args.push("--config".into());
        args.push(c.into());
    }
    run(args)
}

/// Data rows of a CSV file, split into cells.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap()
}

#[test]
fn cf_at_alpha_one_has_exponential_modulus() {
    let s = Scratch::new();
    let cfg = s.config("a1.toml", "[stable]\nalpha = 1.0\nm1 = 0.7\nm2 = 0.7\n[cf]\nt_min = -4.0\nt_max = 4.0\npoints = 81\n");
    assert_eq!(stein("cf", Some(&cfg), &s.out("o")), EXIT_OK);
    let d1 = std::f64::consts::PI * 0.7;
    let table = rows(&s.out("o").join("cf.csv"));
    assert_eq!(table.len(), 81);
    for r in &table {
        let t = num(&r[0]);
        assert!((num(&r[6]) - (-d1 * t.abs()).exp()).abs() < 1e-8, "t = {t}");
        if t == 0.0 {
            assert_eq!((num(&r[4]), num(&r[5])), (1.0, 0.0));
        }
    }
}

#[test]
fn cf_forms_agree_for_skewed_law() {
    let s = Scratch::new();
    let cfg = s.config("c.toml", "[stable]\nalpha = 1.5\nbeta = 0.4\nm1 = 2.0\nm2 = 0.5\n");
    assert_eq!(stein("cf", Some(&cfg), &s.out("o")), EXIT_OK);
    let worst = rows(&s.out("o").join("cf.csv")).iter().map(|r| num(&r[7])).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn stein_check_passes_and_detects_mismatch() {
    let s = Scratch::new();
    let good = s.config("g.toml", "[stein_check]\nsamples = 100000\n");
    assert_eq!(stein("stein-check", Some(&good), &s.out("g")), EXIT_OK);
    let table = rows(&s.out("g").join("stein_check.csv"));
    assert_eq!(table.len(), 15);
    assert!(table.iter().all(|r| r.last().unwrap() == "true"));

    let bad = s.config("b.toml", "[stein_check]\nsamples = 100000\nmismatch = true\n");
    assert_eq!(stein("stein-check", Some(&bad), &s.out("b")), EXIT_OK);
    let table = rows(&s.out("b").join("stein_check.csv"));
    assert!(table.iter().any(|r| r[0] == "stable" && r.last().unwrap() == "false"));

    let zero = s.config("z.toml", "[stein_check]\nsamples = 0\n");
    assert_eq!(stein("stein-check", Some(&zero), &s.out("z")), EXIT_CONFIG);
}

#[test]
fn solve_outputs() {
    let s = Scratch::new();
    let konst = s.config("k.toml", "[solve]\npoints = 11\n[solve.h]\nkind = \"constant\"\nvalue = 3.0\n");
    assert_eq!(stein("solve", Some(&konst), &s.out("k")), EXIT_OK);
    for r in rows(&s.out("k").join("solve.csv")) {
        assert!(r[1..4].iter().all(|c| num(c) == 0.0), "{r:?}");
        assert!(num(&r[4]).abs() < 1e-12, "{r:?}");
    }

    assert_eq!(stein("solve", None, &s.out("d")), EXIT_OK);
    let summary = rows(&s.out("d").join("solve_summary.csv"));
    let value = |name: &str| num(&summary.iter().find(|r| r[0] == name).unwrap()[1]);
    assert!(value("ratio_first_derivative") <= 1.001);
    assert!(value("ratio_second_derivative") <= 1.001);
    assert!(value("max_residual_core") < 5e-3);

    let one = s.config("one.toml", "[stable]\nalpha = 1.0\nm1 = 1.0\nm2 = 1.0\n");
    assert_eq!(stein("solve", Some(&one), &s.out("one")), EXIT_OUT_OF_SCOPE);
    assert!(!s.out("one").exists());
}

#[test]
fn bound_sweep_without_constants_is_a_config_error() {
    let s = Scratch::new();
    assert_eq!(stein("bound-sweep", None, &s.out("o")), EXIT_CONFIG);
    let cfg = s.config("c.toml", "[constants]\nc_alpha_a_k = 1.0\nc1_nu = 1.0\nc2_nu = 0.0\ntruncation_u = 1.0\n");
    assert_eq!(stein("bound-sweep", Some(&cfg), &s.out("o")), EXIT_CONFIG);
}

#[test]
fn bound_sweep_wdelta_scalings() {
    let s = Scratch::new();
    let cfg = s.config(
        "w.toml",
        "[stable]\nalpha = 0.5\nm1 = 0.2\nm2 = 0.2\n\
         [bound_sweep]\nkind = \"wdelta\"\nn = [10, 20, 40]\ncutoffs = [1.0, 2.0]\nempirical_samples = 0\n\
         [constants]\nc_alpha_a_k = 2.0\nc1_nu = 3.0\nc2_nu = 1.0\ntruncation_u = 1.0\n",
    );
    assert_eq!(stein("bound-sweep", Some(&cfg), &s.out("o")), EXIT_OK);
    let path = s.out("o").join("bound_sweep.csv");
    let header: Vec<String> = std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let table = rows(&path);
    assert_eq!(table.len(), 6);
    for pair in table.windows(2).filter(|w| w[0][2] == w[1][2]) {
        let ratio = |c: usize| num(&pair[1][c]) / num(&pair[0][c]);
        assert!((ratio(col("c_alpha_a_k_term")) - 0.5).abs() < 1e-12);
        assert!((ratio(col("c1_nu_term")) - 0.5).abs() < 1e-12);
    }
    for r in &table {
        assert_eq!(r[col("empirical_distance")], "NaN");
    }
    assert!(s.out("o").join("bound_sweep_plot.py").exists());
}

#[test]
fn bound_sweep_reports_mismatch_slope() {
    let s = Scratch::new();
    let cfg = s.config(
        "w2.toml",
        "[bound_sweep]\nn = [10, 100, 1000]\nmc_samples = 20000\nempirical_samples = 0\n\
         [constants]\nc_alpha_a_k = 1.0\nc1_nu = 1.0\nc2_nu = 1.0\ntruncation_u = 0.5\n",
    );
    assert_eq!(stein("bound-sweep", Some(&cfg), &s.out("o")), EXIT_OK);
    let text = std::fs::read_to_string(s.out("o").join("bound_sweep.csv")).unwrap();
    let line = text.lines().find(|l| l.contains("kernel_mismatch log-log slope")).unwrap();
    let slope: f64 = line.rsplit(": ").next().unwrap().parse().unwrap();
    // Finite-variance summands: the mismatch grows towards half the kernel mass.
    assert!(slope > 0.0 && slope < 0.2, "{slope}");
}

#[test]
fn sd_check_and_sample() {
    let s = Scratch::new();
    let cfg = s.config("sd.toml", "[stable]\nalpha = 0.8\nbeta = 0.3\nm1 = 1.0\nm2 = 0.3\n[sd_check]\neta = [0.2, 0.5]\nhalf_width = 200.0\npoints = 65536\n[sample]\ncount = 100\n");
    assert_eq!(stein("sd-check", Some(&cfg), &s.out("o")), EXIT_OK);
    let table = rows(&s.out("o").join("sd_check.csv"));
    assert_eq!(table.len(), 2);
    assert!(table.iter().all(|r| r[4] == "true"));
    assert_eq!(stein("sample", Some(&cfg), &s.out("o")), EXIT_OK);
    assert_eq!(rows(&s.out("o").join("sample.csv")).len(), 100);
    let bad = s.config("bad.toml", "[sd_check]\neta = [1.5]\n");
    assert_eq!(stein("sd-check", Some(&bad), &s.out("bad")), EXIT_CONFIG);
}

#[test]
fn provenance_header_embeds_resolved_config() {
    let s = Scratch::new();
    let cfg = s.config("p.toml", "seed = 42\n[sample]\ncount = 3\n");
    assert_eq!(stein("sample", Some(&cfg), &s.out("o")), EXIT_OK);
    let text = std::fs::read_to_string(s.out("o").join("sample.csv")).unwrap();
    let comments: String = text
        .lines()
        .filter_map(|l| l.strip_prefix("#   "))
        .map(|l| format!("{l}\n"))
        .collect();
    let resolved = stable_stein::cli::ExperimentConfig::from_toml(&comments).unwrap();
    assert_eq!(resolved.seed, 42);
    assert_eq!(resolved.sample.count, 3);
    assert_eq!(resolved.stable.alpha, 1.5);
}
