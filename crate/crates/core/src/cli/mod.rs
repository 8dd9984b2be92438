//! The `stein` experiment runner.
//!
//! Each subcommand reads an optional TOML config, runs one experiment and
//! writes CSV files under `--out`. Exit codes: 0 success, 2 configuration
//! error, 3 numeric failure, 4 request outside the supported range, 1 I/O.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::numerics::parallel::with_workers;

pub use commands::Outcome;
pub use config::ExperimentConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_OUT_OF_SCOPE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "stein", version, about = "Stein's method experiments for stable laws")]
struct Cli {
    /// TOML experiment configuration; defaults apply to missing sections.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true, value_name = "INT", default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Characteristic function in both forms and their difference.
    Cf,
    /// Density by Fourier inversion.
    Density,
    /// Draws from the stable law.
    Sample,
    /// Monte Carlo check of the characterizing identities.
    SteinCheck,
    /// Semigroup solution of the Stein equation with residuals.
    Solve,
    /// Approximation bounds over a grid of sample sizes.
    BoundSweep,
    /// Inverts the self-decomposability ratio and checks positivity.
    SdCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Cf => "cf",
            Command::Density => "density",
            Command::Sample => "sample",
            Command::SteinCheck => "stein-check",
            Command::Solve => "solve",
            Command::BoundSweep => "bound-sweep",
            Command::SdCheck => "sd-check",
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::OutOfScope(_) => EXIT_OUT_OF_SCOPE,
        Error::InvalidParameter(_) | Error::InvalidDistribution(_) | Error::InvalidTestFunction(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<ExperimentConfig, String> {
    let mut config = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            ExperimentConfig::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn provenance(command: &str, config: &ExperimentConfig) -> String {
    let mut out = format!("# {} {} {command}\n", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    out.push_str("# resolved config:\n");
    for line in config.to_toml().lines() {
        out.push_str("#   ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Run one command; the return value is the process exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let name = cli.command.name();
    let config = match load_config(cli.config.as_deref(), cli.seed).and_then(|c| c.validate(name).map(|_| c)) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("stein {name}: configuration error: {msg}");
            return EXIT_CONFIG;
        }
    };
    eprintln!("stein {name}: running");
    let result = with_workers(cli.workers, || match cli.command {
        Command::Cf => commands::cmd_cf(&config),
        Command::Density => commands::cmd_density(&config),
        Command::Sample => commands::cmd_sample(&config),
        Command::SteinCheck => commands::cmd_stein_check(&config),
        Command::Solve => commands::cmd_solve(&config),
        Command::BoundSweep => commands::cmd_bound_sweep(&config),
        Command::SdCheck => commands::cmd_sd_check(&config),
    });
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("stein {name}: {e}");
            return exit_code(&e);
        }
    };
    let header = provenance(name, &config);
    let files = outcome
        .files
        .iter()
        .map(|(file, table)| (file, format!("{header}{}", table.render())))
        .chain(outcome.scripts.iter().map(|(file, text)| (file, text.clone())));
    for (file, text) in files {
        match output::write_atomic(&cli.out, file, &text) {
            Ok(path) => eprintln!("stein {name}: wrote {}", path.display()),
            Err(e) => {
                eprintln!("stein {name}: cannot write {file}: {e}");
                return EXIT_IO;
            }
        }
    }
    for line in &outcome.summary {
        println!("{line}");
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<OsString> {
        std::iter::once("stein").chain(list.iter().copied()).map(OsString::from).collect()
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(run(args(&["bogus"])), EXIT_CONFIG);
        assert_eq!(run(args(&["bound-sweep", "--out", out])), EXIT_CONFIG);
        let cfg = dir.path().join("a1.toml");
        std::fs::write(&cfg, "[stable]\nalpha = 1.0\nm1 = 1.0\nm2 = 1.0\n").unwrap();
        assert_eq!(
            run(args(&["solve", "--config", cfg.to_str().unwrap(), "--out", out])),
            EXIT_OUT_OF_SCOPE
        );
        std::fs::write(&cfg, "[stable]\nalpha = 1.5\nm1 = 1.0\nm2 = 1.0\nextra = 3\n").unwrap();
        assert_eq!(run(args(&["cf", "--config", cfg.to_str().unwrap(), "--out", out])), EXIT_CONFIG);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn cf_file_has_provenance() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(&cfg, "[cf]\nt_min = 0.0\nt_max = 1.0\npoints = 3\n").unwrap();
        let out = dir.path().join("o");
        let code = run(args(&[
            "cf",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, EXIT_OK);
        let text = std::fs::read_to_string(out.join("cf.csv")).unwrap();
        assert!(text.starts_with("# stable-stein"));
        assert!(text.contains("#   seed = 9"));
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 4);
        assert!(data[1].starts_with("0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0"));
    }
}
