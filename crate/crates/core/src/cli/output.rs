//! CSV tables with provenance comments, written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::stable::params::fmt17;

/// A CSV table: `#` comment lines, one header line, data rows.
#[derive(Debug, Clone, Default)]
pub struct Table {
    comments: Vec<String>,
    header: String,
    rows: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            header: columns.join(","),
            ..Self::default()
        }
    }

    pub fn with_header(header: String) -> Self {
        Self {
            header,
            ..Self::default()
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    /// Comment lines for a multi-line block, such as a TOML document.
    pub fn comment_block(&mut self, text: &str) {
        for line in text.lines() {
            self.comment(line);
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells.join(","));
    }

    pub fn float_row(&mut self, values: &[f64]) {
        self.row(values.iter().map(|&v| fmt17(v)).collect());
    }

    pub fn raw_row(&mut self, line: String) {
        self.rows.push(line);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.header);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// Write `content` to `dir/name` through a temporary file in `dir`.
pub fn write_atomic(dir: &Path, name: &str, content: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).map_err(|e| e.error)?;
    Ok(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_write() {
        let mut t = Table::new(&["x", "y"]);
        t.comment_block("a = 1\nb = 2");
        t.float_row(&[0.1, -2.0]);
        let text = t.render();
        assert_eq!(
            text,
            "# a = 1\n# b = 2\nx,y\n1.0000000000000001e-1,-2.0000000000000000e0\n"
        );
        let dir = tempfile::tempdir().unwrap();
        let p = write_atomic(dir.path(), "t.csv", &text).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), text);
        write_atomic(dir.path(), "t.csv", "x\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "x\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
