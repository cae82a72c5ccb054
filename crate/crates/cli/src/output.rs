//! File emission. Every file is written to a sibling temp path and renamed
//! into place, so readers never observe a partial file.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use qwalk_core::PositionDistribution;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// 17 significant digits: enough for an exact f64 round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Tracks the directory and the files written to it, in write order.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Paths relative to the root.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn write(&mut self, name: impl AsRef<Path>, contents: &[u8]) -> CliResult<PathBuf> {
        let rel = name.as_ref().to_path_buf();
        let path = self.root.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        write_atomic(&path, contents)?;
        self.written.push(rel.clone());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: impl AsRef<Path>, value: &T) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::io(path, std::io::Error::other("not a file path")))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

/// `t,x,probability` rows for every site at every step.
pub fn distributions_csv(dists: &[PositionDistribution]) -> String {
    let mut out = String::from("t,x,probability\n");
    for (t, d) in dists.iter().enumerate() {
        for (x, p) in d.iter() {
            let _ = writeln!(out, "{t},{x},{}", fmt_f64(p));
        }
    }
    out
}

/// `t,x,std_error` rows aligned with [`distributions_csv`].
pub fn std_errors_csv(dists: &[PositionDistribution], errors: &[Vec<f64>]) -> String {
    let mut out = String::from("t,x,std_error\n");
    for (t, (d, se)) in dists.iter().zip(errors).enumerate() {
        for ((x, _), e) in d.iter().zip(se) {
            let _ = writeln!(out, "{t},{x},{}", fmt_f64(*e));
        }
    }
    out
}

/// A `t,<col>,<col>…` table; `None` cells are left empty.
pub fn series_csv(columns: &[(&str, &[Option<f64>])]) -> String {
    let mut out = String::from("t");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let rows = columns.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    for t in 0..rows {
        let _ = write!(out, "{t}");
        for (_, col) in columns {
            out.push(',');
            if let Some(Some(v)) = col.get(t) {
                out.push_str(&fmt_f64(*v));
            }
        }
        out.push('\n');
    }
    out
}

/// Distributions as JSON: `[{t, x: [...], probability: [...]}, …]`.
pub fn distributions_json(dists: &[PositionDistribution]) -> serde_json::Value {
    serde_json::Value::Array(
        dists
            .iter()
            .enumerate()
            .map(|(t, d)| {
                let (xs, ps): (Vec<i64>, Vec<f64>) = d.iter().unzip();
                serde_json::json!({ "t": t, "x": xs, "probability": ps })
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use qwalk_core::Topology;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 57.0 / 64.0, 1e-300, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let line = Topology::line(1).unwrap();
        let d = PositionDistribution::new(line, vec![0.5, 0.0, 0.5]).unwrap();
        let csv = distributions_csv(&[d]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,x,probability");
        assert_eq!(lines[1], "0,-1,5.0000000000000000e-1");
        assert_eq!(lines.len(), 4);
        let s = series_csv(&[("a", &[Some(1.0), None])]);
        assert_eq!(s, "t,a\n0,1.0000000000000000e0\n1,\n");
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write("a/b.txt", b"hello").unwrap();
        out.write("a/b.txt", b"again").unwrap();
        assert_eq!(fs::read_to_string(dir.path().join("a/b.txt")).unwrap(), "again");
        let names: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().collect();
        assert_eq!(names.len(), 1);
    }
}
