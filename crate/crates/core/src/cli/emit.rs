//! Byte-stable CSV and JSON writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::numerics::{SpatialGrid, Trajectory};

/// Shortest round-trip decimal; non-finite values as `nan`, `inf`, `-inf`.
///
/// ```
/// use kwcopt::cli::fmt_f64;
/// assert_eq!(fmt_f64(0.1), "0.1");
/// assert_eq!(fmt_f64(1e-7), "1e-7");
/// assert_eq!(fmt_f64(f64::NAN), "nan");
/// ```
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// Writes artifacts below one directory, reporting failures with the path.
#[derive(Debug, Clone)]
pub struct Emitter {
    root: PathBuf,
}

impl Emitter {
    pub fn new(root: &Path) -> Result<Self, String> {
        fs::create_dir_all(root).map_err(|e| format!("{}: {e}", root.display()))?;
        Ok(Emitter { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, rel: &str) -> Result<PathBuf, String> {
        let p = self.root.join(rel);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        }
        Ok(p)
    }

    pub fn csv(&self, rel: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), String> {
        let p = self.path(rel)?;
        let err = |e: csv::Error| format!("{}: {e}", p.display());
        let mut w = csv::Writer::from_path(&p).map_err(err)?;
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(&r).map_err(err)?;
        }
        w.flush().map_err(|e| format!("{}: {e}", p.display()))
    }

    pub fn json(&self, rel: &str, value: &impl Serialize) -> Result<(), String> {
        let p = self.path(rel)?;
        let mut text = serde_json::to_string_pretty(value).map_err(|e| format!("{}: {e}", p.display()))?;
        text.push('\n');
        fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display()))
    }

    /// `fields/{name}_%04d.csv` for every `stride`-th frame and the last one.
    pub fn fields(&self, name: &str, grid: &SpatialGrid, w: &Trajectory, stride: usize) -> Result<(), String> {
        if stride == 0 {
            return Ok(());
        }
        let dim = grid.dim();
        let header: Vec<&str> = ["x", "y"][..dim].iter().copied().chain(["value"]).collect();
        let last = w.len() - 1;
        for i in (0..=last).filter(|i| i % stride == 0 || *i == last) {
            let rows = grid.coords().iter().zip(w[i].iter()).map(|(c, v)| {
                c[..dim].iter().map(|x| fmt_f64(*x)).chain([fmt_f64(*v)]).collect::<Vec<_>>()
            });
            self.csv(&format!("fields/{name}_{i:04}.csv"), &header, rows)?;
        }
        Ok(())
    }
}
