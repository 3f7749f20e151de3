use std::fs;
use std::path::{Path, PathBuf};

use trawlkit::{Error, Result};

/// Output directory plus the plot toggle.
pub struct Out {
    pub dir: PathBuf,
    pub plot: bool,
}

impl Out {
    pub fn new(dir: &Path, plot: bool) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Out { dir: dir.to_path_buf(), plot })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv<I, R>(&self, name: &str, header: &[&str], rows: I) -> Result<PathBuf>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.path(name);
        let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(io)?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn svg(&self, name: &str, content: &str) -> Result<()> {
        if self.plot {
            fs::write(self.path(name), content)?;
        }
        Ok(())
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// One row of a parameter table: name, estimate, std error, 95% CI.
pub fn param_row(name: &str, estimate: f64, se: Option<f64>) -> Vec<String> {
    let ci = se.map(|s| (estimate - trawlkit::estimators::Z_95 * s, estimate + trawlkit::estimators::Z_95 * s));
    vec![name.to_string(), num(estimate), opt(se), opt(ci.map(|c| c.0)), opt(ci.map(|c| c.1))]
}

pub const PARAM_HEADER: [&str; 5] = ["parameter", "estimate", "std_error", "ci_lower", "ci_upper"];

/// Reads a headerless numeric CSV matrix.
pub fn read_matrix(path: &Path) -> Result<nalgebra::DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        rows.push(row);
    }
    let k = rows.len();
    if k == 0 || rows.iter().any(|r| r.len() != k) {
        return Err(Error::Input(format!("{} is not a square matrix", path.display())));
    }
    Ok(nalgebra::DMatrix::from_fn(k, k, |i, j| rows[i][j]))
}
