//! Constellation files and CSV writers.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), `.` as the
//! decimal separator and `\n` line endings.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::ser::SerEstimate;

/// On-disk constellation. `points` has one row per real dimension (or per
/// complex dimension with interleaved `Re, Im` pairs when `complex` is set).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationFile {
    #[serde(default)]
    pub label: Option<String>,
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub priors: Option<Vec<f64>>,
    #[serde(default)]
    pub complex: bool,
}

impl ConstellationFile {
    pub fn into_constellation(self) -> Result<Constellation> {
        let rows = self.points.len();
        if rows == 0 {
            return Err(Error::InvalidArgument("points must have at least one row".into()));
        }
        let width = self.points[0].len();
        if self.points.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidArgument("points rows differ in length".into()));
        }
        let mut c = if self.complex {
            if width % 2 != 0 {
                return Err(Error::InvalidArgument("complex rows need an even number of entries".into()));
            }
            let m = width / 2;
            let z = DMatrix::from_fn(rows, m, |r, k| Complex::new(self.points[r][2 * k], self.points[r][2 * k + 1]));
            Constellation::complex_embed(&z, self.priors)?
        } else {
            let flat: Vec<f64> = self.points.iter().flatten().copied().collect();
            Constellation::new(DMatrix::from_row_slice(rows, width, &flat), self.priors)?
        };
        if let Some(l) = self.label {
            c = c.labeled(l);
        }
        Ok(c)
    }

    pub fn from_constellation(c: &Constellation) -> Self {
        let p = c.points();
        Self {
            label: (!c.label().is_empty()).then(|| c.label().to_owned()),
            points: (0..p.nrows()).map(|r| p.row(r).iter().copied().collect()).collect(),
            priors: Some(c.priors().to_vec()),
            complex: false,
        }
    }
}

pub fn parse_constellation(text: &str) -> std::result::Result<Constellation, Error> {
    let f: ConstellationFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("constellation JSON: {e}")))?;
    f.into_constellation()
}

pub fn read_constellation(path: &Path) -> Result<Constellation> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let f: ConstellationFile =
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.display().to_string(), source })?;
    f.into_constellation()
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row of an SER curve; `status` is set on rows that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub estimate: SerEstimate,
    pub status: Option<String>,
}

impl From<SerEstimate> for CurveRow {
    fn from(estimate: SerEstimate) -> Self {
        Self { estimate, status: None }
    }
}

/// `rho,value,stderr,method`, with a trailing `status` column only when some
/// row carries one.
pub fn ser_curve_csv(rows: &[CurveRow]) -> String {
    let with_status = rows.iter().any(|r| r.status.is_some());
    let mut out = String::from("rho,value,stderr,method");
    if with_status {
        out.push_str(",status");
    }
    out.push('\n');
    for r in rows {
        let e = &r.estimate;
        let _ = write!(out, "{},{},{},{}", fmt_float(e.rho), fmt_float(e.value), fmt_float(e.stderr), e.method.as_str());
        if with_status {
            let _ = write!(out, ",{}", r.status.as_deref().unwrap_or("ok"));
        }
        out.push('\n');
    }
    out
}

pub fn mu_csv(u: &[f64], mu: &[f64]) -> String {
    let mut out = String::from("u,mu\n");
    for (a, b) in u.iter().zip(mu) {
        let _ = writeln!(out, "{},{}", fmt_float(*a), fmt_float(*b));
    }
    out
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
    }
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.display().to_string(), source })
}
