use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use sercm::fading::FadingModel;
use sercm::io::ConstellationFile;
use sercm::noise::NoiseModel;
use sercm::Constellation;

use crate::CliError;

/// Run configuration. A plain constellation file is also a valid config:
/// when the top level has `points`, it is the constellation.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct RunConfig {
    pub constellation: Option<Value>,
    pub methods: Option<Vec<String>>,
    pub noise: Option<NoiseModel>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub grid: Option<String>,
    /// Which closed form applies: `qam4`, `qam16`, `qam64` or `cube`.
    pub closed_form: Option<String>,
    pub max_order: Option<usize>,
    pub fading: Option<Vec<FadingModel>>,
    pub u_max: Option<f64>,
}

pub struct Loaded {
    pub config: RunConfig,
    pub constellation: Constellation,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let config: RunConfig =
        serde_json::from_value(value.clone()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let source = if value.get("points").is_some() {
        value
    } else {
        match &config.constellation {
            Some(Value::String(rel)) => {
                let target = resolve(path, rel);
                let text = std::fs::read_to_string(&target)
                    .map_err(|e| CliError::Input(format!("{}: {e}", target.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", target.display())))?
            }
            Some(v @ Value::Object(_)) => v.clone(),
            _ => {
                return Err(CliError::Input(format!(
                    "{}: needs either `points` or a `constellation` entry",
                    path.display()
                )))
            }
        }
    };
    let file: ConstellationFile =
        serde_json::from_value(source).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let constellation = file.into_constellation().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(Loaded { config, constellation })
}

fn resolve(config_path: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config_path.parent().unwrap_or(Path::new(".")).join(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl GridSpec {
    /// `MIN:MAX:COUNT:log|lin`.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Input(format!("bad grid {s:?}: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad("expected MIN:MAX:COUNT:log|lin"));
        }
        let min: f64 = parts[0].parse().map_err(|_| bad("MIN is not a number"))?;
        let max: f64 = parts[1].parse().map_err(|_| bad("MAX is not a number"))?;
        let count: usize = parts[2].parse().map_err(|_| bad("COUNT is not an integer"))?;
        let log = match parts[3] {
            "log" => true,
            "lin" => false,
            _ => return Err(bad("scale must be log or lin")),
        };
        if !(min.is_finite() && max.is_finite()) || !(max > min) {
            return Err(bad("need finite MIN < MAX"));
        }
        if count < 2 {
            return Err(bad("COUNT must be at least 2"));
        }
        Ok(Self { min, max, count, log })
    }

    /// Points of the grid; `allow_zero` admits `MIN = 0` on linear grids.
    pub fn points(&self, allow_zero: bool) -> Result<Vec<f64>, CliError> {
        let ok = if self.log || !allow_zero { self.min > 0.0 } else { self.min >= 0.0 };
        if !ok {
            return Err(CliError::Input(format!("grid minimum must be positive, got {}", self.min)));
        }
        Ok(if self.log {
            sercm::numerics::logspace(self.min, self.max, self.count)
        } else {
            sercm::numerics::linspace(self.min, self.max, self.count)
        })
    }
}
