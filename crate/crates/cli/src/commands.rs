use std::path::Path;

use serde::Serialize;
use serde_json::json;

use sercm::fading::{default_rho_grid, order_implies_ser_comparison, AverageMethod, SerComparison};
use sercm::geometry::Decomposition;
use sercm::io::{mu_csv, ser_curve_csv, write_text, CurveRow};
use sercm::noise::{AwgnSer, NoiseModel};
use sercm::ser::{
    self, cm_order_conditions, default_u_grid, representing_fn, ser_closed_cube, ser_closed_qam, ser_mc, Method,
    QuadratureEngine, SerEstimate, MAX_QUADRATURE_DIM,
};
use sercm::{fixtures, Constellation};

use crate::config::{load, GridSpec, Loaded};
use crate::{CliError, Common};

const DEFAULT_TOL: f64 = 1e-8;
const DEFAULT_SAMPLES: usize = 1_000_000;

fn emit(common: &Common, file: &str, contents: &str) -> Result<(), CliError> {
    match &common.out {
        Some(dir) => write_text(&dir.join(file), contents).map_err(|e| CliError::Input(e.to_string())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn tolerance(common: &Common, loaded: &Loaded, default: f64) -> Result<f64, CliError> {
    let tol = common.tol.or(loaded.config.tol).unwrap_or(default);
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(CliError::Input(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn rho_grid(common: &Common, loaded: &Loaded, default: &str) -> Result<Vec<f64>, CliError> {
    let spec = common.grid.as_deref().or(loaded.config.grid.as_deref()).unwrap_or(default);
    GridSpec::parse(spec)?.points(false)
}

#[derive(Debug, Clone, Copy)]
enum ClosedForm {
    Qam(usize),
    Cube,
}

impl ClosedForm {
    fn eval(self, rho: f64) -> sercm::Result<SerEstimate> {
        match self {
            ClosedForm::Qam(m) => ser_closed_qam(m, rho),
            ClosedForm::Cube => ser_closed_cube(rho),
        }
    }

    fn awgn(self) -> AwgnSer {
        match self {
            ClosedForm::Qam(m) => AwgnSer::ClosedQam(m),
            ClosedForm::Cube => AwgnSer::ClosedCube,
        }
    }
}

/// The closed form named in the config, after checking that the
/// constellation really is that fixture (same points in any order).
fn closed_form(loaded: &Loaded) -> Result<Option<ClosedForm>, CliError> {
    let Some(name) = loaded.config.closed_form.as_deref() else {
        return Ok(None);
    };
    let (kind, reference) = match name {
        "cube" => (ClosedForm::Cube, fixtures::cube()),
        "qam4" | "qam16" | "qam64" => {
            let m: usize = name[3..].parse().expect("matched literal");
            (ClosedForm::Qam(m), fixtures::square_qam(m)?)
        }
        other => return Err(CliError::Input(format!("no closed form named {other:?}"))),
    };
    if !same_point_set(&loaded.constellation, &reference) {
        return Err(CliError::Input(format!(
            "closed form {name:?} applies only to its reference constellation, which these points are not"
        )));
    }
    Ok(Some(kind))
}

fn same_point_set(a: &Constellation, b: &Constellation) -> bool {
    if a.dim() != b.dim() || a.len() != b.len() {
        return false;
    }
    let uniform = |c: &Constellation| c.priors().iter().all(|&p| (p - 1.0 / c.len() as f64).abs() < 1e-12);
    uniform(a)
        && uniform(b)
        && (0..a.len()).all(|i| (0..b.len()).any(|j| (a.point(i) - b.point(j)).amax() < 1e-9))
}

pub fn analyze(common: &Common) -> Result<(), CliError> {
    let loaded = load(&common.config)?;
    let c = &loaded.constellation;
    let r = c.reduced();
    let n_star = r.reduced_dim();
    let d_min = c.min_distance();
    let d_min_normalized = c.energy_normalize()?.min_distance();
    let rho0 = ser::rho0(c).ok();
    let (facets, cones) = if n_star <= MAX_QUADRATURE_DIM {
        let d = Decomposition::new(&r, None)?;
        (
            Some(d.symbols.iter().map(|s| s.region.halfspaces.len()).collect::<Vec<_>>()),
            Some(d.symbols.iter().map(|s| s.cones.len()).collect::<Vec<_>>()),
        )
    } else {
        (None, None)
    };
    let report = json!({
        "label": c.label(),
        "N": c.dim(),
        "M": c.len(),
        "reducedDim": n_star,
        "dMin": d_min,
        "dMinNormalized": d_min_normalized,
        "rho0": rho0,
        "facetCounts": facets,
        "coneCounts": cones,
        "coneTotal": cones.as_ref().map(|v| v.iter().sum::<usize>()),
    });
    println!("label: {}", c.label());
    println!("N: {}", c.dim());
    println!("M: {}", c.len());
    println!("N*: {n_star}");
    println!("d_min: {d_min}");
    println!("d_min (unit energy): {d_min_normalized}");
    match rho0 {
        Some(v) => println!("rho0: {v}"),
        None => println!("rho0: none (N* <= 2)"),
    }
    match (&facets, &cones) {
        (Some(f), Some(k)) => {
            println!("facets per symbol: {f:?}");
            println!("cones per symbol: {k:?}");
            println!("cones total: {}", k.iter().sum::<usize>());
        }
        _ => println!("cone decomposition: skipped (N* > {MAX_QUADRATURE_DIM})"),
    }
    if let Some(dir) = &common.out {
        write_text(&dir.join("analyze.json"), &to_json(&report)).map_err(|e| CliError::Input(e.to_string()))?;
    }
    Ok(())
}

pub fn ser_curve(common: &Common) -> Result<(), CliError> {
    let loaded = load(&common.config)?;
    let c = &loaded.constellation;
    let grid = rho_grid(common, &loaded, "0.5:30:20:log")?;
    let tol = tolerance(common, &loaded, DEFAULT_TOL)?;
    let closed = closed_form(&loaded)?;
    let noise = loaded.config.noise.clone().unwrap_or(NoiseModel::Awgn);
    noise.validate()?;
    let methods: Vec<Method> = match &loaded.config.methods {
        Some(names) => names.iter().map(|m| m.parse()).collect::<sercm::Result<_>>()?,
        None => {
            let mut m = Vec::new();
            if closed.is_some() {
                m.push(Method::ClosedForm);
            }
            m.push(if c.reduced().reduced_dim() <= MAX_QUADRATURE_DIM { Method::Quadrature } else { Method::Mc });
            m
        }
    };
    if methods.is_empty() {
        return Err(CliError::Input("no methods selected".into()));
    }
    let awgn = matches!(noise, NoiseModel::Awgn);
    let mut rows: Vec<CurveRow> = Vec::new();
    let mut failure = None;
    'methods: for method in methods {
        if method != Method::Mc && !awgn {
            return Err(CliError::Input(format!("method {} needs AWGN noise", method.as_str())));
        }
        let engine = match method {
            Method::Quadrature | Method::Bernstein => Some(QuadratureEngine::new(&c.reduced(), c.priors())?),
            _ => None,
        };
        let mu = match method {
            Method::Bernstein => {
                let u_max = loaded.config.u_max.unwrap_or(40.0);
                Some(representing_fn(&c.reduced(), c.priors(), &default_u_grid(u_max), tol * 1e-2)?)
            }
            _ => None,
        };
        let seed = match method {
            Method::Mc => Some(common.seed.or(loaded.config.seed).ok_or_else(|| {
                CliError::Input("Monte Carlo needs a seed (--seed or \"seed\" in the config)".into())
            })?),
            _ => None,
        };
        for &rho in &grid {
            let est = match method {
                Method::ClosedForm => {
                    let cf = closed.ok_or_else(|| CliError::Input("closed_form needs \"closedForm\" in the config".into()))?;
                    cf.eval(rho)
                }
                Method::Quadrature => engine.as_ref().expect("built above").ser(rho, tol),
                Method::Bernstein => ser::reconstruct_ser(mu.as_ref().expect("built above"), rho, tol),
                Method::Mc => {
                    let n = loaded.config.samples.unwrap_or(DEFAULT_SAMPLES);
                    ser_mc(c, &noise, rho, n, seed.expect("checked above"))
                }
            };
            match est {
                Ok(e) => rows.push(e.into()),
                Err(e) if e.is_numerical() => {
                    rows.push(CurveRow {
                        estimate: SerEstimate { value: f64::NAN, stderr: f64::NAN, method, rho },
                        status: Some(status_of(&e).into()),
                    });
                    failure = Some(e.to_string());
                    break 'methods;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    emit(common, "ser_curve.csv", &ser_curve_csv(&rows))?;
    match failure {
        Some(msg) => Err(CliError::Numerical(msg)),
        None => Ok(()),
    }
}

fn status_of(e: &sercm::Error) -> &'static str {
    match e {
        sercm::Error::NonConvergence(_) => "non_convergence",
        sercm::Error::Grid(_) => "grid",
        sercm::Error::Lp(_) => "lp",
        _ => "numerical",
    }
}

pub fn cm_check(common: &Common) -> Result<(), CliError> {
    let loaded = load(&common.config)?;
    let grid = rho_grid(common, &loaded, "0.1:100:40:log")?;
    let tol = tolerance(common, &loaded, 1e-10)?;
    let max_order = loaded.config.max_order.unwrap_or(4);
    let verdict = ser::cm_check(&loaded.constellation, &grid, max_order, tol)?;
    emit(common, "cm_check.json", &to_json(&verdict))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FadingReport {
    reduced_dim: usize,
    instantaneous_ser: &'static str,
    first: sercm::fading::FadingModel,
    second: sercm::fading::FadingModel,
    comparisons: Vec<SerComparison>,
}

pub fn fading_compare(common: &Common) -> Result<(), CliError> {
    let loaded = load(&common.config)?;
    let c = &loaded.constellation;
    let models = loaded.config.fading.clone().unwrap_or_default();
    let [f1, f2] = <[_; 2]>::try_from(models)
        .map_err(|_| CliError::Input("\"fading\" must list exactly two models".into()))?;
    f1.validate()?;
    f2.validate()?;
    let grid = match (&common.grid, &loaded.config.grid) {
        (None, None) => default_rho_grid(),
        _ => rho_grid(common, &loaded, "")?,
    };
    let tol = tolerance(common, &loaded, 1e-9)?;
    let n_star = c.reduced().reduced_dim();
    let (awgn, source) = match closed_form(&loaded)? {
        Some(cf) => (cf.awgn(), "closed_form"),
        None => (AwgnSer::tabulate(c, tol)?, "quadrature_table"),
    };
    let mut ps = vec![0.0];
    let p_dim = n_star as f64 / 2.0 - 1.0;
    if p_dim > 0.0 {
        ps.push(p_dim);
    }
    let ser_fn = |rho: f64| awgn.eval(rho);
    let comparisons = ps
        .iter()
        .map(|&p| order_implies_ser_comparison(ser_fn, p, &f1, &f2, &grid, AverageMethod::Adaptive, tol))
        .collect::<sercm::Result<Vec<_>>>()?;
    let curve = |vals: &[f64]| {
        let rows: Vec<CurveRow> = grid
            .iter()
            .zip(vals)
            .map(|(&rho, &value)| SerEstimate { value, stderr: 0.0, method: Method::Quadrature, rho }.into())
            .collect();
        ser_curve_csv(&rows)
    };
    let first_csv = curve(&comparisons[0].first);
    let second_csv = curve(&comparisons[0].second);
    let report = FadingReport { reduced_dim: n_star, instantaneous_ser: source, first: f1, second: f2, comparisons };
    emit(common, "fading_compare.json", &to_json(&report))?;
    if let Some(dir) = &common.out {
        write(dir, "fading_ser_first.csv", &first_csv)?;
        write(dir, "fading_ser_second.csv", &second_csv)?;
    }
    Ok(())
}

fn write(dir: &Path, file: &str, contents: &str) -> Result<(), CliError> {
    write_text(&dir.join(file), contents).map_err(|e| CliError::Input(e.to_string()))
}

pub fn mu(common: &Common) -> Result<(), CliError> {
    let loaded = load(&common.config)?;
    let c = &loaded.constellation;
    let tol = tolerance(common, &loaded, 1e-10)?;
    let u_grid = match &common.grid {
        Some(g) => GridSpec::parse(g)?.points(true)?,
        None => default_u_grid(loaded.config.u_max.unwrap_or(20.0)),
    };
    let mu = representing_fn(&c.reduced(), c.priors(), &u_grid, tol)?;
    let conditions = cm_order_conditions(&mu, 1)?;
    emit(common, "mu.csv", &mu_csv(&mu.u_grid, &mu.mu_values))?;
    let report = json!({
        "reducedDim": mu.reduced_dim,
        "onset": mu.onset,
        "supportStart": mu.support_start(1e-9),
        "orderOne": conditions,
        "warnings": mu.warnings,
    });
    match &common.out {
        Some(dir) => write(dir, "mu_report.json", &to_json(&report))?,
        None => eprint!("{}", to_json(&report)),
    }
    Ok(())
}
