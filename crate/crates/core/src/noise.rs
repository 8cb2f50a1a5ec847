//! AWGN and compound Gaussian noise `Z = √W·G`, mixing-variable samplers and
//! the conditional-mixture check `SER = E_W[SER_awgn(ρ/W)]`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::ser::{ser_closed_cube, ser_closed_qam, ser_mc, QuadratureEngine};

/// Distribution of the mixing variable `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MixingSpec {
    Degenerate { w0: f64 },
    Gamma { shape: f64, scale: f64 },
    /// Positive stable law with index 1/2 and skewness 1, `W = scale/Z²`.
    Levy { scale: f64 },
    /// Middleton class-A style mixing `W = a + b·Poisson(λ)`.
    AffinePoisson { a: f64, b: f64, lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    Awgn,
    Compound { mixing: MixingSpec },
}

impl MixingSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        let valid = match *self {
            MixingSpec::Degenerate { w0 } => ok(w0),
            MixingSpec::Gamma { shape, scale } => ok(shape) && ok(scale),
            MixingSpec::Levy { scale } => ok(scale),
            MixingSpec::AffinePoisson { a, b, lambda } => ok(a) && ok(b) && ok(lambda),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("mixing parameters must be positive: {self:?}")))
        }
    }

    /// `E[W]`, infinite for the Lévy law.
    pub fn mean(&self) -> f64 {
        match *self {
            MixingSpec::Degenerate { w0 } => w0,
            MixingSpec::Gamma { shape, scale } => shape * scale,
            MixingSpec::Levy { .. } => f64::INFINITY,
            MixingSpec::AffinePoisson { a, b, lambda } => a + b * lambda,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, MixingSpec::Degenerate { .. })
    }

    pub(crate) fn sampler(&self) -> Result<MixingSampler> {
        self.validate()?;
        Ok(match *self {
            MixingSpec::Degenerate { w0 } => MixingSampler::Constant(w0),
            MixingSpec::Gamma { shape, scale } => MixingSampler::Gamma(
                Gamma::new(shape, scale).map_err(|e| Error::InvalidArgument(e.to_string()))?,
            ),
            MixingSpec::Levy { scale } => MixingSampler::Levy(scale),
            MixingSpec::AffinePoisson { a, b, lambda } => MixingSampler::AffinePoisson(
                a,
                b,
                Poisson::new(lambda).map_err(|e| Error::InvalidArgument(e.to_string()))?,
            ),
        })
    }
}

pub(crate) enum MixingSampler {
    Constant(f64),
    Gamma(Gamma<f64>),
    Levy(f64),
    AffinePoisson(f64, f64, Poisson<f64>),
}

impl MixingSampler {
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            MixingSampler::Constant(w) => *w,
            MixingSampler::Gamma(g) => g.sample(rng),
            MixingSampler::Levy(scale) => {
                let z: f64 = rng.sample(StandardNormal);
                scale / (z * z)
            }
            MixingSampler::AffinePoisson(a, b, p) => a + b * p.sample(rng),
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::Awgn => Ok(()),
            NoiseModel::Compound { mixing } => mixing.validate(),
        }
    }
}

/// Draws `count` values of `W`.
pub fn sample_mixing(spec: &MixingSpec, count: usize, seed: u64) -> Result<Vec<f64>> {
    let sampler = spec.sampler()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sampler.draw(&mut rng)).collect())
}

/// `dim × count` matrix of noise vectors with per-coordinate variance `1/ρ`
/// (times `W` under compound noise, one `W` per vector).
pub fn sample_noise(model: &NoiseModel, rho: f64, dim: usize, count: usize, seed: u64) -> Result<DMatrix<f64>> {
    crate::ser::check_rho(rho)?;
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let sigma = rho.sqrt().recip();
    let mixing = match model {
        NoiseModel::Awgn => None,
        NoiseModel::Compound { mixing } => Some(mixing.sampler()?),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = DMatrix::zeros(dim, count);
    for j in 0..count {
        let scale = match &mixing {
            None => sigma,
            Some(s) => sigma * s.draw(&mut rng).sqrt(),
        };
        for i in 0..dim {
            let g: f64 = rng.sample(StandardNormal);
            out[(i, j)] = scale * g;
        }
    }
    Ok(out)
}

/// AWGN SER as a function of `ρ`, used as the inner function of the mixture.
#[derive(Debug, Clone)]
pub enum AwgnSer {
    ClosedQam(usize),
    ClosedCube,
    Tabulated(SerTable),
}

impl AwgnSer {
    /// SER at `rho`; `+∞` gives 0, and values below the table range are
    /// clamped to its first entry.
    pub fn eval(&self, rho: f64) -> f64 {
        if rho == f64::INFINITY {
            return 0.0;
        }
        let rho = rho.max(f64::MIN_POSITIVE);
        match self {
            AwgnSer::ClosedQam(m) => ser_closed_qam(*m, rho).map(|e| e.value).unwrap_or(f64::NAN),
            AwgnSer::ClosedCube => ser_closed_cube(rho).map(|e| e.value).unwrap_or(f64::NAN),
            AwgnSer::Tabulated(t) => t.eval(rho),
        }
    }

    /// Tabulates the quadrature SER of `c`.
    pub fn tabulate(c: &Constellation, tol: f64) -> Result<Self> {
        let engine = QuadratureEngine::new(&c.reduced(), c.priors())?;
        let rhos = crate::numerics::logspace(1e-4, 1e4, 161);
        let values = rhos.iter().map(|&r| engine.ser(r, tol).map(|e| e.value)).collect::<Result<Vec<_>>>()?;
        // the table needs ρP'/P to about 1e-7, not P' to `tol`
        let slopes = rhos
            .iter()
            .zip(&values)
            .map(|(&r, &v)| engine.derivative(r, 1, (1e-7 * v / r).max(tol)))
            .collect::<Result<Vec<_>>>()?;
        Ok(AwgnSer::Tabulated(SerTable::with_derivatives(&rhos, &values, &slopes)?))
    }
}

/// Monotone (Fritsch–Carlson) cubic interpolant of `ln SER` against `ln ρ`.
#[derive(Debug, Clone)]
pub struct SerTable {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl SerTable {
    pub fn new(rho: &[f64], values: &[f64]) -> Result<Self> {
        if rho.len() != values.len() || rho.len() < 2 {
            return Err(Error::InvalidArgument("table needs at least two matching points".into()));
        }
        let x: Vec<f64> = rho.iter().map(|r| r.ln()).collect();
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("table abscissae must increase".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidArgument("table values must be nonnegative".into()));
        }
        let y: Vec<f64> = values.iter().map(|v| v.max(1e-300).ln()).collect();
        let n = x.len();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for k in 1..n - 1 {
            slope[k] = if delta[k - 1] * delta[k] <= 0.0 { 0.0 } else { 0.5 * (delta[k - 1] + delta[k]) };
        }
        for k in 0..n - 1 {
            if delta[k] == 0.0 {
                slope[k] = 0.0;
                slope[k + 1] = 0.0;
                continue;
            }
            let a = slope[k] / delta[k];
            let b = slope[k + 1] / delta[k];
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                slope[k] = t * a * delta[k];
                slope[k + 1] = t * b * delta[k];
            }
        }
        Ok(Self { x, y, slope })
    }

    /// Cubic Hermite table from values and `dP/dρ`, accurate to fourth
    /// order in the spacing.
    pub fn with_derivatives(rho: &[f64], values: &[f64], derivatives: &[f64]) -> Result<Self> {
        if derivatives.len() != rho.len() {
            return Err(Error::InvalidArgument("one derivative per table point is needed".into()));
        }
        let mut t = Self::new(rho, values)?;
        for (k, (&r, (&v, &d))) in rho.iter().zip(values.iter().zip(derivatives)).enumerate() {
            // d ln P / d ln ρ; keep the secant-based slope where P underflows
            if v > 1e-290 {
                t.slope[k] = r * d / v;
            }
        }
        Ok(t)
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let t = rho.ln();
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0].exp();
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1].exp();
        }
        let k = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (h00, h10, h01, h11) =
            (2.0 * s.powi(3) - 3.0 * s * s + 1.0, s.powi(3) - 2.0 * s * s + s, -2.0 * s.powi(3) + 3.0 * s * s, s.powi(3) - s * s);
        (h00 * self.y[k] + h10 * h * self.slope[k] + h01 * self.y[k + 1] + h11 * h * self.slope[k + 1]).exp()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub rho: f64,
    pub direct: f64,
    pub direct_stderr: f64,
    pub mixture: f64,
    pub mixture_stderr: f64,
    pub z: f64,
}

/// Direct MC under compound noise against the average of the AWGN SER at
/// `ρ/W` over independent draws of `W`.
pub fn compound_ser_identity_check(
    c: &Constellation,
    spec: &MixingSpec,
    oracle: &AwgnSer,
    rho: f64,
    n: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let direct = ser_mc(c, &NoiseModel::Compound { mixing: *spec }, rho, n, seed)?;
    let ws = sample_mixing(spec, n, seed ^ 0x5DEE_CE66_D1CE_4E5B)?;
    let vals: Vec<f64> = ws.iter().map(|&w| oracle.eval(rho / w)).collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
    let mixture_stderr = (var / n as f64).sqrt();
    let combined = (direct.stderr.powi(2) + mixture_stderr.powi(2)).sqrt();
    let z = if combined > 0.0 { (direct.value - mean) / combined } else { 0.0 };
    Ok(IdentityReport { rho, direct: direct.value, direct_stderr: direct.stderr, mixture: mean, mixture_stderr, z })
}
