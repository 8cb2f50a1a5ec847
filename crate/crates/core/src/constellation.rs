//! Constellations, energy normalization, minimum distance, SVD reduction to
//! full rank and the complex-to-real embedding.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PRIOR_SUM_TOL: f64 = 1e-12;

/// A set of `M` signal points in `R^N` (columns of `points`) with prior
/// probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: DMatrix<f64>,
    priors: Vec<f64>,
    label: String,
}

impl Constellation {
    /// Validates the point matrix (N rows × M columns) and priors. Priors
    /// default to uniform.
    pub fn new(points: DMatrix<f64>, priors: Option<Vec<f64>>) -> Result<Self> {
        Self::with_label(points, priors, "")
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_label(
        points: DMatrix<f64>,
        priors: Option<Vec<f64>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let m = points.ncols();
        if m < 2 {
            return Err(Error::TooFewSymbols(m));
        }
        if points.nrows() == 0 {
            return Err(Error::InvalidArgument("points must have at least one row".into()));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("points must be finite".into()));
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if (points.column(i) - points.column(j)).norm() == 0.0 {
                    return Err(Error::DuplicateSymbol(i, j));
                }
            }
        }
        let priors = match priors {
            None => vec![1.0 / m as f64; m],
            Some(p) => {
                if p.len() != m {
                    return Err(Error::InvalidPriors(format!(
                        "expected {m} priors, got {}",
                        p.len()
                    )));
                }
                if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                    return Err(Error::InvalidPriors("priors must be nonnegative".into()));
                }
                let sum: f64 = p.iter().sum();
                if (sum - 1.0).abs() > PRIOR_SUM_TOL {
                    return Err(Error::InvalidPriors(format!("priors sum to {sum}, not 1")));
                }
                p
            }
        };
        Ok(Self { points, priors, label: label.into() })
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.points.column(i).into_owned()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    /// Number of symbols `M`.
    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Average symbol energy `M⁻¹ Σ ‖s_i‖²` (unweighted, as in the
    /// normalization convention).
    pub fn mean_energy(&self) -> f64 {
        self.points.column_iter().map(|c| c.norm_squared()).sum::<f64>() / self.len() as f64
    }

    /// Rescales by a single global factor so that `M⁻¹ Σ ‖s_i‖² = 1`.
    pub fn energy_normalize(&self) -> Result<Self> {
        let energy = self.mean_energy();
        if energy == 0.0 {
            return Err(Error::ZeroEnergy);
        }
        let scale = energy.sqrt().recip();
        Ok(Self {
            points: &self.points * scale,
            priors: self.priors.clone(),
            label: self.label.clone(),
        })
    }

    pub fn min_distance(&self) -> f64 {
        min_pairwise_distance(&self.points)
    }

    pub fn max_distance(&self) -> f64 {
        let m = self.len();
        let mut best: f64 = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                best = best.max((self.points.column(i) - self.points.column(j)).norm());
            }
        }
        best
    }

    /// Default rank tolerance `max(N, M)·ε·σ_max`.
    pub fn default_rank_tol(&self) -> f64 {
        let svd = self.points.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        self.dim().max(self.len()) as f64 * f64::EPSILON * smax
    }

    /// Reduced constellation: the first `N*` rows of `ΣVᵀ = UᵀS`, where `N*`
    /// counts singular values above `rank_tol`.
    pub fn reduce(&self, rank_tol: Option<f64>) -> ReducedConstellation {
        let svd = self.points.clone().svd(true, false);
        let u = svd.u.expect("requested U");
        let sv = svd.singular_values.clone();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let tol = rank_tol
            .unwrap_or(self.dim().max(self.len()) as f64 * f64::EPSILON * smax);
        // nalgebra does not guarantee ordering; sort columns by singular value.
        let mut order: Vec<usize> = (0..sv.len()).collect();
        order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
        let reduced_dim = order.iter().filter(|&&k| sv[k] > tol).count().max(1);
        let mut basis = DMatrix::<f64>::zeros(self.dim(), order.len());
        for (dst, &src) in order.iter().enumerate() {
            basis.set_column(dst, &u.column(src));
        }
        let projected = basis.columns(0, reduced_dim).transpose() * &self.points;
        ReducedConstellation {
            points: projected,
            reduced_dim,
            rotation: basis,
            singular_values: order.iter().map(|&k| sv[k]).collect(),
        }
    }

    /// Reduced constellation with the default rank tolerance.
    pub fn reduced(&self) -> ReducedConstellation {
        self.reduce(None)
    }

    /// Real `2N × M` embedding `[Re(s); Im(s)]` of a complex constellation.
    pub fn complex_embed(points: &DMatrix<Complex<f64>>, priors: Option<Vec<f64>>) -> Result<Self> {
        let n = points.nrows();
        let m = points.ncols();
        let mut real = DMatrix::<f64>::zeros(2 * n, m);
        for j in 0..m {
            for k in 0..n {
                real[(k, j)] = points[(k, j)].re;
                real[(n + k, j)] = points[(k, j)].im;
            }
        }
        Self::new(real, priors)
    }
}

fn min_pairwise_distance(points: &DMatrix<f64>) -> f64 {
    let m = points.ncols();
    let mut best = f64::INFINITY;
    for i in 0..m {
        for j in (i + 1)..m {
            best = best.min((points.column(i) - points.column(j)).norm());
        }
    }
    best
}

/// Full-rank re-expression of a constellation in `R^{N*}`.
#[derive(Debug, Clone)]
pub struct ReducedConstellation {
    points: DMatrix<f64>,
    reduced_dim: usize,
    /// Left singular vectors (columns sorted by decreasing singular value);
    /// kept for audit only.
    pub rotation: DMatrix<f64>,
    pub singular_values: Vec<f64>,
}

impl ReducedConstellation {
    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.points.column(i).into_owned()
    }

    pub fn reduced_dim(&self) -> usize {
        self.reduced_dim
    }

    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.ncols() == 0
    }

    pub fn min_distance(&self) -> f64 {
        min_pairwise_distance(&self.points)
    }

    pub fn max_distance(&self) -> f64 {
        let m = self.len();
        let mut best: f64 = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                best = best.max((self.points.column(i) - self.points.column(j)).norm());
            }
        }
        best
    }

    /// Treats the reduced matrix as a constellation in its own right.
    pub fn to_constellation(&self, priors: &[f64]) -> Result<Constellation> {
        Constellation::new(self.points.clone(), Some(priors.to_vec()))
    }
}

/// Average SNR per real dimension.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SnrPoint(f64);

impl SnrPoint {
    pub fn new(rho: f64) -> Result<Self> {
        if rho > 0.0 && rho.is_finite() {
            Ok(Self(rho))
        } else {
            Err(Error::InvalidArgument(format!("SNR must be positive and finite, got {rho}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}
