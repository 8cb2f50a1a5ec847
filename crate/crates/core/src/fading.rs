//! Fading power distributions, the `G_p` functional `E[X^p e^{−ρX}]`, grid
//! verdicts for the induced stochastic orders, and fading-averaged SER.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gauss_laguerre, integrate_to_infinity, ln_gamma, logspace};
use crate::ser::{Method, SerEstimate};

const GL_NODES: usize = 64;
/// Relative gap below which two functional values count as equal.
const TIE_TOL: f64 = 1e-12;

/// Distribution of the channel power gain `X = |h|²`, normalized to unit
/// mean for the parametric families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FadingModel {
    Degenerate { x0: f64 },
    /// Gamma with shape `m` and mean one.
    Nakagami { m: f64 },
    /// Squared Rician envelope with LoS-to-scatter ratio `k`, mean one.
    Rician { k: f64 },
    Empirical { samples: Vec<f64> },
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            FadingModel::Degenerate { x0 } => *x0 >= 0.0 && x0.is_finite(),
            FadingModel::Nakagami { m } => *m > 0.0 && m.is_finite(),
            FadingModel::Rician { k } => *k >= 0.0 && k.is_finite(),
            FadingModel::Empirical { samples } => {
                !samples.is_empty() && samples.iter().all(|&x| x >= 0.0 && x.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid fading model {self:?}")))
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            FadingModel::Degenerate { x0 } => *x0,
            FadingModel::Nakagami { .. } | FadingModel::Rician { .. } => 1.0,
            FadingModel::Empirical { samples } => samples.iter().sum::<f64>() / samples.len() as f64,
        }
    }

    /// Draws `count` channel gains.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bad = |e: String| Error::InvalidArgument(e);
        Ok(match self {
            FadingModel::Degenerate { x0 } => vec![*x0; count],
            FadingModel::Nakagami { m } => {
                let g = Gamma::new(*m, 1.0 / m).map_err(|e| bad(e.to_string()))?;
                (0..count).map(|_| g.sample(&mut rng)).collect()
            }
            FadingModel::Rician { k } => {
                // |h|² with h = √(k/(k+1)) + CN(0, 1/(k+1))
                let los = (k / (k + 1.0)).sqrt();
                let s = (0.5 / (k + 1.0)).sqrt();
                (0..count)
                    .map(|_| {
                        let re: f64 = rand::Rng::sample(&mut rng, rand_distr::StandardNormal);
                        let im: f64 = rand::Rng::sample(&mut rng, rand_distr::StandardNormal);
                        (los + s * re).powi(2) + (s * im).powi(2)
                    })
                    .collect()
            }
            FadingModel::Empirical { samples } => {
                let idx = rand_distr::Uniform::new(0, samples.len()).map_err(|e| bad(e.to_string()))?;
                (0..count).map(|_| samples[idx.sample(&mut rng)]).collect()
            }
        })
    }

    /// Poisson(`k`) weights `j ↦ e^{−k}k^j/j!` for the Rician mixture
    /// `X | J=j ~ Gamma(1+j, 1/(k+1))`, truncated when the remaining mass is
    /// below 1e-17.
    fn rician_terms(k: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut mass = 0.0;
        let mut j = 0usize;
        loop {
            let w = if k == 0.0 {
                if j == 0 { 1.0 } else { 0.0 }
            } else {
                (-k + j as f64 * k.ln() - ln_gamma(j as f64 + 1.0)).exp()
            };
            mass += w;
            out.push((1.0 + j as f64, w));
            if (1.0 - mass < 1e-17 && j as f64 > k) || j > 10_000 {
                break;
            }
            j += 1;
        }
        out
    }
}

/// `E[X^p e^{−ρX}]`.
pub fn gp_functional(f: &FadingModel, p: f64, rho: f64) -> Result<f64> {
    f.validate()?;
    if !(p >= 0.0) || !(rho >= 0.0) {
        return Err(Error::InvalidArgument("p and rho must be nonnegative".into()));
    }
    let pow = |x: f64| if p == 0.0 { 1.0 } else { x.powf(p) };
    Ok(match f {
        FadingModel::Degenerate { x0 } => pow(*x0) * (-rho * x0).exp(),
        FadingModel::Nakagami { m } => gamma_gp(*m, 1.0 / m, p, rho),
        FadingModel::Rician { k } => {
            let theta = 1.0 / (k + 1.0);
            FadingModel::rician_terms(*k).iter().map(|&(s, w)| w * gamma_gp(s, theta, p, rho)).sum()
        }
        FadingModel::Empirical { samples } => {
            samples.iter().map(|&x| pow(x) * (-rho * x).exp()).sum::<f64>() / samples.len() as f64
        }
    })
}

/// `E[X^p e^{−ρX}]` for `X ~ Gamma(shape s, scale θ)`:
/// `θ^p Γ(s+p)/Γ(s) (1+ρθ)^{−(s+p)}`.
fn gamma_gp(s: f64, theta: f64, p: f64, rho: f64) -> f64 {
    (p * theta.ln() + ln_gamma(s + p) - ln_gamma(s) - (s + p) * (rho * theta).ln_1p()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    /// `G(F1) ≥ G(F2)` on the whole grid, i.e. `X₁ ≤_{G_p} X₂`.
    FirstDominates,
    SecondDominates,
    /// The sign of `G(F1) − G(F2)` changes; `rho1` lies in `bracket`.
    Crossing { rho1: f64, bracket: [f64; 2], sign_changes: usize },
    /// Equal within tolerance everywhere.
    Tie,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub p: f64,
    pub grid: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// Verdicts are certified on the grid only.
    pub grid_certified: bool,
}

impl OrderVerdict {
    /// `X₁ ≤_{G_p} X₂` holds on the grid (ties included).
    pub fn first_le_second(&self) -> bool {
        matches!(self.relation, Relation::FirstDominates | Relation::Tie)
    }

    pub fn second_le_first(&self) -> bool {
        matches!(self.relation, Relation::SecondDominates | Relation::Tie)
    }
}

/// Default grid: 60 log-spaced points on `[10⁻², 10²]`.
pub fn default_rho_grid() -> Vec<f64> {
    logspace(1e-2, 1e2, 60)
}

fn sign_of(a: f64, b: f64) -> i8 {
    let d = a - b;
    if d.abs() <= TIE_TOL * (a.abs() + b.abs()) {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

pub fn check_gp_order(f1: &FadingModel, f2: &FadingModel, p: f64, rho_grid: &[f64]) -> Result<OrderVerdict> {
    if rho_grid.is_empty() || rho_grid.windows(2).any(|w| !(w[1] > w[0])) || !(rho_grid[0] >= 0.0) {
        return Err(Error::Grid("rho grid must be nonempty, nonnegative and increasing".into()));
    }
    let first = rho_grid.iter().map(|&r| gp_functional(f1, p, r)).collect::<Result<Vec<_>>>()?;
    let second = rho_grid.iter().map(|&r| gp_functional(f2, p, r)).collect::<Result<Vec<_>>>()?;
    let relation = if first.iter().chain(&second).any(|v| !v.is_finite()) {
        Relation::Indeterminate
    } else {
        let signs: Vec<i8> = first.iter().zip(&second).map(|(&a, &b)| sign_of(a, b)).collect();
        let nonzero: Vec<(usize, i8)> = signs.iter().copied().enumerate().filter(|&(_, s)| s != 0).collect();
        if nonzero.is_empty() {
            Relation::Tie
        } else if nonzero.iter().all(|&(_, s)| s > 0) {
            Relation::FirstDominates
        } else if nonzero.iter().all(|&(_, s)| s < 0) {
            Relation::SecondDominates
        } else {
            let changes: Vec<(usize, usize)> =
                nonzero.windows(2).filter(|w| w[0].1 != w[1].1).map(|w| (w[0].0, w[1].0)).collect();
            let (lo, hi) = (rho_grid[changes[0].0], rho_grid[changes[0].1]);
            let s_lo = nonzero.iter().find(|&&(k, _)| k == changes[0].0).expect("present").1;
            let bracket = refine_crossing(f1, f2, p, lo, hi, s_lo)?;
            Relation::Crossing { rho1: 0.5 * (bracket[0] + bracket[1]), bracket, sign_changes: changes.len() }
        }
    };
    Ok(OrderVerdict { relation, p, grid: rho_grid.to_vec(), first, second, grid_certified: true })
}

/// Bisection (geometric when possible) until the bracket is 1e-6 relative.
fn refine_crossing(f1: &FadingModel, f2: &FadingModel, p: f64, mut lo: f64, mut hi: f64, s_lo: i8) -> Result<[f64; 2]> {
    for _ in 0..200 {
        if hi - lo <= 1e-6 * hi {
            break;
        }
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let s = sign_of(gp_functional(f1, p, mid)?, gp_functional(f2, p, mid)?);
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok([lo, hi])
}

/// The LT order is the `G_0` order.
pub fn lt_order_check(f1: &FadingModel, f2: &FadingModel, rho_grid: &[f64]) -> Result<OrderVerdict> {
    check_gp_order(f1, f2, 0.0, rho_grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageMethod {
    /// 64-node generalized Gauss–Laguerre for Nakagami, Poisson-mixed for
    /// Rician. Fast, but SER curves behave like `√x` near `x = 0`, which
    /// limits it to about three digits.
    GaussLaguerre,
    /// Adaptive integration against the density.
    Adaptive,
    MonteCarlo { n: usize, seed: u64 },
}

/// `E[P(ρX)]` for an instantaneous SER function `ser(ρ)`.
pub fn avg_ser_fading<S: Fn(f64) -> f64 + Sync>(
    ser: S,
    f: &FadingModel,
    rho: f64,
    method: AverageMethod,
) -> Result<SerEstimate> {
    f.validate()?;
    crate::ser::check_rho(rho)?;
    let at = |x: f64| if x > 0.0 { ser(rho * x) } else { ser(f64::MIN_POSITIVE) };
    let exact = |v: f64| Ok(SerEstimate { value: v, stderr: 0.0, method: Method::Quadrature, rho });
    match (method, f) {
        (AverageMethod::MonteCarlo { n, seed }, _) => {
            if n < 2 {
                return Err(Error::InvalidArgument("need at least two fading draws".into()));
            }
            let xs = f.sample(n, seed)?;
            let vals: Vec<f64> = xs.iter().map(|&x| at(x)).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            Ok(SerEstimate { value: mean, stderr: (var / n as f64).sqrt(), method: Method::Mc, rho })
        }
        (_, FadingModel::Degenerate { x0 }) => exact(at(*x0)),
        (_, FadingModel::Empirical { samples }) => {
            exact(samples.iter().map(|&x| at(x)).sum::<f64>() / samples.len() as f64)
        }
        (AverageMethod::GaussLaguerre, FadingModel::Nakagami { m }) => {
            exact(gauss_laguerre(GL_NODES, m - 1.0).iter().map(|&(y, w)| w * at(y / m)).sum())
        }
        (AverageMethod::GaussLaguerre, FadingModel::Rician { k }) => {
            let theta = 1.0 / (k + 1.0);
            let mut total = 0.0;
            for (s, w) in FadingModel::rician_terms(*k) {
                let rule = gauss_laguerre(GL_NODES, s - 1.0);
                total += w * rule.iter().map(|&(y, wy)| wy * at(y * theta)).sum::<f64>();
            }
            exact(total)
        }
        (AverageMethod::Adaptive, FadingModel::Nakagami { m }) => {
            let m = *m;
            let ln_norm = m * m.ln() - ln_gamma(m);
            // x = s² removes the x^{m−1} endpoint behaviour for m < 1
            let r = integrate_to_infinity(
                |s| {
                    let x = s * s;
                    if x == 0.0 {
                        return 0.0;
                    }
                    2.0 * s * (ln_norm + (m - 1.0) * x.ln() - m * x).exp() * at(x)
                },
                0.0,
                1e-13,
                1e-12,
                4000,
            );
            if !r.converged {
                return Err(Error::NonConvergence("fading average".into()));
            }
            exact(r.value)
        }
        (AverageMethod::Adaptive, FadingModel::Rician { k }) => {
            let theta = 1.0 / (k + 1.0);
            let mut total = 0.0;
            for (s, w) in FadingModel::rician_terms(*k) {
                if w < 1e-18 {
                    continue;
                }
                let ln_norm = -ln_gamma(s) - s * theta.ln();
                let r = integrate_to_infinity(
                    |x| if x == 0.0 { 0.0 } else { (ln_norm + (s - 1.0) * x.ln() - x / theta).exp() * at(x) },
                    0.0,
                    1e-14,
                    1e-12,
                    4000,
                );
                if !r.converged {
                    return Err(Error::NonConvergence("fading average".into()));
                }
                total += w * r.value;
            }
            exact(total)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SerComparison {
    pub p: f64,
    pub order: OrderVerdict,
    pub grid: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// `E[P(ρX₁)] − E[P(ρX₂)]` on the grid.
    pub difference: Vec<f64>,
    /// Where the order holds, whether the SER inequality of the same
    /// direction holds as well (within `tol`).
    pub implication_holds: Option<bool>,
    /// Grid points at which the first curve exceeds the second by more
    /// than `tol`, and vice versa.
    pub first_worse_at: Vec<f64>,
    pub second_worse_at: Vec<f64>,
    /// Whether the difference changes sign beyond tolerance.
    pub curves_cross: bool,
}

/// Evaluates the `G_p` order at `p` and both fading-averaged SER curves, and
/// checks `X₁ ≤_{G_p} X₂ ⇒ E[P(ρX₁)] ≥ E[P(ρX₂)]` on the grid.
pub fn order_implies_ser_comparison<S: Fn(f64) -> f64 + Sync>(
    ser: S,
    p: f64,
    f1: &FadingModel,
    f2: &FadingModel,
    rho_grid: &[f64],
    method: AverageMethod,
    tol: f64,
) -> Result<SerComparison> {
    let order = check_gp_order(f1, f2, p, rho_grid)?;
    let first = rho_grid.iter().map(|&r| avg_ser_fading(&ser, f1, r, method).map(|e| e.value)).collect::<Result<Vec<_>>>()?;
    let second = rho_grid.iter().map(|&r| avg_ser_fading(&ser, f2, r, method).map(|e| e.value)).collect::<Result<Vec<_>>>()?;
    let difference: Vec<f64> = first.iter().zip(&second).map(|(a, b)| a - b).collect();
    let first_worse_at: Vec<f64> = rho_grid.iter().zip(&difference).filter(|(_, &d)| d > tol).map(|(&r, _)| r).collect();
    let second_worse_at: Vec<f64> = rho_grid.iter().zip(&difference).filter(|(_, &d)| d < -tol).map(|(&r, _)| r).collect();
    let implication_holds = match order.relation {
        Relation::FirstDominates => Some(second_worse_at.is_empty()),
        Relation::SecondDominates => Some(first_worse_at.is_empty()),
        Relation::Tie => Some(first_worse_at.is_empty() && second_worse_at.is_empty()),
        _ => None,
    };
    let curves_cross = !first_worse_at.is_empty() && !second_worse_at.is_empty();
    Ok(SerComparison {
        p,
        order,
        grid: rho_grid.to_vec(),
        first,
        second,
        difference,
        implication_holds,
        first_worse_at,
        second_worse_at,
        curves_cross,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplicationReport {
    pub p: f64,
    pub q: f64,
    pub antecedent: Relation,
    pub consequent: Relation,
    /// `None` when the p-order does not hold (vacuous).
    pub holds: Option<bool>,
}

/// Checks that a grid-certified `G_p` order carries over to `G_q`, `q ≤ p`.
pub fn gp_implies_gq_check(
    f1: &FadingModel,
    f2: &FadingModel,
    p: f64,
    q: f64,
    rho_grid: &[f64],
) -> Result<ImplicationReport> {
    if q > p {
        return Err(Error::InvalidArgument(format!("need q ≤ p, got q = {q}, p = {p}")));
    }
    let a = check_gp_order(f1, f2, p, rho_grid)?;
    let c = check_gp_order(f1, f2, q, rho_grid)?;
    let holds = match a.relation {
        Relation::FirstDominates => Some(c.first_le_second()),
        Relation::SecondDominates => Some(c.second_le_first()),
        Relation::Tie => Some(c.first_le_second() || c.second_le_first()),
        _ => None,
    };
    Ok(ImplicationReport { p, q, antecedent: a.relation, consequent: c.relation, holds })
}

#[derive(Debug, Clone, Serialize)]
pub struct UniversalOrderScan {
    pub p_grid: Vec<f64>,
    pub relations: Vec<Relation>,
    /// Smallest scanned `p` at which `X₁ ≤_{G_p} X₂` fails.
    pub first_le_fails_at: Option<f64>,
    /// Smallest scanned `p` at which `X₂ ≤_{G_p} X₁` fails.
    pub second_le_fails_at: Option<f64>,
    /// All scanned `p` gave a tie.
    pub tie_everywhere: bool,
}

impl UniversalOrderScan {
    /// Neither direction holds for every scanned `p`.
    pub fn no_universal_order(&self) -> bool {
        self.first_le_fails_at.is_some() && self.second_le_fails_at.is_some()
    }
}

pub fn no_universal_order_scan(
    f1: &FadingModel,
    f2: &FadingModel,
    p_grid: &[f64],
    rho_grid: &[f64],
) -> Result<UniversalOrderScan> {
    let mut relations = Vec::with_capacity(p_grid.len());
    let mut first_le_fails_at = None;
    let mut second_le_fails_at = None;
    for &p in p_grid {
        let v = check_gp_order(f1, f2, p, rho_grid)?;
        if !v.first_le_second() && first_le_fails_at.is_none() {
            first_le_fails_at = Some(p);
        }
        if !v.second_le_first() && second_le_fails_at.is_none() {
            second_le_fails_at = Some(p);
        }
        relations.push(v.relation);
    }
    let tie_everywhere = relations.iter().all(|r| matches!(r, Relation::Tie));
    Ok(UniversalOrderScan { p_grid: p_grid.to_vec(), relations, first_le_fails_at, second_le_fails_at, tie_everywhere })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q_function;

    fn nak(m: f64) -> FadingModel {
        FadingModel::Nakagami { m }
    }

    #[test]
    fn functional_examples() {
        let deg = FadingModel::Degenerate { x0: 1.0 };
        for p in [0.0, 0.5, 3.0] {
            assert!((gp_functional(&deg, p, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        }
        assert!((gp_functional(&nak(1.0), 1.0, 1.0).unwrap() - 0.25).abs() < 1e-14);
        assert!((gp_functional(&nak(2.0), 0.0, 1.0).unwrap() - 4.0 / 9.0).abs() < 1e-14);
        for f in [deg, nak(0.7), FadingModel::Rician { k: 3.0 }] {
            assert!((gp_functional(&f, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rician_functional_against_monte_carlo_and_limits() {
        let f = FadingModel::Rician { k: 2.5 };
        let xs = f.sample(400_000, 2).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 1.0).abs() < 0.01);
        let mc = xs.iter().map(|&x| x.powf(0.7) * (-1.3 * x).exp()).sum::<f64>() / xs.len() as f64;
        assert!((gp_functional(&f, 0.7, 1.3).unwrap() - mc).abs() < 2e-3);
        // K = 0 is Rayleigh
        let r = FadingModel::Rician { k: 0.0 };
        assert!((gp_functional(&r, 0.5, 2.0).unwrap() - gp_functional(&nak(1.0), 0.5, 2.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn nakagami_lt_order() {
        let v = lt_order_check(&nak(1.0), &nak(4.0), &default_rho_grid()).unwrap();
        assert_eq!(v.relation, Relation::FirstDominates);
        assert!(v.grid_certified);
    }

    #[test]
    fn nakagami_p1_crosses() {
        let v = check_gp_order(&nak(1.0), &nak(4.0), 1.0, &default_rho_grid()).unwrap();
        let Relation::Crossing { bracket, .. } = v.relation else { panic!("{:?}", v.relation) };
        assert!(bracket[1] - bracket[0] <= 1e-6 * bracket[1]);
        // "increases with m for small rho": G(m=4) > G(m=1) at the small end
        assert!(v.second[0] > v.first[0]);
        assert!(v.second.last() < v.first.last());
    }

    #[test]
    fn degenerate_vs_nakagami_crossing() {
        let v = check_gp_order(&FadingModel::Degenerate { x0: 1.0 }, &nak(2.0), 0.5, &default_rho_grid()).unwrap();
        let Relation::Crossing { rho1, .. } = v.relation else { panic!("{:?}", v.relation) };
        assert!((rho1 - 1.3556).abs() < 1e-3, "{rho1}");
    }

    #[test]
    fn identical_models_tie() {
        let v = check_gp_order(&nak(2.0), &nak(2.0), 0.5, &default_rho_grid()).unwrap();
        assert_eq!(v.relation, Relation::Tie);
        let s = no_universal_order_scan(&nak(2.0), &nak(2.0), &[0.0, 0.5, 1.0], &default_rho_grid()).unwrap();
        assert!(s.tie_everywhere);
        assert!(!s.no_universal_order());
    }

    #[test]
    fn rayleigh_average_matches_closed_form() {
        let rho: f64 = 10.0;
        let exact = 0.5 * (1.0 - (rho / (1.0 + rho)).sqrt());
        let ser = |r: f64| q_function((2.0 * r).sqrt());
        let gl = avg_ser_fading(ser, &nak(1.0), rho, AverageMethod::GaussLaguerre).unwrap().value;
        let ad = avg_ser_fading(ser, &nak(1.0), rho, AverageMethod::Adaptive).unwrap().value;
        assert!((gl - exact).abs() < 2e-2 * exact, "{gl} vs {exact}");
        assert!((ad - exact).abs() < 1e-10, "{ad} vs {exact}");
        let mc = avg_ser_fading(ser, &nak(1.0), rho, AverageMethod::MonteCarlo { n: 400_000, seed: 1 }).unwrap();
        assert!((mc.value - exact).abs() < 3.0 * mc.stderr);
        let deg = avg_ser_fading(ser, &FadingModel::Degenerate { x0: 1.0 }, rho, AverageMethod::Adaptive).unwrap();
        assert_eq!(deg.value, ser(rho));
    }

    #[test]
    fn implication_checks() {
        let grid = default_rho_grid();
        let r = gp_implies_gq_check(&nak(1.0), &nak(4.0), 1.0, 0.5, &grid).unwrap();
        assert_eq!(r.holds, None);
        let r = gp_implies_gq_check(&nak(1.0), &nak(4.0), 0.0, 0.0, &grid).unwrap();
        assert_eq!(r.holds, Some(true));
        assert!(gp_implies_gq_check(&nak(1.0), &nak(4.0), 0.0, 1.0, &grid).is_err());
    }

    #[test]
    fn json_shape() {
        let f: FadingModel = serde_json::from_str(r#"{"family": "nakagami", "m": 2.0}"#).unwrap();
        assert_eq!(f, nak(2.0));
    }
}
