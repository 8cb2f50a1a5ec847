use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::QuadratureEngine;
use super::{check_rho, Method, SerEstimate};
use crate::constellation::ReducedConstellation;
use crate::error::{Error, Result};
use crate::geometry::default_clip_radius;
use crate::numerics::upper_gamma_half;

/// Sampled `μ̃` with `P_e(ρ) = ρ^{N*/2} ∫ e^{−ρu} μ̃(u) du`.
#[derive(Debug, Clone, Serialize)]
pub struct RepresentingFn {
    pub u_grid: Vec<f64>,
    pub mu_values: Vec<f64>,
    pub reduced_dim: usize,
    /// `b_min²/2`, below which `μ̃` vanishes identically.
    pub onset: f64,
    pub warnings: Vec<String>,
}

impl RepresentingFn {
    pub fn new(u_grid: Vec<f64>, mu_values: Vec<f64>, reduced_dim: usize, onset: f64) -> Result<Self> {
        check_grid(&u_grid)?;
        if mu_values.len() != u_grid.len() {
            return Err(Error::Grid("μ̃ samples and grid differ in length".into()));
        }
        Ok(Self { u_grid, mu_values, reduced_dim, onset, warnings: Vec::new() })
    }

    /// First grid abscissa where `μ̃` exceeds `threshold`.
    pub fn support_start(&self, threshold: f64) -> Option<f64> {
        self.u_grid.iter().zip(&self.mu_values).find(|(_, &m)| m > threshold).map(|(&u, _)| u)
    }

    /// Largest grid spacing at or below `u`.
    pub fn step_near(&self, u: f64) -> f64 {
        let k = self.u_grid.partition_point(|&g| g <= u).clamp(1, self.u_grid.len() - 1);
        self.u_grid[k] - self.u_grid[k - 1]
    }
}

fn check_grid(u: &[f64]) -> Result<()> {
    if u.len() < 3 {
        return Err(Error::Grid("u grid needs at least three points".into()));
    }
    if u[0] < 0.0 || u.windows(2).any(|w| !(w[1] > w[0])) || !u.iter().all(|v| v.is_finite()) {
        return Err(Error::Grid("u grid must be finite, nonnegative and strictly increasing".into()));
    }
    Ok(())
}

/// Step `0.002` on `[0, 8]`, then `0.02` up to `u_max`.
pub fn default_u_grid(u_max: f64) -> Vec<f64> {
    let mut g = Vec::new();
    let fine = 8.0f64.min(u_max);
    let n_fine = (fine / 0.002).round() as usize;
    g.extend((0..=n_fine).map(|k| k as f64 * 0.002));
    if u_max > 8.0 {
        let n_coarse = ((u_max - 8.0) / 0.02).round() as usize;
        g.extend((1..=n_coarse).map(|k| 8.0 + k as f64 * 0.02));
    }
    g
}

/// `μ̃` on `u_grid`, summed over symbols with their priors. The clip radius
/// is raised as needed so that only real facets contribute on the grid.
pub fn representing_fn(r: &ReducedConstellation, priors: &[f64], u_grid: &[f64], tol: f64) -> Result<RepresentingFn> {
    check_grid(u_grid)?;
    if r.reduced_dim() < 2 {
        return Err(Error::InvalidArgument("representing function needs reduced dimension ≥ 2".into()));
    }
    let u_max = *u_grid.last().expect("checked nonempty");
    let radius = default_clip_radius(r).max(1.01 * (2.0 * u_max).sqrt());
    let engine = QuadratureEngine::with_clip_radius(r, priors, Some(radius))?;
    let mu_values = u_grid.par_iter().map(|&u| engine.mu_tilde(u, tol)).collect::<Result<Vec<_>>>()?;
    let onset = engine.onset();
    let mut out = RepresentingFn::new(u_grid.to_vec(), mu_values, r.reduced_dim(), onset)?;
    if out.step_near(onset) > onset {
        out.warnings.push(format!("grid step {:.3e} does not resolve the onset at u = {onset:.4e}", out.step_near(onset)));
    }
    Ok(out)
}

/// `ρ^{N*/2} ∫ e^{−ρu} μ̃(u) du` over the grid, with `μ̃` interpolated
/// linearly in `s = √(u − onset)` (it grows like a power of `s` at the onset)
/// and each piece integrated by 4-point Gauss–Legendre. Fails when the
/// neglected tail beyond the last grid point could exceed `tol`.
pub fn reconstruct_ser(mu: &RepresentingFn, rho: f64, tol: f64) -> Result<SerEstimate> {
    check_rho(rho)?;
    let n = mu.reduced_dim;
    let u_max = *mu.u_grid.last().expect("grid checked at construction");
    // μ̃(u) ≤ u^{N/2−1}/Γ(N/2) because the solid angle is at most the sphere
    let tail = upper_gamma_half(n, rho * u_max);
    if tail > tol {
        return Err(Error::Grid(format!(
            "grid ends at u = {u_max}; tail bound {tail:.3e} exceeds {tol:.1e} at rho = {rho}"
        )));
    }
    const GL4: [(f64, f64); 4] = [
        (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    ];
    let u0 = mu.onset;
    let s_of = |u: f64| (u - u0).max(0.0).sqrt();
    let mut integral = 0.0;
    for k in 0..mu.u_grid.len() - 1 {
        let (mut a, b) = (mu.u_grid[k], mu.u_grid[k + 1]);
        let (mut fa, fb) = (mu.mu_values[k], mu.mu_values[k + 1]);
        if b <= u0 {
            continue;
        }
        if a < u0 {
            a = u0;
            fa = 0.0;
        }
        let (sa, sb) = (s_of(a), s_of(b));
        if sb <= sa {
            continue;
        }
        // u = u0 + s², du = 2s ds
        let half = 0.5 * (sb - sa);
        let mid = 0.5 * (sb + sa);
        for (x, w) in GL4 {
            let sv = mid + half * x;
            let t = (sv - sa) / (sb - sa);
            let f = fa + t * (fb - fa);
            integral += w * half * 2.0 * sv * (-rho * (u0 + sv * sv)).exp() * f;
        }
    }
    Ok(SerEstimate::exact(rho.powf(n as f64 / 2.0) * integral, Method::Bernstein, rho))
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderConditionReport {
    pub alpha: usize,
    pub nonnegative: bool,
    pub vanishes_below_onset: bool,
    pub monotone: bool,
    /// Index `k` where the condition first breaks between samples `k` and
    /// `k + 1`.
    pub first_violation: Option<usize>,
    pub passed: bool,
}

/// Checks the conditions for `x^α g(x)` to be completely monotone on sampled
/// `μ̃`: nonnegative, zero below the onset, and for `α = 1` nondecreasing, for
/// `α = 2` with nondecreasing difference quotients as well.
pub fn cm_order_conditions(mu: &RepresentingFn, alpha: usize) -> Result<OrderConditionReport> {
    if !(1..=2).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha must be 1 or 2, got {alpha}")));
    }
    check_grid(&mu.u_grid)?;
    let v = &mu.mu_values;
    let nonnegative = v.iter().all(|&m| m >= -1e-12);
    let vanishes_below_onset = mu.u_grid.iter().zip(v).filter(|(&u, _)| u < mu.onset).all(|(_, &m)| m.abs() < 1e-9);
    let mut first_violation = (0..v.len() - 1).find(|&k| v[k + 1] < v[k] - 1e-9);
    if alpha == 2 && first_violation.is_none() {
        let q: Vec<f64> = (0..v.len() - 1).map(|k| (v[k + 1] - v[k]) / (mu.u_grid[k + 1] - mu.u_grid[k])).collect();
        first_violation = (0..q.len() - 1).find(|&k| q[k + 1] < q[k] - 1e-6 * (1.0 + q[k].abs()));
    }
    let monotone = first_violation.is_none();
    Ok(OrderConditionReport {
        alpha,
        nonnegative,
        vanishes_below_onset,
        monotone,
        first_violation,
        passed: nonnegative && vanishes_below_onset && monotone,
    })
}
