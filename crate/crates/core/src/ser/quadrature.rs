use std::cell::Cell;

use rayon::prelude::*;

use super::{check_rho, Method, SerEstimate};
use crate::constellation::ReducedConstellation;
use crate::error::{Error, Result};
use crate::geometry::{Decomposition, SimplicialCone, SymbolCells};
use crate::numerics::{integrate, sphere_area, upper_gamma_half_rho_derivative};

/// Largest reduced dimension handled by the cone quadrature.
pub const MAX_QUADRATURE_DIM: usize = 4;
/// Highest derivative order supported.
pub const MAX_ORDER: usize = 6;

const MAX_SEGMENTS: usize = 2000;

type Vec4 = [f64; MAX_QUADRATURE_DIM];

/// Cone decomposition of a reduced constellation plus its priors; evaluates
/// the SER, its ρ-derivatives and the solid-angle function behind `μ̃`.
///
/// Over a simplicial cone with facet points `p_1..p_N` the direction is
/// parameterized as `x(t) = p_1 + Σ t_k (p_k − p_1)` on the unit simplex,
/// with `dΩ = |det P| ‖x‖^{−N} dt`. On a real facet `‖x(t)‖` is the exit
/// radius itself; through an artificial facet the exit radius is taken from
/// the unclipped cell.
#[derive(Debug, Clone)]
pub struct QuadratureEngine {
    decomposition: Decomposition,
    priors: Vec<f64>,
    dim: usize,
}

impl QuadratureEngine {
    pub fn new(r: &ReducedConstellation, priors: &[f64]) -> Result<Self> {
        Self::with_clip_radius(r, priors, None)
    }

    pub fn with_clip_radius(r: &ReducedConstellation, priors: &[f64], clip_radius: Option<f64>) -> Result<Self> {
        let dim = r.reduced_dim();
        if dim > MAX_QUADRATURE_DIM {
            return Err(Error::DimensionTooLarge { dim, max: MAX_QUADRATURE_DIM });
        }
        if priors.len() != r.len() {
            return Err(Error::InvalidPriors(format!("expected {} priors, got {}", r.len(), priors.len())));
        }
        let decomposition = Decomposition::new(r, clip_radius)?;
        Ok(Self { decomposition, priors: priors.to_vec(), dim })
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// Smallest facet offset over all cells, i.e. `d_min/2`.
    pub fn min_offset(&self) -> f64 {
        self.decomposition.symbols.iter().map(|s| s.region.min_offset()).fold(f64::INFINITY, f64::min)
    }

    /// Start of the support of `μ̃`: `b_min²/2 = d_min²/8`.
    pub fn onset(&self) -> f64 {
        self.min_offset().powi(2) / 2.0
    }

    pub fn ser(&self, rho: f64, tol: f64) -> Result<SerEstimate> {
        let v = self.derivative(rho, 0, tol)?;
        Ok(SerEstimate::exact(v, Method::Quadrature, rho))
    }

    /// `dⁿ P_e / dρⁿ`, differentiating under the angular integral.
    pub fn derivative(&self, rho: f64, order: usize, tol: f64) -> Result<f64> {
        let per_symbol = self.symbol_derivatives(rho, order, tol)?;
        Ok(per_symbol.iter().zip(&self.priors).map(|(v, p)| v * p).sum())
    }

    /// Per-symbol `dⁿ P_{e,i} / dρⁿ`.
    pub fn symbol_derivatives(&self, rho: f64, order: usize, tol: f64) -> Result<Vec<f64>> {
        check_rho(rho)?;
        check_tol(tol)?;
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh(order));
        }
        let area = sphere_area(self.dim);
        let jobs: Vec<(usize, usize)> = self
            .decomposition
            .symbols
            .iter()
            .enumerate()
            .flat_map(|(i, s)| (0..s.cones.len()).map(move |k| (i, k)))
            .collect();
        let values: Vec<Result<f64>> = jobs
            .par_iter()
            .map(|&(i, k)| {
                let cells = &self.decomposition.symbols[i];
                let cone_tol = tol * area / cells.cones.len() as f64 / self.dim.max(2) as f64;
                self.cone_integral(cells, &cells.cones[k], rho, order, cone_tol)
            })
            .collect();
        let mut out = vec![0.0; self.decomposition.symbols.len()];
        for (&(i, _), v) in jobs.iter().zip(values) {
            out[i] += v?;
        }
        Ok(out.into_iter().map(|v| v / area).collect())
    }

    fn cone_integral(&self, cells: &SymbolCells, cone: &SimplicialCone, rho: f64, order: usize, tol: f64) -> Result<f64> {
        let n = self.dim;
        let radial = |x: &Vec4| -> (f64, f64) {
            let r2: f64 = x[..n].iter().map(|v| v * v).sum();
            let rbar = if cone.artificial {
                let r = r2.sqrt();
                cells
                    .cell
                    .real
                    .iter()
                    .filter_map(|h| {
                        let d: f64 = (0..n).map(|k| h.a[k] * x[k]).sum::<f64>() / r;
                        (d > 0.0).then(|| h.b / d)
                    })
                    .fold(f64::INFINITY, f64::min)
            } else {
                r2.sqrt()
            };
            let c = if rbar.is_finite() { 0.5 * rbar * rbar } else { f64::INFINITY };
            (r2, upper_gamma_half_rho_derivative(n, order, rho, c))
        };
        if n == 1 {
            let x = to4(&cone.points[0]);
            return Ok(radial(&x).1);
        }
        let det = cone.point_matrix().determinant().abs();
        let p1 = to4(&cone.points[0]);
        let dirs: Vec<Vec4> = cone.points[1..].iter().map(|p| sub4(&to4(p), &p1, n)).collect();
        let ok = Cell::new(true);
        let value = nested(&p1, &dirs, 0, 1.0, n, tol, &ok, &|x: &Vec4| {
            let (r2, k) = radial(x);
            if k == 0.0 {
                0.0
            } else {
                k * det / r2.powf(n as f64 / 2.0)
            }
        });
        if !ok.get() {
            return Err(Error::NonConvergence(format!(
                "angular quadrature on symbol {} facet {}",
                cone.symbol_index, cone.facet_index
            )));
        }
        Ok(value)
    }

    /// Solid angle of directions whose exit radius satisfies `r̄²/2 ≤ u`, for
    /// symbol `i`. Only real facets can contribute while `u < R²/2`, `R`
    /// being the clip radius.
    pub fn solid_angle_within(&self, i: usize, u: f64, tol: f64) -> Result<f64> {
        if self.dim < 2 {
            return Err(Error::InvalidArgument("representing function needs reduced dimension ≥ 2".into()));
        }
        let r = self.decomposition.clip_radius;
        if u >= 0.5 * r * r {
            return Err(Error::InvalidArgument(format!(
                "u = {u} needs a clip radius above {:.4}, have {r:.4}",
                (2.0 * u).sqrt()
            )));
        }
        let cells = &self.decomposition.symbols[i];
        let mut total = 0.0;
        for cone in cells.cones.iter().filter(|c| !c.artificial) {
            total += self.cone_solid_angle(cone, u, tol / cells.cones.len() as f64)?;
        }
        Ok(total)
    }

    fn cone_solid_angle(&self, cone: &SimplicialCone, u: f64, tol: f64) -> Result<f64> {
        let n = self.dim;
        if u <= 0.0 || cone.halfspace.b.powi(2) / 2.0 >= u {
            return Ok(0.0);
        }
        let det = cone.point_matrix().determinant().abs();
        let p1 = to4(&cone.points[0]);
        let dirs: Vec<Vec4> = cone.points[1..].iter().map(|p| sub4(&to4(p), &p1, n)).collect();
        let ok = Cell::new(true);
        let v = det * sublevel_nested(&p1, &dirs, 0, 1.0, n, 2.0 * u, tol / det, &ok);
        if !ok.get() {
            return Err(Error::NonConvergence(format!(
                "solid angle on symbol {} facet {} at u = {u}",
                cone.symbol_index, cone.facet_index
            )));
        }
        Ok(v)
    }

    /// `μ̃(u) = Σ_i π_i u^{N/2−1} Ω_i(u) / (2π^{N/2})`.
    pub fn mu_tilde(&self, u: f64, tol: f64) -> Result<f64> {
        check_tol(tol)?;
        if u <= 0.0 {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for (i, p) in self.priors.iter().enumerate() {
            if *p > 0.0 {
                total += p * self.solid_angle_within(i, u, tol)?;
            }
        }
        let half = self.dim as f64 / 2.0;
        Ok(u.powf(half - 1.0) * total / (2.0 * std::f64::consts::PI.powf(half)))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

fn to4(v: &nalgebra::DVector<f64>) -> Vec4 {
    let mut out = [0.0; MAX_QUADRATURE_DIM];
    out[..v.len()].copy_from_slice(v.as_slice());
    out
}

fn sub4(a: &Vec4, b: &Vec4, n: usize) -> Vec4 {
    let mut out = [0.0; MAX_QUADRATURE_DIM];
    for k in 0..n {
        out[k] = a[k] - b[k];
    }
    out
}

fn axpy(base: &Vec4, t: f64, d: &Vec4, n: usize) -> Vec4 {
    let mut out = *base;
    for k in 0..n {
        out[k] += t * d[k];
    }
    out
}

/// `∫_{simplex} f(base + Σ t_k dirs_k) dt` by nested adaptive quadrature.
#[allow(clippy::too_many_arguments)]
fn nested(base: &Vec4, dirs: &[Vec4], level: usize, rem: f64, n: usize, tol: f64, ok: &Cell<bool>, f: &dyn Fn(&Vec4) -> f64) -> f64 {
    if level == dirs.len() {
        return f(base);
    }
    let r = integrate(
        |t| nested(&axpy(base, t, &dirs[level], n), dirs, level + 1, rem - t, n, tol, ok, f),
        0.0,
        rem,
        tol,
        1e-11,
        MAX_SEGMENTS,
    );
    if !r.converged {
        ok.set(false);
    }
    r.value
}

/// `∫_{simplex} I[‖x‖² ≤ level_sq] ‖x‖^{−N} dt`, with the innermost
/// variable done exactly on the sublevel interval of the quadratic `‖x‖²`.
#[allow(clippy::too_many_arguments)]
fn sublevel_nested(base: &Vec4, dirs: &[Vec4], level: usize, rem: f64, n: usize, level_sq: f64, tol: f64, ok: &Cell<bool>) -> f64 {
    if level + 1 == dirs.len() {
        return sublevel_line(base, &dirs[level], rem, n, level_sq);
    }
    let mut cuts = vec![0.0, rem];
    if level + 2 == dirs.len() {
        cuts.extend(line_kinks(base, &dirs[level], &dirs[level + 1], rem, n, level_sq));
        cuts.sort_by(f64::total_cmp);
    }
    let mut total = 0.0;
    for w in cuts.windows(2).filter(|w| w[1] > w[0]) {
        let r = integrate(
            |t| sublevel_nested(&axpy(base, t, &dirs[level], n), dirs, level + 1, rem - t, n, level_sq, tol, ok),
            w[0],
            w[1],
            tol,
            1e-12,
            MAX_SEGMENTS,
        );
        if !r.converged {
            ok.set(false);
        }
        total += r.value;
    }
    total
}

/// Values of `t ∈ (0, rem)` where the sublevel interval of the inner line
/// `s ↦ base + t·d1 + s·d2`, `s ∈ [0, rem − t]`, appears or touches an end
/// of its segment. The inner integral has kinks there.
fn line_kinks(base: &Vec4, d1: &Vec4, d2: &Vec4, rem: f64, n: usize, level_sq: f64) -> Vec<f64> {
    let dot = |x: &Vec4, y: &Vec4| (0..n).map(|k| x[k] * y[k]).sum::<f64>();
    let mut out = Vec::new();
    let mut roots = |qa: f64, qb: f64, qc: f64| {
        // qa t² + qb t + qc = 0
        if qa.abs() < 1e-300 {
            if qb != 0.0 {
                out.push(-qc / qb);
            }
            return;
        }
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            out.push((-qb - sq) / (2.0 * qa));
            out.push((-qb + sq) / (2.0 * qa));
        }
    };
    // tangency: (x·d2)² = ‖d2‖²(‖x‖² − L) with x = base + t·d1
    let a2 = dot(d2, d2);
    let (bb, bd1, d1d1, bd2, d1d2) = (dot(base, base), dot(base, d1), dot(d1, d1), dot(base, d2), dot(d1, d2));
    roots(d1d2 * d1d2 - a2 * d1d1, 2.0 * (bd2 * d1d2 - a2 * bd1), bd2 * bd2 - a2 * (bb - level_sq));
    // segment start on the sphere: ‖base + t·d1‖² = L
    roots(d1d1, 2.0 * bd1, bb - level_sq);
    // segment end: ‖base + rem·d2 + t(d1 − d2)‖² = L
    let e = axpy(base, rem, d2, n);
    let g = sub4(d1, d2, n);
    roots(dot(&g, &g), 2.0 * dot(&e, &g), dot(&e, &e) - level_sq);
    out.retain(|&t| t.is_finite() && t > 0.0 && t < rem);
    out
}

/// `∫_0^{rem} I[q(t) ≤ level_sq] q(t)^{−N/2} dt` with `q(t) = ‖base + t·d‖²`.
fn sublevel_line(base: &Vec4, d: &Vec4, rem: f64, n: usize, level_sq: f64) -> f64 {
    if rem <= 0.0 {
        return 0.0;
    }
    let a: f64 = d[..n].iter().map(|v| v * v).sum();
    let b: f64 = 2.0 * (0..n).map(|k| base[k] * d[k]).sum::<f64>();
    let c: f64 = base[..n].iter().map(|v| v * v).sum();
    let disc = b * b - 4.0 * a * (c - level_sq);
    if disc <= 0.0 || a <= 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    let lo = ((-b - sq) / (2.0 * a)).max(0.0);
    let hi = ((-b + sq) / (2.0 * a)).min(rem);
    if hi <= lo {
        return 0.0;
    }
    let delta = 4.0 * a * c - b * b;
    let atan_part = |t: f64| 2.0 / delta.sqrt() * ((2.0 * a * t + b) / delta.sqrt()).atan();
    let anti = |t: f64| {
        let q = (a * t + b) * t + c;
        match n {
            2 => atan_part(t),
            3 => 2.0 * (2.0 * a * t + b) / (delta * q.sqrt()),
            4 => (2.0 * a * t + b) / (delta * q) + 2.0 * a / delta * atan_part(t),
            _ => unreachable!("reduced dimension checked at construction"),
        }
    };
    anti(hi) - anti(lo)
}

/// SER by cone quadrature to absolute tolerance `tol`.
pub fn ser_quadrature(r: &ReducedConstellation, priors: &[f64], rho: f64, tol: f64) -> Result<SerEstimate> {
    QuadratureEngine::new(r, priors)?.ser(rho, tol)
}

/// `dⁿ P_e/dρⁿ`, `n ≤ 6`.
pub fn ser_derivative(r: &ReducedConstellation, priors: &[f64], rho: f64, order: usize, tol: f64) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh(order));
    }
    QuadratureEngine::new(r, priors)?.derivative(rho, order, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numerics::q_function;
    use crate::ser::{cube_mu_tilde, ser_closed_cube, ser_closed_qam};
    use std::f64::consts::PI;

    fn engine(c: &crate::Constellation) -> QuadratureEngine {
        QuadratureEngine::new(&c.reduced(), c.priors()).unwrap()
    }

    #[test]
    fn bpsk_is_q_of_sqrt_rho() {
        let e = engine(&fixtures::bpsk());
        for rho in [0.1, 1.0, 4.0, 30.0] {
            assert!((e.ser(rho, 1e-12).unwrap().value - q_function(rho.sqrt())).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_one_example_is_bpsk() {
        let c = fixtures::rank1();
        let e = engine(&c);
        assert_eq!(e.dim(), 1);
        // half-distance 1 as for BPSK
        assert!((e.ser(4.0, 1e-12).unwrap().value - q_function(2.0)).abs() < 1e-14);
    }

    #[test]
    fn qam_against_closed_form() {
        for m in [4, 16, 64] {
            let e = engine(&fixtures::square_qam(m).unwrap());
            for rho in [0.5, 3.0, 10.0, 30.0] {
                let v = e.ser(rho, 1e-9).unwrap().value;
                let exact = ser_closed_qam(m, rho).unwrap().value;
                assert!((v - exact).abs() < 1e-8, "M={m} rho={rho}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn cube_against_closed_form() {
        let e = engine(&fixtures::cube());
        for rho in [0.5, 1.0, 2.0, 5.0] {
            let v = e.ser(rho, 1e-8).unwrap().value;
            let exact = ser_closed_cube(rho).unwrap().value;
            assert!((v - exact).abs() < 1e-7, "rho={rho}: {v} vs {exact}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for c in [fixtures::square_qam(16).unwrap(), fixtures::cube(), fixtures::qam3d()] {
            let e = engine(&c);
            for rho in [0.7, 3.0, 12.0] {
                let h = 1e-3 * rho;
                let f = |r: f64| e.ser(r, 1e-11).unwrap().value;
                let d1 = (f(rho + h) - f(rho - h)) / (2.0 * h);
                let d2 = (f(rho + h) - 2.0 * f(rho) + f(rho - h)) / (h * h);
                let a1 = e.derivative(rho, 1, 1e-11).unwrap();
                let a2 = e.derivative(rho, 2, 1e-11).unwrap();
                assert!((a1 - d1).abs() < 1e-4f64.max(1e-3 * a1.abs()), "{} rho={rho}: {a1} vs {d1}", c.label());
                assert!((a2 - d2).abs() < 1e-4f64.max(1e-3 * a2.abs()), "{} rho={rho}: {a2} vs {d2}", c.label());
                assert!(a1 < 0.0);
            }
        }
    }

    #[test]
    fn order_limit() {
        let c = fixtures::qpsk();
        assert!(matches!(ser_derivative(&c.reduced(), c.priors(), 1.0, 7, 1e-8), Err(Error::OrderTooHigh(7))));
    }

    #[test]
    fn cube_solid_angle_matches_closed_form() {
        let c = fixtures::cube();
        let e = QuadratureEngine::with_clip_radius(&c.reduced(), c.priors(), Some(20.0)).unwrap();
        for u in [0.5, 1.2, 2.0, 2.5, 3.3, 6.0, 30.0] {
            let v = e.mu_tilde(u, 1e-12).unwrap();
            assert!((v - cube_mu_tilde(u)).abs() < 1e-9, "u={u}: {v} vs {}", cube_mu_tilde(u));
        }
    }

    #[test]
    fn qpsk_solid_angle_is_closed_form() {
        // corner cell: two walls at distance 1; μ̃ = Ω/(2π) with Ω the angle
        // of directions leaving within √(2u)
        let c = fixtures::qpsk();
        let e = QuadratureEngine::with_clip_radius(&c.reduced(), c.priors(), Some(20.0)).unwrap();
        for u in [0.4, 0.6, 1.0, 3.0] {
            let v = e.mu_tilde(u, 1e-13).unwrap();
            let expect = if u <= 0.5 {
                0.0
            } else {
                let cap = (1.0 / (2.0 * u).sqrt()).acos();
                // two caps of half-width `cap` around each wall normal, minus overlap
                (4.0 * cap - (2.0 * cap - PI / 2.0).max(0.0)) / (2.0 * PI)
            };
            assert!((v - expect).abs() < 1e-12, "u={u}: {v} vs {expect}");
        }
    }

    #[test]
    fn mu_needs_enough_clip_radius() {
        let c = fixtures::qpsk();
        let e = QuadratureEngine::with_clip_radius(&c.reduced(), c.priors(), Some(2.0)).unwrap();
        assert!(e.mu_tilde(1.5, 1e-10).is_ok());
        assert!(e.mu_tilde(2.5, 1e-10).is_err());
    }
}
