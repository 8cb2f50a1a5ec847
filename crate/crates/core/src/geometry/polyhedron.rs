use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DVector;
use serde::Serialize;

use crate::constellation::ReducedConstellation;
use crate::error::{Error, Result};

/// Slack used when deciding whether an LP optimum strictly exceeds an offset.
const LP_TOL: f64 = 1e-9;

/// `aᵀx ≤ b` with unit outward normal `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Halfspace {
    pub a: DVector<f64>,
    pub b: f64,
}

impl Halfspace {
    /// Normalizes `a` to unit length (scaling `b` along with it).
    pub fn new(a: DVector<f64>, b: f64) -> Result<Self> {
        let norm = a.norm();
        if !(norm > 0.0) || !b.is_finite() {
            return Err(Error::InvalidArgument("halfspace needs a nonzero normal".into()));
        }
        Ok(Self { a: a / norm, b: b / norm })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `aᵀx − b`; nonpositive inside.
    pub fn slack(&self, x: &DVector<f64>) -> f64 {
        self.a.dot(x) - self.b
    }
}

/// A Voronoi cell in coordinates centred on its symbol, as a non-redundant
/// list of halfspaces.
#[derive(Debug, Clone, Serialize)]
pub struct Polyhedron {
    pub halfspaces: Vec<Halfspace>,
    pub symbol_index: usize,
    pub bounded: bool,
}

impl Polyhedron {
    pub fn dim(&self) -> usize {
        self.halfspaces.first().map_or(0, Halfspace::dim)
    }

    /// `Ax ≤ b + tol`.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.slack(x) <= tol)
    }

    /// Distance along the unit direction `w` from the origin to the boundary,
    /// `+∞` when the ray never leaves.
    pub fn exit_distance(&self, w: &DVector<f64>) -> f64 {
        exit_distance(&self.halfspaces, w)
    }

    pub fn min_offset(&self) -> f64 {
        self.halfspaces.iter().map(|h| h.b).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn exit_distance(halfspaces: &[Halfspace], w: &DVector<f64>) -> f64 {
    halfspaces
        .iter()
        .filter_map(|h| {
            let d = h.a.dot(w);
            (d > 0.0).then(|| h.b / d)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Voronoi cell of symbol `i`, shifted so that `s_i` sits at the origin.
pub fn voronoi_region(r: &ReducedConstellation, i: usize) -> Result<Polyhedron> {
    if i >= r.len() {
        return Err(Error::InvalidArgument(format!("symbol index {i} out of range")));
    }
    let si = r.point(i);
    let mut hs = Vec::with_capacity(r.len() - 1);
    for j in (0..r.len()).filter(|&j| j != i) {
        let diff = r.point(j) - &si;
        let norm = diff.norm();
        hs.push(Halfspace { a: diff / norm, b: norm / 2.0 });
    }
    let mut p = remove_redundant(&hs)?;
    p.symbol_index = i;
    Ok(p)
}

/// Keeps exactly the halfspaces whose removal would enlarge the set. Each
/// candidate `h` is tested by maximizing `a_hᵀx` over the others (capped at
/// `b_h + 1` to keep the LP bounded).
pub fn remove_redundant(halfspaces: &[Halfspace]) -> Result<Polyhedron> {
    let Some(first) = halfspaces.first() else {
        return Err(Error::InvalidArgument("no halfspaces".into()));
    };
    let n = first.dim();
    if halfspaces.iter().any(|h| h.dim() != n) {
        return Err(Error::InvalidArgument("halfspaces of mixed dimension".into()));
    }
    if halfspaces.iter().any(|h| !(h.b > 0.0)) {
        return Err(Error::InvalidArgument("origin must be strictly inside every halfspace".into()));
    }

    // identical constraints: keep the first
    let mut distinct: Vec<usize> = Vec::new();
    for (k, h) in halfspaces.iter().enumerate() {
        let dup = distinct.iter().any(|&d| {
            let g = &halfspaces[d];
            (&g.a - &h.a).amax() < 1e-12 && (g.b - h.b).abs() < 1e-12
        });
        if !dup {
            distinct.push(k);
        }
    }

    let bound = box_bound(halfspaces);
    let mut kept = Vec::new();
    for &k in &distinct {
        let h = &halfspaces[k];
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = (0..n).map(|c| lp.add_var(h.a[c], (-bound, bound))).collect();
        let row = |g: &Halfspace| -> Vec<(minilp::Variable, f64)> {
            vars.iter().zip(g.a.iter()).filter(|(_, &c)| c != 0.0).map(|(&v, &c)| (v, c)).collect()
        };
        for &o in distinct.iter().filter(|&&o| o != k) {
            lp.add_constraint(row(&halfspaces[o]), ComparisonOp::Le, halfspaces[o].b);
        }
        lp.add_constraint(row(h), ComparisonOp::Le, h.b + 1.0);
        let sol = lp.solve().map_err(|e| Error::Lp(format!("redundancy test for row {k}: {e}")))?;
        if sol.objective() > h.b + LP_TOL * (1.0 + h.b) {
            kept.push(h.clone());
        }
    }
    let bounded = is_bounded(&kept)?;
    Ok(Polyhedron { halfspaces: kept, symbol_index: 0, bounded })
}

/// Variables live in `[−B, B]`: minilp mishandles free variables, and `B`
/// dwarfs every offset so the box never decides a redundancy test.
fn box_bound(halfspaces: &[Halfspace]) -> f64 {
    1e6 * (1.0 + halfspaces.iter().map(|h| h.b.abs()).fold(0.0, f64::max))
}

/// A polyhedron is bounded iff every coordinate is bounded in both
/// directions; an optimum reaching the variable box counts as unbounded.
pub fn is_bounded(halfspaces: &[Halfspace]) -> Result<bool> {
    let Some(first) = halfspaces.first() else {
        return Ok(false);
    };
    let n = first.dim();
    let bound = box_bound(halfspaces);
    for c in 0..n {
        for sign in [1.0, -1.0] {
            let mut lp = Problem::new(OptimizationDirection::Maximize);
            let vars: Vec<_> = (0..n)
                .map(|k| lp.add_var(if k == c { sign } else { 0.0 }, (-bound, bound)))
                .collect();
            for h in halfspaces {
                let row: Vec<_> =
                    vars.iter().zip(h.a.iter()).filter(|(_, &v)| v != 0.0).map(|(&v, &a)| (v, a)).collect();
                lp.add_constraint(row, ComparisonOp::Le, h.b);
            }
            match lp.solve() {
                Ok(sol) if sol.objective() > 0.5 * bound => return Ok(false),
                Ok(_) => {}
                Err(e) => return Err(Error::Lp(format!("boundedness test: {e}"))),
            }
        }
    }
    Ok(true)
}
