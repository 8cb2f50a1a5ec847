//! Randomized consistency checks of a [`Decomposition`] against brute-force
//! nearest-neighbour detection.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Decomposition;
use crate::constellation::ReducedConstellation;
use crate::error::Result;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub samples: usize,
    /// Points whose offset from the detected symbol lies in none of that
    /// symbol's cones.
    pub coverage_failures: usize,
    /// Points inside the interiors of two different cones of one symbol.
    pub overlap_failures: usize,
    /// Points where the Voronoi halfspaces disagree with nearest-neighbour
    /// detection (ties within tolerance excluded).
    pub classification_failures: usize,
    /// For `N* = 2`, the largest `|Σ cone angles − 2π|` over symbols.
    pub angle_closure_error: Option<f64>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.coverage_failures == 0
            && self.overlap_failures == 0
            && self.classification_failures == 0
            && self.angle_closure_error.is_none_or(|e| e < 1e-9)
    }
}

/// Draws `samples` points uniformly from a box twice the size of the
/// constellation's bounding box and checks every invariant on each.
pub fn check_invariants(r: &ReducedConstellation, samples: usize, seed: u64) -> Result<InvariantReport> {
    let d = Decomposition::new(r, None)?;
    let n = r.reduced_dim();
    let m = r.len();
    let half_width = 2.0 * r.points().amax() + 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = InvariantReport {
        samples,
        coverage_failures: 0,
        overlap_failures: 0,
        classification_failures: 0,
        angle_closure_error: None,
    };
    let pts: Vec<DVector<f64>> = (0..m).map(|i| r.point(i)).collect();
    for _ in 0..samples {
        let y = DVector::from_fn(n, |_, _| rng.random_range(-half_width..half_width));
        let dist: Vec<f64> = pts.iter().map(|s| (&y - s).norm()).collect();
        let (best, best_d) =
            dist.iter().copied().enumerate().fold((0, f64::INFINITY), |a, (k, v)| if v < a.1 { (k, v) } else { a });
        for (j, s) in pts.iter().enumerate() {
            let inside = d.symbols[j].region.contains(&(&y - s), TOL);
            let clear_winner = j == best && dist.iter().enumerate().all(|(k, &v)| k == best || v > best_d + TOL);
            let clear_loser = dist[j] > best_d + TOL;
            if (clear_winner && !inside) || (clear_loser && inside) {
                report.classification_failures += 1;
                break;
            }
        }
        let x = &y - &pts[best];
        let cones = &d.symbols[best].cones;
        if !cones.iter().any(|c| c.contains(&x, TOL)) {
            report.coverage_failures += 1;
        }
        if cones.iter().filter(|c| c.contains(&x, -TOL)).count() > 1 {
            report.overlap_failures += 1;
        }
    }
    if n == 2 {
        let worst = d
            .symbols
            .iter()
            .map(|s| {
                let total: f64 = s
                    .cones
                    .iter()
                    .map(|c| {
                        let (a, b) = (&c.edges[0], &c.edges[1]);
                        (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos()
                    })
                    .sum();
                (total - 2.0 * std::f64::consts::PI).abs()
            })
            .fold(0.0, f64::max);
        report.angle_closure_error = Some(worst);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn small_runs_pass() {
        for c in [fixtures::qpsk(), fixtures::hex7(), fixtures::cube()] {
            let rep = check_invariants(&c.reduced(), 500, 1).unwrap();
            assert!(rep.passed(), "{}: {rep:?}", c.label());
        }
    }
}
