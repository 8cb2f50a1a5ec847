use serde::Serialize;

use super::quadrature::{QuadratureEngine, MAX_ORDER};
use crate::constellation::Constellation;
use crate::error::{Error, Result};

/// Absolute slack for sign checks on derivatives.
pub const EPS_NUM: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tristate {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CmBasis {
    ReducedDimRule,
    DerivativeScan,
    MuNonneg,
}

/// A point where `(−1)ⁿ dⁿP_e/dρⁿ < −ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub rho: f64,
    pub order: usize,
    pub signed_derivative: f64,
}

/// Smallest `(−1)ⁿ P⁽ⁿ⁾` found for one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderMinimum {
    pub order: usize,
    pub rho: f64,
    pub signed_derivative: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CmVerdict {
    pub is_cm: Tristate,
    pub max_order_checked: usize,
    pub witness: Option<Witness>,
    pub basis: CmBasis,
    pub reduced_dim: usize,
    /// Whether every scanned `(−1)ⁿ P⁽ⁿ⁾` was ≥ −ε.
    pub scan_passed: bool,
    pub order_minima: Vec<OrderMinimum>,
    /// Grid intervals on which `P″ < −ε`.
    pub negative_second_derivative: Vec<[f64; 2]>,
    pub rho0: Option<f64>,
}

/// `ρ₀ = 4(p + √p)/d_min²`, `p = N*/2 − 1`; defined only for `N* > 2`.
pub fn rho0(c: &Constellation) -> Result<f64> {
    let r = c.reduced();
    let n = r.reduced_dim();
    if n <= 2 {
        return Err(Error::InvalidArgument(format!(
            "reduced dimension {n} ≤ 2: the SER is already convex, no threshold applies"
        )));
    }
    let p = n as f64 / 2.0 - 1.0;
    let d = r.min_distance();
    Ok(4.0 * (p + p.sqrt()) / (d * d))
}

/// `yes` by the reduced-dimension rule when `N* ≤ 2`; otherwise a sign scan
/// of `(−1)ⁿ dⁿP_e/dρⁿ` on `rho_grid` for `n ≤ max_order`, which can only
/// answer `no` (with a witness) or `inconclusive`. The scan runs in both
/// cases and its outcome is reported.
pub fn cm_check(c: &Constellation, rho_grid: &[f64], max_order: usize, tol: f64) -> Result<CmVerdict> {
    if max_order > MAX_ORDER {
        return Err(Error::OrderTooHigh(max_order));
    }
    if rho_grid.is_empty() || rho_grid.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::Grid("rho grid must be nonempty and positive".into()));
    }
    let r = c.reduced();
    let n = r.reduced_dim();
    let engine = QuadratureEngine::new(&r, c.priors())?;
    let mut witness = None;
    let mut order_minima = Vec::new();
    let mut negative_second_derivative: Vec<[f64; 2]> = Vec::new();
    for order in 0..=max_order {
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let mut min = OrderMinimum { order, rho: rho_grid[0], signed_derivative: f64::INFINITY };
        let mut open: Option<f64> = None;
        let mut prev_rho = rho_grid[0];
        for &rho in rho_grid {
            let s = sign * engine.derivative(rho, order, tol)?;
            if s < min.signed_derivative {
                min = OrderMinimum { order, rho, signed_derivative: s };
            }
            if s < -EPS_NUM && witness.is_none() {
                witness = Some(Witness { rho, order, signed_derivative: s });
            }
            if order == 2 {
                match (s < -EPS_NUM, open) {
                    (true, None) => open = Some(rho),
                    (false, Some(start)) => {
                        negative_second_derivative.push([start, prev_rho]);
                        open = None;
                    }
                    _ => {}
                }
            }
            prev_rho = rho;
        }
        if let Some(start) = open {
            negative_second_derivative.push([start, prev_rho]);
        }
        order_minima.push(min);
    }
    let scan_passed = witness.is_none();
    let (is_cm, basis, witness) = if n <= 2 {
        (Tristate::Yes, CmBasis::ReducedDimRule, None)
    } else if let Some(w) = witness {
        (Tristate::No, CmBasis::DerivativeScan, Some(w))
    } else {
        (Tristate::Inconclusive, CmBasis::DerivativeScan, None)
    };
    Ok(CmVerdict {
        is_cm,
        max_order_checked: max_order,
        witness,
        basis,
        reduced_dim: n,
        scan_passed,
        order_minima,
        negative_second_derivative,
        rho0: rho0(c).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numerics::logspace;
    use nalgebra::DMatrix;

    #[test]
    fn rho0_examples() {
        assert!((rho0(&fixtures::cube()).unwrap() - 4.0 * (0.5 + 0.5f64.sqrt()) / 8.0).abs() < 1e-12);
        assert!((rho0(&fixtures::cube()).unwrap() - 0.6036).abs() < 1e-4);
        assert!((rho0(&fixtures::qam3d()).unwrap() - 18.02).abs() < 0.01);
        // N* = 4 with d_min = √2
        let pts = DMatrix::from_fn(4, 8, |r, c| {
            let s = 2f64.sqrt().recip();
            if c / 2 == r { if c % 2 == 0 { s } else { -s } } else { 0.0 }
        });
        let c = Constellation::new(pts, None).unwrap();
        assert!((c.min_distance() - 1.0).abs() < 1e-12);
        let scaled = Constellation::new(c.points() * 2f64.sqrt(), None).unwrap();
        assert!((rho0(&scaled).unwrap() - 4.0).abs() < 1e-12);
        assert!(rho0(&fixtures::qpsk()).is_err());
    }

    #[test]
    fn qpsk_is_cm_by_rule() {
        let v = cm_check(&fixtures::qpsk(), &logspace(0.2, 20.0, 8), 4, 1e-10).unwrap();
        assert_eq!(v.is_cm, Tristate::Yes);
        assert_eq!(v.basis, CmBasis::ReducedDimRule);
        assert!(v.scan_passed);
        assert!(v.witness.is_none());
    }

    #[test]
    fn cube_scan_is_inconclusive() {
        let v = cm_check(&fixtures::cube(), &logspace(0.2, 20.0, 6), 3, 1e-10).unwrap();
        assert_eq!(v.is_cm, Tristate::Inconclusive);
        assert!(v.scan_passed);
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["isCm"], "inconclusive");
        assert_eq!(json["basis"], "derivative_scan");
    }

    #[test]
    fn order_cap() {
        assert!(matches!(cm_check(&fixtures::qpsk(), &[1.0], 7, 1e-9), Err(Error::OrderTooHigh(7))));
    }
}
