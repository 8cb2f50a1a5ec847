use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::fan::SimplicialCone;
use super::polyhedron::Halfspace;
use crate::error::{Error, Result};

/// Orthonormal basis (columns) in which hyperspherical angles are measured.
#[derive(Debug, Clone, Serialize)]
pub struct Frame {
    pub basis: DMatrix<f64>,
}

/// Per-cone angular limits `φ̄_k = arccos(v_Nᵀv_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleBox {
    pub max_angles: Vec<f64>,
}

impl Frame {
    pub fn identity(n: usize) -> Self {
        Self { basis: DMatrix::identity(n, n) }
    }

    /// Gram–Schmidt of the cone edges taken in the order `v_N, v_1, …, v_{N−1}`,
    /// so the first axis is the last edge.
    pub fn from_cone(cone: &SimplicialCone) -> Result<Self> {
        let n = cone.dim();
        let mut order = vec![n - 1];
        order.extend(0..n - 1);
        let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
        for k in order {
            let mut v = cone.edges[k].clone();
            for c in &cols {
                v -= c * c.dot(&v);
            }
            let norm = v.norm();
            if norm < 1e-12 {
                return Err(Error::Degenerate("cone edges are linearly dependent".into()));
            }
            cols.push(v / norm);
        }
        Ok(Self { basis: DMatrix::from_columns(&cols) })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Unit vector of angles `φ` in frame coordinates:
/// `u_k = cos φ_k Π_{j<k} sin φ_j`, `u_N = Π sin φ_j`.
pub fn unit_in_frame(phi: &[f64]) -> DVector<f64> {
    let n = phi.len() + 1;
    let mut u = DVector::zeros(n);
    let mut prod = 1.0;
    for (k, &p) in phi.iter().enumerate() {
        u[k] = prod * p.cos();
        prod *= p.sin();
    }
    u[n - 1] = prod;
    u
}

pub fn hyperspherical_to_cartesian(r: f64, phi: &[f64], frame: &Frame) -> DVector<f64> {
    &frame.basis * unit_in_frame(phi) * r
}

/// Inverse of [`hyperspherical_to_cartesian`]. The first `N − 2` angles lie in
/// `[0, π]`; the last one in `(−π, π]`.
pub fn cartesian_to_hyperspherical(x: &DVector<f64>, frame: &Frame) -> Result<(f64, Vec<f64>)> {
    let y = frame.basis.transpose() * x;
    let r = y.norm();
    if r == 0.0 {
        return Err(Error::InvalidArgument("zero vector has no direction".into()));
    }
    let n = y.len();
    let mut phi = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        if k + 2 == n {
            phi.push(y[n - 1].atan2(y[n - 2]));
        } else {
            let tail = y.rows(k + 1, n - k - 1).norm();
            phi.push(tail.atan2(y[k]));
        }
    }
    Ok((r, phi))
}

/// Distance from the origin along direction `φ` to the hyperplane of `h`;
/// `+∞` when the ray is parallel to or points away from it.
pub fn rbar(h: &Halfspace, phi: &[f64], frame: &Frame) -> f64 {
    let u = &frame.basis * unit_in_frame(phi);
    let d = h.a.dot(&u);
    if d <= 0.0 {
        f64::INFINITY
    } else {
        h.b / d
    }
}

pub fn angle_box(cone: &SimplicialCone) -> Result<AngleBox> {
    let n = cone.dim();
    if n < 2 {
        return Ok(AngleBox { max_angles: Vec::new() });
    }
    let last = &cone.edges[n - 1];
    let mut max_angles = Vec::with_capacity(n - 1);
    for v in &cone.edges[..n - 1] {
        let a = last.dot(v).clamp(-1.0, 1.0).acos();
        if a < 1e-12 {
            return Err(Error::Degenerate("coincident cone edges".into()));
        }
        max_angles.push(a);
    }
    Ok(AngleBox { max_angles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn cone(edges: &[&[f64]]) -> SimplicialCone {
        let e: Vec<DVector<f64>> = edges.iter().map(|v| {
            let d = DVector::from_column_slice(v);
            &d / d.norm()
        }).collect();
        let n = e.len();
        SimplicialCone {
            points: e.clone(),
            edges: e,
            facet_index: 0,
            symbol_index: 0,
            halfspace: Halfspace { a: DVector::from_element(n, 1.0 / (n as f64).sqrt()), b: 1.0 },
            artificial: false,
        }
    }

    #[test]
    fn forward_examples() {
        let x = hyperspherical_to_cartesian(1.0, &[FRAC_PI_2, FRAC_PI_2], &Frame::identity(3));
        assert!((x - DVector::from_column_slice(&[0.0, 0.0, 1.0])).amax() < 1e-15);
        let x = hyperspherical_to_cartesian(2.0, &[0.0], &Frame::identity(2));
        assert!((x - DVector::from_column_slice(&[2.0, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn inverse_examples() {
        let (r, phi) = cartesian_to_hyperspherical(&DVector::from_column_slice(&[0.0, 0.0, 1.0]), &Frame::identity(3)).unwrap();
        assert_eq!(r, 1.0);
        assert!((phi[0] - FRAC_PI_2).abs() < 1e-15 && (phi[1] - FRAC_PI_2).abs() < 1e-15);
        let (r, phi) = cartesian_to_hyperspherical(&DVector::from_column_slice(&[2.0, 0.0]), &Frame::identity(2)).unwrap();
        assert_eq!((r, phi[0]), (2.0, 0.0));
        assert!(cartesian_to_hyperspherical(&DVector::zeros(2), &Frame::identity(2)).is_err());
    }

    #[test]
    fn rbar_examples() {
        let h = Halfspace { a: DVector::from_column_slice(&[1.0, 0.0]), b: 1.0 };
        let f = Frame::identity(2);
        assert!((rbar(&h, &[0.0], &f) - 1.0).abs() < 1e-15);
        assert!((rbar(&h, &[FRAC_PI_3], &f) - 2.0).abs() < 1e-12);
        assert_eq!(rbar(&h, &[PI], &f), f64::INFINITY);
    }

    #[test]
    fn angle_boxes() {
        let quad = cone(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!((angle_box(&quad).unwrap().max_angles[0] - FRAC_PI_2).abs() < 1e-15);
        let hex = cone(&[&[1.0, 0.0], &[FRAC_PI_3.cos(), FRAC_PI_3.sin()]]);
        assert!((angle_box(&hex).unwrap().max_angles[0] - FRAC_PI_3).abs() < 1e-15);
        let orth = cone(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let b = angle_box(&orth).unwrap();
        assert!(b.max_angles.iter().all(|a| (a - FRAC_PI_2).abs() < 1e-15));
        let same = cone(&[&[1.0, 0.0], &[1.0, 0.0]]);
        assert!(angle_box(&same).is_err());
    }

    #[test]
    fn frame_puts_last_edge_first() {
        let c = cone(&[&[1.0, 0.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0]]);
        let f = Frame::from_cone(&c).unwrap();
        assert!((f.basis.transpose() * &f.basis - DMatrix::identity(3, 3)).amax() < 1e-14);
        assert!((f.basis.column(0) - &c.edges[2]).amax() < 1e-15);
    }

    proptest! {
        #[test]
        fn roundtrip(r in 0.1f64..10.0, a in 0.01f64..3.13, b in 0.01f64..3.13, c in -3.1f64..3.1, e in -1.0f64..1.0) {
            let co = cone(&[&[1.0, e, 0.2, 0.0], &[0.0, 1.0, e, 0.3], &[0.1, 0.0, 1.0, e], &[e, 0.2, 0.0, 1.0]]);
            let frame = Frame::from_cone(&co).unwrap();
            let phi = [a, b, c];
            let x = hyperspherical_to_cartesian(r, &phi, &frame);
            prop_assert!((x.norm() - r).abs() < 1e-12 * r.max(1.0));
            let (r2, phi2) = cartesian_to_hyperspherical(&x, &frame).unwrap();
            prop_assert!((r2 - r).abs() < 1e-10);
            for k in 0..3 { prop_assert!((phi2[k] - phi[k]).abs() < 1e-10); }
        }

        #[test]
        fn rbar_lands_on_hyperplane(t in 0.0f64..1.0, s in 0.0f64..1.0, bx in 0.2f64..3.0) {
            let h = Halfspace::new(DVector::from_column_slice(&[0.3, 0.5, 1.0]), bx).unwrap();
            let frame = Frame::identity(3);
            // directions inside the cone around the normal where the ray meets the plane
            let n = h.a.clone();
            let (_, base) = cartesian_to_hyperspherical(&n, &frame).unwrap();
            let phi = [base[0] + 0.5 * (t - 0.5), base[1] + 0.5 * (s - 0.5)];
            let r = rbar(&h, &phi, &frame);
            prop_assert!(r.is_finite());
            let x = hyperspherical_to_cartesian(r, &phi, &frame);
            prop_assert!((h.a.dot(&x) - h.b).abs() < 1e-10);
        }
    }
}
