//! Reference constellations used by the tests and the CLI fixture files.

use nalgebra::{Complex, DMatrix};

use crate::constellation::Constellation;
use crate::error::{Error, Result};

/// BPSK `{-1, +1}` in `R^1`.
pub fn bpsk() -> Constellation {
    Constellation::with_label(DMatrix::from_row_slice(1, 2, &[-1.0, 1.0]), None, "bpsk")
        .expect("valid fixture")
}

/// Side length `√M` of a square QAM, or an error if `M` is not an even
/// power of two at least 4.
pub fn qam_side(m: usize) -> Result<usize> {
    let side = (m as f64).sqrt().round() as usize;
    if m < 4 || side * side != m {
        return Err(Error::InvalidArgument(format!("{m} is not a square QAM order")));
    }
    Ok(side)
}

/// Square `M`-QAM with half-distance `√η`, `η = 3/(M−1)`, i.e. unit energy
/// per real dimension. This is the scale at which
/// `ω₁Q(√(ηρ)) − ω₂Q²(√(ηρ))` is the exact SER under noise variance `1/ρ`.
pub fn square_qam(m: usize) -> Result<Constellation> {
    let side = qam_side(m)?;
    let half = (3.0 / (m as f64 - 1.0)).sqrt();
    let level = |k: usize| (2.0 * k as f64 - (side as f64 - 1.0)) * half;
    let points = DMatrix::from_fn(2, m, |r, c| if r == 0 { level(c % side) } else { level(c / side) });
    Constellation::with_label(points, None, format!("qam{m}"))
}

/// QPSK `(±1, ±1)`.
pub fn qpsk() -> Constellation {
    let q = square_qam(4).expect("valid fixture");
    Constellation::with_label(q.points().clone(), None, "qpsk").expect("valid fixture")
}

/// All `2^3` vertices `(±a, ±a, ±a)`.
pub fn cube_vertices(a: f64) -> Constellation {
    let points = DMatrix::from_fn(3, 8, |r, c| if (c >> r) & 1 == 1 { a } else { -a });
    Constellation::with_label(points, None, "cube").expect("valid fixture")
}

/// The cube at `(±√2)^3`, the scale matching `1 − (1 − Q(√(2ρ)))³`.
pub fn cube() -> Constellation {
    cube_vertices(std::f64::consts::SQRT_2)
}

/// Three-dimensional square QAM: the inner cube `(±1/√6)^3` and the outer
/// cube `(±1/√2)^3`.
pub fn qam3d() -> Constellation {
    let inner = 6f64.sqrt().recip();
    let outer = 2f64.sqrt().recip();
    let mut points = DMatrix::zeros(3, 16);
    for c in 0..8 {
        for r in 0..3 {
            let s = if (c >> r) & 1 == 1 { 1.0 } else { -1.0 };
            points[(r, c)] = s * inner;
            points[(r, c + 8)] = s * outer;
        }
    }
    Constellation::with_label(points, None, "qam3d").expect("valid fixture")
}

/// The rank-one example `[[√.5, −√.5], [√.5, −√.5]]`, which reduces to BPSK.
pub fn rank1() -> Constellation {
    let s = 0.5f64.sqrt();
    Constellation::with_label(DMatrix::from_row_slice(2, 2, &[s, -s, s, -s]), None, "rank1")
        .expect("valid fixture")
}

/// Hexagonal patch: a centre point and its six neighbours at distance 2.
/// The centre's Voronoi cell is a regular hexagon.
pub fn hex7() -> Constellation {
    let mut points = DMatrix::zeros(2, 7);
    for k in 0..6 {
        let t = k as f64 * std::f64::consts::FRAC_PI_3;
        points[(0, k + 1)] = 2.0 * t.cos();
        points[(1, k + 1)] = 2.0 * t.sin();
    }
    Constellation::with_label(points, None, "hex7").expect("valid fixture")
}

/// Complex QPSK `{1, j, −1, −j}` as a `1 × 4` complex matrix.
pub fn complex_qpsk_points() -> DMatrix<Complex<f64>> {
    DMatrix::from_row_slice(
        1,
        4,
        &[Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(-1.0, 0.0), Complex::new(0.0, -1.0)],
    )
}

/// Looks a fixture up by its short name.
pub fn by_name(name: &str) -> Option<Constellation> {
    match name {
        "bpsk" => Some(bpsk()),
        "qpsk" => Some(qpsk()),
        "qam16" => square_qam(16).ok(),
        "qam64" => square_qam(64).ok(),
        "cube" => Some(cube()),
        "qam3d" => Some(qam3d()),
        "rank1" => Some(rank1()),
        "hex7" => Some(hex7()),
        _ => None,
    }
}
