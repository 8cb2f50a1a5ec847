use std::f64::consts::{FRAC_PI_2, PI};

use super::{check_rho, Method, SerEstimate};
use crate::error::{Error, Result};
use crate::fixtures::qam_side;
use crate::numerics::{integrate, integrate_to_infinity, q_function};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QamParams {
    pub omega1: f64,
    pub omega2: f64,
    pub eta: f64,
}

/// `ω₁ = 4(√M−1)/√M`, `ω₂ = ω₁²/4`, `η = 3/(M−1)`.
pub fn qam_params(m: usize) -> Result<QamParams> {
    let side = qam_side(m)? as f64;
    let omega1 = 4.0 * (side - 1.0) / side;
    Ok(QamParams { omega1, omega2: omega1 * omega1 / 4.0, eta: 3.0 / (m as f64 - 1.0) })
}

/// Square `M`-QAM: `ω₁Q(√(ηρ)) − ω₂Q²(√(ηρ))`.
pub fn ser_closed_qam(m: usize, rho: f64) -> Result<SerEstimate> {
    check_rho(rho)?;
    let p = qam_params(m)?;
    let q = q_function((p.eta * rho).sqrt());
    Ok(SerEstimate::exact(p.omega1 * q - p.omega2 * q * q, Method::ClosedForm, rho))
}

/// Representing function of the square-QAM SER: `P(ρ) = ∫ e^{−ρu} μ(u) du`.
///
/// `μ(u) = (√η/2π)[ω₁ I[η/2 ≤ u ≤ η] + (ω₁−ω₂) I[u ≥ η]] / (u√(2u−η))`,
/// obtained from Craig's forms of `Q` and `Q²`.
pub fn qam_mu(m: usize, u: f64) -> Result<f64> {
    let p = qam_params(m)?;
    Ok(qam_mu_with(p, p.eta, u))
}

/// The same expression with the breakpoints frozen at `1/2`, `1` and the
/// factor `√(2u−1)`. Agrees with [`qam_mu`] only for `M = 4`.
pub fn qam_mu_printed(m: usize, u: f64) -> Result<f64> {
    let p = qam_params(m)?;
    Ok(qam_mu_with(p, 1.0, u))
}

fn qam_mu_with(p: QamParams, e: f64, u: f64) -> f64 {
    if u < e / 2.0 {
        return 0.0;
    }
    let w = if u <= e { p.omega1 } else { p.omega1 - p.omega2 };
    let root = (2.0 * u - e).sqrt();
    if root == 0.0 {
        return f64::INFINITY;
    }
    p.eta.sqrt() / (2.0 * PI) * w / (u * root)
}

/// Cube `(±√2)^3`: `1 − (1 − Q(√(2ρ)))³`.
pub fn ser_closed_cube(rho: f64) -> Result<SerEstimate> {
    check_rho(rho)?;
    let q = q_function((2.0 * rho).sqrt());
    Ok(SerEstimate::exact(1.0 - (1.0 - q).powi(3), Method::ClosedForm, rho))
}

// Solid angle of directions that leave the octant cell of a cube symbol
// within radius √(2u): the union of three caps of angular radius arccos(1/√u)
// around −e₁, −e₂, −e₃. `pair` and `triple` are the intersection areas.
struct CubeCaps {
    omega: f64,
    d_omega: f64,
}

fn cube_caps(u: f64) -> CubeCaps {
    if u <= 1.0 {
        return CubeCaps { omega: 0.0, d_omega: 0.0 };
    }
    let c = u.powf(-0.5);
    let dc = -0.5 * c * c * c;
    let mut omega = 6.0 * PI * (1.0 - c);
    let mut d_omega = -6.0 * PI * dc;
    if u > 2.0 {
        let g = (-1.0 / (u - 1.0)).acos();
        let dg = -1.0 / ((u - 1.0) * (u * (u - 2.0)).sqrt());
        let h = (1.0 / (u - 1.0).sqrt()).acos();
        let dh = 1.0 / (2.0 * (u - 1.0) * (u - 2.0).sqrt());
        let pair = 2.0 * PI - 2.0 * g - 4.0 * c * h;
        let d_pair = -2.0 * dg - 4.0 * (dc * h + c * dh);
        omega -= 3.0 * pair;
        d_omega -= 3.0 * d_pair;
        if u > 3.0 {
            let w = 2.0 * h - FRAC_PI_2;
            let triple = 2.0 * PI - 3.0 * g - 3.0 * c * w;
            let d_triple = -3.0 * dg - 3.0 * dc * w - 6.0 * c * dh;
            omega += triple;
            d_omega += d_triple;
        }
    }
    CubeCaps { omega, d_omega }
}

/// `μ̃(u)` of the cube, with `P(ρ) = ρ^{3/2} ∫ e^{−ρu} μ̃(u) du`.
pub fn cube_mu_tilde(u: f64) -> f64 {
    if u <= 1.0 {
        return 0.0;
    }
    u.sqrt() * cube_caps(u).omega / (2.0 * PI.powf(1.5))
}

/// Representing function of `ρ^{−1/2} P(ρ)` for the cube, i.e. `dμ̃/du`.
/// Equals `3/(2√(πu))` on `(1, 2]`.
pub fn cube_mu(u: f64) -> f64 {
    if u <= 1.0 {
        return 0.0;
    }
    let caps = cube_caps(u);
    let su = u.sqrt();
    (caps.omega / (2.0 * su) + su * caps.d_omega) / (2.0 * PI.powf(1.5))
}

/// `(3/π)I[1≤u≤2] + (π−arccos α)/2π² I[3≤u≤4] + (π+arccos α)/2π² I[u≥4]`,
/// `α(u) = (3u²−12u+8)/(u−2)³`, kept for comparison with [`cube_mu`].
pub fn cube_mu_printed(u: f64) -> f64 {
    let alpha = |u: f64| {
        let a = (3.0 * u * u - 12.0 * u + 8.0) / (u - 2.0).powi(3);
        a.clamp(-1.0, 1.0)
    };
    let mut v = 0.0;
    if (1.0..=2.0).contains(&u) {
        v += 3.0 / PI;
    }
    if (3.0..=4.0).contains(&u) {
        v += (PI - alpha(u).acos()) / (2.0 * PI * PI);
    }
    if u >= 4.0 {
        v += (PI + alpha(u).acos()) / (2.0 * PI * PI);
    }
    v
}

/// `∫₀^∞ e^{−ρu} μ(u) du` for a density with support starting at the first
/// breakpoint and possible inverse-square-root singularities at the left end
/// of each piece (removed by `u = a + s²`).
pub fn laplace_transform<F: Fn(f64) -> f64>(mu: F, rho: f64, breakpoints: &[f64], tol: f64) -> Result<f64> {
    if breakpoints.is_empty() {
        return Err(Error::InvalidArgument("need at least one breakpoint".into()));
    }
    let piece = |s: f64, a: f64| {
        let u = a + s * s;
        let v = (-rho * u).exp() * mu(u) * 2.0 * s;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut total = 0.0;
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let r = integrate(|s| piece(s, a), 0.0, (b - a).sqrt(), tol, 1e-13, 4000);
        if !r.converged {
            return Err(Error::NonConvergence(format!("Laplace piece [{a}, {b}]")));
        }
        total += r.value;
    }
    let last = *breakpoints.last().expect("nonempty");
    let r = integrate_to_infinity(|s| piece(s, last), 0.0, tol, 1e-13, 4000);
    if !r.converged {
        return Err(Error::NonConvergence("Laplace tail".into()));
    }
    Ok(total + r.value)
}
