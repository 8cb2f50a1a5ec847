//! Symbol error rate by Monte Carlo, by cone quadrature and in closed form,
//! plus the representing function, derivatives and monotonicity checks.

mod bernstein;
mod closed;
mod cm;
mod mc;
mod quadrature;

pub use bernstein::{
    cm_order_conditions, default_u_grid, reconstruct_ser, representing_fn, OrderConditionReport,
    RepresentingFn,
};
pub use closed::{
    cube_mu, cube_mu_printed, cube_mu_tilde, laplace_transform, qam_mu, qam_mu_printed, qam_params,
    ser_closed_cube, ser_closed_qam, QamParams,
};
pub use cm::{cm_check, rho0, CmBasis, CmVerdict, Tristate, Witness, EPS_NUM};
pub use mc::{ser_mc, ser_mc_complex, MC_CHUNK};
pub use quadrature::{ser_derivative, ser_quadrature, QuadratureEngine, MAX_QUADRATURE_DIM};

pub use crate::numerics::q_function;

use serde::Serialize;

use crate::error::{Error, Result};

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mc,
    Quadrature,
    ClosedForm,
    /// Laplace integral of a sampled representing function.
    Bernstein,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
            Method::Bernstein => "bernstein",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(Method::Mc),
            "quadrature" => Ok(Method::Quadrature),
            "closed_form" | "closed" => Ok(Method::ClosedForm),
            "bernstein" => Ok(Method::Bernstein),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SerEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: Method,
    pub rho: f64,
}

impl SerEstimate {
    pub(crate) fn exact(value: f64, method: Method, rho: f64) -> Self {
        Self { value: value.clamp(0.0, 1.0), stderr: 0.0, method, rho }
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("rho must be positive and finite, got {rho}")))
    }
}
