//! Forward solvers for `div(sigma grad u + a |grad u|^{p-2} grad u + F) = 0`
//! on the sub-box domain: weak solutions by damped Newton on the convex
//! energy, and strong solutions (p > 2, small data) by the fixed point of
//! the Green-operator contraction.
//!
//! Sign convention: the right-hand side is carried inside the flux, so the
//! energy is `E[v] = int 1/2 sigma |grad v|^2 + a/p |grad v|^p +
//! Re(grad conj(v) . F)` and its minimizer satisfies
//! `div(sigma grad u + a |grad u|^{p-2} grad u + F) = 0`.

mod energy;
mod linear;
mod newton;
mod strong;
pub(crate) mod window;

pub use energy::energy;
pub use linear::{green_sigma, solve_linear};
pub use newton::{solve_weak, solve_weak_from};
pub use strong::{contraction_step, solve_strong};

use crate::field::{Domain, FieldError, RealField};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ForwardError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("exponent p must lie in (1, inf) away from 2, got {0}")]
    BadExponent(f64),
    #[error("ellipticity parameter out of (0, 1): {0}")]
    BadEllipticityParam(f64),
    #[error("sigma violates its ellipticity bounds at node {node}: {value}")]
    SigmaOutOfBounds { node: usize, value: f64 },
    #[error("sigma must equal 1 outside the sub-box, found {value} at node {node}")]
    SigmaNotExtended { node: usize, value: f64 },
    #[error("a out of [0, 1/m) at node {node}: {value}")]
    WeightOutOfBounds { node: usize, value: f64 },
    #[error("a must vanish outside the sub-box, found {value} at node {node}")]
    WeightNotExtended { node: usize, value: f64 },
    #[error("solver did not reach tolerance: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("linear solver breakdown: {0}")]
    Breakdown(String),
    #[error("fixed-point map is not contracting (successive ratios {0:.3} >= 1); data too large")]
    NotContracting(f64),
    #[error("strong solver requires p > 2, got {0}")]
    NeedsPGreaterTwo(f64),
}

/// Coefficient triple `(sigma, a, p)` with its ellipticity parameters.
///
/// `a` identically zero is allowed as the degenerate linear case used by
/// null phantoms; when `a` is not trivial it must exceed `m` somewhere.
#[derive(Debug, Clone)]
pub struct Coefficients {
    sigma: RealField,
    a: RealField,
    p: f64,
    lambda: f64,
    m: f64,
}

impl Coefficients {
    pub fn new(
        domain: &Domain,
        sigma: RealField,
        a: RealField,
        p: f64,
        lambda: f64,
        m: f64,
    ) -> Result<Self, ForwardError> {
        if !(p > 1.0) || !p.is_finite() || (p - 2.0).abs() < 1e-12 {
            return Err(ForwardError::BadExponent(p));
        }
        for v in [lambda, m] {
            if !(v > 0.0 && v < 1.0) {
                return Err(ForwardError::BadEllipticityParam(v));
            }
        }
        let inv_lambda = 1.0 / lambda;
        let inv_m = 1.0 / m;
        for i in 0..sigma.grid().node_count() {
            let s = sigma.values()[i];
            let av = a.values()[i];
            if domain.is_mask(i) {
                if !(s > lambda && s < inv_lambda) {
                    return Err(ForwardError::SigmaOutOfBounds { node: i, value: s });
                }
            } else if s != 1.0 {
                return Err(ForwardError::SigmaNotExtended { node: i, value: s });
            }
            if !(av >= 0.0 && av < inv_m) {
                return Err(ForwardError::WeightOutOfBounds { node: i, value: av });
            }
            if !domain.is_mask(i) && av != 0.0 {
                return Err(ForwardError::WeightNotExtended { node: i, value: av });
            }
        }
        Ok(Self { sigma, a, p, lambda, m })
    }

    pub fn sigma(&self) -> &RealField {
        &self.sigma
    }

    pub fn a(&self) -> &RealField {
        &self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Same coefficients with the nonlinear weight removed; the linear
    /// comparison problem.
    pub fn linearized(&self) -> Self {
        Self {
            sigma: self.sigma.clone(),
            a: RealField::constant(self.a.grid(), 0.0),
            p: self.p,
            lambda: self.lambda,
            m: self.m,
        }
    }
}

/// Outcome of a forward solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub schema_version: String,
    pub iterations: usize,
    pub final_energy: f64,
    /// Sup over interior coordinate test functions of the scaled weak-form
    /// pairing; see the solver docs for the exact normalization.
    pub weak_residual: f64,
    pub converged: bool,
    /// Accepted-step energies, most recent last. Not serialized.
    #[serde(skip)]
    pub energy_trace: Vec<f64>,
}

impl SolveReport {
    pub(crate) fn new() -> Self {
        Self {
            schema_version: "1".into(),
            iterations: 0,
            final_energy: f64::NAN,
            weak_residual: f64::NAN,
            converged: false,
            energy_trace: Vec::new(),
        }
    }
}
