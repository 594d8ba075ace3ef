//! Dirichlet-to-Neumann pairings through their volume-integral form:
//! the boundary functional is evaluated as a flux quadrature over the
//! sub-box mask, which depends only on the Dirichlet datum once the
//! interior equation holds.

use crate::field::{gradient, BoundaryTrace, Domain, RealField, ScalarField};
use crate::forward::{self, Coefficients, ForwardError};
use crate::vecineq::pmap_weight;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DnError {
    #[error(transparent)]
    Forward(#[from] ForwardError),
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
}

/// One DN pairing together with the surrogate data norms used by the
/// boundedness estimate.
#[derive(Debug, Clone, Serialize)]
pub struct DnPairing {
    pub value_re: f64,
    pub value_im: f64,
    pub f_norm: f64,
    pub w_norm: f64,
}

impl DnPairing {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }
}

/// Quadrature `h^3 sum over the mask of
/// (sigma + a |grad u|^{p-2}) grad u . conj(grad w)` for a solved field `u`.
pub fn flux_pairing(
    domain: &Domain,
    c: &Coefficients,
    u: &ScalarField,
    w: &ScalarField,
) -> Complex64 {
    let gu = gradient(u);
    let gw = gradient(w);
    let p = c.p();
    let mut acc = Complex64::default();
    for &i in domain.mask() {
        let gv = gu.at(i);
        let g2 = gv[0].norm_sqr() + gv[1].norm_sqr() + gv[2].norm_sqr();
        let weight =
            c.sigma().values()[i] + c.a().values()[i] * pmap_weight(g2.sqrt(), p, 0.0);
        let wv = gw.at(i);
        acc += (gv[0] * wv[0].conj() + gv[1] * wv[1].conj() + gv[2] * wv[2].conj()) * weight;
    }
    acc * domain.grid().cell_volume()
}

/// `<Lambda_{sigma,a,p} f, w|boundary>` evaluated by solving the forward
/// problem with datum `f` and pairing the flux against `conj(grad w)`.
pub fn dn_pair(
    domain: &Domain,
    c: &Coefficients,
    f: &BoundaryTrace,
    w: &ScalarField,
    tol: f64,
) -> Result<DnPairing, DnError> {
    let value = dn_pair_value(domain, c, f, w, tol)?;
    let ext = forward::solve_linear(domain, c.sigma(), f, None)?;
    let q = c.p().max(2.0);
    let f_norm = ext.norm_w1p(q)?;
    let w_norm = w.norm_w1p(q)?;
    Ok(DnPairing {
        value_re: value.re,
        value_im: value.im,
        f_norm,
        w_norm,
    })
}

/// Pairing value alone, without the surrogate norms; the workhorse for
/// sweeps.
pub fn dn_pair_value(
    domain: &Domain,
    c: &Coefficients,
    f: &BoundaryTrace,
    w: &ScalarField,
    tol: f64,
) -> Result<Complex64, DnError> {
    let (u, _report) = forward::solve_weak(domain, c, f, None, tol)?;
    Ok(flux_pairing(domain, c, &u, w))
}

/// Linear pairing `<Lambda_sigma f, w> = h^3 sum sigma grad u0 . conj(grad w)`
/// with `u0` the sigma-harmonic extension of `f`.
pub fn dn_linear_pair(
    domain: &Domain,
    sigma: &RealField,
    f: &BoundaryTrace,
    w: &ScalarField,
) -> Result<Complex64, DnError> {
    let u0 = forward::solve_linear(domain, sigma, f, None)?;
    Ok(linear_flux_pairing(domain, sigma, &u0, w))
}

/// `h^3 sum over the mask of sigma grad u . conj(grad w)` for given fields.
pub fn linear_flux_pairing(
    domain: &Domain,
    sigma: &RealField,
    u: &ScalarField,
    w: &ScalarField,
) -> Complex64 {
    let gu = gradient(u);
    let gw = gradient(w);
    let mut acc = Complex64::default();
    for &i in domain.mask() {
        let gv = gu.at(i);
        let wv = gw.at(i);
        acc += (gv[0] * wv[0].conj() + gv[1] * wv[1].conj() + gv[2] * wv[2].conj())
            * sigma.values()[i];
    }
    acc * domain.grid().cell_volume()
}
