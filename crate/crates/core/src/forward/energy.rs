//! The convex energy whose minimizer is the weak solution.

use super::{Coefficients, ForwardError};
use crate::field::{gradient, ScalarField, VectorField};

/// `E[v] = h^3 sum over the full box of
/// 1/2 sigma |grad v|^2 + a/p |grad v|^p + Re(grad conj(v) . F)`.
///
/// The integrand is convex in `grad v`, so `E` is convex on fields with
/// fixed collar data.
pub fn energy(
    c: &Coefficients,
    v: &ScalarField,
    f_vec: Option<&VectorField>,
) -> Result<f64, ForwardError> {
    let grid = v.grid();
    if grid.n() != c.sigma().grid().n() {
        return Err(crate::field::FieldError::GridMismatch(grid.n(), c.sigma().grid().n()).into());
    }
    if let Some(f) = f_vec {
        if f.grid().n() != grid.n() {
            return Err(crate::field::FieldError::GridMismatch(f.grid().n(), grid.n()).into());
        }
    }
    let g = gradient(v);
    let p = c.p();
    let inv_p = 1.0 / p;
    let mut acc = 0.0;
    for i in 0..grid.node_count() {
        let gv = g.at(i);
        let g2 = gv[0].norm_sqr() + gv[1].norm_sqr() + gv[2].norm_sqr();
        acc += 0.5 * c.sigma().values()[i] * g2;
        let a = c.a().values()[i];
        if a != 0.0 && g2 > 0.0 {
            acc += a * inv_p * g2.powf(0.5 * p);
        }
        if let Some(f) = f_vec {
            let fv = f.at(i);
            acc += (gv[0].conj() * fv[0] + gv[1].conj() * fv[1] + gv[2].conj() * fv[2]).re;
        }
    }
    Ok(acc * grid.cell_volume())
}
