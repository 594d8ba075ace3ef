//! Strong solutions for `p > 2` by fixed-point iteration of the
//! Green-operator map `T(v) = -G_sigma[div(a |grad(v_f+v)|^{p-2}
//! grad(v_f+v))]`, valid for small data. Non-contraction is detected from
//! successive-difference ratios and reported as an error, mirroring the
//! smallness hypothesis.

use super::linear::{green_sigma, solve_linear};
use super::window::Workspace;
use super::{Coefficients, ForwardError, SolveReport};
use crate::field::{divergence, gradient, BoundaryTrace, Domain, ScalarField, VectorField};
use crate::vecineq::pmap3;
use num_complex::Complex64;

/// One application of the contraction map; `v` and the result vanish on
/// the collar and outside the sub-box.
pub fn contraction_step(
    domain: &Domain,
    c: &Coefficients,
    v: &ScalarField,
    v_f: &ScalarField,
) -> Result<ScalarField, ForwardError> {
    let u = v_f.axpy(Complex64::new(1.0, 0.0), v);
    let g = gradient(&u);
    let grid = domain.grid();
    let mut flux = crate::field::VectorField::zeros(grid);
    let p = c.p();
    for i in 0..grid.node_count() {
        let a = c.a().values()[i];
        if a != 0.0 {
            let pm = pmap3(g.at(i), p);
            flux.set(i, [pm[0] * a, pm[1] * a, pm[2] * a]);
        }
    }
    let s = divergence(&flux);
    let w = green_sigma(domain, c.sigma(), &s)?;
    Ok(w.scale(Complex64::new(-1.0, 0.0)))
}

/// Strong solve by fixed-point iteration from `v = 0`.
pub fn solve_strong(
    domain: &Domain,
    c: &Coefficients,
    f: &BoundaryTrace,
    f_vec: Option<&VectorField>,
    tol: f64,
) -> Result<(ScalarField, SolveReport), ForwardError> {
    if c.p() <= 2.0 {
        return Err(ForwardError::NeedsPGreaterTwo(c.p()));
    }
    let v_f = solve_linear(domain, c.sigma(), f, f_vec)?;
    let scale = v_f.norm_l2().max(1e-300);
    let mut v = ScalarField::zeros(domain.grid());
    let mut prev_diff = f64::INFINITY;
    let mut growth_streak = 0usize;
    let mut report = SolveReport::new();
    let mut last_ratio = 0.0;

    for k in 0..100 {
        let v_next = contraction_step(domain, c, &v, &v_f)?;
        let diff = v_next.axpy(Complex64::new(-1.0, 0.0), &v).norm_l2();
        report.iterations = k + 1;
        if prev_diff.is_finite() && prev_diff > 0.0 {
            last_ratio = diff / prev_diff;
            if last_ratio >= 1.0 {
                growth_streak += 1;
                if growth_streak >= 3 {
                    return Err(ForwardError::NotContracting(last_ratio));
                }
            } else {
                growth_streak = 0;
            }
        }
        v = v_next;
        if diff <= tol * scale {
            report.converged = true;
            break;
        }
        prev_diff = diff;
    }
    if !report.converged {
        return Err(ForwardError::NonConvergence {
            iterations: report.iterations,
            residual: last_ratio,
        });
    }

    let u = v_f.axpy(Complex64::new(1.0, 0.0), &v);
    report.final_energy = super::energy::energy(c, &u, f_vec)?;
    report.weak_residual = weak_residual_of(domain, c, &u, f_vec);
    Ok((u, report))
}

/// Unregularized nodal weak residual of a candidate solution, in the same
/// normalization the weak solver uses.
pub(crate) fn weak_residual_of(
    domain: &Domain,
    c: &Coefficients,
    u: &ScalarField,
    f_vec: Option<&VectorField>,
) -> f64 {
    let ws = Workspace::new(domain, c.sigma(), c.a(), f_vec, c.p());
    let n = ws.win.volume();
    let m = ws.win.m;
    let zbuf = || vec![Complex64::default(); n];
    let mut grad = [zbuf(), zbuf(), zbuf()];
    let mut flux = [zbuf(), zbuf(), zbuf()];
    let mut resid = zbuf();
    let vals = ws.win.gather(u);
    ws.win.gradient(&vals, &mut grad);
    ws.flux(&grad, 0.0, &mut flux);
    ws.win.neg_divergence_interior(&flux, &mut resid);
    let mut sup: f64 = 0.0;
    for jz in ws.win.interior_range() {
        for jy in ws.win.interior_range() {
            for jx in ws.win.interior_range() {
                sup = sup.max(resid[jx + m * (jy + m * jz)].norm());
            }
        }
    }
    sup * domain.grid().cell_volume() / ws.test_function_norm(c.p().max(2.0))
}
