//! Weak solutions by damped Newton on the discrete energy.
//!
//! The initializer is the solution of the linear comparison problem. For
//! `p < 2` the non-smooth weight `|g|^{p-2}` is regularized as
//! `(delta^2 + |g|^2)^{(p-2)/2}` and the regularization is removed by a
//! three-stage continuation down to `delta = 1e-8 * (gradient scale)`;
//! convergence is always measured on the unregularized weak residual.

use super::linear::{solve_linear, stencil_diagonal, Cg};
use super::window::Workspace;
use super::{Coefficients, ForwardError, SolveReport};
use crate::field::{BoundaryTrace, Domain, ScalarField, VectorField};
use crate::vecineq::pmap_weight;
use num_complex::Complex64;

const MAX_NEWTON_STEPS: usize = 200;

/// Weak solve started from the linear-problem initializer.
pub fn solve_weak(
    domain: &Domain,
    c: &Coefficients,
    f: &BoundaryTrace,
    f_vec: Option<&VectorField>,
    tol: f64,
) -> Result<(ScalarField, SolveReport), ForwardError> {
    solve_weak_from(domain, c, f, f_vec, tol, None)
}

/// Weak solve with an explicit initial guess (its interior values are
/// used; collar data always comes from `f`).
pub fn solve_weak_from(
    domain: &Domain,
    c: &Coefficients,
    f: &BoundaryTrace,
    f_vec: Option<&VectorField>,
    tol: f64,
    init: Option<&ScalarField>,
) -> Result<(ScalarField, SolveReport), ForwardError> {
    let grid = domain.grid();
    let p = c.p();
    let ws = Workspace::new(domain, c.sigma(), c.a(), f_vec, p);
    let n = ws.win.volume();
    let m = ws.win.m;

    let mut u = match init {
        Some(g) => {
            let mut u = ScalarField::zeros(grid);
            f.scatter_into(&mut u);
            for &i in domain.interior() {
                u.values_mut()[i] = g.values()[i];
            }
            u
        }
        None => solve_linear(domain, c.sigma(), f, f_vec)?,
    };
    let mut vals = ws.win.gather(&u);

    let zbuf = || vec![Complex64::default(); n];
    let mut grad = [zbuf(), zbuf(), zbuf()];
    let mut flux = [zbuf(), zbuf(), zbuf()];
    let mut hgrad = [zbuf(), zbuf(), zbuf()];
    let mut hflux = [zbuf(), zbuf(), zbuf()];
    let mut resid = zbuf();
    let mut rhs = zbuf();
    let mut dir = zbuf();
    let mut trial = zbuf();
    let mut cg = Cg::new(&ws.win);

    // gradient scale for the p < 2 regularization stages
    ws.win.gradient(&vals, &mut grad);
    let mut gscale: f64 = 0.0;
    for jz in ws.win.flux_range() {
        for jy in ws.win.flux_range() {
            for jx in ws.win.flux_range() {
                let i = jx + m * (jy + m * jz);
                let g2 =
                    grad[0][i].norm_sqr() + grad[1][i].norm_sqr() + grad[2][i].norm_sqr();
                gscale = gscale.max(g2.sqrt());
            }
        }
    }
    gscale = gscale.max(1e-300);
    let stages: Vec<f64> = if p < 2.0 {
        vec![1e-4 * gscale, 1e-6 * gscale, 1e-8 * gscale]
    } else {
        vec![0.0]
    };

    let h3 = grid.cell_volume();
    let tnorm = ws.test_function_norm(p.max(2.0));
    let sup_weak = |resid: &[Complex64], interior: &[usize]| -> f64 {
        let mut sup: f64 = 0.0;
        for &i in interior {
            sup = sup.max(resid[i].norm());
        }
        sup * h3 / tnorm
    };

    let mut report = SolveReport::new();
    let mut true_res = f64::INFINITY;
    let mut c0 = vec![0.0; n];
    let mut caniso = vec![0.0; n];

    'stages: for (stage_idx, &delta) in stages.iter().enumerate() {
        let last_stage = stage_idx + 1 == stages.len();
        let stage_budget = if last_stage { MAX_NEWTON_STEPS } else { 12 };
        let mut stage_iters = 0;
        loop {
            ws.win.gradient(&vals, &mut grad);
            ws.flux(&grad, delta, &mut flux);
            ws.win.neg_divergence_interior(&flux, &mut resid);
            let res_delta = sup_weak(&resid, cg.interior());
            true_res = if delta == 0.0 {
                res_delta
            } else {
                ws.flux(&grad, 0.0, &mut hflux);
                ws.win.neg_divergence_interior(&hflux, &mut rhs);
                sup_weak(&rhs, cg.interior())
            };
            report.weak_residual = true_res;
            if last_stage {
                if true_res <= tol {
                    report.converged = true;
                    break 'stages;
                }
            } else if res_delta <= tol.max(1e-6 * gscale) || stage_iters >= stage_budget {
                continue 'stages;
            }
            if report.iterations >= MAX_NEWTON_STEPS {
                break 'stages;
            }

            // Hessian coefficients at the current iterate:
            // flux'(d) = c0 grad d + caniso Re(conj(grad v) . grad d) grad v
            for jz in ws.win.flux_range() {
                for jy in ws.win.flux_range() {
                    for jx in ws.win.flux_range() {
                        let i = jx + m * (jy + m * jz);
                        let g2 = grad[0][i].norm_sqr()
                            + grad[1][i].norm_sqr()
                            + grad[2][i].norm_sqr();
                        let s2 = delta * delta + g2;
                        c0[i] = ws.sigma_w[i] + ws.a_w[i] * pmap_weight(g2.sqrt(), p, delta);
                        caniso[i] = if s2 == 0.0 {
                            0.0
                        } else {
                            ws.a_w[i] * (p - 2.0) * s2.powf(0.5 * (p - 4.0))
                        };
                    }
                }
            }
            let diag = stencil_diagonal(&ws.win, &c0);
            for &i in cg.interior() {
                rhs[i] = -resid[i];
            }
            dir.iter_mut().for_each(|v| *v = Complex64::default());
            let forcing = if last_stage { 1e-6 } else { 1e-2 };
            {
                let win = &ws.win;
                let grad_ref = &grad;
                let c0_ref = &c0;
                let caniso_ref = &caniso;
                let apply = |d: &[Complex64], out: &mut [Complex64]| {
                    win.gradient(d, &mut hgrad);
                    for jz in win.flux_range() {
                        for jy in win.flux_range() {
                            for jx in win.flux_range() {
                                let i = jx + m * (jy + m * jz);
                                let mut dotre = 0.0;
                                for d3 in 0..3 {
                                    dotre += (grad_ref[d3][i].conj() * hgrad[d3][i]).re;
                                }
                                let w2 = caniso_ref[i] * dotre;
                                for d3 in 0..3 {
                                    hflux[d3][i] =
                                        hgrad[d3][i] * c0_ref[i] + grad_ref[d3][i] * w2;
                                }
                            }
                        }
                    }
                    win.neg_divergence_interior(&hflux, out);
                };
                cg.solve(apply, &diag, &rhs, &mut dir, forcing, 40 * m * m)?;
            }

            // Armijo backtracking on the regularized reduced energy
            let e0 = ws.reduced_energy(&grad, delta);
            let mut ddir = 0.0;
            for &i in cg.interior() {
                ddir += resid[i].re * dir[i].re + resid[i].im * dir[i].im;
            }
            ddir *= h3; // dE[d] = h^3 Re<r, d>, negative for the Newton direction
            trial.copy_from_slice(&vals);
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                for &i in cg.interior() {
                    trial[i] = vals[i] + dir[i] * t;
                }
                ws.win.gradient(&trial, &mut hgrad);
                let e1 = ws.reduced_energy(&hgrad, delta);
                if e1 <= e0 + 1e-4 * t * ddir {
                    std::mem::swap(&mut vals, &mut trial);
                    report.energy_trace.push(e1);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(ForwardError::NonConvergence {
                    iterations: report.iterations,
                    residual: true_res,
                });
            }
            report.iterations += 1;
            stage_iters += 1;
        }
    }

    if !report.converged {
        return Err(ForwardError::NonConvergence {
            iterations: report.iterations,
            residual: true_res,
        });
    }

    ws.win.scatter_interior(&vals, &mut u);
    report.final_energy = super::energy::energy(c, &u, f_vec)?;
    Ok((u, report))
}
