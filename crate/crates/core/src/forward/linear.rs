//! Symmetric positive-definite solves for the linear comparison problem
//! `div(sigma grad u + F) = 0` and the zero-Dirichlet Green operator of
//! `div(sigma grad .)`, by preconditioned conjugate gradients on the
//! interior unknowns.

use super::window::{Window, Workspace};
use super::ForwardError;
use crate::field::{BoundaryTrace, Domain, RealField, ScalarField, VectorField};
use num_complex::Complex64;

/// Relative CG tolerance; tight enough that nodal equation residuals sit
/// at the 1e-10 level or below for unit-scale data.
const CG_RTOL: f64 = 1e-13;

pub(crate) struct Cg {
    interior: Vec<usize>,
    r: Vec<Complex64>,
    z: Vec<Complex64>,
    p: Vec<Complex64>,
    q: Vec<Complex64>,
}

impl Cg {
    pub fn new(win: &Window) -> Self {
        let mut interior = Vec::new();
        for jz in win.interior_range() {
            for jy in win.interior_range() {
                for jx in win.interior_range() {
                    interior.push(win.widx(jx, jy, jz));
                }
            }
        }
        let n = win.volume();
        Self {
            interior,
            r: vec![Complex64::default(); n],
            z: vec![Complex64::default(); n],
            p: vec![Complex64::default(); n],
            q: vec![Complex64::default(); n],
        }
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    fn dot(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for &i in &self.interior {
            acc += a[i].re * b[i].re + a[i].im * b[i].im;
        }
        acc
    }

    /// PCG on interior-supported window vectors in the real inner product.
    /// `apply` must evaluate the SPD operator on an interior-supported
    /// input; `diag` is the Jacobi preconditioner. Solves in place into `x`.
    pub fn solve(
        &mut self,
        mut apply: impl FnMut(&[Complex64], &mut [Complex64]),
        diag: &[f64],
        b: &[Complex64],
        x: &mut [Complex64],
        rtol: f64,
        max_iter: usize,
    ) -> Result<(usize, f64), ForwardError> {
        let bnorm = self.dot(b, b).sqrt();
        if bnorm == 0.0 {
            for &i in &self.interior {
                x[i] = Complex64::default();
            }
            return Ok((0, 0.0));
        }
        apply(x, &mut self.q);
        for &i in &self.interior {
            self.r[i] = b[i] - self.q[i];
        }
        for &i in &self.interior {
            self.z[i] = self.r[i] / diag[i];
        }
        self.p.iter_mut().for_each(|v| *v = Complex64::default());
        for &i in &self.interior {
            self.p[i] = self.z[i];
        }
        let mut rz = self.dot(&self.r, &self.z);
        let mut rnorm = self.dot(&self.r, &self.r).sqrt();
        let mut iters = 0;
        while rnorm > rtol * bnorm && iters < max_iter {
            apply(&self.p, &mut self.q);
            let pq = self.dot(&self.p, &self.q);
            if !(pq > 0.0) || !pq.is_finite() {
                return Err(ForwardError::Breakdown(format!(
                    "non-positive curvature {pq:.3e} at iteration {iters}"
                )));
            }
            let alpha = rz / pq;
            for &i in &self.interior {
                x[i] += self.p[i] * alpha;
                self.r[i] -= self.q[i] * alpha;
            }
            for &i in &self.interior {
                self.z[i] = self.r[i] / diag[i];
            }
            let rz_new = self.dot(&self.r, &self.z);
            let beta = rz_new / rz;
            rz = rz_new;
            for &i in &self.interior {
                self.p[i] = self.z[i] + self.p[i] * beta;
            }
            rnorm = self.dot(&self.r, &self.r).sqrt();
            iters += 1;
        }
        if rnorm > rtol * bnorm {
            return Err(ForwardError::Breakdown(format!(
                "cg stalled at relative residual {:.3e} after {iters} iterations",
                rnorm / bnorm
            )));
        }
        Ok((iters, rnorm / bnorm))
    }
}

/// Jacobi diagonal of `x -> -div(c grad x)` restricted to the interior.
pub(crate) fn stencil_diagonal(win: &Window, c: &[f64]) -> Vec<f64> {
    let m = win.m;
    let inv4h2 = 0.25 / (win.grid.spacing() * win.grid.spacing());
    let mut diag = vec![1.0; win.volume()];
    for jz in win.interior_range() {
        for jy in win.interior_range() {
            for jx in win.interior_range() {
                let i = win.widx(jx, jy, jz);
                let s = c[i + 1] + c[i - 1] + c[i + m] + c[i - m] + c[i + m * m] + c[i - m * m];
                diag[i] = s * inv4h2;
            }
        }
    }
    diag
}

pub(crate) struct LinearSystem<'a> {
    pub ws: &'a Workspace,
    grad: [Vec<Complex64>; 3],
    flux: [Vec<Complex64>; 3],
}

impl<'a> LinearSystem<'a> {
    pub fn new(ws: &'a Workspace) -> Self {
        let n = ws.win.volume();
        let z = vec![Complex64::default(); n];
        Self {
            ws,
            grad: [z.clone(), z.clone(), z.clone()],
            flux: [z.clone(), z.clone(), z],
        }
    }

    /// `out = -div(c grad x)` at interior nodes.
    pub fn apply(&mut self, c: &[f64], x: &[Complex64], out: &mut [Complex64]) {
        self.ws.win.gradient(x, &mut self.grad);
        let m = self.ws.win.m;
        for jz in self.ws.win.flux_range() {
            for jy in self.ws.win.flux_range() {
                for jx in self.ws.win.flux_range() {
                    let i = jx + m * (jy + m * jz);
                    for d in 0..3 {
                        self.flux[d][i] = self.grad[d][i] * c[i];
                    }
                }
            }
        }
        self.ws.win.neg_divergence_interior(&self.flux, out);
    }
}

/// Solve `div(sigma grad u + F) = 0` with `u = f` on the collar; the
/// returned field carries the collar data, the interior solution, and
/// zeros outside the padded sub-box.
pub fn solve_linear(
    domain: &Domain,
    sigma: &RealField,
    f: &BoundaryTrace,
    f_vec: Option<&VectorField>,
) -> Result<ScalarField, ForwardError> {
    solve_linear_warm(domain, sigma, f, f_vec, None)
}

pub(crate) fn solve_linear_warm(
    domain: &Domain,
    sigma: &RealField,
    f: &BoundaryTrace,
    f_vec: Option<&VectorField>,
    warm: Option<&ScalarField>,
) -> Result<ScalarField, ForwardError> {
    let grid = domain.grid();
    let zero_a = RealField::constant(grid, 0.0);
    let ws = Workspace::new(domain, sigma, &zero_a, f_vec, 2.0);

    let mut u = ScalarField::zeros(grid);
    f.scatter_into(&mut u);
    let data_w = ws.win.gather(&u);

    // b = -(-div(sigma grad u_data + F))
    let mut sys = LinearSystem::new(&ws);
    let n = ws.win.volume();
    let mut b = vec![Complex64::default(); n];
    {
        let mut grad = [
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
        ];
        let mut flux = [
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
        ];
        ws.win.gradient(&data_w, &mut grad);
        ws.flux(&grad, 0.0, &mut flux);
        ws.win.neg_divergence_interior(&flux, &mut b);
        // b currently holds -div(flux(data)); the interior unknowns solve
        // -div(sigma grad u0) = +div(flux(data)) = -b
        for v in &mut b {
            *v = -*v;
        }
    }

    let diag = stencil_diagonal(&ws.win, &ws.sigma_w);
    let mut cg = Cg::new(&ws.win);
    let mut x = vec![Complex64::default(); n];
    if let Some(w) = warm {
        let ww = ws.win.gather(w);
        for &i in cg.interior() {
            x[i] = ww[i];
        }
    }
    let max_iter = 60 * ws.win.m * ws.win.m;
    let sigma_w = ws.sigma_w.clone();
    cg.solve(
        |v, out| sys.apply(&sigma_w, v, out),
        &diag,
        &b,
        &mut x,
        CG_RTOL,
        max_iter,
    )?;
    ws.win.scatter_interior(&x, &mut u);
    Ok(u)
}

/// Green operator of `div(sigma grad .)` with zero Dirichlet data:
/// returns `v` with `div(sigma grad v) = s` at interior nodes, `v = 0`
/// on the collar and outside.
pub fn green_sigma(
    domain: &Domain,
    sigma: &RealField,
    s: &ScalarField,
) -> Result<ScalarField, ForwardError> {
    let grid = domain.grid();
    let zero_a = RealField::constant(grid, 0.0);
    let ws = Workspace::new(domain, sigma, &zero_a, None, 2.0);
    let s_w = ws.win.gather(s);

    let n = ws.win.volume();
    let mut b = vec![Complex64::default(); n];
    let mut cg = Cg::new(&ws.win);
    for &i in cg.interior() {
        b[i] = -s_w[i]; // -div(sigma grad v) = -s
    }
    let diag = stencil_diagonal(&ws.win, &ws.sigma_w);
    let mut sys = LinearSystem::new(&ws);
    let mut x = vec![Complex64::default(); n];
    let max_iter = 60 * ws.win.m * ws.win.m;
    let sigma_w = ws.sigma_w.clone();
    cg.solve(
        |v, out| sys.apply(&sigma_w, v, out),
        &diag,
        &b,
        &mut x,
        CG_RTOL,
        max_iter,
    )?;
    let mut v = ScalarField::zeros(grid);
    ws.win.scatter_interior(&x, &mut v);
    Ok(v)
}
