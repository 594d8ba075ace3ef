//! Windowed stencil workspace for the sub-box solvers.
//!
//! All interior equations and quadratures only read values on the padded
//! collar box `[N/4-1, 3N/4+1]^3`, which never wraps for `N >= 8`. Working
//! on that window instead of the full box keeps the per-iteration cost of
//! the Krylov loops proportional to the sub-box size.

use crate::field::{Domain, Grid, RealField, ScalarField, VectorField};
use crate::vecineq::pmap_weight;
use num_complex::Complex64;

pub(crate) struct Window {
    pub grid: Grid,
    /// lowest global axis index covered (N/4 - 1)
    pub lo: usize,
    /// nodes per axis (N/2 + 3)
    pub m: usize,
}

impl Window {
    pub fn new(grid: Grid) -> Self {
        let q = grid.n() / 4;
        Self {
            grid,
            lo: q - 1,
            m: grid.n() / 2 + 3,
        }
    }

    #[inline]
    pub fn widx(&self, jx: usize, jy: usize, jz: usize) -> usize {
        jx + self.m * (jy + self.m * jz)
    }

    pub fn volume(&self) -> usize {
        self.m * self.m * self.m
    }

    /// j-range of the interior unknowns: `[3, m-4]` per axis.
    pub fn interior_range(&self) -> std::ops::RangeInclusive<usize> {
        3..=self.m - 4
    }

    /// j-range of flux (gradient) nodes the interior equations read:
    /// `[2, m-3]` per axis.
    pub fn flux_range(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.m - 3
    }

    pub fn gather(&self, u: &ScalarField) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.volume()];
        for jz in 0..self.m {
            for jy in 0..self.m {
                let gz = self.lo + jz;
                let gy = self.lo + jy;
                let base = self.grid.idx(self.lo, gy, gz);
                let wbase = self.widx(0, jy, jz);
                out[wbase..wbase + self.m]
                    .copy_from_slice(&u.values()[base..base + self.m]);
            }
        }
        out
    }

    pub fn gather_real(&self, u: &RealField) -> Vec<f64> {
        let mut out = vec![0.0; self.volume()];
        for jz in 0..self.m {
            for jy in 0..self.m {
                let gz = self.lo + jz;
                let gy = self.lo + jy;
                let base = self.grid.idx(self.lo, gy, gz);
                let wbase = self.widx(0, jy, jz);
                out[wbase..wbase + self.m].copy_from_slice(&u.values()[base..base + self.m]);
            }
        }
        out
    }

    pub fn gather_vector(&self, v: &VectorField) -> [Vec<Complex64>; 3] {
        let mut out = [
            vec![Complex64::default(); self.volume()],
            vec![Complex64::default(); self.volume()],
            vec![Complex64::default(); self.volume()],
        ];
        for d in 0..3 {
            for jz in 0..self.m {
                for jy in 0..self.m {
                    let gz = self.lo + jz;
                    let gy = self.lo + jy;
                    let base = self.grid.idx(self.lo, gy, gz);
                    let wbase = self.widx(0, jy, jz);
                    out[d][wbase..wbase + self.m].copy_from_slice(&v.comp(d)[base..base + self.m]);
                }
            }
        }
        out
    }

    /// Write window values back into a full field at interior nodes only.
    pub fn scatter_interior(&self, w: &[Complex64], u: &mut ScalarField) {
        for jz in self.interior_range() {
            for jy in self.interior_range() {
                for jx in self.interior_range() {
                    let g = self.grid.idx(self.lo + jx, self.lo + jy, self.lo + jz);
                    u.values_mut()[g] = w[self.widx(jx, jy, jz)];
                }
            }
        }
    }

    /// Centered gradient into preallocated component buffers, evaluated on
    /// `[1, m-2]` per axis (the outer shell is left untouched).
    pub fn gradient(&self, vals: &[Complex64], g: &mut [Vec<Complex64>; 3]) {
        let inv2h = 0.5 / self.grid.spacing();
        let m = self.m;
        for jz in 1..m - 1 {
            for jy in 1..m - 1 {
                for jx in 1..m - 1 {
                    let i = self.widx(jx, jy, jz);
                    g[0][i] = (vals[i + 1] - vals[i - 1]) * inv2h;
                    g[1][i] = (vals[i + m] - vals[i - m]) * inv2h;
                    g[2][i] = (vals[i + m * m] - vals[i - m * m]) * inv2h;
                }
            }
        }
    }

    /// Negative centered divergence of a flux, evaluated at interior nodes
    /// into `out` (window-sized, rest untouched).
    pub fn neg_divergence_interior(&self, flux: &[Vec<Complex64>; 3], out: &mut [Complex64]) {
        let inv2h = 0.5 / self.grid.spacing();
        let m = self.m;
        for jz in self.interior_range() {
            for jy in self.interior_range() {
                for jx in self.interior_range() {
                    let i = self.widx(jx, jy, jz);
                    let div = (flux[0][i + 1] - flux[0][i - 1]) * inv2h
                        + (flux[1][i + m] - flux[1][i - m]) * inv2h
                        + (flux[2][i + m * m] - flux[2][i - m * m]) * inv2h;
                    out[i] = -div;
                }
            }
        }
    }
}

/// Per-solve scratch: coefficient windows and reusable buffers.
pub(crate) struct Workspace {
    pub win: Window,
    pub sigma_w: Vec<f64>,
    pub a_w: Vec<f64>,
    pub f_w: Option<[Vec<Complex64>; 3]>,
    pub p: f64,
}

impl Workspace {
    pub fn new(
        domain: &Domain,
        sigma: &RealField,
        a: &RealField,
        f_vec: Option<&VectorField>,
        p: f64,
    ) -> Self {
        let win = Window::new(domain.grid());
        let sigma_w = win.gather_real(sigma);
        let a_w = win.gather_real(a);
        let f_w = f_vec.map(|f| win.gather_vector(f));
        Self {
            win,
            sigma_w,
            a_w,
            f_w,
            p,
        }
    }

    /// Total flux `sigma g + a (delta^2+|g|^2)^{(p-2)/2} g + F` on the flux
    /// range, written into `flux`.
    pub fn flux(
        &self,
        grad: &[Vec<Complex64>; 3],
        delta: f64,
        flux: &mut [Vec<Complex64>; 3],
    ) {
        let m = self.win.m;
        for jz in self.win.flux_range() {
            for jy in self.win.flux_range() {
                for jx in self.win.flux_range() {
                    let i = jx + m * (jy + m * jz);
                    let g = [grad[0][i], grad[1][i], grad[2][i]];
                    let gn2 = g[0].norm_sqr() + g[1].norm_sqr() + g[2].norm_sqr();
                    let w = self.sigma_w[i] + self.a_w[i] * pmap_weight(gn2.sqrt(), self.p, delta);
                    for d in 0..3 {
                        let mut v = g[d] * w;
                        if let Some(fw) = &self.f_w {
                            v += fw[d][i];
                        }
                        flux[d][i] = v;
                    }
                }
            }
        }
    }

    /// Regularized energy over the flux range (differs from the full-box
    /// energy by a constant independent of the interior values).
    pub fn reduced_energy(&self, grad: &[Vec<Complex64>; 3], delta: f64) -> f64 {
        let m = self.win.m;
        let mut acc = 0.0;
        let inv_p = 1.0 / self.p;
        for jz in self.win.flux_range() {
            for jy in self.win.flux_range() {
                for jx in self.win.flux_range() {
                    let i = jx + m * (jy + m * jz);
                    let g = [grad[0][i], grad[1][i], grad[2][i]];
                    let gn2 = g[0].norm_sqr() + g[1].norm_sqr() + g[2].norm_sqr();
                    acc += 0.5 * self.sigma_w[i] * gn2;
                    if self.a_w[i] != 0.0 {
                        acc += self.a_w[i] * inv_p * (delta * delta + gn2).powf(0.5 * self.p);
                    }
                    if let Some(fw) = &self.f_w {
                        let mut re = 0.0;
                        for d in 0..3 {
                            re += (g[d].conj() * fw[d][i]).re;
                        }
                        acc += re;
                    }
                }
            }
        }
        acc * self.win.grid.cell_volume()
    }

    /// Norm of the coordinate-basis test function in the discrete
    /// `W^{1,q}` surrogate, used to scale the nodal weak residual.
    pub fn test_function_norm(&self, q: f64) -> f64 {
        let h = self.win.grid.spacing();
        let h3 = h * h * h;
        (h3 * (1.0 + 6.0 * (2.0 * h).powf(-q))).powf(1.0 / q)
    }
}
