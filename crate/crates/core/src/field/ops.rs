//! Centered second-order difference operators on the periodic grid.
//!
//! `divergence` is exactly the negative adjoint of `gradient` under the
//! uniform-weight inner product, so discrete summation by parts holds with
//! no boundary terms.

use super::{ScalarField, VectorField};
use num_complex::Complex64;

/// Centered gradient, periodic wraparound:
/// `(grad u)_d(x) = (u(x + h e_d) - u(x - h e_d)) / (2h)`.
pub fn gradient(u: &ScalarField) -> VectorField {
    let grid = u.grid();
    let n = grid.n();
    let inv2h = 0.5 / grid.spacing();
    let vals = u.values();
    let mut comps = [
        vec![Complex64::default(); grid.node_count()],
        vec![Complex64::default(); grid.node_count()],
        vec![Complex64::default(); grid.node_count()],
    ];
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let i = grid.idx(ix, iy, iz);
                let xp = grid.idx(grid.wrap(ix, 1), iy, iz);
                let xm = grid.idx(grid.wrap(ix, -1), iy, iz);
                let yp = grid.idx(ix, grid.wrap(iy, 1), iz);
                let ym = grid.idx(ix, grid.wrap(iy, -1), iz);
                let zp = grid.idx(ix, iy, grid.wrap(iz, 1));
                let zm = grid.idx(ix, iy, grid.wrap(iz, -1));
                comps[0][i] = (vals[xp] - vals[xm]) * inv2h;
                comps[1][i] = (vals[yp] - vals[ym]) * inv2h;
                comps[2][i] = (vals[zp] - vals[zm]) * inv2h;
            }
        }
    }
    VectorField::from_raw(grid, comps)
}

/// Centered divergence, the negative adjoint of [`gradient`].
pub fn divergence(v: &VectorField) -> ScalarField {
    let grid = v.grid();
    let n = grid.n();
    let inv2h = 0.5 / grid.spacing();
    let mut out = vec![Complex64::default(); grid.node_count()];
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let i = grid.idx(ix, iy, iz);
                let xp = grid.idx(grid.wrap(ix, 1), iy, iz);
                let xm = grid.idx(grid.wrap(ix, -1), iy, iz);
                let yp = grid.idx(ix, grid.wrap(iy, 1), iz);
                let ym = grid.idx(ix, grid.wrap(iy, -1), iz);
                let zp = grid.idx(ix, iy, grid.wrap(iz, 1));
                let zm = grid.idx(ix, iy, grid.wrap(iz, -1));
                out[i] = (v.comp(0)[xp] - v.comp(0)[xm]) * inv2h
                    + (v.comp(1)[yp] - v.comp(1)[ym]) * inv2h
                    + (v.comp(2)[zp] - v.comp(2)[zm]) * inv2h;
            }
        }
    }
    ScalarField::from_raw(grid, out)
}

/// Composite Laplacian `div(grad u)`; a 7-point stencil of spacing `2h`
/// on each axis, evaluated directly.
pub fn laplacian(u: &ScalarField) -> ScalarField {
    let grid = u.grid();
    let n = grid.n();
    let inv4h2 = 0.25 / (grid.spacing() * grid.spacing());
    let vals = u.values();
    let mut out = vec![Complex64::default(); grid.node_count()];
    for iz in 0..n {
        for iy in 0..n {
            for ix in 0..n {
                let i = grid.idx(ix, iy, iz);
                let center = vals[i] * 6.0;
                let s = vals[grid.idx(grid.wrap(ix, 2), iy, iz)]
                    + vals[grid.idx(grid.wrap(ix, -2), iy, iz)]
                    + vals[grid.idx(ix, grid.wrap(iy, 2), iz)]
                    + vals[grid.idx(ix, grid.wrap(iy, -2), iz)]
                    + vals[grid.idx(ix, iy, grid.wrap(iz, 2))]
                    + vals[grid.idx(ix, iy, grid.wrap(iz, -2))];
                out[i] = (s - center) * inv4h2;
            }
        }
    }
    ScalarField::from_raw(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use std::f64::consts::PI;

    #[test]
    fn gradient_of_constant_is_zero() {
        let grid = Grid::new(16, 1.0).unwrap();
        let u = ScalarField::constant(grid, Complex64::new(3.0, -1.5));
        let g = gradient(&u);
        for d in 0..3 {
            assert!(g.comp(d).iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn divergence_of_constant_vector_is_zero() {
        let grid = Grid::new(8, 2.0).unwrap();
        let v = VectorField::from_fn(grid, |_| {
            [
                Complex64::new(1.0, 2.0),
                Complex64::new(-0.5, 0.0),
                Complex64::new(0.0, 4.0),
            ]
        });
        let d = divergence(&v);
        assert!(d.norm_max() == 0.0);
    }

    #[test]
    fn gradient_matches_analytic_derivative_second_order() {
        // max error of d/dx sin(2 pi x / L) under N -> 2N shrinks at order >= 1.9
        let l = 1.3;
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let grid = Grid::new(n, l).unwrap();
            let k = 2.0 * PI / l;
            let u = ScalarField::from_fn(grid, |p| Complex64::new((k * p[0]).sin(), 0.0));
            let g = gradient(&u);
            let mut err: f64 = 0.0;
            for iz in 0..n {
                for iy in 0..n {
                    for ix in 0..n {
                        let i = grid.idx(ix, iy, iz);
                        let x = grid.node_pos([ix, iy, iz])[0];
                        let exact = k * (k * x).cos();
                        err = err.max((g.comp(0)[i] - Complex64::new(exact, 0.0)).norm());
                    }
                }
            }
            errs.push(err);
        }
        let s1 = (errs[0] / errs[1]).log2();
        let s2 = (errs[1] / errs[2]).log2();
        assert!(s1 > 1.9 && s2 > 1.9, "orders {s1} {s2}");
        // absolute scale sanity: err <= C h^2 with C fitted from the coarse level
        let c = errs[0] / (l / 16.0).powi(2);
        assert!(errs[2] <= 1.05 * c * (l / 64.0).powi(2));
    }

    #[test]
    fn laplacian_of_sine_matches_analytic_second_order() {
        let l = 2.0;
        let mut errs = Vec::new();
        for n in [16usize, 32, 64] {
            let grid = Grid::new(n, l).unwrap();
            let k = 2.0 * PI / l;
            let u = ScalarField::from_fn(grid, |p| Complex64::new((k * p[0]).sin(), 0.0));
            let lap = laplacian(&u);
            let mut err: f64 = 0.0;
            for i in 0..grid.node_count() {
                let x = grid.node_pos(grid.coords(i))[0];
                let exact = -k * k * (k * x).sin();
                err = err.max((lap.values()[i] - Complex64::new(exact, 0.0)).norm());
            }
            errs.push(err);
        }
        let s1 = (errs[0] / errs[1]).log2();
        let s2 = (errs[1] / errs[2]).log2();
        assert!(s1 > 1.9 && s2 > 1.9, "orders {s1} {s2}");
    }

    #[test]
    fn laplacian_equals_divergence_of_gradient() {
        let grid = Grid::new(12, 1.0).unwrap();
        let u = ScalarField::from_fn(grid, |p| {
            Complex64::new((7.0 * p[0] * p[1]).sin(), (3.0 * p[2]).cos())
        });
        let a = laplacian(&u);
        let b = divergence(&gradient(&u));
        let mut diff: f64 = 0.0;
        for i in 0..grid.node_count() {
            diff = diff.max((a.values()[i] - b.values()[i]).norm());
        }
        assert!(diff < 1e-10 * a.norm_max().max(1.0));
    }

    #[test]
    fn divergence_is_negative_adjoint_of_gradient() {
        // <grad u, v> + <u, div v> = 0 to machine precision, random-ish fields
        let grid = Grid::new(8, 1.7).unwrap();
        let u = ScalarField::from_fn(grid, |p| {
            Complex64::new(
                (5.0 * p[0] - 2.0 * p[1]).sin() + p[2] * p[2],
                (p[0] * p[1] * 9.0).cos(),
            )
        });
        let v = VectorField::from_fn(grid, |p| {
            [
                Complex64::new((3.0 * p[2]).cos(), p[0]),
                Complex64::new(p[1] * p[1], -(2.0 * p[0]).sin()),
                Complex64::new(0.3, (p[1] + p[2]).sin()),
            ]
        });
        let lhs = gradient(&u).inner(&v).unwrap();
        let rhs = u.inner(&divergence(&v)).unwrap();
        let scale = u.norm_l2() * v.norm_l2();
        assert!((lhs + rhs).norm() < 1e-12 * scale);
    }
}
