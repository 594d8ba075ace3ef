//! Spectral transforms with the volume-quadrature convention
//! `uhat(xi_k) = h^3 sum_x exp(-i xi_k . x) u(x)` at `xi_k = 2 pi k / L`,
//! `k` signed in `[-N/2, N/2)`. The inverse applies `1/L^3` times the
//! adjoint phase sum, so `ifft3(fft3(u)) = u` and discrete Parseval reads
//! `sum_k uhat vhat.conj() / L^3 = h^3 sum_x u v.conj()`.

use super::{FieldError, Grid, ScalarField};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::Arc;

fn axis_ffts(grid: Grid, values: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let fft: Arc<dyn rustfft::Fft<f64>> = fft;
    let mut line = vec![Complex64::default(); n];

    // x-lines are contiguous
    for chunk in values.chunks_mut(n) {
        fft.process(chunk);
    }
    // y-lines, stride n
    for iz in 0..n {
        for ix in 0..n {
            for iy in 0..n {
                line[iy] = values[grid.idx(ix, iy, iz)];
            }
            fft.process(&mut line);
            for iy in 0..n {
                values[grid.idx(ix, iy, iz)] = line[iy];
            }
        }
    }
    // z-lines, stride n^2
    for iy in 0..n {
        for ix in 0..n {
            for iz in 0..n {
                line[iz] = values[grid.idx(ix, iy, iz)];
            }
            fft.process(&mut line);
            for iz in 0..n {
                values[grid.idx(ix, iy, iz)] = line[iz];
            }
        }
    }
}

/// Forward transform; the result is stored as a [`ScalarField`] on the same
/// grid, indexed by lattice frequency in FFT storage order.
pub fn fft3(u: &ScalarField) -> Result<ScalarField, FieldError> {
    let grid = u.grid();
    if !grid.is_power_of_two() {
        return Err(FieldError::NonPowerOfTwo(grid.n()));
    }
    let mut vals = u.values().to_vec();
    axis_ffts(grid, &mut vals, false);
    let h3 = grid.cell_volume();
    for v in &mut vals {
        *v *= h3;
    }
    Ok(ScalarField::from_raw(grid, vals))
}

/// Inverse of [`fft3`], exact to rounding.
pub fn ifft3(uhat: &ScalarField) -> Result<ScalarField, FieldError> {
    let grid = uhat.grid();
    if !grid.is_power_of_two() {
        return Err(FieldError::NonPowerOfTwo(grid.n()));
    }
    let mut vals = uhat.values().to_vec();
    axis_ffts(grid, &mut vals, true);
    let inv_l3 = 1.0 / grid.len().powi(3);
    for v in &mut vals {
        *v *= inv_l3;
    }
    Ok(ScalarField::from_raw(grid, vals))
}

/// Per-axis signed wavenumbers `xi = 2 pi k / L`, indexed by storage order.
pub fn wavenumbers(grid: Grid) -> Vec<f64> {
    let n = grid.n();
    let base = 2.0 * std::f64::consts::PI / grid.len();
    (0..n)
        .map(|k| {
            let signed = if k < n / 2 { k as isize } else { k as isize - n as isize };
            base * signed as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_transforms_to_volume_at_zero_mode() {
        let grid = Grid::new(8, 2.0).unwrap();
        let u = ScalarField::constant(grid, Complex64::new(1.0, 0.0));
        let uhat = fft3(&u).unwrap();
        assert!((uhat.values()[0] - Complex64::new(8.0, 0.0)).norm() < 1e-12);
        let tail: f64 = uhat.values()[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(tail < 1e-12);
    }

    #[test]
    fn lattice_exponential_is_a_delta() {
        let grid = Grid::new(8, 1.0).unwrap();
        let k0 = [2isize, 7, 1]; // 7 aliases to -1
        let xi: Vec<f64> = wavenumbers(grid);
        let u = ScalarField::from_fn(grid, |p| {
            let phase = 2.0 * PI * (2.0 * p[0] + 7.0 * p[1] + 1.0 * p[2]) / grid.len();
            Complex64::new(phase.cos(), phase.sin())
        });
        let uhat = fft3(&u).unwrap();
        let l3 = grid.len().powi(3);
        for iz in 0..8 {
            for iy in 0..8 {
                for ix in 0..8 {
                    let i = grid.idx(ix, iy, iz);
                    let expected = if [ix as isize, iy as isize, iz as isize] == k0 {
                        Complex64::new(l3, 0.0)
                    } else {
                        Complex64::default()
                    };
                    assert!(
                        (uhat.values()[i] - expected).norm() < 1e-11,
                        "mode ({ix},{iy},{iz}) -> {:?}",
                        uhat.values()[i]
                    );
                }
            }
        }
        let _ = xi;
    }

    #[test]
    fn roundtrip_is_identity() {
        let grid = Grid::new(16, 1.0).unwrap();
        let u = ScalarField::from_fn(grid, |p| {
            Complex64::new(
                (13.0 * p[0] + 5.0 * p[1]).sin() * (p[2] * 2.0).cosh(),
                (p[0] - p[1] * p[2]).cos(),
            )
        });
        let back = ifft3(&fft3(&u).unwrap()).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..grid.node_count() {
            err = err.max((back.values()[i] - u.values()[i]).norm());
        }
        assert!(err < 1e-12 * u.norm_max());
    }

    #[test]
    fn parseval_with_dual_measure() {
        let grid = Grid::new(8, 1.9).unwrap();
        let u = ScalarField::from_fn(grid, |p| Complex64::new(p[0] * p[1], (4.0 * p[2]).sin()));
        let v = ScalarField::from_fn(grid, |p| Complex64::new((p[0] + p[2]).cos(), p[1]));
        let phys = u.inner(&v).unwrap();
        let uh = fft3(&u).unwrap();
        let vh = fft3(&v).unwrap();
        let mut acc = Complex64::default();
        for i in 0..grid.node_count() {
            acc += uh.values()[i] * vh.values()[i].conj();
        }
        let freq = acc / grid.len().powi(3);
        assert!((phys - freq).norm() < 1e-12 * phys.norm().max(1.0));
    }

    #[test]
    fn rejects_non_power_of_two() {
        let grid = Grid::new(12, 1.0).unwrap();
        let u = ScalarField::zeros(grid);
        assert!(matches!(fft3(&u), Err(FieldError::NonPowerOfTwo(12))));
    }
}
