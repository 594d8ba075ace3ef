//! Uniform periodic grid, fields, differential operators, quadrature and
//! spectral transforms used by every other module.
//!
//! All fields live on the full periodic box `[0, L)^3` sampled at `N^3`
//! nodes in x-fastest order. The computational domain is the sub-box
//! `[L/4, 3L/4]^3` (see [`Domain`]); coefficients are extended by
//! `sigma = 1`, `a = 0` outside it so periodic spectral operations are
//! exact.

mod domain;
mod fft;
mod grid;
mod ops;
mod pqf1;

pub use domain::{BoundaryTrace, Domain};
pub use fft::{fft3, ifft3, wavenumbers};
pub use grid::Grid;
pub use ops::{divergence, gradient, laplacian};
pub use pqf1::{read_pqf1, write_pqf1, Pqf1Payload};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid mismatch: {0} vs {1} nodes per axis")]
    GridMismatch(usize, usize),
    #[error("grid must have at least 8 nodes per axis divisible by 4, got {0}")]
    BadGridSize(usize),
    #[error("box length must be positive and finite, got {0}")]
    BadBoxLength(f64),
    #[error("field contains a non-finite entry at linear index {0}")]
    NonFinite(usize),
    #[error("value buffer has length {got}, grid wants {want}")]
    BadLength { got: usize, want: usize },
    #[error("exponent p must lie in (1, inf), got {0}")]
    BadExponent(f64),
    #[error("spectral transform requires a power-of-two grid, got {0}")]
    NonPowerOfTwo(usize),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed PQF1 stream: {0}")]
    BadFormat(String),
}

/// Complex samples on the full periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<Complex64>,
}

/// Real samples on the full periodic grid; used for coefficients
/// (`sigma`, `a`) and derived densities (`beta`, reconstructed `a`).
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

/// Three complex component arrays on the full periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    comps: [Vec<Complex64>; 3],
}

impl ScalarField {
    /// Validating constructor: length must equal `N^3` and all entries finite.
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self, FieldError> {
        if values.len() != grid.node_count() {
            return Err(FieldError::BadLength {
                got: values.len(),
                want: grid.node_count(),
            });
        }
        if let Some(i) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FieldError::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_raw(grid, vec![Complex64::new(0.0, 0.0); grid.node_count()])
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        Self::from_raw(grid, vec![c; grid.node_count()])
    }

    /// Sample a function of the node position.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for iz in 0..grid.n() {
            for iy in 0..grid.n() {
                for ix in 0..grid.n() {
                    values.push(f(grid.node_pos([ix, iy, iz])));
                }
            }
        }
        Self::from_raw(grid, values)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&z| f(z)).collect())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| c * z)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex64, other: &Self) -> Self {
        debug_assert_eq!(self.grid.n(), other.grid.n());
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + c * b)
            .collect();
        Self::from_raw(self.grid, values)
    }

    /// Volume-weighted inner product `h^3 sum u conj(v)`; conjugate-linear in `v`.
    pub fn inner(&self, other: &Self) -> Result<Complex64, FieldError> {
        if self.grid.n() != other.grid.n() {
            return Err(FieldError::GridMismatch(self.grid.n(), other.grid.n()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (&a, &b) in self.values.iter().zip(&other.values) {
            acc += a * b.conj();
        }
        Ok(acc * self.grid.cell_volume())
    }

    /// Inner product restricted to a node index set.
    pub fn inner_masked(&self, other: &Self, mask: &[usize]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &i in mask {
            acc += self.values[i] * other.values[i].conj();
        }
        acc * self.grid.cell_volume()
    }

    pub fn norm_l2(&self) -> f64 {
        let mut acc = 0.0;
        for z in &self.values {
            acc += z.norm_sqr();
        }
        (acc * self.grid.cell_volume()).sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Discrete surrogate of the `W^{1,p}` norm:
    /// `(h^3 sum (|u|^p + |grad u|^p))^{1/p}`.
    pub fn norm_w1p(&self, p: f64) -> Result<f64, FieldError> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(FieldError::BadExponent(p));
        }
        let g = gradient(self);
        let mut acc = 0.0;
        for i in 0..self.values.len() {
            let gv = [g.comps[0][i], g.comps[1][i], g.comps[2][i]];
            let gn = (gv[0].norm_sqr() + gv[1].norm_sqr() + gv[2].norm_sqr()).sqrt();
            acc += self.values[i].norm().powf(p) + gn.powf(p);
        }
        Ok((acc * self.grid.cell_volume()).powf(1.0 / p))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn to_real_lossy(&self) -> RealField {
        RealField::from_raw(self.grid, self.values.iter().map(|z| z.re).collect())
    }
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.node_count() {
            return Err(FieldError::BadLength {
                got: values.len(),
                want: grid.node_count(),
            });
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(FieldError::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self::from_raw(grid, vec![c; grid.node_count()])
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for iz in 0..grid.n() {
            for iy in 0..grid.n() {
                for ix in 0..grid.n() {
                    values.push(f(grid.node_pos([ix, iy, iz])));
                }
            }
        }
        Self::from_raw(grid, values)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn to_complex(&self) -> ScalarField {
        ScalarField::from_raw(
            self.grid,
            self.values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl VectorField {
    pub fn new(grid: Grid, comps: [Vec<Complex64>; 3]) -> Result<Self, FieldError> {
        for c in &comps {
            if c.len() != grid.node_count() {
                return Err(FieldError::BadLength {
                    got: c.len(),
                    want: grid.node_count(),
                });
            }
            if let Some(i) = c.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(FieldError::NonFinite(i));
            }
        }
        Ok(Self { grid, comps })
    }

    pub(crate) fn from_raw(grid: Grid, comps: [Vec<Complex64>; 3]) -> Self {
        Self { grid, comps }
    }

    pub fn zeros(grid: Grid) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.node_count()];
        Self::from_raw(grid, [z.clone(), z.clone(), z])
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> [Complex64; 3]) -> Self {
        let mut cx = Vec::with_capacity(grid.node_count());
        let mut cy = Vec::with_capacity(grid.node_count());
        let mut cz = Vec::with_capacity(grid.node_count());
        for iz in 0..grid.n() {
            for iy in 0..grid.n() {
                for ix in 0..grid.n() {
                    let v = f(grid.node_pos([ix, iy, iz]));
                    cx.push(v[0]);
                    cy.push(v[1]);
                    cz.push(v[2]);
                }
            }
        }
        Self::from_raw(grid, [cx, cy, cz])
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn comp(&self, d: usize) -> &[Complex64] {
        &self.comps[d]
    }

    pub fn comp_mut(&mut self, d: usize) -> &mut [Complex64] {
        &mut self.comps[d]
    }

    pub fn at(&self, i: usize) -> [Complex64; 3] {
        [self.comps[0][i], self.comps[1][i], self.comps[2][i]]
    }

    pub fn set(&mut self, i: usize, v: [Complex64; 3]) {
        self.comps[0][i] = v[0];
        self.comps[1][i] = v[1];
        self.comps[2][i] = v[2];
    }

    /// Volume-weighted inner product `h^3 sum v . conj(w)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64, FieldError> {
        if self.grid.n() != other.grid.n() {
            return Err(FieldError::GridMismatch(self.grid.n(), other.grid.n()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for d in 0..3 {
            for (&a, &b) in self.comps[d].iter().zip(&other.comps[d]) {
                acc += a * b.conj();
            }
        }
        Ok(acc * self.grid.cell_volume())
    }

    pub fn norm_l2(&self) -> f64 {
        let mut acc = 0.0;
        for d in 0..3 {
            for z in &self.comps[d] {
                acc += z.norm_sqr();
            }
        }
        (acc * self.grid.cell_volume()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_is_volume_on_ones() {
        let grid = Grid::new(8, 2.0).unwrap();
        let one = ScalarField::constant(grid, Complex64::new(1.0, 0.0));
        let v = one.inner(&one).unwrap();
        assert!((v.re - 8.0).abs() < 1e-12);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn inner_positive_and_real_on_diagonal() {
        let grid = Grid::new(8, 1.0).unwrap();
        let u = ScalarField::from_fn(grid, |p| Complex64::new(p[0] - p[1], p[2]));
        let v = u.inner(&u).unwrap();
        assert!(v.re >= 0.0);
        assert!(v.im.abs() < 1e-14 * v.re.max(1.0));
    }

    #[test]
    fn inner_rejects_grid_mismatch() {
        let a = ScalarField::zeros(Grid::new(8, 1.0).unwrap());
        let b = ScalarField::zeros(Grid::new(16, 1.0).unwrap());
        assert!(matches!(a.inner(&b), Err(FieldError::GridMismatch(8, 16))));
    }

    #[test]
    fn norm_w1p_basics() {
        let grid = Grid::new(8, 2.0).unwrap();
        let zero = ScalarField::zeros(grid);
        assert_eq!(zero.norm_w1p(1.5).unwrap(), 0.0);

        // |Omega|^{1/2} for u = 1, p = 2 on the full box.
        let one = ScalarField::constant(grid, Complex64::new(1.0, 0.0));
        let n = one.norm_w1p(2.0).unwrap();
        assert!((n - 8.0_f64.sqrt()).abs() < 1e-12);

        // homogeneity
        let u = ScalarField::from_fn(grid, |p| {
            Complex64::new((p[0] * 3.1).sin(), (p[1] - p[2]).cos())
        });
        let c = Complex64::new(-2.5, 1.0);
        let lhs = u.scale(c).norm_w1p(3.0).unwrap();
        let rhs = c.norm() * u.norm_w1p(3.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }

    #[test]
    fn norm_w1p_rejects_bad_exponent() {
        let grid = Grid::new(8, 1.0).unwrap();
        let u = ScalarField::zeros(grid);
        assert!(u.norm_w1p(1.0).is_err());
        assert!(u.norm_w1p(f64::INFINITY).is_err());
    }

    #[test]
    fn constructors_reject_non_finite() {
        let grid = Grid::new(8, 1.0).unwrap();
        let mut vals = vec![Complex64::new(0.0, 0.0); grid.node_count()];
        vals[17] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            ScalarField::new(grid, vals),
            Err(FieldError::NonFinite(17))
        ));
    }
}
