//! Discrete geometry of the computational sub-box.
//!
//! The physical domain is the sub-box `[L/4, 3L/4]^3` of the periodic box.
//! Because the centered stencils reach two nodes, the discrete Dirichlet
//! layer is a three-node-thick collar (one ring outside the closed sub-box,
//! its faces, and one ring inside). Pinning data on the collar decouples
//! the interior unknowns from the exterior for every operator in this
//! crate, and makes quadrature over the half-open mask `[L/4, 3L/4)^3`
//! depend on interior and collar values only.

use super::{FieldError, Grid, ScalarField};
use num_complex::Complex64;

/// Node index sets of the standard sub-box domain.
#[derive(Debug, Clone)]
pub struct Domain {
    grid: Grid,
    /// Solver unknowns: axes in `[N/4+2, 3N/4-2]`.
    interior: Vec<usize>,
    /// Dirichlet collar: padded closed box minus interior.
    collar: Vec<usize>,
    /// Quadrature mask: half-open box, axes in `[N/4, 3N/4)`; its discrete
    /// volume is exactly `(L/2)^3`.
    mask: Vec<usize>,
    is_interior: Vec<bool>,
    is_collar: Vec<bool>,
    is_mask: Vec<bool>,
}

impl Domain {
    /// The standard domain of a grid.
    pub fn new(grid: Grid) -> Self {
        let n = grid.n();
        let q = n / 4;
        let mut interior = Vec::new();
        let mut collar = Vec::new();
        let mut mask = Vec::new();
        let mut is_interior = vec![false; grid.node_count()];
        let mut is_collar = vec![false; grid.node_count()];
        let mut is_mask = vec![false; grid.node_count()];
        let inner = |i: usize| i >= q + 2 && i <= 3 * q - 2;
        let padded = |i: usize| i >= q - 1 && i <= 3 * q + 1;
        let masked = |i: usize| i >= q && i < 3 * q;
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let i = grid.idx(ix, iy, iz);
                    if inner(ix) && inner(iy) && inner(iz) {
                        interior.push(i);
                        is_interior[i] = true;
                    } else if padded(ix) && padded(iy) && padded(iz) {
                        collar.push(i);
                        is_collar[i] = true;
                    }
                    if masked(ix) && masked(iy) && masked(iz) {
                        mask.push(i);
                        is_mask[i] = true;
                    }
                }
            }
        }
        Self {
            grid,
            interior,
            collar,
            mask,
            is_interior,
            is_collar,
            is_mask,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn collar(&self) -> &[usize] {
        &self.collar
    }

    pub fn mask(&self) -> &[usize] {
        &self.mask
    }

    pub fn is_interior(&self, i: usize) -> bool {
        self.is_interior[i]
    }

    pub fn is_collar(&self, i: usize) -> bool {
        self.is_collar[i]
    }

    pub fn is_mask(&self, i: usize) -> bool {
        self.is_mask[i]
    }

    /// Discrete volume of the quadrature mask, `(L/2)^3` exactly.
    pub fn mask_volume(&self) -> f64 {
        self.grid.cell_volume() * self.mask.len() as f64
    }

    /// Mean of a field over the collar nodes.
    pub fn collar_mean(&self, u: &ScalarField) -> Complex64 {
        let mut acc = Complex64::default();
        for &i in &self.collar {
            acc += u.values()[i];
        }
        acc / self.collar.len() as f64
    }
}

/// Dirichlet data on the collar nodes of the standard domain, stored in
/// the collar's canonical node order together with the mask itself.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    grid: Grid,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl BoundaryTrace {
    /// Restrict a full field to the collar.
    pub fn from_field(domain: &Domain, u: &ScalarField) -> Result<Self, FieldError> {
        if u.grid().n() != domain.grid().n() {
            return Err(FieldError::GridMismatch(u.grid().n(), domain.grid().n()));
        }
        let values = domain.collar().iter().map(|&i| u.values()[i]).collect();
        Ok(Self {
            grid: domain.grid(),
            indices: domain.collar().to_vec(),
            values,
        })
    }

    /// Sample a function of position on the collar.
    pub fn from_fn(domain: &Domain, mut f: impl FnMut([f64; 3]) -> Complex64) -> Self {
        let grid = domain.grid();
        let values = domain
            .collar()
            .iter()
            .map(|&i| f(grid.node_pos(grid.coords(i))))
            .collect();
        Self {
            grid,
            indices: domain.collar().to_vec(),
            values,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// New trace with every value multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            indices: self.indices.clone(),
            values: self.values.iter().map(|&v| c * v).collect(),
        }
    }

    /// `self + c * other`, traces on the same collar.
    pub fn axpy(&self, c: Complex64, other: &Self) -> Self {
        debug_assert_eq!(self.indices.len(), other.indices.len());
        Self {
            grid: self.grid,
            indices: self.indices.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + c * b)
                .collect(),
        }
    }

    /// Write the trace values into a full field at the collar nodes.
    pub fn scatter_into(&self, u: &mut ScalarField) {
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            u.values_mut()[i] = v;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_volume_is_half_box_cubed() {
        for (n, l) in [(8usize, 1.0), (16, 2.0), (32, 0.7)] {
            let grid = Grid::new(n, l).unwrap();
            let dom = Domain::new(grid);
            assert!((dom.mask_volume() - (l / 2.0).powi(3)).abs() < 1e-12 * l.powi(3));
        }
    }

    #[test]
    fn regions_are_disjoint_and_stencil_separated() {
        let grid = Grid::new(16, 1.0).unwrap();
        let dom = Domain::new(grid);
        let n = grid.n();
        for &i in dom.interior() {
            assert!(!dom.is_collar(i));
            // the wide stencil from an interior node never leaves interior + collar
            let c = grid.coords(i);
            for d in 0..3 {
                for step in [-2isize, -1, 1, 2] {
                    let mut cc = c;
                    cc[d] = grid.wrap(c[d], step);
                    let j = grid.idx(cc[0], cc[1], cc[2]);
                    assert!(dom.is_interior(j) || dom.is_collar(j));
                }
            }
        }
        // gradient at a mask node reads interior or collar values only
        for &i in dom.mask() {
            let c = grid.coords(i);
            for d in 0..3 {
                for step in [-1isize, 1] {
                    let mut cc = c;
                    cc[d] = grid.wrap(c[d], step);
                    let j = grid.idx(cc[0], cc[1], cc[2]);
                    assert!(dom.is_interior(j) || dom.is_collar(j));
                }
            }
        }
        let _ = n;
    }

    #[test]
    fn interior_is_connected_box() {
        let grid = Grid::new(16, 1.0).unwrap();
        let dom = Domain::new(grid);
        // [q+2, 3q-2] = [6, 10] per axis -> 125 nodes
        assert_eq!(dom.interior().len(), 125);
        assert_eq!(dom.mask().len(), 512);
    }

    #[test]
    fn trace_restricts_and_scatters() {
        let grid = Grid::new(8, 1.0).unwrap();
        let dom = Domain::new(grid);
        let u = ScalarField::from_fn(grid, |p| Complex64::new(p[0] + 2.0 * p[1], p[2]));
        let tr = BoundaryTrace::from_field(&dom, &u).unwrap();
        let mut v = ScalarField::zeros(grid);
        tr.scatter_into(&mut v);
        for &i in dom.collar() {
            assert_eq!(v.values()[i], u.values()[i]);
        }
        let outside = (0..grid.node_count()).find(|&i| !dom.is_collar(i)).unwrap();
        assert_eq!(v.values()[outside], Complex64::default());
    }
}
