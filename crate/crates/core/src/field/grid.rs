use super::FieldError;

/// Uniform periodic grid on `[0, L)^3` with `N` nodes per axis.
///
/// `N` must be at least 8 and divisible by 4 so the computational sub-box
/// `[L/4, 3L/4]^3` is lattice-aligned. Index arithmetic wraps modulo `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    len: f64,
}

impl Grid {
    pub fn new(n: usize, len: f64) -> Result<Self, FieldError> {
        if n < 8 || n % 4 != 0 {
            return Err(FieldError::BadGridSize(n));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(FieldError::BadBoxLength(len));
        }
        Ok(Self { n, len })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    /// Node spacing `h = L/N`.
    pub fn spacing(&self) -> f64 {
        self.len / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn node_count(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Linear index in x-fastest order.
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.n * (iy + self.n * iz)
    }

    #[inline]
    pub fn coords(&self, i: usize) -> [usize; 3] {
        let ix = i % self.n;
        let iy = (i / self.n) % self.n;
        let iz = i / (self.n * self.n);
        [ix, iy, iz]
    }

    /// Periodic shift of a single axis index by `step` nodes.
    #[inline]
    pub fn wrap(&self, i: usize, step: isize) -> usize {
        let n = self.n as isize;
        (((i as isize + step) % n + n) % n) as usize
    }

    pub fn node_pos(&self, idx3: [usize; 3]) -> [f64; 3] {
        let h = self.spacing();
        [idx3[0] as f64 * h, idx3[1] as f64 * h, idx3[2] as f64 * h]
    }

    pub fn is_power_of_two(&self) -> bool {
        self.n.is_power_of_two()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_misaligned() {
        assert!(Grid::new(4, 1.0).is_err());
        assert!(Grid::new(10, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, f64::NAN).is_err());
        assert!(Grid::new(12, 1.0).is_ok());
    }

    #[test]
    fn wrap_is_periodic() {
        let g = Grid::new(8, 1.0).unwrap();
        assert_eq!(g.wrap(0, -1), 7);
        assert_eq!(g.wrap(7, 2), 1);
        assert_eq!(g.wrap(3, -11), 0);
    }

    #[test]
    fn idx_coords_roundtrip() {
        let g = Grid::new(8, 1.0).unwrap();
        for i in [0, 1, 63, 200, 511] {
            let c = g.coords(i);
            assert_eq!(g.idx(c[0], c[1], c[2]), i);
        }
    }
}
