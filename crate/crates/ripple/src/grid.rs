//! Uniform periodic grid on the torus `[0,1)^2`.
//!
//! Points are `x = (i1/n1, i2/n2)`. Storage everywhere in this crate is
//! row-major with `x2` outermost: linear index `i2 * n1 + i1`. Wavenumbers
//! follow the standard FFT ordering: mode integer `m = i` for `i <= n/2`
//! and `m = i - n` otherwise, with `k = 2π m`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Grid dimensions; sides must be even and at least 8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    n1: usize,
    n2: usize,
}

impl Grid {
    pub fn new(n1: usize, n2: usize) -> Result<Grid> {
        if n1 < 8 || n2 < 8 || n1 % 2 != 0 || n2 % 2 != 0 {
            return Err(Error::InvalidGrid { n1, n2 });
        }
        Ok(Grid { n1, n2 })
    }

    /// Square grid shorthand.
    pub fn square(n: usize) -> Result<Grid> {
        Grid::new(n, n)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing along x1.
    pub fn dx1(&self) -> f64 {
        1.0 / self.n1 as f64
    }

    /// Grid spacing along x2.
    pub fn dx2(&self) -> f64 {
        1.0 / self.n2 as f64
    }

    /// Quadrature weight of one cell.
    pub fn cell(&self) -> f64 {
        self.dx1() * self.dx2()
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        debug_assert!(i1 < self.n1 && i2 < self.n2);
        i2 * self.n1 + i1
    }

    /// Physical coordinates of a grid point.
    pub fn point(&self, i1: usize, i2: usize) -> (f64, f64) {
        (i1 as f64 * self.dx1(), i2 as f64 * self.dx2())
    }

    /// Signed mode integer along x1 for storage index `i1`.
    #[inline]
    pub fn mode1(&self, i1: usize) -> i64 {
        if i1 <= self.n1 / 2 {
            i1 as i64
        } else {
            i1 as i64 - self.n1 as i64
        }
    }

    /// Signed mode integer along x2 for storage index `i2`.
    #[inline]
    pub fn mode2(&self, i2: usize) -> i64 {
        if i2 <= self.n2 / 2 {
            i2 as i64
        } else {
            i2 as i64 - self.n2 as i64
        }
    }

    /// Wavenumber `k1 = 2π m1`.
    #[inline]
    pub fn k1(&self, i1: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.mode1(i1) as f64
    }

    /// Wavenumber `k2 = 2π m2`.
    #[inline]
    pub fn k2(&self, i2: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.mode2(i2) as f64
    }

    /// True on the unpaired highest mode along x1.
    #[inline]
    pub fn is_nyquist1(&self, i1: usize) -> bool {
        i1 == self.n1 / 2
    }

    /// True on the unpaired highest mode along x2.
    #[inline]
    pub fn is_nyquist2(&self, i2: usize) -> bool {
        i2 == self.n2 / 2
    }

    /// Storage index of the mode with signed integers `(m1, m2)`.
    pub fn mode_index(&self, m1: i64, m2: i64) -> usize {
        let i1 = m1.rem_euclid(self.n1 as i64) as usize;
        let i2 = m2.rem_euclid(self.n2 as i64) as usize;
        self.index(i1, i2)
    }

    /// Grid with both sides doubled (used by the dealiased product).
    pub fn doubled(&self) -> Grid {
        Grid { n1: 2 * self.n1, n2: 2 * self.n2 }
    }

    pub fn same_as(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                a1: self.n1,
                a2: self.n2,
                b1: other.n1,
                b2: other.n2,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_tiny_sides() {
        assert!(Grid::new(7, 8).is_err());
        assert!(Grid::new(8, 9).is_err());
        assert!(Grid::new(4, 8).is_err());
        assert!(Grid::new(8, 8).is_ok());
    }

    #[test]
    fn mode_ordering_matches_fft_convention() {
        let g = Grid::square(8).unwrap();
        let modes: Vec<i64> = (0..8).map(|i| g.mode1(i)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert!(g.is_nyquist1(4));
        assert!(!g.is_nyquist1(3));
    }

    #[test]
    fn mode_index_round_trip() {
        let g = Grid::new(8, 16).unwrap();
        for i1 in 0..8 {
            for i2 in 0..16 {
                let idx = g.mode_index(g.mode1(i1), g.mode2(i2));
                assert_eq!(idx, g.index(i1, i2));
            }
        }
    }
}
