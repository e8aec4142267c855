//! Real scalar fields on the periodic grid.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::spectrum::Spectrum;

/// Tolerance factor for the vanishing-x1-average check, relative to the
/// sup norm of the field.
pub const MEAN_X1_TOL: f64 = 1e-12;

/// A real field sampled at grid points, stored x2-outer (`i2 * n1 + i1`).
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Field {
        Field { grid, data: vec![0.0; grid.len()] }
    }

    /// Build from a closure over physical coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Field {
        let mut data = vec![0.0; grid.len()];
        for i2 in 0..grid.n2() {
            for i1 in 0..grid.n1() {
                let (x1, x2) = grid.point(i1, i2);
                data[grid.index(i1, i2)] = f(x1, x2);
            }
        }
        Field { grid, data }
    }

    pub fn from_data(grid: Grid, data: Vec<f64>) -> Result<Field> {
        if data.len() != grid.len() {
            return Err(Error::InvalidParameter {
                name: "field data length",
                reason: format!("expected {}, got {}", grid.len(), data.len()),
            });
        }
        Ok(Field { grid, data })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.data[self.grid.index(i1, i2)]
    }

    pub fn to_spectrum(&self) -> Spectrum {
        Spectrum::from_field(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    /// Quadrature mean over the torus.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Discrete L2 norm, `(Σ f² Δ₁Δ₂)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell()).sqrt()
    }

    /// Discrete pairing `Σ f g Δ₁Δ₂`; exact counterpart of the L2 inner
    /// product by Parseval.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.grid.same_as(&other.grid)?;
        let s: f64 = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum();
        Ok(s * self.grid.cell())
    }

    /// Largest absolute line mean over x1 (the k1 = 0 content in space).
    pub fn max_x1_line_mean(&self) -> f64 {
        let n1 = self.grid.n1();
        let mut worst = 0.0f64;
        for i2 in 0..self.grid.n2() {
            let row = &self.data[i2 * n1..(i2 + 1) * n1];
            let mean = row.iter().sum::<f64>() / n1 as f64;
            worst = worst.max(mean.abs());
        }
        worst
    }

    /// Enforce the vanishing-x1-average invariant within
    /// `MEAN_X1_TOL * max_abs`.
    pub fn require_mean_x1_zero(&self) -> Result<()> {
        let found = self.max_x1_line_mean();
        let tol = MEAN_X1_TOL * self.max_abs().max(1e-300);
        if found > tol {
            return Err(Error::NonzeroX1Average { found, tol });
        }
        Ok(())
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> Field {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &Field) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Exact periodic shift by whole cells: result(x) = self(x + (c1Δ₁, c2Δ₂)).
    pub fn shift_cells(&self, c1: i64, c2: i64) -> Field {
        let n1 = self.grid.n1() as i64;
        let n2 = self.grid.n2() as i64;
        let mut data = vec![0.0; self.data.len()];
        for i2 in 0..self.grid.n2() {
            let j2 = ((i2 as i64 + c2).rem_euclid(n2)) as usize;
            for i1 in 0..self.grid.n1() {
                let j1 = ((i1 as i64 + c1).rem_euclid(n1)) as usize;
                data[self.grid.index(i1, i2)] = self.data[self.grid.index(j1, j2)];
            }
        }
        Field { grid: self.grid, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product_is_quadrature() {
        let g = Grid::square(16).unwrap();
        let f = Field::from_fn(g, |x1, _| (2.0 * std::f64::consts::PI * x1).cos());
        // ∫ cos² = 1/2 exactly under rectangle quadrature for this bandwidth.
        assert!((f.inner(&f).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn line_mean_detects_constant_offset() {
        let g = Grid::square(8).unwrap();
        let f = Field::from_fn(g, |_, x2| 1.0 + x2);
        assert!(f.require_mean_x1_zero().is_err());
        let p = Field::from_fn(g, |x1, _| (2.0 * std::f64::consts::PI * x1).sin());
        assert!(p.require_mean_x1_zero().is_ok());
    }

    #[test]
    fn shift_cells_wraps_periodically() {
        let g = Grid::square(8).unwrap();
        let f = Field::from_fn(g, |x1, x2| x1 + 10.0 * x2);
        let s = f.shift_cells(3, 5);
        assert_eq!(s.at(0, 0), f.at(3, 5));
        assert_eq!(s.at(7, 7), f.at((7 + 3) % 8, (7 + 5) % 8));
    }
}
