//! Fourier representation of real fields and the transforms between them.
//!
//! Conventions: forward `f̂(k) = Σ_x f(x) e^{-ik·x} Δ₁Δ₂`, inverse
//! `f(x) = Σ_k f̂(k) e^{ik·x}` with no further scaling, so that the discrete
//! Parseval identity `Σ_x f g Δ₁Δ₂ = Σ_k f̂ ĝ*` holds exactly. Plans are
//! cached globally per transform length.

use crate::field::Field;
use crate::grid::Grid;
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry((len, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let dir = if forward { FftDirection::Forward } else { FftDirection::Inverse };
            planner.plan_fft(len, dir)
        })
        .clone()
}

/// In-place 2-d FFT over the x2-outer layout: rows of length n1 first,
/// then columns via transpose.
fn fft_2d(data: &mut [Complex64], n1: usize, n2: usize, forward: bool) {
    let row = plan(n1, forward);
    for r in data.chunks_exact_mut(n1) {
        row.process(r);
    }
    let mut t = vec![Complex64::default(); data.len()];
    for i2 in 0..n2 {
        for i1 in 0..n1 {
            t[i1 * n2 + i2] = data[i2 * n1 + i1];
        }
    }
    let col = plan(n2, forward);
    for r in t.chunks_exact_mut(n2) {
        col.process(r);
    }
    for i2 in 0..n2 {
        for i1 in 0..n1 {
            data[i2 * n1 + i1] = t[i1 * n2 + i2];
        }
    }
}

/// Fourier coefficients of a real field, same storage layout as `Field`
/// with FFT mode ordering along both axes.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: Grid) -> Spectrum {
        Spectrum { grid, data: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_field(field: &Field) -> Spectrum {
        let grid = field.grid();
        let mut data: Vec<Complex64> =
            field.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_2d(&mut data, grid.n1(), grid.n2(), true);
        let scale = grid.cell();
        for c in &mut data {
            *c *= scale;
        }
        Spectrum { grid, data }
    }

    /// Inverse transform; imaginary parts are discarded (all operators in
    /// this crate preserve conjugate symmetry).
    pub fn to_field(&self) -> Field {
        let mut data = self.data.clone();
        fft_2d(&mut data, self.grid.n1(), self.grid.n2(), false);
        let re: Vec<f64> = data.iter().map(|c| c.re).collect();
        debug_assert!({
            let max_im = data.iter().fold(0.0f64, |a, c| a.max(c.im.abs()));
            let max_re = re.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            max_im <= 1e-9 * max_re.max(1e-300) || max_im < 1e-12
        });
        Field::from_data(self.grid, re).expect("layout preserved")
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn at_mode(&self, m1: i64, m2: i64) -> Complex64 {
        self.data[self.grid.mode_index(m1, m2)]
    }

    /// `Σ_k |f̂(k)|²`, the discrete counterpart of `∫ f²`.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_k W(k) |f̂(k)|²` for a caller-supplied nonnegative weight given
    /// storage indices; the workhorse behind every quadratic form.
    pub fn weighted_energy(&self, weight: impl Fn(usize, usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for i2 in 0..self.grid.n2() {
            for i1 in 0..self.grid.n1() {
                let c = self.data[self.grid.index(i1, i2)];
                if c.re != 0.0 || c.im != 0.0 {
                    acc += weight(i1, i2) * c.norm_sqr();
                }
            }
        }
        acc
    }

    /// Relative magnitude of the k1 = 0 line, used to police negative
    /// fractional powers of |∂₁|.
    pub fn k1_zero_content(&self) -> f64 {
        let mut zero_line = 0.0f64;
        let mut overall = 0.0f64;
        for i2 in 0..self.grid.n2() {
            for i1 in 0..self.grid.n1() {
                let m = self.data[self.grid.index(i1, i2)].norm();
                overall = overall.max(m);
                if i1 == 0 {
                    zero_line = zero_line.max(m);
                }
            }
        }
        if overall == 0.0 {
            0.0
        } else {
            zero_line / overall
        }
    }

    /// Zero-pad onto the doubled grid. The unpaired highest mode is split
    /// half and half onto the two modes it represents, so real fields stay
    /// real and band-limited fields round-trip exactly through
    /// [`Spectrum::fold_halve`].
    pub fn pad_double(&self) -> Spectrum {
        let fine = self.grid.doubled();
        let mut out = Spectrum::zeros(fine);
        let half1 = (self.grid.n1() / 2) as i64;
        let half2 = (self.grid.n2() / 2) as i64;
        for i2 in 0..self.grid.n2() {
            let m2 = self.grid.mode2(i2);
            for i1 in 0..self.grid.n1() {
                let c = self.data[self.grid.index(i1, i2)];
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let m1 = self.grid.mode1(i1);
                let t1: &[(i64, f64)] =
                    if m1 == half1 { &[(half1, 0.5), (-half1, 0.5)] } else { &[(m1, 1.0)] };
                let t2: &[(i64, f64)] =
                    if m2 == half2 { &[(half2, 0.5), (-half2, 0.5)] } else { &[(m2, 1.0)] };
                for &(a, wa) in t1 {
                    for &(b, wb) in t2 {
                        out.data[fine.mode_index(a, b)] += c * (wa * wb);
                    }
                }
            }
        }
        out
    }

    /// Truncate from a doubled grid back to the base grid. Modes strictly
    /// inside the base band copy over; the two fine modes covering the
    /// unpaired highest base mode are summed into its slot, which matches
    /// point values on the base grid.
    pub fn fold_halve(&self) -> Spectrum {
        assert!(self.grid.n1() % 4 == 0 && self.grid.n2() % 4 == 0, "fold needs a doubled grid");
        let coarse = Grid::new(self.grid.n1() / 2, self.grid.n2() / 2)
            .expect("halving a valid doubled grid");
        let mut out = Spectrum::zeros(coarse);
        let half1 = (coarse.n1() / 2) as i64;
        let half2 = (coarse.n2() / 2) as i64;
        for i2 in 0..coarse.n2() {
            let m2 = coarse.mode2(i2);
            for i1 in 0..coarse.n1() {
                let m1 = coarse.mode1(i1);
                let s1: &[i64] = if m1 == half1 { &[half1, -half1] } else { &[m1] };
                let s2: &[i64] = if m2 == half2 { &[half2, -half2] } else { &[m2] };
                let mut acc = Complex64::default();
                for &a in s1 {
                    for &b in s2 {
                        acc += self.data[self.grid.mode_index(a, b)];
                    }
                }
                out.data[coarse.index(i1, i2)] = acc;
            }
        }
        out
    }

    /// Adjoint of [`Spectrum::fold_halve`] under the coefficient pairing:
    /// zero-pad with FULL weight on both fine representatives of an
    /// unpaired highest mode (where [`Spectrum::pad_double`] uses half).
    /// The pair (`pad_double_full`, `fold_halve_adjoint`) makes the
    /// dealiased product's adjoint exact; see `ops`.
    pub(crate) fn pad_double_full(&self) -> Spectrum {
        let fine = self.grid.doubled();
        let mut out = Spectrum::zeros(fine);
        let half1 = (self.grid.n1() / 2) as i64;
        let half2 = (self.grid.n2() / 2) as i64;
        for i2 in 0..self.grid.n2() {
            let m2 = self.grid.mode2(i2);
            for i1 in 0..self.grid.n1() {
                let c = self.data[self.grid.index(i1, i2)];
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let m1 = self.grid.mode1(i1);
                let t1: &[i64] = if m1 == half1 { &[half1, -half1] } else { &[m1] };
                let t2: &[i64] = if m2 == half2 { &[half2, -half2] } else { &[m2] };
                for &a in t1 {
                    for &b in t2 {
                        out.data[fine.mode_index(a, b)] += c;
                    }
                }
            }
        }
        out
    }

    /// Adjoint of [`Spectrum::pad_double`] under the plain coefficient
    /// pairing: like `fold_halve` but with half weight on the two fine
    /// modes feeding an unpaired highest mode. Used where exact adjoint
    /// calculus matters (gradients), identical to `fold_halve` away from
    /// the highest modes.
    pub(crate) fn fold_halve_adjoint(&self) -> Spectrum {
        assert!(self.grid.n1() % 4 == 0 && self.grid.n2() % 4 == 0, "fold needs a doubled grid");
        let coarse = Grid::new(self.grid.n1() / 2, self.grid.n2() / 2)
            .expect("halving a valid doubled grid");
        let mut out = Spectrum::zeros(coarse);
        let half1 = (coarse.n1() / 2) as i64;
        let half2 = (coarse.n2() / 2) as i64;
        for i2 in 0..coarse.n2() {
            let m2 = coarse.mode2(i2);
            for i1 in 0..coarse.n1() {
                let m1 = coarse.mode1(i1);
                let s1: &[(i64, f64)] =
                    if m1 == half1 { &[(half1, 0.5), (-half1, 0.5)] } else { &[(m1, 1.0)] };
                let s2: &[(i64, f64)] =
                    if m2 == half2 { &[(half2, 0.5), (-half2, 0.5)] } else { &[(m2, 1.0)] };
                let mut acc = Complex64::default();
                for &(a, wa) in s1 {
                    for &(b, wb) in s2 {
                        acc += self.data[self.grid.mode_index(a, b)] * (wa * wb);
                    }
                }
                out.data[coarse.index(i1, i2)] = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_trip_is_identity() {
        let g = Grid::new(16, 8).unwrap();
        let f = Field::from_fn(g, |x1, x2| {
            (2.0 * PI * x1).sin() + 0.3 * (2.0 * PI * (3.0 * x1 + 2.0 * x2)).cos() + 0.7
        });
        let back = f.to_spectrum().to_field();
        let err: f64 = f
            .data()
            .iter()
            .zip(back.data().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "round trip error {err}");
    }

    #[test]
    fn coefficients_of_pure_modes() {
        let g = Grid::square(16).unwrap();
        let f = Field::from_fn(g, |x1, _| (2.0 * PI * x1).sin());
        let s = f.to_spectrum();
        let c = s.at_mode(1, 0);
        assert!((c - Complex64::new(0.0, -0.5)).norm() < 1e-13);
        let c = s.at_mode(-1, 0);
        assert!((c - Complex64::new(0.0, 0.5)).norm() < 1e-13);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = Grid::new(16, 32).unwrap();
        let f = Field::from_fn(g, |x1, x2| {
            (2.0 * PI * x1).cos() * (2.0 * PI * x2).sin() + 0.25 * (2.0 * PI * 5.0 * x1).sin()
        });
        let space = f.inner(&f).unwrap();
        let freq = f.to_spectrum().energy();
        assert!((space - freq).abs() < 1e-13 * space.max(1.0));
    }

    #[test]
    fn pad_then_fold_is_identity() {
        let g = Grid::square(8).unwrap();
        // Includes content at the unpaired highest mode on both axes.
        let f = Field::from_fn(g, |x1, x2| {
            (2.0 * PI * 4.0 * x1).cos() + (2.0 * PI * 4.0 * x2).cos() + (2.0 * PI * 2.0 * x1).sin()
        });
        let s = f.to_spectrum();
        let back = s.pad_double().fold_halve();
        let err: f64 = s
            .data()
            .iter()
            .zip(back.data().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-13, "pad/fold error {err}");
    }

    #[test]
    fn padded_field_interpolates_at_base_points() {
        let g = Grid::square(8).unwrap();
        let f = Field::from_fn(g, |x1, x2| (2.0 * PI * 3.0 * x1).cos() * (2.0 * PI * x2).sin());
        let fine = f.to_spectrum().pad_double().to_field();
        for i2 in 0..8 {
            for i1 in 0..8 {
                let a = f.at(i1, i2);
                let b = fine.at(2 * i1, 2 * i2);
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
