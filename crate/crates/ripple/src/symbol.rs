//! Fourier multipliers used throughout the crate.
//!
//! A symbol odd in `k_j` zeroes the unpaired highest mode along axis `j`,
//! since that mode has no conjugate partner and an odd imaginary multiplier
//! would otherwise break conjugate symmetry of real fields. Even symbols
//! act on the full mode set.

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;
use num_complex::Complex64;

/// Relative tolerance for the k1 = 0 content check of negative powers.
pub const ZERO_MODE_TOL: f64 = 1e-10;

/// The multiplier operators of the model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symbol {
    /// `∂₁`, symbol `i k₁` (odd in k₁).
    D1,
    /// `∂₂`, symbol `i k₂` (odd in k₂).
    D2,
    /// Hilbert transform in x₁, symbol `i sgn(k₁)`, annihilating k₁ = 0.
    R1,
    /// `|∂₁|^s`, symbol `|k₁|^s`. For `s < 0` the k₁ = 0 line must be
    /// empty; the line is annihilated in the output either way.
    AbsD1(f64),
    /// `|∂₂|^s`, symbol `|k₂|^s`; `s > 0` only (k₂ = 0 maps to 0).
    AbsD2(f64),
    /// Projection `P` onto vanishing x₁-average (zeroes the k₁ = 0 line).
    Project,
    /// The anisotropic elliptic operator `𝓛 = -∂₁² - |∂₁|⁻¹∂₂²` composed
    /// with `P`: symbol `k₁² + k₂²/|k₁|` off k₁ = 0, zero on it.
    LinearOp,
    /// Inverse of `𝓛` on the range of `P`: symbol `1/(k₁² + k₂²/|k₁|)`
    /// off k₁ = 0, zero on it.
    LinearSolve,
    /// `𝓐 = |∂₁|³ - ∂₂²`, symbol `|k₁|³ + k₂²`.
    Dissipation,
    /// Smoothing semigroup member `ψ_T`, symbol `exp(-T(|k₁|³ + k₂²))`.
    Smooth(f64),
}

impl Symbol {
    /// True when the multiplier is odd as a function of k1.
    pub fn odd_in_k1(&self) -> bool {
        matches!(self, Symbol::D1 | Symbol::R1)
    }

    /// True when the multiplier is odd as a function of k2.
    pub fn odd_in_k2(&self) -> bool {
        matches!(self, Symbol::D2)
    }

    /// Multiplier value at wavenumbers `(k1, k2)`; Nyquist handling is done
    /// by the caller through the parity flags.
    pub(crate) fn eval(&self, k1: f64, k2: f64) -> Complex64 {
        match *self {
            Symbol::D1 => Complex64::new(0.0, k1),
            Symbol::D2 => Complex64::new(0.0, k2),
            Symbol::R1 => Complex64::new(0.0, k1.signum() * f64::from(k1 != 0.0)),
            Symbol::AbsD1(s) => {
                if k1 == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(k1.abs().powf(s), 0.0)
                }
            }
            Symbol::AbsD2(s) => {
                if k2 == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(k2.abs().powf(s), 0.0)
                }
            }
            Symbol::Project => Complex64::new(f64::from(k1 != 0.0), 0.0),
            Symbol::LinearOp => {
                if k1 == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(k1 * k1 + k2 * k2 / k1.abs(), 0.0)
                }
            }
            Symbol::LinearSolve => {
                if k1 == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(1.0 / (k1 * k1 + k2 * k2 / k1.abs()), 0.0)
                }
            }
            Symbol::Dissipation => Complex64::new(k1.abs().powi(3) + k2 * k2, 0.0),
            Symbol::Smooth(t) => Complex64::new((-t * (k1.abs().powi(3) + k2 * k2)).exp(), 0.0),
        }
    }

    /// Validate symbol-specific preconditions against the operand.
    fn check(&self, spec: &Spectrum) -> Result<()> {
        match *self {
            Symbol::AbsD1(s) if s < 0.0 => {
                let content = spec.k1_zero_content();
                if content > ZERO_MODE_TOL {
                    return Err(Error::ZeroModeContent { order: s, content });
                }
                Ok(())
            }
            Symbol::Smooth(t) if t <= 0.0 || !t.is_finite() => Err(Error::NonpositiveScale(t)),
            _ => Ok(()),
        }
    }

    /// Apply the multiplier to a spectrum.
    pub fn apply(&self, spec: &Spectrum) -> Result<Spectrum> {
        self.check(spec)?;
        let grid = spec.grid();
        let mut out = Spectrum::zeros(grid);
        let kill1 = self.odd_in_k1();
        let kill2 = self.odd_in_k2();
        for i2 in 0..grid.n2() {
            let k2 = grid.k2(i2);
            let ny2 = grid.is_nyquist2(i2);
            for i1 in 0..grid.n1() {
                let idx = grid.index(i1, i2);
                let c = spec.data()[idx];
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                if (kill1 && grid.is_nyquist1(i1)) || (kill2 && ny2) {
                    continue;
                }
                out.data_mut()[idx] = c * self.eval(grid.k1(i1), k2);
            }
        }
        Ok(out)
    }
}
