//! Reproducible noise ensembles: spectral white noise, its mollification by
//! the model's own smoothing semigroup, and a non-Gaussian lattice
//! approximation in the spectral-gap class.
//!
//! White noise is sampled shell by shell in mode space (shells ordered by
//! `max(|m1|, |m2|)`, fixed order within a shell, one canonical
//! representative per conjugate pair). Two square grids consuming the same
//! seed therefore agree on every shared shell, so a realization refines
//! consistently when the resolution doubles. All unpaired highest modes are
//! left empty.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::ops;
use crate::spectrum::Spectrum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-sample generator: `(seed, index)` fully determines
/// the stream, and distinct indices get decorrelated streams.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(index)))
}

fn draw_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// White-noise spectrum: unit-variance coefficients on every retained mode,
/// conjugate-symmetric, empty unpaired highest modes, real mean mode.
pub fn white_spectrum(grid: Grid, rng: &mut ChaCha8Rng) -> Spectrum {
    let mut spec = Spectrum::zeros(grid);
    spec.data_mut()[0] = Complex64::new(draw_normal(rng), 0.0);
    let max1 = (grid.n1() / 2) as i64 - 1;
    let max2 = (grid.n2() / 2) as i64 - 1;
    let rmax = max1.max(max2);
    for r in 1..=rmax {
        for m1 in -r..=r {
            for m2 in -r..=r {
                if m1.abs().max(m2.abs()) != r {
                    continue;
                }
                if !(m1 > 0 || (m1 == 0 && m2 > 0)) {
                    continue;
                }
                if m1 > max1 || m2.abs() > max2 || m1.abs() > max1 {
                    continue;
                }
                let a = draw_normal(rng);
                let b = draw_normal(rng);
                let c = Complex64::new(a, b) * SQRT_HALF;
                let idx = grid.mode_index(m1, m2);
                spec.data_mut()[idx] = c;
                let jdx = grid.mode_index(-m1, -m2);
                spec.data_mut()[jdx] = c.conj();
            }
        }
    }
    spec
}

/// One white-noise realization as a real field.
pub fn sample_white(grid: Grid, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    white_spectrum(grid, &mut rng).to_field()
}

/// Odd transforms for the non-Gaussian lattice ensemble, rescaled so the
/// image of a standard normal has unit variance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformId {
    /// `T(z) = c (z - sin(z)/2)`, smooth and manifestly non-Gaussian;
    /// `c = 1/sqrt(1 - e^{-1/2} + (1 - e^{-2})/8)` for unit variance,
    /// derivative inside `[c/2, 3c/2]`.
    SinShift,
    /// `T(z) = z`, the Gaussian control.
    Identity,
}

impl TransformId {
    /// Normalizer for `SinShift`.
    fn sin_shift_scale() -> f64 {
        let var = 1.0 - (-0.5f64).exp() + (1.0 - (-2.0f64).exp()) / 8.0;
        1.0 / var.sqrt()
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            TransformId::SinShift => Self::sin_shift_scale() * (z - 0.5 * z.sin()),
            TransformId::Identity => z,
        }
    }

    /// Documented sup bound on |T'|.
    pub fn derivative_bound(&self) -> f64 {
        match self {
            TransformId::SinShift => 1.5 * Self::sin_shift_scale(),
            TransformId::Identity => 1.0,
        }
    }

    /// Numerical construction-time validation on a 1-d grid: oddness, the
    /// documented derivative envelope, and unit output variance under a
    /// standard normal.
    pub fn validate(&self) -> Result<()> {
        let bound = self.derivative_bound();
        let n = 4001;
        let zmax = 8.0;
        let dz = 2.0 * zmax / (n - 1) as f64;
        let mut var = 0.0;
        for i in 0..n {
            let z = -zmax + i as f64 * dz;
            let odd = (self.eval(z) + self.eval(-z)).abs();
            if odd > 1e-12 * (1.0 + self.eval(z).abs()) {
                return Err(Error::InvalidParameter {
                    name: "transform_id",
                    reason: format!("{self:?} is not odd at z = {z}"),
                });
            }
            let deriv = (self.eval(z + 1e-6) - self.eval(z - 1e-6)) / 2e-6;
            if deriv.abs() > bound + 1e-4 {
                return Err(Error::InvalidParameter {
                    name: "transform_id",
                    reason: format!("{self:?} derivative {deriv} exceeds bound {bound}"),
                });
            }
            let g = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
            var += self.eval(z).powi(2) * g * dz;
        }
        if (var - 1.0).abs() > 1e-3 {
            return Err(Error::InvalidParameter {
                name: "transform_id",
                reason: format!("{self:?} output variance {var} is not 1"),
            });
        }
        Ok(())
    }
}

/// Which approximation family an ensemble draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    White,
    GaussianMollified,
    NongaussianLattice,
}

/// A fully specified, reproducible noise ensemble.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub grid: Grid,
    /// Approximation scale; 0 means none (plain white noise).
    pub ell: f64,
    pub transform_id: TransformId,
    pub seed: u64,
    pub sample_count: usize,
}

impl EnsembleSpec {
    pub fn new(
        kind: EnsembleKind,
        grid: Grid,
        ell: f64,
        transform_id: TransformId,
        seed: u64,
        sample_count: usize,
    ) -> Result<EnsembleSpec> {
        if !(ell >= 0.0 && ell.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "ell",
                reason: format!("must be finite and nonnegative, got {ell}"),
            });
        }
        if kind == EnsembleKind::White && ell != 0.0 {
            return Err(Error::InvalidParameter {
                name: "ell",
                reason: format!("white noise has no approximation scale, got {ell}"),
            });
        }
        if sample_count == 0 {
            return Err(Error::InvalidParameter {
                name: "sample_count",
                reason: "must be positive".into(),
            });
        }
        if kind == EnsembleKind::NongaussianLattice {
            transform_id.validate()?;
            let (m1, m2) = lattice_cells(grid, ell)?;
            let _ = (m1, m2);
        }
        Ok(EnsembleSpec { kind, grid, ell, transform_id, seed, sample_count })
    }

    pub fn white(grid: Grid, seed: u64, sample_count: usize) -> EnsembleSpec {
        EnsembleSpec::new(EnsembleKind::White, grid, 0.0, TransformId::SinShift, seed, sample_count)
            .expect("white spec is always valid")
    }

    /// Draw sample `index`; deterministic in `(seed, index)`.
    pub fn sample(&self, index: usize) -> Result<Field> {
        if index >= self.sample_count {
            return Err(Error::InvalidParameter {
                name: "index",
                reason: format!("{index} out of range, sample_count = {}", self.sample_count),
            });
        }
        let mut rng = sample_rng(self.seed, index as u64);
        match self.kind {
            EnsembleKind::White => Ok(white_spectrum(self.grid, &mut rng).to_field()),
            EnsembleKind::GaussianMollified => {
                let white = white_spectrum(self.grid, &mut rng).to_field();
                if self.ell == 0.0 {
                    Ok(white)
                } else {
                    ops::smooth(&white, self.ell.powi(3))
                }
            }
            EnsembleKind::NongaussianLattice => {
                let (m1, m2) = lattice_cells(self.grid, self.ell)?;
                Ok(lattice_sample(self.grid, m1, m2, self.transform_id, &mut rng))
            }
        }
    }
}

fn lattice_cells(grid: Grid, ell: f64) -> Result<(usize, usize)> {
    if ell <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "ell",
            reason: format!("lattice ensemble needs a positive scale, got {ell}"),
        });
    }
    let cells = (1.0 / ell).round().max(1.0) as usize;
    if cells > grid.n1() {
        return Err(Error::LatticeTooFine { cells, n: grid.n1(), axis: 1 });
    }
    if cells > grid.n2() {
        return Err(Error::LatticeTooFine { cells, n: grid.n2(), axis: 2 });
    }
    Ok((cells, cells))
}

/// Piecewise-constant lattice noise: iid transformed normals per cell,
/// scaled by `sqrt(M1 M2)` so linear functionals have white-noise variance
/// in the fine-cell limit, sampled onto the grid and projected.
fn lattice_sample(
    grid: Grid,
    m1: usize,
    m2: usize,
    transform: TransformId,
    rng: &mut ChaCha8Rng,
) -> Field {
    let amp = ((m1 * m2) as f64).sqrt();
    let mut cells = vec![0.0; m1 * m2];
    for c in &mut cells {
        *c = transform.eval(draw_normal(rng)) * amp;
    }
    let mut out = Field::zeros(grid);
    for i2 in 0..grid.n2() {
        let c2 = i2 * m2 / grid.n2();
        for i1 in 0..grid.n1() {
            let c1 = i1 * m1 / grid.n1();
            out.data_mut()[grid.index(i1, i2)] = cells[c2 * m1 + c1];
        }
    }
    ops::project(&out)
}

/// Deterministic real field band-limited to `|m1|, |m2| <= band`, with iid
/// uniform coefficients on canonical modes. Used for test corpora and
/// study corpora; not a noise model.
pub fn random_band_limited(grid: Grid, band: i64, rng: &mut ChaCha8Rng) -> Field {
    assert!(band >= 0 && band < (grid.n1() / 2) as i64 && band < (grid.n2() / 2) as i64);
    let mut spec = Spectrum::zeros(grid);
    for m1 in -band..=band {
        for m2 in -band..=band {
            if !(m1 > 0 || (m1 == 0 && m2 > 0)) {
                continue;
            }
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            spec.data_mut()[grid.mode_index(m1, m2)] = c;
            spec.data_mut()[grid.mode_index(-m1, -m2)] = c.conj();
        }
    }
    spec.to_field()
}

/// Like [`random_band_limited`] but with vanishing x1-average (no k1 = 0
/// modes), the natural corpus for perturbations `w`.
pub fn random_band_limited_p(grid: Grid, band: i64, rng: &mut ChaCha8Rng) -> Field {
    ops::project(&random_band_limited(grid, band, rng))
}
