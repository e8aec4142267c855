//! Field-level spectral operators: derivatives, Hilbert transform,
//! fractional powers, the elliptic solve, smoothing, and dealiased products.

use crate::error::Result;
use crate::field::Field;
use crate::symbol::Symbol;

fn apply(sym: Symbol, f: &Field) -> Result<Field> {
    Ok(sym.apply(&f.to_spectrum())?.to_field())
}

/// `∂₁ f`.
pub fn d1(f: &Field) -> Field {
    apply(Symbol::D1, f).expect("d1 has no preconditions")
}

/// `∂₂ f`.
pub fn d2(f: &Field) -> Field {
    apply(Symbol::D2, f).expect("d2 has no preconditions")
}

/// Hilbert transform `R₁ f` in x1.
pub fn r1(f: &Field) -> Field {
    apply(Symbol::R1, f).expect("r1 has no preconditions")
}

/// Projection `P f` onto vanishing average in x1.
pub fn project(f: &Field) -> Field {
    apply(Symbol::Project, f).expect("projection has no preconditions")
}

/// Fractional derivative `|∂₁|^s f`. Negative `s` requires vanishing
/// k1 = 0 content of `f`.
pub fn frac_d1(f: &Field, s: f64) -> Result<Field> {
    apply(Symbol::AbsD1(s), f)
}

/// `|∂₂|^s f` for `s > 0`.
pub fn frac_d2(f: &Field, s: f64) -> Result<Field> {
    apply(Symbol::AbsD2(s), f)
}

/// Smoothing semigroup `f_T = ψ_T * f`; `t` must be strictly positive.
pub fn smooth(f: &Field, t: f64) -> Result<Field> {
    apply(Symbol::Smooth(t), f)
}

/// `𝓐 f = (|∂₁|³ - ∂₂²) f`, the semigroup generator.
pub fn dissipation(f: &Field) -> Field {
    apply(Symbol::Dissipation, f).expect("dissipation has no preconditions")
}

/// `𝓛 f` with the projection built in (the k1 = 0 line maps to zero).
pub fn apply_linear(f: &Field) -> Field {
    apply(Symbol::LinearOp, f).expect("linear operator has no preconditions")
}

/// Solve `𝓛 v = P ξ` for the unique v with vanishing x1-average.
pub fn solve_linear(xi: &Field) -> Field {
    apply(Symbol::LinearSolve, xi).expect("linear solve has no preconditions")
}

/// Dealiased pointwise product on the doubled grid: both factors are
/// zero-padded, multiplied in physical space, and folded back. For factors
/// whose combined bandwidth fits the doubled grid this is the exact
/// projection of the true product onto the base modes.
pub fn dealiased_product(f: &Field, g: &Field) -> Result<Field> {
    f.grid().same_as(&g.grid())?;
    let ff = f.to_spectrum().pad_double().to_field();
    let gf = g.to_spectrum().pad_double().to_field();
    let mut prod = ff;
    for (a, b) in prod.data_mut().iter_mut().zip(gf.data().iter()) {
        *a *= b;
    }
    Ok(prod.to_spectrum().fold_halve().to_field())
}

/// Dealiased square, `Π(f, f)`.
pub fn dealiased_square(f: &Field) -> Field {
    dealiased_product(f, f).expect("same grid by construction")
}

/// Adjoint of the dealiased product in its second slot:
/// `⟨Π(a, b), c⟩ = ⟨b, Π†(a, c)⟩` exactly, for all inputs. Each of the
/// three stages of Π is replaced by its exact adjoint: c enters through
/// the adjoint of the folding truncation, and the result leaves through
/// the adjoint of the zero-padding. Π† coincides with `Π(a, c)` whenever
/// neither c nor the padded product carries content at or above the
/// unpaired highest modes.
pub fn dealiased_product_adjoint(a: &Field, c: &Field) -> Result<Field> {
    a.grid().same_as(&c.grid())?;
    let af = a.to_spectrum().pad_double().to_field();
    let cf = c.to_spectrum().pad_double_full().to_field();
    let mut prod = af;
    for (x, y) in prod.data_mut().iter_mut().zip(cf.data().iter()) {
        *x *= y;
    }
    Ok(prod.to_spectrum().fold_halve_adjoint().to_field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    use crate::noise::random_band_limited;

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.data()
            .iter()
            .zip(b.data().iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn product_matches_refined_grid_oracle() {
        // Oracle: compute the same product on a 4x refined grid, where it is
        // exact by bandwidth, then compare coefficients on the shared band.
        let g = Grid::square(16).unwrap();
        let fine = Grid::square(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let band = 3i64; // band-limited to N/4 - 1
        let f = random_band_limited(g, band, &mut rng);
        let h = random_band_limited(g, band, &mut rng);
        // Same functions on the fine grid.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let ff = random_band_limited(fine, band, &mut rng);
        let hf = random_band_limited(fine, band, &mut rng);

        let coarse_prod = dealiased_product(&f, &h).unwrap().to_spectrum();
        let mut exact = Field::zeros(fine);
        for (o, (a, b)) in exact
            .data_mut()
            .iter_mut()
            .zip(ff.data().iter().zip(hf.data().iter()))
        {
            *o = a * b;
        }
        let exact = exact.to_spectrum();
        let mut worst = 0.0f64;
        for m1 in -8i64..8 {
            for m2 in -8i64..8 {
                let a = coarse_prod.data()[g.mode_index(m1, m2)];
                let b = exact.data()[fine.mode_index(m1, m2)];
                worst = worst.max((a - b).norm());
            }
        }
        assert!(worst < 1e-10, "dealiased product error {worst}");
    }

    #[test]
    fn square_of_sin_is_exact() {
        let g = Grid::square(16).unwrap();
        let f = Field::from_fn(g, |x1, _| (2.0 * PI * x1).sin());
        let sq = dealiased_square(&f);
        let exact = Field::from_fn(g, |x1, _| 0.5 - 0.5 * (4.0 * PI * x1).cos());
        assert!(max_diff(&sq, &exact) < 1e-13);
    }

    #[test]
    fn product_is_self_adjoint_in_discrete_pairing() {
        let g = Grid::square(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_band_limited(g, 3, &mut rng);
        let gg = random_band_limited(g, 3, &mut rng);
        let h = random_band_limited(g, 3, &mut rng);
        let lhs = dealiased_product(&f, &gg).unwrap().inner(&h).unwrap();
        let rhs = gg.inner(&dealiased_product(&f, &h).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn product_adjoint_identity_holds_for_full_band_inputs() {
        // Raw gridpoint noise populates every mode including the unpaired
        // highest ones, where the plain product is no longer its own adjoint
        // but Π† is.
        use rand::Rng;
        let g = Grid::square(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut draw = || {
            let mut f = Field::zeros(g);
            for v in f.data_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            f
        };
        let f = draw();
        let b = draw();
        let c = draw();
        let lhs = dealiased_product(&f, &b).unwrap().inner(&c).unwrap();
        let rhs = b.inner(&dealiased_product_adjoint(&f, &c).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn solve_linear_gives_mean_x1_zero() {
        let g = Grid::square(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xi = random_band_limited(g, 7, &mut rng);
        let v = solve_linear(&xi);
        v.require_mean_x1_zero().unwrap();
        let lv = apply_linear(&v);
        let pxi = project(&xi);
        assert!(max_diff(&lv, &pxi) < 1e-10 * pxi.max_abs().max(1.0));
    }
}
