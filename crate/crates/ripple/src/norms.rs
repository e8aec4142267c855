//! Numerical estimators of the anisotropic norms: heat-kernel Hölder
//! seminorms (both signs), directional Besov seminorms, `L^p` norms, the
//! `|||·|||_s` family, and the harmonic energy.
//!
//! Hölder estimators scan dyadic smoothing scales only and therefore report
//! a lower bound of the continuum supremum with relative gap at most
//! `2^{|exponent|/3}`; every consumer works with scaling exponents or ratio
//! stability, never with absolute constants.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::ops;
use serde::Serialize;

/// Guard band around critical exponents.
pub const CRITICAL_GUARD: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    HolderPos,
    HolderNeg,
    Besov,
    Lp,
    Hnorm,
    Harmonic,
}

impl NormKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormKind::HolderPos => "holder_pos",
            NormKind::HolderNeg => "holder_neg",
            NormKind::Besov => "besov",
            NormKind::Lp => "lp",
            NormKind::Hnorm => "hnorm",
            NormKind::Harmonic => "harmonic",
        }
    }
}

/// What the estimator actually scanned.
#[derive(Clone, Debug, Serialize)]
pub enum ScanRecord {
    /// Dyadic smoothing scales from `t_max` down to `t_min`.
    DyadicT { t_min: f64, t_max: f64, count: usize },
    /// Lattice shifts along one axis.
    LatticeH { count: usize },
    /// Single Parseval sum, no scan.
    Spectral,
}

/// Result of one norm estimation, carrying enough context to reproduce it.
#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    pub kind: NormKind,
    pub value: f64,
    /// Primary exponent (alpha, beta, or s); unused for plain `L^p`.
    pub exponent: Option<f64>,
    /// Integrability parameter where applicable.
    pub p: Option<f64>,
    /// Axis for directional estimators.
    pub axis: Option<u8>,
    pub scan: ScanRecord,
    pub grid: (usize, usize),
}

impl NormEstimate {
    pub const CSV_HEADER: &'static str = "kind,exponent,p,axis,value,scan,n1,n2";

    pub fn csv_row(&self) -> String {
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        let scan = match &self.scan {
            ScanRecord::DyadicT { t_min, t_max, count } => {
                format!("T[{t_min:.3e}..{t_max:.3e}]x{count}")
            }
            ScanRecord::LatticeH { count } => format!("h x{count}"),
            ScanRecord::Spectral => "spectral".to_string(),
        };
        format!(
            "{},{},{},{},{:.17e},{},{},{}",
            self.kind.as_str(),
            fmt_opt(self.exponent),
            fmt_opt(self.p),
            self.axis.map(|a| a.to_string()).unwrap_or_default(),
            self.value,
            scan,
            self.grid.0,
            self.grid.1,
        )
    }
}

/// Carnot-Caratheodory distance `|x1-y1| + |x2-y2|^{2/3}` with both
/// coordinate differences reduced to torus representatives in [-1/2, 1/2].
pub fn cc_distance(x: (f64, f64), y: (f64, f64)) -> f64 {
    let wrap = |d: f64| (d - d.round()).abs();
    let d1 = wrap(x.0 - y.0);
    let d2 = wrap(x.1 - y.1);
    d1 + d2.powf(2.0 / 3.0)
}

/// Dyadic smoothing scales admissible at this resolution: `T = 2^{-n}`,
/// `0 <= n <= n_max`, where `T^{1/3}` must still cover two grid cells in
/// x1 and the matching anisotropic ball in x2.
pub fn dyadic_t_grid(grid: Grid) -> Vec<f64> {
    let cap = (grid.n1() as f64).min((grid.n2() as f64).powf(2.0 / 3.0)) / 2.0;
    let n_max = (3.0 * cap.log2() + 1e-9).floor().max(0.0) as i32;
    (0..=n_max).map(|n| 0.5f64.powi(n)).collect()
}

fn guard(value: f64, critical: &[f64], label: &'static str) -> Result<()> {
    for &c in critical {
        if (value - c).abs() < CRITICAL_GUARD {
            return Err(Error::CriticalExponent {
                value,
                critical: critical.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
                guard: CRITICAL_GUARD,
            });
        }
    }
    let _ = label;
    Ok(())
}

/// Negative-exponent Hölder seminorm `[f]_β`, `β` in (-3/2, 0), via the
/// heat-kernel characterization: max over dyadic T of
/// `(T^{1/3})^{-β} ||f_T||_∞`.
pub fn holder_neg(f: &Field, beta: f64) -> Result<NormEstimate> {
    if !(-1.5 < beta && beta < 0.0) {
        return Err(Error::ExponentRange { kind: "holder_neg", value: beta, range: "(-3/2, 0)" });
    }
    guard(beta, &[-1.0, -0.5], "holder_neg")?;
    let ts = dyadic_t_grid(f.grid());
    let mut value = 0.0f64;
    for &t in &ts {
        let smoothed = ops::smooth(f, t)?;
        value = value.max(t.powf(-beta / 3.0) * smoothed.max_abs());
    }
    Ok(NormEstimate {
        kind: NormKind::HolderNeg,
        value,
        exponent: Some(beta),
        p: None,
        axis: None,
        scan: ScanRecord::DyadicT {
            t_min: *ts.last().unwrap(),
            t_max: ts[0],
            count: ts.len(),
        },
        grid: (f.grid().n1(), f.grid().n2()),
    })
}

/// Positive-exponent Hölder seminorm `[f]_α`, `α` in (0, 3/2) away from 1,
/// via `max_T (T^{1/3})^{-α} T ||𝓐 f_T||_∞` after removing the mean.
pub fn holder_pos(f: &Field, alpha: f64) -> Result<NormEstimate> {
    if !(0.0 < alpha && alpha < 1.5) {
        return Err(Error::ExponentRange { kind: "holder_pos", value: alpha, range: "(0, 3/2)" });
    }
    guard(alpha, &[1.0], "holder_pos")?;
    let mut centered = f.clone();
    let mean = centered.mean();
    for v in centered.data_mut() {
        *v -= mean;
    }
    let ts = dyadic_t_grid(f.grid());
    let mut value = 0.0f64;
    for &t in &ts {
        let smoothed = ops::smooth(&centered, t)?;
        let af = ops::dissipation(&smoothed);
        value = value.max(t.powf(-alpha / 3.0) * t * af.max_abs());
    }
    Ok(NormEstimate {
        kind: NormKind::HolderPos,
        value,
        exponent: Some(alpha),
        p: None,
        axis: None,
        scan: ScanRecord::DyadicT {
            t_min: *ts.last().unwrap(),
            t_max: ts[0],
            count: ts.len(),
        },
        grid: (f.grid().n1(), f.grid().n2()),
    })
}

/// Directional Besov seminorm: `sup_h h^{-s} ||∂_j^h f||_p` over exact
/// lattice shifts `h = m/N_j`, `1 <= m <= N_j`.
pub fn besov(f: &Field, s: f64, p: f64, axis: u8) -> Result<NormEstimate> {
    if !(0.0 < s && s <= 1.0) {
        return Err(Error::ExponentRange { kind: "besov", value: s, range: "(0, 1]" });
    }
    if !(p >= 1.0) {
        return Err(Error::ExponentRange { kind: "besov p", value: p, range: "[1, inf]" });
    }
    if axis != 1 && axis != 2 {
        return Err(Error::InvalidParameter {
            name: "axis",
            reason: format!("must be 1 or 2, got {axis}"),
        });
    }
    let n = if axis == 1 { f.grid().n1() } else { f.grid().n2() };
    let mut value = 0.0f64;
    for m in 1..=n {
        let h = m as f64 / n as f64;
        let shifted = if axis == 1 {
            f.shift_cells(m as i64, 0)
        } else {
            f.shift_cells(0, m as i64)
        };
        let diff = shifted.sub(f)?;
        value = value.max(h.powf(-s) * lp_norm(&diff, p)?);
    }
    Ok(NormEstimate {
        kind: NormKind::Besov,
        value,
        exponent: Some(s),
        p: Some(p),
        axis: Some(axis),
        scan: ScanRecord::LatticeH { count: n },
        grid: (f.grid().n1(), f.grid().n2()),
    })
}

/// `L^p` norm by rectangle quadrature; `p = inf` gives the max norm.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(f.max_abs());
    }
    if !(p >= 1.0) {
        return Err(Error::ExponentRange { kind: "lp", value: p, range: "[1, inf]" });
    }
    let sum: f64 = f.data().iter().map(|v| v.abs().powf(p)).sum();
    Ok((sum * f.grid().cell()).powf(1.0 / p))
}

/// `|||f|||_s`: the norm adapted to the harmonic energy,
/// `(Σ |k1|^{2s} |f̂|² + Σ_{k1≠0} |k1|^{-s} |k2|^{2s} |f̂|²)^{1/2}`.
pub fn hnorm(f: &Field, s: f64) -> Result<NormEstimate> {
    if !(s > 0.0) {
        return Err(Error::ExponentRange { kind: "hnorm", value: s, range: "(0, inf)" });
    }
    let spec = f.to_spectrum();
    let content = spec.k1_zero_content();
    if content > crate::symbol::ZERO_MODE_TOL {
        return Err(Error::ZeroModeContent { order: -s / 2.0, content });
    }
    let grid = f.grid();
    let sum = spec.weighted_energy(|i1, i2| {
        let k1 = grid.k1(i1).abs();
        if k1 == 0.0 {
            return 0.0;
        }
        let k2 = grid.k2(i2).abs();
        k1.powf(2.0 * s) + k1.powf(-s) * k2.powf(2.0 * s)
    });
    Ok(NormEstimate {
        kind: NormKind::Hnorm,
        value: sum.sqrt(),
        exponent: Some(s),
        p: None,
        axis: None,
        scan: ScanRecord::Spectral,
        grid: (grid.n1(), grid.n2()),
    })
}

/// Harmonic energy `𝓗(f) = ∫(∂₁f)² + ∫(|∂₁|^{-1/2}∂₂f)² = |||f|||_1²`.
pub fn harmonic_energy(f: &Field) -> Result<f64> {
    Ok(hnorm(f, 1.0)?.value.powi(2))
}
