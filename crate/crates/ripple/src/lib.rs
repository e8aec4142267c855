//! Pseudo-spectral laboratory for a renormalized variational problem on the
//! flat 2-torus `[0,1)^2`.
//!
//! The crate builds up, layer by layer:
//!
//! * [`grid`], [`field`], [`spectrum`]: real fields on a periodic grid and
//!   their Fourier representation, with the quadrature conventions
//!   `f̂(k) = Σ_x f(x) e^{-ik·x} Δ₁Δ₂` and `f(x) = Σ_k f̂(k) e^{ik·x}`.
//! * [`symbol`], [`ops`]: Fourier multipliers (derivatives, Hilbert
//!   transform, fractional `|∂₁|^s`, the anisotropic operator `𝓛` and its
//!   smoothing semigroup) plus dealiased products on a doubled grid.
//! * [`norms`]: numerical estimators of anisotropic Hölder and Besov norms,
//!   `L^p` norms, and the harmonic energy.
//! * [`noise`]: reproducible white-noise sampling and its mollified and
//!   lattice approximations.
//! * [`energy`]: the Burgers operator, anharmonic energy, remainder terms,
//!   renormalized energy, Euler-Lagrange residual, and the construction of
//!   the renormalized forcing `F`.
//! * [`minimize`]: semi-implicit gradient descent for the renormalized
//!   energy and regularity diagnostics of minimizers.
//! * [`studies`]: named Monte-Carlo experiments with fitted scaling
//!   exponents and independent oracles.
//! * [`config`], [`io`]: run configuration, the `RIPL` field format, CSV
//!   reports, and manifests.

pub mod config;
pub mod energy;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod minimize;
pub mod noise;
pub mod norms;
pub mod ops;
pub mod spectrum;
pub mod stats;
pub mod studies;
pub mod symbol;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::Grid;
pub use spectrum::Spectrum;
