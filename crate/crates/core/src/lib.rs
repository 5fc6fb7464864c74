//! Stable recovery of complex polynomials from phaseless samples on the unit
//! circle.
//!
//! A polynomial `f` of degree bound `d` is measured through `8d - 4` real
//! numbers: the squared magnitudes `|f|^2` at the `(2d-1)`-st roots of unity
//! and `|f + nu^j f'|^2` at the same points for the three cube roots of
//! unity `nu^j`. Those determine `f` up to one global unimodular constant —
//! the constant itself is invisible to any magnitude — and this crate
//! reconstructs it:
//!
//! 1. **Interpolation** ([`trig_interp`]): the samples pin down the
//!    trigonometric polynomials `G0 = |f|^2` and, after polarizing the three
//!    shifted squares, `G1 = f' conj(f)` on the circle.
//! 2. **Moments** ([`recovery`]): contour integrals of `z^k G1/G0` count and
//!    locate the roots of `f` inside the unit disk through their power sums.
//! 3. **Factors**: Newton's identities turn power sums into the monic inner
//!    factor; the substitution `z^{d-1} f(1/z)` reflects the outer roots
//!    inside, where the same machinery picks them up.
//! 4. **Normalization**: the product of the factors is rescaled to the norm
//!    that the magnitude samples dictate.
//!
//! The same module quantifies stability: explicit constants `alpha`, `beta`,
//! and a per-measurement noise radius `epsilon0` below which the root counts
//! are provably correct and every moment error is bounded by an explicit
//! linear function `gamma` of the noise, plus the growth constants of
//! Newton's identities.
//!
//! [`measurements`] holds the sampling designs — the `8d - 4` recovery
//! design above and a `4d - 4` design that separates signals pairwise
//! (evaluation points on a Möbius-transformed circle) without an attached
//! reconstruction algorithm. [`experiments`] has reproducible noise sweeps
//! and empirical injectivity checks; [`cli`] exposes all of it as commands.

pub mod cli;
pub mod error;
pub mod experiments;
mod extended;
pub mod measurements;
pub mod polynomial;
pub mod recovery;
mod serde_util;
pub mod trig_interp;

pub use error::{Error, Result};
pub use measurements::{
    cayley_transform, measure, measure_4d4, polarize, InjectivityDesign, MeasurementSet,
    NoiseDistribution, NoiseSpec,
};
pub use polynomial::{error_up_to_phase, CircleBounds, PhaseAlignment, Poly, RootSet};
pub use recovery::{
    bounds_for, moments_from_ratio, moments_from_ratio_cfg, newton_coeffs, newton_error_constants,
    recover, recover_inner, recover_outer, stability_bounds, MomentEstimate, RecoveredSignal,
    RecoveryConfig, RecoveryDiagnostics, StabilityBounds,
};
pub use trig_interp::{dirichlet_kernel, parseval_norm, ParsevalNorm, TrigPoly};
