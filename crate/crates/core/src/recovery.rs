//! Signal recovery from polarized magnitude data, plus the stability
//! constants that say when it is guaranteed to work.
//!
//! The pipeline splits the unknown polynomial `f` at the unit circle. On
//! clean data the ratio of the two polarized circle functions is
//! `G1/G0 = f'/f`, so contour integrals of `z^k G1/G0` over the circle return
//! the power sums of exactly the roots inside the open disk. Newton's
//! identities convert those power sums into the monic inner factor. The outer
//! factor is pulled in through the substitution `g(z) = z^{d-1} f(1/z)`,
//! which reflects outer roots inside without touching magnitudes on the
//! circle: the transformed data for `g` is assembled pointwise from `G0` and
//! `G1`, the same inner machinery runs, and reversing the result's
//! coefficients undoes the substitution. The product of both factors is then
//! rescaled to the measured norm. Everything is determined only up to a
//! global unimodular constant, which magnitudes cannot see.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{CircleGrid, SampledCircle};
use crate::measurements::{polarize, MeasurementSet};
use crate::polynomial::{CircleBounds, Poly};
use crate::trig_interp::{parseval_norm, TrigPoly};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tuning knobs for the moment quadrature and root counting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    /// Starting quadrature node count; 0 derives it from bandwidth and the
    /// highest requested moment (at least `8 * (bandwidth + kmax)`).
    pub start_nodes: usize,
    /// Hard ceiling for the node-doubling refinement.
    pub max_nodes: usize,
    /// Refinement stops when successive zeroth moments agree this closely.
    pub mu0_tol: f64,
    /// Accepted distance of the zeroth moment from the nearest integer;
    /// anything farther is reported as an ambiguous root count.
    pub n0_threshold: f64,
    /// Minimum admissible value of the magnitude data at a quadrature node;
    /// at or below it the signal is declared too small (a root sits on or
    /// numerically near the circle and the ratio cannot be trusted).
    pub g0_floor: f64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            start_nodes: 0,
            max_nodes: 1 << 20,
            mu0_tol: 1e-12,
            // Half would match the counting guarantee exactly; the tighter
            // default margins quadrature error on top of the analytic bound.
            n0_threshold: 0.25,
            // Squared floor on the signal's circle minimum (1e-6 in |f|).
            g0_floor: 1e-12,
        }
    }
}

/// Estimated root power sums `mu[k] = sum z_j^k` over the roots inside the
/// unit disk, with the rounded count and its rounding residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    /// `mu[0..=kmax]`, with `mu[0]` the (pre-rounding) root count.
    #[serde(with = "crate::serde_util::complex_vec")]
    pub mu: Vec<Complex64>,
    /// Nearest non-negative integer to `Re(mu[0])`.
    pub n0: usize,
    /// Distance of `mu[0]` from that integer.
    pub n0_residual: f64,
    /// Quadrature nodes the refinement settled on.
    pub nodes_used: usize,
}

/// Conditioning constants of a signal on the unit circle and the noise radii
/// they certify. `m <= |f| <= M` and `|f'| <= Mp` on the circle feed straight
/// into the guarantees:
///
/// * perturbations of `(G1, G0)` up to `eps < alpha * m^2` keep every moment
///   within `gamma(eps)`, and the root count rounds correctly;
/// * `beta` is the same constant for the reversed polynomial, whose
///   derivative bound is at worst `(d-1)M + Mp`;
/// * `epsilon0` converts that into a per-measurement noise radius for the
///   full `8d-4` pipeline, absorbing the `2d-1` interpolation growth and the
///   factor `d` the reversal costs.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityBounds {
    #[serde(rename = "m")]
    pub min_modulus: f64,
    #[serde(rename = "M")]
    pub max_modulus: f64,
    #[serde(rename = "Mp")]
    pub max_deriv: f64,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon0: f64,
    #[serde(skip)]
    pub d: usize,
    /// Newton error-propagation constants for the worst case of `d-1` counted
    /// roots; `newton_error_constants` gives the sequence for a known count.
    #[serde(skip)]
    pub newton_constants: Vec<f64>,
}

impl StabilityBounds {
    /// Moment-error radius guaranteed for data perturbations of sup norm
    /// `eps` (valid for `eps < alpha * m^2`).
    pub fn gamma(&self, eps: f64) -> f64 {
        eps * (1.0 + self.max_deriv / self.min_modulus)
            / ((1.0 - self.alpha) * self.min_modulus * self.min_modulus)
    }
}

/// Builds the stability constants from circle bounds `0 < m <= M`, `Mp` and
/// the degree bound `d`.
pub fn stability_bounds(
    min_modulus: f64,
    max_modulus: f64,
    max_deriv: f64,
    d: usize,
) -> Result<StabilityBounds> {
    if d == 0 {
        return Err(Error::InvalidInput(
            "degree bound must be at least 1".into(),
        ));
    }
    let ordered = min_modulus > 0.0 && max_modulus >= min_modulus && max_deriv >= 0.0;
    if !ordered {
        return Err(Error::InvalidInput(format!(
            "need 0 < m <= M and Mp >= 0, got m = {min_modulus}, M = {max_modulus}, Mp = {max_deriv}"
        )));
    }
    let alpha = 1.0 / (1.0 + 2.0 * (1.0 + max_deriv / min_modulus));
    let reflected_deriv = (d - 1) as f64 * max_modulus + max_deriv;
    let beta = 1.0 / (1.0 + 2.0 * (1.0 + reflected_deriv / min_modulus));
    let epsilon0 = beta * min_modulus * min_modulus / ((2 * d - 1) as f64 * d as f64);
    Ok(StabilityBounds {
        min_modulus,
        max_modulus,
        max_deriv,
        alpha,
        beta,
        epsilon0,
        d,
        newton_constants: newton_error_constants(d - 1),
    })
}

/// Circle bounds and stability constants of a known polynomial, estimated on
/// a `grid`-point scan (at least `16 * degree_bound` points).
pub fn bounds_for(f: &Poly, grid: usize) -> Result<StabilityBounds> {
    let CircleBounds {
        min_modulus,
        max_modulus,
        max_deriv,
    } = f.circle_extrema(grid);
    stability_bounds(min_modulus, max_modulus, max_deriv, f.degree_bound())
}

/// Error-propagation constants `C_1..C_n0` of the Newton recurrence: if every
/// moment is off by at most `gamma <= 1`, then the coefficient `k` steps below
/// the leading one is off by at most `C_k * gamma`.
///
/// `C_k = (1/k) * sum_{i=1..k} ((n0+1) C_{k-i} + binom(n0, k-i))`, `C_0 = 0`.
pub fn newton_error_constants(n0: usize) -> Vec<f64> {
    let mut c = vec![0.0f64; n0 + 1];
    // binom(n0, j) by the multiplicative rule; n0 stays small enough that
    // f64 holds these exactly past anything the recursion meets.
    let binom = |j: usize| -> f64 {
        let mut b = 1.0f64;
        for i in 0..j {
            b = b * (n0 - i) as f64 / (i + 1) as f64;
        }
        b
    };
    for k in 1..=n0 {
        let mut acc = 0.0;
        for i in 1..=k {
            acc += (n0 + 1) as f64 * c[k - i] + binom(k - i);
        }
        c[k] = acc / k as f64;
    }
    c.drain(1..).collect()
}

/// Where one factor pass reads its integrand ratio from.
///
/// Polarized measurement data carries its interpolation-node samples, which
/// the `Sampled*` variants evaluate in extended precision at exact
/// pi-rational quadrature angles — the accuracy of the ratio near the circle
/// minima of `G0` is then limited only by the data itself, not by the
/// coefficient round-trip. Synthesized trig polynomials (no retained samples)
/// fall back to plain coefficient evaluation.
enum RatioSource<'a> {
    /// `G1(z) / G0(z)` from node samples.
    Sampled {
        g1: &'a SampledCircle,
        g0: &'a SampledCircle,
    },
    /// The reversed polynomial's ratio from node samples:
    /// `((d-1) conj(z) G0(conj z) - conj(z)^2 G1(conj z)) / G0(conj z)`.
    SampledReversed {
        g1: &'a SampledCircle,
        g0: &'a SampledCircle,
        dm1: f64,
    },
    /// `G1(z) / G0(z)` through the coefficient form.
    Coeff { g1: &'a TrigPoly, g0: &'a TrigPoly },
    /// The reversed ratio through the coefficient form.
    CoeffReversed {
        g1: &'a TrigPoly,
        g0: &'a TrigPoly,
        dm1: f64,
    },
}

impl<'a> RatioSource<'a> {
    fn forward(g1: &'a TrigPoly, g0: &'a TrigPoly) -> Self {
        match (g1.node_samples(), g0.node_samples()) {
            (Some(s1), Some(s0)) if s1.len() == s0.len() => RatioSource::Sampled { g1: s1, g0: s0 },
            _ => RatioSource::Coeff { g1, g0 },
        }
    }

    fn reversed(g1: &'a TrigPoly, g0: &'a TrigPoly, d: usize) -> Self {
        let dm1 = (d - 1) as f64;
        match (g1.node_samples(), g0.node_samples()) {
            (Some(s1), Some(s0)) if s1.len() == s0.len() => RatioSource::SampledReversed {
                g1: s1,
                g0: s0,
                dm1,
            },
            _ => RatioSource::CoeffReversed { g1, g0, dm1 },
        }
    }

    fn sample_len(&self) -> usize {
        match self {
            RatioSource::Sampled { g0, .. } | RatioSource::SampledReversed { g0, .. } => g0.len(),
            _ => unreachable!("coefficient sources have no sample grid"),
        }
    }

    fn too_small(den: f64, floor: f64) -> Error {
        Error::SignalTooSmall { min_g0: den, floor }
    }

    /// Extended-precision ratio at grid node `q` (`Sampled*` variants only).
    fn sampled_ratio(&self, grid: &CircleGrid, q: i64, floor: f64) -> Result<Complex64> {
        match self {
            RatioSource::Sampled { g1, g0 } => {
                // Real samples make the cardinal evaluation exactly real.
                let den = grid.eval(g0, q).re;
                if den.to_f64() <= floor {
                    return Err(Self::too_small(den.to_f64(), floor));
                }
                Ok(grid.eval(g1, q).div_real(den).to_complex())
            }
            RatioSource::SampledReversed { g1, g0, dm1 } => {
                let g0v = grid.eval(g0, -q);
                let den = g0v.re;
                if den.to_f64() <= floor {
                    return Err(Self::too_small(den.to_f64(), floor));
                }
                let g1v = grid.eval(g1, -q);
                let zb = grid.point(-q);
                let num = zb.scale_f64(*dm1).mul(g0v).sub(zb.mul(zb).mul(g1v));
                Ok(num.div_real(den).to_complex())
            }
            _ => unreachable!("coefficient sources evaluate through coeff_ratio"),
        }
    }

    /// Plain ratio at the point `z` (`Coeff*` variants only).
    fn coeff_ratio(&self, z: Complex64, floor: f64) -> Result<Complex64> {
        match self {
            RatioSource::Coeff { g1, g0 } => {
                let dv = g0.eval(z);
                if dv.re <= floor {
                    return Err(Self::too_small(dv.re, floor));
                }
                Ok(g1.eval(z) / dv)
            }
            RatioSource::CoeffReversed { g1, g0, dm1 } => {
                let zb = z.conj();
                let dv = g0.eval(zb);
                if dv.re <= floor {
                    return Err(Self::too_small(dv.re, floor));
                }
                Ok((dm1 * zb * g0.eval(zb) - zb * zb * g1.eval(zb)) / dv)
            }
            _ => unreachable!("sampled sources evaluate through sampled_ratio"),
        }
    }
}

/// Compensated scalar accumulator (Neumaier): the node sums run over up to
/// ~10^6 terms and the moments are read to absolute 1e-12.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    s: f64,
    c: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.s + v;
        self.c += if self.s.abs() >= v.abs() {
            (self.s - t) + v
        } else {
            (v - t) + self.s
        };
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Shared quadrature core: trapezoid moments of the source's ratio over the
/// unit circle with node doubling until the zeroth moment settles.
fn contour_moments(
    src: &RatioSource,
    kmax: usize,
    bandwidth: usize,
    cfg: &RecoveryConfig,
) -> Result<MomentEstimate> {
    let quadrature = |nodes: usize| -> Result<Vec<Complex64>> {
        let mut acc = vec![(CompensatedSum::default(), CompensatedSum::default()); kmax + 1];
        match src {
            RatioSource::Sampled { .. } | RatioSource::SampledReversed { .. } => {
                let grid = CircleGrid::new(nodes, src.sample_len());
                for q in 0..nodes as i64 {
                    let ratio = src.sampled_ratio(&grid, q, cfg.g0_floor)?;
                    // mu_k += z^{k+1} * ratio, with the node powers kept in
                    // extended precision so deep refinements lose no phase.
                    let z = grid.point(q);
                    let mut zp = z;
                    for a in acc.iter_mut() {
                        let term = zp.to_complex() * ratio;
                        a.0.add(term.re);
                        a.1.add(term.im);
                        zp = zp.mul(z);
                    }
                }
            }
            RatioSource::Coeff { .. } | RatioSource::CoeffReversed { .. } => {
                for q in 0..nodes {
                    let z =
                        Complex64::from_polar(1.0, std::f64::consts::TAU * q as f64 / nodes as f64);
                    let ratio = src.coeff_ratio(z, cfg.g0_floor)?;
                    let mut zp = z;
                    for a in acc.iter_mut() {
                        let term = zp * ratio;
                        a.0.add(term.re);
                        a.1.add(term.im);
                        zp *= z;
                    }
                }
            }
        }
        let scale = 1.0 / nodes as f64;
        Ok(acc
            .iter()
            .map(|(re, im)| Complex64::new(re.value() * scale, im.value() * scale))
            .collect())
    };

    let mut nodes = cfg.start_nodes.max(8 * (bandwidth + kmax)).max(16);
    let mut mu = quadrature(nodes)?;
    loop {
        if nodes.saturating_mul(2) > cfg.max_nodes {
            break;
        }
        let next = quadrature(nodes * 2)?;
        let settled = (next[0] - mu[0]).norm() < cfg.mu0_tol;
        nodes *= 2;
        mu = next;
        if settled {
            break;
        }
    }

    let n0 = mu[0].re.round().max(0.0) as usize;
    let n0_residual = (mu[0] - Complex64::new(n0 as f64, 0.0)).norm();
    if n0_residual >= cfg.n0_threshold {
        return Err(Error::AmbiguousRootCount {
            mu0: mu[0].re,
            residual: n0_residual,
            threshold: cfg.n0_threshold,
        });
    }
    Ok(MomentEstimate {
        mu,
        n0,
        n0_residual,
        nodes_used: nodes,
    })
}

/// Trapezoid estimates of the contour moments
/// `mu_k = (1/2 pi i) \oint z^k G1(z)/G0(z) dz`, i.e. the power sums of the
/// inside-the-disk roots when the data is clean.
///
/// `nodes` seeds the refinement (0 = automatic); nodes double until two
/// successive zeroth moments agree within 1e-10 or the node cap is reached.
pub fn moments_from_ratio(
    g1: &TrigPoly,
    g0: &TrigPoly,
    kmax: usize,
    nodes: usize,
) -> Result<MomentEstimate> {
    moments_from_ratio_cfg(
        g1,
        g0,
        kmax,
        &RecoveryConfig {
            start_nodes: nodes,
            ..RecoveryConfig::default()
        },
    )
}

/// [`moments_from_ratio`] with every knob exposed.
pub fn moments_from_ratio_cfg(
    g1: &TrigPoly,
    g0: &TrigPoly,
    kmax: usize,
    cfg: &RecoveryConfig,
) -> Result<MomentEstimate> {
    let bandwidth = g0.bandwidth().max(g1.bandwidth());
    contour_moments(&RatioSource::forward(g1, g0), kmax, bandwidth, cfg)
}

/// Newton's identities: turns the power sums in `est` into the monic
/// polynomial of degree `est.n0` whose roots realize them.
///
/// `b_{n0} = 1`, then `b_{n0-k} = -(1/k) sum_{l=1..k} mu_l b_{n0-k+l}`.
pub fn newton_coeffs(est: &MomentEstimate) -> Poly {
    let n0 = est.n0;
    assert!(
        est.mu.len() > n0,
        "need moments up to order n0 = {n0}, got {}",
        est.mu.len()
    );
    let mut b = vec![ZERO; n0 + 1];
    b[n0] = ONE;
    for k in 1..=n0 {
        let mut acc = ZERO;
        for l in 1..=k {
            acc += est.mu[l] * b[n0 - k + l];
        }
        b[n0 - k] = -acc / k as f64;
    }
    Poly::new(b)
}

/// Runs the moment quadrature (growing `kmax` until it covers the counted
/// roots) and Newton's identities for one factor.
fn recover_factor(
    src: &RatioSource,
    bandwidth: usize,
    cfg: &RecoveryConfig,
) -> Result<(Poly, MomentEstimate)> {
    let mut kmax = 0;
    let mut est = contour_moments(src, kmax, bandwidth, cfg)?;
    let mut rounds = 0;
    while est.n0 > kmax {
        if rounds >= 4 {
            // The counted roots kept outrunning the computed moments, which
            // only happens when refinement lands on different counts per
            // pass — treat it as an unusable count.
            return Err(Error::AmbiguousRootCount {
                mu0: est.mu[0].re,
                residual: est.n0_residual,
                threshold: cfg.n0_threshold,
            });
        }
        kmax = est.n0;
        est = contour_moments(src, kmax, bandwidth, cfg)?;
        rounds += 1;
    }
    Ok((newton_coeffs(&est), est))
}

/// Monic factor carrying the roots of the measured signal that lie inside
/// the open unit disk.
pub fn recover_inner(g1: &TrigPoly, g0: &TrigPoly, cfg: &RecoveryConfig) -> Result<Poly> {
    let bandwidth = g0.bandwidth().max(g1.bandwidth());
    recover_factor(&RatioSource::forward(g1, g0), bandwidth, cfg).map(|(p, _)| p)
}

/// Inner machinery for the reversed polynomial `g(z) = z^{d-1} f(1/z)`:
/// returns the monic factor of `g`'s inside-the-disk roots and its moment
/// record. The transformed circle data comes pointwise from `G0`, `G1`:
///
/// `|g(z)|^2 = G0(conj z)` and
/// `g'(z) conj(g(z)) = (d-1) conj(z) G0(conj z) - conj(z)^2 G1(conj z)`.
fn reversed_inner_factor(
    g1: &TrigPoly,
    g0: &TrigPoly,
    d: usize,
    cfg: &RecoveryConfig,
) -> Result<(Poly, MomentEstimate)> {
    let bandwidth = g0.bandwidth().max(g1.bandwidth()) + 2;
    recover_factor(&RatioSource::reversed(g1, g0, d), bandwidth, cfg)
}

/// Factor carrying the roots of the measured signal outside the closed unit
/// disk, scaled so the product with the monic inner factor reproduces the
/// signal's degree bound `d`.
///
/// The inner roots of the reversal `g(z) = z^{d-1} f(1/z)` are the
/// reciprocals of `f`'s outer roots (plus one zero root per missing leading
/// degree), so reversing the recovered monic factor's coefficients is all it
/// takes to map them back out.
pub fn recover_outer(g1: &TrigPoly, g0: &TrigPoly, d: usize, cfg: &RecoveryConfig) -> Result<Poly> {
    let (gi, _) = reversed_inner_factor(g1, g0, d, cfg)?;
    let len = gi.degree_bound();
    Ok(gi.reverse(len))
}

/// Everything recovery learned about one measurement set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryDiagnostics {
    pub nodes_inner: usize,
    pub nodes_outer: usize,
    pub n0_residual_inner: f64,
    pub n0_residual_outer: f64,
    /// Raised when noise pushed the measured mean of `|f|^2` below zero and
    /// the output norm was clamped to zero.
    pub parseval_clamped: bool,
}

/// Recovered coefficients (degree bound `d`, determined up to one unimodular
/// constant) plus the root counts both factor passes settled on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredSignal {
    pub coeffs: Poly,
    /// Roots counted strictly inside the unit disk.
    pub n_inner: usize,
    /// Roots counted for the reversed polynomial: the signal's outer roots
    /// plus one zero root per degree the signal falls short of `d-1`.
    pub n_outer: usize,
    pub diagnostics: RecoveryDiagnostics,
}

/// Full pipeline: polarize, recover both factors, multiply, normalize.
///
/// The result reproduces the measured signal up to a global unimodular
/// constant whenever the noise level is within the certified radius
/// (`epsilon0` of [`stability_bounds`]); beyond it the root counting degrades
/// first, surfacing as `AmbiguousRootCount` or visibly wrong output.
pub fn recover(ms: &MeasurementSet, cfg: &RecoveryConfig) -> Result<RecoveredSignal> {
    ms.validate()?;
    let (g0, g1) = polarize(ms);
    let bandwidth = g0.bandwidth().max(g1.bandwidth());
    let (inner, est_inner) = recover_factor(&RatioSource::forward(&g1, &g0), bandwidth, cfg)?;
    let (rev_inner, est_outer) = reversed_inner_factor(&g1, &g0, ms.d, cfg)?;
    let outer = rev_inner.reverse(rev_inner.degree_bound());

    let product = outer.multiply(&inner);
    let norm = parseval_norm(&ms.base);
    let product_norm = product.l2_norm();
    if product_norm == 0.0 {
        return Err(Error::DegenerateNorm);
    }
    let coeffs = product
        .scale(Complex64::new(norm.value / product_norm, 0.0))
        .resized(ms.d);

    Ok(RecoveredSignal {
        coeffs,
        n_inner: est_inner.n0,
        n_outer: est_outer.n0,
        diagnostics: RecoveryDiagnostics {
            nodes_inner: est_inner.nodes_used,
            nodes_outer: est_outer.nodes_used,
            n0_residual_inner: est_inner.n0_residual,
            n0_residual_outer: est_outer.n0_residual,
            parseval_clamped: norm.clamped,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{measure, NoiseSpec};
    use crate::polynomial::{error_up_to_phase, RootSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn stability_bounds_flat_signal() {
        // m = M = 1, Mp = 0, d = 1: alpha = beta = 1/3.
        let b = stability_bounds(1.0, 1.0, 0.0, 1).unwrap();
        assert!((b.alpha - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.beta - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.epsilon0 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn stability_bounds_worked_example() {
        // m = M = Mp = 1, d = 2: alpha = 1/5, beta = 1/7, eps0 = 1/42.
        let b = stability_bounds(1.0, 1.0, 1.0, 2).unwrap();
        assert!((b.alpha - 0.2).abs() < 1e-15);
        assert!((b.beta - 1.0 / 7.0).abs() < 1e-15);
        assert!((b.epsilon0 - 1.0 / 42.0).abs() < 1e-15);
        assert!(b.gamma(0.0) == 0.0);
        // gamma is linear in eps.
        assert!((b.gamma(0.2) - 2.0 * b.gamma(0.1)).abs() < 1e-15);
    }

    #[test]
    fn stability_bounds_rejects_bad_moduli() {
        assert!(stability_bounds(0.0, 1.0, 1.0, 2).is_err());
        assert!(stability_bounds(-1.0, 1.0, 1.0, 2).is_err());
        assert!(stability_bounds(2.0, 1.0, 1.0, 2).is_err());
        assert!(stability_bounds(1.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn newton_constants_hand_values() {
        assert_eq!(newton_error_constants(0), Vec::<f64>::new());
        let c1 = newton_error_constants(1);
        assert_eq!(c1, vec![1.0]);
        let c2 = newton_error_constants(2);
        assert_eq!(c2[0], 1.0);
        assert_eq!(c2[1], 3.0);
    }

    #[test]
    fn newton_constants_grow_but_stay_finite() {
        let c = newton_error_constants(30);
        assert_eq!(c.len(), 30);
        let mut prev = 0.0;
        for &v in &c {
            assert!(v.is_finite() && v >= 1.0 && v >= prev);
            prev = v;
        }
    }

    fn est_from_moments(mu: Vec<Complex64>, n0: usize) -> MomentEstimate {
        MomentEstimate {
            mu,
            n0,
            n0_residual: 0.0,
            nodes_used: 0,
        }
    }

    #[test]
    fn newton_coeffs_single_root() {
        let est = est_from_moments(vec![c(1.0, 0.0), c(0.5, 0.0)], 1);
        let p = newton_coeffs(&est);
        assert_eq!(p.degree_bound(), 2);
        assert!((p.coeff(0) - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((p.coeff(1) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn newton_coeffs_symmetric_pair() {
        // Roots {1/2, -1/2}: mu = (2, 0, 1/2) -> z^2 - 1/4.
        let est = est_from_moments(vec![c(2.0, 0.0), ZERO, c(0.5, 0.0)], 2);
        let p = newton_coeffs(&est);
        assert!((p.coeff(0) - c(-0.25, 0.0)).norm() < 1e-15);
        assert!(p.coeff(1).norm() < 1e-15);
        assert!((p.coeff(2) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn newton_coeffs_no_roots_gives_one() {
        let est = est_from_moments(vec![ZERO], 0);
        let p = newton_coeffs(&est);
        assert_eq!(p.coeffs(), &[ONE]);
    }

    #[test]
    fn newton_matches_vieta_on_random_multisets() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..40 {
            let n = 1 + trial % 10;
            let roots: Vec<Complex64> = (0..n)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..=0.8), rng.gen_range(0.0..TAU)))
                .collect();
            let mut mu = vec![ZERO; n + 1];
            for (k, m) in mu.iter_mut().enumerate() {
                *m = roots.iter().map(|z| z.powu(k as u32)).sum();
            }
            let p = newton_coeffs(&est_from_moments(mu, n));
            let truth = Poly::from_roots(&RootSet {
                roots,
                leading: ONE,
            });
            for k in 0..=n {
                assert!(
                    (p.coeff(k) - truth.coeff(k)).norm() < 1e-10,
                    "trial {trial} coeff {k}"
                );
            }
        }
    }

    #[test]
    fn moments_of_constant_are_zero() {
        let f = Poly::constant(c(2.0, 0.0));
        let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
        let est = moments_from_ratio(&g1, &g0, 2, 0).unwrap();
        assert_eq!(est.n0, 0);
        for m in &est.mu {
            assert!(m.norm() < 1e-12);
        }
    }

    #[test]
    fn moments_of_single_inner_root() {
        // f = z - 1/2: one root at 1/2, power sums (1, 1/2, 1/4, ...).
        let f = Poly::from_real(&[-0.5, 1.0]);
        let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
        let est = moments_from_ratio(&g1, &g0, 3, 0).unwrap();
        assert_eq!(est.n0, 1);
        assert!(est.n0_residual < 1e-9);
        for (k, m) in est.mu.iter().enumerate() {
            let truth = 0.5f64.powi(k as i32);
            assert!((m - c(truth, 0.0)).norm() < 1e-9, "k = {k}: {m}");
        }
    }

    #[test]
    fn moments_ignore_outer_roots() {
        // Worked quadratic: roots 1/2 (inner) and 2 (outer).
        let f = Poly::from_real(&[1.0, -2.5, 1.0]);
        let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
        let est = moments_from_ratio(&g1, &g0, 1, 0).unwrap();
        assert_eq!(est.n0, 1);
        assert!((est.mu[1] - c(0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn moments_match_power_sums_on_random_signals() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..30u64 {
            let d = 2 + (trial as usize) % 11;
            let mut roots = Vec::new();
            for _ in 0..d - 1 {
                // Radii clear of the circle so the quadrature converges fast.
                let r = if rng.gen::<bool>() {
                    rng.gen_range(0.05..=0.8)
                } else {
                    rng.gen_range(1.25..=3.0)
                };
                roots.push(Complex64::from_polar(r, rng.gen_range(0.0..TAU)));
            }
            let rs = RootSet {
                roots,
                leading: Complex64::from_polar(1.0, rng.gen_range(0.0..TAU)),
            };
            let f = Poly::from_roots(&rs);
            let inner: Vec<Complex64> = rs
                .roots
                .iter()
                .copied()
                .filter(|z| z.norm() < 1.0)
                .collect();
            let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
            let est = moments_from_ratio(&g1, &g0, inner.len(), 0).unwrap();
            assert_eq!(est.n0, inner.len(), "trial {trial}");
            for k in 0..=inner.len() {
                let truth: Complex64 = inner.iter().map(|z| z.powu(k as u32)).sum();
                assert!(
                    (est.mu[k] - truth).norm() < 1e-8,
                    "trial {trial} k={k}: {} vs {truth}",
                    est.mu[k]
                );
            }
        }
    }

    #[test]
    fn moments_reject_root_on_circle() {
        // f = z - 1 vanishes at a measurement node; the data itself says the
        // signal is too small to divide by.
        let f = Poly::from_real(&[-1.0, 1.0]);
        let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
        let r = moments_from_ratio(&g1, &g0, 1, 0);
        assert!(matches!(r, Err(Error::SignalTooSmall { .. })));
    }

    #[test]
    fn moments_reject_ambiguous_count() {
        // Synthetic data engineered so mu_0 = 0.4: G0 = 1, G1 = 0.4/z.
        let g0 = TrigPoly::from_coeffs(vec![ZERO, ONE, ZERO], 1).unwrap();
        let g1 = TrigPoly::from_coeffs(vec![c(0.4, 0.0), ZERO, ZERO], 1).unwrap();
        let r = moments_from_ratio(&g1, &g0, 0, 0);
        match r {
            Err(Error::AmbiguousRootCount { residual, .. }) => {
                assert!((residual - 0.4).abs() < 1e-9);
            }
            other => panic!("expected ambiguous root count, got {other:?}"),
        }
    }

    #[test]
    fn moment_perturbation_respects_gamma_bound() {
        // Push sup-norm-eps perturbations into (G1, G0) with eps just inside
        // the alpha * m^2 radius and check every moment stays within gamma.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..20u64 {
            let d = 2 + (trial as usize) % 7;
            let mut roots = Vec::new();
            for _ in 0..d - 1 {
                let r = if rng.gen::<bool>() {
                    rng.gen_range(0.0..=0.8)
                } else {
                    rng.gen_range(1.2..=3.0)
                };
                roots.push(Complex64::from_polar(r, rng.gen_range(0.0..TAU)));
            }
            let rs = RootSet {
                roots,
                leading: Complex64::from_polar(1.0, rng.gen_range(0.0..TAU)),
            };
            let f = Poly::from_roots(&rs);
            let bounds = bounds_for(&f, (16 * d).max(16384)).unwrap();
            let eps = 0.9 * bounds.alpha * bounds.min_modulus * bounds.min_modulus;
            let gamma = bounds.gamma(eps);

            let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
            let n = g0.bandwidth() as i64;
            // Single-frequency perturbations meet the sup-norm budget exactly.
            let k1 = rng.gen_range(-n..=n);
            let k2 = rng.gen_range(0..=n);
            let phase1 = Complex64::from_polar(eps, rng.gen_range(0.0..TAU));
            let phase2 = Complex64::from_polar(0.5 * eps, rng.gen_range(0.0..TAU));
            let mut g1c = g1.coeffs().to_vec();
            g1c[(k1 + n) as usize] += phase1;
            let mut g0c = g0.coeffs().to_vec();
            g0c[(k2 + n) as usize] += phase2;
            g0c[(-k2 + n) as usize] += phase2.conj();
            let g1p = TrigPoly::from_coeffs(g1c, g0.bandwidth()).unwrap();
            let g0p = TrigPoly::from_coeffs(g0c, g0.bandwidth()).unwrap();

            let inner: Vec<Complex64> = rs
                .roots
                .iter()
                .copied()
                .filter(|z| z.norm() < 1.0)
                .collect();
            let cfg = RecoveryConfig {
                // The counting guarantee at this noise level is 0.45 < 1/2;
                // use that rounding threshold, not the tighter default.
                n0_threshold: 0.5,
                ..RecoveryConfig::default()
            };
            let est = moments_from_ratio_cfg(&g1p, &g0p, inner.len(), &cfg).unwrap();
            assert_eq!(est.n0, inner.len(), "trial {trial}");
            for k in 0..=inner.len() {
                let truth: Complex64 = inner.iter().map(|z| z.powu(k as u32)).sum();
                let err = (est.mu[k] - truth).norm();
                assert!(
                    err <= gamma,
                    "trial {trial} k={k}: err {err:.3e} > gamma {gamma:.3e}"
                );
            }
        }
    }

    #[test]
    fn newton_coeffs_error_respects_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for trial in 0..40 {
            let n0 = 1 + trial % 8;
            let roots: Vec<Complex64> = (0..n0)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..=0.8), rng.gen_range(0.0..TAU)))
                .collect();
            let truth = Poly::from_roots(&RootSet {
                roots: roots.clone(),
                leading: ONE,
            });
            let gamma = 10f64.powf(rng.gen_range(-6.0..0.0));
            let mut mu = vec![ZERO; n0 + 1];
            for (k, m) in mu.iter_mut().enumerate() {
                let exact: Complex64 = roots.iter().map(|z| z.powu(k as u32)).sum();
                *m = exact
                    + Complex64::from_polar(gamma * rng.gen::<f64>(), rng.gen_range(0.0..TAU));
            }
            let approx = newton_coeffs(&est_from_moments(mu, n0));
            let constants = newton_error_constants(n0);
            for k in 1..=n0 {
                let err = (approx.coeff(n0 - k) - truth.coeff(n0 - k)).norm();
                assert!(
                    err <= constants[k - 1] * gamma + 1e-12,
                    "trial {trial} k={k}: err {err:.3e} vs C_k gamma {:.3e}",
                    constants[k - 1] * gamma
                );
            }
        }
    }

    #[test]
    fn recover_inner_worked_example() {
        let f = Poly::from_real(&[1.0, -2.5, 1.0]);
        let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
        let p = recover_inner(&g1, &g0, &RecoveryConfig::default()).unwrap();
        assert_eq!(p.degree_bound(), 2);
        assert!((p.coeff(0) - c(-0.5, 0.0)).norm() < 1e-9);
        assert!((p.coeff(1) - ONE).norm() < 1e-9);
    }

    #[test]
    fn recover_inner_all_roots_outside() {
        let f = Poly::from_real(&[-2.0, 1.0]); // root at 2
        let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
        let p = recover_inner(&g1, &g0, &RecoveryConfig::default()).unwrap();
        assert_eq!(p.coeffs(), &[ONE]);
    }

    #[test]
    fn recover_outer_worked_example() {
        let f = Poly::from_real(&[1.0, -2.5, 1.0]);
        let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
        let p = recover_outer(&g1, &g0, 3, &RecoveryConfig::default()).unwrap();
        assert_eq!(p.degree_bound(), 2);
        assert!((p.coeff(0) - ONE).norm() < 1e-9, "{:?}", p.coeffs());
        assert!((p.coeff(1) - c(-0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn recover_outer_all_roots_inside() {
        let f = Poly::from_real(&[-0.5, 1.0]);
        let (g0, g1) = polarize(&measure(&f, &NoiseSpec::noiseless()));
        let p = recover_outer(&g1, &g0, 2, &RecoveryConfig::default()).unwrap();
        assert_eq!(p.coeffs(), &[ONE]);
    }

    #[test]
    fn recover_unit_monomial() {
        // f = z: inner root at 0, no outer roots.
        let f = Poly::from_real(&[0.0, 1.0]);
        let ms = measure(&f, &NoiseSpec::noiseless());
        let rec = recover(&ms, &RecoveryConfig::default()).unwrap();
        assert_eq!(rec.n_inner, 1);
        assert_eq!(rec.n_outer, 0);
        assert!(error_up_to_phase(&f, &rec.coeffs).max_err < 1e-9);
    }

    #[test]
    fn recover_constant_signal() {
        let f = Poly::constant(c(0.0, -1.5));
        let ms = measure(&f, &NoiseSpec::noiseless());
        let rec = recover(&ms, &RecoveryConfig::default()).unwrap();
        assert_eq!(rec.coeffs.degree_bound(), 1);
        assert!(error_up_to_phase(&f, &rec.coeffs).max_err < 1e-12);
    }

    #[test]
    fn recover_worked_example_up_to_phase() {
        let f = Poly::from_real(&[1.0, -2.5, 1.0]);
        let ms = measure(&f, &NoiseSpec::noiseless());
        let rec = recover(&ms, &RecoveryConfig::default()).unwrap();
        assert_eq!(rec.coeffs.degree_bound(), 3);
        assert_eq!(rec.n_inner, 1);
        assert_eq!(rec.n_outer, 1);
        let a = error_up_to_phase(&f, &rec.coeffs);
        assert!(a.max_err < 1e-9, "err = {:.3e}", a.max_err);
        // The factor product comes out as -f/2 before normalization, so the
        // aligned phase is -1.
        assert!((a.phase - c(-1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn recover_degree_deficient_signal() {
        // Degree 1 signal measured with degree bound 3: the reversal absorbs
        // the missing degrees as zero roots and the output pads back to d.
        let f = Poly::new(vec![c(-0.5, 0.2), ONE, ZERO]);
        let ms = measure(&f, &NoiseSpec::noiseless());
        let rec = recover(&ms, &RecoveryConfig::default()).unwrap();
        assert_eq!(rec.coeffs.degree_bound(), 3);
        assert_eq!(rec.n_outer, 1); // one padding zero root of the reversal
        assert!(error_up_to_phase(&f, &rec.coeffs).max_err < 1e-9);
    }

    #[test]
    fn recover_is_equivariant_under_global_phase() {
        let f = Poly::new(vec![c(0.4, -0.3), c(-1.1, 0.6), c(0.0, 0.9), c(0.5, 0.0)]);
        let rotated = f.scale(Complex64::from_polar(1.0, 1.234));
        let rec_a = recover(
            &measure(&f, &NoiseSpec::noiseless()),
            &RecoveryConfig::default(),
        )
        .unwrap();
        let rec_b = recover(
            &measure(&rotated, &NoiseSpec::noiseless()),
            &RecoveryConfig::default(),
        )
        .unwrap();
        // Identical data in, identical output out.
        for k in 0..4 {
            assert!((rec_a.coeffs.coeff(k) - rec_b.coeffs.coeff(k)).norm() < 1e-12);
        }
        assert!(error_up_to_phase(&f, &rec_a.coeffs).max_err < 1e-9);
        assert!(error_up_to_phase(&rotated, &rec_b.coeffs).max_err < 1e-9);
    }

    #[test]
    fn recover_random_signals_noiseless() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for trial in 0..25u64 {
            let d = 2 + (trial as usize) % 7;
            let mut roots = Vec::new();
            for _ in 0..d - 1 {
                let r = if rng.gen::<bool>() {
                    rng.gen_range(0.0..=0.8)
                } else {
                    rng.gen_range(1.2..=3.0)
                };
                roots.push(Complex64::from_polar(r, rng.gen_range(0.0..TAU)));
            }
            let rs = RootSet {
                roots,
                leading: Complex64::from_polar(1.0, rng.gen_range(0.0..TAU)),
            };
            let f = Poly::from_roots(&rs);
            let ms = measure(&f, &NoiseSpec::noiseless());
            let rec = recover(&ms, &RecoveryConfig::default()).unwrap();
            let err = error_up_to_phase(&f, &rec.coeffs).max_err;
            assert!(err < 1e-8, "trial {trial} (d = {d}): err = {err:.3e}");
            let n_inner_true = rs.roots.iter().filter(|z| z.norm() < 1.0).count();
            assert_eq!(rec.n_inner, n_inner_true, "trial {trial}");
        }
    }

    #[test]
    fn recover_survives_noise_within_certified_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for trial in 0..15u64 {
            let d = 2 + (trial as usize) % 5;
            let mut roots = Vec::new();
            for _ in 0..d - 1 {
                let r = if rng.gen::<bool>() {
                    rng.gen_range(0.0..=0.8)
                } else {
                    rng.gen_range(1.2..=3.0)
                };
                roots.push(Complex64::from_polar(r, rng.gen_range(0.0..TAU)));
            }
            let rs = RootSet {
                roots,
                leading: Complex64::from_polar(1.0, rng.gen_range(0.0..TAU)),
            };
            let f = Poly::from_roots(&rs);
            let bounds = bounds_for(&f, (16 * d).max(8192)).unwrap();
            let ms = measure(&f, &NoiseSpec::uniform(bounds.epsilon0, 100 + trial));
            let rec = recover(&ms, &RecoveryConfig::default()).unwrap();
            let n_inner_true = rs.roots.iter().filter(|z| z.norm() < 1.0).count();
            assert_eq!(rec.n_inner, n_inner_true, "trial {trial}");
            assert_eq!(
                rec.n_outer,
                d - 1 - n_inner_true,
                "trial {trial}: outer count"
            );
        }
    }
}
