//! Dense complex polynomials and the phase-blind error metric.
//!
//! Coefficients are stored in increasing powers of `z`: `coeffs[k]` multiplies
//! `z^k`. The vector length is the *degree bound* `d`; trailing zeros are
//! legal, so the actual degree may be lower. Degree bounds are always at
//! least 1 (the zero polynomial is `[0]`).

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense polynomial `c_0 + c_1 z + ... + c_{d-1} z^{d-1}`.
///
/// Serializes as a JSON array of `[re, im]` pairs, index = power of `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

/// A root multiset together with a leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub leading: Complex64,
}

/// Grid estimates of the modulus range of `p` and `p'` on the unit circle.
///
/// These are grid extrema: `min_modulus` can only over-estimate the true
/// minimum and the maxima can only under-estimate. Refine with a denser grid.
#[derive(Debug, Clone, Copy)]
pub struct CircleBounds {
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub max_deriv: f64,
}

/// Outcome of aligning an estimate against a reference over the global
/// unimodular constant that magnitude data can never determine.
#[derive(Debug, Clone, Copy)]
pub struct PhaseAlignment {
    /// Phase of the inner product between estimate and reference (1 when the
    /// inner product vanishes).
    pub phase: Complex64,
    /// Largest single-coefficient deviation after the alignment is applied.
    pub max_err: f64,
}

impl Poly {
    /// Wraps raw coefficients; the vector length fixes the degree bound.
    ///
    /// Panics on an empty vector — every polynomial has degree bound >= 1.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "degree bound must be at least 1");
        Self { coeffs }
    }

    /// Degree-bound-1 polynomial holding a single constant.
    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// Convenience constructor from real coefficients (tests, examples).
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&re| Complex64::new(re, 0.0)).collect())
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the degree bound.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Horner evaluation at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Formal derivative; the degree bound shrinks by one but never below 1.
    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(ZERO);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Poly::new(coeffs)
    }

    /// Coefficient convolution; degree bounds add (minus one).
    pub fn multiply(&self, other: &Poly) -> Poly {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Zero-pads to length `d` and reverses the coefficient order, i.e. the
    /// coefficients of `z^{d-1} p(1/z)`. Requires `degree_bound() <= d`.
    pub fn reverse(&self, d: usize) -> Poly {
        assert!(
            self.coeffs.len() <= d,
            "reversal length {d} below degree bound {}",
            self.coeffs.len()
        );
        let mut out = self.coeffs.clone();
        out.resize(d, ZERO);
        out.reverse();
        Poly::new(out)
    }

    /// Every coefficient scaled by `c`.
    pub fn scale(&self, c: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Copy with the degree bound forced to `d` (zero-pad or truncate).
    pub fn resized(&self, d: usize) -> Poly {
        assert!(d >= 1);
        let mut out = self.coeffs.clone();
        out.resize(d, ZERO);
        Poly::new(out)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Expands `leading * prod_j (z - z_j)`.
    ///
    /// An empty root set yields the constant polynomial `leading`.
    pub fn from_roots(rs: &RootSet) -> Poly {
        let mut coeffs = vec![rs.leading];
        for &root in &rs.roots {
            coeffs.push(ZERO);
            for i in (0..coeffs.len()).rev() {
                let lower = if i > 0 { coeffs[i - 1] } else { ZERO };
                coeffs[i] = lower - coeffs[i] * root;
            }
        }
        Poly::new(coeffs)
    }

    /// Scans `grid` equispaced points of the unit circle for the extrema of
    /// `|p|` and `|p'|`. Requires `grid >= 16 * degree_bound()` so the scan
    /// cannot straddle a full oscillation.
    pub fn circle_extrema(&self, grid: usize) -> CircleBounds {
        assert!(
            grid >= 16 * self.degree_bound(),
            "grid {grid} too coarse for degree bound {}",
            self.degree_bound()
        );
        let deriv = self.derivative();
        let mut min_modulus = f64::INFINITY;
        let mut max_modulus = 0.0f64;
        let mut max_deriv = 0.0f64;
        for q in 0..grid {
            let z = Complex64::from_polar(1.0, TAU * q as f64 / grid as f64);
            let v = self.eval(z).norm();
            min_modulus = min_modulus.min(v);
            max_modulus = max_modulus.max(v);
            max_deriv = max_deriv.max(deriv.eval(z).norm());
        }
        CircleBounds {
            min_modulus,
            max_modulus,
            max_deriv,
        }
    }
}

/// Aligns `approx` against `truth` over a global unimodular constant and
/// reports the worst coefficient deviation that remains.
///
/// The aligning constant is the phase of `<approx, truth>`; conjugating it
/// onto `approx` is the L2-optimal unimodular match, so two polynomials that
/// differ by a pure phase score (numerically) zero. Both inputs must share
/// one degree bound.
pub fn error_up_to_phase(truth: &Poly, approx: &Poly) -> PhaseAlignment {
    assert_eq!(
        truth.degree_bound(),
        approx.degree_bound(),
        "phase alignment needs matching degree bounds"
    );
    let s: Complex64 = approx
        .coeffs
        .iter()
        .zip(&truth.coeffs)
        .map(|(a, t)| a * t.conj())
        .sum();
    let phase = if s.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        s / s.norm()
    };
    let align = phase.conj();
    let max_err = truth
        .coeffs
        .iter()
        .zip(&approx.coeffs)
        .map(|(t, a)| (t - align * a).norm())
        .fold(0.0, f64::max);
    PhaseAlignment { phase, max_err }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        if pairs.is_empty() {
            return Err(D::Error::custom(
                "polynomial needs at least one [re, im] coefficient",
            ));
        }
        Ok(Poly::new(
            pairs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "expected {b} within {tol}, got {a} (delta {})",
            (a - b).norm()
        );
    }

    #[test]
    fn eval_constant() {
        let p = Poly::constant(c(3.0, -1.0));
        assert_eq!(p.eval(c(17.0, 4.0)), c(3.0, -1.0));
    }

    #[test]
    fn eval_worked_quadratic() {
        // (z - 1/2)(z - 2) = 1 - 2.5 z + z^2
        let p = Poly::from_real(&[1.0, -2.5, 1.0]);
        assert_close(p.eval(c(1.0, 0.0)), c(-0.5, 0.0), 1e-15);
        assert_close(p.eval(c(-1.0, 0.0)), c(4.5, 0.0), 1e-15);
        assert_close(p.eval(c(0.5, 0.0)), c(0.0, 0.0), 1e-15);
        assert_close(p.eval(c(2.0, 0.0)), c(0.0, 0.0), 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let p = Poly::from_real(&[1.0, -2.5, 1.0]);
        let dp = p.derivative();
        assert_eq!(dp.degree_bound(), 2);
        assert_eq!(dp.coeffs(), &[c(-2.5, 0.0), c(2.0, 0.0)]);

        let constant = Poly::constant(c(7.0, 0.0));
        let dc = constant.derivative();
        assert_eq!(dc.degree_bound(), 1);
        assert_eq!(dc.coeffs(), &[ZERO]);
    }

    #[test]
    fn multiply_matches_hand_expansion() {
        // (z - 1/2)(z - 2) expanded
        let a = Poly::from_real(&[-0.5, 1.0]);
        let b = Poly::from_real(&[-2.0, 1.0]);
        let p = a.multiply(&b);
        assert_eq!(p.degree_bound(), 3);
        assert_close(p.coeff(0), c(1.0, 0.0), 1e-15);
        assert_close(p.coeff(1), c(-2.5, 0.0), 1e-15);
        assert_close(p.coeff(2), c(1.0, 0.0), 1e-15);
    }

    #[test]
    fn multiply_by_constant_scales() {
        let p = Poly::from_real(&[1.0, -2.5, 1.0]);
        let half = Poly::constant(c(-0.5, 0.0));
        let q = p.multiply(&half);
        assert_eq!(q.degree_bound(), 3);
        for k in 0..3 {
            assert_close(q.coeff(k), p.coeff(k) * c(-0.5, 0.0), 1e-15);
        }
    }

    #[test]
    fn reverse_pads_then_flips() {
        let p = Poly::from_real(&[-0.5, 1.0]);
        let r = p.reverse(2);
        assert_eq!(r.coeffs(), &[c(1.0, 0.0), c(-0.5, 0.0)]);

        let padded = p.reverse(4);
        assert_eq!(padded.coeffs(), &[ZERO, ZERO, c(1.0, 0.0), c(-0.5, 0.0)]);
    }

    #[test]
    fn from_roots_worked_example() {
        let rs = RootSet {
            roots: vec![c(0.5, 0.0), c(2.0, 0.0)],
            leading: c(1.0, 0.0),
        };
        let p = Poly::from_roots(&rs);
        assert_eq!(p.degree_bound(), 3);
        assert_close(p.coeff(0), c(1.0, 0.0), 1e-14);
        assert_close(p.coeff(1), c(-2.5, 0.0), 1e-14);
        assert_close(p.coeff(2), c(1.0, 0.0), 1e-14);
    }

    #[test]
    fn from_roots_empty_is_constant() {
        let rs = RootSet {
            roots: vec![],
            leading: c(0.0, 2.0),
        };
        let p = Poly::from_roots(&rs);
        assert_eq!(p.coeffs(), &[c(0.0, 2.0)]);
    }

    #[test]
    fn circle_extrema_constant_and_monomial() {
        let one = Poly::constant(c(1.0, 0.0));
        let b = one.circle_extrema(64);
        assert_eq!(b.min_modulus, 1.0);
        assert_eq!(b.max_modulus, 1.0);
        assert_eq!(b.max_deriv, 0.0);

        let z = Poly::from_real(&[0.0, 1.0]);
        let b = z.circle_extrema(64);
        assert!((b.min_modulus - 1.0).abs() < 1e-12);
        assert!((b.max_modulus - 1.0).abs() < 1e-12);
        assert!((b.max_deriv - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_extrema_worked_quadratic() {
        // |f| attains 1/2 at z = 1 and 9/2 at z = -1.
        let p = Poly::from_real(&[1.0, -2.5, 1.0]);
        let b = p.circle_extrema(4096);
        assert!((b.min_modulus - 0.5).abs() < 5e-3, "m = {}", b.min_modulus);
        assert!((b.max_modulus - 4.5).abs() < 5e-3, "M = {}", b.max_modulus);
        // f' = -2.5 + 2z has modulus 4.5 at z = -1.
        assert!((b.max_deriv - 4.5).abs() < 5e-3, "Mp = {}", b.max_deriv);
    }

    #[test]
    fn phase_error_detects_exact_match() {
        let p = Poly::from_real(&[1.0, -2.5, 1.0]);
        let a = error_up_to_phase(&p, &p);
        assert!(a.max_err < 1e-15);
        assert_close(a.phase, c(1.0, 0.0), 1e-15);
    }

    #[test]
    fn phase_error_ignores_unimodular_factor() {
        let p = Poly::from_real(&[1.0, -2.5, 1.0]);
        let rotated = p.scale(c(0.0, 1.0));
        let a = error_up_to_phase(&p, &rotated);
        assert!(a.max_err < 1e-15);
        assert_close(a.phase, c(0.0, 1.0), 1e-15);
    }

    #[test]
    fn phase_error_sees_scaling() {
        // (-1, 2.5, -1) is -1 times the reference: zero error, phase -1.
        // Doubling it on top is a genuine (non-unimodular) mismatch.
        let p = Poly::from_real(&[1.0, -2.5, 1.0]);
        let negated = p.scale(c(-1.0, 0.0));
        assert!(error_up_to_phase(&p, &negated).max_err < 1e-15);
        let doubled = p.scale(c(-2.0, 0.0));
        assert!(error_up_to_phase(&p, &doubled).max_err > 1.0);
    }

    #[test]
    fn phase_error_zero_inner_product_uses_unit_phase() {
        let p = Poly::from_real(&[1.0, 0.0]);
        let q = Poly::from_real(&[0.0, 1.0]);
        let a = error_up_to_phase(&p, &q);
        assert_close(a.phase, c(1.0, 0.0), 0.0);
        assert!((a.max_err - 1.0).abs() < 1e-15);
    }

    #[test]
    fn serde_round_trip_preserves_bits() {
        let p = Poly::new(vec![c(1.0, -2.5), c(0.125, 3.0), c(-0.1, 0.7)]);
        let text = serde_json::to_string(&p).unwrap();
        let q: Poly = serde_json::from_str(&text).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn serde_rejects_empty_coefficients() {
        assert!(serde_json::from_str::<Poly>("[]").is_err());
    }

    fn arb_complex(scale: f64) -> impl Strategy<Value = Complex64> {
        (-scale..scale, -scale..scale).prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn arb_poly(max_len: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(arb_complex(2.0), 1..=max_len).prop_map(Poly::new)
    }

    proptest! {
        #[test]
        fn multiply_commutes(a in arb_poly(6), b in arb_poly(6)) {
            let ab = a.multiply(&b);
            let ba = b.multiply(&a);
            prop_assert_eq!(ab.degree_bound(), ba.degree_bound());
            for k in 0..ab.degree_bound() {
                prop_assert!((ab.coeff(k) - ba.coeff(k)).norm() <= 1e-12);
            }
        }

        #[test]
        fn multiply_associates(a in arb_poly(4), b in arb_poly(4), d in arb_poly(4)) {
            let left = a.multiply(&b).multiply(&d);
            let right = a.multiply(&b.multiply(&d));
            prop_assert_eq!(left.degree_bound(), right.degree_bound());
            for k in 0..left.degree_bound() {
                prop_assert!((left.coeff(k) - right.coeff(k)).norm() <= 1e-11);
            }
        }

        #[test]
        fn reverse_twice_is_identity_at_full_length(p in arb_poly(8)) {
            let d = p.degree_bound();
            let back = p.reverse(d).reverse(d);
            prop_assert_eq!(back, p);
        }

        #[test]
        fn reverse_swaps_circle_modulus(p in arb_poly(6), q in 0usize..64) {
            // |z^{d-1} p(1/z)| = |p(conj z)| on the unit circle.
            let d = p.degree_bound();
            let z = Complex64::from_polar(1.0, TAU * q as f64 / 64.0);
            let lhs = p.reverse(d).eval(z).norm();
            let rhs = p.eval(z.conj()).norm();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
        }

        #[test]
        fn from_roots_vanishes_on_roots(
            roots in prop::collection::vec(arb_complex(1.5), 0..6),
            leading in arb_complex(2.0),
        ) {
            prop_assume!(leading.norm() > 1e-3);
            let rs = RootSet { roots: roots.clone(), leading };
            let p = Poly::from_roots(&rs);
            prop_assert_eq!(p.degree_bound(), roots.len() + 1);
            let slack = 1e-9 * (1.0 + leading.norm() * 3f64.powi(roots.len() as i32));
            for &r in &roots {
                prop_assert!(p.eval(r).norm() <= slack);
            }
        }

        #[test]
        fn phase_alignment_is_phase_blind(p in arb_poly(7), theta in 0.0..TAU) {
            let rotated = p.scale(Complex64::from_polar(1.0, theta));
            let a = error_up_to_phase(&p, &rotated);
            let scale = p.l2_norm().max(1.0);
            prop_assert!(a.max_err <= 1e-12 * scale);
        }
    }
}
