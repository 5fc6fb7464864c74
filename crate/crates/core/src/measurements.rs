//! Magnitude measurement designs.
//!
//! The workhorse design takes `8d-4` squared magnitudes of a degree-bound-`d`
//! polynomial `f` on the unit circle: the plain values `|f(w^l)|^2` at the
//! `2d-1` roots of unity `w^l`, plus three shifted families
//! `|f(w^l) + v^j f'(w^l)|^2` for the cube roots of unity `v^j`. Averaging the
//! shifted families against `conj(v)^j` cancels everything except the cross
//! term, so the pair of functions `|f|^2` and `f' * conj(f)` on the circle —
//! and with them the moments of `f' / f` — become available from magnitudes
//! alone.
//!
//! A second, leaner design ([`InjectivityDesign`], `4d-4` points) spreads
//! plain magnitude samples over two circles; it separates signals but comes
//! with no reconstruction routine, so this module only builds it and evaluates
//! magnitudes on it.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{
    cos_pi_rational, sin_pi_rational, Ext, ExtComplex, SampledCircle, EXTC_ZERO,
};
use crate::polynomial::Poly;
use crate::serde_util::{complex_pair, complex_vec};
use crate::trig_interp::TrigPoly;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Horner evaluation of an ordinary polynomial at an extended-precision point.
fn eval_ext(coeffs: &[Complex64], z: ExtComplex) -> ExtComplex {
    let mut acc = EXTC_ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc.mul(z).add(ExtComplex::from_complex(c));
    }
    acc
}

/// The cube root of unity `v = exp(2 pi i/3)` and its square, in extended
/// precision: `(-1/2, +-sqrt(3)/2)`.
fn nu_powers_ext() -> [ExtComplex; 2] {
    let half_sqrt3 = Ext::from_f64(0.75).sqrt();
    let nu = ExtComplex {
        re: Ext::from_f64(-0.5),
        im: half_sqrt3,
    };
    let nu2 = ExtComplex {
        re: Ext::from_f64(-0.5),
        im: half_sqrt3.neg(),
    };
    [nu, nu2]
}

/// Shape of the additive measurement perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDistribution {
    /// Independent uniform draws from `[-epsilon, epsilon]`.
    UniformSymmetric,
    /// `+epsilon` or `-epsilon` with independent random signs — the worst
    /// magnitude the model allows on every single measurement.
    AdversarialSign,
}

/// Additive noise model for magnitude measurements; fully determined by the
/// seed, so measurement runs replay exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub seed: u64,
    pub distribution: NoiseDistribution,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self {
            epsilon: 0.0,
            seed: 0,
            distribution: NoiseDistribution::UniformSymmetric,
        }
    }

    pub fn uniform(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            distribution: NoiseDistribution::UniformSymmetric,
        }
    }

    pub fn adversarial(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            distribution: NoiseDistribution::AdversarialSign,
        }
    }
}

/// Per-call noise stream with a fixed draw order.
struct NoiseSource {
    rng: ChaCha8Rng,
    epsilon: f64,
    distribution: NoiseDistribution,
}

impl NoiseSource {
    fn new(spec: &NoiseSpec) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            epsilon: spec.epsilon,
            distribution: spec.distribution,
        }
    }

    fn next(&mut self) -> f64 {
        // Draw the unit perturbation even when epsilon is zero so the stream
        // position depends only on the draw count, not on the noise level.
        match self.distribution {
            NoiseDistribution::UniformSymmetric => self.epsilon * self.rng.gen_range(-1.0..=1.0),
            NoiseDistribution::AdversarialSign => {
                if self.rng.gen::<bool>() {
                    self.epsilon
                } else {
                    -self.epsilon
                }
            }
        }
    }
}

/// The `8d-4` squared-magnitude values of one measurement pass.
///
/// `base[l] = |f(w^l)|^2` for the `2d-1` roots of unity `w^l`, and
/// `shifted[j-1][l] = |f(w^l) + v^j f'(w^l)|^2` for the cube roots of unity
/// `v^j`, `j = 1..3` — each possibly perturbed. `epsilon_claimed` carries the
/// noise level the producer asserts for downstream bound checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub d: usize,
    pub base: Vec<f64>,
    pub shifted: [Vec<f64>; 3],
    pub epsilon_claimed: f64,
}

impl MeasurementSet {
    /// Total number of scalar measurements, `8d - 4`.
    pub fn total_count(&self) -> usize {
        self.base.len() + self.shifted.iter().map(Vec::len).sum::<usize>()
    }

    /// Structural sanity check used when sets arrive from files.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInput("measurement set needs d >= 1".into()));
        }
        let count = 2 * self.d - 1;
        if self.base.len() != count || self.shifted.iter().any(|s| s.len() != count) {
            return Err(Error::InvalidInput(format!(
                "measurement set for d = {} needs {count} values per family",
                self.d
            )));
        }
        Ok(())
    }
}

/// Takes the full `8d-4` magnitude measurement of `f` under the given noise
/// model, with `d` the degree bound of `f`.
pub fn measure(f: &Poly, noise: &NoiseSpec) -> MeasurementSet {
    let d = f.degree_bound();
    let count = 2 * d - 1;
    let deriv = f.derivative();

    // Evaluate f and f' at the exact root-of-unity nodes in extended
    // precision. The circle minima of |f|^2 can sit ten orders of magnitude
    // below the coefficient scale; plain f64 Horner would hand downstream
    // code magnitudes that are pure rounding noise there.
    let f_vals: Vec<ExtComplex> = (0..count as i64)
        .map(|l| {
            let z = ExtComplex {
                re: cos_pi_rational(2 * l, count as i64),
                im: sin_pi_rational(2 * l, count as i64),
            };
            eval_ext(f.coeffs(), z)
        })
        .collect();
    let d_vals: Vec<ExtComplex> = (0..count as i64)
        .map(|l| {
            let z = ExtComplex {
                re: cos_pi_rational(2 * l, count as i64),
                im: sin_pi_rational(2 * l, count as i64),
            };
            eval_ext(deriv.coeffs(), z)
        })
        .collect();
    let [nu1, nu2] = nu_powers_ext();
    let norm_sqr = |v: ExtComplex| v.re.mul(v.re).add(v.im.mul(v.im)).to_f64();

    let mut source = NoiseSource::new(noise);
    let base: Vec<f64> = f_vals
        .iter()
        .map(|&v| norm_sqr(v) + source.next())
        .collect();
    let shifted = [0usize, 1, 2].map(|j| {
        f_vals
            .iter()
            .zip(&d_vals)
            .map(|(&fv, &dv)| {
                let nu_j = match j {
                    0 => nu1,
                    1 => nu2,
                    _ => ExtComplex::from_f64(1.0, 0.0),
                };
                norm_sqr(fv.add(nu_j.mul(dv))) + source.next()
            })
            .collect()
    });

    MeasurementSet {
        d,
        base,
        shifted,
        epsilon_claimed: noise.epsilon,
    }
}

/// Turns a measurement set into the two circle functions recovery feeds on:
/// `G0`, interpolating the base samples (`= |f|^2` on clean data), and `G1`,
/// the polarized combination `(1/3) sum_j conj(v)^j g_j` of the shifted
/// interpolants (`= f' * conj(f)` on clean data). Both have bandwidth `d-1`.
///
/// Per-sample noise of size `eps` can grow by at most a factor `2d-1` in
/// either interpolant's sup norm on the circle.
pub fn polarize(ms: &MeasurementSet) -> (TrigPoly, TrigPoly) {
    let n = ms.d - 1;
    let g0 =
        TrigPoly::interpolate_real(&ms.base, n).expect("measurement set carries 2d-1 base samples");
    let g_shift: Vec<TrigPoly> = ms
        .shifted
        .iter()
        .map(|s| {
            TrigPoly::interpolate_real(s, n).expect("measurement set carries 2d-1 shifted samples")
        })
        .collect();

    let nu = Complex64::from_polar(1.0, TAU / 3.0);
    let mut coeffs = vec![ZERO; 2 * n + 1];
    for (slot, coeff) in coeffs.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (j, g) in g_shift.iter().enumerate() {
            let weight = nu.conj().powu(j as u32 + 1);
            acc += weight * g.coeffs()[slot];
        }
        *coeff = acc / 3.0;
    }

    // Node values of G1 in extended precision: the same polarization applied
    // per node, with exact cube-root constants. The cross term is often a
    // near-total cancellation of the three shifted samples, so keeping the
    // combination in extended precision preserves whatever accuracy the data
    // itself carries.
    let [nu1, nu2] = nu_powers_ext();
    let weights = [nu1.conj(), nu2.conj(), ExtComplex::from_f64(1.0, 0.0)];
    let values: Vec<ExtComplex> = (0..2 * n + 1)
        .map(|l| {
            let mut acc = EXTC_ZERO;
            for (j, w) in weights.iter().enumerate() {
                acc = acc.add(w.scale_f64(ms.shifted[j][l]));
            }
            acc.div_real(Ext::from_f64(3.0))
        })
        .collect();

    let g1 = TrigPoly::with_node_samples(coeffs, n, SampledCircle::from_ext(values))
        .expect("coefficient count matches bandwidth");
    (g0, g1)
}

/// The `4d-4`-point separation design: `2d-1` equidistant points on the
/// circle `S_alpha` (the image of the real axis under a Moebius map sending
/// `0 -> w`, `infinity -> 1`), plus the roots of unity `w^l`, `l = 2..2d-2`.
///
/// This design separates polynomials up to a unimodular constant but is not
/// paired with any reconstruction algorithm here — it exists to be sampled
/// and compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityDesign {
    pub d: usize,
    pub alpha: f64,
    /// Equidistant points on `S_alpha`, starting at local angle 0.
    #[serde(with = "complex_vec")]
    pub points_s_alpha: Vec<Complex64>,
    /// Roots of unity `w^l` for `l = 2..2d-2`.
    #[serde(with = "complex_vec")]
    pub points_s: Vec<Complex64>,
    #[serde(with = "complex_pair")]
    pub center: Complex64,
    pub radius: f64,
}

/// Circumcircle through three points, `None` when they are collinear.
fn circumcircle(a: Complex64, b: Complex64, c: Complex64) -> Option<(Complex64, f64)> {
    let w = (c - a) / (b - a);
    if w.im.abs() < 1e-12 {
        return None;
    }
    let u = Complex64::new(0.5, (w.norm_sqr() - w.re) / (2.0 * w.im));
    let center = a + (b - a) * u;
    Some((center, (center - a).norm()))
}

impl InjectivityDesign {
    /// Builds the design for degree bound `d >= 2` and twist angle `alpha`.
    ///
    /// `alpha` within 1e-6 of a multiple of pi flattens `S_alpha` into a line
    /// and is rejected. (Rational multiples of pi also void the separation
    /// guarantee in exact arithmetic; that cannot be checked in floating
    /// point and stays the caller's responsibility.)
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(
                "separation design needs degree bound d >= 2".into(),
            ));
        }
        let rem = alpha.rem_euclid(PI);
        if rem < 1e-6 || PI - rem < 1e-6 {
            return Err(Error::InvalidDesign(format!(
                "alpha = {alpha} puts the map's pole on the real axis; S_alpha degenerates to a line"
            )));
        }

        let count = 2 * d - 1;
        let omega = Complex64::from_polar(1.0, TAU / count as f64);
        let eia = Complex64::from_polar(1.0, alpha);
        let phi = |z: Complex64| (eia * z - omega) / (eia * z - Complex64::new(1.0, 0.0));

        // phi(0) = w, phi(inf) = 1, and one more image pins the circle.
        let (center, radius) = circumcircle(
            omega,
            Complex64::new(1.0, 0.0),
            phi(Complex64::new(1.0, 0.0)),
        )
        .ok_or_else(|| {
            Error::InvalidDesign(format!("alpha = {alpha} yields collinear circle points"))
        })?;

        let points_s_alpha: Vec<Complex64> = (0..count)
            .map(|l| center + Complex64::from_polar(radius, TAU * l as f64 / count as f64))
            .collect();
        let points_s: Vec<Complex64> = (2..count)
            .map(|l| Complex64::from_polar(1.0, TAU * l as f64 / count as f64))
            .collect();

        Ok(Self {
            d,
            alpha,
            points_s_alpha,
            points_s,
            center,
            radius,
        })
    }

    /// The Moebius map behind `S_alpha`; exposed for validation.
    pub fn phi_alpha(&self, z: Complex64) -> Complex64 {
        let count = 2 * self.d - 1;
        let omega = Complex64::from_polar(1.0, TAU / count as f64);
        let eia = Complex64::from_polar(1.0, self.alpha);
        (eia * z - omega) / (eia * z - Complex64::new(1.0, 0.0))
    }

    /// Number of sample points, `4d - 4`.
    pub fn total_points(&self) -> usize {
        self.points_s_alpha.len() + self.points_s.len()
    }
}

/// Squared magnitudes of `f` on the separation design, in design order
/// (`points_s_alpha` first), each perturbed per the noise model.
pub fn measure_4d4(f: &Poly, design: &InjectivityDesign, noise: &NoiseSpec) -> Vec<f64> {
    assert_eq!(
        f.degree_bound(),
        design.d,
        "design degree bound must match the polynomial"
    );
    let mut source = NoiseSource::new(noise);
    design
        .points_s_alpha
        .iter()
        .chain(&design.points_s)
        .map(|&z| f.eval(z).norm_sqr() + source.next())
        .collect()
}

/// Coefficients of `(1 + sign*z)^p` for `p = 0..=max_pow`, built by repeated
/// convolution so no large binomials are formed directly.
fn binomial_powers(max_pow: usize, sign: f64) -> Vec<Vec<f64>> {
    let mut table: Vec<Vec<f64>> = vec![vec![1.0]];
    for p in 1..=max_pow {
        let prev = &table[p - 1];
        let mut next = vec![0.0; p + 1];
        for (i, &v) in prev.iter().enumerate() {
            next[i] += v;
            next[i + 1] += sign * v;
        }
        table.push(next);
    }
    table
}

fn conv_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Disk-to-half-plane change of variable
/// `W f(z) = (1+z)^{k-1} f(-(1-z)/(1+z))`, expanded into coefficients.
///
/// For `f` of degree bound at most `k` the result is a polynomial of degree
/// bound `k`: each term `c_j (-1)^j (1-z)^j (1+z)^{k-1-j}` has degree `k-1`.
pub fn cayley_transform(f: &Poly, k: usize) -> Poly {
    assert!(k >= 1, "target degree bound must be at least 1");
    assert!(
        f.degree_bound() <= k,
        "degree bound {} exceeds transform order {k}",
        f.degree_bound()
    );
    let minus = binomial_powers(k - 1, -1.0);
    let plus = binomial_powers(k - 1, 1.0);
    let mut acc = vec![ZERO; k];
    for (j, &cj) in f.coeffs().iter().enumerate() {
        if cj == ZERO {
            continue;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = conv_real(&minus[j], &plus[k - 1 - j]);
        for (m, &t) in term.iter().enumerate() {
            acc[m] += cj * (sign * t);
        }
    }
    Poly::new(acc)
}
