//! Extended-precision helpers for the contour quadrature.
//!
//! Measurement data with a large dynamic range (circle maxima of `|f|^2` many
//! orders above the minima) leaves plain `f64` interpolant evaluation with an
//! absolute error floor near the minima — fatal for the moment integrals,
//! whose integrand divides by exactly those minima. The types here evaluate
//! the trigonometric interpolant directly from its node samples in
//! double-double arithmetic (~31 significant digits), at quadrature points
//! whose angles are exact rationals of pi, so the only rounding left in a
//! recovered ratio `G1/G0` is relative to the ratio itself.
//!
//! Only the pieces the quadrature needs are implemented: add/sub/mul/div,
//! square root, and sine of pi-rational angles (argument reduction done in
//! integers, then a Taylor tail). This is deliberately not a general-purpose
//! float library.

use num_complex::Complex64;

/// Unevaluated sum of two floats, `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ext {
    pub hi: f64,
    pub lo: f64,
}

/// Sum and exact rounding error of `a + b` (Knuth).
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `two_sum` when `|a| >= |b|` is already known (Dekker).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Product and exact rounding error of `a * b`, via fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub(crate) const EXT_ZERO: Ext = Ext { hi: 0.0, lo: 0.0 };
pub(crate) const EXT_ONE: Ext = Ext { hi: 1.0, lo: 0.0 };
/// pi to double-double precision; `lo` is the rounding error of the `f64`
/// constant.
pub(crate) const EXT_PI: Ext = Ext {
    hi: std::f64::consts::PI,
    lo: 1.2246467991473532e-16,
};

impl Ext {
    #[inline]
    pub fn from_f64(a: f64) -> Self {
        Ext { hi: a, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Ext) -> Ext {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Ext { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Ext {
        Ext {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, other: Ext) -> Ext {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Ext) -> Ext {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Ext { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Ext {
        let (p1, p2) = two_prod(self.hi, other);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * other);
        Ext { hi, lo }
    }

    pub fn div(self, other: Ext) -> Ext {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(hi, lo + q3);
        Ext { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, other: f64) -> Ext {
        self.div(Ext::from_f64(other))
    }

    /// One Newton step on the `f64` square root lifts it to full precision.
    pub fn sqrt(self) -> Ext {
        if self.hi == 0.0 {
            return EXT_ZERO;
        }
        let x = self.hi.sqrt();
        let (p1, p2) = two_prod(x, x);
        let diff = self.sub(Ext { hi: p1, lo: p2 });
        let corr = diff.hi / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, corr);
        Ext { hi, lo }
    }

    #[inline]
    pub fn abs_hi(self) -> f64 {
        self.hi.abs()
    }
}

/// Complex number with `Ext` components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ExtComplex {
    pub re: Ext,
    pub im: Ext,
}

pub(crate) const EXTC_ZERO: ExtComplex = ExtComplex {
    re: EXT_ZERO,
    im: EXT_ZERO,
};

impl ExtComplex {
    #[inline]
    pub fn from_f64(re: f64, im: f64) -> Self {
        ExtComplex {
            re: Ext::from_f64(re),
            im: Ext::from_f64(im),
        }
    }

    #[inline]
    pub fn from_complex(z: Complex64) -> Self {
        Self::from_f64(z.re, z.im)
    }

    #[inline]
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn conj(self) -> ExtComplex {
        ExtComplex {
            re: self.re,
            im: self.im.neg(),
        }
    }

    #[inline]
    pub fn add(self, other: ExtComplex) -> ExtComplex {
        ExtComplex {
            re: self.re.add(other.re),
            im: self.im.add(other.im),
        }
    }

    #[inline]
    pub fn sub(self, other: ExtComplex) -> ExtComplex {
        ExtComplex {
            re: self.re.sub(other.re),
            im: self.im.sub(other.im),
        }
    }

    #[inline]
    pub fn mul(self, other: ExtComplex) -> ExtComplex {
        ExtComplex {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    #[inline]
    pub fn scale_ext(self, s: Ext) -> ExtComplex {
        ExtComplex {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    #[inline]
    pub fn scale_f64(self, s: f64) -> ExtComplex {
        ExtComplex {
            re: self.re.mul_f64(s),
            im: self.im.mul_f64(s),
        }
    }

    #[inline]
    pub fn div_real(self, s: Ext) -> ExtComplex {
        ExtComplex {
            re: self.re.div(s),
            im: self.im.div(s),
        }
    }
}

/// Taylor sine for `|x| <= pi/2`; terms fall below 1e-35 by the 18th.
fn sin_taylor(x: Ext) -> Ext {
    let x2 = x.mul(x);
    let mut term = x;
    let mut sum = x;
    let mut k = 1i64;
    loop {
        term = term.mul(x2).div_f64(-((2 * k) * (2 * k + 1)) as f64);
        sum = sum.add(term);
        k += 1;
        if term.abs_hi() < 1e-35 || k > 40 {
            break;
        }
    }
    sum
}

/// `sin(pi * num / den)` to double-double accuracy. The argument reduction to
/// `[0, 1/2]` happens on the integers, so `num` may be any multiple of the
/// base angle without precision loss. `den > 0`; both well below 2^52.
pub(crate) fn sin_pi_rational(num: i64, den: i64) -> Ext {
    debug_assert!(den > 0 && den < (1 << 52) && num.abs() < (1 << 62));
    let two_den = 2 * den;
    let mut m = num.rem_euclid(two_den);
    let mut sign = 1.0;
    if m >= den {
        m -= den;
        sign = -1.0;
    }
    if 2 * m > den {
        m = den - m;
    }
    if m == 0 {
        return EXT_ZERO;
    }
    let r = Ext::from_f64(m as f64).div_f64(den as f64);
    sin_taylor(r.mul(EXT_PI)).mul_f64(sign)
}

/// `cos(pi * num / den)` via the quarter-turn shift, reduced in integers.
pub(crate) fn cos_pi_rational(num: i64, den: i64) -> Ext {
    sin_pi_rational(2 * num + den, 2 * den)
}

/// Memoized `sin(pi * j / den)` lookups; falls back to direct evaluation when
/// the table would be unreasonably large (very deep quadrature refinements).
pub(crate) struct SinTable {
    den: i64,
    table: Option<Vec<Ext>>,
}

const SIN_TABLE_MAX_DEN: i64 = 1 << 19;

impl SinTable {
    pub fn new(den: i64) -> Self {
        assert!(den > 0);
        let table = if den <= SIN_TABLE_MAX_DEN {
            Some(
                (0..=den / 2)
                    .map(|j| sin_pi_rational(j, den))
                    .collect::<Vec<_>>(),
            )
        } else {
            None
        };
        SinTable { den, table }
    }

    /// `sin(pi * num / self.den)`.
    pub fn sin_pi(&self, num: i64) -> Ext {
        match &self.table {
            None => sin_pi_rational(num, self.den),
            Some(t) => {
                let two_den = 2 * self.den;
                let mut m = num.rem_euclid(two_den);
                let mut sign = 1.0;
                if m >= self.den {
                    m -= self.den;
                    sign = -1.0;
                }
                if 2 * m > self.den {
                    m = self.den - m;
                }
                t[m as usize].mul_f64(sign)
            }
        }
    }
}

/// Node values of a band-limited circle function on the `2n+1` equispaced
/// interpolation nodes; the function is the unique trigonometric interpolant
/// through them.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SampledCircle {
    pub values: Vec<ExtComplex>,
}

impl SampledCircle {
    #[cfg(test)]
    pub fn from_real(samples: &[f64]) -> Self {
        SampledCircle {
            values: samples
                .iter()
                .map(|&s| ExtComplex::from_f64(s, 0.0))
                .collect(),
        }
    }

    pub fn from_complex(samples: &[Complex64]) -> Self {
        SampledCircle {
            values: samples
                .iter()
                .map(|&s| ExtComplex::from_complex(s))
                .collect(),
        }
    }

    pub fn from_ext(values: Vec<ExtComplex>) -> Self {
        SampledCircle { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
}

/// One refinement level of the circle quadrature: `nq` equispaced evaluation
/// points against functions sampled on `ns` nodes, with every sine the
/// cardinal-basis evaluation needs shared through one table of exact
/// pi-rational angles.
pub(crate) struct CircleGrid {
    nq: i64,
    ns: i64,
    sins: SinTable,
}

impl CircleGrid {
    pub fn new(nq: usize, ns: usize) -> Self {
        assert!(nq > 0 && ns % 2 == 1);
        CircleGrid {
            nq: nq as i64,
            ns: ns as i64,
            sins: SinTable::new(nq as i64 * ns as i64),
        }
    }

    /// The evaluation point `z = exp(2 pi i q / nq)` in extended precision.
    pub fn point(&self, q: i64) -> ExtComplex {
        ExtComplex {
            re: cos_pi_rational(2 * q, self.nq),
            im: sin_pi_rational(2 * q, self.nq),
        }
    }

    /// Interpolant value at `exp(2 pi i q / nq)` via the cardinal (Dirichlet
    /// kernel) form: every kernel weight reduces to sines of exact rationals
    /// `pi * j / (nq * ns)`, so no angle ever suffers cancellation.
    pub fn eval(&self, samples: &SampledCircle, q: i64) -> ExtComplex {
        let ns = self.ns;
        debug_assert_eq!(samples.len() as i64, ns);
        let qm = q.rem_euclid(self.nq);
        // Shared numerator: sin(ns * theta_q / 2) up to the (-1)^l sign,
        // with theta_q = 2 pi q / nq. As a fraction of pi/(nq*ns) the
        // argument is qm * ns^2.
        let s_num = self.sins.sin_pi(qm * ns * ns);
        let mut acc = EXTC_ZERO;
        let mut sign = 1.0f64;
        for (l, v) in samples.values.iter().enumerate() {
            let num_d = qm * ns - l as i64 * self.nq;
            let weight = if num_d == 0 {
                EXT_ONE
            } else {
                s_num
                    .mul_f64(sign)
                    .div(self.sins.sin_pi(num_d).mul_f64(ns as f64))
            };
            acc = acc.add(v.scale_ext(weight));
            sign = -sign;
        }
        acc
    }
}
