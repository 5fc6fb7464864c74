//! Trigonometric polynomials on the unit circle and equispaced interpolation.
//!
//! A trig polynomial of bandwidth `n` is `t(z) = sum_{k=-n..n} a_k z^k` for
//! `|z| = 1`. Sampling it at the `2n+1` roots of unity determines it exactly,
//! and the inverse map is a plain discrete Fourier sum — evaluated directly in
//! O(n^2), which is exact-in-structure and fast enough for the bandwidths this
//! crate meets (hundreds). Anything with bandwidth above `n` aliases: `z^{n+1}`
//! and `z^{-n}` agree on all sample nodes, so the interpolant folds high
//! frequencies back into the band.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extended::SampledCircle;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Trig polynomial `sum_{k=-n..n} a_k z^k`; coefficient `a_k` lives at slot
/// `k + n`.
///
/// When built by interpolation the original node samples are kept alongside
/// the coefficients; downstream quadrature can then re-evaluate the
/// interpolant in extended precision straight from the data, sidestepping the
/// absolute error floor that coefficient round-trips impose on samples many
/// orders of magnitude below the coefficient scale.
#[derive(Debug, Clone)]
pub struct TrigPoly {
    coeffs: Vec<Complex64>,
    bandwidth: usize,
    real_valued: bool,
    samples: Option<SampledCircle>,
}

impl PartialEq for TrigPoly {
    /// Mathematical content only; retained node samples are an evaluation
    /// cache, not identity.
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.bandwidth == other.bandwidth
    }
}

/// Square root of the mean of squared-magnitude samples, i.e. the L2 norm of
/// the underlying coefficients when the samples come from a full set of
/// interpolation nodes.
#[derive(Debug, Clone, Copy)]
pub struct ParsevalNorm {
    pub value: f64,
    /// Noise can push the sample mean below zero; the norm is then clamped to
    /// zero and this flag is raised.
    pub clamped: bool,
}

fn hermitian_within(coeffs: &[Complex64], bandwidth: usize, tol: f64) -> bool {
    let n = bandwidth as i64;
    (0..=n).all(|k| {
        let pos = coeffs[(k + n) as usize];
        let neg = coeffs[(n - k) as usize];
        (neg - pos.conj()).norm() <= tol
    })
}

impl TrigPoly {
    /// Wraps a coefficient vector of length `2*bandwidth + 1`.
    pub fn from_coeffs(coeffs: Vec<Complex64>, bandwidth: usize) -> Result<Self> {
        if coeffs.len() != 2 * bandwidth + 1 {
            return Err(Error::InvalidInput(format!(
                "bandwidth {bandwidth} needs {} coefficients, got {}",
                2 * bandwidth + 1,
                coeffs.len()
            )));
        }
        let real_valued = hermitian_within(&coeffs, bandwidth, 1e-12);
        Ok(Self {
            coeffs,
            bandwidth,
            real_valued,
            samples: None,
        })
    }

    /// Recovers the coefficients of a bandwidth-`n` trig polynomial from its
    /// values at the `2n+1` roots of unity, ordered by node index.
    ///
    /// `a_k = (1/(2n+1)) * sum_l samples[l] * w^{-kl}` with `w = e^{2 pi i/(2n+1)}`.
    pub fn interpolate(samples: &[Complex64], n: usize) -> Result<Self> {
        let count = 2 * n + 1;
        if samples.len() != count {
            return Err(Error::InvalidInput(format!(
                "bandwidth {n} interpolation needs {count} samples, got {}",
                samples.len()
            )));
        }
        let mut coeffs = vec![ZERO; count];
        for (slot, coeff) in coeffs.iter_mut().enumerate() {
            let k = slot as i64 - n as i64;
            let mut acc = ZERO;
            for (l, &s) in samples.iter().enumerate() {
                // Reduce k*l modulo the node count before building the phase
                // so large products cannot degrade the angle.
                let kl = (k * l as i64).rem_euclid(count as i64);
                let angle = -TAU * kl as f64 / count as f64;
                acc += s * Complex64::from_polar(1.0, angle);
            }
            *coeff = acc / count as f64;
        }
        let real_valued = hermitian_within(&coeffs, n, 1e-12);
        Ok(Self {
            coeffs,
            bandwidth: n,
            real_valued,
            samples: Some(SampledCircle::from_complex(samples)),
        })
    }

    /// [`TrigPoly::interpolate`] for real-valued samples (magnitude data).
    /// The result always carries Hermitian symmetry `a_{-k} = conj(a_k)`.
    pub fn interpolate_real(samples: &[f64], n: usize) -> Result<Self> {
        let complex: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        Self::interpolate(&complex, n)
    }

    /// Wraps coefficients together with the extended-precision node samples
    /// they were derived from (used when a combination of measured rows is
    /// formed in extended precision and both views must stay available).
    pub(crate) fn with_node_samples(
        coeffs: Vec<Complex64>,
        bandwidth: usize,
        samples: SampledCircle,
    ) -> Result<Self> {
        if samples.len() != 2 * bandwidth + 1 {
            return Err(Error::InvalidInput(format!(
                "bandwidth {bandwidth} needs {} node samples, got {}",
                2 * bandwidth + 1,
                samples.len()
            )));
        }
        let mut t = Self::from_coeffs(coeffs, bandwidth)?;
        t.samples = Some(samples);
        Ok(t)
    }

    /// The interpolation-node samples this polynomial was built from, if it
    /// came from data rather than synthesized coefficients.
    pub(crate) fn node_samples(&self) -> Option<&SampledCircle> {
        self.samples.as_ref()
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Coefficient slots ordered `a_{-n}, ..., a_0, ..., a_n`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient `a_k`; zero outside the band.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.bandwidth as i64;
        if k < -n || k > n {
            return ZERO;
        }
        self.coeffs[(k + n) as usize]
    }

    /// Whether the coefficients carry Hermitian symmetry within 1e-12, i.e.
    /// the polynomial is real-valued on the circle.
    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    /// Evaluates at `z`, meant for `|z| = 1` (within ~1e-9): the negative
    /// powers are formed from `1/z`, which drifts off the circle otherwise.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        debug_assert!(
            (z.norm() - 1.0).abs() < 1e-9,
            "trig evaluation expects |z| = 1, got {}",
            z.norm()
        );
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.inv().powu(self.bandwidth as u32)
    }
}

/// Normalized Dirichlet kernel `(1/(2n+1)) sum_{j=-n..n} z^j` for `|z| = 1`.
///
/// Equals 1 at `z = 1` and vanishes at every other `(2n+1)`-th root of unity,
/// which is exactly the cardinal property equispaced interpolation rests on.
pub fn dirichlet_kernel(n: usize, z: Complex64) -> Complex64 {
    debug_assert!((z.norm() - 1.0).abs() < 1e-9);
    let mut acc = Complex64::new(1.0, 0.0);
    let zinv = z.inv();
    let mut pos = Complex64::new(1.0, 0.0);
    let mut neg = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        pos *= z;
        neg *= zinv;
        acc += pos + neg;
    }
    acc / (2 * n + 1) as f64
}

/// Norm of the signal behind a full node set of `|f|^2` samples:
/// `sqrt(mean(samples))`. By the discrete Parseval identity the mean of the
/// node values of `|f|^2` equals the sum of squared coefficient magnitudes.
pub fn parseval_norm(samples: &[f64]) -> ParsevalNorm {
    assert!(!samples.is_empty(), "parseval norm needs samples");
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    if mean < 0.0 {
        ParsevalNorm {
            value: 0.0,
            clamped: true,
        }
    } else {
        ParsevalNorm {
            value: mean.sqrt(),
            clamped: false,
        }
    }
}
