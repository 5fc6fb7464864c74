//! Reproducible numerical experiments: noise sweeps over random signals with
//! roots bounded away from the unit circle, and empirical injectivity checks
//! for the point designs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::Write;

use crate::error::{Error, Result};
use crate::measurements::{measure, measure_4d4, InjectivityDesign, NoiseSpec};
use crate::polynomial::{error_up_to_phase, Poly, RootSet};
use crate::recovery::{bounds_for, moments_from_ratio, recover, RecoveryConfig, StabilityBounds};

/// Random signal family: degree bound `d`, roots kept outside the annulus
/// `|1 - |z|| < annulus_gap` and inside `|z| <= root_radius_max`, unimodular
/// leading coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub d: usize,
    /// Radial clearance kept between every root and the unit circle.
    pub annulus_gap: f64,
    /// Cap on the modulus of outer roots.
    pub root_radius_max: f64,
    pub seed: u64,
}

impl SignalSpec {
    pub fn new(d: usize, seed: u64) -> Self {
        Self {
            d,
            annulus_gap: 0.2,
            root_radius_max: 3.0,
            seed,
        }
    }
}

/// Draws the signal a spec describes, returning both the coefficients and
/// the root set behind them (the ground truth sweeps measure against).
/// Deterministic in the spec.
pub fn gen_signal(spec: &SignalSpec) -> (Poly, RootSet) {
    assert!(spec.d >= 1, "degree bound must be at least 1");
    assert!(
        spec.annulus_gap > 0.0 && spec.annulus_gap < 1.0,
        "annulus gap must sit in (0, 1)"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut roots = Vec::with_capacity(spec.d - 1);
    while roots.len() < spec.d - 1 {
        let r = rng.gen_range(0.0..=spec.root_radius_max);
        let theta = rng.gen_range(0.0..TAU);
        if (1.0 - r).abs() < spec.annulus_gap {
            continue;
        }
        roots.push(Complex64::from_polar(r, theta));
    }
    let leading = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
    let rs = RootSet { roots, leading };
    (Poly::from_roots(&rs), rs)
}

/// Power sums of a signal's roots strictly inside the unit disk, orders
/// `0..=kmax` — the quantity the contour quadrature estimates.
pub fn inner_power_sums(rs: &RootSet, kmax: usize) -> Vec<Complex64> {
    let inner: Vec<Complex64> = rs
        .roots
        .iter()
        .copied()
        .filter(|z| z.norm() < 1.0)
        .collect();
    (0..=kmax)
        .map(|k| inner.iter().map(|z| z.powu(k as u32)).sum::<Complex64>())
        .collect()
}

/// Count of roots strictly inside the unit disk.
pub fn inner_root_count(rs: &RootSet) -> usize {
    rs.roots.iter().filter(|z| z.norm() < 1.0).count()
}

/// Count of roots strictly outside the closed unit disk.
pub fn outer_root_count(rs: &RootSet) -> usize {
    rs.roots.iter().filter(|z| z.norm() > 1.0).count()
}

/// Splitmix64 chain: one independent sub-seed per (stream, index) pair, so
/// trials can be re-run in any order without touching each other's draws.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut x = base
        .wrapping_add(stream.wrapping_mul(0x9e3779b97f4a7c15))
        .wrapping_add(index.wrapping_mul(0xbf58476d1ce4e5b9));
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// One (noise level, trial) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Per-measurement noise radius used for this trial.
    pub epsilon: f64,
    pub trial: usize,
    /// Coefficientwise recovery error after the best global phase alignment;
    /// infinite when recovery failed outright.
    pub coeff_err: f64,
    /// Worst moment estimate error against the signal's true inner power
    /// sums; infinite when the quadrature refused the data.
    pub moment_err_max: f64,
    /// Certified moment-error radius at this noise level (from the signal's
    /// own circle constants), for plotting against `moment_err_max`.
    pub gamma_bound: f64,
    /// Whether the rounded inner root count matched the signal.
    pub n0_correct: bool,
    /// `epsilon` in units of the certified recovery radius.
    pub epsilon_over_eps0: f64,
}

impl SweepRow {
    /// Parses one non-header CSV line as written by [`emit_csv`].
    pub fn parse_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 7 {
            return Err(Error::InvalidInput(format!(
                "expected 7 CSV fields, got {}: {line:?}",
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            match s {
                "inf" => Ok(f64::INFINITY),
                _ => s
                    .parse()
                    .map_err(|e| Error::InvalidInput(format!("bad float {s:?}: {e}"))),
            }
        };
        Ok(SweepRow {
            epsilon: num(fields[0])?,
            trial: fields[1]
                .parse()
                .map_err(|e| Error::InvalidInput(format!("bad trial {:?}: {e}", fields[1])))?,
            coeff_err: num(fields[2])?,
            moment_err_max: num(fields[3])?,
            gamma_bound: num(fields[4])?,
            n0_correct: match fields[5] {
                "true" => true,
                "false" => false,
                other => {
                    return Err(Error::InvalidInput(format!("bad bool {other:?}")));
                }
            },
            epsilon_over_eps0: num(fields[6])?,
        })
    }
}

/// Sweep artifact: the signal's constants plus one row per (level, trial).
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub spec: SignalSpec,
    pub epsilon0: f64,
    pub alpha: f64,
    pub min_modulus: f64,
    pub rows: Vec<SweepRow>,
}

/// Measures one random signal at every noise level in `eps_grid`, `trials`
/// times each, and records recovery and moment errors against the known
/// ground truth. Fully deterministic in `spec`: trial `t` at grid index `ei`
/// draws its noise from `derive_seed(spec.seed, ei, t)`.
pub fn noise_sweep(spec: &SignalSpec, eps_grid: &[f64], trials: usize) -> Result<SweepReport> {
    if eps_grid.is_empty() || trials == 0 {
        return Err(Error::InvalidInput(
            "need at least one noise level and one trial".into(),
        ));
    }
    let (f, rs) = gen_signal(spec);
    let bounds: StabilityBounds = bounds_for(&f, (16 * spec.d).max(8192))?;
    let n_inner = inner_root_count(&rs);
    let truth_mu = inner_power_sums(&rs, n_inner);

    let mut rows = Vec::with_capacity(eps_grid.len() * trials);
    for (ei, &eps) in eps_grid.iter().enumerate() {
        if eps.is_nan() || eps < 0.0 {
            return Err(Error::InvalidInput(format!("bad noise level {eps}")));
        }
        for t in 0..trials {
            let seed = derive_seed(spec.seed, ei as u64, t as u64);
            let ms = measure(&f, &NoiseSpec::uniform(eps, seed));
            // The p-level sup error of the interpolants is at most (2d-1) eps.
            let gamma_bound = bounds.gamma((2 * spec.d - 1) as f64 * eps);

            let rec = recover(&ms, &RecoveryConfig::default());
            let (coeff_err, moment_err_max, n0_correct) = match rec {
                Ok(r) => {
                    let coeff_err = error_up_to_phase(&f, &r.coeffs).max_err;
                    let (g0, g1) = crate::measurements::polarize(&ms);
                    let moment_err_max = match moments_from_ratio(&g1, &g0, n_inner, 0) {
                        Ok(est) => (0..=n_inner)
                            .map(|k| (est.mu[k] - truth_mu[k]).norm())
                            .fold(0.0, f64::max),
                        Err(_) => f64::INFINITY,
                    };
                    (coeff_err, moment_err_max, r.n_inner == n_inner)
                }
                Err(_) => (f64::INFINITY, f64::INFINITY, false),
            };
            rows.push(SweepRow {
                epsilon: eps,
                trial: t,
                coeff_err,
                moment_err_max,
                gamma_bound,
                n0_correct,
                epsilon_over_eps0: eps / bounds.epsilon0,
            });
        }
    }
    Ok(SweepReport {
        spec: *spec,
        epsilon0: bounds.epsilon0,
        alpha: bounds.alpha,
        min_modulus: bounds.min_modulus,
        rows,
    })
}

/// Writes sweep rows as CSV. Infinities appear as `inf`; floats round-trip
/// bit-for-bit through [`SweepRow::parse_line`].
pub fn emit_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "epsilon,trial,coeff_err,moment_err_max,gamma_bound,n0_correct,epsilon_over_eps0"
    )?;
    let fmt = |v: f64| -> String {
        if v.is_infinite() {
            "inf".to_string()
        } else {
            format!("{v:.16e}")
        }
    };
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(r.epsilon),
            r.trial,
            fmt(r.coeff_err),
            fmt(r.moment_err_max),
            fmt(r.gamma_bound),
            r.n0_correct,
            fmt(r.epsilon_over_eps0)
        )?;
    }
    Ok(())
}

/// Result of an empirical injectivity run over random signal pairs.
#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub d: usize,
    pub pairs: usize,
    /// Smallest sup-norm separation of the measurement vectors seen across
    /// all pairs.
    pub min_separation: f64,
    /// Pairs whose measurements were numerically indistinguishable.
    pub collisions: usize,
}

/// Draws `pairs` random polynomial pairs of degree bound `d` (coefficients in
/// the unit box, resampled until the pair is genuinely distinct up to global
/// phase) and measures both with the `4d-4`-point design at angle `alpha`.
/// Reports the worst separation between the measurement vectors.
pub fn injectivity_trial(
    d: usize,
    pairs: usize,
    alpha: f64,
    seed: u64,
) -> Result<InjectivityReport> {
    let design = InjectivityDesign::new(d, alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Poly {
        Poly::new(
            (0..d)
                .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect(),
        )
    };
    let mut min_separation = f64::INFINITY;
    let mut collisions = 0;
    for _ in 0..pairs {
        let (f, g) = loop {
            let f = draw(&mut rng);
            let g = draw(&mut rng);
            // Reject pairs equal up to a unimodular factor: those genuinely
            // share measurements and say nothing about injectivity.
            if error_up_to_phase(&f, &g).max_err > 0.1 {
                break (f, g);
            }
        };
        let mf = measure_4d4(&f, &design, &NoiseSpec::noiseless());
        let mg = measure_4d4(&g, &design, &NoiseSpec::noiseless());
        let sep = mf
            .iter()
            .zip(&mg)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if sep <= 1e-8 {
            collisions += 1;
        }
        min_separation = min_separation.min(sep);
    }
    Ok(InjectivityReport {
        d,
        pairs,
        min_separation,
        collisions,
    })
}
