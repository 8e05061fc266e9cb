//! Seeded synthetic experiments: coincidence histograms and noisy spectra.
//!
//! All randomness comes from ChaCha8 seeded with a `u64` through
//! `SeedableRng::seed_from_u64`, whose output stream is fixed across
//! platforms. Delays are drawn from the ideal correlation trace treated as a
//! probability density over the histogram window; this reproduces histogram
//! shape and counting statistics, not an event-level photon stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::correlation::{convolve_response, CorrelationTrace, DetectorResponse};
use crate::lineshape::{LineshapeParams, Spectrum};
use crate::{Error, Result};

/// Jitter tails beyond this many detector σ are ignored when deciding how
/// much of the ideal trace must be sampled.
const JITTER_MARGIN_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// Exactly `n_events` delays are drawn.
    None,
    /// The number of drawn delays is itself Poisson with mean `n_events`.
    #[default]
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_events: u64,
    /// Full histogram span; bins are centred on `k·bin_width` for
    /// `|k·bin_width| ≤ window_ps/2`.
    pub window_ps: f64,
    pub bin_width_ps: f64,
    #[serde(default)]
    pub noise_model: NoiseModel,
}

impl SynthConfig {
    pub fn new(seed: u64, n_events: u64, window_ps: f64, bin_width_ps: f64) -> Result<Self> {
        let cfg = Self {
            seed,
            n_events,
            window_ps,
            bin_width_ps,
            noise_model: NoiseModel::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_noise(mut self, noise_model: NoiseModel) -> Self {
        self.noise_model = noise_model;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_events < 1 {
            return Err(Error::InvalidParameter("n_events must be at least 1".into()));
        }
        if !self.bin_width_ps.is_finite() || !self.window_ps.is_finite() {
            return Err(Error::NonFinite("synth window"));
        }
        if !(self.bin_width_ps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bin width {} ps must be positive",
                self.bin_width_ps
            )));
        }
        if self.window_ps < 10.0 * self.bin_width_ps {
            return Err(Error::InvalidParameter(format!(
                "window {} ps is narrower than 10 bins of {} ps",
                self.window_ps, self.bin_width_ps
            )));
        }
        Ok(())
    }

    fn half_bins(&self) -> i64 {
        (0.5 * self.window_ps / self.bin_width_ps + 1e-9).floor() as i64
    }

    fn bin_centres(&self) -> Vec<f64> {
        let k = self.half_bins();
        (-k..=k).map(|i| i as f64 * self.bin_width_ps).collect()
    }

    /// Outer edge of the outermost bin.
    fn edge(&self) -> f64 {
        (self.half_bins() as f64 + 0.5) * self.bin_width_ps
    }
}

/// Piecewise-linear density on `[-support, support]` with its running integral.
struct LinearDensity {
    x: Vec<f64>,
    f: Vec<f64>,
    cumulative: Vec<f64>,
}

impl LinearDensity {
    fn new(trace: &CorrelationTrace, support: f64) -> Result<Self> {
        if trace.half_span() < support * (1.0 - 1e-12) {
            return Err(Error::WindowExceedsTrace {
                needed: support,
                available: trace.half_span(),
            });
        }
        let (t, v) = (trace.taus(), trace.values());
        let interp = |tau: f64| {
            let i = (((tau - t[0]) / trace.step()).floor() as usize).min(t.len() - 2);
            let s = (tau - t[i]) / (t[i + 1] - t[i]);
            v[i] + s * (v[i + 1] - v[i])
        };
        let mut x = vec![-support];
        let mut f = vec![interp(-support)];
        for (&ti, &vi) in t.iter().zip(v) {
            if ti > -support && ti < support {
                x.push(ti);
                f.push(vi);
            }
        }
        x.push(support);
        f.push(interp(support));
        let mut cumulative = Vec::with_capacity(x.len());
        cumulative.push(0.0);
        for i in 1..x.len() {
            let area = 0.5 * (f[i - 1] + f[i]) * (x[i] - x[i - 1]);
            cumulative.push(cumulative[i - 1] + area);
        }
        if !(cumulative[x.len() - 1] > 0.0) {
            return Err(Error::ZeroIntensity);
        }
        Ok(Self { x, f, cumulative })
    }

    fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Inverse CDF at `u·total`, `u ∈ [0, 1)`.
    fn quantile(&self, u: f64) -> f64 {
        let target = u * self.total();
        // first node whose running area exceeds the target
        let j = self.cumulative.partition_point(|&c| c <= target).clamp(1, self.x.len() - 1);
        let i = j - 1;
        let h = self.x[j] - self.x[i];
        let (f0, f1) = (self.f[i], self.f[j]);
        let a = (target - self.cumulative[i]) / h;
        // solve f0·s + (f1 − f0)·s²/2 = a for s ∈ [0, 1]
        let disc = (f0 * f0 + 2.0 * (f1 - f0) * a).max(0.0);
        let denom = f0 + disc.sqrt();
        let s = if denom > 0.0 { 2.0 * a / denom } else { 0.0 };
        self.x[i] + h * s.clamp(0.0, 1.0)
    }
}

fn support_for(det: &DetectorResponse, cfg: &SynthConfig) -> f64 {
    cfg.edge() + JITTER_MARGIN_SIGMAS * det.sigma()
}

/// Draws delays from `ideal_trace` restricted to the histogram window (plus a
/// margin of 8 detector σ), blurs each by Gaussian detector jitter and bins
/// the result. Returns raw counts on bins centred at `k·bin_width`.
pub fn sample_coincidences(
    ideal_trace: &CorrelationTrace,
    det: &DetectorResponse,
    cfg: &SynthConfig,
) -> Result<CorrelationTrace> {
    cfg.validate()?;
    let density = LinearDensity::new(ideal_trace, support_for(det, cfg))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = match cfg.noise_model {
        NoiseModel::None => cfg.n_events,
        NoiseModel::Poisson => {
            let dist = Poisson::new(cfg.n_events as f64)
                .map_err(|e| Error::InvalidParameter(format!("event count: {e}")))?;
            let draw: f64 = dist.sample(&mut rng);
            draw as u64
        }
    };
    let k = cfg.half_bins();
    let mut counts = vec![0.0f64; (2 * k + 1) as usize];
    let sigma = det.sigma();
    for _ in 0..n {
        let u: f64 = rng.random();
        let z: f64 = StandardNormal.sample(&mut rng);
        let tau = density.quantile(u) + sigma * z;
        let bin = (tau / cfg.bin_width_ps).round();
        if bin.abs() <= k as f64 {
            counts[(bin as i64 + k) as usize] += 1.0;
        }
    }
    CorrelationTrace::new(cfg.bin_centres(), counts)
}

/// Integral of the piecewise-linear interpolant of `(x, y)` over `[a, b]`.
fn integrate_linear(x: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    let step = x[1] - x[0];
    let at = |t: f64| {
        let i = (((t - x[0]) / step).floor().max(0.0) as usize).min(x.len() - 2);
        let s = (t - x[i]) / step;
        (i, y[i] + s * (y[i + 1] - y[i]))
    };
    let (ia, ya) = at(a);
    let (ib, yb) = at(b);
    if ia == ib {
        return 0.5 * (ya + yb) * (b - a);
    }
    let mut sum = 0.5 * (ya + y[ia + 1]) * (x[ia + 1] - a);
    for i in ia + 1..ib {
        sum += 0.5 * (y[i] + y[i + 1]) * step;
    }
    sum + 0.5 * (y[ib] + yb) * (b - x[ib])
}

/// Expected bin counts for [`sample_coincidences`] without the noise: the
/// detector-convolved trace integrated over each bin, normalised so that the
/// whole sampled support holds `n_events`.
pub fn expected_histogram(
    ideal_trace: &CorrelationTrace,
    det: &DetectorResponse,
    cfg: &SynthConfig,
) -> Result<CorrelationTrace> {
    cfg.validate()?;
    let density = LinearDensity::new(ideal_trace, support_for(det, cfg))?;
    let measured = convolve_response(ideal_trace, det)?;
    let scale = cfg.n_events as f64 / density.total();
    let half = 0.5 * cfg.bin_width_ps;
    let values = cfg
        .bin_centres()
        .iter()
        .map(|&c| scale * integrate_linear(measured.taus(), measured.values(), c - half, c + half))
        .collect();
    CorrelationTrace::new(cfg.bin_centres(), values)
}

/// Pearson `Σ (o − e)²/e / n_bins` over bins with positive expectation.
pub fn reduced_chi2(observed: &CorrelationTrace, expected: &CorrelationTrace) -> Result<f64> {
    if !observed.same_grid(expected) {
        return Err(Error::GridMismatch);
    }
    let (sum, n) = observed
        .values()
        .iter()
        .zip(expected.values())
        .filter(|(_, &e)| e > 0.0)
        .fold((0.0, 0usize), |(s, n), (&o, &e)| (s + (o - e) * (o - e) / e, n + 1));
    if n == 0 {
        return Err(Error::DegenerateData("no bins with positive expectation".into()));
    }
    Ok(sum / n as f64)
}

/// Samples `params` on `n_points` evenly spaced energies spanning `span`
/// around the line centre, each multiplied by `1 + noise·N(0, 1)`.
/// `noise` is a fraction (0.02 for 2 %); negative draws are clipped to zero.
pub fn make_spectrum(
    params: &LineshapeParams,
    n_points: usize,
    span: f64,
    noise: f64,
    seed: u64,
) -> Result<Spectrum> {
    params.validate()?;
    if !span.is_finite() || !noise.is_finite() {
        return Err(Error::NonFinite("spectrum span or noise"));
    }
    if noise < 0.0 {
        return Err(Error::InvalidParameter(format!("noise level {noise} is negative")));
    }
    let required = 3.0 * params.fwhm();
    if span < required {
        return Err(Error::SpanTooNarrow { span, required });
    }
    if n_points < Spectrum::MIN_POINTS {
        return Err(Error::InvalidSpectrum(format!(
            "{n_points} points, need at least {}",
            Spectrum::MIN_POINTS
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = params.center - 0.5 * span;
    let step = span / (n_points - 1) as f64;
    let energies: Vec<f64> = (0..n_points).map(|i| lo + step * i as f64).collect();
    let intensities = energies
        .iter()
        .map(|&e| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (params.value(e) * (1.0 + noise * z)).max(0.0)
        })
        .collect();
    Spectrum::new(energies, intensities)
}
