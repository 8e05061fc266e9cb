//! Second-order correlation functions of one source (HBT) and of two
//! independent CW sources interfering on a beamsplitter (HOM), with and
//! without the Gaussian timing response of the coincidence electronics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{FWHM_PER_SIGMA, HBAR_UEV_PS};
use crate::lineshape::{coherence_time_from_lorentzian, jitter_sigma_from_gaussian};
use crate::{Error, Result};

/// One single-photon emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterModel {
    /// Radiative lifetime τ_r (ps).
    pub tau_r: f64,
    /// g²(0) floor B.
    pub background_b: f64,
    /// First-order coherence time τ_c (ps).
    pub tau_c: f64,
    /// Standard deviation of the Gaussian spectral jitter (µeV).
    pub jitter_sigma: f64,
    /// Centre emission energy (µeV).
    pub center_energy: f64,
    /// Mean photon rate, arbitrary units.
    pub intensity: f64,
}

impl EmitterModel {
    pub fn new(
        tau_r: f64,
        background_b: f64,
        tau_c: f64,
        jitter_sigma: f64,
        center_energy: f64,
        intensity: f64,
    ) -> Result<Self> {
        let m = Self {
            tau_r,
            background_b,
            tau_c,
            jitter_sigma,
            center_energy,
            intensity,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds an emitter from spectral widths: a Lorentzian (homogeneous)
    /// FWHM fixing τ_c and a Gaussian FWHM fixing the jitter.
    pub fn from_linewidths(
        tau_r: f64,
        background_b: f64,
        lorentzian_fwhm: f64,
        gaussian_fwhm: f64,
        center_energy: f64,
        intensity: f64,
    ) -> Result<Self> {
        Self::new(
            tau_r,
            background_b,
            coherence_time_from_lorentzian(lorentzian_fwhm)?,
            jitter_sigma_from_gaussian(gaussian_fwhm)?,
            center_energy,
            intensity,
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_r", self.tau_r),
            ("background_b", self.background_b),
            ("tau_c", self.tau_c),
            ("jitter_sigma", self.jitter_sigma),
            ("center_energy", self.center_energy),
            ("intensity", self.intensity),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.tau_r <= 0.0 || self.tau_c <= 0.0 {
            return Err(Error::InvalidParameter(
                "lifetime and coherence time must be > 0".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.background_b) {
            return Err(Error::InvalidParameter(format!(
                "background B = {} outside [0, 1]",
                self.background_b
            )));
        }
        if self.jitter_sigma < 0.0 {
            return Err(Error::InvalidParameter("jitter sigma must be >= 0".into()));
        }
        if self.intensity <= 0.0 {
            return Err(Error::InvalidParameter("intensity must be > 0".into()));
        }
        Ok(())
    }

    /// Dephasing can only shorten coherence, so τ_c above 2·τ_r is suspicious
    /// but not rejected.
    pub fn coherence_warning(&self) -> Option<String> {
        (self.tau_c > 2.0 * self.tau_r).then(|| {
            format!(
                "coherence time {:.1} ps exceeds the 2·τ_r = {:.1} ps radiative limit",
                self.tau_c,
                2.0 * self.tau_r
            )
        })
    }
}

/// Gaussian timing response of the coincidence system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorResponse {
    #[serde(rename = "fwhm_ps")]
    pub fwhm: f64,
}

impl DetectorResponse {
    pub fn new(fwhm: f64) -> Result<Self> {
        if !fwhm.is_finite() {
            return Err(Error::NonFinite("detector fwhm"));
        }
        if fwhm <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "detector fwhm must be > 0, got {fwhm}"
            )));
        }
        Ok(Self { fwhm })
    }

    pub fn sigma(&self) -> f64 {
        self.fwhm / FWHM_PER_SIGMA
    }

    /// Largest grid step a trace may have to be convolved with this response.
    pub fn max_step(&self) -> f64 {
        self.fwhm / 10.0
    }

    /// Smallest grid half-span a trace must have to be convolved.
    pub fn min_half_span(&self) -> f64 {
        5.0 * self.fwhm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Parallel,
    Orthogonal,
}

impl std::str::FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "parallel" | "para" => Ok(Polarization::Parallel),
            "orthogonal" | "perp" | "perpendicular" => Ok(Polarization::Orthogonal),
            other => Err(Error::Parse(format!("unknown polarization `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamsplitterModel {
    /// Intensity transmission T; reflection is 1 − T.
    pub transmission: f64,
    /// Wavepacket overlap γ, real and in [0, 1].
    pub overlap_gamma: f64,
    pub polarization: Polarization,
}

impl BeamsplitterModel {
    pub fn new(transmission: f64, overlap_gamma: f64, polarization: Polarization) -> Result<Self> {
        let bs = Self {
            transmission,
            overlap_gamma,
            polarization,
        };
        bs.validate()?;
        Ok(bs)
    }

    pub fn balanced(polarization: Polarization) -> Self {
        Self {
            transmission: 0.5,
            overlap_gamma: 1.0,
            polarization,
        }
    }

    pub fn with_polarization(mut self, polarization: Polarization) -> Self {
        self.polarization = polarization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.transmission.is_finite() || !self.overlap_gamma.is_finite() {
            return Err(Error::NonFinite("beamsplitter"));
        }
        if !(0.0..=1.0).contains(&self.transmission) {
            return Err(Error::InvalidParameter(format!(
                "transmission {} outside [0, 1]",
                self.transmission
            )));
        }
        if !(0.0..=1.0).contains(&self.overlap_gamma) {
            return Err(Error::InvalidParameter(format!(
                "overlap γ {} outside [0, 1]",
                self.overlap_gamma
            )));
        }
        Ok(())
    }
}

/// Uniform delay grid `k·step` for `k = −n..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub half_span_ps: f64,
    pub step_ps: f64,
}

impl Default for TauGrid {
    fn default() -> Self {
        Self {
            half_span_ps: 16_000.0,
            step_ps: 2.0,
        }
    }
}

impl TauGrid {
    pub fn new(half_span_ps: f64, step_ps: f64) -> Result<Self> {
        let g = Self {
            half_span_ps,
            step_ps,
        };
        g.validate()?;
        Ok(g)
    }

    /// The default grid, widened and refined as needed so that `det` can be
    /// applied to it.
    pub fn default_for(det: &DetectorResponse) -> Self {
        let d = Self::default();
        let step = d.step_ps.min(det.max_step());
        let half_span = d.half_span_ps.max(1.2 * det.min_half_span());
        Self {
            half_span_ps: (half_span / step).ceil() * step,
            step_ps: step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_ps.is_finite() && self.half_span_ps.is_finite()) {
            return Err(Error::NonFinite("grid"));
        }
        if self.step_ps <= 0.0 || self.half_span_ps < self.step_ps {
            return Err(Error::InvalidGrid(format!(
                "need 0 < step ({}) <= half-span ({})",
                self.step_ps, self.half_span_ps
            )));
        }
        Ok(())
    }

    pub fn half_points(&self) -> usize {
        (self.half_span_ps / self.step_ps).round() as usize
    }

    pub fn taus(&self) -> Vec<f64> {
        let n = self.half_points() as i64;
        (-n..=n).map(|k| k as f64 * self.step_ps).collect()
    }
}

/// g² (or coincidence counts) on a uniform grid symmetric about τ = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTrace {
    taus: Vec<f64>,
    values: Vec<f64>,
}

impl CorrelationTrace {
    pub fn new(taus: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if taus.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} delays but {} values",
                taus.len(),
                values.len()
            )));
        }
        if taus.len() < 3 {
            return Err(Error::InvalidGrid("need at least 3 points".into()));
        }
        if taus.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite value".into()));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidGrid("negative correlation value".into()));
        }
        let n = taus.len();
        let step = (taus[n - 1] - taus[0]) / (n - 1) as f64;
        if step <= 0.0 {
            return Err(Error::InvalidGrid("delays not increasing".into()));
        }
        let tol = 1e-6 * step;
        for (i, w) in taus.windows(2).enumerate() {
            if ((w[1] - w[0]) - step).abs() > tol {
                return Err(Error::InvalidGrid(format!("non-uniform step at index {}", i + 1)));
            }
        }
        for i in 0..n / 2 {
            if (taus[i] + taus[n - 1 - i]).abs() > tol {
                return Err(Error::InvalidGrid("grid not symmetric about zero".into()));
            }
        }
        Ok(Self { taus, values })
    }

    fn from_parts_unchecked(taus: Vec<f64>, values: Vec<f64>) -> Self {
        Self { taus, values }
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.taus[self.len() - 1] - self.taus[0]) / (self.len() - 1) as f64
    }

    pub fn half_span(&self) -> f64 {
        self.taus[self.len() - 1]
    }

    /// Index of the τ = 0 sample, if the grid has one.
    pub fn zero_index(&self) -> Option<usize> {
        let n = self.len();
        (n % 2 == 1).then_some(n / 2)
    }

    pub fn value_at_zero(&self) -> Option<f64> {
        self.zero_index().map(|i| self.values[i])
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .taus
                .iter()
                .zip(&other.taus)
                .all(|(a, b)| (a - b).abs() <= 1e-9 * self.step())
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.taus, self.values)
    }
}

/// `1 − (1 − B)·exp(−|τ|/τ_r)`.
pub fn g2_auto_ideal(tau: f64, src: &EmitterModel) -> f64 {
    1.0 - (1.0 - src.background_b) * (-tau.abs() / src.tau_r).exp()
}

/// Magnitude of the first-order coherence, averaged over Gaussian spectral
/// jitter: `exp(−|τ|/τ_c)·exp(−σ²τ²/2ħ²)`.
pub fn g1_envelope(tau: f64, src: &EmitterModel) -> f64 {
    let jitter = src.jitter_sigma * tau / HBAR_UEV_PS;
    (-tau.abs() / src.tau_c - 0.5 * jitter * jitter).exp()
}

/// Cross-correlation between the two beamsplitter outputs for independent
/// sources `a` (one input) and `b` (other input) detuned by `detuning` µeV.
pub fn g2_cross_ideal(
    tau: f64,
    a: &EmitterModel,
    b: &EmitterModel,
    bs: &BeamsplitterModel,
    detuning: f64,
) -> Result<f64> {
    let coeffs = CrossCoefficients::new(a, b, bs)?;
    Ok(coeffs.eval(tau, a, b, bs.polarization, detuning))
}

/// The τ-independent pieces of the HOM cross-correlation.
#[derive(Debug, Clone, Copy)]
struct CrossCoefficients {
    auto_a: f64,
    auto_b: f64,
    distinguishable: f64,
    interference: f64,
}

impl CrossCoefficients {
    fn new(a: &EmitterModel, b: &EmitterModel, bs: &BeamsplitterModel) -> Result<Self> {
        let t = bs.transmission;
        let r = 1.0 - t;
        let (ia, ib) = (a.intensity, b.intensity);
        let norm = (t * ia + r * ib) * (r * ia + t * ib);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroIntensity);
        }
        let gamma2 = bs.overlap_gamma * bs.overlap_gamma;
        Ok(Self {
            auto_a: t * r * ia * ia / norm,
            auto_b: t * r * ib * ib / norm,
            distinguishable: (t * t + r * r) * ia * ib / norm,
            interference: 2.0 * t * r * ia * ib * gamma2 / norm,
        })
    }

    fn eval(
        &self,
        tau: f64,
        a: &EmitterModel,
        b: &EmitterModel,
        polarization: Polarization,
        detuning: f64,
    ) -> f64 {
        let mut g = self.auto_a * g2_auto_ideal(tau, a)
            + self.auto_b * g2_auto_ideal(tau, b)
            + self.distinguishable;
        if polarization == Polarization::Parallel {
            g -= self.interference
                * g1_envelope(tau, a)
                * g1_envelope(tau, b)
                * (detuning * tau / HBAR_UEV_PS).cos();
        }
        // rounding can leave −1e-17 at a perfect dip
        g.max(0.0)
    }
}

pub fn g2_auto_trace(src: &EmitterModel, grid: &TauGrid) -> Result<CorrelationTrace> {
    grid.validate()?;
    let taus = grid.taus();
    let values = taus.iter().map(|&t| g2_auto_ideal(t, src)).collect();
    Ok(CorrelationTrace::from_parts_unchecked(taus, values))
}

pub fn g2_cross_trace(
    a: &EmitterModel,
    b: &EmitterModel,
    bs: &BeamsplitterModel,
    detuning: f64,
    grid: &TauGrid,
) -> Result<CorrelationTrace> {
    grid.validate()?;
    if !detuning.is_finite() {
        return Err(Error::NonFinite("detuning"));
    }
    let coeffs = CrossCoefficients::new(a, b, bs)?;
    let taus = grid.taus();
    let values = taus
        .iter()
        .map(|&t| coeffs.eval(t, a, b, bs.polarization, detuning))
        .collect();
    Ok(CorrelationTrace::from_parts_unchecked(taus, values))
}

/// Unit-area sampled Gaussian kernel on a trace's grid.
#[derive(Debug, Clone)]
pub(crate) struct ResponseKernel {
    weights: Vec<f64>,
    radius: usize,
}

impl ResponseKernel {
    pub(crate) fn new(det: &DetectorResponse, step: f64) -> Self {
        let sigma = det.sigma();
        let radius = (8.0 * sigma / step).ceil() as usize;
        let mut weights: Vec<f64> = (0..=2 * radius)
            .map(|j| {
                let x = (j as f64 - radius as f64) * step / sigma;
                (-0.5 * x * x).exp()
            })
            .collect();
        let sum: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= sum);
        Self { weights, radius }
    }

    /// Area of the kernel as a density: Σ w = 1.
    #[cfg(test)]
    fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Convolved value at grid index `idx`; samples past either edge repeat
    /// the edge value.
    pub(crate) fn apply_at(&self, values: &[f64], idx: usize) -> f64 {
        let n = values.len() as i64;
        let r = self.radius as i64;
        let i = idx as i64;
        let mut acc = 0.0;
        for (j, w) in self.weights.iter().enumerate() {
            let k = (i + j as i64 - r).clamp(0, n - 1);
            acc += w * values[k as usize];
        }
        acc
    }
}

pub(crate) fn check_convolution_grid(trace: &CorrelationTrace, det: &DetectorResponse) -> Result<()> {
    let step = trace.step();
    let max_step = det.max_step();
    if step > max_step * (1.0 + 1e-9) {
        return Err(Error::GridTooCoarse { step, max_step });
    }
    let required = det.min_half_span();
    if trace.half_span() < required * (1.0 - 1e-9) {
        return Err(Error::SpanTooShort {
            half_span: trace.half_span(),
            required,
        });
    }
    Ok(())
}

/// Value of `trace ⊗ R` at one grid index, with the same preconditions as
/// [`convolve_response`].
pub fn convolve_response_at(trace: &CorrelationTrace, det: &DetectorResponse, idx: usize) -> Result<f64> {
    check_convolution_grid(trace, det)?;
    if idx >= trace.len() {
        return Err(Error::InvalidGrid(format!("index {idx} out of range")));
    }
    Ok(ResponseKernel::new(det, trace.step()).apply_at(&trace.values, idx))
}

/// Discrete convolution with the unit-area Gaussian response on the trace's
/// own grid. Edge samples are held constant beyond the grid, so a trace that
/// has settled at its wings keeps its wing value.
pub fn convolve_response(trace: &CorrelationTrace, det: &DetectorResponse) -> Result<CorrelationTrace> {
    check_convolution_grid(trace, det)?;
    let kernel = ResponseKernel::new(det, trace.step());
    let values: Vec<f64> = (0..trace.len())
        .into_par_iter()
        .map(|i| kernel.apply_at(&trace.values, i))
        .collect();
    Ok(CorrelationTrace::from_parts_unchecked(trace.taus.clone(), values))
}

pub fn g2_auto_measured(src: &EmitterModel, det: &DetectorResponse, grid: &TauGrid) -> Result<CorrelationTrace> {
    convolve_response(&g2_auto_trace(src, grid)?, det)
}

pub fn g2_cross_measured(
    a: &EmitterModel,
    b: &EmitterModel,
    bs: &BeamsplitterModel,
    detuning: f64,
    det: &DetectorResponse,
    grid: &TauGrid,
) -> Result<CorrelationTrace> {
    convolve_response(&g2_cross_trace(a, b, bs, detuning, grid)?, det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perfect() -> EmitterModel {
        EmitterModel::new(600.0, 0.0, 300.0, 0.0, 0.0, 1.0).unwrap()
    }

    fn dot_a() -> EmitterModel {
        EmitterModel::from_linewidths(600.0, 0.05, 5.2, 0.0, 0.0, 1.0).unwrap()
    }

    fn dot_1() -> EmitterModel {
        EmitterModel::from_linewidths(800.0, 0.0, 2.2, 6.8, 0.0, 1.0).unwrap()
    }

    #[test]
    fn auto_ideal_values() {
        assert!((g2_auto_ideal(0.0, &dot_a()) - 0.05).abs() < 1e-15);
        assert_eq!(g2_auto_ideal(0.0, &dot_1()), 0.0);
        assert!((g2_auto_ideal(1e7, &dot_a()) - 1.0).abs() < 1e-15);
        assert!((g2_auto_ideal(-1e7, &dot_a()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn g1_values() {
        assert_eq!(g1_envelope(0.0, &dot_1()), 1.0);
        let e = perfect();
        assert!((g1_envelope(e.tau_c, &e) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((g1_envelope(-e.tau_c, &e) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn hom_dip_levels() {
        let a = perfect();
        let para = BeamsplitterModel::balanced(Polarization::Parallel);
        let perp = BeamsplitterModel::balanced(Polarization::Orthogonal);
        assert!(g2_cross_ideal(0.0, &a, &a, &para, 0.0).unwrap().abs() < 1e-15);
        assert!((g2_cross_ideal(0.0, &a, &a, &perp, 0.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hom_with_background() {
        // 0.25·(0.05 + 0) + 0.5 = 0.5125; minus 0.5 for parallel
        let para = BeamsplitterModel::balanced(Polarization::Parallel);
        let perp = BeamsplitterModel::balanced(Polarization::Orthogonal);
        let p = g2_cross_ideal(0.0, &dot_a(), &dot_1(), &para, 0.0).unwrap();
        let o = g2_cross_ideal(0.0, &dot_a(), &dot_1(), &perp, 0.0).unwrap();
        assert!((p - 0.0125).abs() < 1e-12);
        assert!((o - 0.5125).abs() < 1e-12);
        assert!((1.0 - p / o - 0.975_609_756_097_561).abs() < 1e-12);
    }

    #[test]
    fn zero_intensity_rejected() {
        let mut a = perfect();
        a.intensity = 0.0;
        let bs = BeamsplitterModel::balanced(Polarization::Parallel);
        assert!(matches!(
            g2_cross_ideal(0.0, &a, &a, &bs, 0.0),
            Err(Error::ZeroIntensity)
        ));
    }

    #[test]
    fn kernel_area_is_one() {
        for fwhm in [0.5, 3.0, 42.0, 428.0, 10_000.0] {
            let det = DetectorResponse::new(fwhm).unwrap();
            let k = ResponseKernel::new(&det, fwhm / 10.0);
            assert!((k.area() - 1.0).abs() < 1e-12, "fwhm {fwhm}");
            let k = ResponseKernel::new(&det, fwhm / 37.0);
            assert!((k.area() - 1.0).abs() < 1e-12, "fwhm {fwhm}");
        }
    }

    #[test]
    fn constant_trace_is_invariant() {
        let grid = TauGrid::new(4000.0, 2.0).unwrap();
        let taus = grid.taus();
        let trace = CorrelationTrace::new(taus.clone(), vec![1.0; taus.len()]).unwrap();
        let out = convolve_response(&trace, &DetectorResponse::new(428.0).unwrap()).unwrap();
        assert!(out.values().iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn grid_preconditions() {
        let det = DetectorResponse::new(428.0).unwrap();
        let coarse = g2_auto_trace(&dot_a(), &TauGrid::new(16_000.0, 50.0).unwrap()).unwrap();
        assert!(matches!(
            convolve_response(&coarse, &det),
            Err(Error::GridTooCoarse { .. })
        ));
        let short = g2_auto_trace(&dot_a(), &TauGrid::new(2_000.0, 2.0).unwrap()).unwrap();
        assert!(matches!(
            convolve_response(&short, &det),
            Err(Error::SpanTooShort { .. })
        ));
    }

    #[test]
    fn default_grid_adapts_to_detector() {
        let g = TauGrid::default_for(&DetectorResponse::new(428.0).unwrap());
        assert_eq!(g, TauGrid::default());
        let g = TauGrid::default_for(&DetectorResponse::new(10_000.0).unwrap());
        assert!(g.half_span_ps >= 50_000.0);
        let g = TauGrid::default_for(&DetectorResponse::new(1.0).unwrap());
        assert!(g.step_ps <= 0.1);
    }

    #[test]
    fn trace_validation() {
        assert!(CorrelationTrace::new(vec![-1.0, 0.0, 1.0], vec![1.0, 0.5, 1.0]).is_ok());
        assert!(CorrelationTrace::new(vec![-1.0, 0.0, 2.0], vec![1.0; 3]).is_err());
        assert!(CorrelationTrace::new(vec![0.0, 1.0, 2.0], vec![1.0; 3]).is_err());
        assert!(CorrelationTrace::new(vec![-1.0, 0.0, 1.0], vec![1.0, -0.1, 1.0]).is_err());
        let even = CorrelationTrace::new(vec![-1.5, -0.5, 0.5, 1.5], vec![1.0; 4]).unwrap();
        assert_eq!(even.zero_index(), None);
    }

    #[test]
    fn emitter_validation() {
        assert!(EmitterModel::new(600.0, 1.2, 200.0, 0.0, 0.0, 1.0).is_err());
        assert!(EmitterModel::new(0.0, 0.1, 200.0, 0.0, 0.0, 1.0).is_err());
        assert!(EmitterModel::new(600.0, 0.1, 200.0, -1.0, 0.0, 1.0).is_err());
        let long = EmitterModel::new(100.0, 0.0, 500.0, 0.0, 0.0, 1.0).unwrap();
        assert!(long.coherence_warning().is_some());
        assert!(dot_a().coherence_warning().is_none());
    }

    #[test]
    fn polarization_parses() {
        assert_eq!("parallel".parse::<Polarization>().unwrap(), Polarization::Parallel);
        assert_eq!("Orthogonal".parse::<Polarization>().unwrap(), Polarization::Orthogonal);
        assert!("diagonal".parse::<Polarization>().is_err());
    }
}
