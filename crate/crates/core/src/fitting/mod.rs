//! Least-squares estimation of lineshape, autocorrelation and visibility-peak
//! parameters.
//!
//! Every fit goes through the same damped Gauss–Newton loop ([`LmConfig`]):
//! cost never increases across accepted steps, Jacobians are forward
//! differences with step `1e-6·max(|p|, 1)`, and a fit that is still moving
//! after `max_iterations` fails with [`Error::NotConverged`].

mod lm;

pub use lm::LmConfig;

use serde::Serialize;

use crate::correlation::{check_convolution_grid, CorrelationTrace, DetectorResponse, ResponseKernel};
use crate::lineshape::{LineshapeKind, LineshapeParams, Spectrum};
use crate::visibility::VisibilityCurve;
use crate::{Error, Result};

/// Per-point weights applied to residuals before squaring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    #[default]
    Uniform,
    /// `σ_i = sqrt(max(y_i, 1))`, for count histograms.
    Poisson,
}

impl Weighting {
    fn weights(self, data: &[f64]) -> Vec<f64> {
        match self {
            Weighting::Uniform => vec![1.0; data.len()],
            Weighting::Poisson => data.iter().map(|&y| 1.0 / y.max(1.0).sqrt()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult<P> {
    pub params: P,
    pub param_names: Vec<&'static str>,
    pub values: Vec<f64>,
    /// Variance estimates, `(JᵀJ)⁻¹·χ²_red`.
    pub covariance_diag: Vec<f64>,
    /// `data − model`, unweighted.
    pub residuals: Vec<f64>,
    pub chi2_reduced: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl<P> FitResult<P> {
    pub fn uncertainties(&self) -> Vec<f64> {
        self.covariance_diag.iter().map(|v| v.sqrt()).collect()
    }

    fn assemble(
        params: P,
        names: Vec<&'static str>,
        out: lm::LmOutcome,
        residuals: Vec<f64>,
    ) -> Self {
        let dof = residuals.len().saturating_sub(out.x.len()).max(1);
        let chi2_reduced = out.cost / dof as f64;
        FitResult {
            params,
            param_names: names,
            covariance_diag: out.jtj_inverse_diag.iter().map(|v| v * chi2_reduced).collect(),
            values: out.x,
            residuals,
            chi2_reduced,
            converged: true,
            iterations: out.iterations,
        }
    }
}

/// How the constant background of a spectrum is treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OffsetMode {
    /// Held at the given value.
    Fixed(f64),
    /// Fitted, seeded from the spectrum minimum.
    Free,
}

impl Default for OffsetMode {
    fn default() -> Self {
        OffsetMode::Fixed(0.0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct LineshapeFitOptions {
    pub initial: Option<LineshapeParams>,
    pub offset: OffsetMode,
    pub weighting: Weighting,
    pub lm: LmConfig,
}

/// Half-maximum crossings of `y − base` around index `peak`, linearly
/// interpolated. `None` on a side where the data never drops to half.
fn half_max_crossings(x: &[f64], y: &[f64], base: f64, peak: usize) -> (Option<f64>, Option<f64>) {
    let half = base + 0.5 * (y[peak] - base);
    let cross = |i: usize, j: usize| x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let left = (1..=peak).rev().find(|&i| y[i - 1] <= half).map(|i| cross(i - 1, i));
    let right = (peak..y.len() - 1).find(|&i| y[i + 1] <= half).map(|i| cross(i, i + 1));
    (left, right)
}

fn argmax(y: &[f64]) -> usize {
    y.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Moment-style starting point: centre at the maximum, width from the
/// half-maximum crossings, amplitude `max − min`.
pub fn seed_lineshape(spec: &Spectrum, kind: LineshapeKind, offset: OffsetMode) -> Result<LineshapeParams> {
    let (x, y) = (spec.energies(), spec.intensities());
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = y.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max - min > 1e-12 * max.abs().max(f64::MIN_POSITIVE)) {
        return Err(Error::DegenerateData("spectrum is flat".into()));
    }
    let peak = argmax(y);
    let (left, right) = half_max_crossings(x, y, min, peak);
    let fwhm = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (x[peak] - l),
        (None, Some(r)) => 2.0 * (r - x[peak]),
        (None, None) => spec.span(),
    }
    .max(spec.step());
    if spec.span() < 3.0 * fwhm {
        return Err(Error::DegenerateData(format!(
            "spectrum spans {:.3} µeV, less than 3 × the estimated FWHM {:.3} µeV",
            spec.span(),
            fwhm
        )));
    }
    let offset = match offset {
        OffsetMode::Fixed(v) => v,
        OffsetMode::Free => min,
    };
    let (center, amplitude) = (x[peak], max - min);
    Ok(match kind {
        LineshapeKind::Lorentzian => LineshapeParams::lorentzian(center, fwhm, amplitude),
        LineshapeKind::Gaussian => LineshapeParams::gaussian(center, fwhm, amplitude),
        // equal components: FWHM_V ≈ 1.6375·w
        LineshapeKind::Voigt => LineshapeParams::voigt(center, fwhm / 1.6375, fwhm / 1.6375, amplitude),
    }
    .with_offset(offset))
}

fn lineshape_names(kind: LineshapeKind, free_offset: bool) -> Vec<&'static str> {
    let mut names = match kind {
        LineshapeKind::Lorentzian => vec!["center_ueV", "lorentzian_fwhm_ueV", "amplitude"],
        LineshapeKind::Gaussian => vec!["center_ueV", "gaussian_fwhm_ueV", "amplitude"],
        LineshapeKind::Voigt => vec![
            "center_ueV",
            "lorentzian_fwhm_ueV",
            "gaussian_fwhm_ueV",
            "amplitude",
        ],
    };
    if free_offset {
        names.push("offset");
    }
    names
}

// The centre is carried as a shift from `origin` and, with the widths, in
// units of `unit`. Absolute emission energies (~10⁶ µeV) would otherwise make
// the finite-difference step comparable to the linewidth, and sub-µeV widths
// would get a step so small that rounding dominates the difference.
fn pack(p: &LineshapeParams, origin: f64, unit: f64, free_offset: bool) -> Vec<f64> {
    let c = (p.center - origin) / unit;
    let (l, g) = (p.lorentzian_fwhm / unit, p.gaussian_fwhm / unit);
    let mut v = match p.kind {
        LineshapeKind::Lorentzian => vec![c, l, p.amplitude],
        LineshapeKind::Gaussian => vec![c, g, p.amplitude],
        LineshapeKind::Voigt => vec![c, l, g, p.amplitude],
    };
    if free_offset {
        v.push(p.offset);
    }
    v
}

fn unpack(kind: LineshapeKind, v: &[f64], origin: f64, unit: f64, offset: Option<f64>) -> LineshapeParams {
    let c = origin + v[0] * unit;
    let (p, used) = match kind {
        LineshapeKind::Lorentzian => (LineshapeParams::lorentzian(c, v[1] * unit, v[2]), 3),
        LineshapeKind::Gaussian => (LineshapeParams::gaussian(c, v[1] * unit, v[2]), 3),
        LineshapeKind::Voigt => (LineshapeParams::voigt(c, v[1] * unit, v[2] * unit, v[3]), 4),
    };
    p.with_offset(offset.unwrap_or_else(|| v[used]))
}

pub fn fit_lineshape(
    spec: &Spectrum,
    kind: LineshapeKind,
    initial: Option<LineshapeParams>,
) -> Result<FitResult<LineshapeParams>> {
    fit_lineshape_with(
        spec,
        kind,
        &LineshapeFitOptions {
            initial,
            ..Default::default()
        },
    )
}

pub fn fit_lineshape_with(
    spec: &Spectrum,
    kind: LineshapeKind,
    opts: &LineshapeFitOptions,
) -> Result<FitResult<LineshapeParams>> {
    let seed = match opts.initial {
        Some(p) => {
            if p.kind != kind {
                return Err(Error::KindMismatch {
                    expected: kind.name(),
                    actual: p.kind.name(),
                });
            }
            // flat data is degenerate whatever the starting point
            seed_lineshape(spec, kind, opts.offset)?;
            p
        }
        None => seed_lineshape(spec, kind, opts.offset)?,
    };
    let free_offset = opts.offset == OffsetMode::Free;
    let (x, y) = (spec.energies(), spec.intensities());
    // Work on data divided by its height so the iteration path, and hence the
    // stopping point, does not depend on the intensity scale.
    let height = y.iter().copied().fold(f64::NEG_INFINITY, f64::max) - y.iter().copied().fold(f64::INFINITY, f64::min);
    let yn: Vec<f64> = y.iter().map(|v| v / height).collect();
    let fixed_offset = match opts.offset {
        OffsetMode::Fixed(v) => Some(v / height),
        OffsetMode::Free => None,
    };
    let seed = LineshapeParams {
        amplitude: seed.amplitude / height,
        offset: seed.offset / height,
        ..seed
    };
    let w = opts.weighting.weights(y);
    let width_slots: &[usize] = match kind {
        LineshapeKind::Voigt => &[1, 2],
        _ => &[1],
    };
    let unit = spec.span();
    let width_floor = 1e-9 * spec.step() / unit;
    let origin = seed.center;

    let residuals = |v: &[f64]| {
        let p = unpack(kind, v, origin, unit, fixed_offset);
        x.iter()
            .zip(&yn)
            .zip(&w)
            .map(|((&e, &yi), &wi)| (p.value(e) - yi) * wi)
            .collect::<Vec<_>>()
    };
    let project = |v: &mut [f64]| {
        for &i in width_slots {
            v[i] = v[i].max(width_floor);
        }
    };
    let out = lm::minimize(residuals, project, &pack(&seed, origin, unit, free_offset), &opts.lm)?;
    let fitted = unpack(kind, &out.x, origin, unit, fixed_offset);
    let params = LineshapeParams {
        amplitude: fitted.amplitude * height,
        offset: fitted.offset * height,
        ..fitted
    };
    let resid = x.iter().zip(y).map(|(&e, &yi)| yi - params.value(e)).collect();
    let mut fit = FitResult::assemble(params, lineshape_names(kind, free_offset), out, resid);
    fit.values = pack(&params, 0.0, 1.0, free_offset);
    fit.chi2_reduced *= height * height;
    let amp = width_slots[width_slots.len() - 1] + 1;
    for (i, var) in fit.covariance_diag.iter_mut().enumerate() {
        *var *= if i < amp { unit * unit } else { height * height };
    }
    Ok(fit)
}

/// Autocorrelation parameters recovered from a (possibly unnormalised) trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AutoCorrelationFit {
    pub background_b: f64,
    pub tau_r_ps: f64,
    /// Multiplier between normalised g² and the data (1 for normalised
    /// traces, counts per unit g² for histograms).
    pub scale: f64,
}

#[derive(Debug, Clone, Default)]
pub struct G2FitOptions {
    /// Starting `(B, τ_r, scale)`; seeded from the data when absent.
    pub initial: Option<AutoCorrelationFit>,
    pub weighting: Weighting,
    pub lm: LmConfig,
}

fn seed_g2(hist: &CorrelationTrace) -> Result<AutoCorrelationFit> {
    let (t, v) = (hist.taus(), hist.values());
    let edge = 0.8 * hist.half_span();
    let wings: Vec<f64> = t
        .iter()
        .zip(v)
        .filter(|(t, _)| t.abs() >= edge)
        .map(|(_, v)| *v)
        .collect();
    let scale = wings.iter().sum::<f64>() / wings.len().max(1) as f64;
    if !(scale > 0.0) {
        return Err(Error::DegenerateData("trace wings are empty".into()));
    }
    let min = v.iter().copied().fold(f64::INFINITY, f64::min) / scale;
    if min > 0.98 {
        return Err(Error::DegenerateData("trace has no antibunching dip".into()));
    }
    let level = 0.5 * (1.0 + min);
    let zero = hist.len() / 2;
    let t_half = (zero..hist.len())
        .find(|&i| v[i] / scale >= level)
        .map(|i| t[i])
        .unwrap_or(hist.half_span() / 4.0);
    Ok(AutoCorrelationFit {
        background_b: (0.5 * min).clamp(0.0, 1.0),
        tau_r_ps: (t_half / std::f64::consts::LN_2).max(2.0 * hist.step()),
        scale,
    })
}

/// Fits `scale·[R ⊗ (1 − (1 − B)·exp(−|τ|/τ_r))]` to a measured trace. `B` is
/// held in [0, 1].
pub fn fit_g2_auto(hist: &CorrelationTrace, det: &DetectorResponse) -> Result<FitResult<AutoCorrelationFit>> {
    fit_g2_auto_with(hist, det, &G2FitOptions::default())
}

pub fn fit_g2_auto_with(
    hist: &CorrelationTrace,
    det: &DetectorResponse,
    opts: &G2FitOptions,
) -> Result<FitResult<AutoCorrelationFit>> {
    check_convolution_grid(hist, det)?;
    let seed = match opts.initial {
        Some(s) => s,
        None => seed_g2(hist)?,
    };
    let kernel = ResponseKernel::new(det, hist.step());
    let (t, y) = (hist.taus(), hist.values());
    let w = opts.weighting.weights(y);
    let model = |p: &[f64]| -> Vec<f64> {
        let ideal: Vec<f64> = t
            .iter()
            .map(|&tau| 1.0 - (1.0 - p[0]) * (-tau.abs() / p[1]).exp())
            .collect();
        (0..ideal.len())
            .map(|i| p[2] * kernel.apply_at(&ideal, i))
            .collect()
    };
    let residuals = |p: &[f64]| {
        model(p)
            .iter()
            .zip(y)
            .zip(&w)
            .map(|((m, yi), wi)| (m - yi) * wi)
            .collect::<Vec<_>>()
    };
    let project = |p: &mut [f64]| p[0] = p[0].clamp(0.0, 1.0);
    let x0 = [seed.background_b, seed.tau_r_ps, seed.scale];
    let out = lm::minimize(residuals, project, &x0, &opts.lm)?;
    if !(out.x[1] > 0.0) {
        return Err(Error::NonPhysical(format!(
            "radiative lifetime {} ps at optimum",
            out.x[1]
        )));
    }
    let params = AutoCorrelationFit {
        background_b: out.x[0],
        tau_r_ps: out.x[1],
        scale: out.x[2],
    };
    let resid = y.iter().zip(model(&out.x)).map(|(yi, m)| yi - m).collect();
    Ok(FitResult::assemble(
        params,
        vec!["background_b", "tau_r_ps", "scale"],
        out,
        resid,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LorentzianPeak {
    #[serde(rename = "center_ueV")]
    pub center: f64,
    #[serde(rename = "fwhm_ueV")]
    pub fwhm: f64,
    pub amplitude: f64,
}

/// Least-squares Lorentzian (zero baseline) through a visibility curve.
pub fn fit_lorentzian_peak(curve: &VisibilityCurve) -> Result<FitResult<LorentzianPeak>> {
    if curve.len() < 8 {
        return Err(Error::DegenerateData(format!(
            "{} points, need at least 8",
            curve.len()
        )));
    }
    let peak = curve.interior_peak().ok_or(Error::NoPeak)?;
    let (x, y) = (curve.detunings(), curve.visibilities());
    if !(y[peak] > 0.0) {
        return Err(Error::NoPeak);
    }
    let (left, right) = half_max_crossings(x, y, 0.0, peak);
    let span = x[x.len() - 1] - x[0];
    let fwhm = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (x[peak] - l),
        (None, Some(r)) => 2.0 * (r - x[peak]),
        (None, None) => span / 4.0,
    };
    let residuals = |p: &[f64]| {
        let shape = LineshapeParams::lorentzian(p[0], p[1], p[2]);
        x.iter()
            .zip(y)
            .map(|(&e, &v)| shape.value(e) - v)
            .collect::<Vec<_>>()
    };
    let floor = 1e-9 * span;
    let project = |p: &mut [f64]| p[1] = p[1].max(floor);
    let out = lm::minimize(
        residuals,
        project,
        &[x[peak], fwhm.max(floor), y[peak]],
        &LmConfig::default(),
    )?;
    let params = LorentzianPeak {
        center: out.x[0],
        fwhm: out.x[1],
        amplitude: out.x[2],
    };
    let shape = LineshapeParams::lorentzian(params.center, params.fwhm, params.amplitude);
    let resid = x.iter().zip(y).map(|(&e, &v)| v - shape.value(e)).collect();
    Ok(FitResult::assemble(
        params,
        vec!["center_ueV", "fwhm_ueV", "amplitude"],
        out,
        resid,
    ))
}
