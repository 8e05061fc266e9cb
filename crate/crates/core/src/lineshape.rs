//! Spectral lineshapes and width conversions.
//!
//! Profiles are peak-normalised: at `E = center` every kind evaluates to
//! `amplitude + offset`. Widths are full widths at half maximum in µeV.

use serde::{Deserialize, Serialize};

use crate::constants::{FWHM_PER_SIGMA, HBAR_UEV_PS};
use crate::faddeeva::{erfcx, faddeeva};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineshapeKind {
    Lorentzian,
    Gaussian,
    Voigt,
}

impl LineshapeKind {
    pub fn name(self) -> &'static str {
        match self {
            LineshapeKind::Lorentzian => "lorentzian",
            LineshapeKind::Gaussian => "gaussian",
            LineshapeKind::Voigt => "voigt",
        }
    }
}

impl std::str::FromStr for LineshapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lorentzian" | "l" => Ok(LineshapeKind::Lorentzian),
            "gaussian" | "g" => Ok(LineshapeKind::Gaussian),
            "voigt" | "v" => Ok(LineshapeKind::Voigt),
            other => Err(Error::Parse(format!("unknown lineshape kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineshapeParams {
    pub kind: LineshapeKind,
    #[serde(rename = "center_ueV")]
    pub center: f64,
    #[serde(rename = "lorentzian_fwhm_ueV")]
    pub lorentzian_fwhm: f64,
    #[serde(rename = "gaussian_fwhm_ueV")]
    pub gaussian_fwhm: f64,
    pub amplitude: f64,
    pub offset: f64,
}

impl LineshapeParams {
    pub fn lorentzian(center: f64, fwhm: f64, amplitude: f64) -> Self {
        Self {
            kind: LineshapeKind::Lorentzian,
            center,
            lorentzian_fwhm: fwhm,
            gaussian_fwhm: 0.0,
            amplitude,
            offset: 0.0,
        }
    }

    pub fn gaussian(center: f64, fwhm: f64, amplitude: f64) -> Self {
        Self {
            kind: LineshapeKind::Gaussian,
            center,
            lorentzian_fwhm: 0.0,
            gaussian_fwhm: fwhm,
            amplitude,
            offset: 0.0,
        }
    }

    pub fn voigt(center: f64, lorentzian_fwhm: f64, gaussian_fwhm: f64, amplitude: f64) -> Self {
        Self {
            kind: LineshapeKind::Voigt,
            center,
            lorentzian_fwhm,
            gaussian_fwhm,
            amplitude,
            offset: 0.0,
        }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    /// Checks the type invariants (widths consistent with `kind`, positive
    /// amplitude, non-negative offset).
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("center", self.center),
            ("lorentzian_fwhm", self.lorentzian_fwhm),
            ("gaussian_fwhm", self.gaussian_fwhm),
            ("amplitude", self.amplitude),
            ("offset", self.offset),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.amplitude <= 0.0 {
            return Err(Error::InvalidParameter("amplitude must be > 0".into()));
        }
        if self.offset < 0.0 {
            return Err(Error::InvalidParameter("offset must be >= 0".into()));
        }
        let (l, g) = (self.lorentzian_fwhm, self.gaussian_fwhm);
        let ok = match self.kind {
            LineshapeKind::Lorentzian => l > 0.0 && g == 0.0,
            LineshapeKind::Gaussian => g > 0.0 && l == 0.0,
            LineshapeKind::Voigt => l > 0.0 && g > 0.0,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "widths (L={l}, G={g}) inconsistent with {} kind",
                self.kind.name()
            )));
        }
        Ok(())
    }

    /// Profile value at `energy`, dispatching on `kind`. No validation.
    pub fn value(&self, energy: f64) -> f64 {
        let x = energy - self.center;
        let shape = match self.kind {
            LineshapeKind::Lorentzian => lorentz_shape(x, self.lorentzian_fwhm),
            LineshapeKind::Gaussian => gauss_shape(x, self.gaussian_fwhm),
            LineshapeKind::Voigt => voigt_shape(x, self.lorentzian_fwhm, self.gaussian_fwhm),
        };
        self.amplitude * shape + self.offset
    }

    pub fn eval(&self, energy: f64) -> Result<f64> {
        match self.kind {
            LineshapeKind::Lorentzian => eval_lorentzian(energy, self),
            LineshapeKind::Gaussian => eval_gaussian(energy, self),
            LineshapeKind::Voigt => eval_voigt(energy, self),
        }
    }

    /// Full width at half maximum of the whole profile (not of a component).
    pub fn fwhm(&self) -> f64 {
        match self.kind {
            LineshapeKind::Lorentzian => self.lorentzian_fwhm,
            LineshapeKind::Gaussian => self.gaussian_fwhm,
            LineshapeKind::Voigt => voigt_fwhm(self.lorentzian_fwhm, self.gaussian_fwhm),
        }
    }
}

fn check_finite(energy: f64, p: &LineshapeParams) -> Result<()> {
    if !energy.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    for (name, v) in [
        ("center", p.center),
        ("lorentzian_fwhm", p.lorentzian_fwhm),
        ("gaussian_fwhm", p.gaussian_fwhm),
        ("amplitude", p.amplitude),
        ("offset", p.offset),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    Ok(())
}

fn expect_kind(p: &LineshapeParams, kind: LineshapeKind) -> Result<()> {
    if p.kind != kind {
        return Err(Error::KindMismatch {
            expected: kind.name(),
            actual: p.kind.name(),
        });
    }
    Ok(())
}

fn lorentz_shape(x: f64, fwhm: f64) -> f64 {
    let hw2 = 0.25 * fwhm * fwhm;
    hw2 / (x * x + hw2)
}

fn gauss_shape(x: f64, fwhm: f64) -> f64 {
    (-4.0 * std::f64::consts::LN_2 * x * x / (fwhm * fwhm)).exp()
}

/// Voigt profile normalised to 1 at `x = 0`. Degenerates to the pure
/// components when one width is zero.
fn voigt_shape(x: f64, lorentzian_fwhm: f64, gaussian_fwhm: f64) -> f64 {
    if gaussian_fwhm == 0.0 {
        return lorentz_shape(x, lorentzian_fwhm);
    }
    if lorentzian_fwhm == 0.0 {
        return gauss_shape(x, gaussian_fwhm);
    }
    let sigma = gaussian_fwhm / FWHM_PER_SIGMA;
    let denom = sigma * std::f64::consts::SQRT_2;
    let y = 0.5 * lorentzian_fwhm / denom;
    faddeeva(x.abs() / denom, y).re / erfcx(y)
}

fn voigt_fwhm(lorentzian_fwhm: f64, gaussian_fwhm: f64) -> f64 {
    // half-max lies in [max(L,G)/2, (L+G)/2]; bisect on the normalised shape
    let mut lo = 0.5 * lorentzian_fwhm.max(gaussian_fwhm);
    let mut hi = 0.5 * (lorentzian_fwhm + gaussian_fwhm);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if voigt_shape(mid, lorentzian_fwhm, gaussian_fwhm) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    lo + hi
}

pub fn eval_lorentzian(energy: f64, params: &LineshapeParams) -> Result<f64> {
    check_finite(energy, params)?;
    expect_kind(params, LineshapeKind::Lorentzian)?;
    Ok(params.amplitude * lorentz_shape(energy - params.center, params.lorentzian_fwhm)
        + params.offset)
}

pub fn eval_gaussian(energy: f64, params: &LineshapeParams) -> Result<f64> {
    check_finite(energy, params)?;
    expect_kind(params, LineshapeKind::Gaussian)?;
    Ok(params.amplitude * gauss_shape(energy - params.center, params.gaussian_fwhm) + params.offset)
}

/// Lorentzian ⊗ Gaussian convolution, scaled so the peak equals `amplitude`.
///
/// A zero Gaussian (or Lorentzian) width gives the pure Lorentzian (or
/// Gaussian); both zero is an error.
pub fn eval_voigt(energy: f64, params: &LineshapeParams) -> Result<f64> {
    check_finite(energy, params)?;
    expect_kind(params, LineshapeKind::Voigt)?;
    let (l, g) = (params.lorentzian_fwhm, params.gaussian_fwhm);
    if l < 0.0 || g < 0.0 {
        return Err(Error::InvalidParameter("negative width".into()));
    }
    if l == 0.0 && g == 0.0 {
        return Err(Error::InvalidParameter(
            "voigt profile needs a non-zero width".into(),
        ));
    }
    Ok(params.amplitude * voigt_shape(energy - params.center, l, g) + params.offset)
}

/// First-order coherence time of a Lorentzian line: `τ_c = 2ħ/Γ` (ps).
pub fn coherence_time_from_lorentzian(fwhm: f64) -> Result<f64> {
    if !fwhm.is_finite() {
        return Err(Error::NonFinite("fwhm"));
    }
    if fwhm <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "linewidth must be > 0, got {fwhm}"
        )));
    }
    Ok(2.0 * HBAR_UEV_PS / fwhm)
}

/// Inverse of [`coherence_time_from_lorentzian`].
pub fn lorentzian_fwhm_from_coherence_time(tau_c: f64) -> Result<f64> {
    if !tau_c.is_finite() {
        return Err(Error::NonFinite("tau_c"));
    }
    if tau_c <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "coherence time must be > 0, got {tau_c}"
        )));
    }
    Ok(2.0 * HBAR_UEV_PS / tau_c)
}

/// Standard deviation of the spectral jitter behind a Gaussian width.
pub fn jitter_sigma_from_gaussian(fwhm: f64) -> Result<f64> {
    if !fwhm.is_finite() {
        return Err(Error::NonFinite("fwhm"));
    }
    if fwhm < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian width must be >= 0, got {fwhm}"
        )));
    }
    Ok(fwhm / FWHM_PER_SIGMA)
}

/// A sampled spectrum on a uniform, strictly increasing energy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    energies: Vec<f64>,
    intensities: Vec<f64>,
}

impl Spectrum {
    pub const MIN_POINTS: usize = 8;

    pub fn new(energies: Vec<f64>, intensities: Vec<f64>) -> Result<Self> {
        if energies.len() != intensities.len() {
            return Err(Error::InvalidSpectrum(format!(
                "{} energies but {} intensities",
                energies.len(),
                intensities.len()
            )));
        }
        if energies.len() < Self::MIN_POINTS {
            return Err(Error::InvalidSpectrum(format!(
                "need at least {} points, got {}",
                Self::MIN_POINTS,
                energies.len()
            )));
        }
        if energies.iter().chain(&intensities).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite value".into()));
        }
        if intensities.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidSpectrum("negative intensity".into()));
        }
        let step = (energies[energies.len() - 1] - energies[0]) / (energies.len() - 1) as f64;
        if step <= 0.0 {
            return Err(Error::InvalidSpectrum("energies not increasing".into()));
        }
        for (i, w) in energies.windows(2).enumerate() {
            let d = w[1] - w[0];
            if d <= 0.0 || (d - step).abs() > 1e-6 * step {
                return Err(Error::InvalidSpectrum(format!(
                    "energy grid not uniform at index {}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            energies,
            intensities,
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.energies[self.len() - 1] - self.energies[0]) / (self.len() - 1) as f64
    }

    pub fn span(&self) -> f64 {
        self.energies[self.len() - 1] - self.energies[0]
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.energies.clone(),
            self.intensities.iter().map(|v| v * factor).collect(),
        )
    }
}
