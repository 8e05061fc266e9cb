//! JSON experiment description: emitters, detector, beamsplitter, grid and
//! sweep settings, and the emitter pairs to compare.
//!
//! Units are part of every key (`_ps`, `_ueV`, `_kV_cm`). An emitter entry is
//! either an inline object or `{"file": "dot1.json"}`, resolved relative to the
//! directory of the referencing config.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::correlation::{BeamsplitterModel, DetectorResponse, EmitterModel, Polarization, TauGrid};
use crate::stark::StarkParams;
use crate::visibility::{default_sweep, sweep_grid, HomSetup};
use crate::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmitterSpec {
    #[serde(default)]
    label: Option<String>,
    tau_r_ps: f64,
    #[serde(default)]
    background_b: f64,
    #[serde(default, rename = "lorentzian_fwhm_ueV")]
    lorentzian_fwhm: Option<f64>,
    #[serde(default)]
    tau_c_ps: Option<f64>,
    #[serde(default, rename = "gaussian_fwhm_ueV")]
    gaussian_fwhm: Option<f64>,
    #[serde(default, rename = "jitter_sigma_ueV")]
    jitter_sigma: Option<f64>,
    #[serde(default, rename = "center_energy_ueV")]
    center_energy: Option<f64>,
    #[serde(default = "unit")]
    intensity: f64,
    #[serde(default)]
    stark: Option<StarkParams>,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BeamsplitterSpec {
    #[serde(default = "half")]
    transmission: f64,
    #[serde(default = "unit")]
    overlap_gamma: f64,
}

fn half() -> f64 {
    0.5
}

impl Default for BeamsplitterSpec {
    fn default() -> Self {
        Self {
            transmission: 0.5,
            overlap_gamma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(rename = "lo_ueV")]
    pub lo: f64,
    #[serde(rename = "hi_ueV")]
    pub hi: f64,
    #[serde(rename = "step_ueV")]
    pub step: f64,
}

impl SweepSpec {
    pub fn detunings(&self) -> Result<Vec<f64>> {
        sweep_grid(self.lo, self.hi, self.step)
    }
}

/// Two emitters to be interfered. `overlap_gamma` overrides the beamsplitter
/// value; `detuning_ueV` is the residual detuning after Stark tuning.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub overlap_gamma: Option<f64>,
    #[serde(default, rename = "detuning_ueV")]
    pub detuning: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    emitters: BTreeMap<String, serde_json::Value>,
    detector: DetectorResponse,
    #[serde(default)]
    beamsplitter: BeamsplitterSpec,
    #[serde(default)]
    grid: Option<TauGrid>,
    #[serde(default)]
    sweep: Option<SweepSpec>,
    #[serde(default)]
    coincidence_window_ps: f64,
    #[serde(default)]
    pairs: Vec<PairSpec>,
}

/// A resolved emitter together with the spectral widths it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct EmitterConfig {
    pub name: String,
    pub label: String,
    pub model: EmitterModel,
    pub lorentzian_fwhm: f64,
    pub gaussian_fwhm: f64,
    pub stark: Option<StarkParams>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub emitters: BTreeMap<String, EmitterConfig>,
    pub detector: DetectorResponse,
    pub transmission: f64,
    pub overlap_gamma: f64,
    pub grid: TauGrid,
    pub sweep: Option<SweepSpec>,
    pub coincidence_window_ps: f64,
    pub pairs: Vec<PairSpec>,
}

fn one_of(a: Option<f64>, b: Option<f64>, what: &str) -> Result<Option<(f64, bool)>> {
    match (a, b) {
        (Some(_), Some(_)) => Err(Error::InvalidParameter(format!("give only one of {what}"))),
        (Some(v), None) => Ok(Some((v, true))),
        (None, Some(v)) => Ok(Some((v, false))),
        (None, None) => Ok(None),
    }
}

fn resolve_emitter(name: &str, value: &serde_json::Value, base: &Path, depth: usize) -> Result<EmitterConfig> {
    let context = |e: serde_json::Error| Error::Parse(format!("emitter `{name}`: {e}"));
    if let Some(file) = value.get("file") {
        let extra = value.as_object().map_or(0, |o| o.len());
        let Some(file) = file.as_str().filter(|_| extra == 1) else {
            return Err(Error::Parse(format!(
                "emitter `{name}`: a file reference must be {{\"file\": \"<path>\"}}"
            )));
        };
        if depth > 4 {
            return Err(Error::Parse(format!("emitter `{name}`: file references nest too deeply")));
        }
        let path = base.join(file);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Parse(format!("emitter `{name}`: {}: {e}", path.display())))?;
        let inner: serde_json::Value = serde_json::from_str(&text).map_err(context)?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        return resolve_emitter(name, &inner, &dir, depth + 1);
    }
    let spec: EmitterSpec = serde_json::from_value(value.clone()).map_err(context)?;
    let wrap = |e: Error| Error::InvalidParameter(format!("emitter `{name}`: {e}"));

    let (tau_c, lorentzian_fwhm) = match one_of(spec.lorentzian_fwhm, spec.tau_c_ps, "lorentzian_fwhm_ueV, tau_c_ps")
        .map_err(wrap)?
    {
        Some((w, true)) => (crate::lineshape::coherence_time_from_lorentzian(w).map_err(wrap)?, w),
        Some((t, false)) => (t, crate::lineshape::lorentzian_fwhm_from_coherence_time(t).map_err(wrap)?),
        None => {
            return Err(wrap(Error::InvalidParameter(
                "one of lorentzian_fwhm_ueV or tau_c_ps is required".into(),
            )))
        }
    };
    let (jitter_sigma, gaussian_fwhm) =
        match one_of(spec.gaussian_fwhm, spec.jitter_sigma, "gaussian_fwhm_ueV, jitter_sigma_ueV").map_err(wrap)? {
            Some((g, true)) => (crate::lineshape::jitter_sigma_from_gaussian(g).map_err(wrap)?, g),
            Some((s, false)) => (s, s * crate::constants::FWHM_PER_SIGMA),
            None => (0.0, 0.0),
        };
    if let Some(stark) = &spec.stark {
        stark.validate().map_err(wrap)?;
    }
    let center = match (spec.center_energy, &spec.stark) {
        (Some(e), _) => e,
        (None, Some(s)) => s.e0,
        (None, None) => 0.0,
    };
    let model = EmitterModel::new(
        spec.tau_r_ps,
        spec.background_b,
        tau_c,
        jitter_sigma,
        center,
        spec.intensity,
    )
    .map_err(wrap)?;
    Ok(EmitterConfig {
        name: name.to_string(),
        label: spec.label.unwrap_or_else(|| name.to_string()),
        model,
        lorentzian_fwhm,
        gaussian_fwhm,
        stark: spec.stark,
    })
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(PathBuf::new);
        Self::parse(&text, &base)
    }

    /// Parses config text; `{"file": …}` references resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)?;
        if raw.emitters.is_empty() {
            return Err(Error::InvalidParameter("config defines no emitters".into()));
        }
        let emitters = raw
            .emitters
            .iter()
            .map(|(name, v)| Ok((name.clone(), resolve_emitter(name, v, base, 0)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let detector = DetectorResponse::new(raw.detector.fwhm)?;
        BeamsplitterModel::new(
            raw.beamsplitter.transmission,
            raw.beamsplitter.overlap_gamma,
            Polarization::Parallel,
        )?;
        let grid = match raw.grid {
            Some(g) => TauGrid::new(g.half_span_ps, g.step_ps)?,
            None => TauGrid::default_for(&detector),
        };
        if let Some(s) = &raw.sweep {
            s.detunings()?;
        }
        if !(raw.coincidence_window_ps.is_finite() && raw.coincidence_window_ps >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coincidence window {} ps must be finite and >= 0",
                raw.coincidence_window_ps
            )));
        }
        let cfg = Self {
            emitters,
            detector,
            transmission: raw.beamsplitter.transmission,
            overlap_gamma: raw.beamsplitter.overlap_gamma,
            grid,
            sweep: raw.sweep,
            coincidence_window_ps: raw.coincidence_window_ps,
            pairs: raw.pairs,
        };
        for p in &cfg.pairs {
            cfg.emitter(&p.a)?;
            cfg.emitter(&p.b)?;
            if let Some(g) = p.overlap_gamma {
                BeamsplitterModel::new(cfg.transmission, g, Polarization::Parallel)?;
            }
            if !p.detuning.is_finite() {
                return Err(Error::NonFinite("pair detuning"));
            }
        }
        Ok(cfg)
    }

    pub fn emitter(&self, name: &str) -> Result<&EmitterConfig> {
        self.emitters.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.emitters.keys().map(String::as_str).collect();
            Error::InvalidParameter(format!(
                "unknown emitter `{name}` (defined: {})",
                known.join(", ")
            ))
        })
    }

    pub fn beamsplitter(&self, polarization: Polarization, overlap_gamma: Option<f64>) -> Result<BeamsplitterModel> {
        BeamsplitterModel::new(
            self.transmission,
            overlap_gamma.unwrap_or(self.overlap_gamma),
            polarization,
        )
    }

    /// Interference setup for emitters `a` and `b` using the config's detector,
    /// grid and coincidence window.
    pub fn hom_setup(&self, a: &str, b: &str, overlap_gamma: Option<f64>) -> Result<HomSetup> {
        let bs = self.beamsplitter(Polarization::Parallel, overlap_gamma)?;
        Ok(HomSetup::new(self.emitter(a)?.model, self.emitter(b)?.model, bs, self.detector)
            .with_grid(self.grid)
            .with_window(self.coincidence_window_ps))
    }

    pub fn sweep_detunings(&self) -> Result<Vec<f64>> {
        match &self.sweep {
            Some(s) => s.detunings(),
            None => Ok(default_sweep()),
        }
    }
}
