//! Two-photon interference visibility `V = (g²⊥ − g²∥)/g²⊥`.

use rayon::prelude::*;

use crate::correlation::{
    check_convolution_grid, g2_cross_trace, BeamsplitterModel, CorrelationTrace, DetectorResponse,
    EmitterModel, Polarization, ResponseKernel, TauGrid,
};
use crate::fitting::fit_lorentzian_peak;
use crate::{Error, Result};

/// Below this orthogonal-polarization value the visibility is reported as 0.
pub const PERP_FLOOR: f64 = 1e-9;

/// Largest detuning magnitude a sweep accepts (µeV).
pub const MAX_SWEEP_DETUNING: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityTrace {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    /// Indices where g²⊥ fell below [`PERP_FLOOR`] and 0 was emitted.
    pub flagged: Vec<usize>,
}

impl VisibilityTrace {
    pub fn value_at_zero(&self) -> Option<f64> {
        let n = self.taus.len();
        (n % 2 == 1).then(|| self.values[n / 2])
    }
}

fn ratio(perp: f64, para: f64) -> Option<f64> {
    (perp >= PERP_FLOOR).then(|| (perp - para) / perp)
}

pub fn visibility_trace(perp: &CorrelationTrace, para: &CorrelationTrace) -> Result<VisibilityTrace> {
    if !perp.same_grid(para) {
        return Err(Error::GridMismatch);
    }
    let mut flagged = Vec::new();
    let values = perp
        .values()
        .iter()
        .zip(para.values())
        .enumerate()
        .map(|(i, (&o, &p))| {
            ratio(o, p).unwrap_or_else(|| {
                flagged.push(i);
                0.0
            })
        })
        .collect();
    Ok(VisibilityTrace {
        taus: perp.taus().to_vec(),
        values,
        flagged,
    })
}

/// Whether the detector response is applied before post-selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    Ideal,
    Convolved,
}

/// Visibility as a function of detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityCurve {
    detunings: Vec<f64>,
    visibilities: Vec<f64>,
}

impl VisibilityCurve {
    pub fn new(detunings: Vec<f64>, visibilities: Vec<f64>) -> Result<Self> {
        if detunings.len() != visibilities.len() {
            return Err(Error::InvalidParameter(format!(
                "{} detunings but {} visibilities",
                detunings.len(),
                visibilities.len()
            )));
        }
        if detunings.iter().chain(&visibilities).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("visibility curve"));
        }
        if detunings.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "detunings must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            detunings,
            visibilities,
        })
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn visibilities(&self) -> &[f64] {
        &self.visibilities
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    /// Index of the maximum, if it is not at either end.
    pub fn interior_peak(&self) -> Option<usize> {
        let (idx, _) = self
            .visibilities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        (idx > 0 && idx + 1 < self.len()).then_some(idx)
    }
}

/// `lo, lo+step, …` up to and including `hi` (within rounding).
pub fn sweep_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(Error::NonFinite("sweep"));
    }
    if step <= 0.0 || hi < lo {
        return Err(Error::InvalidParameter(format!(
            "bad sweep {lo}:{hi}:{step}"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

/// −30…+30 µeV in 0.5 µeV steps.
pub fn default_sweep() -> Vec<f64> {
    (-60..=60).map(|k| k as f64 * 0.5).collect()
}

/// Everything needed to predict an interference measurement between two
/// emitters. The beamsplitter's polarization field is ignored; both
/// configurations are always evaluated.
#[derive(Debug, Clone)]
pub struct HomSetup {
    pub a: EmitterModel,
    pub b: EmitterModel,
    pub bs: BeamsplitterModel,
    pub det: DetectorResponse,
    pub grid: TauGrid,
    /// Full width of the post-selection window around τ = 0 (ps); 0 keeps
    /// only the τ = 0 sample.
    pub coincidence_window_ps: f64,
}

impl HomSetup {
    pub fn new(a: EmitterModel, b: EmitterModel, bs: BeamsplitterModel, det: DetectorResponse) -> Self {
        Self {
            a,
            b,
            bs,
            grid: TauGrid::default_for(&det),
            det,
            coincidence_window_ps: 0.0,
        }
    }

    pub fn with_grid(mut self, grid: TauGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_window(mut self, window_ps: f64) -> Self {
        self.coincidence_window_ps = window_ps;
        self
    }

    /// Ideal (orthogonal, parallel) cross-correlation traces.
    pub fn ideal_traces(&self, detuning: f64) -> Result<(CorrelationTrace, CorrelationTrace)> {
        let perp = g2_cross_trace(
            &self.a,
            &self.b,
            &self.bs.with_polarization(Polarization::Orthogonal),
            detuning,
            &self.grid,
        )?;
        let para = g2_cross_trace(
            &self.a,
            &self.b,
            &self.bs.with_polarization(Polarization::Parallel),
            detuning,
            &self.grid,
        )?;
        Ok((perp, para))
    }

    /// Post-selected visibility around τ = 0.
    pub fn postselected_visibility(&self, detuning: f64, response: Response) -> Result<f64> {
        if !(self.coincidence_window_ps >= 0.0) {
            return Err(Error::InvalidParameter(
                "coincidence window must be >= 0".into(),
            ));
        }
        let (perp, para) = self.ideal_traces(detuning)?;
        let zero = perp.zero_index().expect("TauGrid is odd-sized");
        let half = (0.5 * self.coincidence_window_ps / perp.step() + 1e-9).floor() as usize;
        let half = half.min(zero);
        let indices = zero - half..=zero + half;
        let (o, p) = match response {
            Response::Ideal => (
                mean(indices.clone().map(|i| perp.values()[i])),
                mean(indices.map(|i| para.values()[i])),
            ),
            Response::Convolved => {
                check_convolution_grid(&perp, &self.det)?;
                let kernel = ResponseKernel::new(&self.det, perp.step());
                (
                    mean(indices.clone().map(|i| kernel.apply_at(perp.values(), i))),
                    mean(indices.map(|i| kernel.apply_at(para.values(), i))),
                )
            }
        };
        Ok(ratio(o, p).unwrap_or(0.0))
    }

    /// Convolved post-selected visibility at each detuning, in input order.
    pub fn detuning_sweep(&self, detunings: &[f64]) -> Result<VisibilityCurve> {
        if let Some(d) = detunings
            .iter()
            .find(|d| !(d.abs() <= MAX_SWEEP_DETUNING))
        {
            return Err(Error::InvalidParameter(format!(
                "detuning {d} µeV outside ±{MAX_SWEEP_DETUNING} µeV"
            )));
        }
        let vis = detunings
            .par_iter()
            .map(|&d| self.postselected_visibility(d, Response::Convolved))
            .collect::<Result<Vec<_>>>()?;
        VisibilityCurve::new(detunings.to_vec(), vis)
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    s / n as f64
}

pub fn postselected_visibility(
    a: &EmitterModel,
    b: &EmitterModel,
    bs: &BeamsplitterModel,
    detuning: f64,
    det: &DetectorResponse,
    response: Response,
) -> Result<f64> {
    HomSetup::new(*a, *b, *bs, *det).postselected_visibility(detuning, response)
}

pub fn detuning_sweep(
    a: &EmitterModel,
    b: &EmitterModel,
    bs: &BeamsplitterModel,
    det: &DetectorResponse,
    detunings: &[f64],
) -> Result<VisibilityCurve> {
    HomSetup::new(*a, *b, *bs, *det).detuning_sweep(detunings)
}

/// FWHM of a least-squares Lorentzian through the curve.
pub fn curve_fwhm(curve: &VisibilityCurve) -> Result<f64> {
    Ok(fit_lorentzian_peak(curve)?.params.fwhm)
}

/// Width between the two linearly interpolated crossings of half the peak
/// value, with the baseline taken as zero.
pub fn half_max_width(curve: &VisibilityCurve) -> Result<f64> {
    let peak = curve.interior_peak().ok_or(Error::NoPeak)?;
    let (x, y) = (curve.detunings(), curve.visibilities());
    let half = 0.5 * y[peak];
    if !(half > 0.0) {
        return Err(Error::NoPeak);
    }
    let cross = |i: usize, j: usize| x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let left = (1..=peak)
        .rev()
        .find(|&i| y[i - 1] < half)
        .map(|i| cross(i - 1, i))
        .ok_or(Error::NoPeak)?;
    let right = (peak..y.len() - 1)
        .find(|&i| y[i + 1] < half)
        .map(|i| cross(i, i + 1))
        .ok_or(Error::NoPeak)?;
    Ok(right - left)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(values: Vec<f64>) -> CorrelationTrace {
        let n = values.len() as i64 / 2;
        CorrelationTrace::new((-n..=n).map(|k| k as f64).collect(), values).unwrap()
    }

    #[test]
    fn identical_inputs_give_zero() {
        let t = trace(vec![1.0, 0.6, 0.5, 0.6, 1.0]);
        let v = visibility_trace(&t, &t).unwrap();
        assert!(v.values.iter().all(|&x| x == 0.0));
        assert!(v.flagged.is_empty());
    }

    #[test]
    fn perfect_interference_at_zero() {
        let perp = trace(vec![1.0, 0.7, 0.5, 0.7, 1.0]);
        let para = trace(vec![1.0, 0.4, 0.0, 0.4, 1.0]);
        let v = visibility_trace(&perp, &para).unwrap();
        assert_eq!(v.value_at_zero(), Some(1.0));
    }

    #[test]
    fn reference_ideal_ratio() {
        let perp = trace(vec![1.0, 0.5125, 1.0]);
        let para = trace(vec![1.0, 0.0125, 1.0]);
        let v = visibility_trace(&perp, &para).unwrap().value_at_zero().unwrap();
        assert!((v - 0.975_609_756_097_561).abs() < 1e-12);
    }

    #[test]
    fn vanishing_perp_is_flagged() {
        let perp = trace(vec![1.0, 0.0, 1.0]);
        let para = trace(vec![1.0, 0.0, 1.0]);
        let v = visibility_trace(&perp, &para).unwrap();
        assert_eq!(v.flagged, vec![1]);
        assert_eq!(v.values[1], 0.0);
    }

    #[test]
    fn grid_mismatch() {
        let a = trace(vec![1.0; 5]);
        let b = trace(vec![1.0; 3]);
        assert!(matches!(visibility_trace(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn sweep_grid_inclusive() {
        let g = sweep_grid(-30.0, 30.0, 0.5).unwrap();
        assert_eq!(g.len(), 121);
        assert_eq!(g, default_sweep());
        assert!(sweep_grid(1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn curve_rejects_unsorted() {
        assert!(VisibilityCurve::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(VisibilityCurve::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn half_max_of_triangle() {
        let x: Vec<f64> = (-10..=10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| (1.0 - v.abs() / 8.0).max(0.0)).collect();
        let c = VisibilityCurve::new(x, y).unwrap();
        assert!((half_max_width(&c).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn half_max_needs_interior_peak() {
        let c = VisibilityCurve::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.2]).unwrap();
        assert!(matches!(half_max_width(&c), Err(Error::NoPeak)));
    }

    #[test]
    fn sweep_range_enforced() {
        let e = EmitterModel::new(600.0, 0.0, 300.0, 0.0, 0.0, 1.0).unwrap();
        let setup = HomSetup::new(
            e,
            e,
            BeamsplitterModel::balanced(Polarization::Parallel),
            DetectorResponse::new(428.0).unwrap(),
        );
        assert!(setup.detuning_sweep(&[0.0, 150.0]).is_err());
    }
}
