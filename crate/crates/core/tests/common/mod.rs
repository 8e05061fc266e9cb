//! Fixtures and invariant checks shared by the property tests and the
//! acceptance harness.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use qdhom::correlation::{
    g1_envelope, g2_cross_ideal, g2_cross_trace, BeamsplitterModel, DetectorResponse, EmitterModel, Polarization, TauGrid,
};
use qdhom::lineshape::{coherence_time_from_lorentzian, lorentzian_fwhm_from_coherence_time, LineshapeParams};
use qdhom::stark::{energy_at_field, field_for_energy, StarkParams};
use qdhom::visibility::{HomSetup, Response};
use qdhom::Error;

pub const HBAR: f64 = 658.2119569;

pub fn detector() -> DetectorResponse {
    DetectorResponse::new(428.0).unwrap()
}

pub fn dot_a() -> EmitterModel {
    EmitterModel::from_linewidths(600.0, 0.05, 5.2, 0.0, 0.0, 1.0).unwrap()
}

pub fn dot_1() -> EmitterModel {
    EmitterModel::from_linewidths(800.0, 0.0, 2.2, 6.8, 0.0, 1.0).unwrap()
}

pub fn reference_setup() -> HomSetup {
    HomSetup::new(
        dot_a(),
        dot_1(),
        BeamsplitterModel::balanced(Polarization::Parallel),
        detector(),
    )
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

// ---------------------------------------------------------------- strategies

/// Physically admissible emitters: coherence time at most the radiative limit
/// `2·τ_r`.
pub fn emitter() -> impl Strategy<Value = EmitterModel> {
    (100.0..2000.0f64, 0.0..=1.0f64, 0.02..=1.0f64, 0.0..8.0f64, 0.2..5.0f64).prop_map(
        |(tau_r, b, frac, sigma, intensity)| {
            EmitterModel::new(tau_r, b, frac * 2.0 * tau_r, sigma, 0.0, intensity).unwrap()
        },
    )
}

pub fn beamsplitter() -> impl Strategy<Value = (f64, f64)> {
    (0.0..=1.0f64, 0.0..=1.0f64)
}

pub fn kind_and_widths() -> impl Strategy<Value = LineshapeParams> {
    (0usize..3, -50.0..50.0f64, 0.1..20.0f64, 0.1..20.0f64, 0.1..10.0f64).prop_map(|(k, c, l, g, a)| match k {
        0 => LineshapeParams::lorentzian(c, l, a),
        1 => LineshapeParams::gaussian(c, g, a),
        _ => LineshapeParams::voigt(c, l, g, a),
    })
}

/// Parabolic Stark maps with fields in ±600 kV/cm.
pub fn stark_map() -> impl Strategy<Value = StarkParams> {
    (1.2e6..1.4e6f64, -20.0..20.0f64, -0.2..0.2f64, -600.0..0.0f64, 0.0..600.0f64)
        .prop_map(|(e0, p, b, lo, hi)| StarkParams::new(e0, p, b, lo, hi).unwrap())
}

// ---------------------------------------------------------------- checks

/// All three profiles are even about the centre.
pub fn check_lineshape_symmetry(p: &LineshapeParams, x: f64) -> Result<(), TestCaseError> {
    let (l, r) = (p.value(p.center - x), p.value(p.center + x));
    prop_assert!((l - r).abs() <= 1e-12 * l.abs().max(1e-300), "{l} vs {r}");
    Ok(())
}

/// Profiles are non-negative and non-increasing away from the centre.
pub fn check_lineshape_monotone(p: &LineshapeParams, xs: &[f64]) -> Result<(), TestCaseError> {
    let mut prev = p.value(p.center);
    for &x in xs {
        let v = p.value(p.center + x);
        prop_assert!(v >= 0.0);
        prop_assert!(v <= prev * (1.0 + 1e-12), "rises at x = {x}: {v} > {prev}");
        prev = v;
    }
    Ok(())
}

pub fn check_voigt_fwhm_bounds(l: f64, g: f64) -> Result<(), TestCaseError> {
    let w = LineshapeParams::voigt(0.0, l, g, 1.0).fwhm();
    let lo = l.max(g);
    prop_assert!(w >= lo * (1.0 - 1e-9) && w <= (l + g) * (1.0 + 1e-9), "{w} not in [{lo}, {}]", l + g);
    Ok(())
}

/// A Voigt with one width set to zero is the other pure profile, and one
/// with a vanishing width approaches it continuously.
pub fn check_voigt_limits(w: f64, x: f64) -> Result<(), TestCaseError> {
    let lor = LineshapeParams::lorentzian(0.0, w, 1.0);
    let gau = LineshapeParams::gaussian(0.0, w, 1.0);
    let v_l = LineshapeParams::voigt(0.0, w, 0.0, 1.0);
    let v_g = LineshapeParams::voigt(0.0, 0.0, w, 1.0);
    prop_assert!((v_l.value(x) - lor.value(x)).abs() <= 1e-12);
    prop_assert!((v_g.value(x) - gau.value(x)).abs() <= 1e-12);
    let eps = 1e-6;
    let near_l = LineshapeParams::voigt(0.0, w, eps * w, 1.0).value(x);
    let near_g = LineshapeParams::voigt(0.0, eps * w, w, 1.0).value(x);
    prop_assert!((near_l - lor.value(x)).abs() <= 1e-5, "{near_l} vs {}", lor.value(x));
    prop_assert!((near_g - gau.value(x)).abs() <= 1e-5, "{near_g} vs {}", gau.value(x));
    Ok(())
}

pub fn check_coherence_round_trip(fwhm: f64) -> Result<(), TestCaseError> {
    let back = lorentzian_fwhm_from_coherence_time(coherence_time_from_lorentzian(fwhm).unwrap()).unwrap();
    prop_assert!((back / fwhm - 1.0).abs() <= 1e-12);
    Ok(())
}

/// g²(τ) = g²(−τ) for both polarizations, pointwise and on traces.
pub fn check_g2_symmetry(
    a: &EmitterModel,
    b: &EmitterModel,
    t: f64,
    gamma: f64,
    detuning: f64,
    tau: f64,
) -> Result<(), TestCaseError> {
    for pol in [Polarization::Parallel, Polarization::Orthogonal] {
        let bs = BeamsplitterModel::new(t, gamma, pol).unwrap();
        match (g2_cross_ideal(tau, a, b, &bs, detuning), g2_cross_ideal(-tau, a, b, &bs, detuning)) {
            (Ok(p), Ok(m)) => prop_assert!((p - m).abs() <= 1e-12 * p.max(1.0), "{p} vs {m}"),
            (Err(Error::ZeroIntensity), Err(Error::ZeroIntensity)) => {}
            other => return Err(fail(format!("{other:?}"))),
        }
    }
    Ok(())
}

/// Traces are non-negative and return to 1 well beyond every correlation time.
pub fn check_g2_bounds(
    a: &EmitterModel,
    b: &EmitterModel,
    t: f64,
    gamma: f64,
    detuning: f64,
    tau: f64,
) -> Result<(), TestCaseError> {
    let perp = BeamsplitterModel::new(t, gamma, Polarization::Orthogonal).unwrap();
    let para = perp.with_polarization(Polarization::Parallel);
    let (o, p) = match (
        g2_cross_ideal(tau, a, b, &perp, detuning),
        g2_cross_ideal(tau, a, b, &para, detuning),
    ) {
        (Ok(o), Ok(p)) => (o, p),
        (Err(Error::ZeroIntensity), Err(Error::ZeroIntensity)) => return Ok(()),
        other => return Err(fail(format!("{other:?}"))),
    };
    prop_assert!(o >= 0.0 && p >= 0.0);
    let far = 10.0 * a.tau_r.max(b.tau_r).max(a.tau_c).max(b.tau_c);
    for pol in [perp, para] {
        let v = g2_cross_ideal(far, a, b, &pol, detuning).unwrap();
        prop_assert!((v - 1.0).abs() <= 1e-3, "g2({far}) = {v}");
    }
    Ok(())
}

/// γ = 0 removes all interference: both polarizations agree.
pub fn check_gamma_zero(a: &EmitterModel, b: &EmitterModel, t: f64, detuning: f64, tau: f64) -> Result<(), TestCaseError> {
    let perp = BeamsplitterModel::new(t, 0.0, Polarization::Orthogonal).unwrap();
    let para = perp.with_polarization(Polarization::Parallel);
    match (
        g2_cross_ideal(tau, a, b, &perp, detuning),
        g2_cross_ideal(tau, a, b, &para, detuning),
    ) {
        (Ok(o), Ok(p)) => prop_assert!((o - p).abs() <= 1e-12, "{o} vs {p}"),
        (Err(Error::ZeroIntensity), Err(Error::ZeroIntensity)) => {}
        other => return Err(fail(format!("{other:?}"))),
    }
    Ok(())
}

/// With T ∈ {0, 1} and equal intensities each detector sees one source, so
/// g² is identically 1.
pub fn check_extreme_transmission(
    a: &EmitterModel,
    b: &EmitterModel,
    t_is_one: bool,
    gamma: f64,
    detuning: f64,
) -> Result<(), TestCaseError> {
    let b = EmitterModel { intensity: a.intensity, ..*b };
    let t = if t_is_one { 1.0 } else { 0.0 };
    let grid = TauGrid::new(3000.0, 10.0).unwrap();
    for pol in [Polarization::Parallel, Polarization::Orthogonal] {
        let bs = BeamsplitterModel::new(t, gamma, pol).unwrap();
        let trace = g2_cross_trace(a, &b, &bs, detuning, &grid).unwrap();
        for v in trace.values() {
            prop_assert!((v - 1.0).abs() <= 1e-12, "{v}");
        }
    }
    Ok(())
}

/// At τ = 0 the parallel value does not depend on the detuning.
pub fn check_detuning_blind_at_zero(a: &EmitterModel, b: &EmitterModel, t: f64, gamma: f64, detuning: f64) -> Result<(), TestCaseError> {
    let bs = BeamsplitterModel::new(t, gamma, Polarization::Parallel).unwrap();
    match (g2_cross_ideal(0.0, a, b, &bs, 0.0), g2_cross_ideal(0.0, a, b, &bs, detuning)) {
        (Ok(x), Ok(y)) => prop_assert!((x - y).abs() <= 1e-12),
        (Err(_), Err(_)) => {}
        other => return Err(fail(format!("{other:?}"))),
    }
    Ok(())
}

/// Solving for the field and mapping back reproduces the target.
pub fn check_stark_round_trip(s: &StarkParams, field: f64) -> Result<(), TestCaseError> {
    let field = s.field_min + field * (s.field_max - s.field_min);
    let target = energy_at_field(s, field).unwrap();
    let f = field_for_energy(s, target)
        .map_err(|e| fail(format!("no solution for an energy reached at {field}: {e}")))?;
    let back = energy_at_field(s, f).unwrap();
    prop_assert!((back - target).abs() <= 1e-9 * target.abs(), "{back} vs {target}");
    Ok(())
}

/// Second differences of `E(F)` on a uniform grid are constant (2βh²).
pub fn check_stark_quadratic(s: &StarkParams, n: usize) -> Result<(), TestCaseError> {
    let h = (s.field_max - s.field_min) / n as f64;
    let e: Vec<f64> = (0..=n)
        .map(|i| energy_at_field(s, (s.field_min + h * i as f64).min(s.field_max)).unwrap())
        .collect();
    let expect = 2.0 * s.polarizability_beta * h * h;
    let scale = s.e0.abs();
    for w in e.windows(3) {
        let d2 = w[2] - 2.0 * w[1] + w[0];
        prop_assert!((d2 - expect).abs() <= 1e-9 * scale, "{d2} vs {expect}");
    }
    Ok(())
}

/// Orthogonal minus parallel has the sign of the interference term
/// `γ²·g¹_A·g¹_B·cos(ΔE·τ/ħ)` and vanishes with it.
pub fn check_polarization_ordering(
    a: &EmitterModel,
    b: &EmitterModel,
    t: f64,
    gamma: f64,
    detuning: f64,
    tau: f64,
) -> Result<(), TestCaseError> {
    let perp = BeamsplitterModel::new(t, gamma, Polarization::Orthogonal).unwrap();
    let para = perp.with_polarization(Polarization::Parallel);
    let (o, p) = match (
        g2_cross_ideal(tau, a, b, &perp, detuning),
        g2_cross_ideal(tau, a, b, &para, detuning),
    ) {
        (Ok(o), Ok(p)) => (o, p),
        (Err(Error::ZeroIntensity), Err(Error::ZeroIntensity)) => return Ok(()),
        other => return Err(fail(format!("{other:?}"))),
    };
    let term = gamma * gamma * g1_envelope(tau, a) * g1_envelope(tau, b) * (detuning * tau / HBAR).cos();
    let diff = o - p;
    if term == 0.0 {
        prop_assert!(diff.abs() <= 1e-12, "{o} vs {p} with no interference");
    } else {
        prop_assert!(diff * term >= 0.0 || diff.abs() <= 1e-12, "o − p = {diff} but term = {term}");
    }
    Ok(())
}

/// Both visibility estimates lie in [0, 1].
pub fn check_visibility_bounds(setup: &HomSetup, detuning: f64, response: Response) -> Result<(), TestCaseError> {
    match setup.postselected_visibility(detuning, response) {
        Ok(v) => prop_assert!((0.0..=1.0).contains(&v), "V = {v}"),
        Err(Error::ZeroIntensity) => {}
        Err(e) => return Err(fail(e.to_string())),
    }
    Ok(())
}

/// Any valid setup on a 428 ps detector.
pub fn any_setup() -> impl Strategy<Value = HomSetup> {
    (emitter(), emitter(), beamsplitter()).prop_map(|(a, b, (t, g))| {
        let bs = BeamsplitterModel::new(t, g, Polarization::Parallel).unwrap();
        HomSetup::new(a, b, bs, detector()).with_grid(TauGrid::new(8000.0, 4.0).unwrap())
    })
}
