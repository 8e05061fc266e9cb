use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use qdhom::config::{EmitterConfig, ExperimentConfig};
use qdhom::correlation::{g2_auto_measured, g2_auto_trace, g2_cross_measured, g2_cross_trace, TauGrid};
use qdhom::fitting::{fit_lineshape_with, LineshapeFitOptions, OffsetMode, Weighting};
use qdhom::io::{read_spectrum_file, write_columns, write_spectrum, write_trace, ENERGY_COLUMN};
use qdhom::lineshape::{LineshapeKind, LineshapeParams};
use qdhom::stark::{energy_at_field, field_for_energy, tune_pair, StarkParams};
use qdhom::synthdata::{make_spectrum, sample_coincidences, NoiseModel, SynthConfig};
use qdhom::visibility::{curve_fwhm, half_max_width, sweep_grid, Response};
use qdhom::{Error, Result};

use crate::{
    Command, G2Args, HomArgs, LineshapeFitArgs, ResponseFlags, StarkArgs, SynthG2Args, SynthKind, SynthSpectrumArgs,
    TableArgs, VisibilityArgs,
};

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::LineshapeFit(a) => lineshape_fit(a),
        Command::G2(a) => g2(a),
        Command::Hom(a) => hom(a),
        Command::Visibility(a) => visibility(a),
        Command::Stark(a) => stark(a),
        Command::Table(a) => table(a),
        Command::Synth(s) => match s.kind {
            SynthKind::G2(a) => synth_g2(a),
            SynthKind::Spectrum(a) => synth_spectrum(a),
        },
    }
}

/// Prefixes I/O errors with the file they concern.
fn at_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(io) => Error::Io(io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    })
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    at_path(path, ExperimentConfig::load(path))
}

/// Runs `body` against `path`, or stdout when absent.
fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(at_path(p, File::create(p).map_err(Error::from))?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_json(path: Option<&Path>, value: &Value) -> Result<()> {
    emit(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn response(flags: &ResponseFlags) -> Response {
    if flags.ideal {
        Response::Ideal
    } else {
        Response::Convolved
    }
}

fn lineshape_fit(args: LineshapeFitArgs) -> Result<()> {
    let spec = at_path(&args.spectrum, read_spectrum_file(&args.spectrum))?;
    let kind: LineshapeKind = args.kind.into();
    let opts = LineshapeFitOptions {
        offset: if args.fit_offset { OffsetMode::Free } else { OffsetMode::Fixed(0.0) },
        weighting: if args.poisson { Weighting::Poisson } else { Weighting::Uniform },
        ..Default::default()
    };
    let fit = fit_lineshape_with(&spec, kind, &opts)?;
    let sigmas = fit.uncertainties();
    let mut parameters = Map::new();
    for ((name, v), s) in fit.param_names.iter().zip(&fit.values).zip(&sigmas) {
        parameters.insert(name.to_string(), json!({ "value": v, "uncertainty": finite_or_null(*s) }));
    }
    let report = json!({
        "kind": kind.name(),
        "params": fit.params,
        "fwhm_ueV": fit.params.fwhm(),
        "parameters": parameters,
        "chi2_reduced": fit.chi2_reduced,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "points": spec.len(),
    });
    if let Some(path) = &args.residuals {
        emit(Some(path), |w| {
            write_columns(w, &[ENERGY_COLUMN, "residual"], &[spec.energies(), &fit.residuals])
        })?;
    }
    emit_json(args.output.as_deref(), &report)
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn g2(args: G2Args) -> Result<()> {
    let cfg = load(&args.config)?;
    let src = cfg.emitter(&args.emitter)?.model;
    let trace = match response(&args.response) {
        Response::Ideal => g2_auto_trace(&src, &cfg.grid)?,
        Response::Convolved => g2_auto_measured(&src, &cfg.detector, &cfg.grid)?,
    };
    emit(args.out.output.as_deref(), |w| write_trace(w, &trace, "g2"))
}

fn hom(args: HomArgs) -> Result<()> {
    let cfg = load(&args.config)?;
    let a = cfg.emitter(&args.a)?.model;
    let b = cfg.emitter(&args.b)?.model;
    let bs = cfg.beamsplitter(args.polarization.into(), args.gamma)?;
    let trace = match response(&args.response) {
        Response::Ideal => g2_cross_trace(&a, &b, &bs, args.detuning, &cfg.grid)?,
        Response::Convolved => g2_cross_measured(&a, &b, &bs, args.detuning, &cfg.detector, &cfg.grid)?,
    };
    emit(args.out.output.as_deref(), |w| write_trace(w, &trace, "g2"))
}

fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Parse(format!("sweep `{s}` is not lo:hi:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse::<f64>().map_err(|_| bad())?;
        if !slot.is_finite() {
            return Err(bad());
        }
    }
    sweep_grid(v[0], v[1], v[2]).map_err(|e| Error::Parse(format!("sweep `{s}`: {e}")))
}

fn visibility(args: VisibilityArgs) -> Result<()> {
    let cfg = load(&args.config)?;
    let setup = cfg.hom_setup(&args.a, &args.b, args.gamma)?;
    if let Some(d) = args.at {
        let mut report = json!({
            "a": args.a,
            "b": args.b,
            "detuning_ueV": d,
            "visibility": setup.postselected_visibility(d, Response::Convolved)?,
        });
        if args.ideal {
            report["visibility_ideal"] = json!(setup.postselected_visibility(d, Response::Ideal)?);
        }
        return emit_json(None, &report);
    }
    let detunings = match &args.sweep {
        Some(s) => parse_sweep(s)?,
        None => cfg.sweep_detunings()?,
    };
    let curve = setup.detuning_sweep(&detunings)?;
    if let Some(path) = &args.curve {
        emit(Some(path), |w| qdhom::io::write_curve(w, &curve))?;
    }
    let v = curve.visibilities();
    let peak = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let at_peak = curve.detunings()[v.iter().position(|&x| x == peak).unwrap_or(0)];
    let report = json!({
        "a": args.a,
        "b": args.b,
        "points": curve.len(),
        "peak_visibility": peak,
        "peak_detuning_ueV": at_peak,
        "half_max_fwhm_ueV": half_max_width(&curve).ok(),
        "lorentzian_fit_fwhm_ueV": curve_fwhm(&curve).ok(),
    });
    emit_json(None, &report)
}

fn stark_of(e: &EmitterConfig) -> Result<&StarkParams> {
    e.stark
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("emitter `{}` has no stark parameters", e.name)))
}

fn stark(args: StarkArgs) -> Result<()> {
    let cfg = load(&args.config)?;
    let em = cfg.emitter(&args.emitter)?;
    let s = stark_of(em)?;
    let q = &args.query;
    let report = if let Some(f) = q.field {
        json!({ "emitter": em.name, "field_kV_cm": f, "energy_ueV": energy_at_field(s, f)? })
    } else if let Some(e) = q.target {
        json!({ "emitter": em.name, "field_kV_cm": field_for_energy(s, e)?, "energy_ueV": e })
    } else if let Some(other) = &q.tune_to {
        let fixed = cfg.emitter(other)?.model.center_energy;
        let sol = tune_pair(fixed, s)?;
        json!({ "emitter": em.name, "reference": other, "solution": sol })
    } else {
        unreachable!("clap requires one query")
    };
    emit_json(None, &report)
}

struct Row {
    a: String,
    b: String,
    gamma: f64,
    detuning: f64,
    b_a: f64,
    b_b: f64,
    g2_a: f64,
    g2_b: f64,
    v_raw: f64,
    v_ideal: f64,
    field: Option<f64>,
}

fn table_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let measured_zero = |e: &EmitterConfig| -> Result<f64> {
        g2_auto_measured(&e.model, &cfg.detector, &cfg.grid)?
            .value_at_zero()
            .ok_or(Error::InvalidGrid("grid has no zero delay".into()))
    };
    cfg.pairs
        .iter()
        .map(|p| {
            let (ea, eb) = (cfg.emitter(&p.a)?, cfg.emitter(&p.b)?);
            let setup = cfg.hom_setup(&p.a, &p.b, p.overlap_gamma)?;
            let field = match &eb.stark {
                Some(s) => Some(tune_pair(ea.model.center_energy, s)?.field),
                None => None,
            };
            Ok(Row {
                a: p.a.clone(),
                b: p.b.clone(),
                gamma: p.overlap_gamma.unwrap_or(cfg.overlap_gamma),
                detuning: p.detuning,
                b_a: ea.model.background_b,
                b_b: eb.model.background_b,
                g2_a: measured_zero(ea)?,
                g2_b: measured_zero(eb)?,
                v_raw: setup.postselected_visibility(p.detuning, Response::Convolved)?,
                v_ideal: setup.postselected_visibility(p.detuning, Response::Ideal)?,
                field,
            })
        })
        .collect()
}

fn table(args: TableArgs) -> Result<()> {
    let cfg = load(&args.config)?;
    if cfg.pairs.is_empty() {
        return Err(Error::InvalidParameter("config lists no pairs".into()));
    }
    let rows = table_rows(&cfg)?;
    if args.json {
        let out: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "a": r.a, "b": r.b,
                    "overlap_gamma": r.gamma,
                    "detuning_ueV": r.detuning,
                    "background_b_a": r.b_a, "background_b_b": r.b_b,
                    "g2_zero_measured_a": r.g2_a, "g2_zero_measured_b": r.g2_b,
                    "visibility_raw": r.v_raw,
                    "visibility_ideal": r.v_ideal,
                    "tuning_field_kV_cm": r.field,
                })
            })
            .collect();
        return emit_json(None, &Value::Array(out));
    }
    emit(None, |w| {
        writeln!(
            w,
            "{:<20} {:>5} {:>8} {:>6} {:>6} {:>8} {:>8} {:>7} {:>7} {:>10}",
            "pair", "gamma", "dE_ueV", "B_a", "B_b", "g2m_a", "g2m_b", "V_raw", "V_id", "F_kV_cm"
        )?;
        for r in &rows {
            let field = r.field.map_or_else(|| "-".to_string(), |f| format!("{f:.2}"));
            writeln!(
                w,
                "{:<20} {:>5.2} {:>8.2} {:>6.3} {:>6.3} {:>8.4} {:>8.4} {:>7.4} {:>7.4} {:>10}",
                format!("{}/{}", r.a, r.b),
                r.gamma,
                r.detuning,
                r.b_a,
                r.b_b,
                r.g2_a,
                r.g2_b,
                r.v_raw,
                r.v_ideal,
                field
            )?;
        }
        Ok(())
    })
}

fn synth_g2(args: SynthG2Args) -> Result<()> {
    let cfg = load(&args.config)?;
    let src = cfg.emitter(&args.emitter)?.model;
    let synth = SynthConfig::new(args.seed, args.events, args.window_ps, args.bin_width_ps)?.with_noise(if args.poisson {
        NoiseModel::Poisson
    } else {
        NoiseModel::None
    });
    // the ideal trace must reach past the window by the sampler's jitter margin
    let step = cfg.grid.step_ps;
    let needed = 0.5 * args.window_ps + 10.0 * cfg.detector.sigma();
    let half = cfg.grid.half_span_ps.max((needed / step).ceil() * step);
    let ideal = g2_auto_trace(&src, &TauGrid::new(half, step)?)?;
    let hist = sample_coincidences(&ideal, &cfg.detector, &synth)?;
    emit(args.out.output.as_deref(), |w| write_trace(w, &hist, "counts"))
}

fn synth_spectrum(args: SynthSpectrumArgs) -> Result<()> {
    let cfg = load(&args.config)?;
    let em = cfg.emitter(&args.emitter)?;
    let c = em.model.center_energy;
    let params = match (em.lorentzian_fwhm > 0.0, em.gaussian_fwhm > 0.0) {
        (true, true) => LineshapeParams::voigt(c, em.lorentzian_fwhm, em.gaussian_fwhm, 1.0),
        (false, true) => LineshapeParams::gaussian(c, em.gaussian_fwhm, 1.0),
        _ => LineshapeParams::lorentzian(c, em.lorentzian_fwhm, 1.0),
    };
    let spec = make_spectrum(&params, args.points, args.span, args.noise_pct / 100.0, args.seed)?;
    emit(args.out.output.as_deref(), |w| write_spectrum(w, &spec))
}
