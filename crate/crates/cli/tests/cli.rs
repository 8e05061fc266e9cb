use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use qdhom::config::ExperimentConfig;
use qdhom::correlation::{g2_cross_trace, Polarization};
use qdhom::io::{read_curve_file, read_spectrum_file, read_trace_file, read_xy};
use qdhom::visibility::Response;

fn dots_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/dots.json")
}

fn qdhom(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdhom"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> &[u8] {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    &out.stdout
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(ok(out)).expect("JSON report")
}

fn cfg_arg() -> String {
    dots_config().display().to_string()
}

#[test]
fn missing_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdhom(&["lineshape-fit", "absent.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.csv"));
    let out = qdhom(&["g2", "absent.json", "dot_a"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flat_spectrum_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("energy_ueV,intensity\n");
    for i in 0..30 {
        text.push_str(&format!("{i},3\n"));
    }
    std::fs::write(dir.path().join("flat.csv"), text).unwrap();
    let out = qdhom(&["lineshape-fit", "flat.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn bad_arguments_exit_1_and_help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_arg();
    assert_eq!(qdhom(&["bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(
        qdhom(&["hom", &cfg, "dot_a", "dot_1", "--detuning", "inf"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(qdhom(&["g2", &cfg, "nobody"], dir.path()).status.code(), Some(1));
    assert_eq!(qdhom(&["--help"], dir.path()).status.code(), Some(0));
    assert_eq!(qdhom(&["synth", "--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn stark_reports_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_arg();
    let r = json(&qdhom(&["stark", &cfg, "dot_1", "--target", "1314000"], dir.path()));
    assert!((r["field_kV_cm"].as_f64().unwrap() + 50.0).abs() < 1e-9, "{r}");
    let r = json(&qdhom(&["stark", &cfg, "dot_1", "--field", "-50"], dir.path()));
    assert!((r["energy_ueV"].as_f64().unwrap() - 1_314_000.0).abs() < 1e-6, "{r}");
    let r = json(&qdhom(&["stark", &cfg, "dot_1", "--tune-to", "dot_a"], dir.path()));
    assert!((r["solution"]["field_kV_cm"].as_f64().unwrap() + 50.0).abs() < 1e-9, "{r}");
    // beyond the parabola vertex
    let out = qdhom(&["stark", &cfg, "dot_1", "--target", "1400000"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // dot_a carries no Stark map
    let out = qdhom(&["stark", &cfg, "dot_a", "--field", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn visibility_matches_library_and_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_arg();
    let r = json(&qdhom(&["visibility", &cfg, "dot_a", "dot_1", "--at", "0", "--ideal"], dir.path()));
    let lib = ExperimentConfig::load(dots_config()).unwrap().hom_setup("dot_a", "dot_1", None).unwrap();
    let conv = lib.postselected_visibility(0.0, Response::Convolved).unwrap();
    assert_eq!(r["visibility"].as_f64().unwrap(), conv);
    // T = 1/2, γ = 1, ΔE = 0: V = 1/(1 + (B_a + B_b)/2)
    let want = 1.0 / (1.0 + 0.5 * (0.05 + 0.0));
    assert!((r["visibility_ideal"].as_f64().unwrap() - want).abs() < 1e-9, "{r}");
}

#[test]
fn table_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_arg();
    let rows = json(&qdhom(&["table", &cfg, "--json"], dir.path()));
    let rows = rows.as_array().unwrap();
    let find = |a: &str, b: &str, gamma: f64| {
        rows.iter()
            .find(|r| r["a"] == a && r["b"] == b && r["overlap_gamma"].as_f64() == Some(gamma))
            .unwrap_or_else(|| panic!("no row {a}/{b} γ={gamma}"))
    };
    let ab = find("dot_a", "dot_1", 1.0);
    assert!((ab["visibility_ideal"].as_f64().unwrap() - 40.0 / 41.0).abs() < 1e-9);
    assert!((ab["tuning_field_kV_cm"].as_f64().unwrap() + 50.0).abs() < 1e-9);
    let off = find("dot_a", "dot_1", 0.0);
    assert_eq!(off["visibility_raw"].as_f64().unwrap(), 0.0);
    assert_eq!(off["visibility_ideal"].as_f64().unwrap(), 0.0);
    let selfpair = find("dot_a", "dot_a", 1.0);
    let b = selfpair["background_b_a"].as_f64().unwrap();
    assert!((selfpair["visibility_ideal"].as_f64().unwrap() - 1.0 / (1.0 + b)).abs() < 1e-9);

    let text = String::from_utf8(ok(&qdhom(&["table", &cfg], dir.path())).to_vec()).unwrap();
    assert_eq!(text.lines().count(), rows.len() + 1);
}

#[test]
fn csv_outputs_reparse() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = cfg_arg();

    ok(&qdhom(&["g2", &cfg, "dot_a", "-o", "g2.csv"], d));
    let t = read_trace_file(d.join("g2.csv")).unwrap();
    assert!((t.value_at_zero().unwrap() - 0.242_165).abs() < 1e-5);

    ok(&qdhom(&["hom", &cfg, "dot_a", "dot_1", "--polarization", "parallel", "--ideal", "-o", "hom.csv"], d));
    let t = read_trace_file(d.join("hom.csv")).unwrap();
    let lib = ExperimentConfig::load(dots_config()).unwrap();
    let bs = lib.beamsplitter(Polarization::Parallel, None).unwrap();
    let (a, b) = (lib.emitter("dot_a").unwrap().model, lib.emitter("dot_1").unwrap().model);
    let want = g2_cross_trace(&a, &b, &bs, 0.0, &lib.grid).unwrap();
    assert_eq!(t.taus(), want.taus());
    assert_eq!(t.values(), want.values());

    let r = json(&qdhom(&["visibility", &cfg, "dot_a", "dot_1", "--sweep", "-20:20:1", "--curve", "v.csv"], d));
    let c = read_curve_file(d.join("v.csv")).unwrap();
    assert_eq!(c.len(), 41);
    assert_eq!(r["points"].as_u64(), Some(41));
    assert!(r["half_max_fwhm_ueV"].as_f64().unwrap() > 0.0);

    ok(&qdhom(&["synth", "spectrum", &cfg, "dot_1", "--noise-pct", "1", "-o", "s.csv"], d));
    let s = read_spectrum_file(d.join("s.csv")).unwrap();
    assert_eq!(s.len(), 200);
    ok(&qdhom(&["lineshape-fit", "s.csv", "--residuals", "r.csv", "-o", "fit.json"], d));
    let (e, res) = read_xy(std::fs::File::open(d.join("r.csv")).unwrap(), "energy_ueV").unwrap();
    assert_eq!(e, s.energies());
    assert_eq!(res.len(), s.len());

    ok(&qdhom(&["synth", "g2", &cfg, "dot_1", "--window-ps", "4000", "-o", "h.csv"], d));
    let h = read_trace_file(d.join("h.csv")).unwrap();
    assert_eq!(h.len(), 101);
}

#[test]
fn noiseless_voigt_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = cfg_arg();
    ok(&qdhom(&["synth", "spectrum", &cfg, "dot_1", "--noise-pct", "0", "--span-ueV", "60", "-o", "s.csv"], d));
    let r = json(&qdhom(&["lineshape-fit", "s.csv", "--kind", "voigt"], d));
    let p = &r["params"];
    assert!((p["lorentzian_fwhm_ueV"].as_f64().unwrap() - 2.2).abs() < 1e-4, "{r}");
    assert!((p["gaussian_fwhm_ueV"].as_f64().unwrap() - 6.8).abs() < 1e-4, "{r}");
    assert!((p["center_ueV"].as_f64().unwrap() - 1_314_475.0).abs() < 1e-4, "{r}");
    assert_eq!(r["converged"], Value::Bool(true));
    assert!(r["parameters"]["gaussian_fwhm_ueV"]["uncertainty"].is_number());
}

#[test]
fn deterministic_and_confined_to_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = cfg_arg();
    let run = |seed: &str, name: &str| {
        ok(&qdhom(
            &["synth", "g2", &cfg, "dot_a", "--seed", seed, "--events", "20000", "--poisson", "-o", name],
            d,
        ));
        std::fs::read(d.join(name)).unwrap()
    };
    let first = run("7", "a.csv");
    assert_eq!(first, run("7", "b.csv"));
    assert_ne!(first, run("8", "c.csv"));

    let spec = |name: &str| {
        ok(&qdhom(&["synth", "spectrum", &cfg, "dot_a", "--seed", "4", "-o", name], d));
        std::fs::read(d.join(name)).unwrap()
    };
    assert_eq!(spec("s1.csv"), spec("s2.csv"));

    let stdout_a = ok(&qdhom(&["table", &cfg, "--json"], d)).to_vec();
    let stdout_b = ok(&qdhom(&["table", &cfg, "--json"], d)).to_vec();
    assert_eq!(stdout_a, stdout_b);

    let mut names: Vec<String> = std::fs::read_dir(d)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["a.csv", "b.csv", "c.csv", "s1.csv", "s2.csv"]);
}
