use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn szbounds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szbounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

/// Rows of a CSV table as maps from column name to text.
fn table(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records()
        .map(|rec| {
            header
                .iter()
                .cloned()
                .zip(rec.unwrap().iter().map(String::from))
                .collect()
        })
        .collect()
}

fn num(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

// sech^2 barrier V_e sech^2(x/L) with hbar = 1, 2m = 1
fn sech2_transmission(v: f64, l: f64, e: f64) -> f64 {
    let k = e.sqrt();
    let s = (PI * k * l).sinh().powi(2);
    let disc = 1.0 - 4.0 * v * l * l;
    let c = if disc >= 0.0 {
        (0.5 * PI * disc.sqrt()).cos().powi(2)
    } else {
        (0.5 * PI * (-disc).sqrt()).cosh().powi(2)
    };
    s / (s + c)
}

#[test]
fn free_potential_transmits_fully() {
    let o = szbounds(&["compute", "--expr", "0", "--domain", "-5,5", "--energies", "0.5,1,2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!((num(r, "transmission") - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sech2_sweep_matches_closed_form() {
    let o = szbounds(&[
        "compute",
        "--potential",
        "sech2",
        "--params",
        "V_e=0.3,L=1.5",
        "--e-min",
        "0.2",
        "--e-max",
        "3",
        "--count",
        "8",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let exact = sech2_transmission(0.3, 1.5, num(r, "energy"));
        let t = num(r, "transmission");
        assert!(
            (t - exact).abs() / exact < 1e-6,
            "E={} T={t} exact={exact}",
            r["energy"]
        );
    }
}

#[test]
fn energy_below_asymptote_exits_two() {
    let o = szbounds(&["compute", "--potential", "tanh_step", "--energies", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error code=NoPropagatingMode message=\""));
    assert!(err.contains("context=\"compute\""));
}

#[test]
fn config_errors_exit_three() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "schema_version = 7\n[potential]\nkind = \"catalog\"\nname = \"sech2\""
    )
    .unwrap();
    let o = szbounds(&["compute", "--config", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error code=ConfigError"));

    let o = szbounds(&["compute", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error code=UsageError"));
}

#[test]
fn flags_override_config_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "schema_version = 1\n[potential]\nkind = \"catalog\"\nname = \"sech2\"\n[sweep]\nenergies = [1.0, 2.0]\nformat = \"json\""
    )
    .unwrap();
    let path = f.path().to_str().unwrap();
    let o = szbounds(&["compute", "--config", path]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert!(v[0].get("transmission").is_some());

    let o = szbounds(&[
        "compute",
        "--config",
        path,
        "--energies",
        "0.5,1,1.5",
        "--format",
        "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(table(&stdout(&o)).len(), 3);
}

#[test]
fn output_is_identical_for_any_worker_count() {
    let args = [
        "bounds",
        "--potential",
        "sech2",
        "--e-min",
        "0.2",
        "--e-max",
        "5",
        "--count",
        "12",
        "--spacing",
        "log",
    ];
    let run = |w: &str| {
        Command::new(env!("CARGO_BIN_EXE_szbounds"))
            .args(args)
            .env("SZBOUNDS_WORKERS", w)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains('\r'));
    let bad = run("zero");
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn square_well_saturation_is_flagged() {
    // k2 L = 3 pi / 2 inside the well V2 = -3, L = 1
    let e = (1.5 * PI).powi(2) - 3.0;
    let o = szbounds(&[
        "bounds",
        "--potential",
        "asymmetric_well",
        "--params",
        "V1=0,V2=-3,V3=0,L=1",
        "--energies",
        &e.to_string(),
        "--family",
        "Case2b",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert!(num(&rows[0], "margin").abs() < 1e-6);
    assert_eq!(rows[0]["saturated"], "true");
}

#[test]
fn bounds_margins_are_nonnegative_and_weak_rows_flag_vacuity() {
    let o = szbounds(&[
        "bounds",
        "--potential",
        "square_barrier",
        "--e-min",
        "0.6",
        "--e-max",
        "4",
        "--count",
        "6",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = table(&stdout(&o));
    assert!(rows.iter().all(|r| r["dominated"] == "true"));
    assert!(rows.iter().all(|r| num(r, "margin") >= -1e-9));
    let weak: Vec<_> = rows.iter().filter(|r| r["family"] == "Case1Weak").collect();
    assert!(!weak.is_empty());
    for r in weak {
        let vacuous = num(r, "t_floor") == 0.0;
        assert_eq!(r["validity"], if vacuous { "vacuous" } else { "valid" });
    }
}

#[test]
fn approx_rows_have_every_estimate() {
    let o = szbounds(&[
        "approx",
        "--potential",
        "sech2",
        "--params",
        "V_e=0.05",
        "--energies",
        "1,4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = table(&stdout(&o));
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let ode = num(r, "ode");
        for k in ["born", "distorted_born", "above_barrier"] {
            assert!((num(r, k) - ode).abs() < 0.1 * ode, "{k}: {} vs {ode}", r[k]);
        }
    }
}

#[test]
fn catalog_list_and_eval() {
    let o = szbounds(&["catalog", "list"]);
    assert!(o.status.success());
    let names: Vec<String> = table(&stdout(&o)).into_iter().map(|r| r["name"].clone()).collect();
    for n in [
        "delta",
        "double_delta",
        "square_barrier",
        "tanh_step",
        "sech2",
        "asymmetric_well",
        "poschl_teller",
    ] {
        assert!(names.iter().any(|x| x == n), "{n}");
    }
    let o = szbounds(&["catalog", "eval", "delta", "--params", "strength=1", "--count", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for r in table(&stdout(&o)) {
        // T = 1 / (1 + m alpha^2 / (2 hbar^2 E)) = 1 / (1 + 1 / (4 E))
        let e = num(&r, "energy");
        assert!((num(&r, "t_exact") - 1.0 / (1.0 + 0.25 / e)).abs() < 1e-12);
        assert!(num(&r, "rel_error") < 1e-6);
    }
    let o = szbounds(&["catalog", "eval", "nonesuch"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn parametric_rows_dominate_and_agree_with_direct_oscillator() {
    let o = szbounds(&["parametric", "--omega", "1 + 0.5 * tanh(t)", "--domain", "-30,30"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = table(&stdout(&o));
    assert!(rows.iter().any(|r| r["case"] == "2a"));
    for r in &rows {
        assert_eq!(r["dominated"], "true");
        assert!((num(r, "abs_beta") - num(r, "abs_beta_direct")).abs() < 1e-6);
    }
    let o = szbounds(&[
        "parametric",
        "--omega",
        "1 + 0.5 * tanh(t)",
        "--domain",
        "-30,30",
        "--case",
        "2b",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trace_and_wavefunction_outputs() {
    let o = szbounds(&["trace", "--potential", "sech2", "--energy", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = table(&stdout(&o));
    assert!(rows.len() > 10);
    assert!(rows.iter().all(|r| num(r, "residual").abs() < 1e-8));

    let o = szbounds(&["trace", "--potential", "sech2", "--energy", "1", "--wavefunction"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = table(&stdout(&o));
    let j0 = num(&rows[0], "current");
    assert!(rows
        .iter()
        .all(|r| (num(r, "current") - j0).abs() < 1e-8 * j0.abs().max(1.0)));
}

#[test]
fn verify_passes_on_a_pristine_build() {
    let o = szbounds(&["verify"]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    for check in ["catalog_equivalence", "conservation", "dominance"] {
        assert!(out.lines().any(|l| l.starts_with(check) && l.contains("PASS")), "{out}");
    }
}

#[test]
fn verify_catches_injected_theta_sign_error() {
    let o = szbounds(&["verify", "--inject-theta-fault"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("dominance") && l.contains("FAIL")));
    assert!(out.contains("FAIL dominance potential="));
    let err = stderr(&o);
    assert!(err.starts_with("error code=VerifyFailed"));
    assert!(err.contains("check=dominance"));
    assert!(err.contains("family="));
}

#[test]
fn verify_passes_with_tolerance_tightened_tenfold() {
    let start = Instant::now();
    let o = szbounds(&["verify", "--rtol", "1e-11"]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    assert!(start.elapsed() < Duration::from_secs(300));
}
