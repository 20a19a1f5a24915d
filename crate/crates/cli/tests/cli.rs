use std::process::{Command, Output};

fn optomech(args: &[&str], dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optomech"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["reproduce", "fig9"][..],
        &["steady", "--set", "frobnication=1"],
        &["steady", "--set", "mass_si"],
        &["wigner", "--detect", "sideways"],
        &["sweep"],
        &["steady", "--config", "missing.json"],
        &["bogus"],
    ] {
        let out = optomech(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn unstable_sweep_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // a raw blue detuning with strong drive has no stable branch
    let cfg = r#"{
      "params": {
        "mass_si": 1e-15, "omega_m_over_2pi_hz": 1e7, "gamma_m_over_2pi_hz": 100,
        "temperature_k": 0.0, "power_si": 0.035, "wavelength_si": 1.064e-6, "length_si": 1e-3,
        "kappa_over_2pi_hz": 1e6, "gamma_a_equals_kappa": true, "delta_a_over_omega_m": 1,
        "delta_c_over_omega_m": -1, "g_n_over_2pi_hz": 0
      },
      "sweep": { "parameter": "power_si", "from": 0.01, "to": 0.035, "points": 3 }
    }"#;
    std::fs::write(dir.path().join("c.json"), cfg).unwrap();
    let out = optomech(&["sweep", "--config", "c.json", "--out", "u"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn steady_writes_state_and_operating_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = optomech(&["steady", "--out", "pt/s"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("pt/s.json")).unwrap()).unwrap();
    let rec = &json["records"][0];
    assert_eq!(rec["state"]["sigma"].as_array().unwrap().len(), 6);
    assert!(rec["operating_point"]["chi_eff"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("pt/s.csv").exists());
}

#[test]
fn wigner_and_mk_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = optomech(&["wigner", "--detect", "atoms", "--out", "w"], dir.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("w.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,y,value"));
    assert_eq!(csv.lines().count(), 1 + 201 * 201);

    let out = optomech(&["mk", "--starts", "4", "--seed", "2", "--out", "m"], dir.path());
    assert!(out.status.success());
    let body = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    let value: f64 = body.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(value > 0.0 && value < 2.0);
}
