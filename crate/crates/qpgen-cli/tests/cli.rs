use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const HEADER: &str = "grid_index,omega_d_GHz,amplitude,alpha,beta,n,junction,omega_GHz,gamma_per_s,T_s,xqp_star,flags";

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn qpgen(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpgen"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("QPGEN_THREADS")
        .output()
        .expect("spawn qpgen")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn records(path: &Path) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let h = r.headers().unwrap().clone();
    (h, r.records().map(Result::unwrap).collect())
}

const STARK: &str = r#"{"scenario":{"stark_cut":{"circuit":{"ej":3.025,"ec":0.056},"omega_d_ghz":[44.775,45.225]}},
  "output":{"stem":"cut"}}"#;

#[test]
fn flux_split_must_sum_to_one() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "bad.json",
        r#"{"scenario":{"kapitza":{"circuit":{"ej1":40.8,"ej2":40.8,"ec":0.01,"c1":0.5,"c2":0.6},
            "omega_d_ghz":10.0,"phi_ac_turns":[0.76]}}}"#,
    );
    let o = qpgen(&["sweep", "--config", cfg.to_str().unwrap()], d.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("c1 + c2 = 1"), "{}", stderr(&o));
    assert_eq!(std::fs::read_dir(d.path()).unwrap().count(), 1);
}

#[test]
fn unknown_keys_and_missing_files_are_config_errors() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "typo.json", r#"{"scenario":{"structure_factors":{}},"numerix":{"m_max":3}}"#);
    let o = qpgen(&["structure-factors", "--config", cfg.to_str().unwrap()], d.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = qpgen(&["sweep", "--config", d.path().join("nope.json").to_str().unwrap()], d.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wrong_scenario_leaves_no_files() {
    let d = tempfile::tempdir().unwrap();
    let cfg = configs().join("structure_factors.json");
    let o = qpgen(&["sweep", "--config", cfg.to_str().unwrap()], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(d.path()).unwrap().count(), 0);
}

#[test]
fn thread_settings_are_validated() {
    let d = tempfile::tempdir().unwrap();
    let cfg = configs().join("structure_factors.json");
    let o = qpgen(&["structure-factors", "--config", cfg.to_str().unwrap(), "--threads", "0"], d.path());
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_qpgen"))
        .args(["structure-factors", "--config", cfg.to_str().unwrap(), "--out"])
        .arg(d.path())
        .env("QPGEN_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("QPGEN_THREADS"));
}

#[test]
fn structure_factor_table_agrees() {
    let d = tempfile::tempdir().unwrap();
    let cfg = configs().join("structure_factors.json");
    let o = qpgen(&["structure-factors", "--config", cfg.to_str().unwrap(), "--svg", "--threads", "2"], d.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let (h, rows) = records(&d.path().join("structure_factors.csv"));
    assert_eq!(h.len(), 7);
    assert_eq!(rows.len(), 301);
    for r in &rows {
        let f: f64 = r[0].parse().unwrap();
        let diff: f64 = r[6].parse().unwrap();
        assert!(diff < 1e-6, "f = {f}: {diff}");
        if f <= 90.0 {
            assert_eq!(&r[2], "0.0000000000000000e0");
        }
    }
    assert!(d.path().join("structure_factors.svg").exists());
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.path().join("structure_factors.json")).unwrap()).unwrap();
    assert_eq!(meta["metadata"]["threads"], 2);
    assert_eq!(meta["rows"], 301);
}

#[test]
fn potential_minimum_moves_to_pi() {
    let d = tempfile::tempdir().unwrap();
    let cfg = configs().join("fig4_potential.json");
    let o = qpgen(&["potential", "--config", cfg.to_str().unwrap()], d.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.path().join("fig4_potential.json")).unwrap()).unwrap();
    let pts = meta["details"]["points"].as_array().unwrap();
    let min0 = pts[0]["global_minimum_phi"].as_f64().unwrap();
    assert!(min0.abs() < 1e-12);
    // Past the Bessel zero the single-pair term is quenched and the pair term dominates.
    let star = pts.iter().find(|p| (p["phi_ac_turns"].as_f64().unwrap() - 0.76547).abs() < 1e-9).unwrap();
    assert!(star["e1_ghz"].as_f64().unwrap().abs() < 0.01);
    assert!((star["e2_ghz"].as_f64().unwrap() - 0.5).abs() < 0.01);
}

#[test]
fn stark_cut_output_is_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "cut.json", STARK);
    let a = d.path().join("a");
    let b = d.path().join("b");
    let o = qpgen(&["sweep", "--config", cfg.to_str().unwrap(), "--threads", "1"], &a);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = qpgen(&["sweep", "--config", cfg.to_str().unwrap(), "--threads", "3"], &b);
    assert!(o.status.success(), "{}", stderr(&o));
    let x = std::fs::read(a.join("cut.csv")).unwrap();
    let y = std::fs::read(b.join("cut.csv")).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert_eq!(text.lines().next(), Some(HEADER));

    // The pair-breaking edge crosses between the two points.
    let (_, rows) = records(&a.join("cut.csv"));
    let total = |i: &str| -> f64 {
        let r = rows.iter().find(|r| &r[0] == i && &r[3] == "0" && r[4].is_empty()).unwrap();
        r[8].parse().unwrap()
    };
    assert!(total("1") > 10.0 * total("0"));
    assert!(!a.join("cut.csv.partial").exists());
}

#[test]
fn starved_photon_space_is_flagged() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "starved.json",
        r#"{"scenario":{"transmon_map":{"circuit":{"ej":3.025,"ec":0.056},"omega_d_ghz":[35.0],"amplitude_ghz":[2.0]}},
            "numerics":{"m_max":3,"guard":0}}"#,
    );
    let o = qpgen(&["sweep", "--config", cfg.to_str().unwrap()], d.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = records(&d.path().join("transmon_map.csv"));
    assert!(rows.iter().any(|r| r[11].contains("truncation")));
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.path().join("transmon_map.json")).unwrap()).unwrap();
    assert!(meta["flag_counts"]["truncation"].as_u64().unwrap() > 0);
}

#[test]
fn static_audit_converges() {
    let d = tempfile::tempdir().unwrap();
    let cfg = configs().join("converge_static.json");
    let o = qpgen(&["converge", "--config", cfg.to_str().unwrap()], d.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.path().join("converge_static.json")).unwrap()).unwrap();
    assert_eq!(meta["details"]["pass"], true);
}
