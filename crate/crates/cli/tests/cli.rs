use std::path::PathBuf;
use std::process::{Command, Output};

fn hubtile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hubtile")).args(args).output().expect("spawn hubtile")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hubtile-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn bounds_json_has_named_components() {
    let o = hubtile(&["--lattice", "hexagon", "--U", "4", "bounds"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let w_tile = v["w_tile"].as_f64().unwrap();
    let sum = v["w_so2"].as_f64().unwrap() + v["w_h"].as_f64().unwrap();
    assert!((w_tile - sum).abs() < 1e-9);
    assert_eq!(v["components"]["‖R‖₁"].as_f64(), Some(8.0));
}

#[test]
fn qpe_csv_column_order() {
    let o = hubtile(&["--L", "4", "--eps", "0.05", "--format", "csv", "qpe"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,N,L,eps,x,alpha,total_t,total_rot,n_qubits,N_PE|N_W,W|lambda"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.starts_with("trotter,32,4,0.05,")));
    assert!(rows.iter().any(|r| r.starts_with("qubitized,32,4,0.05,")));
}

#[test]
fn empty_sweep_prints_header_only() {
    let o = hubtile(&["--L", "", "--format", "csv", "qpe"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim_end().lines().count(), 1);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["--L", "4,6", "--format", "csv", "qpe"][..],
        &["--lattice", "rhombus", "cover"][..],
        &["--L", "6", "--U", "4", "--V", "2", "--model", "extended", "bounds"][..],
    ] {
        let a = hubtile(args);
        let b = hubtile(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn lattice_json_sorted_edges() {
    let o = hubtile(&["--lattice", "periodic", "--L", "4", "lattice"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sites"].as_array().unwrap().len(), 32);
    let edges: Vec<(u64, u64)> = v["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e[0].as_u64().unwrap(), e[1].as_u64().unwrap()))
        .collect();
    assert_eq!(edges.len(), 48);
    assert!(edges.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn cover_check_round_trip_and_rejection() {
    let o = hubtile(&["--lattice", "hexagon", "cover"]);
    let good = scratch("cover.json", &stdout(&o));
    let ok = hubtile(&["--lattice", "hexagon", "cover", "--check", good.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));

    let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    v["sections"][0]["tiles"].as_array_mut().unwrap().pop();
    let bad = scratch("bad_cover.json", &v.to_string());
    let fail = hubtile(&["--lattice", "hexagon", "cover", "--check", bad.to_str().unwrap()]);
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn config_errors_exit_two() {
    let unknown = scratch("unknown.cfg", "lattice = hexagon\nflavour = strange\n");
    assert_eq!(hubtile(&["--config", unknown.to_str().unwrap(), "bounds"]).status.code(), Some(2));
    let malformed = scratch("malformed.cfg", "just words\n");
    assert_eq!(hubtile(&["--config", malformed.to_str().unwrap(), "bounds"]).status.code(), Some(2));
    assert_eq!(hubtile(&["--config", "/nonexistent/hubtile.cfg", "bounds"]).status.code(), Some(2));
    assert_eq!(hubtile(&["--eps", "abc", "qpe"]).status.code(), Some(2));
    assert_eq!(hubtile(&["--U=-1", "--lattice", "hexagon", "bounds"]).status.code(), Some(2));
    assert_eq!(hubtile(&["--model", "ppp", "bounds"]).status.code(), Some(2));
    assert_eq!(hubtile(&["--lattice", "nowhere.json", "lattice"]).status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let cfg = scratch("override.cfg", "# comment\nlattice = hexagon\nU = 2\nformat = json\n");
    let from_cfg = hubtile(&["--config", cfg.to_str().unwrap(), "bounds"]);
    let explicit = hubtile(&["--lattice", "hexagon", "--U", "2", "bounds"]);
    assert_eq!(from_cfg.status.code(), Some(0));
    assert_eq!(from_cfg.stdout, explicit.stdout);

    let overridden = hubtile(&["--config", cfg.to_str().unwrap(), "--U", "4", "bounds"]);
    let want = hubtile(&["--lattice", "hexagon", "--U", "4", "bounds"]);
    assert_eq!(overridden.stdout, want.stdout);
    assert_ne!(overridden.stdout, from_cfg.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("hubtile-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("ledger.json");
    let o = hubtile(&["--L", "4", "--out", target.to_str().unwrap(), "gates", "--walk"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert!(!v.as_array().unwrap().is_empty());
}

#[test]
fn table2_matches_reference() {
    let o = hubtile(&["--format", "csv", "table2"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (w, q, r, t) = (col("w_tile_diff"), col("n_q_diff"), col("n_r_diff"), col("n_t_diff"));
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        rows += 1;
        let wd: f64 = rec[w].parse().unwrap();
        assert!(wd.abs() <= 1.0, "{rec:?}");
        for c in [q, r, t] {
            assert_eq!(&rec[c], "0", "{rec:?}");
        }
    }
    assert_eq!(rows, 64);
}

#[test]
fn verify_fast_passes() {
    let o = hubtile(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let reports: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(reports.iter().all(|r| r["pass"] == serde_json::Value::Bool(true)));
}

#[test]
fn verify_with_tightened_bounds_fails() {
    let o = hubtile(&["verify", "--level", "full", "--bound-scale", "0.4"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("FAIL bound_chc"), "{err}");
    assert!(err.contains("FAIL trotter_step"), "{err}");
}
