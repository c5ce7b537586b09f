use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn roelab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roelab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let d = TempDir::new().unwrap();
    let o = roelab(&[], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn empty_config_prints_usage() {
    let d = TempDir::new().unwrap();
    let cfg = write(d.path(), "empty.toml", "\n");
    let o = roelab(&["run", &cfg], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn validation_errors_name_the_field() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "bad.toml",
        "kind = \"witness-check\"\n[space]\nkind = \"grid\"\ndims = 1\nside = 10\n[witness]\nradius = 3\n",
    );
    let o = roelab(&["run", &cfg], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`witness.radius`"), "{}", stderr(&o));

    let cfg = write(d.path(), "nospace.toml", "kind = \"witness-check\"\n");
    let o = roelab(&["run", &cfg], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`space`"));

    let cfg = write(d.path(), "kind.toml", "kind = \"sweep\"\n");
    assert_eq!(roelab(&["run", &cfg], d.path()).status.code(), Some(2));
}

#[test]
fn localization_sweep_emits_table() {
    let d = TempDir::new().unwrap();
    let text = "kind = \"localization-sweep\"\nworkers = 2\n[output]\njson = \"r.json\"\ncsv = \"t.csv\"\n\
                [space]\nkind = \"grid\"\ndims = 1\nside = 60\n[operator]\nkind = \"adjacency\"\n\
                [localization]\ns_min = 2\ns_max = 8\nreference = \"path-cosine\"\n";
    let cfg = write(d.path(), "loc.toml", text);
    let o = roelab(&["run", &cfg], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(d.path().join("t.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,constant,window_norm,operator_norm,center,windows_checked,reference,deviation"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    for r in &rows {
        let s: f64 = r[0].parse().unwrap();
        let reference: f64 = r[6].parse().unwrap();
        assert!((reference - (std::f64::consts::PI / (s + 2.0)).cos()).abs() < 1e-15);
        let c: f64 = r[1].parse().unwrap();
        assert!(c > 0.0 && c <= 1.0);
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["header"]["localization"]["margin"], true);
    assert_eq!(report["header"]["localization"]["tolerance"], 1e-6);

    // The same config in audit mode fails on the reference assertion.
    let cfg = write(
        d.path(),
        "audit.toml",
        &text.replacen("workers = 2\n", "workers = 2\naudit = true\n", 1),
    );
    let o = roelab(&["run", &cfg], d.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL matches-reference"));
}

#[test]
fn pipeline_reports_are_reproducible() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "w.toml",
        "kind = \"wan07-pipeline\"\nworkers = 1\naudit = true\n[output]\njson = \"a/report.json\"\ncsv = \"a/table.csv\"\n",
    );
    let o = roelab(&["run", &cfg], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = fs::read(d.path().join("a/report.json")).unwrap();
    let first_csv = fs::read(d.path().join("a/table.csv")).unwrap();
    assert_eq!(roelab(&["run", &cfg], d.path()).status.code(), Some(0));
    assert_eq!(first, fs::read(d.path().join("a/report.json")).unwrap());
    assert_eq!(first_csv, fs::read(d.path().join("a/table.csv")).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(
        report["header"]["columns"]["sizes"],
        serde_json::json!([10, 20, 40])
    );
    assert!(report["header"]["columns"]["k_cap"].is_number());
}

#[test]
fn witness_check_to_stdout() {
    let d = TempDir::new().unwrap();
    let cfg = write(
        d.path(),
        "w.toml",
        "kind = \"witness-check\"\naudit = true\n[space]\nkind = \"grid\"\ndims = 1\nside = 80\n\
         [witness]\ns_max = 5\nr = 2\nreference = \"line-average\"\n",
    );
    let o = roelab(&["run", &cfg], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["kind"], "witness-check");
    assert_eq!(report["assertions"].as_array().unwrap().len(), 2);
}

#[test]
fn one_shot_queries() {
    let d = TempDir::new().unwrap();
    let op = write(
        d.path(),
        "t.op",
        "# roelab-operator {\"points\":3,\"nnz\":4,\"propagation\":1.0,\"space\":{\"kind\":\"grid\",\"dims\":1,\"side\":3}}\n\
         0 0 2 0\n0 1 0.001 0\n1 0 0.001 0\n2 2 0 -1.5\n",
    );
    let o = roelab(&["norm", &op], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let n: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    let exact = 1.0 + (1.0f64 + 1e-6).sqrt();
    assert!((n - exact).abs() < 1e-10);

    let o = roelab(
        &["truncate", &op, "--eps", "0.01", "-o", "small.op"],
        d.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(d.path().join("small.op")).unwrap();
    assert!(text.starts_with("# roelab-operator {\"points\":3,\"nnz\":2,\"propagation\":0.0"));
    assert!(text.ends_with("0 0 2.0 0.0\n2 2 0.0 -1.5\n"));

    let o = roelab(&["profile", "--grid", "2x5", "--cap", "2"], d.path());
    assert_eq!(
        String::from_utf8_lossy(&o.stdout),
        "r,max_ball\n0,1\n1,9\n2,25\n"
    );
    let edges = write(d.path(), "e.txt", "0 1\n1 2\n2 3\n");
    let o = roelab(&["profile", "--edges", &edges, "--cap", "1"], d.path());
    assert_eq!(String::from_utf8_lossy(&o.stdout), "r,max_ball\n0,1\n1,3\n");

    assert_eq!(roelab(&["truncate", &op], d.path()).status.code(), Some(2));
    let bad = write(d.path(), "bad.op", "0 0 1 0\n");
    let o = roelab(&["norm", &bad], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.op:1"));
}
