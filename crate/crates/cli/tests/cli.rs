use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn emp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emp"))
        .args(args)
        .output()
        .unwrap()
}

fn mutag() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/MUTAG")
}

/// Four small graphs: two triangles with a tail, two paths.
fn fixture(dir: &Path) {
    let write = |name: &str, body: &str| fs::write(dir.join(name), body).unwrap();
    write(
        "TOY_A.txt",
        "1,2\n2,3\n3,1\n3,4\n5,6\n6,7\n8,9\n9,10\n10,8\n10,11\n11,12\n13,14\n",
    );
    write(
        "TOY_graph_indicator.txt",
        "1\n1\n1\n1\n2\n2\n2\n3\n3\n3\n3\n3\n4\n4\n",
    );
    write("TOY_graph_labels.txt", "1\n0\n1\n0\n");
    write(
        "TOY_node_labels.txt",
        "0\n1\n2\n0\n1\n1\n0\n2\n0\n1\n1\n2\n0\n0\n",
    );
}

#[test]
fn compute_writes_csv_and_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    let prefix = tmp.path().join("mutag");
    let out = emp(&[
        "compute",
        "--data",
        mutag().to_str().unwrap(),
        "--name",
        "MUTAG",
        "--f",
        "degree",
        "--g",
        "attr:0",
        "--second-direction",
        "sublevel",
        "--method",
        "betti",
        "--dims",
        "0,1",
        "--grid",
        "10x10",
        "--thresholds",
        "quantile",
        "--order",
        "fg",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(tmp.path().join("mutag.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 189);
    assert!(lines.iter().all(|l| l.split(',').count() == 203));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("mutag.json")).unwrap()).unwrap();
    assert_eq!(meta["graphs"], 188);
    assert_eq!(meta["summary_shape"], serde_json::json!([10, 10]));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let data = tmp.path().to_str().unwrap();
    for run in ["a", "b"] {
        let prefix = tmp.path().join(run);
        let out = emp(&[
            "compute",
            "--data",
            data,
            "--f",
            "katz",
            "--g",
            "ricci",
            "--second-direction",
            "power",
            "--method",
            "landscape",
            "--grid",
            "4x5",
            "--out",
            prefix.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for ext in ["csv", "json"] {
        let a = fs::read(tmp.path().join(format!("a.{ext}"))).unwrap();
        let b = fs::read(tmp.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn three_filter_grid() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let prefix = tmp.path().join("cube");
    let out = emp(&[
        "compute",
        "--data",
        tmp.path().to_str().unwrap(),
        "--f",
        "degree",
        "--g",
        "attr:0",
        "--h",
        "katz",
        "--dims",
        "1",
        "--grid",
        "2x3x4",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(tmp.path().join("cube.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 3 + 24);
    assert!(header.ends_with("h1_1_2_3"));
}

#[test]
fn stability_report_has_one_line_per_pair() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let report = tmp.path().join("report.jsonl");
    let out = emp(&[
        "stability",
        "--data",
        tmp.path().to_str().unwrap(),
        "--f",
        "degree",
        "--g",
        "attr:0",
        "--method",
        "landscape",
        "--dims",
        "0",
        "--grid",
        "3x4",
        "--pairs",
        "2",
        "--p",
        "inf",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(report).unwrap();
    let lines: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    for line in &lines {
        let per: f64 = line["per_slice"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .sum();
        assert!((per - line["induced"].as_f64().unwrap()).abs() < 1e-12);
        assert!(line["emp"].as_f64().unwrap() <= line["induced"].as_f64().unwrap() + 1e-12);
    }
}

#[test]
fn diagram_dumps_text_format() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let out = emp(&[
        "diagram",
        "--data",
        tmp.path().to_str().unwrap(),
        "--graph",
        "0",
        "--f",
        "constant",
        "--g",
        "degree",
        "--grid",
        "2x3",
        "--dims",
        "0,1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let points: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(!points.is_empty());
    for line in points {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 4);
        assert!(fields[0] == "0" || fields[0] == "1");
        assert!(fields[3] == "0" || fields[3] == "1");
    }
}

#[test]
fn stats_prints_json() {
    let out = emp(&["stats", "--data", mutag().to_str().unwrap()]);
    assert!(out.status.success());
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["graphs"], 188);
    assert_eq!(stats["classes"], 2);
}

#[test]
fn exit_codes_separate_config_and_data_errors() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let data = tmp.path().to_str().unwrap();
    let out_prefix = tmp.path().join("x");
    let out_prefix = out_prefix.to_str().unwrap();

    let bad_filter = emp(&[
        "compute",
        "--data",
        data,
        "--g",
        "no_such_filter",
        "--out",
        out_prefix,
    ]);
    assert_eq!(bad_filter.status.code(), Some(2));
    let bad_direction = emp(&[
        "compute", "--data", data, "--g", "weight", "--out", out_prefix,
    ]);
    assert_eq!(bad_direction.status.code(), Some(2));
    let missing_attr = emp(&[
        "compute", "--data", data, "--g", "attr:5", "--out", out_prefix,
    ]);
    assert_eq!(missing_attr.status.code(), Some(2));
    let missing_dir = emp(&[
        "compute",
        "--data",
        "/nonexistent/dataset",
        "--g",
        "degree",
        "--out",
        out_prefix,
    ]);
    assert_eq!(missing_dir.status.code(), Some(3));

    fs::write(tmp.path().join("TOY_graph_labels.txt"), "1\n0\nx\n0\n").unwrap();
    let bad_label = emp(&[
        "compute", "--data", data, "--g", "degree", "--out", out_prefix,
    ]);
    assert_eq!(bad_label.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad_label.stderr).contains("TOY_graph_labels"));
}
