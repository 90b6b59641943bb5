use std::process::Command;

#[test]
fn evaluate_acceptance_spec_meets_auc_band() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = concat!(env!("CARGO_MANIFEST_DIR"), "/data/g50c_acceptance.json");
    let report = tmp.path().join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_mixgraph"))
        .args(["evaluate", "--spec", spec, "-o"])
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let runs = report["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 6);
    for method in runs.chunks(3) {
        let means: Vec<f64> = method.iter().map(|r| r["mean_auc"].as_f64().unwrap()).collect();
        assert!(means.iter().all(|&m| m >= 0.97), "{means:?}");
        assert!(means.windows(2).all(|w| w[1] >= w[0] - 0.005), "{means:?}");
        for r in method {
            assert_eq!(r["realizations"].as_array().unwrap().len(), 25);
        }
    }
}
