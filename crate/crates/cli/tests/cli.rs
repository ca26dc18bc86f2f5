use std::process::{Command, Output};

fn qsphere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsphere"))
        .args(args)
        .env_remove("QSPHERE_REPORT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn normal_form_of_v_u() {
    let o = qsphere(&["normal-form", "v.u"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "(q^2)*u.v");
}

#[test]
fn normal_form_binds_parameters() {
    let o = qsphere(&["normal-form", "v.v + q*u.w", "--q", "2", "--c", "3"]);
    assert!(o.status.success());
    // v.v -> q^2 c - q(1+q^2)^2 u.w
    assert_eq!(stdout(&o).trim(), "(12) + (-48)*u.w");
}

#[test]
fn normal_form_of_a_right_module_word() {
    let o = qsphere(&["normal-form", "du.v.u"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "(q^2)*du.u.v");
}

#[test]
fn algebra_dimension_series() {
    let o = qsphere(&["dim-series", "--max-degree", "3", "--module", "algebra"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1, 4, 9, 16");
}

#[test]
fn module_dimension_series_match_at_q_one() {
    let generic = qsphere(&["dim-series", "--max-degree", "3", "--module", "left"]);
    let classical = qsphere(&["dim-series", "--max-degree", "3", "--module", "left", "--q", "1"]);
    assert!(generic.status.success());
    assert_eq!(stdout(&generic), stdout(&classical));
}

#[test]
fn projector_table_is_stable() {
    let o = qsphere(&["projector-table", "--placement", "V.V'"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), include_str!("golden/projector_table.txt"));
}

#[test]
fn named_projector_images_match() {
    let o = qsphere(&["projector-table", "--named", "--format", "json"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r["matches"] == true));
}

#[test]
fn membership_of_the_generator() {
    let o = qsphere(&[
        "membership",
        "--side",
        "right",
        "--degree",
        "1",
        "(q^3+q)*du.w + dv.v + (q+1/q)*dw.u",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "member\ng = (1)\n");
}

#[test]
fn non_membership_prints_a_valid_certificate() {
    let o = qsphere(&["membership", "--side", "left", "--degree", "1", "u.du"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("non-member\n"), "{}", out);
    assert!(out.contains("certificate re-validated: true"));
}

#[test]
fn verify_prop3_writes_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = qsphere(&["verify", "--check", "prop3", "--json", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "verified");
    let check = &report["checks"][0];
    assert_eq!(check["check"], "prop3");
    assert_eq!(check["status"], "verified");
    let with_cert = check["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .find(|w| w["label"].as_str().unwrap().starts_with("S: not in M_r"))
        .expect("non-membership witness");
    assert_eq!(with_cert["holds"], true);
    assert!(!with_cert["value"]["certificate"].as_str().unwrap().is_empty());
}

#[test]
fn verify_output_matches_golden_file() {
    let args = [
        "verify",
        "--profile",
        "quick",
        "--check",
        "spectral_law",
        "--check",
        "braid_relation",
        "--check",
        "prop2_constraint",
        "--check",
        "confluence",
    ];
    let first = qsphere(&args);
    let second = qsphere(&args);
    assert!(first.status.success());
    assert_eq!(stdout(&first), include_str!("golden/verify_quick.txt"));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn report_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qsphere"))
        .args(["verify", "--check", "minimal_polynomial", "--q", "3/2"])
        .env("QSPHERE_REPORT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["params"]["q"], "3/2");
}

#[test]
fn rejects_degenerate_parameters() {
    for args in [
        &["verify", "--q", "0"][..],
        &["normal-form", "u", "--c", "0"][..],
        &["verify", "--q", "x"][..],
    ] {
        let o = qsphere(args);
        assert_eq!(o.status.code(), Some(2), "{:?}", args);
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn usage_errors_exit_non_zero() {
    let bad_check = qsphere(&["verify", "--check", "nope"]);
    assert_eq!(bad_check.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_check.stderr).contains("unknown check"));
    let bad_expr = qsphere(&["normal-form", "u.k"]);
    assert_eq!(bad_expr.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_expr.stderr).contains("column"));
    let missing = qsphere(&["dim-series"]);
    assert!(!missing.status.success());
}

#[test]
fn lists_checks() {
    let o = qsphere(&["verify", "--list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let names: Vec<&str> = text.lines().collect();
    assert!(names.contains(&"prop1") && names.contains(&"mutation"), "{}", text);
}

#[test]
fn report_keys_follow_the_schema() {
    let schema: serde_json::Value = serde_json::from_str(include_str!("../../../docs/report.schema.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = qsphere(&[
        "verify",
        "--profile",
        "quick",
        "--check",
        "projector_algebra",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let keys = |v: &serde_json::Value| -> Vec<String> {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    let required = |v: &serde_json::Value| -> Vec<String> {
        let mut k: Vec<String> = v["required"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().to_string())
            .collect();
        k.sort();
        k
    };
    assert_eq!(keys(&report), required(&schema));
    assert_eq!(keys(&report["checks"][0]), required(&schema["$defs"]["check"]));
    for w in report["checks"][0]["witnesses"].as_array().unwrap() {
        for k in keys(w) {
            assert!(schema["$defs"]["witness"]["properties"].get(&k).is_some(), "{}", k);
        }
    }
}

#[test]
fn accepts_negative_parameters() {
    let o = qsphere(&["normal-form", "v.v", "--q", "-1", "--c", "-2/3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // q = -1: v.v -> c + 4 u.w
    assert_eq!(stdout(&o).trim(), "(-2/3) + (4)*u.w");
}
