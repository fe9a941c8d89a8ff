//! Acceptance: reports are identical regardless of the worker count.

use std::process::Command;

fn run_verify(jobs: &str, dir: &std::path::Path) -> serde_json::Value {
    let status = Command::new(env!("CARGO_BIN_EXE_weylap"))
        .args(["verify-paper", "--seed", "7", "--jobs", jobs, "--out", "report.json"])
        .arg("--out-dir")
        .arg(dir)
        .status()
        .expect("binary runs");
    assert!(status.success(), "verify-paper failed with --jobs {jobs}");
    let text = std::fs::read_to_string(dir.join("report.json")).expect("report written");
    let mut v: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn criterion_8_determinism_across_jobs() {
    let base = std::env::temp_dir().join(format!("weylap-accept-{}", std::process::id()));
    let d8 = base.join("jobs8");
    let d1 = base.join("jobs1");
    std::fs::create_dir_all(&d8).unwrap();
    std::fs::create_dir_all(&d1).unwrap();
    let r8 = run_verify("8", &d8);
    let r1 = run_verify("1", &d1);
    let same = r8 == r1;
    println!(
        "acceptance criterion 8 (verify-paper identical at --jobs 8 and --jobs 1): {}",
        if same { "PASS" } else { "FAIL" }
    );
    assert!(same, "reports differ between worker counts");
    assert_eq!(
        serde_json::to_string(&r8).unwrap(),
        serde_json::to_string(&r1).unwrap()
    );
}
