use std::path::Path;
use std::process::{Command, Output};

const KNAPSACK: &str = "\
Minimize
 obj: - 5 a - 4 b - 3 c
Subject To
 weight: 2 a + 3 b + c <= 4
Binary
 a b c
End
";

const INFEASIBLE: &str = "\
Minimize
 obj: x
Subject To
 lo: x >= 2
 hi: x <= 1
End
";

fn runner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blendplan-highs"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn summary_value<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.trim().strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in {out}"))
}

fn best_knapsack() -> f64 {
    (0..8u32)
        .filter(|m| 2 * (m & 1) + 3 * (m >> 1 & 1) + (m >> 2 & 1) <= 4)
        .map(|m| -(5.0 * f64::from(m & 1) + 4.0 * f64::from(m >> 1 & 1) + 3.0 * f64::from(m >> 2 & 1)))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn solves_a_small_milp_to_optimality() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "model.lp", KNAPSACK);
    let sol = dir.path().join("model.sol");
    let o = runner(&[
        "--model_file",
        &model,
        "--solution_file",
        sol.to_str().unwrap(),
        "--mip_rel_gap",
        "0",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(summary_value(&out, "model status"), "Optimal");
    let objective: f64 = summary_value(&out, "objective").parse().unwrap();
    assert!((objective - best_knapsack()).abs() < 1e-9, "{objective}");
    let solution = std::fs::read_to_string(sol).unwrap();
    assert!(solution.contains("Optimal"));
    assert!(solution
        .lines()
        .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["a", "1"]));
}

#[test]
fn reports_infeasibility() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "model.lp", INFEASIBLE);
    let o = runner(&[&model]);
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(summary_value(&out, "model status"), "Infeasible");
}

#[test]
fn unknown_flags_are_usage_errors() {
    let o = runner(&["--presolve", "off", "model.lp"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown flag"));
}

#[test]
fn missing_model_file_fails() {
    let o = runner(&["--model_file", "/nonexistent/model.lp"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read model file"));
}
