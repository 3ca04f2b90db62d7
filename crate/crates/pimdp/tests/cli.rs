//! End-to-end checks of the command-line interface: subcommands, exit codes
//! and CSV output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pimdp"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_infinite_prints_the_move_policy() {
    let out = bin()
        .arg("solve")
        .arg(fixture("two_state.json"))
        .arg("--infinite")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("s1: u* = 1, policy b"), "{text}");
    assert!(text.contains("s2: u* = 1, policy stay"), "{text}");
}

#[test]
fn solve_horizon_zero_prints_the_preference() {
    let out = bin()
        .arg("solve")
        .arg(fixture("two_state.json"))
        .args(["--horizon", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("s1: u_0 = 0"), "{text}");
    assert!(text.contains("s2: u_0 = 1"), "{text}");
}

#[test]
fn missing_mode_is_a_usage_error() {
    let out = bin()
        .arg("solve")
        .arg(fixture("two_state.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin().arg("solve").arg("--nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_model_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    let text = std::fs::read_to_string(fixture("two_state.json"))
        .unwrap()
        .replace("[[0, 1], [0, 1]]", "[[0, 0], [0, 0]]");
    std::fs::write(&path, text).unwrap();
    let out = bin().arg("solve").arg(&path).arg("--infinite").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("not normalized"), "{err}");
}

#[test]
fn infinite_without_stay_is_a_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nostay.json");
    let text = std::fs::read_to_string(fixture("two_state.json"))
        .unwrap()
        .replace(",\n  \"stay_action\": \"stay\"", "");
    std::fs::write(&path, text).unwrap();
    let out = bin().arg("solve").arg(&path).arg("--infinite").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gen_grid_solve_and_enumerate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("grid3.json");
    let out = bin()
        .args(["gen-grid", "--g", "3", "--out"])
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let out = bin().arg("solve").arg(&model).arg("--infinite").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("converged in"), "{text}");

    // Finite horizons are not offered for mixed models.
    let out = bin()
        .arg("solve")
        .arg(&model)
        .args(["--horizon", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin().arg("enumerate").arg(&model).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("mixed belief space"), "{text}");
    assert!(text.contains("flat belief space"), "{text}");
}

#[test]
fn enumerate_mdp_reports_full_observability() {
    let out = bin()
        .arg("enumerate")
        .arg(fixture("two_state.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("fully observable"));
}

#[test]
fn bench_writes_deterministic_csv() {
    let run = |dir: &Path| {
        let out = bin()
            .args([
                "bench",
                "--g",
                "3",
                "--pbad-list",
                "0.5,0.8",
                "--wrongness-list",
                "0.9",
                "--runs",
                "40",
                "--seed",
                "1",
                "--max-steps",
                "150",
                "--belief-points",
                "21",
                "--out",
            ])
            .arg(dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        (
            std::fs::read(dir.join("pbad_sweep.csv")).unwrap(),
            std::fs::read(dir.join("belief_sweep.csv")).unwrap(),
        )
    };
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let (pbad_a, wrong_a) = run(dir_a.path());
    let (pbad_b, wrong_b) = run(dir_b.path());
    assert_eq!(pbad_a, pbad_b, "repeated bench runs must be byte-identical");
    assert_eq!(wrong_a, wrong_b);

    let text = String::from_utf8(pbad_a).unwrap();
    assert_eq!(text.lines().count(), 3, "{text}"); // header + 2 sweep points
    assert!(text.starts_with("sweep_parameter,poss_mean_reward"), "{text}");
}

#[test]
fn bench_with_zero_runs_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "bench", "--g", "3", "--pbad-list", "0.5,0.8", "--runs", "0", "--seed", "1",
            "--belief-points", "21", "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("pbad_sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
}

#[test]
fn simulate_prints_both_reports() {
    let out = bin()
        .args([
            "simulate",
            "--g",
            "3",
            "--pbad",
            "0.6",
            "--runs",
            "30",
            "--seed",
            "5",
            "--max-steps",
            "150",
            "--belief-points",
            "21",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("possibilistic:"), "{text}");
    assert!(text.contains("probabilistic:"), "{text}");
}
