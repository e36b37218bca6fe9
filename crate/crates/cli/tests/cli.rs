use std::path::Path;
use std::process::{Command, Output};

fn eklab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eklab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn simulate_constant_preset() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "c.cfg",
        "run.preset = constant\nrun.epsilon = 0.1\ngrid.cells = 64\n",
    );
    let o = eklab(&["simulate", "--config", "c.cfg", "--out", "out"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["entropy.csv", "diagnostics.csv", "final_state.csv", "summary.json"] {
        assert!(d.path().join("out").join(f).is_file(), "{f}");
    }
}

#[test]
fn configuration_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "missing.cfg", "run.epsilon = 0.1\n");
    write(
        d.path(),
        "unknown.cfg",
        "run.preset = constant\nrun.epsilon = 0.1\nrun.bogus = 1\n",
    );
    write(
        d.path(),
        "bad_s.cfg",
        "run.preset = constant\nrun.epsilon = 0.1\nlayer.s = 0.7\n",
    );
    write(
        d.path(),
        "window.cfg",
        "run.preset = cosine-bump\nrun.epsilon = 0.1\nrun.tau = 1.5\n",
    );
    for cfg in ["missing.cfg", "unknown.cfg", "bad_s.cfg", "window.cfg", "absent.cfg"] {
        let o = eklab(&["simulate", "--config", cfg], d.path());
        assert_eq!(
            o.status.code(),
            Some(2),
            "{cfg}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    write(
        d.path(),
        "two.cfg",
        "run.preset = constant\nsweep.epsilons = 0.1, 0.05\n",
    );
    assert_eq!(
        eklab(&["sweep", "--config", "two.cfg"], d.path()).status.code(),
        Some(2)
    );
}

#[test]
fn identity_suite_and_mutation() {
    let d = tempfile::tempdir().unwrap();
    let ok = eklab(&["check-identities", "--count", "100", "--seed", "3"], d.path());
    assert_eq!(ok.status.code(), Some(0));
    let bad = eklab(
        &["check-identities", "--count", "10", "--tamper-beta", "1.01"],
        d.path(),
    );
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(
        err.contains("gap") && err.contains("seed") && err.contains("residual"),
        "{err}"
    );
    let empty = eklab(&["check-identities", "--count", "0"], d.path());
    assert_eq!(empty.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&empty.stderr).contains("warning"));
}

#[test]
fn gn_check_writes_tables() {
    let d = tempfile::tempdir().unwrap();
    let o = eklab(
        &[
            "gn-check",
            "--dims",
            "1,2",
            "--alphas=-1,0",
            "--draws",
            "10",
            "--serial",
        ],
        d.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(d.path().join("out/gn.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(d.path().join("out/gn.svg").is_file());
    let first = csv.lines().nth(1).unwrap();
    assert!(
        first.starts_with("1,-1.") && first.contains(",1.00000000000000000e0,"),
        "{first}"
    );
}

#[test]
fn serial_sweep_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "s.cfg",
        "run.preset = traveling-bump\nrun.tau = 0.05\nrun.samples = 2\nsweep.epsilons = 0.2, 0.1, 0.05\n",
    );
    for out in ["a", "b"] {
        let o = eklab(&["sweep", "--config", "s.cfg", "--serial", "--out", out], d.path());
        assert!(
            matches!(o.status.code(), Some(0) | Some(1)),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    for f in ["sweep.csv", "sweep.json", "sweep.svg"] {
        let a = std::fs::read(d.path().join("a").join(f)).unwrap();
        let b = std::fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}
