use eklab::entropy::EntropyRow;
use eklab::harness::{output, run_experiment, run_sweep, Config, ConfigError, HarnessError};

fn cfg(text: &str) -> Config {
    Config::parse(text).unwrap()
}

#[test]
fn constant_preset_has_zero_distances() {
    let c = cfg("run.preset = constant\nrun.epsilon = 0.1\ngrid.cells = 64\n");
    let out = run_experiment(&c, 0.1).unwrap();
    let s = &out.summary;
    assert_eq!(
        (
            s.dist.l1,
            s.dist.lgamma,
            s.dist.lambda,
            s.dist.gradbeta,
            s.dist.momentum
        ),
        (0.0, 0.0, 0.0, 0.0, 0.0)
    );
    assert_eq!((s.e0, s.e_tau), (0.0, 0.0));
    assert!(s.gronwall.holds());
}

#[test]
fn cosine_bump_artifacts_have_documented_shape() {
    let c = cfg("run.preset = cosine-bump\nrun.epsilon = 0.1\nrun.samples = 8\n");
    let out = run_experiment(&c, 0.1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = output::write_run(dir.path(), &c, &out).unwrap();
    assert_eq!(files.len(), 4);

    let entropy = std::fs::read_to_string(dir.path().join("entropy.csv")).unwrap();
    let lines: Vec<&str> = entropy.lines().collect();
    assert_eq!(lines[0], EntropyRow::CSV_HEADER);
    assert_eq!(lines.len(), 1 + 9);
    let ncol = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == ncol));
    let t: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(t.windows(2).all(|w| w[1] > w[0]));

    let diag = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert!(diag.starts_with("t,mass,E_EK,min_rho,max_abs_u\n"));
    let state = std::fs::read_to_string(dir.path().join("final_state.csv")).unwrap();
    assert_eq!(state.lines().count(), 1 + out.summary.n_cells);

    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    for key in ["epsilon", "s", "c", "dist", "gronwall"] {
        assert!(v["summary"].get(key).is_some(), "missing {key}");
    }
    for key in ["c_fit", "margin", "margin_h", "tol"] {
        assert!(v["summary"]["gronwall"].get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["config"]["run"]["preset"], "cosine-bump");
}

#[test]
fn window_violation_is_a_config_error() {
    let c = cfg("run.preset = cosine-bump\nrun.tau = 1.5\n");
    let e = run_experiment(&c, 0.1).unwrap_err();
    assert!(matches!(e, HarnessError::Window { .. }), "{e}");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn config_errors() {
    assert_eq!(
        Config::parse("run.epsilon = 0.1\n").unwrap_err(),
        ConfigError::Missing("run.preset")
    );
    assert!(matches!(
        Config::parse("run.preset = constant\nlayer.s = 0.6\n"),
        Err(ConfigError::BadValue { .. })
    ));
    let e: HarnessError = ConfigError::UnknownKey("x.y".into()).into();
    assert_eq!(e.exit_code(), 2);
    assert_eq!(HarnessError::Numerical("x".into()).exit_code(), 1);
}

#[test]
fn sweep_needs_three_epsilons() {
    let c = cfg("run.preset = constant\nsweep.epsilons = 0.1, 0.05\n");
    assert!(matches!(run_sweep(&c, true), Err(HarnessError::Config(_))));
}

#[test]
fn parallel_and_serial_sweeps_agree() {
    let c = cfg("run.preset = traveling-bump\nrun.tau = 0.05\nrun.samples = 2\nsweep.epsilons = 0.05, 0.2, 0.1\n");
    let a = run_sweep(&c, true).unwrap();
    let b = run_sweep(&c, false).unwrap();
    assert_eq!(a, b);
    let eps: Vec<f64> = a.rows.iter().map(|r| r.epsilon).collect();
    assert_eq!(eps, [0.2, 0.1, 0.05]);
}
