use std::f64::consts::PI;

use eklab::boundary_layer::build_vbl;
use eklab::euler::{EulerConfig, EulerSolver};
use eklab::state::StateFunctions;

// ∂t v_bl against a centred time difference of v_bl built from snapshots at t ± h
#[test]
fn time_derivative_matches_time_difference() {
    let sf = StateFunctions::qhd(2.0, 0.1).unwrap();
    let cfg = EulerConfig::new(sf, 1024, 0.2);
    let mut s = EulerSolver::new(cfg, |x| 1.0 + 0.2 * (PI * x).cos(), |x| 0.3 * (PI * x).sin()).unwrap();
    let (t, h, delta) = (0.1, 1e-3, 0.1);
    let mut snaps = Vec::new();
    for tt in [t - h, t, t + h] {
        s.advance_to(tt).unwrap();
        snaps.push(s.snapshot());
    }
    let bl: Vec<_> = snaps
        .iter()
        .map(|sn| build_vbl(sn, 0.0, 1.0, 1.0, delta).unwrap())
        .collect();
    let scale = bl[1].dt_v_bl.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    assert!(scale > 1e-3);
    let err = (0..bl[1].len())
        .map(|i| ((bl[2].v_bl[i] - bl[0].v_bl[i]) / (2.0 * h) - bl[1].dt_v_bl[i]).abs())
        .fold(0.0f64, f64::max);
    assert!(err < 1e-4 * scale, "err {err:e} scale {scale:e}");
}

#[test]
fn corrector_matches_wall_values_over_time() {
    let sf = StateFunctions::qhd(2.0, 0.05).unwrap();
    let mut s = EulerSolver::new(EulerConfig::new(sf, 512, 0.2), |x| 1.0 + 0.2 * (PI * x).cos(), |_| 0.0).unwrap();
    for k in 1..=4 {
        s.advance_to(0.05 * k as f64).unwrap();
        let bl = build_vbl(&s.snapshot(), 0.0, 1.0, 1.0, 0.2).unwrap();
        assert!(bl.wall_mismatch() <= 1e-12);
        // outside the layer the corrector vanishes
        let mid = bl.len() / 2;
        assert_eq!(bl.v_bl[mid], 0.0);
    }
}
