use std::f64::consts::{FRAC_PI_2, TAU};

use homlab::qps::{
    angular_tolerance, qps_forward, qps_invert, qps_scan, QpsScanGrid, QpsTarget, Quadrant, LENGTH_TOLERANCE,
};
use homlab::rates::LossParams;
use homlab::GaussianJointSpectrum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn geometry_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let t =
            QpsTarget::new(rng.gen_range(1.0..30.0), rng.gen_range(0.0..FRAC_PI_2), rng.gen_range(0.0..TAU)).unwrap();
        let d = qps_forward(&t);
        let back = qps_invert(t.r(), d.s1, d.s2, Quadrant::of(&t)).unwrap().target;
        assert!((back.gamma() - t.gamma()).abs() < 1e-9);
        assert!(back.azimuth_distance(&t) < 1e-9);
    }
}

#[test]
fn scan_recovers_targets() {
    let s = GaussianJointSpectrum::new(5.0, 0.2, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let loss = LossParams::from_mismatch(0.5, 0.1).unwrap();
    for k in 0..4 {
        let t = QpsTarget::new(20.0, rng.gen_range(0.0..1.4), rng.gen_range(0.0..TAU)).unwrap();
        let lp = (k % 2 == 1).then_some(&loss);
        let scan = qps_scan(&t, &s, lp, &QpsScanGrid::default()).unwrap();
        let (dg, dt) = angular_tolerance(&t, LENGTH_TOLERANCE).unwrap();
        let got = scan.recovered.target;
        assert!((got.gamma() - t.gamma()).abs() <= dg, "{t:?} -> {got:?}");
        assert!(got.azimuth_distance(&t) <= dt, "{t:?} -> {got:?}");
    }
}
