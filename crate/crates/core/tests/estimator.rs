//! LS estimator against an independent dense solver, plus geometry properties.

use dvlnet::estimator::LsEstimator;
use dvlnet::geometry::{
    beam_direction, build_transform, corrupt_measurement, project_velocity, BeamGeometry, BeamMeasurement,
    BodyVelocity, ErrorModelConfig,
};
use dvlnet::RandomSource;
use nalgebra::{Matrix3, Matrix4x3, Vector3, Vector4};
use proptest::prelude::*;

/// H built from first principles, solved through the normal equations.
fn oracle(pitch_deg: f64, beams: &[f64; 4]) -> Vector3<f64> {
    let th = pitch_deg.to_radians();
    let h = Matrix4x3::from_fn(|i, j| {
        let psi = (45.0 + 90.0 * i as f64).to_radians();
        [psi.cos() * th.sin(), psi.sin() * th.sin(), th.cos()][j]
    });
    let hth: Matrix3<f64> = h.transpose() * h;
    hth.lu().solve(&(h.transpose() * Vector4::from_column_slice(beams))).unwrap()
}

#[test]
fn matches_normal_equation_oracle() {
    let mut rng = RandomSource::new(21);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let pitch = rng.uniform_in(5.0, 85.0);
        let est = LsEstimator::new(build_transform(&BeamGeometry::janus(pitch).unwrap())).unwrap();
        let v = BodyVelocity([rng.uniform_in(-3.0, 3.0), rng.uniform_in(-1.0, 1.0), rng.uniform_in(-0.5, 0.5)]);
        let cfg = ErrorModelConfig::uniform_bias(rng.uniform_in(-0.01, 0.01), 0.15, 0).unwrap();
        let meas = corrupt_measurement(&project_velocity(&v, est.transform(), 0.0), &cfg, &mut rng);
        let got = est.estimate(&meas);
        let want = oracle(pitch, &meas.beams);
        for a in 0..3 {
            worst = worst.max((got.0[a] - want[a]).abs());
        }
    }
    assert!(worst < 1e-9, "max deviation {worst:e}");
}

#[test]
fn biased_beams_give_biased_estimates() {
    let est = LsEstimator::new(build_transform(&BeamGeometry::janus(30.0).unwrap())).unwrap();
    let cfg = ErrorModelConfig::new([0.002, -0.001, 0.0005, 0.001], 0.15, 4).unwrap();
    let mut rng = RandomSource::new(cfg.seed);
    let n = 50_000;
    let mut mean = [0.0; 3];
    for i in 0..n {
        let v = BodyVelocity([1.5, 0.1, 0.05]);
        let e = est.estimate(&corrupt_measurement(&project_velocity(&v, est.transform(), i as f64), &cfg, &mut rng));
        for a in 0..3 {
            mean[a] += (e.0[a] - v.0[a]) / n as f64;
        }
    }
    let expected = est.estimate_beams(&cfg.bias).0;
    let norm = expected.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(norm > 1e-3);
    // standard error of the mean is below 1e-3 on every axis
    for a in 0..3 {
        assert!((mean[a] - expected[a]).abs() < 2e-3, "axis {a}: {mean:?} vs {expected:?}");
    }
}

proptest! {
    #[test]
    fn beam_rows_are_unit(pitch in 0.01f64..89.99) {
        let g = BeamGeometry::janus(pitch).unwrap();
        for i in 1..=4 {
            let d = beam_direction(i, &g).unwrap();
            prop_assert!((d.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn opposing_beams_cancel(pitch in 0.01f64..89.99) {
        let h = build_transform(&BeamGeometry::janus(pitch).unwrap());
        for j in 0..2 {
            prop_assert!(h.column(j).iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn corruption_is_additive(a in prop::array::uniform4(-3.0f64..3.0), b in prop::array::uniform4(-3.0f64..3.0), seed in any::<u64>()) {
        let cfg = ErrorModelConfig::new([0.001, 0.002, -0.001, 0.0], 0.15, seed).unwrap();
        let ca = corrupt_measurement(&BeamMeasurement { t: 0.0, beams: a }, &cfg, &mut RandomSource::new(seed));
        let cb = corrupt_measurement(&BeamMeasurement { t: 0.0, beams: b }, &cfg, &mut RandomSource::new(seed));
        for i in 0..4 {
            prop_assert!(((ca.beams[i] - cb.beams[i]) - (a[i] - b[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn corruption_is_deterministic(seed in any::<u64>()) {
        let cfg = ErrorModelConfig::field_trial(seed);
        let clean = BeamMeasurement { t: 1.0, beams: [0.5, -0.2, 0.1, 0.3] };
        let run = || {
            let mut rng = RandomSource::new(seed);
            (0..20).map(|_| corrupt_measurement(&clean, &cfg, &mut rng).beams).collect::<Vec<_>>()
        };
        prop_assert_eq!(run(), run());
    }
}
