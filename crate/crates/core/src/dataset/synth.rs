//! Synthetic missions with analytic velocity profiles.
//!
//! IMU specific force is the analytic time derivative of the body velocity
//! plus white noise; gravity and attitude are not modelled and angular rate
//! is pure sensor noise. The networks treat the IMU channels as opaque
//! features, so this is enough to exercise every input path.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::dataset::{imu_noise_stream, DvlEpoch, ImuRecord, Mission, DVL_RATE_HZ, IMU_RATE_HZ};
use crate::error::{contract, Result};
use crate::geometry::{build_transform, BeamGeometry, BodyVelocity, ErrorModelConfig};
use crate::rng::RandomSource;
use crate::scalar::Real;

/// Shortest mission that leaves room for the windowing warm-up.
pub const MIN_DURATION_S: f64 = 5.0;

/// Velocity of one body axis over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxisProfile {
    Constant {
        value: f64,
    },
    /// `offset + amplitude · sin(2π t / period_s + phase_rad)`.
    Sinusoid {
        offset: f64,
        amplitude: f64,
        period_s: f64,
        phase_rad: f64,
    },
    /// `(start_s, value)` pairs sorted by start; each value holds until the
    /// next start. Before the first start the first value applies. With
    /// `ramp_s > 0` each change is a linear ramp of that length beginning at
    /// the segment start.
    Piecewise {
        segments: Vec<(f64, f64)>,
        #[serde(default)]
        ramp_s: f64,
    },
}

impl AxisProfile {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Sinusoid { offset, amplitude, period_s, phase_rad } => {
                offset + amplitude * (TAU * t / period_s + phase_rad).sin()
            }
            Self::Piecewise { segments, ramp_s } => {
                let i = segments.partition_point(|(start, _)| *start <= t);
                match i {
                    0 => segments.first().map_or(0.0, |s| s.1),
                    _ => {
                        let (start, v) = segments[i - 1];
                        if i >= 2 && t - start < *ramp_s {
                            let prev = segments[i - 2].1;
                            prev + (v - prev) * (t - start) / ramp_s
                        } else {
                            v
                        }
                    }
                }
            }
        }
    }

    /// Time derivative; instantaneous steps contribute nothing.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Sinusoid { amplitude, period_s, phase_rad, .. } => {
                amplitude * TAU / period_s * (TAU * t / period_s + phase_rad).cos()
            }
            Self::Piecewise { segments, ramp_s } => {
                let i = segments.partition_point(|(start, _)| *start <= t);
                if i >= 2 && t - segments[i - 1].0 < *ramp_s {
                    (segments[i - 1].1 - segments[i - 2].1) / ramp_s
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Sinusoid { period_s, .. } if !(*period_s > 0.0) => {
                Err(contract("sinusoid period must be > 0"))
            }
            Self::Piecewise { segments, .. } if segments.is_empty() => {
                Err(contract("piecewise profile needs at least one segment"))
            }
            Self::Piecewise { segments, ramp_s } if segments.windows(2).any(|w| w[1].0 < w[0].0 + ramp_s) => {
                Err(contract("piecewise segments must be sorted and at least one ramp apart"))
            }
            Self::Piecewise { ramp_s, .. } if !(*ramp_s >= 0.0) => Err(contract("ramp length must be ≥ 0")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuNoise {
    /// Per-sample accelerometer noise, m/s².
    pub accel_std: f64,
    /// Per-sample gyro noise, rad/s.
    pub gyro_std: f64,
}

impl Default for ImuNoise {
    fn default() -> Self {
        Self { accel_std: 0.02, gyro_std: 0.002 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTrajectoryConfig {
    pub id: u64,
    pub duration_s: f64,
    /// x, y, z body-axis profiles.
    pub profile: [AxisProfile; 3],
    pub pitch_deg: f64,
    pub error: ErrorModelConfig<f64>,
    pub imu_noise: ImuNoise,
    pub seed: u64,
}

impl SyntheticTrajectoryConfig {
    pub fn velocity(&self, t: f64) -> [f64; 3] {
        std::array::from_fn(|a| self.profile[a].value(t))
    }
}

/// Generates a mission: DVL epochs at integer seconds, IMU at 100 Hz.
pub fn synthesize_mission<T: Real>(cfg: &SyntheticTrajectoryConfig) -> Result<Mission<T>> {
    if !(cfg.duration_s >= MIN_DURATION_S) {
        return Err(contract(format!(
            "mission duration {} s shorter than the {MIN_DURATION_S} s warm-up",
            cfg.duration_s
        )));
    }
    for p in &cfg.profile {
        p.validate()?;
    }
    let geometry = BeamGeometry::<T>::janus(T::lit(cfg.pitch_deg))?;
    let h = build_transform(&geometry);

    let n_dvl = (cfg.duration_s * DVL_RATE_HZ).floor() as usize;
    let dvl = (0..n_dvl)
        .map(|k| {
            let t = k as f64 / DVL_RATE_HZ;
            let v = BodyVelocity(cfg.velocity(t).map(T::lit));
            let clean = h.apply(&v.0);
            DvlEpoch { t, clean_beams: clean, corrupted_beams: clean, truth_velocity: v }
        })
        .collect();

    let mut rng = RandomSource::with_stream(cfg.seed, imu_noise_stream(cfg.id));
    let n_imu = (cfg.duration_s * IMU_RATE_HZ).round() as usize;
    let imu = (0..n_imu)
        .map(|i| {
            let t = i as f64 / IMU_RATE_HZ;
            let specific_force = std::array::from_fn(|a| {
                T::lit(cfg.profile[a].derivative(t) + cfg.imu_noise.accel_std * rng.standard_normal())
            });
            let angular_rate = std::array::from_fn(|_| T::lit(cfg.imu_noise.gyro_std * rng.standard_normal()));
            ImuRecord { t, specific_force, angular_rate }
        })
        .collect();

    let mut mission = Mission {
        id: cfg.id,
        pitch_deg: cfg.pitch_deg,
        imu,
        dvl,
        duration: cfg.duration_s,
        corruption: None,
    };
    mission.apply_corruption(&cfg.error.cast());
    Ok(mission)
}

fn piecewise(rng: &mut RandomSource, duration: f64, lo: f64, hi: f64) -> AxisProfile {
    let mut segments = Vec::new();
    let mut t = 0.0;
    while t < duration {
        segments.push((t, rng.uniform_in(lo, hi)));
        t += rng.uniform_in(30.0, 90.0);
    }
    AxisProfile::Piecewise { segments, ramp_s: rng.uniform_in(5.0, 20.0) }
}

fn sinusoid(rng: &mut RandomSource, lo: f64, hi: f64, amp: f64) -> AxisProfile {
    AxisProfile::Sinusoid {
        offset: rng.uniform_in(lo, hi),
        amplitude: rng.uniform_in(0.2 * amp, amp),
        period_s: rng.uniform_in(40.0, 160.0),
        phase_rad: rng.uniform_in(0.0, TAU),
    }
}

/// A set of varied cruise missions. Each axis is independently either a
/// ramped piecewise-constant or a sinusoidal profile: surge around 0.8 to
/// 2.2 m/s, sway within ±0.4 m/s and heave within ±0.2 m/s.
pub fn desk_missions(
    count: usize,
    duration_s: f64,
    pitch_deg: f64,
    error: ErrorModelConfig<f64>,
    imu_noise: ImuNoise,
    seed: u64,
) -> Vec<SyntheticTrajectoryConfig> {
    const RANGES: [(f64, f64, f64); 3] = [(0.8, 2.2, 0.4), (-0.25, 0.25, 0.15), (-0.1, 0.1, 0.1)];
    (0..count as u64)
        .map(|id| {
            let mut rng = RandomSource::with_stream(seed, 1_000_000 + id);
            let profile = RANGES.map(|(lo, hi, amp)| {
                // alternate surge style by id so both kinds always appear
                let sinusoidal = if lo > 0.0 { id % 2 == 0 } else { rng.uniform() < 0.5 };
                if sinusoidal {
                    sinusoid(&mut rng, lo + amp, hi - amp, amp)
                } else {
                    piecewise(&mut rng, duration_s, lo, hi)
                }
            });
            SyntheticTrajectoryConfig { id, duration_s, profile, pitch_deg, error, imu_noise, seed }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(profile: [AxisProfile; 3], pitch: f64, error: ErrorModelConfig<f64>) -> SyntheticTrajectoryConfig {
        SyntheticTrajectoryConfig {
            id: 0,
            duration_s: 400.0,
            profile,
            pitch_deg: pitch,
            error,
            imu_noise: ImuNoise { accel_std: 0.0, gyro_std: 0.0 },
            seed: 1,
        }
    }

    fn constant(v: f64) -> AxisProfile {
        AxisProfile::Constant { value: v }
    }

    #[test]
    fn still_vehicle_without_errors() {
        let m: Mission<f64> =
            synthesize_mission(&cfg([constant(0.0), constant(0.0), constant(0.0)], 30.0, ErrorModelConfig::none()))
                .unwrap();
        assert_eq!(m.imu.len(), 40_000);
        assert_eq!(m.dvl.len(), 400);
        for e in &m.dvl {
            assert_eq!(e.clean_beams, [0.0; 4]);
            assert_eq!(e.corrupted_beams, [0.0; 4]);
            assert_eq!(e.truth_velocity.0, [0.0; 3]);
        }
        m.validate().unwrap();
    }

    #[test]
    fn constant_surge_beams() {
        let m: Mission<f64> =
            synthesize_mission(&cfg([constant(1.0), constant(0.0), constant(0.0)], 20.0, ErrorModelConfig::none()))
                .unwrap();
        for e in &m.dvl {
            for (b, sign) in e.corrupted_beams.iter().zip([1.0, -1.0, -1.0, 1.0]) {
                assert!((b - sign * 0.24185).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn sinusoid_extrema() {
        let p = AxisProfile::Sinusoid { offset: 0.0, amplitude: 1.0, period_s: 40.0, phase_rad: 0.0 };
        assert!((p.value(10.0) - 1.0).abs() < 1e-15);
        assert!((p.value(30.0) + 1.0).abs() < 1e-15);
        let m: Mission<f64> =
            synthesize_mission(&cfg([p, constant(0.0), constant(0.0)], 30.0, ErrorModelConfig::none())).unwrap();
        assert!((m.dvl[10].truth_velocity.0[0] - 1.0).abs() < 1e-15);
        assert!((m.dvl[30].truth_velocity.0[0] + 1.0).abs() < 1e-15);
        // specific force is the derivative: zero at the extrema
        assert!(m.imu[1000].specific_force[0].abs() < 1e-12);
    }

    #[test]
    fn piecewise_holds_values() {
        let p = AxisProfile::Piecewise { segments: vec![(0.0, 1.0), (50.0, 2.0)], ramp_s: 0.0 };
        assert_eq!(p.value(49.9), 1.0);
        assert_eq!(p.value(50.0), 2.0);
        assert_eq!(p.value(1e6), 2.0);
        assert_eq!(p.derivative(25.0), 0.0);
    }

    #[test]
    fn ramped_steps() {
        let p = AxisProfile::Piecewise { segments: vec![(0.0, 1.0), (50.0, 2.0)], ramp_s: 10.0 };
        assert_eq!(p.value(50.0), 1.0);
        assert!((p.value(55.0) - 1.5).abs() < 1e-15);
        assert_eq!(p.value(60.0), 2.0);
        assert!((p.derivative(52.0) - 0.1).abs() < 1e-15);
        assert_eq!(p.derivative(61.0), 0.0);
        // derivative integrates to the step
        let area: f64 = (0..1000).map(|i| p.derivative(50.0 + 0.01 * (i as f64 + 0.5)) * 0.01).sum();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_short() {
        let mut c = cfg([constant(0.0), constant(0.0), constant(0.0)], 30.0, ErrorModelConfig::none());
        c.duration_s = 4.0;
        assert!(synthesize_mission::<f64>(&c).is_err());
    }

    #[test]
    fn corruption_applied_truth_untouched() {
        let err = ErrorModelConfig::field_trial(5);
        let m: Mission<f64> =
            synthesize_mission(&cfg([constant(1.5), constant(0.1), constant(0.0)], 30.0, err)).unwrap();
        let e = &m.dvl[3];
        assert_ne!(e.clean_beams, e.corrupted_beams);
        assert_eq!(e.truth_velocity.0, [1.5, 0.1, 0.0]);
        assert_eq!(m.corruption, Some(err));
    }

    #[test]
    fn desk_set_is_reproducible() {
        let a = desk_missions(13, 400.0, 30.0, ErrorModelConfig::field_trial(1), ImuNoise::default(), 9);
        let b = desk_missions(13, 400.0, 30.0, ErrorModelConfig::field_trial(1), ImuNoise::default(), 9);
        assert_eq!(a, b);
        assert_eq!(a.len(), 13);
        let ma: Mission<f64> = synthesize_mission(&a[4]).unwrap();
        let mb: Mission<f64> = synthesize_mission(&b[4]).unwrap();
        assert_eq!(ma, mb);
    }
}
