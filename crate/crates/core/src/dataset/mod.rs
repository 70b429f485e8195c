//! Missions: time-aligned IMU and DVL streams, synthetic or recorded.

pub mod canonical;
pub mod load;
pub mod split;
pub mod synth;
pub mod windows;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    corrupt_measurement, BeamMeasurement, BodyVelocity, ErrorModelConfig, BEAM_COUNT,
};
use crate::rng::RandomSource;
use crate::scalar::Real;

pub use load::{load_mission, ColumnSchema};
pub use split::{split_missions, Split};
pub use synth::{desk_missions, synthesize_mission, AxisProfile, ImuNoise, SyntheticTrajectoryConfig};
pub use windows::{make_windows, VariantRequirements, Windows};

pub const IMU_RATE_HZ: f64 = 100.0;
pub const DVL_RATE_HZ: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuRecord<T> {
    pub t: f64,
    /// m/s².
    pub specific_force: [T; 3],
    /// rad/s.
    pub angular_rate: [T; 3],
}

impl<T: Real> ImuRecord<T> {
    pub fn channels(&self) -> [T; 6] {
        let [a, b, c] = self.specific_force;
        let [d, e, f] = self.angular_rate;
        [a, b, c, d, e, f]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DvlEpoch<T> {
    pub t: f64,
    pub clean_beams: [T; BEAM_COUNT],
    /// What the networks and the LS baseline see.
    pub corrupted_beams: [T; BEAM_COUNT],
    /// Reference velocity; never corrupted.
    pub truth_velocity: BodyVelocity<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mission<T> {
    pub id: u64,
    /// Beam pitch the clean beams were generated or recorded with.
    pub pitch_deg: f64,
    pub imu: Vec<ImuRecord<T>>,
    pub dvl: Vec<DvlEpoch<T>>,
    pub duration: f64,
    /// Error model applied to produce `corrupted_beams`, if any.
    pub corruption: Option<ErrorModelConfig<T>>,
}

impl<T: Real> Mission<T> {
    /// Replaces `corrupted_beams` with `clean_beams` plus the error model.
    /// The noise stream is keyed by `(cfg.seed, mission id)` so results do
    /// not depend on the order missions are processed in.
    pub fn apply_corruption(&mut self, cfg: &ErrorModelConfig<T>) {
        let mut rng = RandomSource::with_stream(cfg.seed, corruption_stream(self.id));
        for e in &mut self.dvl {
            let clean = BeamMeasurement { t: e.t, beams: e.clean_beams };
            e.corrupted_beams = corrupt_measurement(&clean, cfg, &mut rng).beams;
        }
        self.corruption = Some(*cfg);
    }

    /// Checks time ordering and that the IMU spans every DVL epoch.
    pub fn validate(&self) -> Result<()> {
        let ordered = |ts: &mut dyn Iterator<Item = f64>| {
            let v: Vec<f64> = ts.collect();
            v.windows(2).all(|w| w[1] > w[0])
        };
        if !ordered(&mut self.imu.iter().map(|r| r.t)) {
            return Err(Error::Data(format!("mission {}: IMU time not strictly increasing", self.id)));
        }
        if !ordered(&mut self.dvl.iter().map(|r| r.t)) {
            return Err(Error::Data(format!("mission {}: DVL time not strictly increasing", self.id)));
        }
        if let (Some(first), Some(last), Some(i0), Some(i1)) =
            (self.dvl.first(), self.dvl.last(), self.imu.first(), self.imu.last())
        {
            let slack = 0.5 / IMU_RATE_HZ;
            if first.t < i0.t - slack || last.t > i1.t + slack {
                return Err(Error::Data(format!(
                    "mission {}: DVL epochs [{}, {}] outside IMU span [{}, {}]",
                    self.id, first.t, last.t, i0.t, i1.t
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn corruption_stream(id: u64) -> u64 {
    id.wrapping_mul(2)
}

pub(crate) fn imu_noise_stream(id: u64) -> u64 {
    id.wrapping_mul(2).wrapping_add(1)
}
