//! Per-epoch samples for the four model variants.

use crate::beamsnet::{BeamsNetVariant, WindowedSample, IMU_CHANNELS, IMU_WINDOW, PAST_EPOCHS};
use crate::dataset::{Mission, IMU_RATE_HZ};
use crate::geometry::BEAM_COUNT;
use crate::nn::Tensor;
use crate::scalar::Real;
use crate::snmnn::SnmnnVariant;

/// Tolerance for comparing a nominal IMU timestamp with a DVL epoch.
const TIME_EPS: f64 = 1e-6;

/// What history a variant needs before an epoch becomes a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantRequirements {
    /// DVL epochs that must precede the current one.
    pub past_epochs: usize,
    /// IMU samples in the window; 0 if the raw window is not used.
    pub imu_window: usize,
}

impl VariantRequirements {
    pub fn beamsnet(variant: BeamsNetVariant) -> Self {
        Self {
            past_epochs: PAST_EPOCHS,
            imu_window: if variant.uses_imu() { IMU_WINDOW } else { 0 },
        }
    }

    pub fn snmnn(variant: SnmnnVariant) -> Self {
        match variant {
            SnmnnVariant::V1 => Self { past_epochs: 0, imu_window: 0 },
            SnmnnVariant::V2 => Self { past_epochs: PAST_EPOCHS, imu_window: 0 },
        }
    }

    /// The union of requirements; samples satisfying it suit every variant.
    pub fn all() -> Self {
        Self { past_epochs: PAST_EPOCHS, imu_window: IMU_WINDOW }
    }
}

#[derive(Debug, Clone)]
pub struct Windows<T> {
    pub samples: Vec<WindowedSample<T>>,
    /// Set when the mission was too short to yield any sample.
    pub warning: Option<String>,
}

/// Index of the latest IMU record at or before `t`.
fn imu_index_at<T>(m: &Mission<T>, t: f64) -> Option<usize> {
    let n = m.imu.partition_point(|r| r.t <= t + TIME_EPS);
    let idx = n.checked_sub(1)?;
    (t - m.imu[idx].t < 2.0 / IMU_RATE_HZ).then_some(idx)
}

/// Builds one sample per eligible DVL epoch. Inputs come from corrupted
/// beams and IMU records at or before the epoch; the target is the truth
/// velocity. The IMU window is the `imu_window` records ending at the latest
/// record not after the epoch time. Past beams are zero when the
/// requirements ask for none and the epoch has no history yet.
pub fn make_windows<T: Real>(m: &Mission<T>, req: VariantRequirements) -> Windows<T> {
    let per_epoch = IMU_RATE_HZ as usize;
    let mut samples = Vec::new();
    for (k, epoch) in m.dvl.iter().enumerate() {
        if k < req.past_epochs {
            continue;
        }
        let Some(end) = imu_index_at(m, epoch.t) else { continue };
        if end + 1 < req.imu_window {
            continue;
        }
        let imu_window = (req.imu_window > 0).then(|| {
            let start = end + 1 - req.imu_window;
            let mut data = vec![T::zero(); IMU_CHANNELS * req.imu_window];
            for (j, rec) in m.imu[start..=end].iter().enumerate() {
                for (c, v) in rec.channels().into_iter().enumerate() {
                    data[c * req.imu_window + j] = v;
                }
            }
            Tensor::new(vec![IMU_CHANNELS, req.imu_window], data).expect("window shape")
        });
        let mean_from = (end + 1).saturating_sub(per_epoch);
        let recent = &m.imu[mean_from..=end];
        let n = T::lit(recent.len() as f64);
        let imu_epoch_mean = std::array::from_fn(|c| recent.iter().map(|r| r.channels()[c]).sum::<T>() / n);
        let past_beams: [[T; BEAM_COUNT]; PAST_EPOCHS] = std::array::from_fn(|i| {
            (k + i)
                .checked_sub(PAST_EPOCHS)
                .map_or([T::zero(); BEAM_COUNT], |p| m.dvl[p].corrupted_beams)
        });
        samples.push(WindowedSample {
            t: epoch.t,
            imu_window,
            imu_epoch_mean,
            past_beams,
            current_beams: epoch.corrupted_beams,
            target: epoch.truth_velocity,
        });
    }
    let warning = samples.is_empty().then(|| {
        format!(
            "mission {} yields no samples: needs {} past DVL epochs and {} IMU records",
            m.id, req.past_epochs, req.imu_window
        )
    });
    Windows { samples, warning }
}
