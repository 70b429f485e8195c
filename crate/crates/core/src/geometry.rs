//! Janus four-beam DVL geometry and the beam-velocity error model.
//!
//! Beams sit at a common pitch Θ from the body z-axis and at yaws
//! 45°, 135°, 225° and 315°. Row `i` of the transform matrix is the unit
//! direction of beam `i`, so beam velocities are `H · v`.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::rng::RandomSource;
use crate::scalar::Real;

/// Pitch used when none is configured. Typical of commercial Janus heads.
pub const DEFAULT_PITCH_DEG: f64 = 30.0;

pub const BEAM_COUNT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry<T> {
    pitch_deg: T,
    yaw_deg: [T; BEAM_COUNT],
    pitch_rad: T,
    yaw_rad: [T; BEAM_COUNT],
}

impl<T: Real> BeamGeometry<T> {
    /// Janus geometry with the given pitch in degrees.
    ///
    /// Pitch must lie in `[0°, 90°]`. The endpoints are accepted so the
    /// degenerate transforms can be built and inspected; the least-squares
    /// estimator refuses them.
    pub fn janus(pitch_deg: T) -> Result<Self> {
        if !pitch_deg.is_finite() || pitch_deg < T::zero() || pitch_deg > T::lit(90.0) {
            return Err(contract(format!("pitch {pitch_deg}° outside [0°, 90°]")));
        }
        let yaw_deg = std::array::from_fn(|i| T::lit(i as f64 * 90.0 + 45.0));
        Ok(Self {
            pitch_deg,
            yaw_deg,
            pitch_rad: pitch_deg.to_radians(),
            yaw_rad: yaw_deg.map(|y| y.to_radians()),
        })
    }

    pub fn pitch_deg(&self) -> T {
        self.pitch_deg
    }

    pub fn yaw_deg(&self) -> [T; BEAM_COUNT] {
        self.yaw_deg
    }

    /// True when the geometry yields a rank-3 transform.
    pub fn is_regular(&self) -> bool {
        self.pitch_deg > T::zero() && self.pitch_deg < T::lit(90.0)
    }
}

/// Unit direction of beam `index` (1-based).
pub fn beam_direction<T: Real>(index: usize, geometry: &BeamGeometry<T>) -> Result<[T; 3]> {
    if !(1..=BEAM_COUNT).contains(&index) {
        return Err(contract(format!("beam index {index} outside 1..=4")));
    }
    let yaw = geometry.yaw_rad[index - 1];
    let (sin_p, cos_p) = geometry.pitch_rad.sin_cos();
    Ok([yaw.cos() * sin_p, yaw.sin() * sin_p, cos_p])
}

/// 4×3 matrix mapping body velocity to beam velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformMatrix<T> {
    rows: [[T; 3]; BEAM_COUNT],
}

impl<T: Real> TransformMatrix<T> {
    pub fn rows(&self) -> &[[T; 3]; BEAM_COUNT] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> [T; BEAM_COUNT] {
        self.rows.map(|r| r[j])
    }

    /// `Hᵀ H`.
    pub fn gram(&self) -> [[T; 3]; 3] {
        let mut g = [[T::zero(); 3]; 3];
        for row in &self.rows {
            for a in 0..3 {
                for b in 0..3 {
                    g[a][b] += row[a] * row[b];
                }
            }
        }
        g
    }

    /// `H · v`.
    pub fn apply(&self, v: &[T; 3]) -> [T; BEAM_COUNT] {
        self.rows
            .map(|r| r[0] * v[0] + r[1] * v[1] + r[2] * v[2])
    }
}

pub fn build_transform<T: Real>(geometry: &BeamGeometry<T>) -> TransformMatrix<T> {
    let rows = std::array::from_fn(|i| {
        beam_direction(i + 1, geometry).expect("index in range by construction")
    });
    TransformMatrix { rows }
}

/// Body-frame velocity in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyVelocity<T>(pub [T; 3]);

impl<T: Real> BodyVelocity<T> {
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// One DVL epoch: time in seconds and the four along-beam velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamMeasurement<T> {
    pub t: f64,
    pub beams: [T; BEAM_COUNT],
}

/// Noise-free forward model `H · v`, stamped at `t`.
pub fn project_velocity<T: Real>(
    v: &BodyVelocity<T>,
    transform: &TransformMatrix<T>,
    t: f64,
) -> BeamMeasurement<T> {
    BeamMeasurement {
        t,
        beams: transform.apply(&v.0),
    }
}

/// Additive in-run bias plus white Gaussian noise on each beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorModelConfig<T> {
    pub bias: [T; BEAM_COUNT],
    pub noise_std: T,
    pub seed: u64,
}

impl<T: Real> ErrorModelConfig<T> {
    pub fn new(bias: [T; BEAM_COUNT], noise_std: T, seed: u64) -> Result<Self> {
        if !(noise_std >= T::zero()) || !noise_std.is_finite() {
            return Err(contract(format!("noise_std {noise_std} must be finite and ≥ 0")));
        }
        if bias.iter().any(|b| !b.is_finite()) {
            return Err(contract("bias must be finite"));
        }
        Ok(Self { bias, noise_std, seed })
    }

    /// Same bias on every beam.
    pub fn uniform_bias(bias: T, noise_std: T, seed: u64) -> Result<Self> {
        Self::new([bias; BEAM_COUNT], noise_std, seed)
    }

    /// Bias 0.001 m/s on every beam and 0.15 m/s white noise.
    pub fn field_trial(seed: u64) -> Self {
        Self {
            bias: [T::lit(0.001); BEAM_COUNT],
            noise_std: T::lit(0.15),
            seed,
        }
    }

    /// Same model in another scalar type.
    pub fn cast<U: Real>(&self) -> ErrorModelConfig<U> {
        ErrorModelConfig {
            bias: self.bias.map(|b| U::lit(b.as_f64())),
            noise_std: U::lit(self.noise_std.as_f64()),
            seed: self.seed,
        }
    }

    pub fn none() -> Self {
        Self {
            bias: [T::zero(); BEAM_COUNT],
            noise_std: T::zero(),
            seed: 0,
        }
    }
}

/// Applies the error model to a clean measurement, drawing noise from `rng`.
///
/// When `noise_std` is zero no draws are consumed.
pub fn corrupt_measurement<T: Real>(
    clean: &BeamMeasurement<T>,
    cfg: &ErrorModelConfig<T>,
    rng: &mut RandomSource,
) -> BeamMeasurement<T> {
    let mut beams = clean.beams;
    for (b, bias) in beams.iter_mut().zip(cfg.bias) {
        *b += bias;
        if cfg.noise_std > T::zero() {
            *b += rng.normal(T::zero(), cfg.noise_std);
        }
    }
    BeamMeasurement { t: clean.t, beams }
}
