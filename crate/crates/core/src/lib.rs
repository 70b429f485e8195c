//! Body-frame velocity estimation from four-beam Doppler velocity log data.
//!
//! The crate provides a pseudoinverse least-squares baseline, two
//! spatial convolutional regressors (BeamsNet V1 with IMU input, V2 with
//! DVL input only) and a spectrally normalized memory-neuron network in two
//! input variants, together with a synthetic mission generator, a loader for
//! recorded missions, and the metrics used to compare the methods.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what training and the
//! command line use.

pub mod beamsnet;
pub mod checkpoint;
pub mod dataset;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod metrics;
pub mod nn;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod snmnn;

pub use error::{Error, Result};
pub use rng::RandomSource;
pub use scalar::Real;

pub type BeamGeometry = geometry::BeamGeometry<f64>;
pub type TransformMatrix = geometry::TransformMatrix<f64>;
pub type BodyVelocity = geometry::BodyVelocity<f64>;
pub type BeamMeasurement = geometry::BeamMeasurement<f64>;
pub type ErrorModelConfig = geometry::ErrorModelConfig<f64>;
pub type LsEstimator = estimator::LsEstimator<f64>;
