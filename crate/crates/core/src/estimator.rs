//! Least-squares recovery of body velocity from beam velocities.

use crate::error::{Error, Result};
use crate::geometry::{BeamMeasurement, BodyVelocity, TransformMatrix, BEAM_COUNT};
use crate::scalar::Real;

/// Normal matrices with a 1-norm condition number above this are treated
/// as singular.
pub const MAX_CONDITION: f64 = 1e8;

/// Pseudoinverse estimator `v̂ = (HᵀH)⁻¹ Hᵀ ṽ`, precomputed per geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsEstimator<T> {
    transform: TransformMatrix<T>,
    pinv: [[T; BEAM_COUNT]; 3],
}

impl<T: Real> LsEstimator<T> {
    pub fn new(transform: TransformMatrix<T>) -> Result<Self> {
        let gram = transform.gram();
        let inv = invert3(&gram).ok_or(Error::SingularGeometry {
            condition: f64::INFINITY,
        })?;
        let condition = (norm1(&gram) * norm1(&inv)).as_f64();
        if !condition.is_finite() || condition > MAX_CONDITION {
            return Err(Error::SingularGeometry { condition });
        }
        let rows = transform.rows();
        let mut pinv = [[T::zero(); BEAM_COUNT]; 3];
        for (a, out) in pinv.iter_mut().enumerate() {
            for (i, row) in rows.iter().enumerate() {
                out[i] = (0..3).map(|b| inv[a][b] * row[b]).sum();
            }
        }
        Ok(Self { transform, pinv })
    }

    pub fn transform(&self) -> &TransformMatrix<T> {
        &self.transform
    }

    /// The 3×4 pseudoinverse `H†`.
    pub fn pseudoinverse(&self) -> &[[T; BEAM_COUNT]; 3] {
        &self.pinv
    }

    pub fn estimate_beams(&self, beams: &[T; BEAM_COUNT]) -> BodyVelocity<T> {
        BodyVelocity(self.pinv.map(|row| {
            row.iter().zip(beams).map(|(p, b)| *p * *b).sum()
        }))
    }

    pub fn estimate(&self, meas: &BeamMeasurement<T>) -> BodyVelocity<T> {
        self.estimate_beams(&meas.beams)
    }

    /// Error covariance `σ² (HᵀH)⁻¹` for white beam noise of std `sigma`.
    pub fn noise_covariance(&self, sigma: T) -> [[T; 3]; 3] {
        let inv = invert3(&self.transform.gram()).expect("checked at construction");
        inv.map(|r| r.map(|x| x * sigma * sigma))
    }
}

/// Builds the estimator for `transform`; fails on rank-deficient geometry.
pub fn make_ls_estimator<T: Real>(transform: TransformMatrix<T>) -> Result<LsEstimator<T>> {
    LsEstimator::new(transform)
}

pub fn ls_estimate<T: Real>(est: &LsEstimator<T>, meas: &BeamMeasurement<T>) -> BodyVelocity<T> {
    est.estimate(meas)
}

fn norm1<T: Real>(m: &[[T; 3]; 3]) -> T {
    (0..3)
        .map(|j| (0..3).map(|i| m[i][j].abs()).sum::<T>())
        .fold(T::zero(), T::max)
}

/// Adjugate inverse; `None` when the determinant vanishes.
fn invert3<T: Real>(m: &[[T; 3]; 3]) -> Option<[[T; 3]; 3]> {
    let c = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
    };
    let det = m[0][0] * c(0, 0) + m[0][1] * c(0, 1) + m[0][2] * c(0, 2);
    if det == T::zero() || !det.is_finite() {
        return None;
    }
    // inverse = adjugate / det, adjugate = cofactorᵀ
    Some(std::array::from_fn(|i| std::array::from_fn(|j| c(j, i) / det)))
}
