//! Spectral norm estimation and Lipschitz-budget weight normalization.
//!
//! Each normalized matrix is rescaled to `W / ρ(W) · γ^(1/L)`, so a stack of
//! `L` normalized layers with 1-Lipschitz activations composes to a map whose
//! Lipschitz constant is bounded by `γ`.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::nn::tensor::Tensor;
use crate::scalar::Real;

pub const DEFAULT_POWER_ITERATIONS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralNormConfig {
    /// Lipschitz budget of the whole network.
    pub gamma: f64,
    /// Number of normalized weight layers sharing the budget.
    pub layers: u32,
    pub power_iterations: usize,
}

impl SpectralNormConfig {
    pub fn new(gamma: f64, layers: u32, power_iterations: usize) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(contract("spectral budget gamma must be > 0"));
        }
        if layers == 0 || power_iterations == 0 {
            return Err(contract("layer count and power iterations must be ≥ 1"));
        }
        Ok(Self { gamma, layers, power_iterations })
    }

    /// Per-layer target norm `γ^(1/L)`.
    pub fn per_layer_target(&self) -> f64 {
        self.gamma.powf(1.0 / self.layers as f64)
    }
}

/// Power iteration on `WᵀW`, keeping the right singular vector between calls.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerIteration<T> {
    v: Vec<T>,
}

impl<T: Real> PowerIteration<T> {
    pub fn new() -> Self {
        Self { v: Vec::new() }
    }

    pub fn vector(&self) -> &[T] {
        &self.v
    }

    pub fn from_vector(v: Vec<T>) -> Self {
        Self { v }
    }

    fn reset(&mut self, cols: usize) {
        // slightly tilted ones vector: never orthogonal to a generic top
        // singular vector and deterministic
        let v: Vec<T> = (0..cols)
            .map(|i| T::one() + T::lit(0.1 * i as f64 / cols as f64))
            .collect();
        let n = norm(&v);
        self.v = v.into_iter().map(|x| x / n).collect();
    }

    /// Estimate of the largest singular value of the `rows × cols` matrix `w`.
    ///
    /// The estimate `‖W v‖` with unit `v` never exceeds the true value.
    pub fn estimate(&mut self, w: &[T], rows: usize, cols: usize, iterations: usize) -> T {
        debug_assert_eq!(w.len(), rows * cols);
        if self.v.len() != cols || !self.v.iter().all(|x| x.is_finite()) {
            self.reset(cols);
        }
        let mut u = vec![T::zero(); rows];
        for _ in 0..iterations {
            matvec(w, rows, cols, &self.v, &mut u);
            let mut next = vec![T::zero(); cols];
            matvec_t(w, rows, cols, &u, &mut next);
            let n = norm(&next);
            if n == T::zero() || !n.is_finite() {
                return T::zero();
            }
            for (a, b) in self.v.iter_mut().zip(next) {
                *a = b / n;
            }
        }
        matvec(w, rows, cols, &self.v, &mut u);
        norm(&u)
    }

    /// Rescales `w` in place to spectral norm `target`. Returns the norm
    /// measured before rescaling; a zero matrix is left unchanged.
    pub fn normalize(&mut self, w: &mut Tensor<T>, target: T, iterations: usize) -> Result<T> {
        let (rows, cols) = w.dims2()?;
        let rho = self.estimate(w.data(), rows, cols, iterations);
        if rho > T::zero() {
            w.scale(target / rho);
        }
        Ok(rho)
    }
}

fn norm<T: Real>(x: &[T]) -> T {
    x.iter().map(|v| *v * *v).sum::<T>().sqrt()
}

fn matvec<T: Real>(w: &[T], rows: usize, cols: usize, x: &[T], out: &mut [T]) {
    for (i, o) in out.iter_mut().enumerate().take(rows) {
        *o = w[i * cols..(i + 1) * cols].iter().zip(x).map(|(a, b)| *a * *b).sum();
    }
}

fn matvec_t<T: Real>(w: &[T], rows: usize, cols: usize, x: &[T], out: &mut [T]) {
    out.iter_mut().for_each(|o| *o = T::zero());
    for i in 0..rows {
        let xi = x[i];
        for (o, a) in out.iter_mut().zip(&w[i * cols..(i + 1) * cols]) {
            *o += *a * xi;
        }
    }
}

/// Largest singular value of matrix `w` from a cold start. Zero for the
/// zero matrix.
pub fn spectral_norm<T: Real>(w: &Tensor<T>, iterations: usize) -> Result<T> {
    let (rows, cols) = w.dims2()?;
    Ok(PowerIteration::new().estimate(w.data(), rows, cols, iterations))
}

/// `W / ρ(W) · γ^(1/L)`; the zero matrix is returned unchanged.
pub fn normalize_weights<T: Real>(w: &Tensor<T>, cfg: &SpectralNormConfig) -> Result<Tensor<T>> {
    let mut out = w.clone();
    PowerIteration::new().normalize(&mut out, T::lit(cfg.per_layer_target()), cfg.power_iterations)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(r: usize, c: usize, d: &[f64]) -> Tensor<f64> {
        Tensor::matrix(r, c, d.to_vec()).unwrap()
    }

    #[test]
    fn diagonal() {
        let w = mat(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        assert!((spectral_norm(&w, DEFAULT_POWER_ITERATIONS).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_has_unit_norm() {
        let (s, c) = 0.7f64.sin_cos();
        let w = mat(2, 2, &[c, -s, s, c]);
        assert!((spectral_norm(&w, DEFAULT_POWER_ITERATIONS).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let w = mat(2, 3, &[0.0; 6]);
        assert_eq!(spectral_norm(&w, 30).unwrap(), 0.0);
        let cfg = SpectralNormConfig::new(2.0, 1, 30).unwrap();
        assert_eq!(normalize_weights(&w, &cfg).unwrap(), w);
    }

    #[test]
    fn normalize_diagonal() {
        let w = mat(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        let cfg = SpectralNormConfig::new(4.0, 2, 30).unwrap();
        let out = normalize_weights(&w, &cfg).unwrap();
        let d = out.data();
        assert!((d[0] - 2.0).abs() < 1e-12);
        assert!((d[3] - 2.0 / 3.0).abs() < 1e-12);
        assert!((spectral_norm(&out, 30).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_budget_single_layer() {
        let w = mat(2, 3, &[0.3, -1.0, 2.0, 0.5, 0.1, -0.7]);
        let cfg = SpectralNormConfig::new(1.0, 1, 200).unwrap();
        let out = normalize_weights(&w, &cfg).unwrap();
        assert!((spectral_norm(&out, 200).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn idempotent() {
        let w = mat(3, 2, &[1.0, 2.0, -0.5, 0.3, 0.9, -1.1]);
        let cfg = SpectralNormConfig::new(3.0, 2, 100).unwrap();
        let once = normalize_weights(&w, &cfg).unwrap();
        let twice = normalize_weights(&once, &cfg).unwrap();
        for (a, b) in once.data().iter().zip(twice.data()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn estimate_is_lower_bound() {
        let w = mat(2, 2, &[1.0, 0.9, 0.9, 1.0]);
        let few = spectral_norm(&w, 1).unwrap();
        assert!(few <= 1.9 + 1e-12);
    }

    #[test]
    fn invalid_config() {
        assert!(SpectralNormConfig::new(0.0, 1, 30).is_err());
        assert!(SpectralNormConfig::new(1.0, 0, 30).is_err());
    }
}
