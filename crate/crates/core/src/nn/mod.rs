//! Small neural-network substrate with hand-derived gradients.
//!
//! Layers cache their last input on `forward` and accumulate parameter
//! gradients on `backward`; a training loop runs forward/backward per sample,
//! then lets the optimizer consume the accumulated gradients.

pub mod activation;
pub mod adam;
pub mod conv1d;
pub mod dense;
pub mod gradcheck;
pub mod loss;
pub mod param;
pub mod spectral;
pub mod tensor;

pub use activation::{activation, Activation, ActivationKind};
pub use adam::{AdamState, StepDecay};
pub use conv1d::{conv1d_forward, Conv1dLayer};
pub use dense::{dense_forward, DenseLayer};
pub use loss::mse_loss;
pub use param::Param;
pub use spectral::{normalize_weights, spectral_norm, PowerIteration, SpectralNormConfig};
pub use tensor::Tensor;

use crate::error::Result;
use crate::scalar::Real;

/// A differentiable node with cached forward state.
pub trait Layer<T: Real> {
    fn forward(&mut self, x: &[T]) -> Result<Vec<T>>;

    /// Accumulates parameter gradients and returns the gradient with respect
    /// to the last forward input.
    fn backward(&mut self, grad_out: &[T]) -> Result<Vec<T>>;

    fn params(&self) -> Vec<&Param<T>>;

    fn params_mut(&mut self) -> Vec<&mut Param<T>>;

    fn zero_grad(&mut self) {
        for p in self.params_mut() {
            p.zero_grad();
        }
    }
}

/// Layers applied in order.
#[derive(Default)]
pub struct Sequential<T: Real> {
    layers: Vec<Box<dyn Layer<T> + Send>>,
}

impl<T: Real> Sequential<T> {
    pub fn new() -> Self {
        Self { layers: Vec::new() }
    }

    pub fn push(mut self, layer: impl Layer<T> + Send + 'static) -> Self {
        self.layers.push(Box::new(layer));
        self
    }
}

impl<T: Real> Layer<T> for Sequential<T> {
    fn forward(&mut self, x: &[T]) -> Result<Vec<T>> {
        let mut h = x.to_vec();
        for l in &mut self.layers {
            h = l.forward(&h)?;
        }
        Ok(h)
    }

    fn backward(&mut self, grad_out: &[T]) -> Result<Vec<T>> {
        let mut g = grad_out.to_vec();
        for l in self.layers.iter_mut().rev() {
            g = l.backward(&g)?;
        }
        Ok(g)
    }

    fn params(&self) -> Vec<&Param<T>> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    fn params_mut(&mut self) -> Vec<&mut Param<T>> {
        self.layers.iter_mut().flat_map(|l| l.params_mut()).collect()
    }
}

/// Concatenates feature vectors.
pub fn concat<T: Copy>(parts: &[&[T]]) -> Vec<T> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Splits a gradient flowing into a concatenation back into its parts.
pub fn split<T: Copy>(grad: &[T], sizes: &[usize]) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for &n in sizes {
        out.push(grad[at..at + n].to_vec());
        at += n;
    }
    debug_assert_eq!(at, grad.len());
    out
}
