use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::nn::param::Param;
use crate::nn::tensor::Tensor;
use crate::nn::Layer;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ActivationKind {
    /// `x` for `x ≥ 0`, `slope · x` otherwise.
    LeakyRelu(f64),
    Tanh,
    Linear,
}

impl ActivationKind {
    pub fn apply<T: Real>(self, x: T) -> T {
        match self {
            Self::LeakyRelu(slope) => {
                if x >= T::zero() {
                    x
                } else {
                    T::lit(slope) * x
                }
            }
            Self::Tanh => x.tanh(),
            Self::Linear => x,
        }
    }

    /// Derivative at pre-activation `x`; the leaky ReLU takes the right
    /// derivative at 0.
    pub fn derivative<T: Real>(self, x: T) -> T {
        match self {
            Self::LeakyRelu(slope) => {
                if x >= T::zero() {
                    T::one()
                } else {
                    T::lit(slope)
                }
            }
            Self::Tanh => {
                let t = x.tanh();
                T::one() - t * t
            }
            Self::Linear => T::one(),
        }
    }
}

/// Elementwise activation over a tensor.
pub fn activation<T: Real>(kind: ActivationKind, x: &Tensor<T>) -> Tensor<T> {
    let data = x.data().iter().map(|v| kind.apply(*v)).collect();
    Tensor::new(x.shape().to_vec(), data).expect("same shape")
}

#[derive(Debug, Clone)]
pub struct Activation<T> {
    kind: ActivationKind,
    input: Option<Vec<T>>,
}

impl<T: Real> Activation<T> {
    pub fn new(kind: ActivationKind) -> Self {
        Self { kind, input: None }
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }
}

impl<T: Real> Layer<T> for Activation<T> {
    fn forward(&mut self, x: &[T]) -> Result<Vec<T>> {
        self.input = Some(x.to_vec());
        Ok(x.iter().map(|v| self.kind.apply(*v)).collect())
    }

    fn backward(&mut self, grad_out: &[T]) -> Result<Vec<T>> {
        let x = self
            .input
            .as_ref()
            .ok_or_else(|| Error::Usage("activation backward called before forward".into()))?;
        if x.len() != grad_out.len() {
            return Err(contract("activation gradient has wrong size"));
        }
        Ok(x
            .iter()
            .zip(grad_out)
            .map(|(v, g)| self.kind.derivative(*v) * *g)
            .collect())
    }

    fn params(&self) -> Vec<&Param<T>> {
        Vec::new()
    }

    fn params_mut(&mut self) -> Vec<&mut Param<T>> {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaky_relu_slope() {
        let y = activation(ActivationKind::LeakyRelu(0.1), &Tensor::vector(vec![-1.0, 0.0, 2.0]));
        assert_eq!(y.data(), &[-0.1, 0.0, 2.0]);
    }

    #[test]
    fn tanh_and_linear() {
        assert_eq!(ActivationKind::Tanh.apply(0.0f64), 0.0);
        let x = Tensor::vector(vec![-3.0, 0.25, 7.0]);
        assert_eq!(activation(ActivationKind::Linear, &x), x);
    }

    #[test]
    fn tanh_derivative() {
        let h = 1e-6;
        for x in [-2.0f64, -0.3, 0.0, 0.7, 1.5] {
            let fd = (x + h).tanh() - (x - h).tanh();
            assert!((fd / (2.0 * h) - ActivationKind::Tanh.derivative(x)).abs() < 1e-9);
        }
    }
}
