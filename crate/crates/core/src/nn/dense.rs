use crate::error::{contract, Error, Result};
use crate::nn::param::Param;
use crate::nn::tensor::Tensor;
use crate::nn::Layer;
use crate::rng::RandomSource;
use crate::scalar::Real;

/// Fully connected layer `y = W x + b` with `W` stored `out × in`.
#[derive(Debug, Clone)]
pub struct DenseLayer<T> {
    pub weight: Param<T>,
    pub bias: Param<T>,
    input: Option<Vec<T>>,
}

impl<T: Real> DenseLayer<T> {
    pub fn init(inputs: usize, outputs: usize, rng: &mut RandomSource) -> Self {
        Self {
            weight: Param::uniform_fan_in(&[outputs, inputs], inputs, rng),
            bias: Param::uniform_fan_in(&[outputs], inputs, rng),
            input: None,
        }
    }

    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weight: Param::zeros(&[outputs, inputs]),
            bias: Param::zeros(&[outputs]),
            input: None,
        }
    }

    pub fn from_parts(weight: Tensor<T>, bias: Tensor<T>) -> Result<Self> {
        let (out, _) = weight.dims2()?;
        if bias.shape() != [out] {
            return Err(contract(format!(
                "bias shape {:?} does not match {out} outputs",
                bias.shape()
            )));
        }
        Ok(Self {
            weight: Param::new(weight),
            bias: Param::new(bias),
            input: None,
        })
    }

    pub fn inputs(&self) -> usize {
        self.weight.value.shape()[1]
    }

    pub fn outputs(&self) -> usize {
        self.weight.value.shape()[0]
    }

    /// Pure forward pass; does not touch the cache.
    pub fn infer(&self, x: &[T]) -> Result<Vec<T>> {
        let (out, inp) = (self.outputs(), self.inputs());
        if x.len() != inp {
            return Err(contract(format!("dense layer expects {inp} inputs, got {}", x.len())));
        }
        let w = self.weight.value.data();
        let b = self.bias.value.data();
        Ok((0..out)
            .map(|i| {
                let row = &w[i * inp..(i + 1) * inp];
                b[i] + row.iter().zip(x).map(|(a, c)| *a * *c).sum::<T>()
            })
            .collect())
    }
}

impl<T: Real> Layer<T> for DenseLayer<T> {
    fn forward(&mut self, x: &[T]) -> Result<Vec<T>> {
        let y = self.infer(x)?;
        self.input = Some(x.to_vec());
        Ok(y)
    }

    fn backward(&mut self, grad_out: &[T]) -> Result<Vec<T>> {
        let x = self
            .input
            .as_ref()
            .ok_or_else(|| Error::Usage("dense backward called before forward".into()))?;
        let (out, inp) = (self.outputs(), self.inputs());
        if grad_out.len() != out {
            return Err(contract(format!("dense backward expects {out} grads, got {}", grad_out.len())));
        }
        let w = self.weight.value.data();
        let mut gx = vec![T::zero(); inp];
        {
            let gw = self.weight.grad.data_mut();
            for i in 0..out {
                let g = grad_out[i];
                let row = i * inp;
                for j in 0..inp {
                    gw[row + j] += g * x[j];
                    gx[j] += w[row + j] * g;
                }
            }
        }
        for (gb, g) in self.bias.grad.data_mut().iter_mut().zip(grad_out) {
            *gb += *g;
        }
        Ok(gx)
    }

    fn params(&self) -> Vec<&Param<T>> {
        vec![&self.weight, &self.bias]
    }

    fn params_mut(&mut self) -> Vec<&mut Param<T>> {
        vec![&mut self.weight, &mut self.bias]
    }
}

/// `y = W x + b` on tensors.
pub fn dense_forward<T: Real>(layer: &DenseLayer<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
    Ok(Tensor::vector(layer.infer(x.data())?))
}
