use crate::error::{contract, Error, Result};
use crate::nn::param::Param;
use crate::nn::tensor::Tensor;
use crate::nn::Layer;
use crate::rng::RandomSource;
use crate::scalar::Real;

/// Valid (unpadded) strided 1-D cross-correlation.
///
/// Input is `in_channels × length`, row-major; output is
/// `out_channels × out_length` with
/// `out_length = (length - kernel_size) / stride + 1`.
#[derive(Debug, Clone)]
pub struct Conv1dLayer<T> {
    in_channels: usize,
    out_channels: usize,
    kernel_size: usize,
    stride: usize,
    /// `out × in × kernel`.
    pub kernels: Param<T>,
    pub bias: Param<T>,
    input: Option<(Vec<T>, usize)>,
}

pub fn output_length(length: usize, kernel_size: usize, stride: usize) -> Option<usize> {
    (length >= kernel_size && kernel_size >= 1 && stride >= 1)
        .then(|| (length - kernel_size) / stride + 1)
}

impl<T: Real> Conv1dLayer<T> {
    pub fn init(
        in_channels: usize,
        out_channels: usize,
        kernel_size: usize,
        stride: usize,
        rng: &mut RandomSource,
    ) -> Result<Self> {
        let mut layer = Self::zeros(in_channels, out_channels, kernel_size, stride)?;
        let fan_in = in_channels * kernel_size;
        layer.kernels = Param::uniform_fan_in(&[out_channels, in_channels, kernel_size], fan_in, rng);
        layer.bias = Param::uniform_fan_in(&[out_channels], fan_in, rng);
        Ok(layer)
    }

    pub fn zeros(in_channels: usize, out_channels: usize, kernel_size: usize, stride: usize) -> Result<Self> {
        if in_channels == 0 || out_channels == 0 || kernel_size == 0 || stride == 0 {
            return Err(contract("conv1d dimensions, kernel size and stride must be ≥ 1"));
        }
        Ok(Self {
            in_channels,
            out_channels,
            kernel_size,
            stride,
            kernels: Param::zeros(&[out_channels, in_channels, kernel_size]),
            bias: Param::zeros(&[out_channels]),
            input: None,
        })
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel_size
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    fn length_of(&self, x: &[T]) -> Result<usize> {
        if x.len() % self.in_channels != 0 {
            return Err(contract(format!(
                "conv1d input of {} values is not a multiple of {} channels",
                x.len(),
                self.in_channels
            )));
        }
        Ok(x.len() / self.in_channels)
    }

    pub fn output_length(&self, length: usize) -> Result<usize> {
        output_length(length, self.kernel_size, self.stride).ok_or_else(|| {
            contract(format!("conv1d length {length} shorter than kernel {}", self.kernel_size))
        })
    }

    pub fn infer(&self, x: &[T]) -> Result<Vec<T>> {
        let len = self.length_of(x)?;
        let out_len = self.output_length(len)?;
        let (cin, k, s) = (self.in_channels, self.kernel_size, self.stride);
        let w = self.kernels.value.data();
        let b = self.bias.value.data();
        let mut y = Vec::with_capacity(self.out_channels * out_len);
        for o in 0..self.out_channels {
            for p in 0..out_len {
                let start = p * s;
                let mut acc = b[o];
                for c in 0..cin {
                    let wk = &w[(o * cin + c) * k..(o * cin + c + 1) * k];
                    let xs = &x[c * len + start..c * len + start + k];
                    acc += wk.iter().zip(xs).map(|(a, v)| *a * *v).sum::<T>();
                }
                y.push(acc);
            }
        }
        Ok(y)
    }
}

impl<T: Real> Layer<T> for Conv1dLayer<T> {
    fn forward(&mut self, x: &[T]) -> Result<Vec<T>> {
        let y = self.infer(x)?;
        let len = x.len() / self.in_channels;
        self.input = Some((x.to_vec(), len));
        Ok(y)
    }

    fn backward(&mut self, grad_out: &[T]) -> Result<Vec<T>> {
        let (x, len) = self
            .input
            .as_ref()
            .ok_or_else(|| Error::Usage("conv1d backward called before forward".into()))?;
        let len = *len;
        let out_len = self.output_length(len)?;
        if grad_out.len() != self.out_channels * out_len {
            return Err(contract("conv1d backward gradient has wrong size"));
        }
        let (cin, k, s) = (self.in_channels, self.kernel_size, self.stride);
        let w = self.kernels.value.data();
        let mut gx = vec![T::zero(); x.len()];
        let gw = self.kernels.grad.data_mut();
        let gb = self.bias.grad.data_mut();
        for o in 0..self.out_channels {
            for p in 0..out_len {
                let g = grad_out[o * out_len + p];
                if g == T::zero() {
                    continue;
                }
                gb[o] += g;
                let start = p * s;
                for c in 0..cin {
                    let base = (o * cin + c) * k;
                    let xo = c * len + start;
                    for t in 0..k {
                        gw[base + t] += g * x[xo + t];
                        gx[xo + t] += g * w[base + t];
                    }
                }
            }
        }
        Ok(gx)
    }

    fn params(&self) -> Vec<&Param<T>> {
        vec![&self.kernels, &self.bias]
    }

    fn params_mut(&mut self) -> Vec<&mut Param<T>> {
        vec![&mut self.kernels, &mut self.bias]
    }
}

/// Convolves a `[in_channels, length]` tensor.
pub fn conv1d_forward<T: Real>(layer: &Conv1dLayer<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
    let (c, len) = x.dims2()?;
    if c != layer.in_channels {
        return Err(contract(format!("conv1d expects {} channels, got {c}", layer.in_channels)));
    }
    let out_len = layer.output_length(len)?;
    Tensor::new(vec![layer.out_channels, out_len], layer.infer(x.data())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::gradcheck;
    use proptest::prelude::*;

    fn shape_of(cin: usize, cout: usize, k: usize, s: usize, len: usize) -> Vec<usize> {
        let l = Conv1dLayer::<f64>::zeros(cin, cout, k, s).unwrap();
        let x = Tensor::zeros(&[cin, len]);
        conv1d_forward(&l, &x).unwrap().shape().to_vec()
    }

    #[test]
    fn imu_branch_shape() {
        assert_eq!(shape_of(6, 9, 100, 20, 400), vec![9, 16]);
    }

    #[test]
    fn dvl_branch_shapes() {
        assert_eq!(shape_of(3, 6, 3, 1, 4), vec![6, 2]);
        assert_eq!(shape_of(3, 6, 2, 2, 4), vec![6, 2]);
    }

    #[test]
    fn too_short_input() {
        let l = Conv1dLayer::<f64>::zeros(1, 1, 5, 1).unwrap();
        assert!(matches!(conv1d_forward(&l, &Tensor::zeros(&[1, 4])), Err(Error::Contract(_))));
    }

    #[test]
    fn no_kernel_flip() {
        let mut l = Conv1dLayer::<f64>::zeros(1, 1, 2, 1).unwrap();
        l.kernels.value.data_mut().copy_from_slice(&[1.0, 10.0]);
        let y = l.infer(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(y, vec![21.0, 32.0]);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = RandomSource::new(8);
        for _ in 0..20 {
            let mut l = Conv1dLayer::<f64>::init(3, 4, 3, 2, &mut rng).unwrap();
            let x: Vec<f64> = (0..3 * 9).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let coeff: Vec<f64> = (0..4 * 4).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let loss = |y: &[f64]| y.iter().zip(&coeff).map(|(a, b)| a * b).sum::<f64>();
            l.forward(&x).unwrap();
            l.zero_grad();
            let gx = l.backward(&coeff).unwrap();
            let gk = l.kernels.grad.data().to_vec();
            let k0 = l.kernels.value.data().to_vec();
            let mut probe = |k: &[f64]| {
                l.kernels.value.data_mut().copy_from_slice(k);
                loss(&l.infer(&x).unwrap())
            };
            let rep = gradcheck::compare(&mut probe, &k0, &gk, gradcheck::STEP);
            assert!(rep.max_rel_error < 1e-6, "{rep:?}");
            probe(&k0);
            let mut probe_x = |xx: &[f64]| loss(&l.infer(xx).unwrap());
            let rep = gradcheck::compare(&mut probe_x, &x, &gx, gradcheck::STEP);
            assert!(rep.max_rel_error < 1e-6, "{rep:?}");
        }
    }

    proptest! {
        #[test]
        fn output_length_formula(len in 1usize..200, k in 1usize..50, s in 1usize..30) {
            prop_assume!(len >= k);
            let l = Conv1dLayer::<f64>::zeros(2, 3, k, s).unwrap();
            let y = conv1d_forward(&l, &Tensor::zeros(&[2, len])).unwrap();
            prop_assert_eq!(y.shape(), &[3, (len - k) / s + 1]);
            // last window fits, the next would not
            let n = (len - k) / s + 1;
            prop_assert!((n - 1) * s + k <= len);
            prop_assert!(n * s + k > len);
        }
    }
}
