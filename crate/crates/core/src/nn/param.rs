use crate::nn::tensor::Tensor;
use crate::rng::RandomSource;
use crate::scalar::Real;

/// A trainable tensor with its accumulated gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Param<T> {
    pub value: Tensor<T>,
    pub grad: Tensor<T>,
}

impl<T: Real> Param<T> {
    pub fn new(value: Tensor<T>) -> Self {
        let grad = Tensor::zeros(value.shape());
        Self { value, grad }
    }

    pub fn zeros(shape: &[usize]) -> Self {
        Self::new(Tensor::zeros(shape))
    }

    /// Uniform in `±sqrt(1 / fan_in)`.
    pub fn uniform_fan_in(shape: &[usize], fan_in: usize, rng: &mut RandomSource) -> Self {
        let bound = (1.0 / fan_in as f64).sqrt();
        let n = shape.iter().product();
        let data = (0..n).map(|_| T::lit(rng.uniform_in(-bound, bound))).collect();
        Self::new(Tensor::new(shape.to_vec(), data).expect("sized from shape"))
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(T::zero());
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }
}
