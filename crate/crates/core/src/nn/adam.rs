use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::nn::param::Param;
use crate::scalar::Real;

/// Adam with bias-corrected moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
    pub t: u64,
    pub m: Vec<Vec<T>>,
    pub v: Vec<Vec<T>>,
}

impl<T: Real> AdamState<T> {
    /// `beta1 = 0.9`, `beta2 = 0.999`, `epsilon = 1e-8`.
    pub fn new(lr: T) -> Self {
        Self::with_betas(lr, T::lit(0.9), T::lit(0.999), T::lit(1e-8)).expect("valid defaults")
    }

    pub fn with_betas(lr: T, beta1: T, beta2: T, epsilon: T) -> Result<Self> {
        let unit = |b: T| b >= T::zero() && b < T::one();
        if !unit(beta1) || !unit(beta2) {
            return Err(contract("Adam betas must lie in [0, 1)"));
        }
        Ok(Self {
            lr,
            beta1,
            beta2,
            epsilon,
            t: 0,
            m: Vec::new(),
            v: Vec::new(),
        })
    }

    /// One update from the gradients accumulated in `params`.
    pub fn step(&mut self, params: &mut [&mut Param<T>]) -> Result<()> {
        if self.m.is_empty() {
            self.m = params.iter().map(|p| vec![T::zero(); p.len()]).collect();
            self.v = self.m.clone();
        }
        if self.m.len() != params.len()
            || self.m.iter().zip(params.iter()).any(|(m, p)| m.len() != p.len())
        {
            return Err(contract("Adam state does not match the parameter set"));
        }
        self.t += 1;
        let t = self.t as i32;
        let c1 = T::one() - self.beta1.powi(t);
        let c2 = T::one() - self.beta2.powi(t);
        for (k, p) in params.iter_mut().enumerate() {
            let (m, v) = (&mut self.m[k], &mut self.v[k]);
            let Param { value, grad } = &mut **p;
            for ((w, g), (mi, vi)) in value
                .data_mut()
                .iter_mut()
                .zip(grad.data())
                .zip(m.iter_mut().zip(v.iter_mut()))
            {
                *mi = self.beta1 * *mi + (T::one() - self.beta1) * *g;
                *vi = self.beta2 * *vi + (T::one() - self.beta2) * *g * *g;
                let mhat = *mi / c1;
                let vhat = *vi / c2;
                *w -= self.lr * mhat / (vhat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

/// Multiplies the learning rate by `factor` once, at the start of epoch
/// `at_epoch` (0-based), i.e. after `at_epoch` full epochs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDecay {
    pub at_epoch: usize,
    pub factor: f64,
}

impl StepDecay {
    pub fn new(at_epoch: usize, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(contract("learning-rate decay factor must be > 0"));
        }
        Ok(Self { at_epoch, factor })
    }

    /// Returns true when the decay fired.
    pub fn apply<T: Real>(&self, state: &mut AdamState<T>, epoch: usize) -> bool {
        if epoch == self.at_epoch {
            state.lr *= T::lit(self.factor);
            true
        } else {
            false
        }
    }
}

/// Functional form of [`StepDecay::apply`].
pub fn lr_decay<T: Real>(schedule: &StepDecay, mut state: AdamState<T>, epoch: usize) -> AdamState<T> {
    schedule.apply(&mut state, epoch);
    state
}
