//! Spectrally normalized memory-neuron network.
//!
//! Every input and hidden neuron is paired with a memory neuron holding an
//! exponentially smoothed copy of the neuron's past output:
//!
//! ```text
//! m_j(t) = α_j · z_j(t-1) + (1 - α_j) · m_j(t-1)
//! ```
//!
//! A layer's pre-activation combines the previous layer's outputs and
//! memories, `W_NN · z + W_MN · m + b`. The hidden layer uses `tanh`, the
//! output layer is linear. After every training update all four weight
//! matrices are rescaled to spectral norm `γ^(1/L)` with `L = 2`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::beamsnet::{WindowedSample, IMU_CHANNELS, PAST_EPOCHS};
use crate::error::{contract, Error, Result};
use crate::geometry::{BodyVelocity, BEAM_COUNT};
use crate::nn::spectral::DEFAULT_POWER_ITERATIONS;
use crate::nn::{mse_loss, Param, PowerIteration, SpectralNormConfig, Tensor};
use crate::rng::RandomSource;
use crate::scalar::Real;

pub const OUTPUT_DIM: usize = 3;
pub const ALPHA_MIN: f64 = 1e-4;
pub const ALPHA_MAX: f64 = 1.0 - 1e-4;
/// Number of weight layers sharing the Lipschitz budget.
pub const NORMALIZED_LAYERS: u32 = 2;
/// Time steps averaged per parameter update.
pub const DEFAULT_UPDATE_INTERVAL: usize = 16;
const COLD_START_ITERATIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SnmnnVariant {
    /// Epoch-averaged IMU channels plus current beams (10 inputs).
    V1,
    /// Current beams and three past epochs, oldest first (16 inputs).
    V2,
}

impl SnmnnVariant {
    pub fn input_dim(self) -> usize {
        match self {
            Self::V1 => IMU_CHANNELS + BEAM_COUNT,
            Self::V2 => (PAST_EPOCHS + 1) * BEAM_COUNT,
        }
    }

    pub fn hidden_dim(self) -> usize {
        match self {
            Self::V1 => 50,
            Self::V2 => 60,
        }
    }

    pub fn epochs(self) -> usize {
        match self {
            Self::V1 => 50,
            Self::V2 => 60,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::V1 => "snmnn-v1",
            Self::V2 => "snmnn-v2",
        }
    }

    /// Network input for one epoch.
    pub fn input_from<T: Real>(self, sample: &WindowedSample<T>) -> Vec<T> {
        match self {
            Self::V1 => sample
                .imu_epoch_mean
                .iter()
                .chain(&sample.current_beams)
                .copied()
                .collect(),
            Self::V2 => sample
                .past_beams
                .iter()
                .flatten()
                .chain(&sample.current_beams)
                .copied()
                .collect(),
        }
    }
}

/// Previous outputs and memory values of the input and hidden neurons.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryState<T> {
    pub input_prev: Vec<T>,
    pub input_mem: Vec<T>,
    pub hidden_prev: Vec<T>,
    pub hidden_mem: Vec<T>,
}

impl<T: Real> MemoryState<T> {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        Self {
            input_prev: vec![T::zero(); input_dim],
            input_mem: vec![T::zero(); input_dim],
            hidden_prev: vec![T::zero(); hidden_dim],
            hidden_mem: vec![T::zero(); hidden_dim],
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.input_prev, &self.input_mem, &self.hidden_prev, &self.hidden_mem]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Intermediate values of one step, kept for back-propagation.
struct StepTrace<T> {
    x: Vec<T>,
    input_prev: Vec<T>,
    input_mem_prev: Vec<T>,
    input_mem: Vec<T>,
    hidden_prev: Vec<T>,
    hidden_mem_prev: Vec<T>,
    hidden_mem: Vec<T>,
    hidden: Vec<T>,
    output: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct Snmnn<T> {
    variant: SnmnnVariant,
    /// Input → hidden network weights, `hidden × input`.
    pub w_in: Param<T>,
    /// Input memory → hidden weights, `hidden × input`.
    pub mem_in: Param<T>,
    pub b_hidden: Param<T>,
    /// Hidden → output network weights, `3 × hidden`.
    pub w_out: Param<T>,
    /// Hidden memory → output weights, `3 × hidden`.
    pub mem_out: Param<T>,
    pub b_out: Param<T>,
    pub alpha_in: Param<T>,
    pub alpha_hidden: Param<T>,
    pub spectral: SpectralNormConfig,
    power: [PowerIteration<T>; 4],
}

impl<T: Real> Snmnn<T> {
    /// Uniform `±sqrt(1/fan_in)` weights, all memory coefficients 0.5, then
    /// spectrally normalized.
    pub fn init(variant: SnmnnVariant, spectral: SpectralNormConfig, rng: &mut RandomSource) -> Result<Self> {
        let (n_in, n_h) = (variant.input_dim(), variant.hidden_dim());
        let half = |n| Param::new(Tensor::vector(vec![T::lit(0.5); n]));
        let mut net = Self {
            variant,
            w_in: Param::uniform_fan_in(&[n_h, n_in], n_in, rng),
            mem_in: Param::uniform_fan_in(&[n_h, n_in], n_in, rng),
            b_hidden: Param::uniform_fan_in(&[n_h], n_in, rng),
            w_out: Param::uniform_fan_in(&[OUTPUT_DIM, n_h], n_h, rng),
            mem_out: Param::uniform_fan_in(&[OUTPUT_DIM, n_h], n_h, rng),
            b_out: Param::uniform_fan_in(&[OUTPUT_DIM], n_h, rng),
            alpha_in: half(n_in),
            alpha_hidden: half(n_h),
            spectral,
            power: Default::default(),
        };
        // cold start: converge the singular vectors before the first projection
        let iters = net.spectral.power_iterations;
        net.spectral.power_iterations = iters.max(COLD_START_ITERATIONS);
        net.normalize()?;
        net.spectral.power_iterations = iters;
        Ok(net)
    }

    pub fn variant(&self) -> SnmnnVariant {
        self.variant
    }

    pub fn input_dim(&self) -> usize {
        self.variant.input_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.variant.hidden_dim()
    }

    pub fn reset_state(&self) -> MemoryState<T> {
        MemoryState::zeros(self.input_dim(), self.hidden_dim())
    }

    pub fn params(&self) -> Vec<&Param<T>> {
        vec![
            &self.w_in,
            &self.mem_in,
            &self.b_hidden,
            &self.w_out,
            &self.mem_out,
            &self.b_out,
            &self.alpha_in,
            &self.alpha_hidden,
        ]
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<T>> {
        vec![
            &mut self.w_in,
            &mut self.mem_in,
            &mut self.b_hidden,
            &mut self.w_out,
            &mut self.mem_out,
            &mut self.b_out,
            &mut self.alpha_in,
            &mut self.alpha_hidden,
        ]
    }

    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    /// The normalized matrices in the order `W_NN(in), W_MN(in), W_NN(out),
    /// W_MN(out)`.
    pub fn normalized_weights(&self) -> [&Tensor<T>; 4] {
        [&self.w_in.value, &self.mem_in.value, &self.w_out.value, &self.mem_out.value]
    }

    /// Power-iteration vectors, one per normalized matrix.
    pub fn power_state(&self) -> &[PowerIteration<T>; 4] {
        &self.power
    }

    pub fn set_power_state(&mut self, power: [PowerIteration<T>; 4]) {
        self.power = power;
    }

    /// Rescales all four weight matrices to `γ^(1/L)`.
    pub fn normalize(&mut self) -> Result<()> {
        let target = T::lit(self.spectral.per_layer_target());
        let iters = self.spectral.power_iterations;
        let [p0, p1, p2, p3] = &mut self.power;
        p0.normalize(&mut self.w_in.value, target, iters)?;
        p1.normalize(&mut self.mem_in.value, target, iters)?;
        p2.normalize(&mut self.w_out.value, target, iters)?;
        p3.normalize(&mut self.mem_out.value, target, iters)?;
        Ok(())
    }

    fn check_state(&self, state: &MemoryState<T>) -> Result<()> {
        let (n_in, n_h) = (self.input_dim(), self.hidden_dim());
        if state.input_prev.len() != n_in
            || state.input_mem.len() != n_in
            || state.hidden_prev.len() != n_h
            || state.hidden_mem.len() != n_h
        {
            return Err(contract("memory state does not match network dimensions"));
        }
        Ok(())
    }

    fn step_trace(&self, state: &MemoryState<T>, x: &[T]) -> Result<StepTrace<T>> {
        let (n_in, n_h) = (self.input_dim(), self.hidden_dim());
        if x.len() != n_in {
            return Err(contract(format!("SNMNN expects {n_in} inputs, got {}", x.len())));
        }
        self.check_state(state)?;
        let smooth = |alpha: &[T], prev: &[T], mem: &[T]| -> Vec<T> {
            alpha
                .iter()
                .zip(prev.iter().zip(mem))
                .map(|(a, (z, m))| *a * *z + (T::one() - *a) * *m)
                .collect()
        };
        let input_mem = smooth(self.alpha_in.value.data(), &state.input_prev, &state.input_mem);
        let hidden_mem = smooth(self.alpha_hidden.value.data(), &state.hidden_prev, &state.hidden_mem);

        let w = self.w_in.value.data();
        let f = self.mem_in.value.data();
        let b = self.b_hidden.value.data();
        let hidden: Vec<T> = (0..n_h)
            .map(|i| {
                let r = i * n_in..(i + 1) * n_in;
                let s = b[i]
                    + dot(&w[r.clone()], x)
                    + dot(&f[r], &input_mem);
                s.tanh()
            })
            .collect();

        let w = self.w_out.value.data();
        let f = self.mem_out.value.data();
        let b = self.b_out.value.data();
        let output: Vec<T> = (0..OUTPUT_DIM)
            .map(|i| {
                let r = i * n_h..(i + 1) * n_h;
                b[i] + dot(&w[r.clone()], &hidden) + dot(&f[r], &hidden_mem)
            })
            .collect();

        Ok(StepTrace {
            x: x.to_vec(),
            input_prev: state.input_prev.clone(),
            input_mem_prev: state.input_mem.clone(),
            input_mem,
            hidden_prev: state.hidden_prev.clone(),
            hidden_mem_prev: state.hidden_mem.clone(),
            hidden_mem,
            hidden,
            output,
        })
    }

    /// One time step: returns the velocity and the successor state.
    pub fn step(&self, state: &MemoryState<T>, x: &[T]) -> Result<(BodyVelocity<T>, MemoryState<T>)> {
        let tr = self.step_trace(state, x)?;
        let y = BodyVelocity([tr.output[0], tr.output[1], tr.output[2]]);
        Ok((y, next_state(tr)))
    }

    /// Runs a whole mission from a zeroed memory state.
    pub fn predict_sequence(&self, inputs: &[Vec<T>]) -> Result<Vec<BodyVelocity<T>>> {
        let mut state = self.reset_state();
        let mut out = Vec::with_capacity(inputs.len());
        for x in inputs {
            let (y, s) = self.step(&state, x)?;
            out.push(y);
            state = s;
        }
        Ok(out)
    }

    /// Unrolls `inputs` from `start` (treated as a constant), evaluates the
    /// MSE of the last output against `target`, and accumulates the exact
    /// gradient of that loss into every parameter's `grad`.
    ///
    /// Returns the loss and the state after the last step.
    pub fn accumulate_window(
        &mut self,
        start: &MemoryState<T>,
        inputs: &[&[T]],
        target: &BodyVelocity<T>,
    ) -> Result<(T, MemoryState<T>)> {
        if inputs.is_empty() {
            return Err(contract("empty unroll window"));
        }
        let mut traces: Vec<StepTrace<T>> = Vec::with_capacity(inputs.len());
        let mut state = start.clone();
        for x in inputs {
            let tr = self.step_trace(&state, x)?;
            state = MemoryState {
                input_prev: tr.x.clone(),
                input_mem: tr.input_mem.clone(),
                hidden_prev: tr.hidden.clone(),
                hidden_mem: tr.hidden_mem.clone(),
            };
            traces.push(tr);
        }
        let last = traces.last().expect("non-empty");
        let (loss, g_y) = mse_loss(&last.output, &target.0)?;
        self.backward_through(&traces, &g_y);
        Ok((loss, state))
    }

    fn backward_through(&mut self, traces: &[StepTrace<T>], g_out: &[T]) {
        let (n_in, n_h) = (self.input_dim(), self.hidden_dim());
        // gradients arriving from the following step
        let mut g_hidden_next = vec![T::zero(); n_h];
        let mut g_hmem_next = vec![T::zero(); n_h];
        let mut g_imem_next = vec![T::zero(); n_in];

        let w_out = self.w_out.value.data().to_vec();
        let f_out = self.mem_out.value.data().to_vec();
        let f_in = self.mem_in.value.data().to_vec();
        let a_in = self.alpha_in.value.data().to_vec();
        let a_h = self.alpha_hidden.value.data().to_vec();

        for (k, tr) in traces.iter().enumerate().rev() {
            let g_y: Vec<T> = if k + 1 == traces.len() {
                g_out.to_vec()
            } else {
                vec![T::zero(); OUTPUT_DIM]
            };

            let mut g_h = g_hidden_next.clone();
            let mut g_hmem = g_hmem_next.clone();
            {
                let gw = self.w_out.grad.data_mut();
                for i in 0..OUTPUT_DIM {
                    for j in 0..n_h {
                        gw[i * n_h + j] += g_y[i] * tr.hidden[j];
                        g_h[j] += w_out[i * n_h + j] * g_y[i];
                    }
                }
            }
            {
                let gf = self.mem_out.grad.data_mut();
                for i in 0..OUTPUT_DIM {
                    for j in 0..n_h {
                        gf[i * n_h + j] += g_y[i] * tr.hidden_mem[j];
                        g_hmem[j] += f_out[i * n_h + j] * g_y[i];
                    }
                }
            }
            for (gb, g) in self.b_out.grad.data_mut().iter_mut().zip(&g_y) {
                *gb += *g;
            }

            let g_s: Vec<T> = g_h
                .iter()
                .zip(&tr.hidden)
                .map(|(g, h)| *g * (T::one() - *h * *h))
                .collect();
            let mut g_imem = g_imem_next.clone();
            {
                let gw = self.w_in.grad.data_mut();
                let gf = self.mem_in.grad.data_mut();
                for i in 0..n_h {
                    let gs = g_s[i];
                    for j in 0..n_in {
                        gw[i * n_in + j] += gs * tr.x[j];
                        gf[i * n_in + j] += gs * tr.input_mem[j];
                        g_imem[j] += f_in[i * n_in + j] * gs;
                    }
                }
            }
            for (gb, g) in self.b_hidden.grad.data_mut().iter_mut().zip(&g_s) {
                *gb += *g;
            }

            // memory recurrences of this step
            {
                let ga = self.alpha_in.grad.data_mut();
                for j in 0..n_in {
                    ga[j] += g_imem[j] * (tr.input_prev[j] - tr.input_mem_prev[j]);
                    g_imem_next[j] = g_imem[j] * (T::one() - a_in[j]);
                }
            }
            {
                let ga = self.alpha_hidden.grad.data_mut();
                for j in 0..n_h {
                    ga[j] += g_hmem[j] * (tr.hidden_prev[j] - tr.hidden_mem_prev[j]);
                    g_hidden_next[j] = g_hmem[j] * a_h[j];
                    g_hmem_next[j] = g_hmem[j] * (T::one() - a_h[j]);
                }
            }
        }
    }

    pub fn zero_grad(&mut self) {
        self.params_mut().into_iter().for_each(Param::zero_grad);
    }

    /// Plain gradient step with separate rates for weights and memory
    /// coefficients, then clamps the coefficients.
    fn sgd_update(&mut self, lr: T, alpha_lr: T) {
        for p in [
            &mut self.w_in,
            &mut self.mem_in,
            &mut self.b_hidden,
            &mut self.w_out,
            &mut self.mem_out,
            &mut self.b_out,
        ] {
            let Param { value, grad } = p;
            for (w, g) in value.data_mut().iter_mut().zip(grad.data()) {
                *w -= lr * *g;
            }
        }
        let (lo, hi) = (T::lit(ALPHA_MIN), T::lit(ALPHA_MAX));
        for p in [&mut self.alpha_in, &mut self.alpha_hidden] {
            let Param { value, grad } = p;
            for (a, g) in value.data_mut().iter_mut().zip(grad.data()) {
                *a = (*a - alpha_lr * *g).max(lo).min(hi);
            }
        }
    }
}

fn next_state<T>(tr: StepTrace<T>) -> MemoryState<T> {
    MemoryState {
        input_prev: tr.x,
        input_mem: tr.input_mem,
        hidden_prev: tr.hidden,
        hidden_mem: tr.hidden_mem,
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// One step of the network; see [`Snmnn::step`].
pub fn mnn_step<T: Real>(
    params: &Snmnn<T>,
    state: &MemoryState<T>,
    x: &[T],
) -> Result<(BodyVelocity<T>, MemoryState<T>)> {
    params.step(state, x)
}

/// Runs a mission with memory reset at its start.
pub fn snmnn_predict<T: Real>(params: &Snmnn<T>, inputs: &[Vec<T>]) -> Result<Vec<BodyVelocity<T>>> {
    params.predict_sequence(inputs)
}

/// A time-ordered mission stream for the memory network.
#[derive(Debug, Clone, PartialEq)]
pub struct SnmnnSequence<T> {
    pub mission_id: u64,
    pub times: Vec<f64>,
    pub inputs: Vec<Vec<T>>,
    pub targets: Vec<BodyVelocity<T>>,
}

impl<T: Real> SnmnnSequence<T> {
    pub fn from_windows(mission_id: u64, variant: SnmnnVariant, samples: &[WindowedSample<T>]) -> Self {
        Self {
            mission_id,
            times: samples.iter().map(|s| s.t).collect(),
            inputs: samples.iter().map(|s| variant.input_from(s)).collect(),
            targets: samples.iter().map(|s| s.target).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    fn check_ordered(&self) -> Result<()> {
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Data(format!(
                "mission {} timestamps are not strictly increasing",
                self.mission_id
            )));
        }
        if self.times.len() != self.inputs.len() || self.inputs.len() != self.targets.len() {
            return Err(Error::Data(format!("mission {} sequence lengths differ", self.mission_id)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnmnnTrainConfig {
    pub epochs: usize,
    /// Rate for weights and biases.
    pub lr: f64,
    /// Rate for memory coefficients.
    pub alpha_lr: f64,
    /// Steps unrolled per gradient evaluation.
    pub truncation: usize,
    /// Time steps whose gradients are averaged into one update; the last
    /// chunk of a sequence may be shorter.
    pub update_interval: usize,
    pub gamma: f64,
    pub power_iterations: usize,
    pub seed: u64,
}

impl SnmnnTrainConfig {
    /// 0.006 / 0.092 learning rates; 50 (V1) or 60 (V2) epochs; γ = 1.
    pub fn paper(variant: SnmnnVariant, seed: u64) -> Self {
        Self {
            epochs: variant.epochs(),
            lr: 0.006,
            alpha_lr: 0.092,
            truncation: 1,
            update_interval: DEFAULT_UPDATE_INTERVAL,
            gamma: 1.0,
            power_iterations: DEFAULT_POWER_ITERATIONS,
            seed,
        }
    }

    pub fn spectral(&self) -> Result<SpectralNormConfig> {
        SpectralNormConfig::new(self.gamma, NORMALIZED_LAYERS, self.power_iterations)
    }
}

pub use crate::beamsnet::EpochLog;

#[derive(Debug, Clone)]
pub struct SnmnnTrainer<T> {
    pub net: Snmnn<T>,
    pub config: SnmnnTrainConfig,
    pub epoch: usize,
}

impl<T: Real> SnmnnTrainer<T> {
    pub fn new(variant: SnmnnVariant, config: SnmnnTrainConfig) -> Result<Self> {
        if config.truncation == 0 {
            return Err(Error::Config("truncation depth must be ≥ 1".into()));
        }
        if config.update_interval == 0 {
            return Err(Error::Config("update interval must be ≥ 1".into()));
        }
        let net = Snmnn::init(variant, config.spectral()?, &mut RandomSource::new(config.seed))?;
        Ok(Self { net, config, epoch: 0 })
    }

    /// One pass over all sequences (mission order reshuffled per epoch,
    /// time order kept). Gradients of `update_interval` consecutive steps
    /// are averaged into one update. `observer` sees the network after
    /// every update.
    pub fn run_epoch(
        &mut self,
        sequences: &[SnmnnSequence<T>],
        observer: &mut dyn FnMut(&Snmnn<T>),
    ) -> Result<EpochLog> {
        let total_steps: usize = sequences.iter().map(|s| s.len()).sum();
        if total_steps == 0 {
            return Err(Error::EmptyDataset);
        }
        for s in sequences {
            s.check_ordered()?;
        }
        let epoch = self.epoch;
        let lr = T::lit(self.config.lr);
        let alpha_lr = T::lit(self.config.alpha_lr);
        let depth = self.config.truncation;
        let interval = self.config.update_interval;

        let mut order: Vec<usize> = (0..sequences.len()).collect();
        RandomSource::with_stream(self.config.seed, 1 + epoch as u64).shuffle(&mut order);

        let mut total = 0.0;
        let mut samples = 0;
        let mut updates = 0;
        for &si in &order {
            let seq = &sequences[si];
            let mut state = self.net.reset_state();
            // (state before step, input) for the last `depth` steps
            let mut history: VecDeque<(MemoryState<T>, usize)> = VecDeque::with_capacity(depth + 1);
            for t in 0..seq.len() {
                history.push_back((state.clone(), t));
                if history.len() > depth {
                    history.pop_front();
                }
                let start = &history.front().expect("non-empty").0;
                let window: Vec<&[T]> = history.iter().map(|(_, k)| seq.inputs[*k].as_slice()).collect();
                if t % interval == 0 {
                    self.net.zero_grad();
                }
                let start = start.clone();
                let (loss, next) = self.net.accumulate_window(&start, &window, &seq.targets[t])?;
                let loss = loss.as_f64();
                if !loss.is_finite() {
                    return Err(Error::Divergence { epoch });
                }
                total += loss;
                samples += 1;
                let chunk = t % interval + 1;
                if chunk == interval || t + 1 == seq.len() {
                    let scale = T::lit(1.0 / chunk as f64);
                    self.net.sgd_update(lr * scale, alpha_lr * scale);
                    self.net.normalize()?;
                    observer(&self.net);
                    updates += 1;
                }
                state = next;
            }
        }
        if self.net.params().iter().any(|p| !p.value.is_finite()) {
            return Err(Error::Divergence { epoch });
        }
        self.epoch += 1;
        Ok(EpochLog {
            epoch,
            lr: self.config.lr,
            loss: total / samples as f64,
            steps: updates,
        })
    }

    pub fn run(
        &mut self,
        sequences: &[SnmnnSequence<T>],
        observer: &mut dyn FnMut(&Snmnn<T>),
    ) -> Result<Vec<EpochLog>> {
        let mut log = Vec::new();
        while self.epoch < self.config.epochs {
            log.push(self.run_epoch(sequences, observer)?);
        }
        Ok(log)
    }
}

/// Trains a fresh network on time-ordered mission sequences.
pub fn snmnn_train<T: Real>(
    variant: SnmnnVariant,
    sequences: &[SnmnnSequence<T>],
    config: &SnmnnTrainConfig,
) -> Result<(SnmnnTrainer<T>, Vec<EpochLog>)> {
    let mut trainer = SnmnnTrainer::new(variant, config.clone())?;
    let log = trainer.run(sequences, &mut |_| {})?;
    Ok((trainer, log))
}
