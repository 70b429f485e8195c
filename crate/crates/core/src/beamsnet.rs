//! Spatial regressors over windows of past DVL epochs (and IMU samples).
//!
//! Both variants share the same tail: two leaky-ReLU fully connected
//! layers reduce the merged convolutional features to 4 values, which are
//! joined with the per-beam mean of the past epochs and the current beams
//! before a final linear layer produces the body velocity.
//!
//! V1 adds an IMU branch: a 6→9 channel convolution with kernel 100 and
//! stride 20 over a 400-sample window, giving 9 × 16 = 144 features. The DVL
//! branch treats the three past epochs as channels over the four beam
//! positions.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::geometry::{BodyVelocity, BEAM_COUNT};
use crate::nn::conv1d::output_length;
use crate::nn::{
    concat, mse_loss, split, Activation, ActivationKind, AdamState, Conv1dLayer, DenseLayer,
    Layer, Param, StepDecay, Tensor,
};
use crate::rng::RandomSource;
use crate::scalar::Real;

pub const IMU_CHANNELS: usize = 6;
/// IMU samples per window (4 s at 100 Hz).
pub const IMU_WINDOW: usize = 400;
pub const PAST_EPOCHS: usize = 3;
pub const LEAKY_SLOPE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BeamsNetVariant {
    /// IMU window plus past DVL epochs.
    V1,
    /// Past DVL epochs only.
    V2,
}

struct Shape {
    dvl_kernel: usize,
    dvl_stride: usize,
}

impl BeamsNetVariant {
    fn shape(self) -> Shape {
        match self {
            Self::V1 => Shape { dvl_kernel: 3, dvl_stride: 1 },
            Self::V2 => Shape { dvl_kernel: 2, dvl_stride: 2 },
        }
    }

    pub fn uses_imu(self) -> bool {
        matches!(self, Self::V1)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::V1 => "beamsnet-v1",
            Self::V2 => "beamsnet-v2",
        }
    }
}

/// One training/evaluation example for the windowed models.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedSample<T> {
    /// Time of the current DVL epoch.
    pub t: f64,
    /// `6 × 400` channel-major IMU window ending at `t`, if built.
    pub imu_window: Option<Tensor<T>>,
    /// Mean of the IMU samples over the last DVL period.
    pub imu_epoch_mean: [T; IMU_CHANNELS],
    /// The three preceding epochs' beams, oldest first.
    pub past_beams: [[T; BEAM_COUNT]; PAST_EPOCHS],
    pub current_beams: [T; BEAM_COUNT],
    pub target: BodyVelocity<T>,
}

impl<T: Real> WindowedSample<T> {
    /// Per-beam mean of the past epochs.
    pub fn past_mean(&self) -> [T; BEAM_COUNT] {
        let n = T::lit(PAST_EPOCHS as f64);
        std::array::from_fn(|b| self.past_beams.iter().map(|e| e[b]).sum::<T>() / n)
    }

    fn past_flat(&self) -> Vec<T> {
        self.past_beams.iter().flatten().copied().collect()
    }
}

/// Gradient of a scalar loss with respect to one sample's inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct InputGradient<T> {
    pub imu_window: Option<Vec<T>>,
    pub past_beams: [[T; BEAM_COUNT]; PAST_EPOCHS],
    pub current_beams: [T; BEAM_COUNT],
}

#[derive(Debug, Clone)]
pub struct BeamsNet<T> {
    variant: BeamsNetVariant,
    pub imu_conv: Option<Conv1dLayer<T>>,
    pub dvl_conv: Conv1dLayer<T>,
    pub fc1: DenseLayer<T>,
    pub fc2: DenseLayer<T>,
    pub fc3: DenseLayer<T>,
    imu_act: Activation<T>,
    dvl_act: Activation<T>,
    act1: Activation<T>,
    act2: Activation<T>,
}

impl<T: Real> BeamsNet<T> {
    pub fn init(variant: BeamsNetVariant, rng: &mut RandomSource) -> Self {
        let shape = variant.shape();
        let imu_conv = variant
            .uses_imu()
            .then(|| Conv1dLayer::init(IMU_CHANNELS, 9, 100, 20, rng).expect("static shape"));
        let dvl_conv =
            Conv1dLayer::init(PAST_EPOCHS, 6, shape.dvl_kernel, shape.dvl_stride, rng).expect("static shape");
        let merged = Self::merged_dim(variant);
        Self {
            variant,
            imu_conv,
            dvl_conv,
            fc1: DenseLayer::init(merged, 16, rng),
            fc2: DenseLayer::init(16, 4, rng),
            fc3: DenseLayer::init(4 + 2 * BEAM_COUNT, 3, rng),
            imu_act: Activation::new(ActivationKind::LeakyRelu(LEAKY_SLOPE)),
            dvl_act: Activation::new(ActivationKind::LeakyRelu(LEAKY_SLOPE)),
            act1: Activation::new(ActivationKind::LeakyRelu(LEAKY_SLOPE)),
            act2: Activation::new(ActivationKind::LeakyRelu(LEAKY_SLOPE)),
        }
    }

    /// Same architecture with every weight and bias zero.
    pub fn zeros(variant: BeamsNetVariant) -> Self {
        let mut net = Self::init(variant, &mut RandomSource::new(0));
        for p in net.params_mut() {
            p.value.fill(T::zero());
        }
        net
    }

    pub fn variant(&self) -> BeamsNetVariant {
        self.variant
    }

    /// Length of the merged feature vector entering `fc1`, derived from the
    /// convolution shape arithmetic.
    pub fn merged_dim(variant: BeamsNetVariant) -> usize {
        let shape = variant.shape();
        let dvl = 6 * output_length(BEAM_COUNT, shape.dvl_kernel, shape.dvl_stride).expect("fits");
        let imu = if variant.uses_imu() {
            9 * output_length(IMU_WINDOW, 100, 20).expect("fits")
        } else {
            0
        };
        imu + dvl
    }

    pub fn params(&self) -> Vec<&Param<T>> {
        let mut ps = Vec::new();
        if let Some(c) = &self.imu_conv {
            ps.extend(c.params());
        }
        ps.extend(self.dvl_conv.params());
        ps.extend(self.fc1.params());
        ps.extend(self.fc2.params());
        ps.extend(self.fc3.params());
        ps
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<T>> {
        let mut ps = Vec::new();
        if let Some(c) = &mut self.imu_conv {
            ps.extend(c.params_mut());
        }
        ps.extend(self.dvl_conv.params_mut());
        ps.extend(self.fc1.params_mut());
        ps.extend(self.fc2.params_mut());
        ps.extend(self.fc3.params_mut());
        ps
    }

    pub fn zero_grad(&mut self) {
        self.params_mut().into_iter().for_each(Param::zero_grad);
    }

    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    fn imu_input<'a>(&self, sample: &'a WindowedSample<T>) -> Result<Option<&'a Tensor<T>>> {
        if !self.variant.uses_imu() {
            return Ok(None);
        }
        let w = sample
            .imu_window
            .as_ref()
            .ok_or_else(|| contract("BeamsNet V1 sample lacks an IMU window"))?;
        if w.shape() != [IMU_CHANNELS, IMU_WINDOW] {
            return Err(contract(format!("IMU window shape {:?}, expected [6, 400]", w.shape())));
        }
        Ok(Some(w))
    }

    /// Adds the raw past-beam block back onto the DVL convolution output.
    /// Both are 12 values; the residual keeps the raw beam information in
    /// the merged features.
    fn residual_merge(conv_out: &mut [T], past_flat: &[T]) {
        debug_assert_eq!(conv_out.len(), past_flat.len());
        for (c, p) in conv_out.iter_mut().zip(past_flat) {
            *c += *p;
        }
    }

    /// Branch features before concatenation: `(imu, dvl)`; `imu` is empty
    /// for V2.
    pub fn branch_features(&self, sample: &WindowedSample<T>) -> Result<(Vec<T>, Vec<T>)> {
        let act = ActivationKind::LeakyRelu(LEAKY_SLOPE);
        let imu = match (self.imu_input(sample)?, &self.imu_conv) {
            (Some(w), Some(conv)) => conv.infer(w.data())?.into_iter().map(|v| act.apply(v)).collect(),
            _ => Vec::new(),
        };
        let past = sample.past_flat();
        let mut dvl: Vec<T> = self.dvl_conv.infer(&past)?.into_iter().map(|v| act.apply(v)).collect();
        Self::residual_merge(&mut dvl, &past);
        Ok((imu, dvl))
    }

    /// Pure inference.
    pub fn predict(&self, sample: &WindowedSample<T>) -> Result<BodyVelocity<T>> {
        let act = ActivationKind::LeakyRelu(LEAKY_SLOPE);
        let (imu, dvl) = self.branch_features(sample)?;
        let merged = concat(&[&imu, &dvl]);
        let h1: Vec<T> = self.fc1.infer(&merged)?.into_iter().map(|v| act.apply(v)).collect();
        let h2: Vec<T> = self.fc2.infer(&h1)?.into_iter().map(|v| act.apply(v)).collect();
        let head = concat(&[&h2, &sample.past_mean(), &sample.current_beams]);
        let y = self.fc3.infer(&head)?;
        Ok(BodyVelocity([y[0], y[1], y[2]]))
    }

    /// Forward pass caching activations for [`BeamsNet::backward`].
    pub fn forward(&mut self, sample: &WindowedSample<T>) -> Result<BodyVelocity<T>> {
        let imu = match self.imu_input(sample)? {
            Some(w) => {
                let conv = self.imu_conv.as_mut().expect("V1 has an IMU branch");
                let z = conv.forward(w.data())?;
                self.imu_act.forward(&z)?
            }
            None => Vec::new(),
        };
        let past = sample.past_flat();
        let z = self.dvl_conv.forward(&past)?;
        let mut dvl = self.dvl_act.forward(&z)?;
        Self::residual_merge(&mut dvl, &past);
        let merged = concat(&[&imu, &dvl]);
        let z1 = self.fc1.forward(&merged)?;
        let h1 = self.act1.forward(&z1)?;
        let z2 = self.fc2.forward(&h1)?;
        let h2 = self.act2.forward(&z2)?;
        let head = concat(&[&h2, &sample.past_mean(), &sample.current_beams]);
        let y = self.fc3.forward(&head)?;
        Ok(BodyVelocity([y[0], y[1], y[2]]))
    }

    /// Back-propagates `grad_out` (gradient w.r.t. the 3 outputs) through the
    /// last forward pass, accumulating parameter gradients.
    pub fn backward(&mut self, grad_out: &[T; 3]) -> Result<InputGradient<T>> {
        let g_head = self.fc3.backward(grad_out)?;
        let parts = split(&g_head, &[4, BEAM_COUNT, BEAM_COUNT]);
        let g_h2 = &parts[0];
        let g_mean = &parts[1];
        let g_current = &parts[2];

        let g = self.act2.backward(g_h2)?;
        let g = self.fc2.backward(&g)?;
        let g = self.act1.backward(&g)?;
        let g_merged = self.fc1.backward(&g)?;

        let imu_len = g_merged.len() - 12;
        let (g_imu, g_dvl) = g_merged.split_at(imu_len);

        let imu_grad = match &mut self.imu_conv {
            Some(conv) => {
                let g = self.imu_act.backward(g_imu)?;
                Some(conv.backward(&g)?)
            }
            None => None,
        };

        // residual: gradient reaches the raw past beams directly and through
        // the convolution
        let g_conv = self.dvl_act.backward(g_dvl)?;
        let g_past_conv = self.dvl_conv.backward(&g_conv)?;
        let third = T::lit(1.0 / PAST_EPOCHS as f64);
        let past_beams = std::array::from_fn(|e| {
            std::array::from_fn(|b| {
                let k = e * BEAM_COUNT + b;
                g_dvl[k] + g_past_conv[k] + g_mean[b] * third
            })
        });
        Ok(InputGradient {
            imu_window: imu_grad,
            past_beams,
            current_beams: std::array::from_fn(|b| g_current[b]),
        })
    }
}

pub fn forward_v1<T: Real>(params: &BeamsNet<T>, sample: &WindowedSample<T>) -> Result<BodyVelocity<T>> {
    if params.variant() != BeamsNetVariant::V1 {
        return Err(contract("forward_v1 called with V2 parameters"));
    }
    params.predict(sample)
}

pub fn forward_v2<T: Real>(params: &BeamsNet<T>, sample: &WindowedSample<T>) -> Result<BodyVelocity<T>> {
    if params.variant() != BeamsNetVariant::V2 {
        return Err(contract("forward_v2 called with V1 parameters"));
    }
    params.predict(sample)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamsNetTrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub decay: Option<StepDecay>,
    pub seed: u64,
}

impl BeamsNetTrainConfig {
    /// Published schedule: Adam at 0.01, batch 256; V1 runs 250 epochs with
    /// a ×0.1 decay after 210, V2 runs 300 epochs with the decay after 255.
    pub fn paper(variant: BeamsNetVariant, seed: u64) -> Self {
        let (epochs, at_epoch) = match variant {
            BeamsNetVariant::V1 => (250, 210),
            BeamsNetVariant::V2 => (300, 255),
        };
        Self {
            epochs,
            lr: 0.01,
            batch_size: 256,
            decay: Some(StepDecay { at_epoch, factor: 0.1 }),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub lr: f64,
    pub loss: f64,
    pub steps: usize,
}

/// Network, optimizer and epoch counter; resumable.
#[derive(Debug, Clone)]
pub struct BeamsNetTrainer<T> {
    pub net: BeamsNet<T>,
    pub adam: AdamState<T>,
    pub config: BeamsNetTrainConfig,
    /// Number of completed epochs.
    pub epoch: usize,
}

impl<T: Real> BeamsNetTrainer<T> {
    pub fn new(variant: BeamsNetVariant, config: BeamsNetTrainConfig) -> Result<Self> {
        if config.batch_size == 0 {
            return Err(Error::Config("batch size must be ≥ 1".into()));
        }
        let mut rng = RandomSource::new(config.seed);
        Ok(Self {
            net: BeamsNet::init(variant, &mut rng),
            adam: AdamState::new(T::lit(config.lr)),
            config,
            epoch: 0,
        })
    }

    /// Runs one epoch over `samples`; the shuffle order depends only on the
    /// seed and epoch index so resumed runs match uninterrupted ones.
    pub fn run_epoch(&mut self, samples: &[WindowedSample<T>]) -> Result<EpochLog> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let epoch = self.epoch;
        if let Some(decay) = &self.config.decay {
            decay.apply(&mut self.adam, epoch);
        }
        let mut order: Vec<usize> = (0..samples.len()).collect();
        RandomSource::with_stream(self.config.seed, 1 + epoch as u64).shuffle(&mut order);

        let mut total = 0.0;
        let mut steps = 0;
        for batch in order.chunks(self.config.batch_size) {
            self.net.zero_grad();
            let scale = T::lit(1.0 / batch.len() as f64);
            for &i in batch {
                let s = &samples[i];
                let y = self.net.forward(s)?;
                let (loss, g) = mse_loss(&y.0, &s.target.0)?;
                let loss = loss.as_f64();
                if !loss.is_finite() {
                    return Err(Error::Divergence { epoch });
                }
                total += loss;
                self.net.backward(&[g[0] * scale, g[1] * scale, g[2] * scale])?;
            }
            self.adam.step(&mut self.net.params_mut())?;
            steps += 1;
        }
        if self.net.params().iter().any(|p| !p.value.is_finite()) {
            return Err(Error::Divergence { epoch });
        }
        self.epoch += 1;
        Ok(EpochLog {
            epoch,
            lr: self.adam.lr.as_f64(),
            loss: total / samples.len() as f64,
            steps,
        })
    }

    /// Trains until `config.epochs` epochs are complete.
    pub fn run(&mut self, samples: &[WindowedSample<T>]) -> Result<Vec<EpochLog>> {
        let mut log = Vec::new();
        while self.epoch < self.config.epochs {
            log.push(self.run_epoch(samples)?);
        }
        Ok(log)
    }
}

/// Trains a fresh network; returns it with its per-epoch log.
pub fn train_beamsnet<T: Real>(
    variant: BeamsNetVariant,
    samples: &[WindowedSample<T>],
    config: &BeamsNetTrainConfig,
) -> Result<(BeamsNetTrainer<T>, Vec<EpochLog>)> {
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut trainer = BeamsNetTrainer::new(variant, config.clone())?;
    let log = trainer.run(samples)?;
    Ok((trainer, log))
}
