//! Shared helpers for the integration and acceptance tests.
#![allow(dead_code)]

use dvlnet::beamsnet::{BeamsNet, BeamsNetVariant, WindowedSample, IMU_CHANNELS, IMU_WINDOW};
use dvlnet::geometry::BodyVelocity;
use dvlnet::nn::gradcheck::{self, GradCheckReport};
use dvlnet::nn::{mse_loss, Activation, ActivationKind, Conv1dLayer, DenseLayer, Layer, Tensor};
use dvlnet::snmnn::{MemoryState, Snmnn, SnmnnTrainConfig, SnmnnVariant};
use dvlnet::RandomSource;

pub const DRAWS: u64 = 20;
pub const GRAD_TOL: f64 = 1e-6;

fn sample(rng: &mut RandomSource) -> WindowedSample<f64> {
    let imu = Tensor::new(
        vec![IMU_CHANNELS, IMU_WINDOW],
        (0..IMU_CHANNELS * IMU_WINDOW).map(|_| rng.uniform_in(-0.3, 0.3)).collect(),
    )
    .unwrap();
    let mut beams = || std::array::from_fn(|_| rng.uniform_in(-1.0, 1.0));
    let past = [beams(), beams(), beams()];
    let current = beams();
    WindowedSample {
        t: 0.0,
        imu_window: Some(imu),
        imu_epoch_mean: std::array::from_fn(|_| rng.uniform_in(-0.3, 0.3)),
        past_beams: past,
        current_beams: current,
        target: BodyVelocity([rng.uniform_in(-2.0, 2.0), rng.uniform_in(-1.0, 1.0), rng.uniform_in(-0.5, 0.5)]),
    }
}

fn flat(net: &BeamsNet<f64>) -> (Vec<f64>, Vec<f64>) {
    let ps = net.params();
    (
        ps.iter().flat_map(|p| p.value.data().to_vec()).collect(),
        ps.iter().flat_map(|p| p.grad.data().to_vec()).collect(),
    )
}

fn load(net: &mut BeamsNet<f64>, theta: &[f64]) {
    let mut at = 0;
    for p in net.params_mut() {
        let n = p.len();
        p.value.data_mut().copy_from_slice(&theta[at..at + n]);
        at += n;
    }
}

pub fn beamsnet_check(variant: BeamsNetVariant, seed: u64) -> GradCheckReport {
    let mut rng = RandomSource::new(seed);
    let mut net = BeamsNet::<f64>::init(variant, &mut rng);
    let s = sample(&mut rng);
    let y = net.forward(&s).unwrap();
    let (_, g) = mse_loss(&y.0, &s.target.0).unwrap();
    net.zero_grad();
    let gin = net.backward(&[g[0], g[1], g[2]]).unwrap();
    let (theta, analytic) = flat(&net);
    let mut probe = |th: &[f64]| {
        load(&mut net, th);
        mse_loss(&net.predict(&s).unwrap().0, &s.target.0).unwrap().0
    };
    let mut rep = gradcheck::compare(&mut probe, &theta, &analytic, gradcheck::STEP);
    probe(&theta);

    // input gradients: past and current beams
    let x0: Vec<f64> = s.past_beams.iter().flatten().chain(&s.current_beams).copied().collect();
    let gx: Vec<f64> = gin.past_beams.iter().flatten().chain(&gin.current_beams).copied().collect();
    let mut probe_x = |x: &[f64]| {
        let mut t = s.clone();
        for e in 0..3 {
            t.past_beams[e].copy_from_slice(&x[e * 4..e * 4 + 4]);
        }
        t.current_beams.copy_from_slice(&x[12..16]);
        mse_loss(&net.predict(&t).unwrap().0, &s.target.0).unwrap().0
    };
    let r = gradcheck::compare(&mut probe_x, &x0, &gx, gradcheck::STEP);
    rep.max_rel_error = rep.max_rel_error.max(r.max_rel_error);
    rep.checked += r.checked;
    match variant {
        BeamsNetVariant::V2 => assert!(gin.imu_window.is_none()),
        BeamsNetVariant::V1 => {
            let gimu = gin.imu_window.unwrap();
            let w0 = s.imu_window.clone().unwrap();
            let mut probe_imu = |w: &[f64]| {
                let mut t = s.clone();
                t.imu_window.as_mut().unwrap().data_mut().copy_from_slice(w);
                mse_loss(&net.predict(&t).unwrap().0, &s.target.0).unwrap().0
            };
            // a strided subset keeps the check fast
            let r = gradcheck::compare_indices(&mut probe_imu, w0.data(), &gimu, gradcheck::STEP, (0..w0.len()).step_by(7));
            rep.max_rel_error = rep.max_rel_error.max(r.max_rel_error);
            rep.checked += r.checked;
        }
    }
    rep
}

pub fn snmnn_check(variant: SnmnnVariant, depth: usize, seed: u64) -> GradCheckReport {
    let mut rng = RandomSource::new(seed);
    let cfg = SnmnnTrainConfig::paper(variant, seed);
    let mut net = Snmnn::<f64>::init(variant, cfg.spectral().unwrap(), &mut rng).unwrap();
    // spread memory coefficients so their gradients are exercised off 0.5
    for a in net.alpha_in.value.data_mut().iter_mut().chain(net.alpha_hidden.value.data_mut()) {
        *a = rng.uniform_in(0.05, 0.95);
    }
    let n_in = variant.input_dim();
    let n_h = variant.hidden_dim();
    let mut rnd = |n: usize, s: f64| -> Vec<f64> { (0..n).map(|_| rng.uniform_in(-s, s)).collect() };
    let start = MemoryState {
        input_prev: rnd(n_in, 1.0),
        input_mem: rnd(n_in, 1.0),
        hidden_prev: rnd(n_h, 0.9),
        hidden_mem: rnd(n_h, 0.9),
    };
    let inputs: Vec<Vec<f64>> = (0..depth).map(|_| rnd(n_in, 1.0)).collect();
    let target = BodyVelocity([0.7, -0.3, 0.2]);
    let window: Vec<&[f64]> = inputs.iter().map(Vec::as_slice).collect();
    net.zero_grad();
    net.accumulate_window(&start, &window, &target).unwrap();
    let theta: Vec<f64> = net.params().iter().flat_map(|p| p.value.data().to_vec()).collect();
    let analytic: Vec<f64> = net.params().iter().flat_map(|p| p.grad.data().to_vec()).collect();
    let mut probe = |th: &[f64]| {
        let mut at = 0;
        for p in net.params_mut() {
            let n = p.len();
            p.value.data_mut().copy_from_slice(&th[at..at + n]);
            at += n;
        }
        let mut state = start.clone();
        let mut y = BodyVelocity([0.0; 3]);
        for x in &inputs {
            let (o, s) = net.step(&state, x).unwrap();
            y = o;
            state = s;
        }
        mse_loss(&y.0, &target.0).unwrap().0
    };
    gradcheck::compare(&mut probe, &theta, &analytic, gradcheck::STEP)
}

fn merge(a: GradCheckReport, b: GradCheckReport) -> GradCheckReport {
    let mut r = if b.max_rel_error > a.max_rel_error { b } else { a };
    r.max_abs_error = a.max_abs_error.max(b.max_abs_error);
    r.checked = a.checked + b.checked;
    r
}

/// Checks parameter and input gradients of a single layer under the loss
/// `<g, layer(x)>` for a random upstream gradient `g`.
pub fn layer_check(layer: &mut dyn Layer<f64>, x: &[f64], rng: &mut RandomSource) -> GradCheckReport {
    let y = layer.forward(x).unwrap();
    let g: Vec<f64> = (0..y.len()).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    layer.zero_grad();
    let gx = layer.backward(&g).unwrap();
    let theta: Vec<f64> = layer.params().iter().flat_map(|p| p.value.data().to_vec()).collect();
    let analytic: Vec<f64> = layer.params().iter().flat_map(|p| p.grad.data().to_vec()).collect();
    let dot = |y: Vec<f64>| y.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
    let mut probe = |th: &[f64]| {
        let mut at = 0;
        for p in layer.params_mut() {
            let n = p.len();
            p.value.data_mut().copy_from_slice(&th[at..at + n]);
            at += n;
        }
        dot(layer.forward(x).unwrap())
    };
    let rep = gradcheck::compare(&mut probe, &theta, &analytic, gradcheck::STEP);
    probe(&theta);
    let mut probe_x = |xx: &[f64]| dot(layer.forward(xx).unwrap());
    merge(rep, gradcheck::compare(&mut probe_x, x, &gx, gradcheck::STEP))
}

/// Dense, each activation, and a strided convolution.
pub fn layers_check(seed: u64) -> Vec<(&'static str, GradCheckReport)> {
    let mut rng = RandomSource::new(seed);
    let v = |n: usize, rng: &mut RandomSource| -> Vec<f64> { (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect() };
    let mut out = Vec::new();
    let mut dense = DenseLayer::<f64>::init(7, 5, &mut rng);
    let x = v(7, &mut rng);
    out.push(("dense", layer_check(&mut dense, &x, &mut rng)));
    for (name, kind) in [
        ("leaky_relu", ActivationKind::LeakyRelu(0.1)),
        ("tanh", ActivationKind::Tanh),
        ("linear", ActivationKind::Linear),
    ] {
        let mut act = Activation::<f64>::new(kind);
        // keep inputs away from the leaky ReLU kink
        let x: Vec<f64> = v(9, &mut rng).into_iter().map(|a| if a.abs() < 0.05 { a + 0.1 } else { a }).collect();
        out.push((name, layer_check(&mut act, &x, &mut rng)));
    }
    let mut conv = Conv1dLayer::<f64>::init(3, 4, 5, 2, &mut rng).unwrap();
    let x = v(3 * 21, &mut rng);
    out.push(("conv1d", layer_check(&mut conv, &x, &mut rng)));
    out
}

/// Largest singular value by dense SVD.
pub fn svd_spectral_norm(w: &Tensor<f64>) -> f64 {
    let (r, c) = w.dims2().unwrap();
    let m = nalgebra::DMatrix::from_row_slice(r, c, w.data());
    m.singular_values().max()
}
