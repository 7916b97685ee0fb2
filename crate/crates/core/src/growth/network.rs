//! Two-hidden-layer ReLU regressor: forward pass, backpropagation and Adam training.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::{GrowthSample, NormalizationRanges, FEATURE_COUNT};
use super::model::{GrowthModel, Hyperparameters};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Offsets of each weight block inside the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub h1: usize,
    pub h2: usize,
}

impl Layout {
    pub fn new(hidden: [usize; 2]) -> Self {
        Self { h1: hidden[0], h2: hidden[1] }
    }

    fn w1(&self) -> usize {
        0
    }
    fn b1(&self) -> usize {
        self.h1 * FEATURE_COUNT
    }
    fn w2(&self) -> usize {
        self.b1() + self.h1
    }
    fn b2(&self) -> usize {
        self.w2() + self.h2 * self.h1
    }
    fn w3(&self) -> usize {
        self.b2() + self.h2
    }
    fn b3(&self) -> usize {
        self.w3() + self.h2
    }

    pub fn param_count(&self) -> usize {
        self.b3() + 1
    }

    pub fn forward<T: Scalar>(&self, params: &[T], x: &[T; FEATURE_COUNT]) -> T {
        let mut ws = Workspace::new(*self);
        self.forward_into(params, x, None, &mut ws)
    }

    /// Forward pass that keeps pre-activations in `ws` for backprop. `masks` holds the
    /// already-scaled inverted-dropout multipliers of both hidden layers.
    fn forward_into<T: Scalar>(
        &self,
        params: &[T],
        x: &[T; FEATURE_COUNT],
        masks: Option<(&[T], &[T])>,
        ws: &mut Workspace<T>,
    ) -> T {
        let (h1, h2) = (self.h1, self.h2);
        let w1 = &params[self.w1()..self.b1()];
        let b1 = &params[self.b1()..self.w2()];
        let w2 = &params[self.w2()..self.b2()];
        let b2 = &params[self.b2()..self.w3()];
        let w3 = &params[self.w3()..self.b3()];
        let b3 = params[self.b3()];

        for i in 0..h1 {
            let row = &w1[i * FEATURE_COUNT..(i + 1) * FEATURE_COUNT];
            let z = row.iter().zip(x).map(|(&w, &xi)| w * xi).sum::<T>() + b1[i];
            ws.z1[i] = z;
            let m = masks.map_or(T::one(), |(m1, _)| m1[i]);
            ws.a1[i] = z.max(T::zero()) * m;
        }
        for i in 0..h2 {
            let row = &w2[i * h1..(i + 1) * h1];
            let z = row.iter().zip(&ws.a1).map(|(&w, &a)| w * a).sum::<T>() + b2[i];
            ws.z2[i] = z;
            let m = masks.map_or(T::one(), |(_, m2)| m2[i]);
            ws.a2[i] = z.max(T::zero()) * m;
        }
        w3.iter().zip(&ws.a2).map(|(&w, &a)| w * a).sum::<T>() + b3
    }

    /// Adds `d_out · ∂out/∂θ` into `grad`, using the activations left in `ws`.
    fn backward_into<T: Scalar>(
        &self,
        params: &[T],
        x: &[T; FEATURE_COUNT],
        masks: Option<(&[T], &[T])>,
        d_out: T,
        ws: &mut Workspace<T>,
        grad: &mut [T],
    ) {
        let (h1, h2) = (self.h1, self.h2);
        let w2 = &params[self.w2()..self.b2()];
        let w3 = &params[self.w3()..self.b3()];

        grad[self.b3()] += d_out;
        for i in 0..h2 {
            grad[self.w3() + i] += d_out * ws.a2[i];
            let m = masks.map_or(T::one(), |(_, m2)| m2[i]);
            ws.d2[i] = if ws.z2[i] > T::zero() { d_out * w3[i] * m } else { T::zero() };
        }
        for v in ws.d1.iter_mut() {
            *v = T::zero();
        }
        for i in 0..h2 {
            let d = ws.d2[i];
            if d == T::zero() {
                continue;
            }
            grad[self.b2() + i] += d;
            let base = self.w2() + i * h1;
            for j in 0..h1 {
                grad[base + j] += d * ws.a1[j];
                ws.d1[j] += d * w2[i * h1 + j];
            }
        }
        for j in 0..h1 {
            let m = masks.map_or(T::one(), |(m1, _)| m1[j]);
            let d = if ws.z1[j] > T::zero() { ws.d1[j] * m } else { T::zero() };
            if d == T::zero() {
                continue;
            }
            grad[self.b1() + j] += d;
            let base = self.w1() + j * FEATURE_COUNT;
            for (k, &xk) in x.iter().enumerate() {
                grad[base + k] += d * xk;
            }
        }
    }
}

struct Workspace<T> {
    z1: Vec<T>,
    a1: Vec<T>,
    z2: Vec<T>,
    a2: Vec<T>,
    d1: Vec<T>,
    d2: Vec<T>,
}

impl<T: Scalar> Workspace<T> {
    fn new(layout: Layout) -> Self {
        let z = |n| vec![T::zero(); n];
        Self {
            z1: z(layout.h1),
            a1: z(layout.h1),
            z2: z(layout.h2),
            a2: z(layout.h2),
            d1: z(layout.h1),
            d2: z(layout.h2),
        }
    }
}

/// Mean squared error of `params` over `batch` and its gradient. `masks[i]` are the
/// dropout multipliers for sample `i`; `None` evaluates the network deterministically.
pub fn mse_loss_and_gradient<T: Scalar>(
    layout: Layout,
    params: &[T],
    batch: &[([T; FEATURE_COUNT], T)],
    masks: Option<&[(Vec<T>, Vec<T>)]>,
) -> (T, Vec<T>) {
    let mut grad = vec![T::zero(); layout.param_count()];
    let mut ws = Workspace::new(layout);
    let loss = accumulate(layout, params, batch, masks, &mut ws, &mut grad);
    (loss, grad)
}

fn accumulate<T: Scalar>(
    layout: Layout,
    params: &[T],
    batch: &[([T; FEATURE_COUNT], T)],
    masks: Option<&[(Vec<T>, Vec<T>)]>,
    ws: &mut Workspace<T>,
    grad: &mut [T],
) -> T {
    let n = T::from_usize_lossy(batch.len());
    let two = T::lit(2.0);
    let mut loss = T::zero();
    for (i, (x, y)) in batch.iter().enumerate() {
        let m = masks.map(|ms| (ms[i].0.as_slice(), ms[i].1.as_slice()));
        let out = layout.forward_into(params, x, m, ws);
        let err = out - *y;
        loss += err * err;
        layout.backward_into(params, x, m, two * err / n, ws, grad);
    }
    loss / n
}

/// Adam optimizer state.
#[derive(Debug, Clone)]
pub struct Adam<T> {
    lr: T,
    beta1: T,
    beta2: T,
    epsilon: T,
    m: Vec<T>,
    v: Vec<T>,
    step: i32,
}

impl<T: Scalar> Adam<T> {
    pub fn new(n: usize, hyper: &Hyperparameters) -> Self {
        Self {
            lr: T::lit(hyper.learning_rate),
            beta1: T::lit(hyper.beta1),
            beta2: T::lit(hyper.beta2),
            epsilon: T::lit(hyper.epsilon),
            m: vec![T::zero(); n],
            v: vec![T::zero(); n],
            step: 0,
        }
    }

    pub fn update(&mut self, params: &mut [T], grad: &[T]) {
        self.step += 1;
        let one = T::one();
        let c1 = one - self.beta1.powi(self.step);
        let c2 = one - self.beta2.powi(self.step);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (one - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (one - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

/// Glorot-uniform weights, zero biases, drawn from the run seed.
pub fn initial_parameters<T: Scalar>(layout: Layout, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut params = vec![T::zero(); layout.param_count()];
    let blocks =
        [(layout.w1(), FEATURE_COUNT, layout.h1), (layout.w2(), layout.h1, layout.h2), (layout.w3(), layout.h2, 1)];
    for (offset, fan_in, fan_out) in blocks {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for p in &mut params[offset..offset + fan_in * fan_out] {
            *p = T::lit((2.0 * rng.gen::<f64>() - 1.0) * limit);
        }
    }
    params
}

#[derive(Debug, Clone)]
pub struct NeuralFit<T> {
    pub model: GrowthModel<T>,
    /// Mean minibatch loss (dropout active) per epoch.
    pub epoch_losses: Vec<T>,
    /// Full training-set MSE with dropout disabled, after each epoch.
    pub epoch_eval_losses: Vec<T>,
}

/// Trains the two-layer network on the growth exponent of each sample with minibatch
/// Adam, inverted dropout on both hidden layers and MSE loss. Deterministic in
/// `hyper.seed`.
pub fn fit_neural<T: Scalar>(
    samples: &[GrowthSample<T>],
    ranges: NormalizationRanges<T>,
    hyper: &Hyperparameters,
) -> Result<NeuralFit<T>> {
    if samples.is_empty() {
        return Err(Error::Fit("training set is empty".into()));
    }
    hyper.validate()?;
    ranges.validate()?;

    let layout = Layout::new(hyper.hidden);
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut params = initial_parameters::<T>(layout, &mut rng);
    let data: Vec<([T; FEATURE_COUNT], T)> = samples.iter().map(|s| (ranges.scale(&s.features), s.target())).collect();
    if let Some(i) = data.iter().position(|(_, y)| !y.is_finite()) {
        return Err(Error::Fit(format!("sample {i} has a non-finite target")));
    }

    let keep = 1.0 - hyper.dropout;
    let scale = T::lit(1.0 / keep);
    let mut adam = Adam::new(params.len(), hyper);
    let mut ws = Workspace::new(layout);
    let mut grad = vec![T::zero(); params.len()];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut batch = Vec::with_capacity(hyper.batch_size);
    let mut masks: Vec<(Vec<T>, Vec<T>)> =
        (0..hyper.batch_size).map(|_| (vec![T::zero(); layout.h1], vec![T::zero(); layout.h2])).collect();
    let mut epoch_losses = Vec::with_capacity(hyper.epochs);
    let mut epoch_eval_losses = Vec::with_capacity(hyper.epochs);

    for epoch in 0..hyper.epochs {
        order.shuffle(&mut rng);
        let mut total = T::zero();
        for chunk in order.chunks(hyper.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| data[i]));
            for (m1, m2) in masks.iter_mut().take(batch.len()) {
                for v in m1.iter_mut().chain(m2.iter_mut()) {
                    *v = if hyper.dropout == 0.0 || rng.gen::<f64>() < keep { scale } else { T::zero() };
                }
            }
            grad.iter_mut().for_each(|g| *g = T::zero());
            let loss = accumulate(layout, &params, &batch, Some(&masks[..batch.len()]), &mut ws, &mut grad);
            if !loss.is_finite() {
                return Err(Error::Training { epoch, reason: format!("minibatch loss is {loss}") });
            }
            total += loss * T::from_usize_lossy(batch.len());
            adam.update(&mut params, &grad);
        }
        let epoch_loss = total / T::from_usize_lossy(data.len());
        if !epoch_loss.is_finite() || params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Training { epoch, reason: "parameters became non-finite".into() });
        }
        epoch_losses.push(epoch_loss);
        epoch_eval_losses.push(eval_loss(layout, &params, &data, &mut ws));
    }

    let model = GrowthModel::neural(params, ranges, hyper.clone())?;
    Ok(NeuralFit { model, epoch_losses, epoch_eval_losses })
}

fn eval_loss<T: Scalar>(layout: Layout, params: &[T], data: &[([T; FEATURE_COUNT], T)], ws: &mut Workspace<T>) -> T {
    let total: T = data
        .iter()
        .map(|(x, y)| {
            let e = layout.forward_into(params, x, None, ws) - *y;
            e * e
        })
        .sum();
    total / T::from_usize_lossy(data.len())
}
