//! One-hidden-layer ReLU network with a sigmoid output, trained with
//! binary cross-entropy and Adam.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::RandomSeed;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 256,
            learning_rate: 1e-3,
            batch_size: 256,
            epochs: 200,
        }
    }
}

/// Parameters are stored flat: `w1` (hidden × input, row-major), `b1`
/// (hidden), `w2` (hidden), `b2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    input: usize,
    hidden: usize,
    params: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl Mlp {
    pub fn n_params(input: usize, hidden: usize) -> usize {
        hidden * input + hidden + hidden + 1
    }

    /// Uniform `±1/sqrt(fan_in)` initialisation for weights and biases.
    pub fn init<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let mut params = Vec::with_capacity(Self::n_params(input, hidden));
        let a1 = 1.0 / (input.max(1) as f64).sqrt();
        for _ in 0..hidden * input + hidden {
            params.push(rng.random_range(-a1..a1));
        }
        let a2 = 1.0 / (hidden.max(1) as f64).sqrt();
        for _ in 0..hidden + 1 {
            params.push(rng.random_range(-a2..a2));
        }
        Mlp {
            input,
            hidden,
            params,
        }
    }

    pub fn from_params(input: usize, hidden: usize, params: Vec<f64>) -> Self {
        assert_eq!(params.len(), Self::n_params(input, hidden));
        Mlp {
            input,
            hidden,
            params,
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn input_dim(&self) -> usize {
        self.input
    }

    fn split(&self) -> (&[f64], &[f64], &[f64], f64) {
        let (w1, rest) = self.params.split_at(self.hidden * self.input);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, rest) = rest.split_at(self.hidden);
        (w1, b1, w2, rest[0])
    }

    /// Pre-sigmoid output; fills `activations` with the hidden layer.
    fn logit(&self, x: &[f64], activations: &mut [f64]) -> f64 {
        let (w1, b1, w2, b2) = self.split();
        let mut z = b2;
        for j in 0..self.hidden {
            let row = &w1[j * self.input..(j + 1) * self.input];
            let mut h = b1[j];
            for (w, xi) in row.iter().zip(x) {
                h += w * xi;
            }
            let a = h.max(0.0);
            activations[j] = a;
            z += w2[j] * a;
        }
        z
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut act = vec![0.0; self.hidden];
        sigmoid(self.logit(x, &mut act))
    }

    /// Mean binary cross-entropy over the batch and its gradient.
    pub fn loss_and_gradient(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let loss = self.accumulate_gradient(xs.iter().copied().zip(ys.iter().copied()), &mut grad);
        let n = xs.len().max(1) as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        (loss / n, grad)
    }

    /// Adds per-sample gradients into `grad`; returns the summed loss.
    fn accumulate_gradient<'a>(
        &self,
        batch: impl Iterator<Item = (&'a [f64], f64)>,
        grad: &mut [f64],
    ) -> f64 {
        let (_, _, w2, _) = self.split();
        let (hw, input) = (self.hidden * self.input, self.input);
        let mut act = vec![0.0; self.hidden];
        let mut loss = 0.0;
        for (x, y) in batch {
            let z = self.logit(x, &mut act);
            loss += softplus(z) - y * z;
            let dz = sigmoid(z) - y;
            let (gw1, rest) = grad.split_at_mut(hw);
            let (gb1, rest) = rest.split_at_mut(self.hidden);
            let (gw2, gb2) = rest.split_at_mut(self.hidden);
            gb2[0] += dz;
            for j in 0..self.hidden {
                let a = act[j];
                gw2[j] += dz * a;
                if a > 0.0 {
                    let da = dz * w2[j];
                    gb1[j] += da;
                    for (g, xi) in gw1[j * input..(j + 1) * input].iter_mut().zip(x) {
                        *g += da * xi;
                    }
                }
            }
        }
        loss
    }

    /// Deterministic given `seed`: initialisation and per-epoch shuffles
    /// come from child streams.
    pub fn train(xs: &[&[f64]], ys: &[f64], config: &MlpConfig, seed: RandomSeed) -> Self {
        let input = xs.first().map_or(0, |x| x.len());
        let mut model = Mlp::init(input, config.hidden, &mut seed.child("mlp/init").rng());
        let mut shuffle_rng = seed.child("mlp/shuffle").rng();
        let n_params = model.params.len();
        let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
        let mut m = vec![0.0; n_params];
        let mut v = vec![0.0; n_params];
        let mut grad = vec![0.0; n_params];
        let mut step = 0i32;
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let batch_size = config.batch_size.max(1);
        for _ in 0..config.epochs {
            order.shuffle(&mut shuffle_rng);
            for batch in order.chunks(batch_size) {
                grad.iter_mut().for_each(|g| *g = 0.0);
                model.accumulate_gradient(batch.iter().map(|&i| (xs[i], ys[i])), &mut grad);
                let scale = 1.0 / batch.len() as f64;
                step += 1;
                let bc1 = 1.0 - beta1.powi(step);
                let bc2 = 1.0 - beta2.powi(step);
                for k in 0..n_params {
                    let g = grad[k] * scale;
                    m[k] = beta1 * m[k] + (1.0 - beta1) * g;
                    v[k] = beta2 * v[k] + (1.0 - beta2) * g * g;
                    let m_hat = m[k] / bc1;
                    let v_hat = v[k] / bc2;
                    model.params[k] -= config.learning_rate * m_hat / (v_hat.sqrt() + eps);
                }
            }
        }
        model
    }
}
