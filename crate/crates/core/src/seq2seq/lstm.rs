//! LSTM encoder cell.

use rand::Rng;

use super::tensor::{sigmoid, Matrix};
use super::ModelError;

/// Input weights, recurrent weights and bias of one gate.
#[derive(Debug, Clone, PartialEq)]
pub struct GateParams {
    pub input: Matrix,
    pub recurrent: Matrix,
    pub bias: Matrix,
}

impl GateParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> GateParams {
        GateParams {
            input: Matrix::zeros(hidden_dim, input_dim),
            recurrent: Matrix::zeros(hidden_dim, hidden_dim),
            bias: Matrix::zeros(hidden_dim, 1),
        }
    }

    pub fn uniform(input_dim: usize, hidden_dim: usize, rng: &mut impl Rng) -> GateParams {
        let k = 1.0 / (hidden_dim as f64).sqrt();
        GateParams {
            input: Matrix::uniform(hidden_dim, input_dim, k, rng),
            recurrent: Matrix::uniform(hidden_dim, hidden_dim, k, rng),
            bias: Matrix::uniform(hidden_dim, 1, k, rng),
        }
    }

    /// `W x + U h + b`
    pub fn pre_activation(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        let mut a = self.bias.data().to_vec();
        self.input.mul_vec_add(x, &mut a);
        self.recurrent.mul_vec_add(h, &mut a);
        a
    }

    /// Accumulates gradients for the pre-activation gradient `da` and
    /// returns nothing; the caller propagates into `x` and `h` itself.
    pub(crate) fn accumulate(&mut self, da: &[f64], x: &[f64], h: &[f64]) {
        self.input.add_outer(da, x);
        self.recurrent.add_outer(da, h);
        for (b, d) in self.bias.data_mut().iter_mut().zip(da) {
            *b += d;
        }
    }

    pub(crate) fn matrices(&self) -> [&Matrix; 3] {
        [&self.input, &self.recurrent, &self.bias]
    }

    pub(crate) fn matrices_mut(&mut self) -> [&mut Matrix; 3] {
        [&mut self.input, &mut self.recurrent, &mut self.bias]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub forget: GateParams,
    pub input: GateParams,
    pub output: GateParams,
    pub candidate: GateParams,
    input_dim: usize,
    hidden_dim: usize,
}

impl LstmParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> LstmParams {
        let g = || GateParams::zeros(input_dim, hidden_dim);
        LstmParams {
            forget: g(),
            input: g(),
            output: g(),
            candidate: g(),
            input_dim,
            hidden_dim,
        }
    }

    pub fn uniform(input_dim: usize, hidden_dim: usize, rng: &mut impl Rng) -> LstmParams {
        LstmParams {
            forget: GateParams::uniform(input_dim, hidden_dim, rng),
            input: GateParams::uniform(input_dim, hidden_dim, rng),
            output: GateParams::uniform(input_dim, hidden_dim, rng),
            candidate: GateParams::uniform(input_dim, hidden_dim, rng),
            input_dim,
            hidden_dim,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub(crate) fn gates(&self) -> [(&'static str, &GateParams); 4] {
        [
            ("forget", &self.forget),
            ("input", &self.input),
            ("output", &self.output),
            ("candidate", &self.candidate),
        ]
    }

    pub(crate) fn gates_mut(&mut self) -> [(&'static str, &mut GateParams); 4] {
        [
            ("forget", &mut self.forget),
            ("input", &mut self.input),
            ("output", &mut self.output),
            ("candidate", &mut self.candidate),
        ]
    }
}

/// Cell and output vectors after a step.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderState {
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

impl EncoderState {
    pub fn zeros(hidden_dim: usize) -> EncoderState {
        EncoderState {
            c: vec![0.0; hidden_dim],
            h: vec![0.0; hidden_dim],
        }
    }
}

/// Intermediate values of one step, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct LstmStepCache {
    pub x: Vec<f64>,
    pub prev: EncoderState,
    pub forget: Vec<f64>,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    pub candidate: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub next: EncoderState,
}

pub(crate) fn step_cached(params: &LstmParams, x: &[f64], prev: &EncoderState) -> LstmStepCache {
    let forget: Vec<f64> = params
        .forget
        .pre_activation(x, &prev.h)
        .into_iter()
        .map(sigmoid)
        .collect();
    let input: Vec<f64> = params
        .input
        .pre_activation(x, &prev.h)
        .into_iter()
        .map(sigmoid)
        .collect();
    let output: Vec<f64> = params
        .output
        .pre_activation(x, &prev.h)
        .into_iter()
        .map(sigmoid)
        .collect();
    let candidate: Vec<f64> = params
        .candidate
        .pre_activation(x, &prev.h)
        .into_iter()
        .map(f64::tanh)
        .collect();
    let c: Vec<f64> = (0..params.hidden_dim)
        .map(|k| forget[k] * prev.c[k] + input[k] * candidate[k])
        .collect();
    let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
    let h: Vec<f64> = output.iter().zip(&tanh_c).map(|(o, t)| o * t).collect();
    LstmStepCache {
        x: x.to_vec(),
        prev: prev.clone(),
        forget,
        input,
        output,
        candidate,
        tanh_c,
        next: EncoderState { c, h },
    }
}

/// One encoder step:
/// `f, i, o = σ(W x + U h + b)`, `c̃ = tanh(W_c x + U_c h + b_c)`,
/// `c = f⊙c_prev + i⊙c̃`, `h = o⊙tanh(c)`.
pub fn lstm_step(params: &LstmParams, x: &[f64], prev: &EncoderState) -> Result<EncoderState, ModelError> {
    if x.len() != params.input_dim {
        return Err(ModelError::Shape(format!(
            "encoder input has length {}, expected {}",
            x.len(),
            params.input_dim
        )));
    }
    if prev.c.len() != params.hidden_dim || prev.h.len() != params.hidden_dim {
        return Err(ModelError::Shape(format!(
            "encoder state has length {}/{}, expected {}",
            prev.c.len(),
            prev.h.len(),
            params.hidden_dim
        )));
    }
    Ok(step_cached(params, x, prev).next)
}

/// Backpropagates one step. `dh` and `dc` are gradients w.r.t. the step's
/// outputs; returns gradients w.r.t. the previous state.
pub(crate) fn step_backward(
    params: &LstmParams,
    cache: &LstmStepCache,
    dh: &[f64],
    dc: &[f64],
    grads: &mut LstmParams,
) -> (Vec<f64>, Vec<f64>) {
    let n = params.hidden_dim;
    let mut da_f = vec![0.0; n];
    let mut da_i = vec![0.0; n];
    let mut da_o = vec![0.0; n];
    let mut da_g = vec![0.0; n];
    let mut dc_prev = vec![0.0; n];
    for k in 0..n {
        let (f, i, o, g, t) = (
            cache.forget[k],
            cache.input[k],
            cache.output[k],
            cache.candidate[k],
            cache.tanh_c[k],
        );
        let d_o = dh[k] * t;
        let d_c = dc[k] + dh[k] * o * (1.0 - t * t);
        da_f[k] = d_c * cache.prev.c[k] * f * (1.0 - f);
        da_i[k] = d_c * g * i * (1.0 - i);
        da_g[k] = d_c * i * (1.0 - g * g);
        da_o[k] = d_o * o * (1.0 - o);
        dc_prev[k] = d_c * f;
    }
    let (x, h) = (&cache.x, &cache.prev.h);
    grads.forget.accumulate(&da_f, x, h);
    grads.input.accumulate(&da_i, x, h);
    grads.output.accumulate(&da_o, x, h);
    grads.candidate.accumulate(&da_g, x, h);

    let mut dh_prev = vec![0.0; n];
    params.forget.recurrent.mul_t_vec_add(&da_f, &mut dh_prev);
    params.input.recurrent.mul_t_vec_add(&da_i, &mut dh_prev);
    params.output.recurrent.mul_t_vec_add(&da_o, &mut dh_prev);
    params.candidate.recurrent.mul_t_vec_add(&da_g, &mut dh_prev);
    (dh_prev, dc_prev)
}
