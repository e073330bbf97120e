//! GRU decoder cell.

use rand::Rng;

use super::lstm::GateParams;
use super::tensor::sigmoid;
use super::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub reset: GateParams,
    pub update: GateParams,
    pub candidate: GateParams,
    input_dim: usize,
    hidden_dim: usize,
}

impl GruParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> GruParams {
        let g = || GateParams::zeros(input_dim, hidden_dim);
        GruParams {
            reset: g(),
            update: g(),
            candidate: g(),
            input_dim,
            hidden_dim,
        }
    }

    pub fn uniform(input_dim: usize, hidden_dim: usize, rng: &mut impl Rng) -> GruParams {
        GruParams {
            reset: GateParams::uniform(input_dim, hidden_dim, rng),
            update: GateParams::uniform(input_dim, hidden_dim, rng),
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

    pub(crate) fn gates(&self) -> [(&'static str, &GateParams); 3] {
        [
            ("reset", &self.reset),
            ("update", &self.update),
            ("candidate", &self.candidate),
        ]
    }

    pub(crate) fn gates_mut(&mut self) -> [(&'static str, &mut GateParams); 3] {
        [
            ("reset", &mut self.reset),
            ("update", &mut self.update),
            ("candidate", &mut self.candidate),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct GruStepCache {
    pub y: Vec<f64>,
    pub prev: Vec<f64>,
    pub reset: Vec<f64>,
    pub update: Vec<f64>,
    pub candidate: Vec<f64>,
    pub reset_prev: Vec<f64>,
    pub next: Vec<f64>,
}

pub(crate) fn step_cached(params: &GruParams, y: &[f64], prev: &[f64]) -> GruStepCache {
    let reset: Vec<f64> = params.reset.pre_activation(y, prev).into_iter().map(sigmoid).collect();
    let update: Vec<f64> = params.update.pre_activation(y, prev).into_iter().map(sigmoid).collect();
    let reset_prev: Vec<f64> = reset.iter().zip(prev).map(|(r, h)| r * h).collect();
    let candidate: Vec<f64> = params
        .candidate
        .pre_activation(y, &reset_prev)
        .into_iter()
        .map(f64::tanh)
        .collect();
    let next = (0..params.hidden_dim)
        .map(|k| (1.0 - update[k]) * prev[k] + update[k] * candidate[k])
        .collect();
    GruStepCache {
        y: y.to_vec(),
        prev: prev.to_vec(),
        reset,
        update,
        candidate,
        reset_prev,
        next,
    }
}

/// One decoder step:
/// `r, z = σ(W y + U h + b)`, `h̃ = tanh(W_h y + U_h (r⊙h) + b_h)`,
/// `h = (1−z)⊙h + z⊙h̃`.
pub fn gru_step(params: &GruParams, y: &[f64], prev: &[f64]) -> Result<Vec<f64>, ModelError> {
    if y.len() != params.input_dim {
        return Err(ModelError::Shape(format!(
            "decoder input has length {}, expected {}",
            y.len(),
            params.input_dim
        )));
    }
    if prev.len() != params.hidden_dim {
        return Err(ModelError::Shape(format!(
            "decoder state has length {}, expected {}",
            prev.len(),
            params.hidden_dim
        )));
    }
    Ok(step_cached(params, y, prev).next)
}

/// Backpropagates `dh` through one step, returning the gradient w.r.t. the
/// previous state. Input gradients are not needed (embeddings are frozen).
pub(crate) fn step_backward(params: &GruParams, cache: &GruStepCache, dh: &[f64], grads: &mut GruParams) -> Vec<f64> {
    let n = params.hidden_dim;
    let mut da_z = vec![0.0; n];
    let mut da_h = vec![0.0; n];
    let mut dh_prev = vec![0.0; n];
    for k in 0..n {
        let z = cache.update[k];
        let cand = cache.candidate[k];
        da_z[k] = dh[k] * (cand - cache.prev[k]) * z * (1.0 - z);
        da_h[k] = dh[k] * z * (1.0 - cand * cand);
        dh_prev[k] = dh[k] * (1.0 - z);
    }
    grads.candidate.accumulate(&da_h, &cache.y, &cache.reset_prev);

    let mut d_reset_prev = vec![0.0; n];
    params.candidate.recurrent.mul_t_vec_add(&da_h, &mut d_reset_prev);
    let mut da_r = vec![0.0; n];
    for k in 0..n {
        let r = cache.reset[k];
        da_r[k] = d_reset_prev[k] * cache.prev[k] * r * (1.0 - r);
        dh_prev[k] += d_reset_prev[k] * r;
    }
    grads.reset.accumulate(&da_r, &cache.y, &cache.prev);
    grads.update.accumulate(&da_z, &cache.y, &cache.prev);
    params.reset.recurrent.mul_t_vec_add(&da_r, &mut dh_prev);
    params.update.recurrent.mul_t_vec_add(&da_z, &mut dh_prev);
    dh_prev
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_params_halve_the_state() {
        let p = GruParams::zeros(2, 3);
        let h = gru_step(&p, &[1.0, 2.0], &[0.4, -1.0, 3.0]).unwrap();
        assert_eq!(h, [0.2, -0.5, 1.5]);
        assert_eq!(gru_step(&p, &[1.0, 2.0], &[0.0; 3]).unwrap(), [0.0; 3]);
    }

    #[test]
    fn gate_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = GruParams::uniform(3, 4, &mut rng);
        let c = step_cached(&p, &[2.0, -1.0, 0.5], &[0.3, -0.2, 0.9, -0.7]);
        for v in c.reset.iter().chain(&c.update) {
            assert!(*v > 0.0 && *v < 1.0);
        }
        assert!(c.candidate.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn shape_errors() {
        let p = GruParams::zeros(2, 3);
        assert!(matches!(gru_step(&p, &[1.0], &[0.0; 3]), Err(ModelError::Shape(_))));
        assert!(matches!(
            gru_step(&p, &[1.0, 1.0], &[0.0; 2]),
            Err(ModelError::Shape(_))
        ));
    }
}
