//! Adaptive moment estimation over flat parameter slices.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl Adam {
    /// One moment buffer per parameter block, sized by `block_lens`.
    pub fn new(lr: f64, block_lens: &[usize]) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            first: block_lens.iter().map(|&n| vec![0.0; n]).collect(),
            second: block_lens.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// Advances the step counter; call once per update, before [`apply`](Self::apply).
    pub fn tick(&mut self) {
        self.step += 1;
    }

    /// Updates block `block` of the parameters in place.
    pub fn apply(&mut self, block: usize, params: &mut [f64], grads: &[f64]) {
        debug_assert!(self.step > 0, "tick before apply");
        let bias1 = 1.0 - libm::pow(self.beta1, self.step as f64);
        let bias2 = 1.0 - libm::pow(self.beta2, self.step as f64);
        let m = &mut self.first[block];
        let v = &mut self.second[block];
        for k in 0..params.len() {
            let g = grads[k];
            m[k] = self.beta1 * m[k] + (1.0 - self.beta1) * g;
            v[k] = self.beta2 * v[k] + (1.0 - self.beta2) * g * g;
            let m_hat = m[k] / bias1;
            let v_hat = v[k] / bias2;
            params[k] -= self.lr * m_hat / (libm::sqrt(v_hat) + self.eps);
        }
    }
}
