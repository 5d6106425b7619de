use crate::tensor::{Param, Tensor};

/// Adam with bias-corrected moment estimates.
#[derive(Clone, Debug)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: i32,
    moments: Vec<(Tensor, Tensor)>,
}

impl Adam {
    pub fn new(lr: f64) -> Adam {
        Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, step: 0, moments: Vec::new() }
    }

    /// Applies one update from the accumulated gradients, then clears them.
    /// Parameters must be passed in the same order on every call.
    pub fn step(&mut self, params: Vec<&mut Param>) {
        if self.moments.is_empty() {
            self.moments =
                params.iter().map(|p| (Tensor::zeros(p.value.raw_dim()), Tensor::zeros(p.value.raw_dim()))).collect();
        }
        assert_eq!(self.moments.len(), params.len(), "parameter list changed between steps");
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        for (p, (m, v)) in params.into_iter().zip(&mut self.moments) {
            assert_eq!(p.value.shape(), m.shape(), "parameter shape changed between steps");
            ndarray::Zip::from(&mut p.value).and(&mut p.grad).and(m).and(v).for_each(|x, g, m, v| {
                *m = b1 * *m + (1.0 - b1) * *g;
                *v = b2 * *v + (1.0 - b2) * *g * *g;
                *x -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
                *g = 0.0;
            });
        }
    }
}
