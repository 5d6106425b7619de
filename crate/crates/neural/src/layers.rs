//! Dense layers with cached activations and hand-derived backward passes.
//!
//! `infer` is the pure eval-mode forward. `forward` is the train-mode
//! forward and caches what `backward` needs; each `backward` consumes the
//! cache of the most recent `forward`.

use ndarray::Axis;
use rand::Rng;

use crate::tensor::{column_sums, debug_finite, Param, Tensor};

#[derive(Clone, Debug)]
pub struct Linear {
    pub weight: Param,
    pub bias: Param,
    input: Option<Tensor>,
}

impl Linear {
    pub fn new<R: Rng + ?Sized>(fan_in: usize, fan_out: usize, rng: &mut R) -> Linear {
        Linear { weight: Param::glorot(fan_in, fan_out, rng), bias: Param::zeros(1, fan_out), input: None }
    }

    pub fn fan_in(&self) -> usize {
        self.weight.value.nrows()
    }

    pub fn infer(&self, x: &Tensor) -> Tensor {
        assert_eq!(x.ncols(), self.fan_in(), "linear input width mismatch");
        let y = x.dot(&self.weight.value) + &self.bias.value;
        debug_finite(&y);
        y
    }

    pub fn forward(&mut self, x: Tensor) -> Tensor {
        let y = self.infer(&x);
        self.input = Some(x);
        y
    }

    pub fn backward(&mut self, dy: &Tensor) -> Tensor {
        let x = self.input.take().expect("backward without forward");
        self.weight.grad += &x.t().dot(dy);
        self.bias.grad += &column_sums(dy);
        dy.dot(&self.weight.value.t())
    }

    pub fn params_mut(&mut self) -> [&mut Param; 2] {
        [&mut self.weight, &mut self.bias]
    }

    pub fn state(&self) -> [&Tensor; 2] {
        [&self.weight.value, &self.bias.value]
    }

    pub fn state_mut(&mut self) -> [&mut Tensor; 2] {
        [&mut self.weight.value, &mut self.bias.value]
    }
}

#[derive(Clone, Debug, Default)]
pub struct Relu {
    mask: Option<Tensor>,
}

impl Relu {
    pub fn infer(x: &Tensor) -> Tensor {
        x.mapv(|v| v.max(0.0))
    }

    pub fn forward(&mut self, x: Tensor) -> Tensor {
        self.mask = Some(x.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 }));
        Relu::infer(&x)
    }

    pub fn backward(&mut self, dy: &Tensor) -> Tensor {
        dy * &self.mask.take().expect("backward without forward")
    }
}

/// Inverted dropout: kept units are scaled by `1 / (1 - p)` during training.
#[derive(Clone, Debug)]
pub struct Dropout {
    pub p: f64,
    mask: Option<Tensor>,
}

impl Dropout {
    pub fn new(p: f64) -> Dropout {
        assert!((0.0..1.0).contains(&p), "dropout rate must lie in [0, 1)");
        Dropout { p, mask: None }
    }

    pub fn forward<R: Rng + ?Sized>(&mut self, x: Tensor, rng: &mut R) -> Tensor {
        let keep = 1.0 - self.p;
        let mask = Tensor::from_shape_fn(x.raw_dim(), |_| if rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 });
        let y = &x * &mask;
        self.mask = Some(mask);
        y
    }

    pub fn backward(&mut self, dy: &Tensor) -> Tensor {
        dy * &self.mask.take().expect("backward without forward")
    }
}

/// 1-D batch normalisation over rows, with running statistics for eval.
#[derive(Clone, Debug)]
pub struct BatchNorm {
    pub gamma: Param,
    pub beta: Param,
    pub running_mean: Tensor,
    pub running_var: Tensor,
    cache: Option<(Tensor, Tensor)>,
}

impl BatchNorm {
    pub const MOMENTUM: f64 = 0.1;
    pub const EPS: f64 = 1e-5;

    pub fn new(width: usize) -> BatchNorm {
        BatchNorm {
            gamma: Param::new(Tensor::ones((1, width))),
            beta: Param::zeros(1, width),
            running_mean: Tensor::zeros((1, width)),
            running_var: Tensor::ones((1, width)),
            cache: None,
        }
    }

    pub fn infer(&self, x: &Tensor) -> Tensor {
        let inv_std = self.running_var.mapv(|v| 1.0 / (v + Self::EPS).sqrt());
        (x - &self.running_mean) * &inv_std * &self.gamma.value + &self.beta.value
    }

    pub fn forward(&mut self, x: Tensor) -> Tensor {
        let n = x.nrows() as f64;
        let mean = x.mean_axis(Axis(0)).expect("batch norm over zero rows").insert_axis(Axis(0));
        let centred = &x - &mean;
        let var = column_sums(&centred.mapv(|v| v * v)) / n;
        let inv_std = var.mapv(|v| 1.0 / (v + Self::EPS).sqrt());
        let xhat = centred * &inv_std;
        let y = &xhat * &self.gamma.value + &self.beta.value;

        let m = Self::MOMENTUM;
        self.running_mean = &self.running_mean * (1.0 - m) + &mean * m;
        if x.nrows() > 1 {
            let unbiased = &var * (n / (n - 1.0));
            self.running_var = &self.running_var * (1.0 - m) + unbiased * m;
        }
        self.cache = Some((xhat, inv_std));
        y
    }

    pub fn backward(&mut self, dy: &Tensor) -> Tensor {
        let (xhat, inv_std) = self.cache.take().expect("backward without forward");
        let n = dy.nrows() as f64;
        self.gamma.grad += &column_sums(&(dy * &xhat));
        self.beta.grad += &column_sums(dy);
        let dxhat = dy * &self.gamma.value;
        let sum = column_sums(&dxhat);
        let dot = column_sums(&(&dxhat * &xhat));
        (dxhat * n - &sum - &xhat * &dot) * &inv_std / n
    }

    pub fn params_mut(&mut self) -> [&mut Param; 2] {
        [&mut self.gamma, &mut self.beta]
    }

    pub fn state(&self) -> [&Tensor; 4] {
        [&self.gamma.value, &self.beta.value, &self.running_mean, &self.running_var]
    }

    pub fn state_mut(&mut self) -> [&mut Tensor; 4] {
        [&mut self.gamma.value, &mut self.beta.value, &mut self.running_mean, &mut self.running_var]
    }
}

/// `x ↦ Linear(ReLU(Linear(Dropout(x))))` producing one logit per row.
#[derive(Clone, Debug)]
pub struct Head {
    dropout: Dropout,
    hidden: Linear,
    relu: Relu,
    out: Linear,
}

impl Head {
    pub fn new<R: Rng + ?Sized>(fan_in: usize, hidden: usize, dropout: f64, rng: &mut R) -> Head {
        Head {
            dropout: Dropout::new(dropout),
            hidden: Linear::new(fan_in, hidden, rng),
            relu: Relu::default(),
            out: Linear::new(hidden, 1, rng),
        }
    }

    pub fn infer(&self, x: &Tensor) -> Tensor {
        self.out.infer(&Relu::infer(&self.hidden.infer(x)))
    }

    pub fn forward<R: Rng + ?Sized>(&mut self, x: Tensor, rng: &mut R) -> Tensor {
        let x = self.dropout.forward(x, rng);
        let x = self.relu.forward(self.hidden.forward(x));
        self.out.forward(x)
    }

    pub fn backward(&mut self, dy: &Tensor) -> Tensor {
        let d = self.out.backward(dy);
        let d = self.hidden.backward(&self.relu.backward(&d));
        self.dropout.backward(&d)
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out: Vec<&mut Param> = self.hidden.params_mut().into();
        out.extend(self.out.params_mut());
        out
    }

    pub fn state(&self) -> Vec<&Tensor> {
        self.hidden.state().into_iter().chain(self.out.state()).collect()
    }

    pub fn state_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = self.hidden.state_mut().into();
        out.extend(self.out.state_mut());
        out
    }
}
