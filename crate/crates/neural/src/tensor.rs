use ndarray::{Array2, Axis};
use rand::Rng;

/// Dense row-major matrix; one row per node or per batch element.
pub type Tensor = Array2<f64>;

/// A trainable tensor together with its accumulated gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub value: Tensor,
    pub grad: Tensor,
}

impl Param {
    pub fn new(value: Tensor) -> Param {
        let grad = Tensor::zeros(value.raw_dim());
        Param { value, grad }
    }

    pub fn zeros(rows: usize, cols: usize) -> Param {
        Param::new(Tensor::zeros((rows, cols)))
    }

    /// Uniform Glorot initialisation, bound `sqrt(6 / (fan_in + fan_out))`.
    pub fn glorot<R: Rng + ?Sized>(fan_in: usize, fan_out: usize, rng: &mut R) -> Param {
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        Param::new(Tensor::from_shape_fn((fan_in, fan_out), |_| rng.random_range(-bound..bound)))
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }
}

pub(crate) fn debug_finite(t: &Tensor) {
    debug_assert!(t.iter().all(|x| x.is_finite()), "non-finite tensor entry");
}

pub(crate) fn column_sums(t: &Tensor) -> Tensor {
    t.sum_axis(Axis(0)).insert_axis(Axis(0))
}
