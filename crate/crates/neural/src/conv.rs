//! Message-passing layers: GIN (sum aggregation) and GCN (normalised
//! adjacency), each followed by batch norm and ReLU.

use rand::Rng;

use crate::batch::GraphBatch;
use crate::layers::{BatchNorm, Linear, Relu};
use crate::tensor::{Param, Tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvKind {
    Gin,
    Gcn,
}

#[derive(Clone, Debug)]
enum Transform {
    /// `h ↦ W2 ReLU(W1 ((1+ε) h + Σ_N h))`
    Gin { eps: f64, first: Linear, relu: Relu, second: Linear },
    /// `h ↦ Â h W`
    Gcn { linear: Linear },
}

#[derive(Clone, Debug)]
pub struct ConvLayer {
    transform: Transform,
    norm: BatchNorm,
    relu: Relu,
}

impl ConvLayer {
    pub fn new<R: Rng + ?Sized>(kind: ConvKind, fan_in: usize, width: usize, rng: &mut R) -> ConvLayer {
        let transform = match kind {
            ConvKind::Gin => Transform::Gin {
                eps: 0.0,
                first: Linear::new(fan_in, width, rng),
                relu: Relu::default(),
                second: Linear::new(width, width, rng),
            },
            ConvKind::Gcn => Transform::Gcn { linear: Linear::new(fan_in, width, rng) },
        };
        ConvLayer { transform, norm: BatchNorm::new(width), relu: Relu::default() }
    }

    pub fn kind(&self) -> ConvKind {
        match self.transform {
            Transform::Gin { .. } => ConvKind::Gin,
            Transform::Gcn { .. } => ConvKind::Gcn,
        }
    }

    fn aggregate(&self, h: &Tensor, batch: &GraphBatch) -> Tensor {
        match &self.transform {
            Transform::Gin { eps, .. } => batch.adjacency.matmul(h) + &(h * (1.0 + eps)),
            Transform::Gcn { .. } => batch.normalized.matmul(h),
        }
    }

    /// The aggregation is linear and symmetric, so its adjoint is itself.
    fn aggregate_backward(&self, d: &Tensor, batch: &GraphBatch) -> Tensor {
        self.aggregate(d, batch)
    }

    pub fn infer(&self, h: &Tensor, batch: &GraphBatch) -> Tensor {
        let agg = self.aggregate(h, batch);
        let z = match &self.transform {
            Transform::Gin { first, second, .. } => second.infer(&Relu::infer(&first.infer(&agg))),
            Transform::Gcn { linear } => linear.infer(&agg),
        };
        Relu::infer(&self.norm.infer(&z))
    }

    pub fn forward(&mut self, h: &Tensor, batch: &GraphBatch) -> Tensor {
        let agg = self.aggregate(h, batch);
        let z = match &mut self.transform {
            Transform::Gin { first, relu, second, .. } => second.forward(relu.forward(first.forward(agg))),
            Transform::Gcn { linear } => linear.forward(agg),
        };
        self.relu.forward(self.norm.forward(z))
    }

    pub fn backward(&mut self, dy: &Tensor, batch: &GraphBatch) -> Tensor {
        let d = self.norm.backward(&self.relu.backward(dy));
        let d = match &mut self.transform {
            Transform::Gin { first, relu, second, .. } => first.backward(&relu.backward(&second.backward(&d))),
            Transform::Gcn { linear } => linear.backward(&d),
        };
        self.aggregate_backward(&d, batch)
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out: Vec<&mut Param> = match &mut self.transform {
            Transform::Gin { first, second, .. } => first.params_mut().into_iter().chain(second.params_mut()).collect(),
            Transform::Gcn { linear } => linear.params_mut().into(),
        };
        out.extend(self.norm.params_mut());
        out
    }

    pub fn state(&self) -> Vec<&Tensor> {
        let mut out: Vec<&Tensor> = match &self.transform {
            Transform::Gin { first, second, .. } => first.state().into_iter().chain(second.state()).collect(),
            Transform::Gcn { linear } => linear.state().into(),
        };
        out.extend(self.norm.state());
        out
    }

    pub fn state_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = match &mut self.transform {
            Transform::Gin { first, second, .. } => first.state_mut().into_iter().chain(second.state_mut()).collect(),
            Transform::Gcn { linear } => linear.state_mut().into(),
        };
        out.extend(self.norm.state_mut());
        out
    }
}

/// A stack of message-passing layers, `fan_in → width → … → width`.
#[derive(Clone, Debug)]
pub struct ConvStack {
    layers: Vec<ConvLayer>,
}

impl ConvStack {
    pub fn new<R: Rng + ?Sized>(kind: ConvKind, fan_in: usize, width: usize, depth: usize, rng: &mut R) -> ConvStack {
        let layers =
            (0..depth).map(|i| ConvLayer::new(kind, if i == 0 { fan_in } else { width }, width, rng)).collect();
        ConvStack { layers }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn kind(&self) -> ConvKind {
        self.layers[0].kind()
    }

    pub fn infer(&self, batch: &GraphBatch) -> Tensor {
        self.layers.iter().fold(batch.x.clone(), |h, l| l.infer(&h, batch))
    }

    pub fn forward(&mut self, batch: &GraphBatch) -> Tensor {
        let mut h = batch.x.clone();
        for l in &mut self.layers {
            h = l.forward(&h, batch);
        }
        h
    }

    pub fn backward(&mut self, dy: &Tensor, batch: &GraphBatch) {
        let mut d = dy.clone();
        for l in self.layers.iter_mut().rev() {
            d = l.backward(&d, batch);
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        self.layers.iter_mut().flat_map(ConvLayer::params_mut).collect()
    }

    pub fn state(&self) -> Vec<&Tensor> {
        self.layers.iter().flat_map(ConvLayer::state).collect()
    }

    pub fn state_mut(&mut self) -> Vec<&mut Tensor> {
        self.layers.iter_mut().flat_map(ConvLayer::state_mut).collect()
    }
}
