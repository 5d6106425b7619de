//! Graph classifiers behind one trait, looked up by name.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::batch::{mean_pool, mean_pool_backward, EncodedGraph, GraphBatch, View};
use crate::conv::{ConvKind, ConvStack};
use crate::layers::{Head, Linear, Relu};
use crate::tensor::{Param, Tensor};
use ltlgnn_core::encoding::{IndexEncoding, FEATURE_WIDTH};

pub const HIDDEN: usize = 128;
pub const HEAD_HIDDEN: usize = 64;
pub const DEPTH: usize = 3;
pub const DROPOUT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Gin,
    Gcn,
    Mlp,
    Link,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown model `{0}` (expected one of: gin, gcn, mlp, link)")]
pub struct UnknownModel(pub String);

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Gin, ModelKind::Gcn, ModelKind::Mlp, ModelKind::Link];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Gin => "gin",
            ModelKind::Gcn => "gcn",
            ModelKind::Mlp => "mlp",
            ModelKind::Link => "link",
        }
    }

    pub(crate) fn code(self) -> u32 {
        self as u32
    }

    pub(crate) fn from_code(code: u32) -> Option<ModelKind> {
        ModelKind::ALL.into_iter().find(|k| k.code() == code)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<ModelKind, UnknownModel> {
        ModelKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| UnknownModel(s.to_string()))
    }
}

/// Prepared model input; which views are filled depends on the model.
#[derive(Clone, Debug)]
pub struct Batch {
    pub parts: Vec<GraphBatch>,
}

impl Batch {
    pub fn num_graphs(&self) -> usize {
        self.parts.first().map_or(0, GraphBatch::num_graphs)
    }
}

/// A binary classifier over union graphs producing one logit per graph.
pub trait GraphClassifier: Send + Sync {
    fn kind(&self) -> ModelKind;

    /// Part VI encoding the model was trained with; part of its state.
    fn indices(&self) -> IndexEncoding;

    fn set_indices(&mut self, indices: IndexEncoding);

    /// Packs graphs into the batch layout this model consumes.
    fn prepare(&self, graphs: &[&EncodedGraph]) -> Batch;

    /// Eval-mode logits: running batch-norm statistics, no dropout. Pure.
    fn predict(&self, batch: &Batch) -> Vec<f64>;

    /// Train-mode logits; caches activations for [`GraphClassifier::backward`].
    fn forward_train(&mut self, batch: &Batch, rng: &mut ChaCha8Rng) -> Vec<f64>;

    /// Accumulates parameter gradients given `d loss / d logit` per graph.
    fn backward(&mut self, batch: &Batch, dlogits: &[f64]);

    fn params_mut(&mut self) -> Vec<&mut Param>;

    /// Every persistent tensor (parameters and running statistics) in a
    /// fixed order; this is what checkpoints store.
    fn state(&self) -> Vec<&Tensor>;

    fn state_mut(&mut self) -> Vec<&mut Tensor>;

    fn zero_grad(&mut self) {
        for p in self.params_mut() {
            p.zero_grad();
        }
    }
}

fn column(logits: Tensor) -> Vec<f64> {
    logits.column(0).to_vec()
}

fn dcolumn(d: &[f64]) -> Tensor {
    Tensor::from_shape_vec((d.len(), 1), d.to_vec()).unwrap()
}

/// Message-passing stack on the union graph, mean pooling, MLP head.
#[derive(Clone, Debug)]
pub struct GnnClassifier {
    stack: ConvStack,
    head: Head,
    indices: IndexEncoding,
}

impl GnnClassifier {
    pub fn new(kind: ConvKind, rng: &mut ChaCha8Rng) -> GnnClassifier {
        GnnClassifier {
            stack: ConvStack::new(kind, FEATURE_WIDTH, HIDDEN, DEPTH, rng),
            head: Head::new(HIDDEN, HEAD_HIDDEN, DROPOUT, rng),
            indices: IndexEncoding::Raw,
        }
    }

    /// Pooled graph embeddings in eval mode.
    pub fn embed(&self, batch: &Batch) -> Tensor {
        let b = &batch.parts[0];
        mean_pool(&self.stack.infer(b), &b.segments)
    }
}

impl GraphClassifier for GnnClassifier {
    fn kind(&self) -> ModelKind {
        match self.stack.kind() {
            ConvKind::Gin => ModelKind::Gin,
            ConvKind::Gcn => ModelKind::Gcn,
        }
    }

    fn indices(&self) -> IndexEncoding {
        self.indices
    }

    fn set_indices(&mut self, indices: IndexEncoding) {
        self.indices = indices;
    }

    fn prepare(&self, graphs: &[&EncodedGraph]) -> Batch {
        Batch { parts: vec![GraphBatch::new(graphs, View::Union, self.indices)] }
    }

    fn predict(&self, batch: &Batch) -> Vec<f64> {
        column(self.head.infer(&self.embed(batch)))
    }

    fn forward_train(&mut self, batch: &Batch, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let b = &batch.parts[0];
        let pooled = mean_pool(&self.stack.forward(b), &b.segments);
        column(self.head.forward(pooled, rng))
    }

    fn backward(&mut self, batch: &Batch, dlogits: &[f64]) {
        let b = &batch.parts[0];
        let dpooled = self.head.backward(&dcolumn(dlogits));
        self.stack.backward(&mean_pool_backward(&dpooled, &b.segments, b.x.nrows()), b);
    }

    fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = self.stack.params_mut();
        out.extend(self.head.params_mut());
        out
    }

    fn state(&self) -> Vec<&Tensor> {
        let mut out = self.stack.state();
        out.extend(self.head.state());
        out
    }

    fn state_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = self.stack.state_mut();
        out.extend(self.head.state_mut());
        out
    }
}

/// Baseline ignoring graph structure: mean of the raw node features fed
/// through an MLP.
#[derive(Clone, Debug)]
pub struct MlpBaseline {
    input: Linear,
    relu: Relu,
    head: Head,
    indices: IndexEncoding,
}

impl MlpBaseline {
    pub fn new(rng: &mut ChaCha8Rng) -> MlpBaseline {
        MlpBaseline {
            input: Linear::new(FEATURE_WIDTH, HIDDEN, rng),
            relu: Relu::default(),
            head: Head::new(HIDDEN, HEAD_HIDDEN, DROPOUT, rng),
            indices: IndexEncoding::Raw,
        }
    }
}

impl GraphClassifier for MlpBaseline {
    fn kind(&self) -> ModelKind {
        ModelKind::Mlp
    }

    fn indices(&self) -> IndexEncoding {
        self.indices
    }

    fn set_indices(&mut self, indices: IndexEncoding) {
        self.indices = indices;
    }

    fn prepare(&self, graphs: &[&EncodedGraph]) -> Batch {
        Batch { parts: vec![GraphBatch::new(graphs, View::Union, self.indices)] }
    }

    fn predict(&self, batch: &Batch) -> Vec<f64> {
        let b = &batch.parts[0];
        let pooled = mean_pool(&b.x, &b.segments);
        column(self.head.infer(&Relu::infer(&self.input.infer(&pooled))))
    }

    fn forward_train(&mut self, batch: &Batch, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let b = &batch.parts[0];
        let pooled = mean_pool(&b.x, &b.segments);
        let h = self.relu.forward(self.input.forward(pooled));
        column(self.head.forward(h, rng))
    }

    fn backward(&mut self, _batch: &Batch, dlogits: &[f64]) {
        let d = self.head.backward(&dcolumn(dlogits));
        self.input.backward(&self.relu.backward(&d));
    }

    fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out: Vec<&mut Param> = self.input.params_mut().into();
        out.extend(self.head.params_mut());
        out
    }

    fn state(&self) -> Vec<&Tensor> {
        let mut out: Vec<&Tensor> = self.input.state().into();
        out.extend(self.head.state());
        out
    }

    fn state_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = self.input.state_mut().into();
        out.extend(self.head.state_mut());
        out
    }
}

/// Baseline learning the system graph and the specification tree
/// separately (no union edges), concatenating the two pooled embeddings.
#[derive(Clone, Debug)]
pub struct LinkPredictor {
    system: ConvStack,
    tree: ConvStack,
    head: Head,
    indices: IndexEncoding,
}

impl LinkPredictor {
    pub fn new(rng: &mut ChaCha8Rng) -> LinkPredictor {
        LinkPredictor {
            system: ConvStack::new(ConvKind::Gcn, FEATURE_WIDTH, HIDDEN, DEPTH, rng),
            tree: ConvStack::new(ConvKind::Gcn, FEATURE_WIDTH, HIDDEN, DEPTH, rng),
            head: Head::new(2 * HIDDEN, HEAD_HIDDEN, DROPOUT, rng),
            indices: IndexEncoding::Raw,
        }
    }

    fn concat(a: Tensor, b: Tensor) -> Tensor {
        ndarray::concatenate![ndarray::Axis(1), a, b]
    }
}

impl GraphClassifier for LinkPredictor {
    fn kind(&self) -> ModelKind {
        ModelKind::Link
    }

    fn indices(&self) -> IndexEncoding {
        self.indices
    }

    fn set_indices(&mut self, indices: IndexEncoding) {
        self.indices = indices;
    }

    fn prepare(&self, graphs: &[&EncodedGraph]) -> Batch {
        Batch {
            parts: vec![
                GraphBatch::new(graphs, View::System, self.indices),
                GraphBatch::new(graphs, View::Tree, self.indices),
            ],
        }
    }

    fn predict(&self, batch: &Batch) -> Vec<f64> {
        let (s, t) = (&batch.parts[0], &batch.parts[1]);
        let e =
            Self::concat(mean_pool(&self.system.infer(s), &s.segments), mean_pool(&self.tree.infer(t), &t.segments));
        column(self.head.infer(&e))
    }

    fn forward_train(&mut self, batch: &Batch, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let (s, t) = (&batch.parts[0], &batch.parts[1]);
        let es = mean_pool(&self.system.forward(s), &s.segments);
        let et = mean_pool(&self.tree.forward(t), &t.segments);
        column(self.head.forward(Self::concat(es, et), rng))
    }

    fn backward(&mut self, batch: &Batch, dlogits: &[f64]) {
        let (s, t) = (&batch.parts[0], &batch.parts[1]);
        let d = self.head.backward(&dcolumn(dlogits));
        let ds = d.slice(ndarray::s![.., ..HIDDEN]).to_owned();
        let dt = d.slice(ndarray::s![.., HIDDEN..]).to_owned();
        self.system.backward(&mean_pool_backward(&ds, &s.segments, s.x.nrows()), s);
        self.tree.backward(&mean_pool_backward(&dt, &t.segments, t.x.nrows()), t);
    }

    fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut out = self.system.params_mut();
        out.extend(self.tree.params_mut());
        out.extend(self.head.params_mut());
        out
    }

    fn state(&self) -> Vec<&Tensor> {
        let mut out = self.system.state();
        out.extend(self.tree.state());
        out.extend(self.head.state());
        out
    }

    fn state_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = self.system.state_mut();
        out.extend(self.tree.state_mut());
        out.extend(self.head.state_mut());
        out
    }
}

pub struct ModelEntry {
    pub kind: ModelKind,
    pub summary: &'static str,
    build: fn(&mut ChaCha8Rng) -> Box<dyn GraphClassifier>,
}

impl ModelEntry {
    pub fn build(&self, seed: u64) -> Box<dyn GraphClassifier> {
        (self.build)(&mut ChaCha8Rng::seed_from_u64(seed))
    }
}

pub static MODELS: [ModelEntry; 4] = [
    ModelEntry {
        kind: ModelKind::Gin,
        summary: "3-layer GIN on the union graph",
        build: |rng| Box::new(GnnClassifier::new(ConvKind::Gin, rng)),
    },
    ModelEntry {
        kind: ModelKind::Gcn,
        summary: "3-layer GCN on the union graph",
        build: |rng| Box::new(GnnClassifier::new(ConvKind::Gcn, rng)),
    },
    ModelEntry {
        kind: ModelKind::Mlp,
        summary: "MLP on mean raw node features",
        build: |rng| Box::new(MlpBaseline::new(rng)),
    },
    ModelEntry {
        kind: ModelKind::Link,
        summary: "separate GCNs on system graph and formula tree",
        build: |rng| Box::new(LinkPredictor::new(rng)),
    },
];

pub fn model_entry(kind: ModelKind) -> &'static ModelEntry {
    MODELS.iter().find(|e| e.kind == kind).expect("every kind is registered")
}

/// Fresh model with seeded Glorot initialisation.
pub fn build_model(kind: ModelKind, seed: u64) -> Box<dyn GraphClassifier> {
    model_entry(kind).build(seed)
}
