//! Graph neural classifiers over union graphs: GIN and GCN models, MLP and
//! link-predictor baselines, Adam training with early stopping, and a binary
//! checkpoint format. Tensors are dense `f64` matrices with hand-derived
//! backward passes.

pub mod batch;
pub mod checkpoint;
pub mod conv;
pub mod layers;
pub mod loss;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod sparse;
pub mod tensor;
pub mod train;

pub use batch::{mean_pool, EncodedGraph, GraphBatch, View};
pub use checkpoint::{load_checkpoint, load_checkpoint_as, save_checkpoint, CheckpointError};
pub use loss::{bce_loss, sigmoid};
pub use ltlgnn_core::encoding::IndexEncoding;
pub use metrics::{Confusion, Metrics, Stat};
pub use model::{build_model, Batch, GraphClassifier, ModelKind, UnknownModel, MODELS};
pub use optim::Adam;
pub use tensor::{Param, Tensor};
pub use train::{
    evaluate, predict_logits, train, train_model, write_history, EpochRecord, LabeledGraph, TrainConfig, TrainError,
    TrainOutcome,
};
