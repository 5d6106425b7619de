use std::io;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use ltlgnn_core::encoding::IndexEncoding;

use crate::batch::EncodedGraph;
use crate::loss::bce_batch;
use crate::metrics::Confusion;
use crate::model::{build_model, GraphClassifier, ModelKind};
use crate::optim::Adam;
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without a new best validation accuracy before stopping.
    pub patience: usize,
    pub val_fraction: f64,
    pub seed: u64,
    pub runs: usize,
    /// Part VI encoding given to the fresh model.
    pub indices: IndexEncoding,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 1e-5,
            batch_size: 32,
            max_epochs: 100,
            patience: 5,
            val_fraction: 0.2,
            seed: 0,
            runs: 5,
            indices: IndexEncoding::Raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("invalid training configuration: {0}")]
    Config(&'static str),
    #[error("training data is empty")]
    Empty,
    #[error("training data holds a single class")]
    SingleClass,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(TrainError::Config("learning rate must be positive"));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(TrainError::Config("batch size and epoch count must be positive"));
        }
        if self.patience == 0 {
            return Err(TrainError::Config("patience must be at least 1"));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(TrainError::Config("validation fraction must lie strictly between 0 and 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub graph: EncodedGraph,
    pub label: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
}

pub struct TrainOutcome {
    pub model: Box<dyn GraphClassifier>,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub train_indices: Vec<usize>,
    pub val_indices: Vec<usize>,
}

/// Shuffles each class separately and sends `val_fraction` of it to
/// validation, so both splits keep the class ratio of `labels`.
pub fn stratified_split(labels: &[bool], val_fraction: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(rng);
        let n_val = (idx.len() as f64 * val_fraction).round() as usize;
        val.extend_from_slice(&idx[..n_val]);
        train.extend_from_slice(&idx[n_val..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    (train, val)
}

const EVAL_CHUNK: usize = 64;

/// Eval-mode logits for `graphs`, computed in parallel over fixed chunks.
pub fn predict_logits(model: &dyn GraphClassifier, graphs: &[&EncodedGraph]) -> Vec<f64> {
    graphs.par_chunks(EVAL_CHUNK).flat_map_iter(|chunk| model.predict(&model.prepare(chunk))).collect()
}

pub fn evaluate(model: &dyn GraphClassifier, data: &[&LabeledGraph]) -> Confusion {
    let graphs: Vec<&EncodedGraph> = data.iter().map(|d| &d.graph).collect();
    let predicted: Vec<bool> = predict_logits(model, &graphs).iter().map(|&z| z > 0.0).collect();
    let labels: Vec<bool> = data.iter().map(|d| d.label).collect();
    Confusion::from_predictions(&predicted, &labels)
}

pub fn train(kind: ModelKind, cfg: &TrainConfig, data: &[LabeledGraph]) -> Result<TrainOutcome, TrainError> {
    let mut model = build_model(kind, cfg.seed);
    model.set_indices(cfg.indices);
    train_model(model, cfg, data)
}

/// Mini-batch Adam on mean BCE. One checkpoint per epoch; stops once
/// validation accuracy has not improved for `patience` epochs and restores
/// the best checkpoint. Single-threaded apart from validation inference.
pub fn train_model(
    mut model: Box<dyn GraphClassifier>,
    cfg: &TrainConfig,
    data: &[LabeledGraph],
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(TrainError::Empty);
    }
    let labels: Vec<bool> = data.iter().map(|d| d.label).collect();
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(TrainError::SingleClass);
    }
    let mut split_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    split_rng.set_stream(1);
    let (train_indices, val_indices) = stratified_split(&labels, cfg.val_fraction, &mut split_rng);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(2);

    let val: Vec<&LabeledGraph> = val_indices.iter().map(|&i| &data[i]).collect();
    let mut opt = Adam::new(cfg.lr);
    let mut order = train_indices.clone();
    let mut history = Vec::new();
    let mut best: Option<(f64, usize, Vec<Tensor>)> = None;
    model.zero_grad();
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let graphs: Vec<&EncodedGraph> = chunk.iter().map(|&i| &data[i].graph).collect();
            let targets: Vec<f64> = chunk.iter().map(|&i| f64::from(u8::from(data[i].label))).collect();
            let batch = model.prepare(&graphs);
            let logits = model.forward_train(&batch, &mut rng);
            let (loss, grads) = bce_batch(&logits, &targets);
            loss_sum += loss * chunk.len() as f64;
            model.backward(&batch, &grads);
            opt.step(model.params_mut());
        }
        let val_accuracy = evaluate(model.as_ref(), &val).accuracy();
        history.push(EpochRecord { epoch, train_loss: loss_sum / order.len() as f64, val_accuracy });
        match &best {
            Some((acc, _, _)) if val_accuracy <= *acc => {}
            _ => best = Some((val_accuracy, epoch, model.state().into_iter().cloned().collect())),
        }
        let best_epoch = best.as_ref().map_or(epoch, |b| b.1);
        if epoch - best_epoch >= cfg.patience {
            break;
        }
    }
    let (_, best_epoch, state) = best.expect("at least one epoch ran");
    for (slot, t) in model.state_mut().into_iter().zip(state) {
        *slot = t;
    }
    Ok(TrainOutcome { model, history, best_epoch, train_indices, val_indices })
}

pub fn write_history<W: io::Write>(history: &[EpochRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in history {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
