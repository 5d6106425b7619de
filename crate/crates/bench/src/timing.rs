use std::sync::Mutex;
use std::time::{Duration, Instant};

use ltlgnn_datagen::{Sample, Scenario};
use ltlgnn_neural::{EncodedGraph, GraphClassifier};
use thiserror::Error;

/// Held for the whole of every timed section so that measurements never
/// overlap, even when callers use several threads.
static TIMER: Mutex<()> = Mutex::new(());

pub const REPEATS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("sample {id}: classical verdict {verdict} disagrees with stored label {label}")]
    LabelMismatch { id: usize, verdict: bool, label: bool },
    #[error("sample {id}: {message}")]
    Encoding { id: usize, message: String },
}

/// Timings of one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct TimingRecord {
    pub id: usize,
    pub classical: Duration,
    /// Union-graph construction, feature encoding and batch packing.
    pub overhead: Duration,
    /// Eval-mode forward pass.
    pub inference: Duration,
    pub formula_length: usize,
    pub states: usize,
    pub transitions: usize,
    pub verdict: bool,
    pub logit: f64,
}

fn median_of<T>(mut run: impl FnMut() -> T) -> (Duration, T) {
    let _guard = TIMER.lock().unwrap_or_else(|e| e.into_inner());
    let mut times = Vec::with_capacity(REPEATS);
    let mut last = None;
    for _ in 0..REPEATS {
        let start = Instant::now();
        let out = std::hint::black_box(run());
        times.push(start.elapsed());
        last = Some(out);
    }
    times.sort();
    (times[REPEATS / 2], last.unwrap())
}

/// Median wall-clock time of the classical decision for `sample`, which
/// must agree with its stored label.
pub fn time_classical(id: usize, sample: &Sample, scenario: Scenario) -> Result<(Duration, bool), BenchError> {
    let (time, verdict) = median_of(|| scenario.oracle(&sample.phi_src, &sample.phi));
    if verdict != sample.label {
        return Err(BenchError::LabelMismatch { id, verdict, label: sample.label });
    }
    Ok((time, verdict))
}

/// Median overhead and inference times and the logit for `sample`.
pub fn time_neural(
    id: usize,
    model: &dyn GraphClassifier,
    sample: &Sample,
) -> Result<(Duration, Duration, f64), BenchError> {
    let encode = || -> Result<_, String> {
        let c = sample.union_graph().map_err(|e| e.to_string())?;
        let g = EncodedGraph::new(&c);
        Ok(model.prepare(&[&g]))
    };
    let (overhead, batch) = median_of(encode);
    let batch = batch.map_err(|message| BenchError::Encoding { id, message })?;
    let (inference, logits) = median_of(|| model.predict(&batch));
    Ok((overhead, inference, logits[0]))
}

pub fn time_sample(
    id: usize,
    model: &dyn GraphClassifier,
    sample: &Sample,
    scenario: Scenario,
) -> Result<TimingRecord, BenchError> {
    let (classical, verdict) = time_classical(id, sample, scenario)?;
    let (overhead, inference, logit) = time_neural(id, model, sample)?;
    Ok(TimingRecord {
        id,
        classical,
        overhead,
        inference,
        formula_length: sample.phi.len(),
        states: sample.system.num_states(),
        transitions: sample.system.transitions().len(),
        verdict,
        logit,
    })
}

/// Times every sample in order, single-threaded.
pub fn time_dataset(
    model: &dyn GraphClassifier,
    samples: &[Sample],
    scenario: Scenario,
) -> Result<Vec<TimingRecord>, BenchError> {
    samples.iter().enumerate().map(|(i, s)| time_sample(i, model, s, scenario)).collect()
}
