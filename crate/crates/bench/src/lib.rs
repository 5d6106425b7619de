//! Classical-versus-neural timing harness and the check-engine registry.

pub mod engine;
pub mod report;
pub mod timing;

pub use engine::{
    build_engine, CheckEngine, CheckInput, ClassicalEngine, EngineError, EngineOptions, NeuralEngine, Verdict, ENGINES,
};
pub use report::{read_report, spearman, speedup_report, write_report, SpeedupReport, SpeedupRow};
pub use timing::{time_classical, time_dataset, time_neural, time_sample, BenchError, TimingRecord, REPEATS};
