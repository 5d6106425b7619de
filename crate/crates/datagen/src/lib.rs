//! Synthesis of labelled (system, specification) datasets. Each
//! specification is paired with systems built to be equivalent to it,
//! strictly stronger, overlapping, disjoint, or strictly weaker; the
//! classical checker confirms every label.

pub mod generate;
pub mod makers;
pub mod sample;

pub use generate::{
    generate_dataset, ConfigError, DatasetConfig, GenerationStats, DATASET_VARS, MAX_FORMULA_LENGTH, MAX_STATES,
};
pub use makers::{
    make_disjoint, make_equivalent, make_overlap, make_reverse_implicant, make_strict_implicant, MakerConfig,
    MakerError,
};
pub use sample::{read_jsonl, write_jsonl, Case, JsonlError, Sample, Scenario, Split, UnknownTag};
