use log::debug;
use ltlgnn_core::automata::{satisfiable, valid};
use ltlgnn_core::ltl::{random_formula, to_nnf, Formula, GenConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::makers::{
    make_disjoint, make_equivalent, make_overlap, make_reverse_implicant, make_strict_implicant, Made, MakerConfig,
    MakerError,
};
use crate::sample::{Case, Sample, Scenario, Split};

pub const MAX_FORMULA_LENGTH: usize = 80;
pub const MAX_STATES: usize = 95;
/// Default variable pool. Four letters make most implicant side formulas
/// reuse the specification's variables, which starves the learners.
pub const DATASET_VARS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetConfig {
    pub scenario: Scenario,
    /// Number of specifications; each contributes 4 (general) or 2 (special) samples.
    pub specs: usize,
    /// `gen.size` is the largest specification size.
    pub gen: GenConfig,
    /// Specification sizes are uniform in `min_size..=gen.size`.
    pub min_size: usize,
    pub retries: usize,
    pub seed: u64,
    /// Fraction of specifications whose samples form the test split.
    pub test_fraction: f64,
    pub max_formula_length: usize,
    pub max_states: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            scenario: Scenario::General,
            specs: 100,
            gen: GenConfig { num_vars: DATASET_VARS, ..GenConfig::default() },
            min_size: 5,
            retries: 50,
            seed: 0,
            test_fraction: 0.1,
            max_formula_length: MAX_FORMULA_LENGTH,
            max_states: MAX_STATES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Gen(#[from] ltlgnn_core::ltl::GenConfigError),
    #[error("minimum size {min} exceeds maximum size {max}")]
    SizeRange { min: usize, max: usize },
    #[error("caps exceed the supported envelope (formula length <= {MAX_FORMULA_LENGTH}, states <= {MAX_STATES})")]
    Caps,
    #[error("test fraction must lie in [0, 1)")]
    TestFraction,
    #[error("retry cap must be positive")]
    Retries,
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.gen.validate()?;
        if self.min_size == 0 || self.min_size > self.gen.size {
            return Err(ConfigError::SizeRange { min: self.min_size, max: self.gen.size });
        }
        if self.max_formula_length > MAX_FORMULA_LENGTH
            || self.max_states > MAX_STATES
            || self.max_formula_length == 0
            || self.max_states == 0
        {
            return Err(ConfigError::Caps);
        }
        if !(0.0..1.0).contains(&self.test_fraction) {
            return Err(ConfigError::TestFraction);
        }
        if self.retries == 0 {
            return Err(ConfigError::Retries);
        }
        Ok(())
    }

    fn maker_config(&self) -> MakerConfig {
        MakerConfig { gen: self.gen.clone(), retries: self.retries, max_states: self.max_states }
    }
}

/// Counts reported alongside a generated dataset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenerationStats {
    pub candidates: usize,
    pub trivial: usize,
    pub skipped: usize,
    pub accepted: usize,
}

/// Samples of one candidate specification before split assignment. The
/// special scenario keeps both zero-case alternatives; the spec's ordinal
/// among accepted specs picks one.
struct Group {
    phi: Formula,
    first: Vec<(Made, Case)>,
    alternatives: Option<[(Made, Case); 2]>,
}

fn candidate(cfg: &DatasetConfig, index: u64) -> Result<Option<Group>, MakerError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let size = rng.random_range(cfg.min_size..=cfg.gen.size);
    let phi = to_nnf(&random_formula(&cfg.gen.with_size(size), &mut rng));
    if phi.len() > cfg.max_formula_length || !satisfiable(&phi) || valid(&phi) {
        return Ok(None);
    }
    let mc = cfg.maker_config();
    let eq = (make_equivalent(&phi, &mc)?, Case::Equivalent);
    let strict = (make_strict_implicant(&phi, &mc, &mut rng)?, Case::StrictImplication);
    let group = match cfg.scenario {
        Scenario::General => {
            let overlap = (make_overlap(&phi, &mc, &mut rng)?, Case::Overlap);
            let disjoint = (make_disjoint(&phi, &mc)?, Case::Disjoint);
            Group { phi, first: vec![eq, strict, overlap, disjoint], alternatives: None }
        }
        Scenario::Special => {
            let other = match index % 3 {
                0 => (make_overlap(&phi, &mc, &mut rng)?, Case::Overlap),
                1 => (make_disjoint(&phi, &mc)?, Case::Disjoint),
                _ => (make_reverse_implicant(&phi, &mc, &mut rng)?, Case::ReverseImplication),
            };
            Group { phi, first: vec![eq], alternatives: Some([strict, other]) }
        }
    };
    Ok(Some(group))
}

fn label_for(scenario: Scenario, case: Case) -> bool {
    match case {
        Case::Equivalent => true,
        Case::StrictImplication => scenario == Scenario::General,
        Case::Overlap | Case::Disjoint | Case::ReverseImplication => false,
    }
}

const ROUND: usize = 64;

/// Generates `cfg.specs` specifications with their paired systems.
///
/// Candidates are drawn from independent per-index random streams and
/// processed in parallel rounds; accepted groups are kept in index order,
/// so the output depends only on `cfg`. Valid and unsatisfiable
/// specifications are discarded, as is any specification for which a maker
/// fails. Every label is re-checked with the classical oracle.
pub fn generate_dataset(cfg: &DatasetConfig) -> Result<(Vec<Sample>, GenerationStats), ConfigError> {
    cfg.validate()?;
    let mut stats = GenerationStats::default();
    let mut groups: Vec<Group> = Vec::with_capacity(cfg.specs);
    let mut next = 0u64;
    while groups.len() < cfg.specs {
        let round: Vec<_> = (next..next + ROUND as u64).into_par_iter().map(|i| (i, candidate(cfg, i))).collect();
        next += ROUND as u64;
        for (i, result) in round {
            if groups.len() == cfg.specs {
                break;
            }
            stats.candidates += 1;
            match result {
                Ok(Some(g)) => groups.push(g),
                Ok(None) => stats.trivial += 1,
                Err(e) => {
                    stats.skipped += 1;
                    debug!("candidate {i} skipped: {e}");
                }
            }
        }
    }
    stats.accepted = groups.len();

    let mut order: Vec<usize> = (0..groups.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX);
    order.shuffle(&mut rng);
    let n_test = (groups.len() as f64 * cfg.test_fraction).round() as usize;
    let mut split = vec![Split::Train; groups.len()];
    for &k in &order[..n_test] {
        split[k] = Split::Test;
    }

    let samples: Vec<Vec<Sample>> = groups
        .into_par_iter()
        .enumerate()
        .map(|(k, g)| {
            let mut made = g.first;
            if let Some([strict, other]) = g.alternatives {
                made.push(if k % 2 == 0 { strict } else { other });
            }
            made.into_iter()
                .map(|((phi_src, system), case)| {
                    let label = label_for(cfg.scenario, case);
                    assert_eq!(
                        cfg.scenario.oracle(&phi_src, &g.phi),
                        label,
                        "oracle disagrees on {case} for {}",
                        g.phi
                    );
                    Sample { phi: g.phi.clone(), phi_src, system, label, case, split: split[k] }
                })
                .collect()
        })
        .collect();
    Ok((samples.into_iter().flatten().collect(), stats))
}
