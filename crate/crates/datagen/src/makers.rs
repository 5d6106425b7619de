//! Constructions of a system formula `φ′` standing in a chosen relation to
//! the specification `φ`, each returning `φ′` and its automaton.

use ltlgnn_core::automata::{holds, is_empty, satisfiable, translate, Buchi};
use ltlgnn_core::ltl::{random_formula, to_nnf, Formula, GenConfig};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MakerError {
    #[error("specification is unsatisfiable")]
    Unsatisfiable,
    #[error("specification is valid")]
    Valid,
    #[error("no suitable formula within {0} attempts")]
    RetriesExhausted(usize),
    #[error("system automaton has {0} states, above the cap")]
    TooLarge(usize),
}

/// Shared knobs of the randomised makers.
#[derive(Clone, Debug, PartialEq)]
pub struct MakerConfig {
    /// Generator for `ψ` and overlap candidates; sizes are set per call.
    pub gen: GenConfig,
    pub retries: usize,
    pub max_states: usize,
}

impl Default for MakerConfig {
    fn default() -> Self {
        MakerConfig { gen: GenConfig::default(), retries: 50, max_states: 95 }
    }
}

pub type Made = (Formula, Buchi);

fn system(phi_src: &Formula, cfg: &MakerConfig) -> Result<Buchi, MakerError> {
    let b = translate(&to_nnf(phi_src));
    if b.num_states() > cfg.max_states {
        return Err(MakerError::TooLarge(b.num_states()));
    }
    Ok(b)
}

/// `ψ` is drawn at half the size of `φ`.
fn side_formula<R: Rng + ?Sized>(phi: &Formula, cfg: &MakerConfig, rng: &mut R) -> Formula {
    random_formula(&cfg.gen.with_size((phi.len() / 2).max(1)), rng)
}

/// `φ′ = φ`.
pub fn make_equivalent(phi: &Formula, cfg: &MakerConfig) -> Result<Made, MakerError> {
    if !satisfiable(phi) {
        return Err(MakerError::Unsatisfiable);
    }
    Ok((phi.clone(), system(phi, cfg)?))
}

/// `φ′ = φ & ψ` with `φ′` satisfiable and `φ ⊭ φ′`.
pub fn make_strict_implicant<R: Rng + ?Sized>(
    phi: &Formula,
    cfg: &MakerConfig,
    rng: &mut R,
) -> Result<Made, MakerError> {
    retry(cfg, || {
        let src = Formula::and(phi.clone(), side_formula(phi, cfg, rng));
        (satisfiable(&src) && !holds(phi, &src)).then_some(src)
    })
}

/// Random `φ′` of `φ`'s size with both `φ′ & φ` and `φ′ & !φ` satisfiable.
pub fn make_overlap<R: Rng + ?Sized>(phi: &Formula, cfg: &MakerConfig, rng: &mut R) -> Result<Made, MakerError> {
    let gen = cfg.gen.with_size(phi.len());
    retry(cfg, || {
        let src = random_formula(&gen, rng);
        let inside = Formula::and(src.clone(), phi.clone());
        let outside = Formula::and(src.clone(), Formula::not(phi.clone()));
        (satisfiable(&to_nnf(&inside)) && satisfiable(&to_nnf(&outside))).then_some(src)
    })
}

/// `φ′ = nnf(!φ)`.
pub fn make_disjoint(phi: &Formula, cfg: &MakerConfig) -> Result<Made, MakerError> {
    let src = to_nnf(&Formula::not(phi.clone()));
    if !satisfiable(&src) {
        return Err(MakerError::Valid);
    }
    let b = system(&src, cfg)?;
    debug_assert!(is_empty(&ltlgnn_core::automata::product(&b, &translate(&to_nnf(phi)))));
    Ok((src, b))
}

/// `φ′ = φ | ψ` with `φ′ ⊭ φ`.
pub fn make_reverse_implicant<R: Rng + ?Sized>(
    phi: &Formula,
    cfg: &MakerConfig,
    rng: &mut R,
) -> Result<Made, MakerError> {
    retry(cfg, || {
        let src = Formula::or(phi.clone(), side_formula(phi, cfg, rng));
        (!holds(&src, phi)).then_some(src)
    })
}

/// Draws candidates until one qualifies and its automaton fits the cap.
fn retry(cfg: &MakerConfig, mut candidate: impl FnMut() -> Option<Formula>) -> Result<Made, MakerError> {
    for _ in 0..cfg.retries {
        if let Some(src) = candidate() {
            if let Ok(b) = system(&src, cfg) {
                return Ok((src, b));
            }
        }
    }
    Err(MakerError::RetriesExhausted(cfg.retries))
}
