use super::buchi::Buchi;
use super::emptiness::is_empty;
use super::product::product;
use super::translate::translate;
use crate::ltl::{to_nnf, Formula};

/// `L(source) ⊆ L(spec)`, decided as emptiness of the automaton for
/// `source & !spec`.
pub fn holds(source: &Formula, spec: &Formula) -> bool {
    let query = Formula::and(source.clone(), Formula::not(spec.clone()));
    is_empty(&translate(&to_nnf(&query)))
}

pub fn equivalent(a: &Formula, b: &Formula) -> bool {
    holds(a, b) && holds(b, a)
}

pub fn satisfiable(f: &Formula) -> bool {
    !is_empty(&translate(f))
}

pub fn valid(f: &Formula) -> bool {
    !satisfiable(&Formula::not(f.clone()))
}

/// Classical model check of an automaton system: every word of `system`
/// satisfies `spec` iff `system × A(!spec)` is empty.
pub fn satisfies(system: &Buchi, spec: &Formula) -> bool {
    let negated = translate(&to_nnf(&Formula::not(spec.clone())));
    is_empty(&product(system, &negated))
}
