//! Core of the neural LTL model-checking toolkit: LTL formulas, Büchi
//! automata with a classical model checker, and the union-graph encoding of
//! a (system, specification) pair.

pub mod automata;
pub mod encoding;
pub mod ltl;
