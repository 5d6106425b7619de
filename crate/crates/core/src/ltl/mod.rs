//! LTL formulas: syntax tree, textual syntax, negation normal form and
//! random generation.

mod formula;
mod nnf;
mod parse;
mod random;

pub use formula::{formula_length, BinaryOp, Formula, UnaryOp, Var};
pub use nnf::to_nnf;
pub use parse::{parse_ltl, ParseError};
pub use random::{random_formula, GenConfig, GenConfigError, OpWeights};

/// Prints `f` in the textual syntax accepted by [`parse_ltl`].
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}
