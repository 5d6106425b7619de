//! Büchi automata and the classical model checker: LTL translation,
//! synchronous product, nested-DFS emptiness, and a lasso-word semantics
//! oracle used to cross-check all of them.

mod buchi;
mod check;
mod emptiness;
mod hoa;
mod lasso;
mod product;
mod translate;

pub use buchi::{AutomatonError, Buchi, Label, Transition};
pub use check::{equivalent, holds, satisfiable, satisfies, valid};
pub use emptiness::{check_emptiness, is_empty, Emptiness};
pub use hoa::{emit_hoa, parse_hoa, HoaError};
pub use lasso::{accepts, eval_lasso, LassoError, LassoWord};
pub use product::product;
pub use translate::translate;
