use super::formula::{BinaryOp, Formula, UnaryOp};

/// Rewrites `f` into negation normal form: `!` only directly above variables.
///
/// Dualities: De Morgan over `&`/`|`, `G`/`F`, `X` self-dual, `U`/`R`, `W`/`M`,
/// and `1`/`N`. The result is language-equivalent to `f`.
pub fn to_nnf(f: &Formula) -> Formula {
    push(f, false)
}

fn push(f: &Formula, negated: bool) -> Formula {
    match f {
        Formula::True if negated => Formula::False,
        Formula::False if negated => Formula::True,
        Formula::True | Formula::False => f.clone(),
        Formula::Var(v) => {
            if negated {
                Formula::not(Formula::Var(*v))
            } else {
                Formula::Var(*v)
            }
        }
        Formula::Unary(UnaryOp::Not, inner) => push(inner, !negated),
        Formula::Unary(op, inner) => {
            let op = match (op, negated) {
                (UnaryOp::Globally, true) => UnaryOp::Finally,
                (UnaryOp::Finally, true) => UnaryOp::Globally,
                (op, _) => *op,
            };
            Formula::unary(op, push(inner, negated))
        }
        Formula::Binary(op, l, r) => {
            let op = if negated { dual(*op) } else { *op };
            Formula::binary(op, push(l, negated), push(r, negated))
        }
    }
}

fn dual(op: BinaryOp) -> BinaryOp {
    match op {
        BinaryOp::Until => BinaryOp::Release,
        BinaryOp::Release => BinaryOp::Until,
        BinaryOp::WeakUntil => BinaryOp::StrongRelease,
        BinaryOp::StrongRelease => BinaryOp::WeakUntil,
        BinaryOp::And => BinaryOp::Or,
        BinaryOp::Or => BinaryOp::And,
    }
}
