use rand::Rng;
use thiserror::Error;

use super::buchi::Buchi;
use crate::ltl::{BinaryOp, Formula, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("lasso cycle must be nonempty")]
    EmptyCycle,
    #[error("assignment at position {0} sets a variable outside the pool")]
    OutsidePool(usize),
    #[error("variable {0} is not covered by the word's assignments")]
    MissingVariable(Var),
}

/// Ultimately periodic word `prefix · cycle^ω`. Each letter is an assignment
/// over the variable pool, bit set = variable true.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoWord {
    pool: u32,
    prefix: Vec<u32>,
    cycle: Vec<u32>,
}

impl LassoWord {
    pub fn new(pool: u32, prefix: Vec<u32>, cycle: Vec<u32>) -> Result<LassoWord, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyCycle);
        }
        if let Some(i) = prefix.iter().chain(&cycle).position(|a| a & !pool != 0) {
            return Err(LassoError::OutsidePool(i));
        }
        Ok(LassoWord { pool, prefix, cycle })
    }

    /// Uniform letters over `pool`, prefix length in `0..=max_prefix`, cycle
    /// length in `1..=max_cycle`.
    pub fn random<R: Rng + ?Sized>(pool: u32, max_prefix: usize, max_cycle: usize, rng: &mut R) -> LassoWord {
        let letter = |rng: &mut R| rng.random::<u32>() & pool;
        let p = rng.random_range(0..=max_prefix);
        let c = rng.random_range(1..=max_cycle.max(1));
        let prefix = (0..p).map(|_| letter(rng)).collect();
        let cycle = (0..c).map(|_| letter(rng)).collect();
        LassoWord { pool, prefix, cycle }
    }

    pub fn pool(&self) -> u32 {
        self.pool
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[u32] {
        &self.cycle
    }

    /// Number of distinct positions: `|prefix| + |cycle|`.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn letter(&self, i: usize) -> u32 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[i - self.prefix.len()]
        }
    }

    /// Position reached after reading position `i`.
    pub fn successor(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Decides `w ⊨ f` by computing each subformula's truth value on every
/// lasso position, solving `U`/`F`/`M` as least and `R`/`G`/`W` as greatest
/// fixpoints of their one-step unfolding.
pub fn eval_lasso(f: &Formula, w: &LassoWord) -> Result<bool, LassoError> {
    if let Some(v) = Var::iter_mask(f.vars() & !w.pool).next() {
        return Err(LassoError::MissingVariable(v));
    }
    Ok(truth(f, w)[0])
}

fn truth(f: &Formula, w: &LassoWord) -> Vec<bool> {
    let n = w.positions();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Var(v) => (0..n).map(|i| w.letter(i) & v.bit() != 0).collect(),
        Formula::Unary(op, inner) => {
            let x = truth(inner, w);
            match op {
                UnaryOp::Not => x.iter().map(|b| !b).collect(),
                UnaryOp::Next => (0..n).map(|i| x[w.successor(i)]).collect(),
                UnaryOp::Finally => fixpoint(w, false, |i, next| x[i] || next),
                UnaryOp::Globally => fixpoint(w, true, |i, next| x[i] && next),
            }
        }
        Formula::Binary(op, l, r) => {
            let a = truth(l, w);
            let b = truth(r, w);
            match op {
                BinaryOp::And => (0..n).map(|i| a[i] && b[i]).collect(),
                BinaryOp::Or => (0..n).map(|i| a[i] || b[i]).collect(),
                BinaryOp::Until => fixpoint(w, false, |i, next| b[i] || (a[i] && next)),
                BinaryOp::WeakUntil => fixpoint(w, true, |i, next| b[i] || (a[i] && next)),
                BinaryOp::Release => fixpoint(w, true, |i, next| b[i] && (a[i] || next)),
                BinaryOp::StrongRelease => fixpoint(w, false, |i, next| b[i] && (a[i] || next)),
            }
        }
    }
}

/// Iterates `val[i] = step(i, val[succ(i)])` from the constant `start`
/// until stable. Monotone steps converge within `n + 1` sweeps.
fn fixpoint(w: &LassoWord, start: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = w.positions();
    let mut val = vec![start; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let v = step(i, val[w.successor(i)]);
            if v != val[i] {
                val[i] = v;
                changed = true;
            }
        }
        if !changed {
            return val;
        }
    }
}

/// Whether some run of `b` over `w` visits an accepting state infinitely
/// often. Builds the product of the lasso's position graph with `b` and looks
/// for a reachable cycle through an accepting product node.
///
/// Variables outside `w`'s pool read as false.
pub fn accepts(b: &Buchi, w: &LassoWord) -> bool {
    let n = w.positions();
    let out = b.outgoing();
    let node = |pos: usize, q: usize| pos * b.num_states() + q;
    let successors = |id: usize| {
        let (pos, q) = (id / b.num_states(), id % b.num_states());
        let letter = w.letter(pos);
        let next = w.successor(pos);
        out[q]
            .iter()
            .map(|&t| &b.transitions()[t])
            .filter(move |t| t.label.satisfied_by(letter))
            .map(move |t| node(next, t.dst))
            .collect::<Vec<_>>()
    };
    let total = n * b.num_states();
    let search = |from: &[usize], target: Option<usize>| {
        let mut seen = vec![false; total];
        let mut stack: Vec<usize> = from.to_vec();
        for &s in from {
            seen[s] = true;
        }
        while let Some(x) = stack.pop() {
            for y in successors(x) {
                if Some(y) == target {
                    return (seen, true);
                }
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (seen, false)
    };
    let start = node(0, b.initial());
    let (reachable, _) = search(&[start], None);
    (0..total).filter(|&x| reachable[x] && b.is_accepting(x % b.num_states())).any(|x| search(&[x], Some(x)).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Label, Transition};
    use crate::ltl::parse_ltl;

    fn bits(s: &str) -> u32 {
        s.chars().fold(0, |m, c| m | Var::from_char(c).unwrap().bit())
    }

    #[test]
    fn until_hand_evaluated() {
        // ({a,b}, {a}) then cycle ({}): b first fails at step 1, a held before
        let w = LassoWord::new(bits("ab"), vec![bits("ab"), bits("a")], vec![0]).unwrap();
        assert!(eval_lasso(&parse_ltl("a U !b").unwrap(), &w).unwrap());
        assert!(!eval_lasso(&parse_ltl("G a").unwrap(), &w).unwrap());
        assert!(eval_lasso(&parse_ltl("1").unwrap(), &w).unwrap());
        assert!(eval_lasso(&parse_ltl("F G !a").unwrap(), &w).unwrap());
        assert!(eval_lasso(&parse_ltl("X X G !b").unwrap(), &w).unwrap());
        assert!(!eval_lasso(&parse_ltl("X X F b").unwrap(), &w).unwrap());
    }

    #[test]
    fn cyclic_fixpoints() {
        // (a)(!a) repeating: G F a and G F !a hold, F G a fails
        let w = LassoWord::new(bits("a"), vec![], vec![bits("a"), 0]).unwrap();
        let t = |s| eval_lasso(&parse_ltl(s).unwrap(), &w).unwrap();
        assert!(t("G F a"));
        assert!(t("G F !a"));
        assert!(!t("F G a"));
        assert!(t("a W N") == t("G a"));
        assert!(!t("a W N"));
        assert!(t("!a R (a | X a)"));
        assert!(!t("a M N"));
    }

    #[test]
    fn missing_variable_is_an_error() {
        let w = LassoWord::new(bits("a"), vec![], vec![0]).unwrap();
        assert_eq!(
            eval_lasso(&parse_ltl("a & b").unwrap(), &w),
            Err(LassoError::MissingVariable(Var::from_char('b').unwrap()))
        );
        assert_eq!(LassoWord::new(0, vec![], vec![]), Err(LassoError::EmptyCycle));
        assert_eq!(LassoWord::new(bits("a"), vec![bits("b")], vec![0]), Err(LassoError::OutsidePool(0)));
    }

    #[test]
    fn acceptance_corner_cases() {
        let w = LassoWord::new(bits("ab"), vec![bits("a")], vec![bits("b"), 0]).unwrap();
        assert!(accepts(&Buchi::universal([]), &w));
        let never = Buchi::new(1, 0, [], [], vec![Transition { src: 0, dst: 0, label: Label::TRUE }]).unwrap();
        assert!(!accepts(&never, &w));
        // accepting state only reachable through `b` in the prefix
        let lb = Label::from_literals([(Var::from_char('b').unwrap(), true)]).unwrap();
        let b = Buchi::new(
            2,
            0,
            [1],
            [Var::from_char('b').unwrap()],
            vec![Transition { src: 0, dst: 1, label: lb }, Transition { src: 1, dst: 1, label: Label::TRUE }],
        )
        .unwrap();
        assert!(!accepts(&b, &w));
        let w2 = LassoWord::new(bits("ab"), vec![bits("b")], vec![0]).unwrap();
        assert!(accepts(&b, &w2));
    }
}
