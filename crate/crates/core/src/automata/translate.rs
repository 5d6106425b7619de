//! LTL to Büchi translation through a tableau construction.
//!
//! The formula is normalized to a core of literals, `&`, `|`, `X`, `U` and
//! `R` (`G f = N R f`, `F f = 1 U f`, `a W b = (a U b) | G a`,
//! `a M b = b U (a & b)`). A tableau state is the set of obligations that
//! must hold at the current position. Expanding a state yields covers: a
//! literal conjunction for the current letter plus the obligations for the
//! next position. Every `U` subformula contributes one acceptance set of
//! covers (those where it is not pending or its right side holds). The
//! resulting generalized automaton is degeneralized with a level counter.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use super::buchi::{Buchi, Label, Transition};
use crate::ltl::{to_nnf, BinaryOp, Formula, UnaryOp, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(Var, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

/// Hash-consed subformula table.
#[derive(Default)]
struct Closure {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
}

impl Closure {
    fn add(&mut self, node: Node) -> usize {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node);
        self.index.insert(node, id);
        id
    }

    fn intern(&mut self, f: &Formula) -> usize {
        match f {
            Formula::True => self.add(Node::True),
            Formula::False => self.add(Node::False),
            Formula::Var(v) => self.add(Node::Lit(*v, true)),
            Formula::Unary(UnaryOp::Not, inner) => match **inner {
                Formula::Var(v) => self.add(Node::Lit(v, false)),
                _ => unreachable!("input is in negation normal form"),
            },
            Formula::Unary(UnaryOp::Next, inner) => {
                let a = self.intern(inner);
                self.add(Node::Next(a))
            }
            Formula::Unary(UnaryOp::Globally, inner) => {
                let (f, a) = (self.add(Node::False), self.intern(inner));
                self.add(Node::Release(f, a))
            }
            Formula::Unary(UnaryOp::Finally, inner) => {
                let (t, a) = (self.add(Node::True), self.intern(inner));
                self.add(Node::Until(t, a))
            }
            Formula::Binary(op, l, r) => {
                let (a, b) = (self.intern(l), self.intern(r));
                match op {
                    BinaryOp::And => self.add(Node::And(a, b)),
                    BinaryOp::Or => self.add(Node::Or(a, b)),
                    BinaryOp::Until => self.add(Node::Until(a, b)),
                    BinaryOp::Release => self.add(Node::Release(a, b)),
                    BinaryOp::WeakUntil => {
                        let until = self.add(Node::Until(a, b));
                        let f = self.add(Node::False);
                        let always = self.add(Node::Release(f, a));
                        self.add(Node::Or(until, always))
                    }
                    BinaryOp::StrongRelease => {
                        let both = self.add(Node::And(a, b));
                        self.add(Node::Until(b, both))
                    }
                }
            }
        }
    }
}

#[derive(Clone)]
struct Cover {
    label: Label,
    next: FixedBitSet,
    /// Acceptance sets (one per until) this cover belongs to.
    marks: FixedBitSet,
}

struct Tableau {
    closure: Closure,
    untils: Vec<usize>,
}

struct Partial {
    todo: Vec<usize>,
    old: FixedBitSet,
    next: FixedBitSet,
    label: Label,
}

impl Tableau {
    fn new(closure: Closure) -> Self {
        let untils = (0..closure.nodes.len()).filter(|&i| matches!(closure.nodes[i], Node::Until(..))).collect();
        Tableau { closure, untils }
    }

    fn covers(&self, obligations: &FixedBitSet) -> Vec<Cover> {
        let n = self.closure.nodes.len();
        let start = Partial {
            todo: obligations.ones().collect(),
            old: FixedBitSet::with_capacity(n),
            next: FixedBitSet::with_capacity(n),
            label: Label::TRUE,
        };
        let mut done = Vec::new();
        self.expand(start, &mut done);
        let mut covers: Vec<Cover> = done
            .into_iter()
            .map(|p| {
                let mut marks = FixedBitSet::with_capacity(self.untils.len());
                for (k, &u) in self.untils.iter().enumerate() {
                    let Node::Until(_, rhs) = self.closure.nodes[u] else { unreachable!() };
                    if !p.old.contains(u) || p.old.contains(rhs) {
                        marks.insert(k);
                    }
                }
                Cover { label: p.label, next: p.next, marks }
            })
            .collect();
        prune_subsumed(&mut covers);
        covers
    }

    fn expand(&self, mut p: Partial, done: &mut Vec<Partial>) {
        while let Some(id) = p.todo.pop() {
            if p.old.contains(id) {
                continue;
            }
            p.old.insert(id);
            match self.closure.nodes[id] {
                Node::True => {}
                Node::False => return,
                Node::Lit(v, positive) => match p.label.conjoin(Label::from_literals([(v, positive)]).unwrap()) {
                    Some(label) => p.label = label,
                    None => return,
                },
                Node::And(a, b) => p.todo.extend([a, b]),
                Node::Next(a) => p.next.insert(a),
                Node::Or(a, b) => {
                    let mut left = self.fork(&p);
                    left.todo.push(a);
                    self.expand(left, done);
                    p.todo.push(b);
                }
                Node::Until(a, b) => {
                    let mut now = self.fork(&p);
                    now.todo.push(b);
                    self.expand(now, done);
                    p.todo.push(a);
                    p.next.insert(id);
                }
                Node::Release(a, b) => {
                    let mut now = self.fork(&p);
                    now.todo.extend([a, b]);
                    self.expand(now, done);
                    p.todo.push(b);
                    p.next.insert(id);
                }
            }
        }
        done.push(p);
    }

    fn fork(&self, p: &Partial) -> Partial {
        Partial { todo: p.todo.clone(), old: p.old.clone(), next: p.next.clone(), label: p.label }
    }
}

/// Drops covers that another cover dominates: a weaker label, fewer next
/// obligations and at least the same acceptance marks.
fn prune_subsumed(covers: &mut Vec<Cover>) {
    let dominates =
        |a: &Cover, b: &Cover| a.label.implied_by(&b.label) && a.next.is_subset(&b.next) && b.marks.is_subset(&a.marks);
    let mut keep = vec![true; covers.len()];
    for i in 0..covers.len() {
        for j in 0..covers.len() {
            if i != j && keep[j] && dominates(&covers[j], &covers[i]) {
                // Of two mutually dominating (identical) covers keep the first.
                if !dominates(&covers[i], &covers[j]) || j < i {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    let mut it = keep.iter();
    covers.retain(|_| *it.next().unwrap());
}

/// Translates `f` into a Büchi automaton accepting exactly the words that
/// satisfy it. Non-NNF input is normalized first. Worst-case exponential in
/// the formula size.
pub fn translate(f: &Formula) -> Buchi {
    let nnf = to_nnf(f);
    let mut closure = Closure::default();
    let root = closure.intern(&nnf);
    let tableau = Tableau::new(closure);
    let n = tableau.closure.nodes.len();

    // Explore the generalized automaton over obligation sets.
    let mut initial = FixedBitSet::with_capacity(n);
    initial.insert(root);
    let mut ids: HashMap<FixedBitSet, usize> = HashMap::from([(initial.clone(), 0)]);
    let mut queue = VecDeque::from([initial]);
    let mut edges: Vec<Vec<(Label, usize, FixedBitSet)>> = Vec::new();
    while let Some(state) = queue.pop_front() {
        let mut out = Vec::new();
        for cover in tableau.covers(&state) {
            let next_id = ids.len();
            let target = *ids.entry(cover.next.clone()).or_insert_with(|| {
                queue.push_back(cover.next.clone());
                next_id
            });
            out.push((cover.label, target, cover.marks));
        }
        edges.push(out);
    }

    // Acceptance sets containing every transition impose nothing.
    let k_all = tableau.untils.len();
    let relevant: Vec<usize> =
        (0..k_all).filter(|&k| edges.iter().flatten().any(|(_, _, marks)| !marks.contains(k))).collect();
    let k = relevant.len();

    // Degeneralize: state (q, level); level k is accepting and restarts at 0.
    let aps: Vec<Var> = Var::iter_mask(nnf.vars()).collect();
    let levels = k + 1;
    let mut level_ids: HashMap<(usize, usize), usize> = HashMap::from([((0, 0), 0)]);
    let mut order = vec![(0usize, 0usize)];
    let mut transitions = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (q, level) = order[i];
        let base = if level == k { 0 } else { level };
        for (label, dst, marks) in &edges[q] {
            let mut j = base;
            while j < k && marks.contains(relevant[j]) {
                j += 1;
            }
            let fresh = order.len();
            let target = *level_ids.entry((*dst, j)).or_insert_with(|| {
                order.push((*dst, j));
                fresh
            });
            transitions.push(Transition { src: i, dst: target, label: *label });
        }
        i += 1;
    }
    debug_assert!(order.iter().all(|&(_, l)| l < levels));
    let accepting = (0..order.len()).filter(|&s| order[s].1 == k);
    Buchi::new(order.len(), 0, accepting, aps, transitions).expect("tableau produces a well-formed automaton").reduce()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{accepts, eval_lasso, LassoWord};
    use crate::ltl::{parse_ltl, random_formula, GenConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> Buchi {
        translate(&parse_ltl(s).unwrap())
    }

    #[test]
    fn constants() {
        let empty = t("N");
        assert_eq!(empty.num_states(), 1);
        assert!(empty.transitions().is_empty());
        let all = t("1");
        assert_eq!(all, Buchi::universal([]));
        assert!(t("G a & F !a").transitions().is_empty());
    }

    #[test]
    fn until_shape() {
        let b = t("a U !b");
        assert_eq!(b.num_states(), 2);
        assert_eq!(b.transitions().len(), 3);
        assert_eq!(b.aps().len(), 2);
    }

    #[test]
    fn agrees_with_lasso_semantics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for size in 1..=8 {
            let cfg = GenConfig { size, num_vars: 3, ..Default::default() };
            for _ in 0..30 {
                let f = random_formula(&cfg, &mut rng);
                let b = translate(&f);
                for _ in 0..50 {
                    let w = LassoWord::random(0b111, 3, 4, &mut rng);
                    assert_eq!(accepts(&b, &w), eval_lasso(&f, &w).unwrap(), "{f} on {w:?}");
                }
            }
        }
    }
}
