use std::collections::HashMap;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::ltl::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("automaton needs at least one state")]
    NoStates,
    #[error("initial state {0} out of range")]
    InitialOutOfRange(usize),
    #[error("accepting state {0} out of range")]
    AcceptingOutOfRange(usize),
    #[error("transition {index} has endpoint out of range")]
    EndpointOutOfRange { index: usize },
    #[error("transition {index} has an unsatisfiable label")]
    UnsatisfiableLabel { index: usize },
    #[error("transition {index} uses a variable missing from the AP list")]
    UnknownVariable { index: usize },
}

/// Conjunction of literals over `a`..`z`, stored as two 26-bit masks.
/// The empty conjunction is the constant `true`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pos: u32,
    neg: u32,
}

impl Label {
    pub const TRUE: Label = Label { pos: 0, neg: 0 };

    /// `None` when a variable would appear both positive and negated.
    pub fn new(pos: u32, neg: u32) -> Option<Label> {
        (pos & neg == 0).then_some(Label { pos, neg })
    }

    pub fn from_literals(lits: impl IntoIterator<Item = (Var, bool)>) -> Option<Label> {
        lits.into_iter().try_fold(Label::TRUE, |acc, (v, positive)| {
            let lit = if positive { Label { pos: v.bit(), neg: 0 } } else { Label { pos: 0, neg: v.bit() } };
            acc.conjoin(lit)
        })
    }

    pub fn positive(&self) -> u32 {
        self.pos
    }

    pub fn negative(&self) -> u32 {
        self.neg
    }

    pub fn vars(&self) -> u32 {
        self.pos | self.neg
    }

    pub fn is_true(&self) -> bool {
        self.pos == 0 && self.neg == 0
    }

    pub fn contains(&self, v: Var, positive: bool) -> bool {
        let mask = if positive { self.pos } else { self.neg };
        mask & v.bit() != 0
    }

    /// Whether the assignment (bit set = variable true) satisfies the label.
    pub fn satisfied_by(&self, assignment: u32) -> bool {
        assignment & self.pos == self.pos && assignment & self.neg == 0
    }

    pub fn conjoin(self, other: Label) -> Option<Label> {
        Label::new(self.pos | other.pos, self.neg | other.neg)
    }

    /// Weaker-or-equal: every assignment satisfying `other` satisfies `self`.
    pub fn implied_by(&self, other: &Label) -> bool {
        self.pos & other.pos == self.pos && self.neg & other.neg == self.neg
    }

    /// Literals in variable order, positive before negative for equal variables.
    pub fn literals(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        Var::iter_mask(self.vars()).map(move |v| (v, self.pos & v.bit() != 0))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return write!(f, "1");
        }
        for (i, (v, positive)) in self.literals().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{}{v}", if positive { "" } else { "!" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub src: usize,
    pub dst: usize,
    pub label: Label,
}

/// Nondeterministic Büchi automaton with literal-conjunction transition labels.
///
/// The alphabet is the set of assignments over the AP list; a disjunctive
/// guard is represented by parallel transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Buchi {
    num_states: usize,
    initial: usize,
    accepting: Vec<bool>,
    aps: Vec<Var>,
    transitions: Vec<Transition>,
}

impl Buchi {
    pub fn new(
        num_states: usize,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
        aps: impl IntoIterator<Item = Var>,
        transitions: Vec<Transition>,
    ) -> Result<Buchi, AutomatonError> {
        if num_states == 0 {
            return Err(AutomatonError::NoStates);
        }
        if initial >= num_states {
            return Err(AutomatonError::InitialOutOfRange(initial));
        }
        let mut flags = vec![false; num_states];
        for q in accepting {
            *flags.get_mut(q).ok_or(AutomatonError::AcceptingOutOfRange(q))? = true;
        }
        let mut aps: Vec<Var> = aps.into_iter().collect();
        aps.sort();
        aps.dedup();
        let ap_mask = aps.iter().fold(0, |m, v| m | v.bit());
        for (index, t) in transitions.iter().enumerate() {
            if t.src >= num_states || t.dst >= num_states {
                return Err(AutomatonError::EndpointOutOfRange { index });
            }
            if t.label.pos & t.label.neg != 0 {
                return Err(AutomatonError::UnsatisfiableLabel { index });
            }
            if t.label.vars() & !ap_mask != 0 {
                return Err(AutomatonError::UnknownVariable { index });
            }
        }
        Ok(Buchi { num_states, initial, accepting: flags, aps, transitions })
    }

    /// One accepting state with a `true` self-loop: accepts every word.
    pub fn universal(aps: impl IntoIterator<Item = Var>) -> Buchi {
        let t = Transition { src: 0, dst: 0, label: Label::TRUE };
        Buchi::new(1, 0, [0], aps, vec![t]).unwrap()
    }

    /// A single rejecting state without transitions.
    pub fn empty(aps: impl IntoIterator<Item = Var>) -> Buchi {
        Buchi::new(1, 0, [], aps, vec![]).unwrap()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states).filter(|&q| self.accepting[q])
    }

    pub fn aps(&self) -> &[Var] {
        &self.aps
    }

    pub fn ap_mask(&self) -> u32 {
        self.aps.iter().fold(0, |m, v| m | v.bit())
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Outgoing transition indices per state.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_states];
        for (i, t) in self.transitions.iter().enumerate() {
            out[t.src].push(i);
        }
        out
    }

    /// Removes states that are unreachable or cannot reach an accepting
    /// cycle, then merges bisimilar states. The language is unchanged.
    pub fn reduce(&self) -> Buchi {
        self.trim().quotient()
    }

    fn trim(&self) -> Buchi {
        let mut graph = DiGraph::<(), ()>::with_capacity(self.num_states, self.transitions.len());
        let nodes: Vec<_> = (0..self.num_states).map(|_| graph.add_node(())).collect();
        for t in &self.transitions {
            graph.add_edge(nodes[t.src], nodes[t.dst], ());
        }
        // tarjan_scc yields components in reverse topological order, so every
        // successor component is classified before its predecessors.
        let sccs = tarjan_scc(&graph);
        let mut component = vec![0; self.num_states];
        for (i, scc) in sccs.iter().enumerate() {
            for n in scc {
                component[n.index()] = i;
            }
        }
        let mut live = vec![false; self.num_states];
        let out = self.outgoing();
        for (i, scc) in sccs.iter().enumerate() {
            let members: Vec<usize> = scc.iter().map(|n| n.index()).collect();
            let in_scc = |q: usize| component[q] == i;
            let cyclic = members.iter().any(|&q| out[q].iter().any(|&t| in_scc(self.transitions[t].dst)));
            let accepting_cycle = cyclic && members.iter().any(|&q| self.accepting[q]);
            let reaches_live = members
                .iter()
                .any(|&q| out[q].iter().any(|&t| !in_scc(self.transitions[t].dst) && live[self.transitions[t].dst]));
            if accepting_cycle || reaches_live {
                for &q in &members {
                    live[q] = true;
                }
            }
        }
        if !live[self.initial] {
            return Buchi::empty(self.aps.iter().copied());
        }
        let reachable = self.reachable_from_initial(|t| live[t.dst]);
        let keep: Vec<bool> = (0..self.num_states).map(|q| live[q] && reachable[q]).collect();
        self.restrict(&keep)
    }

    fn reachable_from_initial(&self, allowed: impl Fn(&Transition) -> bool) -> Vec<bool> {
        let out = self.outgoing();
        let mut seen = vec![false; self.num_states];
        seen[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for &t in &out[q] {
                let tr = &self.transitions[t];
                if allowed(tr) && !seen[tr.dst] {
                    seen[tr.dst] = true;
                    stack.push(tr.dst);
                }
            }
        }
        seen
    }

    fn restrict(&self, keep: &[bool]) -> Buchi {
        let mut map = vec![usize::MAX; self.num_states];
        let mut next = 0;
        for q in 0..self.num_states {
            if keep[q] {
                map[q] = next;
                next += 1;
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|t| keep[t.src] && keep[t.dst])
            .map(|t| Transition { src: map[t.src], dst: map[t.dst], label: t.label })
            .collect();
        let accepting = (0..self.num_states).filter(|&q| keep[q] && self.accepting[q]).map(|q| map[q]);
        Buchi::new(next, map[self.initial], accepting, self.aps.iter().copied(), transitions).unwrap()
    }

    /// Quotient by the coarsest bisimulation that respects acceptance.
    fn quotient(&self) -> Buchi {
        let out = self.outgoing();
        let mut class: Vec<usize> = self.accepting.iter().map(|&a| usize::from(a)).collect();
        let mut count = if class.contains(&0) && class.contains(&1) { 2 } else { 1 };
        loop {
            let mut signatures: HashMap<(usize, Vec<(Label, usize)>), usize> = HashMap::new();
            let mut next_class = Vec::with_capacity(self.num_states);
            for q in 0..self.num_states {
                let mut sig: Vec<(Label, usize)> =
                    out[q].iter().map(|&t| (self.transitions[t].label, class[self.transitions[t].dst])).collect();
                sig.sort();
                sig.dedup();
                let fresh = signatures.len();
                next_class.push(*signatures.entry((class[q], sig)).or_insert(fresh));
            }
            let new_count = signatures.len();
            class = next_class;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // Renumber classes by first occurrence in a BFS from the initial state.
        let mut order = vec![usize::MAX; count];
        let mut next = 0;
        let mut queue = std::collections::VecDeque::from([self.initial]);
        let mut seen = vec![false; self.num_states];
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            if order[class[q]] == usize::MAX {
                order[class[q]] = next;
                next += 1;
            }
            for &t in &out[q] {
                let d = self.transitions[t].dst;
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        let mut transitions: Vec<Transition> = self
            .transitions
            .iter()
            .filter(|t| seen[t.src])
            .map(|t| Transition { src: order[class[t.src]], dst: order[class[t.dst]], label: t.label })
            .collect();
        transitions.sort();
        transitions.dedup();
        let accepting = (0..self.num_states).filter(|&q| seen[q] && self.accepting[q]).map(|q| order[class[q]]);
        let mut accepting: Vec<usize> = accepting.collect();
        accepting.sort();
        accepting.dedup();
        Buchi::new(next, order[class[self.initial]], accepting, self.aps.iter().copied(), transitions).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: char) -> Var {
        Var::from_char(c).unwrap()
    }

    #[test]
    fn label_semantics() {
        let l = Label::from_literals([(v('a'), true), (v('b'), false)]).unwrap();
        assert!(l.satisfied_by(v('a').bit()));
        assert!(!l.satisfied_by(v('a').bit() | v('b').bit()));
        assert!(Label::from_literals([(v('a'), true), (v('a'), false)]).is_none());
        assert_eq!(l.to_string(), "a & !b");
        assert_eq!(Label::TRUE.to_string(), "1");
        assert!(Label::TRUE.implied_by(&l));
        assert!(!l.implied_by(&Label::TRUE));
    }

    #[test]
    fn validation() {
        let t = |src, dst| Transition { src, dst, label: Label::TRUE };
        assert_eq!(Buchi::new(0, 0, [], [], vec![]), Err(AutomatonError::NoStates));
        assert_eq!(Buchi::new(1, 1, [], [], vec![]), Err(AutomatonError::InitialOutOfRange(1)));
        assert_eq!(Buchi::new(1, 0, [2], [], vec![]), Err(AutomatonError::AcceptingOutOfRange(2)));
        assert_eq!(Buchi::new(1, 0, [], [], vec![t(0, 1)]), Err(AutomatonError::EndpointOutOfRange { index: 0 }));
        let bad = Transition { src: 0, dst: 0, label: Label::from_literals([(v('c'), true)]).unwrap() };
        assert_eq!(Buchi::new(1, 0, [], [v('a')], vec![bad]), Err(AutomatonError::UnknownVariable { index: 0 }));
    }

    #[test]
    fn reduce_drops_dead_and_merges_duplicates() {
        let t = |src, dst| Transition { src, dst, label: Label::TRUE };
        // 0 -> 1 (accepting loop), 0 -> 2 (accepting loop, bisimilar to 1), 0 -> 3 (dead end)
        let b = Buchi::new(4, 0, [1, 2], [], vec![t(0, 1), t(0, 2), t(0, 3), t(1, 1), t(2, 2)]).unwrap();
        let r = b.reduce();
        assert_eq!(r.num_states(), 2);
        assert_eq!(r.transitions().len(), 2);
        let dead = Buchi::new(2, 0, [1], [], vec![t(0, 1)]).unwrap().reduce();
        assert_eq!(dead.num_states(), 1);
        assert!(dead.transitions().is_empty());
    }
}
