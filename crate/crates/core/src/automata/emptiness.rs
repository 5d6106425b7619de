use super::buchi::Buchi;
use super::lasso::LassoWord;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    /// An accepted lasso word, read off a reachable accepting cycle.
    NonEmpty(LassoWord),
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty)
    }

    pub fn witness(&self) -> Option<&LassoWord> {
        match self {
            Emptiness::Empty => None,
            Emptiness::NonEmpty(w) => Some(w),
        }
    }
}

struct Frame {
    state: usize,
    next_edge: usize,
    via: Option<usize>,
}

/// Nested depth-first search (two-colour scheme). The outer search runs
/// in postorder; each accepting state it finishes seeds an inner search for
/// a cycle back to that state. Inner searches share one visited set.
pub fn check_emptiness(b: &Buchi) -> Emptiness {
    let out = b.outgoing();
    let dst = |t: usize| b.transitions()[t].dst;
    let mut outer_seen = vec![false; b.num_states()];
    let mut inner_seen = vec![false; b.num_states()];
    let mut outer = vec![Frame { state: b.initial(), next_edge: 0, via: None }];
    outer_seen[b.initial()] = true;

    while let Some(top) = outer.last_mut() {
        if let Some(&t) = out[top.state].get(top.next_edge) {
            top.next_edge += 1;
            let d = dst(t);
            if !outer_seen[d] {
                outer_seen[d] = true;
                outer.push(Frame { state: d, next_edge: 0, via: Some(t) });
            }
            continue;
        }
        let seed = top.state;
        if b.is_accepting(seed) {
            if let Some(cycle) = find_cycle(seed, &out, &dst, &mut inner_seen) {
                let stem: Vec<usize> = outer.iter().filter_map(|f| f.via).collect();
                return Emptiness::NonEmpty(witness(b, &stem, &cycle));
            }
        }
        outer.pop();
    }
    Emptiness::Empty
}

pub fn is_empty(b: &Buchi) -> bool {
    check_emptiness(b).is_empty()
}

fn find_cycle(seed: usize, out: &[Vec<usize>], dst: &impl Fn(usize) -> usize, seen: &mut [bool]) -> Option<Vec<usize>> {
    let mut stack = vec![Frame { state: seed, next_edge: 0, via: None }];
    while let Some(top) = stack.last_mut() {
        let Some(&t) = out[top.state].get(top.next_edge) else {
            stack.pop();
            continue;
        };
        top.next_edge += 1;
        let d = dst(t);
        if d == seed {
            let mut cycle: Vec<usize> = stack.iter().filter_map(|f| f.via).collect();
            cycle.push(t);
            return Some(cycle);
        }
        if !seen[d] {
            seen[d] = true;
            stack.push(Frame { state: d, next_edge: 0, via: Some(t) });
        }
    }
    None
}

fn witness(b: &Buchi, stem: &[usize], cycle: &[usize]) -> LassoWord {
    let letter = |t: &usize| b.transitions()[*t].label.positive();
    LassoWord::new(b.ap_mask(), stem.iter().map(letter).collect(), cycle.iter().map(letter).collect())
        .expect("labels only mention declared APs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{accepts, Label, Transition};

    #[test]
    fn unreachable_accepting_state() {
        let t = Transition { src: 0, dst: 0, label: Label::TRUE };
        let accepting_loop = Transition { src: 1, dst: 1, label: Label::TRUE };
        let b = Buchi::new(2, 0, [1], [], vec![t, accepting_loop]).unwrap();
        assert!(is_empty(&b));
    }

    #[test]
    fn accepting_state_without_cycle() {
        let t = Transition { src: 0, dst: 1, label: Label::TRUE };
        let b = Buchi::new(2, 0, [0], [], vec![t]).unwrap();
        assert!(is_empty(&b));
    }

    #[test]
    fn witness_is_accepted() {
        let t = |src, dst| Transition { src, dst, label: Label::TRUE };
        let b = Buchi::new(4, 0, [2], [], vec![t(0, 1), t(1, 2), t(2, 3), t(3, 1)]).unwrap();
        let result = check_emptiness(&b);
        let w = result.witness().expect("nonempty");
        assert!(accepts(&b, w));
        assert_eq!(w.prefix().len() + w.cycle().len(), 5);
    }
}
