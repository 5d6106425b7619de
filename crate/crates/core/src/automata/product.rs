use std::collections::HashMap;

use super::buchi::{Buchi, Transition};

/// Synchronous product accepting `L(left) ∩ L(right)`.
///
/// States are `(q1, q2, flag)`. The flag advances 0 → 1 when leaving an
/// accepting state of `left`, 1 → 2 when leaving an accepting state of
/// `right`, and 2 → 0 unconditionally; flag-2 states are accepting. Only
/// reachable states are built, so there are at most `3·|Q1|·|Q2|` of them.
pub fn product(left: &Buchi, right: &Buchi) -> Buchi {
    let out_l = left.outgoing();
    let out_r = right.outgoing();
    let start = (left.initial(), right.initial(), 0u8);
    let mut ids: HashMap<(usize, usize, u8), usize> = HashMap::from([(start, 0)]);
    let mut states = vec![start];
    let mut transitions = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (q1, q2, flag) = states[i];
        let next_flag = match flag {
            0 if left.is_accepting(q1) => 1,
            1 if right.is_accepting(q2) => 2,
            2 => 0,
            f => f,
        };
        for &t1 in &out_l[q1] {
            let a = &left.transitions()[t1];
            for &t2 in &out_r[q2] {
                let b = &right.transitions()[t2];
                let Some(label) = a.label.conjoin(b.label) else { continue };
                let key = (a.dst, b.dst, next_flag);
                let fresh = states.len();
                let dst = *ids.entry(key).or_insert_with(|| {
                    states.push(key);
                    fresh
                });
                transitions.push(Transition { src: i, dst, label });
            }
        }
        i += 1;
    }
    let accepting = (0..states.len()).filter(|&s| states[s].2 == 2);
    let aps = left.aps().iter().chain(right.aps()).copied();
    Buchi::new(states.len(), 0, accepting, aps, transitions).expect("product of well-formed automata")
}
