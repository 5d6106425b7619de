//! Subset of the Hanoi Omega-Automata format: state-based Büchi acceptance
//! (`Acceptance: 1 Inf(0)`), one start state, explicit edge labels.

use std::fmt::Write as _;

use thiserror::Error;

use super::buchi::{AutomatonError, Buchi, Label, Transition};
use crate::ltl::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoaError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unsupported acceptance condition: {0}")]
    UnsupportedAcceptance(String),
    #[error("{0} atomic propositions exceed the limit of 26")]
    TooManyAps(usize),
    #[error("atomic proposition {0:?} is not a single letter a..z")]
    InvalidApName(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// Renders `b` in HOA. States keep their numbering; AP indices follow the
/// automaton's sorted AP list.
pub fn emit_hoa(b: &Buchi) -> String {
    let mut s = String::new();
    let index_of = |v: Var| b.aps().iter().position(|&a| a == v).unwrap();
    writeln!(s, "HOA: v1").unwrap();
    writeln!(s, "States: {}", b.num_states()).unwrap();
    writeln!(s, "Start: {}", b.initial()).unwrap();
    write!(s, "AP: {}", b.aps().len()).unwrap();
    for v in b.aps() {
        write!(s, " \"{v}\"").unwrap();
    }
    writeln!(s).unwrap();
    writeln!(s, "acc-name: Buchi").unwrap();
    writeln!(s, "Acceptance: 1 Inf(0)").unwrap();
    writeln!(s, "--BODY--").unwrap();
    let out = b.outgoing();
    for q in 0..b.num_states() {
        if b.is_accepting(q) {
            writeln!(s, "State: {q} {{0}}").unwrap();
        } else {
            writeln!(s, "State: {q}").unwrap();
        }
        for &t in &out[q] {
            let tr = &b.transitions()[t];
            let guard = if tr.label.is_true() {
                "t".to_string()
            } else {
                tr.label
                    .literals()
                    .map(|(v, positive)| format!("{}{}", if positive { "" } else { "!" }, index_of(v)))
                    .collect::<Vec<_>>()
                    .join(" & ")
            };
            writeln!(s, "[{guard}] {}", tr.dst).unwrap();
        }
    }
    writeln!(s, "--END--").unwrap();
    s
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Header(String),
    Ident(String),
    Str(String),
    Int(usize),
    Sym(char),
    Body,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, HoaError> {
    let mut toks = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let malformed = |message: String| HoaError::Malformed { line: line_no, message };
        let mut chars = line.char_indices().peekable();
        while let Some(&(start, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if c == '"' {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, ch)) => s.push(ch),
                        None => return Err(malformed("unterminated string".into())),
                    }
                }
                toks.push((line_no, Tok::Str(s)));
            } else if line[start..].starts_with("--BODY--") {
                (0..8).for_each(|_| {
                    chars.next();
                });
                toks.push((line_no, Tok::Body));
            } else if line[start..].starts_with("--END--") {
                (0..7).for_each(|_| {
                    chars.next();
                });
                toks.push((line_no, Tok::End));
            } else if c.is_ascii_digit() {
                let mut n = String::new();
                while let Some(&(_, d)) = chars.peek().filter(|(_, d)| d.is_ascii_digit()) {
                    n.push(d);
                    chars.next();
                }
                let value = n.parse().map_err(|_| malformed(format!("bad integer {n}")))?;
                toks.push((line_no, Tok::Int(value)));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut word = String::new();
                while let Some(&(_, d)) = chars.peek().filter(|(_, d)| d.is_ascii_alphanumeric() || "_-.".contains(*d))
                {
                    word.push(d);
                    chars.next();
                }
                if chars.peek().map(|&(_, d)| d) == Some(':') {
                    chars.next();
                    toks.push((line_no, Tok::Header(word)));
                } else {
                    toks.push((line_no, Tok::Ident(word)));
                }
            } else if "[]{}()!&|".contains(c) {
                chars.next();
                toks.push((line_no, Tok::Sym(c)));
            } else {
                return Err(malformed(format!("unexpected character {c:?}")));
            }
        }
    }
    Ok(toks)
}

struct Cursor {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(0, |(l, _)| *l)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, HoaError> {
        Err(HoaError::Malformed { line: self.line(), message: message.into() })
    }

    fn int(&mut self, what: &str) -> Result<usize, HoaError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(n),
            _ => {
                self.pos -= 1;
                self.error(format!("expected integer for {what}"))
            }
        }
    }

    fn sym(&mut self, c: char) -> Result<(), HoaError> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            _ => {
                self.pos -= 1;
                self.error(format!("expected '{c}'"))
            }
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Skips tokens until the next header, `--BODY--` or end of input.
    fn skip_values(&mut self) {
        while !matches!(self.peek(), None | Some(Tok::Header(_)) | Some(Tok::Body)) {
            self.pos += 1;
        }
    }
}

#[derive(Debug)]
enum Guard {
    True,
    False,
    Ap(usize),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

fn guard_or(c: &mut Cursor) -> Result<Guard, HoaError> {
    let mut g = guard_and(c)?;
    while c.eat_sym('|') {
        g = Guard::Or(Box::new(g), Box::new(guard_and(c)?));
    }
    Ok(g)
}

fn guard_and(c: &mut Cursor) -> Result<Guard, HoaError> {
    let mut g = guard_not(c)?;
    while c.eat_sym('&') {
        g = Guard::And(Box::new(g), Box::new(guard_not(c)?));
    }
    Ok(g)
}

fn guard_not(c: &mut Cursor) -> Result<Guard, HoaError> {
    if c.eat_sym('!') {
        return Ok(Guard::Not(Box::new(guard_not(c)?)));
    }
    match c.next() {
        Some(Tok::Int(i)) => Ok(Guard::Ap(i)),
        Some(Tok::Ident(w)) if w == "t" => Ok(Guard::True),
        Some(Tok::Ident(w)) if w == "f" => Ok(Guard::False),
        Some(Tok::Sym('(')) => {
            let g = guard_or(c)?;
            c.sym(')')?;
            Ok(g)
        }
        _ => {
            c.pos -= 1;
            c.error("malformed edge label")
        }
    }
}

/// Disjunctive normal form of `g` (negated when `negated`), as satisfiable
/// literal conjunctions.
fn dnf(g: &Guard, negated: bool, aps: &[Var]) -> Result<Vec<Label>, String> {
    let cross = |a: Vec<Label>, b: Vec<Label>| {
        let mut out: Vec<Label> = a.iter().flat_map(|x| b.iter().filter_map(move |y| x.conjoin(*y))).collect();
        out.sort();
        out.dedup();
        out
    };
    let union = |mut a: Vec<Label>, b: Vec<Label>| {
        a.extend(b);
        a.sort();
        a.dedup();
        a
    };
    Ok(match g {
        Guard::True if negated => vec![],
        Guard::True => vec![Label::TRUE],
        Guard::False if negated => vec![Label::TRUE],
        Guard::False => vec![],
        Guard::Ap(i) => {
            let v = *aps.get(*i).ok_or_else(|| format!("AP index {i} out of range"))?;
            vec![Label::from_literals([(v, !negated)]).unwrap()]
        }
        Guard::Not(inner) => dnf(inner, !negated, aps)?,
        Guard::And(a, b) if !negated => cross(dnf(a, false, aps)?, dnf(b, false, aps)?),
        Guard::And(a, b) => union(dnf(a, true, aps)?, dnf(b, true, aps)?),
        Guard::Or(a, b) if !negated => union(dnf(a, false, aps)?, dnf(b, false, aps)?),
        Guard::Or(a, b) => cross(dnf(a, true, aps)?, dnf(b, true, aps)?),
    })
}

/// Parses the HOA subset. Disjunctive edge labels become parallel
/// transitions, one per satisfiable DNF term.
pub fn parse_hoa(text: &str) -> Result<Buchi, HoaError> {
    let mut c = Cursor { toks: tokenize(text)?, pos: 0 };
    match (c.next(), c.next()) {
        (Some(Tok::Header(h)), Some(Tok::Ident(v))) if h == "HOA" && v == "v1" => {}
        _ => return Err(HoaError::Malformed { line: 1, message: "expected 'HOA: v1'".into() }),
    }
    let mut states = None;
    let mut start = None;
    let mut aps: Option<Vec<Var>> = None;
    let mut acceptance_seen = false;
    loop {
        match c.next() {
            Some(Tok::Body) => break,
            Some(Tok::Header(h)) => match h.as_str() {
                "States" => states = Some(c.int("States")?),
                "Start" => {
                    if start.is_some() {
                        return c.error("exactly one Start state is supported");
                    }
                    start = Some(c.int("Start")?);
                    if c.eat_sym('&') {
                        return c.error("conjunctive start states are not supported");
                    }
                }
                "AP" => {
                    let count = c.int("AP")?;
                    if count > Var::COUNT {
                        return Err(HoaError::TooManyAps(count));
                    }
                    let mut list = Vec::with_capacity(count);
                    for _ in 0..count {
                        match c.next() {
                            Some(Tok::Str(name)) => {
                                let mut chars = name.chars();
                                let var = match (chars.next(), chars.next()) {
                                    (Some(ch), None) => Var::from_char(ch),
                                    _ => None,
                                };
                                list.push(var.ok_or(HoaError::InvalidApName(name))?);
                            }
                            _ => {
                                c.pos -= 1;
                                return c.error("expected quoted AP name");
                            }
                        }
                    }
                    aps = Some(list);
                }
                "acc-name" => {
                    match c.next() {
                        Some(Tok::Ident(name)) if name == "Buchi" => {}
                        other => return Err(HoaError::UnsupportedAcceptance(format!("acc-name {other:?}"))),
                    }
                    c.skip_values();
                }
                "Acceptance" => {
                    let begin = c.pos;
                    c.skip_values();
                    let condition: Vec<Tok> = c.toks[begin..c.pos].iter().map(|(_, t)| t.clone()).collect();
                    let expected = [Tok::Int(1), Tok::Ident("Inf".into()), Tok::Sym('('), Tok::Int(0), Tok::Sym(')')];
                    if condition != expected {
                        return Err(HoaError::UnsupportedAcceptance(format!("{condition:?}")));
                    }
                    acceptance_seen = true;
                }
                _ => c.skip_values(),
            },
            _ => {
                c.pos -= 1;
                return c.error("expected header or --BODY--");
            }
        }
    }
    if !acceptance_seen {
        return Err(HoaError::UnsupportedAcceptance("missing Acceptance header".into()));
    }
    let num_states = states.ok_or(HoaError::Malformed { line: c.line(), message: "missing States".into() })?;
    let initial = start.ok_or(HoaError::Malformed { line: c.line(), message: "missing Start".into() })?;
    let aps = aps.unwrap_or_default();

    let mut accepting = Vec::new();
    let mut transitions = Vec::new();
    let mut current: Option<usize> = None;
    loop {
        match c.next() {
            Some(Tok::End) => break,
            Some(Tok::Header(h)) if h == "State" => {
                let q = c.int("State")?;
                if let Some(Tok::Str(_)) = c.peek() {
                    c.pos += 1;
                }
                if c.eat_sym('{') {
                    match (c.next(), c.next()) {
                        (Some(Tok::Int(0)), Some(Tok::Sym('}'))) => accepting.push(q),
                        _ => return Err(HoaError::UnsupportedAcceptance("state acceptance set other than {0}".into())),
                    }
                }
                current = Some(q);
            }
            Some(Tok::Sym('[')) => {
                let Some(src) = current else {
                    return c.error("edge before any State");
                };
                let guard = guard_or(&mut c)?;
                c.sym(']')?;
                let dst = c.int("edge destination")?;
                if c.peek() == Some(&Tok::Sym('{')) {
                    return Err(HoaError::UnsupportedAcceptance("transition-based acceptance marks".into()));
                }
                let terms =
                    dnf(&guard, false, &aps).map_err(|message| HoaError::Malformed { line: c.line(), message })?;
                transitions.extend(terms.into_iter().map(|label| Transition { src, dst, label }));
            }
            Some(Tok::Int(_)) => return c.error("implicit edge labels are not supported"),
            None => return c.error("missing --END--"),
            _ => {
                c.pos -= 1;
                return c.error("unexpected token in body");
            }
        }
    }
    Ok(Buchi::new(num_states, initial, accepting, aps, transitions)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIVERSAL: &str = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[t] 0\n--END--\n";

    #[test]
    fn universal() {
        let b = parse_hoa(UNIVERSAL).unwrap();
        assert_eq!(b, Buchi::universal([]));
        assert_eq!(emit_hoa(&b), UNIVERSAL);
    }

    #[test]
    fn disjunction_splits() {
        let text = "HOA: v1\nname: \"x\"\nStates: 1\nStart: 0\nAP: 2 \"a\" \"b\"\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 \"s0\" {0}\n[0 | !1] 0\n--END--\n";
        let b = parse_hoa(text).unwrap();
        let labels: Vec<String> = b.transitions().iter().map(|t| t.label.to_string()).collect();
        assert_eq!(labels.len(), 2);
        assert!(labels.contains(&"a".to_string()));
        assert!(labels.contains(&"!b".to_string()));
    }

    #[test]
    fn negated_conjunction_and_false() {
        let text = "HOA: v1\nStates: 1\nStart: 0\nAP: 2 \"a\" \"b\"\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0\n[!(0 & 1)] 0\n[0 & !0] 0\n[f] 0\n--END--\n";
        let b = parse_hoa(text).unwrap();
        assert_eq!(b.transitions().len(), 2);
    }

    #[test]
    fn rejects_unsupported() {
        let gen = UNIVERSAL.replace("1 Inf(0)", "2 Inf(0) & Inf(1)");
        assert!(matches!(parse_hoa(&gen), Err(HoaError::UnsupportedAcceptance(_))));
        let edge_marks = UNIVERSAL.replace("[t] 0", "[t] 0 {0}");
        assert!(matches!(parse_hoa(&edge_marks), Err(HoaError::UnsupportedAcceptance(_))));
        let many = format!(
            "HOA: v1\nStates: 1\nStart: 0\nAP: 27 {}\nAcceptance: 1 Inf(0)\n--BODY--\n--END--\n",
            "\"a\" ".repeat(27)
        );
        assert_eq!(parse_hoa(&many), Err(HoaError::TooManyAps(27)));
        assert!(matches!(parse_hoa("States: 1"), Err(HoaError::Malformed { .. })));
        let truncated = UNIVERSAL.replace("--END--\n", "");
        assert!(matches!(parse_hoa(&truncated), Err(HoaError::Malformed { .. })));
        let bad_ap = UNIVERSAL.replace("AP: 0", "AP: 1 \"foo\"");
        assert_eq!(parse_hoa(&bad_ap), Err(HoaError::InvalidApName("foo".into())));
        let out_of_range = UNIVERSAL.replace("[t] 0", "[t] 3");
        assert!(matches!(parse_hoa(&out_of_range), Err(HoaError::Automaton(_))));
    }
}
