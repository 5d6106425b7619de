use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use ltlgnn_core::automata::{emit_hoa, equivalent, holds, parse_hoa, Buchi};
use ltlgnn_core::encoding::{EncodingError, UnionGraph};
use ltlgnn_core::ltl::{parse_ltl, Formula};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Labelling regime of a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Label 1 iff every word of the system satisfies the specification.
    General,
    /// Label 1 iff system and specification accept the same words.
    Special,
}

/// How the system's provenance formula relates to the specification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    Equivalent,
    StrictImplication,
    Overlap,
    Disjoint,
    ReverseImplication,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} `{value}`")]
pub struct UnknownTag {
    pub kind: &'static str,
    pub value: String,
}

macro_rules! tag_enum {
    ($ty:ident, $kind:literal, $($variant:ident => $name:literal),+ $(,)?) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = UnknownTag;

            fn from_str(s: &str) -> Result<$ty, UnknownTag> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    _ => Err(UnknownTag { kind: $kind, value: s.to_string() }),
                }
            }
        }
    };
}

tag_enum!(Scenario, "scenario", General => "general", Special => "special");
tag_enum!(
    Case, "case",
    Equivalent => "equivalent",
    StrictImplication => "strict-implication",
    Overlap => "overlap",
    Disjoint => "disjoint",
    ReverseImplication => "reverse-implication",
);
tag_enum!(Split, "split", Train => "train", Test => "test");

impl Scenario {
    /// Classical verdict for a system built from `phi_src` against `phi`.
    pub fn oracle(self, phi_src: &Formula, phi: &Formula) -> bool {
        match self {
            Scenario::General => holds(phi_src, phi),
            Scenario::Special => equivalent(phi_src, phi),
        }
    }

    /// Only strict-implication samples are labelled differently by the two
    /// regimes; a dataset without them is labelled identically by both, so
    /// `General` is returned.
    pub fn infer(samples: &[Sample]) -> Scenario {
        match samples.iter().find(|s| s.case == Case::StrictImplication) {
            Some(s) if !s.label => Scenario::Special,
            _ => Scenario::General,
        }
    }
}

/// One labelled datapoint: specification `phi` (NNF), system automaton built
/// from the provenance formula `phi_src`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub phi: Formula,
    pub phi_src: Formula,
    pub system: Buchi,
    pub label: bool,
    pub case: Case,
    pub split: Split,
}

impl Sample {
    pub fn union_graph(&self) -> Result<UnionGraph, EncodingError> {
        UnionGraph::build(&self.system, &self.phi)
    }
}

#[derive(Serialize, Deserialize)]
struct Line {
    phi: String,
    phi_src: String,
    hoa: String,
    label: u8,
    scenario: String,
    split: String,
}

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

pub fn write_jsonl<W: Write>(samples: &[Sample], mut out: W) -> io::Result<()> {
    for s in samples {
        let line = Line {
            phi: s.phi.to_string(),
            phi_src: s.phi_src.to_string(),
            hoa: emit_hoa(&s.system),
            label: u8::from(s.label),
            scenario: s.case.name().to_string(),
            split: s.split.name().to_string(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

fn parse_line(text: &str) -> Result<Sample, String> {
    let l: Line = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let label = match l.label {
        0 => false,
        1 => true,
        n => return Err(format!("label {n} is not 0 or 1")),
    };
    Ok(Sample {
        phi: parse_ltl(&l.phi).map_err(|e| format!("phi: {e}"))?,
        phi_src: parse_ltl(&l.phi_src).map_err(|e| format!("phi_src: {e}"))?,
        system: parse_hoa(&l.hoa).map_err(|e| format!("hoa: {e}"))?,
        label,
        case: l.scenario.parse().map_err(|e: UnknownTag| e.to_string())?,
        split: l.split.parse().map_err(|e: UnknownTag| e.to_string())?,
    })
}

/// Reads one sample per nonblank line; errors carry the 1-based line number.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<Sample>, JsonlError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(&line).map_err(|message| JsonlError::Malformed { line: i + 1, message })?);
    }
    Ok(out)
}
