//! Interchangeable model-checking back ends selected by name.

use ltlgnn_core::automata::{equivalent, satisfies, Buchi};
use ltlgnn_core::encoding::UnionGraph;
use ltlgnn_core::ltl::{to_nnf, Formula};
use ltlgnn_datagen::Scenario;
use ltlgnn_neural::{EncodedGraph, GraphClassifier};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("unknown engine `{0}` (expected one of: classical, neural)")]
    Unknown(String),
    #[error("the {0} engine needs a model checkpoint")]
    MissingModel(&'static str),
    #[error("the special scenario needs the system's source formula")]
    MissingSystemFormula,
    #[error("{0}")]
    Encoding(String),
}

/// A (system, specification) pair to decide.
#[derive(Clone, Debug)]
pub struct CheckInput {
    pub spec: Formula,
    pub system: Buchi,
    /// Formula the system was built from, when known.
    pub system_formula: Option<Formula>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    /// Raw classifier output for learned engines.
    pub logit: Option<f64>,
}

pub trait CheckEngine: Send + Sync {
    fn name(&self) -> &'static str;
    fn check(&self, input: &CheckInput) -> Result<Verdict, EngineError>;
}

/// Exact decision via automata. General scenario: emptiness of the system
/// times the automaton of the negated specification. Special scenario:
/// language equivalence of the system's source formula and the specification.
pub struct ClassicalEngine {
    pub scenario: Scenario,
}

impl CheckEngine for ClassicalEngine {
    fn name(&self) -> &'static str {
        "classical"
    }

    fn check(&self, input: &CheckInput) -> Result<Verdict, EngineError> {
        let holds = match self.scenario {
            Scenario::General => satisfies(&input.system, &input.spec),
            Scenario::Special => {
                let src = input.system_formula.as_ref().ok_or(EngineError::MissingSystemFormula)?;
                equivalent(src, &input.spec)
            }
        };
        Ok(Verdict { holds, logit: None })
    }
}

/// Classifies the union graph of the pair; positive logit means "holds".
pub struct NeuralEngine {
    pub model: Box<dyn GraphClassifier>,
}

impl CheckEngine for NeuralEngine {
    fn name(&self) -> &'static str {
        "neural"
    }

    fn check(&self, input: &CheckInput) -> Result<Verdict, EngineError> {
        let c =
            UnionGraph::build(&input.system, &to_nnf(&input.spec)).map_err(|e| EngineError::Encoding(e.to_string()))?;
        let g = EncodedGraph::new(&c);
        let logit = self.model.predict(&self.model.prepare(&[&g]))[0];
        Ok(Verdict { holds: logit > 0.0, logit: Some(logit) })
    }
}

/// What an engine may need at construction.
pub struct EngineOptions {
    pub scenario: Scenario,
    pub model: Option<Box<dyn GraphClassifier>>,
}

pub struct EngineEntry {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn(EngineOptions) -> Result<Box<dyn CheckEngine>, EngineError>,
}

pub static ENGINES: [EngineEntry; 2] = [
    EngineEntry {
        name: "classical",
        summary: "automata-theoretic check (exact)",
        build: |o| Ok(Box::new(ClassicalEngine { scenario: o.scenario })),
    },
    EngineEntry {
        name: "neural",
        summary: "trained graph classifier on the union graph",
        build: |o| Ok(Box::new(NeuralEngine { model: o.model.ok_or(EngineError::MissingModel("neural"))? })),
    },
];

pub fn build_engine(name: &str, options: EngineOptions) -> Result<Box<dyn CheckEngine>, EngineError> {
    let entry = ENGINES.iter().find(|e| e.name == name).ok_or_else(|| EngineError::Unknown(name.to_string()))?;
    (entry.build)(options)
}
