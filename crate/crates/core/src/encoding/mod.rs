//! Union graph of a (system, specification) pair.
//!
//! The system automaton becomes an undirected bipartite graph whose nodes
//! are states and transitions. The NNF specification becomes an expression
//! tree whose leaves are literals or constants. Union edges join each leaf to
//! every transition whose label mentions the leaf's variable. Every node
//! carries a 66-slot feature vector; see [`layout`].

mod dump;

use std::fmt;

use thiserror::Error;

use crate::automata::{Buchi, Label};
use crate::ltl::{BinaryOp, Formula, UnaryOp, Var};

pub use dump::{dump_graph, parse_dump, GraphDump};

pub const FEATURE_WIDTH: usize = 66;

/// Slot offsets of the node feature vector.
pub mod layout {
    /// Part I: constant `1`/`N` (one shared slot).
    pub const CONSTANT: usize = 0;
    /// Part II: positive literals `a`..`z`.
    pub const POSITIVE: usize = 1;
    /// Part III: negative literals `!a`..`!z`.
    pub const NEGATIVE: usize = 27;
    /// Part IV: operators in the order `G F R W M X U & |`.
    pub const OPERATOR: usize = 53;
    /// Part V: state is initial / state is final.
    pub const INITIAL: usize = 62;
    pub const FINAL: usize = 63;
    /// Part VI: raw source and destination state numbers of a transition.
    pub const SOURCE: usize = 64;
    pub const DESTINATION: usize = 65;
}

pub type FeatureRow = [f64; FEATURE_WIDTH];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("specification is not in negation normal form")]
    NotNnf,
    #[error("malformed postfix sequence")]
    BadPostfix,
    #[error("malformed graph dump at line {line}: {message}")]
    BadDump { line: usize, message: String },
}

/// Internal operators of the specification tree (`!` is folded into leaves).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeOp {
    Globally,
    Finally,
    Release,
    WeakUntil,
    StrongRelease,
    Next,
    Until,
    And,
    Or,
}

impl TreeOp {
    pub const ALL: [TreeOp; 9] = [
        TreeOp::Globally,
        TreeOp::Finally,
        TreeOp::Release,
        TreeOp::WeakUntil,
        TreeOp::StrongRelease,
        TreeOp::Next,
        TreeOp::Until,
        TreeOp::And,
        TreeOp::Or,
    ];

    pub fn slot(self) -> usize {
        layout::OPERATOR + self as usize
    }

    pub fn arity(self) -> usize {
        match self {
            TreeOp::Globally | TreeOp::Finally | TreeOp::Next => 1,
            _ => 2,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            TreeOp::Globally => 'G',
            TreeOp::Finally => 'F',
            TreeOp::Release => 'R',
            TreeOp::WeakUntil => 'W',
            TreeOp::StrongRelease => 'M',
            TreeOp::Next => 'X',
            TreeOp::Until => 'U',
            TreeOp::And => '&',
            TreeOp::Or => '|',
        }
    }

    fn from_unary(op: UnaryOp) -> Option<TreeOp> {
        match op {
            UnaryOp::Not => None,
            UnaryOp::Globally => Some(TreeOp::Globally),
            UnaryOp::Finally => Some(TreeOp::Finally),
            UnaryOp::Next => Some(TreeOp::Next),
        }
    }

    fn from_binary(op: BinaryOp) -> TreeOp {
        match op {
            BinaryOp::Until => TreeOp::Until,
            BinaryOp::Release => TreeOp::Release,
            BinaryOp::WeakUntil => TreeOp::WeakUntil,
            BinaryOp::StrongRelease => TreeOp::StrongRelease,
            BinaryOp::And => TreeOp::And,
            BinaryOp::Or => TreeOp::Or,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Leaf {
    Literal(Var, bool),
    True,
    False,
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::Literal(v, true) => write!(f, "{v}"),
            Leaf::Literal(v, false) => write!(f, "!{v}"),
            Leaf::True => write!(f, "1"),
            Leaf::False => write!(f, "N"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeNode {
    Operator(TreeOp),
    Leaf(Leaf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeRole {
    State { index: usize, initial: bool, accepting: bool },
    Transition { index: usize, src: usize, dst: usize, label: Label },
    Operator(TreeOp),
    Leaf(Leaf),
}

impl NodeRole {
    pub fn tag(&self) -> &'static str {
        match self {
            NodeRole::State { .. } => "state",
            NodeRole::Transition { .. } => "transition",
            NodeRole::Operator(_) => "operator",
            NodeRole::Leaf(_) => "leaf",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// State–transition edge of the system graph.
    System,
    /// Parent–child edge of the specification tree.
    Tree,
    /// Leaf–transition edge joining the two.
    Union,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub kind: EdgeKind,
}

/// Bipartite graph of an automaton: all states by index, then all
/// transitions by index.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemGraph {
    pub nodes: Vec<NodeRole>,
    pub edges: Vec<Edge>,
    pub num_states: usize,
}

/// One node per state and per transition; a state is adjacent to a
/// transition iff it is its source or destination. Self-loops yield one edge.
pub fn build_system_graph(b: &Buchi) -> SystemGraph {
    let n = b.num_states();
    let mut nodes: Vec<NodeRole> =
        (0..n).map(|q| NodeRole::State { index: q, initial: q == b.initial(), accepting: b.is_accepting(q) }).collect();
    let mut edges = Vec::new();
    for (i, t) in b.transitions().iter().enumerate() {
        let node = n + i;
        nodes.push(NodeRole::Transition { index: i, src: t.src, dst: t.dst, label: t.label });
        edges.push(Edge { u: t.src, v: node, kind: EdgeKind::System });
        if t.dst != t.src {
            edges.push(Edge { u: t.dst, v: node, kind: EdgeKind::System });
        }
    }
    SystemGraph { nodes, edges, num_states: n }
}

/// Postfix token of an NNF formula with negations folded into literals.
pub type PostfixToken = TreeNode;

pub fn postfix(f: &Formula) -> Result<Vec<PostfixToken>, EncodingError> {
    fn walk(f: &Formula, out: &mut Vec<PostfixToken>) -> Result<(), EncodingError> {
        match f {
            Formula::True => out.push(TreeNode::Leaf(Leaf::True)),
            Formula::False => out.push(TreeNode::Leaf(Leaf::False)),
            Formula::Var(v) => out.push(TreeNode::Leaf(Leaf::Literal(*v, true))),
            Formula::Unary(UnaryOp::Not, inner) => match **inner {
                Formula::Var(v) => out.push(TreeNode::Leaf(Leaf::Literal(v, false))),
                _ => return Err(EncodingError::NotNnf),
            },
            Formula::Unary(op, inner) => {
                walk(inner, out)?;
                out.push(TreeNode::Operator(TreeOp::from_unary(*op).unwrap()));
            }
            Formula::Binary(op, l, r) => {
                walk(l, out)?;
                walk(r, out)?;
                out.push(TreeNode::Operator(TreeOp::from_binary(*op)));
            }
        }
        Ok(())
    }
    let mut out = Vec::with_capacity(f.len());
    walk(f, &mut out)?;
    Ok(out)
}

/// Expression tree of an NNF specification, nodes in postfix order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecTree {
    pub nodes: Vec<TreeNode>,
    /// (parent, child) pairs, children in left-to-right order.
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
}

impl SpecTree {
    pub fn from_postfix(tokens: &[PostfixToken]) -> Result<SpecTree, EncodingError> {
        let mut stack: Vec<usize> = Vec::new();
        let mut edges = Vec::new();
        for (i, tok) in tokens.iter().enumerate() {
            if let TreeNode::Operator(op) = tok {
                if stack.len() < op.arity() {
                    return Err(EncodingError::BadPostfix);
                }
                let children = stack.split_off(stack.len() - op.arity());
                edges.extend(children.into_iter().map(|c| (i, c)));
            }
            stack.push(i);
        }
        match stack.as_slice() {
            [root] => Ok(SpecTree { nodes: tokens.to_vec(), edges, root: *root }),
            _ => Err(EncodingError::BadPostfix),
        }
    }
}

pub fn build_spec_tree(f: &Formula) -> Result<SpecTree, EncodingError> {
    SpecTree::from_postfix(&postfix(f)?)
}

/// Joint graph: system nodes, then tree nodes; edges grouped by kind.
#[derive(Clone, Debug, PartialEq)]
pub struct UnionGraph {
    pub nodes: Vec<NodeRole>,
    pub edges: Vec<Edge>,
    pub num_states: usize,
    /// Number of system-graph nodes (states plus transitions).
    pub num_system_nodes: usize,
}

/// Whether a union edge joins `leaf` and a transition labelled `label`.
///
/// Literal leaves match on the variable, in either polarity (`!b` joins a
/// transition carrying `b`). A `1` leaf joins transitions with the empty
/// (true) label; `N` joins nothing.
pub fn leaf_matches(leaf: Leaf, label: &Label) -> bool {
    match leaf {
        Leaf::Literal(v, _) => label.vars() & v.bit() != 0,
        Leaf::True => label.is_true(),
        Leaf::False => false,
    }
}

pub fn build_union(g: &SystemGraph, t: &SpecTree) -> UnionGraph {
    let offset = g.nodes.len();
    let mut nodes = g.nodes.clone();
    nodes.extend(t.nodes.iter().map(|n| match n {
        TreeNode::Operator(op) => NodeRole::Operator(*op),
        TreeNode::Leaf(l) => NodeRole::Leaf(*l),
    }));
    let mut edges = g.edges.clone();
    edges.extend(t.edges.iter().map(|&(p, c)| Edge { u: offset + p, v: offset + c, kind: EdgeKind::Tree }));
    for (i, node) in t.nodes.iter().enumerate() {
        let TreeNode::Leaf(leaf) = node else { continue };
        for (j, role) in g.nodes.iter().enumerate() {
            if let NodeRole::Transition { label, .. } = role {
                if leaf_matches(*leaf, label) {
                    edges.push(Edge { u: offset + i, v: j, kind: EdgeKind::Union });
                }
            }
        }
    }
    UnionGraph { nodes, edges, num_states: g.num_states, num_system_nodes: offset }
}

impl UnionGraph {
    /// Builds the union graph of `system` and the NNF specification `spec`.
    pub fn build(system: &Buchi, spec: &Formula) -> Result<UnionGraph, EncodingError> {
        Ok(build_union(&build_system_graph(system), &build_spec_tree(spec)?))
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges_of(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }
}

fn label_slots(row: &mut FeatureRow, label: &Label) {
    if label.is_true() {
        row[layout::CONSTANT] = 1.0;
    }
    for (v, positive) in label.literals() {
        let base = if positive { layout::POSITIVE } else { layout::NEGATIVE };
        row[base + v.index()] = 1.0;
    }
}

pub fn encode_node(role: &NodeRole) -> FeatureRow {
    let mut row = [0.0; FEATURE_WIDTH];
    match role {
        NodeRole::State { initial, accepting, .. } => {
            row[layout::INITIAL] = f64::from(u8::from(*initial));
            row[layout::FINAL] = f64::from(u8::from(*accepting));
        }
        NodeRole::Transition { src, dst, label, .. } => {
            label_slots(&mut row, label);
            row[layout::SOURCE] = *src as f64;
            row[layout::DESTINATION] = *dst as f64;
        }
        NodeRole::Operator(op) => row[op.slot()] = 1.0,
        NodeRole::Leaf(Leaf::Literal(v, true)) => row[layout::POSITIVE + v.index()] = 1.0,
        NodeRole::Leaf(Leaf::Literal(v, false)) => row[layout::NEGATIVE + v.index()] = 1.0,
        NodeRole::Leaf(Leaf::True | Leaf::False) => row[layout::CONSTANT] = 1.0,
    }
    row
}

/// Feature matrix, one 66-slot row per node in canonical order.
pub fn encode_nodes(c: &UnionGraph) -> Vec<FeatureRow> {
    c.nodes.iter().map(encode_node).collect()
}

/// How part VI carries a transition's state numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum IndexEncoding {
    /// 0-based state numbers as they are.
    #[default]
    Raw,
    /// State numbers divided by the state count, so they lie in `[0, 1)`.
    Scaled,
}

impl IndexEncoding {
    pub const ALL: [IndexEncoding; 2] = [IndexEncoding::Raw, IndexEncoding::Scaled];

    pub fn code(self) -> u32 {
        self as u32
    }

    pub fn from_code(code: u32) -> Option<IndexEncoding> {
        IndexEncoding::ALL.into_iter().find(|e| e.code() == code)
    }

    /// Multiplier applied to the part VI slots of a graph with `num_states`
    /// states.
    pub fn factor(self, num_states: usize) -> f64 {
        match self {
            IndexEncoding::Raw => 1.0,
            IndexEncoding::Scaled => 1.0 / num_states.max(1) as f64,
        }
    }

    pub fn apply(self, row: &mut FeatureRow, num_states: usize) {
        let k = self.factor(num_states);
        row[layout::SOURCE] *= k;
        row[layout::DESTINATION] *= k;
    }
}

/// [`encode_nodes`] with a chosen part VI encoding.
pub fn encode_nodes_with(c: &UnionGraph, indices: IndexEncoding) -> Vec<FeatureRow> {
    let mut rows = encode_nodes(c);
    for row in &mut rows {
        indices.apply(row, c.num_states);
    }
    rows
}

/// Size statistics of one (specification, system) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphStats {
    pub formula_length: usize,
    pub states: usize,
    pub transitions: usize,
}

pub fn graph_stats<'a>(pairs: impl IntoIterator<Item = (&'a Formula, &'a Buchi)>) -> Vec<GraphStats> {
    pairs
        .into_iter()
        .map(|(f, b)| GraphStats {
            formula_length: f.len(),
            states: b.num_states(),
            transitions: b.transitions().len(),
        })
        .collect()
}
