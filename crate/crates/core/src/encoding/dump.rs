//! Plain-text dump of a union graph: node list with role tag and feature
//! row, then the edge list.
//!
//! ```text
//! nodes 3
//! 0 state 0,0,...,1,0,0,0
//! ...
//! edges 2
//! 0 2 system
//! ```

use std::fmt::Write;

use super::{encode_nodes, Edge, EdgeKind, EncodingError, FeatureRow, UnionGraph};

/// Parsed form of [`dump_graph`] output.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphDump {
    pub tags: Vec<String>,
    pub features: Vec<FeatureRow>,
    pub edges: Vec<Edge>,
}

pub fn dump_graph(c: &UnionGraph) -> String {
    let mut out = String::new();
    writeln!(out, "nodes {}", c.num_nodes()).unwrap();
    for (i, (role, row)) in c.nodes.iter().zip(encode_nodes(c)).enumerate() {
        let values: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{i} {} {}", role.tag(), values.join(",")).unwrap();
    }
    writeln!(out, "edges {}", c.edges.len()).unwrap();
    for e in &c.edges {
        writeln!(out, "{} {} {}", e.u, e.v, kind_name(e.kind)).unwrap();
    }
    out
}

fn kind_name(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::System => "system",
        EdgeKind::Tree => "tree",
        EdgeKind::Union => "union",
    }
}

fn bad(line: usize, message: &str) -> EncodingError {
    EncodingError::BadDump { line, message: message.to_string() }
}

fn count_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, name: &str) -> Result<usize, EncodingError> {
    let (ln, l) = lines.next().ok_or_else(|| bad(0, "unexpected end of dump"))?;
    l.strip_prefix(name)
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| bad(ln, &format!("expected `{name} <count>`")))
}

pub fn parse_dump(text: &str) -> Result<GraphDump, EncodingError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let mut dump = GraphDump { tags: Vec::new(), features: Vec::new(), edges: Vec::new() };
    let n = count_header(&mut lines, "nodes")?;
    for i in 0..n {
        let (ln, l) = lines.next().ok_or_else(|| bad(0, "missing node line"))?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 || parts[0].parse::<usize>().ok() != Some(i) {
            return Err(bad(ln, "expected `<index> <role> <features>`"));
        }
        let values: Vec<f64> = parts[2]
            .split(',')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad(ln, "non-numeric feature"))?;
        let row: FeatureRow = values.try_into().map_err(|_| bad(ln, "wrong feature width"))?;
        dump.tags.push(parts[1].to_string());
        dump.features.push(row);
    }
    let m = count_header(&mut lines, "edges")?;
    for _ in 0..m {
        let (ln, l) = lines.next().ok_or_else(|| bad(0, "missing edge line"))?;
        let [u, v, kind] = l.split_whitespace().collect::<Vec<_>>()[..] else {
            return Err(bad(ln, "expected `<u> <v> <kind>`"));
        };
        let kind = match kind {
            "system" => EdgeKind::System,
            "tree" => EdgeKind::Tree,
            "union" => EdgeKind::Union,
            _ => return Err(bad(ln, "unknown edge kind")),
        };
        let u: usize = u.parse().map_err(|_| bad(ln, "bad endpoint"))?;
        let v: usize = v.parse().map_err(|_| bad(ln, "bad endpoint"))?;
        if u >= n || v >= n {
            return Err(bad(ln, "endpoint out of range"));
        }
        dump.edges.push(Edge { u, v, kind });
    }
    if let Some((ln, _)) = lines.next() {
        return Err(bad(ln, "trailing content"));
    }
    Ok(dump)
}
