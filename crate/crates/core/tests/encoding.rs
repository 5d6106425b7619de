use ltlgnn_core::automata::{Buchi, Label, Transition};
use ltlgnn_core::encoding::{
    build_spec_tree, build_system_graph, dump_graph, encode_nodes, graph_stats, layout, parse_dump, EdgeKind,
    UnionGraph,
};
use ltlgnn_core::ltl::{parse_ltl, Var};

fn v(c: char) -> Var {
    Var::from_char(c).unwrap()
}

/// q0 initial, qf accepting; E1 = q0 -a&b-> q0, E2 = qf -1-> qf, E3 = q0 -!b-> qf.
fn worked_example() -> Buchi {
    let e1 = Label::from_literals([(v('a'), true), (v('b'), true)]).unwrap();
    let e3 = Label::from_literals([(v('b'), false)]).unwrap();
    Buchi::new(
        2,
        0,
        [1],
        [v('a'), v('b')],
        vec![
            Transition { src: 0, dst: 0, label: e1 },
            Transition { src: 1, dst: 1, label: Label::TRUE },
            Transition { src: 0, dst: 1, label: e3 },
        ],
    )
    .unwrap()
}

fn pairs(c: &UnionGraph, kind: EdgeKind) -> Vec<(usize, usize)> {
    let mut out: Vec<_> = c.edges_of(kind).map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
    out.sort();
    out
}

#[test]
fn worked_example_graphs() {
    let b = worked_example();
    let g = build_system_graph(&b);
    assert_eq!(g.nodes.len(), 5);
    let mut sys: Vec<_> = g.edges.iter().map(|e| (e.u, e.v)).collect();
    sys.sort();
    // q0-E1, q0-E3, qf-E2, qf-E3
    assert_eq!(sys, vec![(0, 2), (0, 4), (1, 3), (1, 4)]);

    let spec = parse_ltl("a U !b").unwrap();
    let t = build_spec_tree(&spec).unwrap();
    assert_eq!(t.nodes.len(), 3);

    let c = UnionGraph::build(&b, &spec).unwrap();
    assert_eq!(c.num_nodes(), 8);
    assert_eq!(pairs(&c, EdgeKind::Tree), vec![(5, 7), (6, 7)]);
    // a-E1, !b-E1, !b-E3
    assert_eq!(pairs(&c, EdgeKind::Union), vec![(2, 5), (2, 6), (4, 6)]);

    let x = encode_nodes(&c);
    assert_eq!((x[0][layout::INITIAL], x[0][layout::FINAL]), (1.0, 0.0));
    assert_eq!((x[1][layout::INITIAL], x[1][layout::FINAL]), (0.0, 1.0));
    assert_eq!(x[2][layout::POSITIVE], 1.0);
    assert_eq!(x[2][layout::POSITIVE + 1], 1.0);
    assert_eq!(x[3][layout::CONSTANT], 1.0);
    assert_eq!((x[4][layout::SOURCE], x[4][layout::DESTINATION]), (0.0, 1.0));
    assert_eq!(x[4][layout::NEGATIVE + 1], 1.0);
    assert_eq!(x[6][layout::NEGATIVE + 1], 1.0);
    assert_eq!(x[7][layout::OPERATOR + 6], 1.0);

    let stats = graph_stats([(&spec, &b)]);
    assert_eq!((stats[0].formula_length, stats[0].states, stats[0].transitions), (4, 2, 3));
}

#[test]
fn worked_example_golden_dump() {
    let c = UnionGraph::build(&worked_example(), &parse_ltl("a U !b").unwrap()).unwrap();
    let text = dump_graph(&c);
    let golden = include_str!("golden/worked_example.txt");
    assert_eq!(text, golden);
    let parsed = parse_dump(&text).unwrap();
    assert_eq!(parsed.features, encode_nodes(&c));
    assert_eq!(parsed.edges, c.edges);
}

#[test]
fn dump_rejects_garbage() {
    assert!(parse_dump("").is_err());
    assert!(parse_dump("nodes 1\n0 state 1,2\nedges 0\n").is_err());
    assert!(parse_dump("nodes 0\nedges 1\n0 1 tree\n").is_err());
}
