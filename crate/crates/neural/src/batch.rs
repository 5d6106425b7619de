use std::ops::Range;

use ltlgnn_core::encoding::{encode_nodes, layout, EdgeKind, IndexEncoding, UnionGraph, FEATURE_WIDTH};
use ndarray::{s, ArrayView2};

use crate::sparse::Csr;
use crate::tensor::Tensor;

/// Model input derived from one union graph: the feature matrix plus its
/// edges split by kind. System nodes occupy rows `0..num_system_nodes`.
/// Features keep raw state numbers; batches rescale them per model.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedGraph {
    pub features: Tensor,
    pub system_edges: Vec<(usize, usize)>,
    pub tree_edges: Vec<(usize, usize)>,
    pub union_edges: Vec<(usize, usize)>,
    pub num_system_nodes: usize,
    pub num_states: usize,
}

/// Which part of each graph a batch covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum View {
    Union,
    System,
    Tree,
}

impl EncodedGraph {
    pub fn new(c: &UnionGraph) -> EncodedGraph {
        let rows = encode_nodes(c);
        let features = Tensor::from_shape_fn((rows.len(), FEATURE_WIDTH), |(i, j)| rows[i][j]);
        let mut g = EncodedGraph {
            features,
            system_edges: Vec::new(),
            tree_edges: Vec::new(),
            union_edges: Vec::new(),
            num_system_nodes: c.num_system_nodes,
            num_states: c.num_states,
        };
        for e in &c.edges {
            let list = match e.kind {
                EdgeKind::System => &mut g.system_edges,
                EdgeKind::Tree => &mut g.tree_edges,
                EdgeKind::Union => &mut g.union_edges,
            };
            list.push((e.u, e.v));
        }
        g
    }

    pub fn num_nodes(&self) -> usize {
        self.features.nrows()
    }

    /// Rows and locally numbered edges of one view.
    pub fn view(&self, view: View) -> (ArrayView2<'_, f64>, Vec<(usize, usize)>) {
        let ns = self.num_system_nodes;
        match view {
            View::Union => {
                let edges = self.system_edges.iter().chain(&self.tree_edges).chain(&self.union_edges).copied();
                (self.features.view(), edges.collect())
            }
            View::System => (self.features.slice(s![..ns, ..]), self.system_edges.clone()),
            View::Tree => {
                let edges = self.tree_edges.iter().map(|&(u, v)| (u - ns, v - ns)).collect();
                (self.features.slice(s![ns.., ..]), edges)
            }
        }
    }

    /// Same graph with nodes renumbered: new node `i` is old node `perm[i]`.
    /// Only permutations that keep system nodes first preserve the views.
    pub fn permuted(&self, perm: &[usize]) -> EncodedGraph {
        let n = self.num_nodes();
        assert_eq!(perm.len(), n);
        let mut inverse = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let remap = |edges: &[(usize, usize)]| edges.iter().map(|&(u, v)| (inverse[u], inverse[v])).collect();
        EncodedGraph {
            features: Tensor::from_shape_fn(self.features.raw_dim(), |(i, j)| self.features[[perm[i], j]]),
            system_edges: remap(&self.system_edges),
            tree_edges: remap(&self.tree_edges),
            union_edges: remap(&self.union_edges),
            num_system_nodes: self.num_system_nodes,
            num_states: self.num_states,
        }
    }
}

/// Disjoint union of several graphs: stacked rows, block-diagonal adjacency,
/// one pooling segment per graph.
#[derive(Clone, Debug)]
pub struct GraphBatch {
    pub x: Tensor,
    pub segments: Vec<Range<usize>>,
    pub adjacency: Csr,
    pub normalized: Csr,
}

impl GraphBatch {
    pub fn new(graphs: &[&EncodedGraph], view: View, indices: IndexEncoding) -> GraphBatch {
        let parts: Vec<_> = graphs.iter().map(|g| g.view(view)).collect();
        let total: usize = parts.iter().map(|(x, _)| x.nrows()).sum();
        assert!(parts.iter().all(|(x, _)| x.nrows() > 0), "graph view without nodes");
        let mut x = Tensor::zeros((total, FEATURE_WIDTH));
        let mut segments = Vec::with_capacity(parts.len());
        let mut edges = Vec::new();
        let mut offset = 0;
        for (g, (rows, local)) in graphs.iter().zip(&parts) {
            let n = rows.nrows();
            let mut block = x.slice_mut(s![offset..offset + n, ..]);
            block.assign(rows);
            if indices != IndexEncoding::Raw {
                let k = indices.factor(g.num_states);
                block.slice_mut(s![.., layout::SOURCE..=layout::DESTINATION]).mapv_inplace(|v| v * k);
            }
            edges.extend(local.iter().map(|&(u, v)| (u + offset, v + offset)));
            segments.push(offset..offset + n);
            offset += n;
        }
        GraphBatch {
            adjacency: Csr::adjacency(total, &edges),
            normalized: Csr::gcn_normalized(total, &edges),
            x,
            segments,
        }
    }

    pub fn num_graphs(&self) -> usize {
        self.segments.len()
    }
}

/// Per-graph mean of node rows.
pub fn mean_pool(h: &Tensor, segments: &[Range<usize>]) -> Tensor {
    let mut out = Tensor::zeros((segments.len(), h.ncols()));
    for (g, seg) in segments.iter().enumerate() {
        let mean = h.slice(s![seg.clone(), ..]).mean_axis(ndarray::Axis(0)).expect("empty segment");
        out.row_mut(g).assign(&mean);
    }
    out
}

/// Backward of [`mean_pool`]: spreads each graph's gradient evenly over its rows.
pub fn mean_pool_backward(d: &Tensor, segments: &[Range<usize>], rows: usize) -> Tensor {
    let mut out = Tensor::zeros((rows, d.ncols()));
    for (g, seg) in segments.iter().enumerate() {
        let share = &d.row(g) / seg.len() as f64;
        for i in seg.clone() {
            out.row_mut(i).assign(&share);
        }
    }
    out
}
