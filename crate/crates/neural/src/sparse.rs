use crate::tensor::Tensor;

/// Compressed sparse rows of a symmetric weighted adjacency.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Csr {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        offsets.push(0);
        for row in rows {
            for (j, v) in row {
                cols.push(j);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        Csr { offsets, cols, vals }
    }

    /// Plain 0/1 adjacency of an undirected edge list.
    pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Csr {
        let mut rows = vec![Vec::new(); n];
        for &(u, v) in edges {
            rows[u].push((v, 1.0));
            if u != v {
                rows[v].push((u, 1.0));
            }
        }
        Csr::from_rows(rows)
    }

    /// `D^-1/2 (A + I) D^-1/2` with `D` the degree matrix of `A + I`.
    pub fn gcn_normalized(n: usize, edges: &[(usize, usize)]) -> Csr {
        let mut rows: Vec<Vec<(usize, f64)>> = (0..n).map(|i| vec![(i, 1.0)]).collect();
        for &(u, v) in edges {
            if u != v {
                rows[u].push((v, 1.0));
                rows[v].push((u, 1.0));
            }
        }
        let deg: Vec<f64> = rows.iter().map(|r| r.len() as f64).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, w) in row.iter_mut() {
                *w /= (deg[i] * deg[*j]).sqrt();
            }
        }
        Csr::from_rows(rows)
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `self · h`.
    pub fn matmul(&self, h: &Tensor) -> Tensor {
        assert_eq!(h.nrows(), self.rows(), "adjacency/feature row mismatch");
        let mut out = Tensor::zeros(h.raw_dim());
        for i in 0..self.rows() {
            let mut row = out.row_mut(i);
            for k in self.offsets[i]..self.offsets[i + 1] {
                row.scaled_add(self.vals[k], &h.row(self.cols[k]));
            }
        }
        out
    }
}
