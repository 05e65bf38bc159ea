use crate::error::{Error, Result};

/// Sparse symmetric matrix in CSR form, both triangles stored.
///
/// Immutable after construction. Invariants kept by the constructors:
/// structural symmetry, strictly positive stored values (an absent entry is
/// an exact zero), column indices sorted within each row, no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    // u32 keeps the index stream half the width of the value stream; spmv on
    // large graphs is memory-bound, so this is a measurable win.
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds from undirected weighted entries, each unordered pair listed
    /// once (diagonal entries allowed). Rejects duplicates, out-of-range
    /// indices and nonpositive weights.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        build(
            n,
            edges.len(),
            edges.iter().map(|&(i, j, w)| (i, j, w)),
            edges.iter().map(|&(i, j, w)| (i, j, w)),
        )
    }

    /// Unit-weight variant used by the graph samplers; `i != j` required.
    /// Takes `u32` endpoints so that edge lists for large graphs stay small.
    pub fn from_unit_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "unit-edge construction supports at most {} vertices",
                u32::MAX
            )));
        }
        for &(i, j) in edges {
            if i == j {
                return Err(Error::InvalidParameter(format!(
                    "self-loop at vertex {i} not allowed in unit-edge construction"
                )));
            }
        }
        build(
            n,
            edges.len(),
            edges.iter().map(|&(i, j)| (i as usize, j as usize, 1.0)),
            edges.iter().map(|&(i, j)| (i as usize, j as usize, 1.0)),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored entries (off-diagonal entries count twice).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// y = A x. Row-major, ascending column order; the summation order is
    /// fixed so repeated calls are bit-identical.
    pub fn spmv(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        for i in 0..self.n {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.values[k] * x[self.col_idx[k] as usize];
            }
            y[i] = acc;
        }
        Ok(())
    }

    pub fn spmv_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.spmv(x, &mut y)?;
        Ok(y)
    }

    /// Row sums; for a 0/1 adjacency matrix these are the vertex degrees.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).1.iter().sum())
            .collect()
    }

    /// Stored entries of the upper triangle (i <= j), each pair once.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .filter(move |&(&j, _)| j as usize >= i)
                .map(move |(&j, &w)| (i, j as usize, w))
        })
    }

    /// Entrywise mean of layers with identical dimension. Entries that cancel
    /// out cannot occur (all weights positive), so the result keeps the union
    /// sparsity pattern.
    pub fn mean(layers: &[Self]) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::InvalidParameter("mean of zero matrices".into()))?;
        let n = first.n;
        if layers.iter().any(|l| l.n != n) {
            return Err(Error::InvalidParameter(
                "mean requires layers of identical dimension".into(),
            ));
        }
        let scale = 1.0 / layers.len() as f64;
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        // k-way merge of the sorted rows, one vertex at a time.
        let mut cursors = vec![0usize; layers.len()];
        for i in 0..n {
            for (t, layer) in layers.iter().enumerate() {
                cursors[t] = layer.row_ptr[i];
            }
            loop {
                let mut next_col = u32::MAX;
                for (t, layer) in layers.iter().enumerate() {
                    if cursors[t] < layer.row_ptr[i + 1] {
                        next_col = next_col.min(layer.col_idx[cursors[t]]);
                    }
                }
                if next_col == u32::MAX {
                    break;
                }
                let mut acc = 0.0;
                for (t, layer) in layers.iter().enumerate() {
                    if cursors[t] < layer.row_ptr[i + 1] && layer.col_idx[cursors[t]] == next_col {
                        acc += layer.values[cursors[t]];
                        cursors[t] += 1;
                    }
                }
                col_idx.push(next_col);
                values.push(acc * scale);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }
}

fn build(
    n: usize,
    m: usize,
    pass1: impl Iterator<Item = (usize, usize, f64)>,
    pass2: impl Iterator<Item = (usize, usize, f64)>,
) -> Result<SparseSymMatrix> {
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameter(format!(
            "at most {} vertices supported",
            u32::MAX
        )));
    }
    // Two passes over the edge list: count per-row entries, then scatter.
    let mut counts = vec![0usize; n];
    for (i, j, w) in pass1 {
        if i >= n || j >= n {
            return Err(Error::InvalidParameter(format!(
                "edge ({i}, {j}) out of range for {n} vertices"
            )));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "edge ({i}, {j}) has nonpositive or non-finite weight {w}"
            )));
        }
        counts[i] += 1;
        if i != j {
            counts[j] += 1;
        }
    }
    let mut row_ptr = vec![0usize; n + 1];
    for i in 0..n {
        row_ptr[i + 1] = row_ptr[i] + counts[i];
    }
    let total = row_ptr[n];
    let mut col_idx = vec![0u32; total];
    let mut values = vec![0.0f64; total];
    let mut fill = row_ptr.clone();
    let mut seen = 0usize;
    for (i, j, w) in pass2 {
        col_idx[fill[i]] = j as u32;
        values[fill[i]] = w;
        fill[i] += 1;
        if i != j {
            col_idx[fill[j]] = i as u32;
            values[fill[j]] = w;
            fill[j] += 1;
        }
        seen += 1;
    }
    debug_assert_eq!(seen, m);
    // Rows are short; sort each and reject duplicate pairs.
    for i in 0..n {
        let lo = row_ptr[i];
        let hi = row_ptr[i + 1];
        let mut perm: Vec<usize> = (lo..hi).collect();
        perm.sort_unstable_by_key(|&k| col_idx[k]);
        let sorted_cols: Vec<u32> = perm.iter().map(|&k| col_idx[k]).collect();
        let sorted_vals: Vec<f64> = perm.iter().map(|&k| values[k]).collect();
        for w in sorted_cols.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidParameter(format!(
                    "duplicate entry ({i}, {})",
                    w[0]
                )));
            }
        }
        col_idx[lo..hi].copy_from_slice(&sorted_cols);
        values[lo..hi].copy_from_slice(&sorted_vals);
    }
    Ok(SparseSymMatrix {
        n,
        row_ptr,
        col_idx,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antidiagonal_swaps_coordinates() {
        let a = SparseSymMatrix::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(a.spmv_vec(&[3.0, 5.0]).unwrap(), vec![5.0, 3.0]);
    }

    #[test]
    fn weighted_pair() {
        let a = SparseSymMatrix::from_edges(2, &[(0, 1, 2.0)]).unwrap();
        assert_eq!(a.spmv_vec(&[1.0, 1.0]).unwrap(), vec![2.0, 2.0]);
    }

    #[test]
    fn empty_matrix_maps_to_zero() {
        let a = SparseSymMatrix::from_edges(3, &[]).unwrap();
        assert_eq!(a.spmv_vec(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn diagonal_entry_stored_once() {
        let a = SparseSymMatrix::from_edges(2, &[(0, 0, 1.5), (0, 1, 1.0)]).unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.spmv_vec(&[2.0, 0.0]).unwrap(), vec![3.0, 2.0]);
        let ups: Vec<_> = a.upper_entries().collect();
        assert_eq!(ups, vec![(0, 0, 1.5), (0, 1, 1.0)]);
    }

    #[test]
    fn duplicate_pair_rejected() {
        assert!(SparseSymMatrix::from_edges(3, &[(0, 1, 1.0), (1, 0, 2.0)]).is_err());
    }

    #[test]
    fn nonpositive_weight_rejected() {
        assert!(SparseSymMatrix::from_edges(2, &[(0, 1, 0.0)]).is_err());
        assert!(SparseSymMatrix::from_edges(2, &[(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = SparseSymMatrix::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        assert!(a.spmv_vec(&[1.0]).is_err());
    }

    #[test]
    fn mean_merges_patterns() {
        let a = SparseSymMatrix::from_edges(3, &[(0, 1, 1.0)]).unwrap();
        let b = SparseSymMatrix::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let m = SparseSymMatrix::mean(&[a, b]).unwrap();
        assert_eq!(m.spmv_vec(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 1.5, 0.5]);
    }
}
