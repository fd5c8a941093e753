use crate::linalg::{C64, ZERO};

/// Sparse rank-3 structure tensor `t[i,j,k]`, stored as one list of `(k, value)` per `(i,j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructTensor {
    pub dims: [usize; 3],
    rows: Vec<Vec<(usize, C64)>>,
}

impl StructTensor {
    pub fn zeros(dims: [usize; 3]) -> Self {
        StructTensor {
            dims,
            rows: vec![Vec::new(); dims[0] * dims[1]],
        }
    }

    /// Builds from a dense row-major array, dropping entries with modulus below `drop`.
    pub fn from_dense(dims: [usize; 3], data: &[C64], drop: f64) -> Self {
        assert_eq!(data.len(), dims[0] * dims[1] * dims[2]);
        let mut t = Self::zeros(dims);
        for ij in 0..dims[0] * dims[1] {
            for k in 0..dims[2] {
                let v = data[ij * dims[2] + k];
                if v.norm() > drop {
                    t.rows[ij].push((k, v));
                }
            }
        }
        t
    }

    pub fn to_dense(&self) -> Vec<C64> {
        let mut out = vec![ZERO; self.dims[0] * self.dims[1] * self.dims[2]];
        for (ij, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                out[ij * self.dims[2] + k] += v;
            }
        }
        out
    }

    pub fn add(&mut self, i: usize, j: usize, k: usize, v: C64) {
        let row = &mut self.rows[i * self.dims[1] + j];
        if let Some(e) = row.iter_mut().find(|e| e.0 == k) {
            e.1 += v;
        } else {
            row.push((k, v));
        }
    }

    pub fn row(&self, i: usize, j: usize) -> &[(usize, C64)] {
        &self.rows[i * self.dims[1] + j]
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.row(i, j)
            .iter()
            .filter(|e| e.0 == k)
            .map(|e| e.1)
            .sum()
    }

    /// All stored triples `(i, j, k, value)` in row-major order.
    pub fn triples(&self) -> Vec<(usize, usize, usize, C64)> {
        let mut out = Vec::new();
        for (ij, row) in self.rows.iter().enumerate() {
            let (i, j) = (ij / self.dims[1], ij % self.dims[1]);
            let mut r = row.clone();
            r.sort_by_key(|e| e.0);
            for (k, v) in r {
                out.push((i, j, k, v));
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn has_non_finite(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .any(|(_, v)| !v.re.is_finite() || !v.im.is_finite())
    }

    /// Swaps the roles of the first two indices.
    pub fn swap01(&self) -> Self {
        let mut t = Self::zeros([self.dims[1], self.dims[0], self.dims[2]]);
        for (i, j, k, v) in self.triples() {
            t.add(j, i, k, v);
        }
        t
    }

    /// Swaps the roles of the last two indices.
    pub fn swap12(&self) -> Self {
        let mut t = Self::zeros([self.dims[0], self.dims[2], self.dims[1]]);
        for (i, j, k, v) in self.triples() {
            t.add(i, k, j, v);
        }
        t
    }
}
