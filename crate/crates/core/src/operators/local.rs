//! Sparse operators acting on a handful of edges.
//!
//! A [`LatticeOperator`] stores its matrix over the mixed-radix index of its support
//! (first support edge most significant) and acts as the identity elsewhere. Global
//! states use the same convention over all edges, edge 0 most significant.

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use nalgebra::DMatrix;
use rayon::prelude::*;
use sprs::{CsMat, TriMat};

/// A small matrix stored by columns as (row, value) lists.
pub type ColMat = Vec<Vec<(usize, C64)>>;

const DROP: f64 = 1e-14;

pub fn col_mat(m: &DMatrix<C64>) -> ColMat {
    (0..m.ncols())
        .map(|j| {
            (0..m.nrows())
                .filter(|&i| m[(i, j)].norm() > DROP)
                .map(|i| (i, m[(i, j)]))
                .collect()
        })
        .collect()
}

pub fn col_mat_to_dense(m: &ColMat, rows: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(rows, m.len());
    for (j, col) in m.iter().enumerate() {
        for &(i, v) in col {
            out[(i, j)] += v;
        }
    }
    out
}

/// Default cap on dense materialization, overridable through `QDOUBLE_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var("QDOUBLE_DENSE_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(8192)
}

/// Cap on the local dimension of sparse products (commutators, projector checks).
pub const SPARSE_CAP: usize = 1 << 20;

pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

pub fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

#[derive(Clone, Debug)]
pub struct LatticeOperator {
    pub support: Vec<usize>,
    pub dims: Vec<usize>,
    /// CSR matrix over the local index.
    pub mat: CsMat<C64>,
}

impl LatticeOperator {
    pub fn local_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn identity(support: Vec<usize>, dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        LatticeOperator {
            support,
            dims,
            mat: CsMat::eye(n),
        }
    }

    /// Builds the matrix column by column: `col(digits)` returns the image of the basis
    /// state with the given local digits as (local row, value) pairs.
    pub fn from_columns<F>(support: Vec<usize>, dims: Vec<usize>, col: F) -> Self
    where
        F: Fn(&[usize], &mut Vec<(usize, C64)>) + Sync,
    {
        let n: usize = dims.iter().product();
        const CHUNK: usize = 256;
        let chunks: Vec<Vec<(usize, usize, C64)>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![ZERO; n];
                let mut touched: Vec<usize> = Vec::new();
                let mut dig = vec![0; dims.len()];
                let mut buf = Vec::new();
                let mut out = Vec::new();
                for j in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    digits(j, &dims, &mut dig);
                    buf.clear();
                    col(&dig, &mut buf);
                    for &(i, v) in &buf {
                        touched.push(i);
                        acc[i] += v;
                    }
                    touched.sort_unstable();
                    touched.dedup();
                    for &i in &touched {
                        if acc[i].norm() > DROP {
                            out.push((i, j, acc[i]));
                        }
                        acc[i] = ZERO;
                    }
                    touched.clear();
                }
                out
            })
            .collect();
        let mut tri = TriMat::new((n, n));
        for chunk in chunks {
            for (i, j, v) in chunk {
                tri.add_triplet(i, j, v);
            }
        }
        LatticeOperator {
            support,
            dims,
            mat: tri.to_csr(),
        }
    }

    /// Σ_t c_t ⊗_k M_{t,k}, each factor acting on the corresponding support edge.
    pub fn from_terms(support: Vec<usize>, dims: Vec<usize>, terms: &[(C64, Vec<&ColMat>)]) -> Self {
        let d2 = dims.clone();
        Self::from_columns(support, dims, move |dig, out| {
            let mut cur: Vec<(usize, C64)> = Vec::new();
            let mut next: Vec<(usize, C64)> = Vec::new();
            for (c, factors) in terms {
                cur.clear();
                cur.push((0, *c));
                for (k, f) in factors.iter().enumerate() {
                    next.clear();
                    for &(off, w) in &cur {
                        for &(r, v) in &f[dig[k]] {
                            next.push((off * d2[k] + r, w * v));
                        }
                    }
                    std::mem::swap(&mut cur, &mut next);
                    if cur.is_empty() {
                        break;
                    }
                }
                out.extend_from_slice(&cur);
            }
        })
    }

    pub fn nnz(&self) -> usize {
        self.mat.nnz()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.data().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Self {
        LatticeOperator {
            support: self.support.clone(),
            dims: self.dims.clone(),
            mat: self.mat.map(|v| v * c),
        }
    }

    /// Conjugate transpose in the standard basis (no Gram matrices involved).
    pub fn conj_transpose(&self) -> Self {
        let t: CsMat<C64> = self.mat.transpose_view().to_owned().map(|v| v.conj()).to_csr();
        LatticeOperator {
            support: self.support.clone(),
            dims: self.dims.clone(),
            mat: t,
        }
    }

    /// The same operator over a larger support (`support` must contain `self.support`).
    pub fn embed(&self, support: &[usize], dims: &[usize]) -> Result<Self> {
        if support == self.support.as_slice() {
            return Ok(self.clone());
        }
        let st = strides(dims);
        let mut pos = Vec::with_capacity(self.support.len());
        for e in &self.support {
            let p = support
                .iter()
                .position(|x| x == e)
                .ok_or_else(|| Error::InvalidInput(format!("edge {e} missing from target support")))?;
            if dims[p] != self.dims[pos.len()] {
                return Err(Error::InvalidInput(format!("edge {e} has inconsistent dimension")));
            }
            pos.push(p);
        }
        let extra: Vec<usize> = (0..support.len()).filter(|p| !pos.contains(p)).collect();
        let extra_dims: Vec<usize> = extra.iter().map(|&p| dims[p]).collect();
        let n_extra: usize = extra_dims.iter().product();
        let mut extra_off = Vec::with_capacity(n_extra);
        let mut dig = vec![0; extra.len()];
        for m in 0..n_extra {
            digits(m, &extra_dims, &mut dig);
            extra_off.push(dig.iter().zip(&extra).map(|(d, &p)| d * st[p]).sum::<usize>());
        }
        let own_n = self.local_dim();
        let mut own_off = Vec::with_capacity(own_n);
        let mut dig = vec![0; self.dims.len()];
        for l in 0..own_n {
            digits(l, &self.dims, &mut dig);
            own_off.push(dig.iter().zip(&pos).map(|(d, &p)| d * st[p]).sum::<usize>());
        }
        let n: usize = dims.iter().product();
        let mut tri = TriMat::with_capacity((n, n), self.nnz() * n_extra);
        for (v, (r, c)) in self.mat.iter() {
            for &m in &extra_off {
                tri.add_triplet(own_off[r] + m, own_off[c] + m, *v);
            }
        }
        Ok(LatticeOperator {
            support: support.to_vec(),
            dims: dims.to_vec(),
            mat: tri.to_csr(),
        })
    }

    /// Union of two supports, keeping `self`'s order first.
    pub fn union_support(&self, other: &Self) -> (Vec<usize>, Vec<usize>) {
        let mut s = self.support.clone();
        let mut d = self.dims.clone();
        for (e, k) in other.support.iter().zip(&other.dims) {
            if !s.contains(e) {
                s.push(*e);
                d.push(*k);
            }
        }
        (s, d)
    }

    fn check_cap(dims: &[usize]) -> Result<()> {
        let n = dims.iter().try_fold(1usize, |a, &b| a.checked_mul(b));
        match n {
            Some(n) if n <= SPARSE_CAP => Ok(()),
            _ => Err(Error::TooLarge {
                dim: n.unwrap_or(usize::MAX),
                budget: SPARSE_CAP,
            }),
        }
    }

    /// `self · other` on the union of the supports.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let (s, d) = self.union_support(other);
        Self::check_cap(&d)?;
        let a = self.embed(&s, &d)?;
        let b = other.embed(&s, &d)?;
        Ok(LatticeOperator {
            support: s,
            dims: d,
            mat: &a.mat * &b.mat,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (s, d) = self.union_support(other);
        Self::check_cap(&d)?;
        let a = self.embed(&s, &d)?;
        let b = other.embed(&s, &d)?;
        Ok(LatticeOperator {
            support: s,
            dims: d,
            mat: &a.mat + &b.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn zero(support: Vec<usize>, dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        LatticeOperator {
            support,
            dims,
            mat: CsMat::zero((n, n)),
        }
    }

    /// `self ⊗ other` for disjoint supports; the support of `self` comes first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.support.iter().any(|e| other.support.contains(e)) {
            return Err(Error::InvalidInput("tensor factors overlap".into()));
        }
        let mut support = self.support.clone();
        support.extend_from_slice(&other.support);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::check_cap(&dims)?;
        let m = other.local_dim();
        let n = self.local_dim() * m;
        let mut tri = TriMat::with_capacity((n, n), self.nnz() * other.nnz());
        for (v, (r, c)) in self.mat.iter() {
            for (w, (r2, c2)) in other.mat.iter() {
                tri.add_triplet(r * m + r2, c * m + c2, v * w);
            }
        }
        Ok(LatticeOperator {
            support,
            dims,
            mat: tri.to_csr(),
        })
    }

    /// Σ cᵢ Oᵢ for operators sharing `support` in the same order.
    pub fn linear_combination(support: Vec<usize>, dims: Vec<usize>, terms: &[(C64, Self)]) -> Result<Self> {
        let n: usize = dims.iter().product();
        let mut tri = TriMat::with_capacity((n, n), terms.iter().map(|t| t.1.nnz()).sum());
        for (c, op) in terms {
            if op.support != support {
                return Err(Error::InvalidInput("linear combination over different supports".into()));
            }
            if *c == ZERO {
                continue;
            }
            for (v, (r, col)) in op.mat.iter() {
                tri.add_triplet(r, col, c * v);
            }
        }
        Ok(LatticeOperator {
            support,
            dims,
            mat: tri.to_csr(),
        })
    }

    /// For every index of the space over `support`, the local index of `self` and the
    /// offset contributed by the remaining edges.
    fn split_index(&self, support: &[usize], dims: &[usize]) -> (Vec<u32>, Vec<usize>, Vec<usize>) {
        let st = strides(dims);
        let pos: Vec<usize> = self
            .support
            .iter()
            .map(|e| support.iter().position(|x| x == e).expect("support is a subset"))
            .collect();
        let n: usize = dims.iter().product();
        let own_n = self.local_dim();
        let mut own_off = Vec::with_capacity(own_n);
        let mut dig = vec![0; self.dims.len()];
        for l in 0..own_n {
            digits(l, &self.dims, &mut dig);
            own_off.push(dig.iter().zip(&pos).map(|(d, &p)| d * st[p]).sum::<usize>());
        }
        let mut loc = Vec::with_capacity(n);
        let mut rest = Vec::with_capacity(n);
        let mut dig = vec![0; dims.len()];
        for c in 0..n {
            digits(c, dims, &mut dig);
            let l = pos.iter().fold(0usize, |a, &p| a * dims[p] + dig[p]);
            loc.push(l as u32);
            rest.push(c - own_off[l]);
        }
        (loc, rest, own_off)
    }

    /// Largest entry of [self, other], evaluated column by column without forming either
    /// product.
    pub fn commutator_max(&self, other: &Self) -> Result<f64> {
        let (s, d) = self.union_support(other);
        Self::check_cap(&d)?;
        let n: usize = d.iter().product();
        let (la, ra, oa) = self.split_index(&s, &d);
        let (lb, rb, ob) = other.split_index(&s, &d);
        let ca = self.mat.to_csc();
        let cb = other.mat.to_csc();
        let chunk = 512;
        let worst = (0..n.div_ceil(chunk))
            .into_par_iter()
            .map(|k| {
                let mut acc = vec![ZERO; n];
                let mut touched: Vec<usize> = Vec::new();
                let mut worst: f64 = 0.0;
                for c in k * chunk..((k + 1) * chunk).min(n) {
                    for (first, second, sign) in [
                        ((&cb, &lb, &rb, &ob), (&ca, &la, &ra, &oa), ONE),
                        ((&ca, &la, &ra, &oa), (&cb, &lb, &rb, &ob), -ONE),
                    ] {
                        let (m1, l1, r1, o1) = first;
                        let (m2, l2, r2, o2) = second;
                        let col = m1.outer_view(l1[c] as usize).expect("column in range");
                        for (r, v) in col.iter() {
                            let mid = o1[r] + r1[c];
                            let col2 = m2.outer_view(l2[mid] as usize).expect("column in range");
                            for (q, w) in col2.iter() {
                                let t = o2[q] + r2[mid];
                                if acc[t] == ZERO {
                                    touched.push(t);
                                }
                                acc[t] += sign * w * v;
                            }
                        }
                    }
                    for t in touched.drain(..) {
                        worst = worst.max(acc[t].norm());
                        acc[t] = ZERO;
                    }
                }
                worst
            })
            .reduce(|| 0.0, f64::max);
        Ok(worst)
    }

    /// Largest entry of `self − other` over the union of the supports.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn to_local_dense(&self) -> DMatrix<C64> {
        let n = self.local_dim();
        let mut m = DMatrix::zeros(n, n);
        for (v, (r, c)) in self.mat.iter() {
            m[(r, c)] += *v;
        }
        m
    }

    /// Dense matrix on the full space with per-edge dimensions `all_dims`.
    pub fn to_dense(&self, all_dims: &[usize], cap: usize) -> Result<DMatrix<C64>> {
        let n = all_dims.iter().try_fold(1usize, |a, &b| a.checked_mul(b));
        match n {
            Some(n) if n <= cap => {}
            _ => {
                return Err(Error::TooLarge {
                    dim: n.unwrap_or(usize::MAX),
                    budget: cap,
                })
            }
        }
        let all: Vec<usize> = (0..all_dims.len()).collect();
        Ok(self.embed(&all, all_dims)?.to_local_dense())
    }

    /// y = M x on the local space.
    pub fn apply_local(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.local_dim()];
        for (r, row) in self.mat.outer_iterator().enumerate() {
            let mut acc = ZERO;
            for (c, v) in row.iter() {
                acc += v * x[c];
            }
            y[r] = acc;
        }
        y
    }

    /// Applies the operator (tensored with the identity) to a global state.
    pub fn apply(&self, all_dims: &[usize], psi: &[C64]) -> Vec<C64> {
        let st = strides(all_dims);
        let own_n = self.local_dim();
        let mut own_off = Vec::with_capacity(own_n);
        let mut dig = vec![0; self.dims.len()];
        for l in 0..own_n {
            digits(l, &self.dims, &mut dig);
            own_off.push(
                dig.iter()
                    .zip(&self.support)
                    .map(|(d, &e)| d * st[e])
                    .sum::<usize>(),
            );
        }
        let env_edges: Vec<usize> = (0..all_dims.len())
            .filter(|e| !self.support.contains(e))
            .collect();
        let env_dims: Vec<usize> = env_edges.iter().map(|&e| all_dims[e]).collect();
        let n_env: usize = env_dims.iter().product();
        let mut env_off = Vec::with_capacity(n_env);
        let mut dig = vec![0; env_edges.len()];
        for m in 0..n_env {
            digits(m, &env_dims, &mut dig);
            env_off.push(dig.iter().zip(&env_edges).map(|(d, &e)| d * st[e]).sum::<usize>());
        }
        let blocks: Vec<Vec<C64>> = env_off
            .par_chunks(64)
            .map(|chunk| {
                let mut out = Vec::with_capacity(chunk.len() * own_n);
                let mut x = vec![ZERO; own_n];
                for &base in chunk {
                    for (l, o) in own_off.iter().enumerate() {
                        x[l] = psi[base + o];
                    }
                    for row in self.mat.outer_iterator() {
                        let mut acc = ZERO;
                        for (c, v) in row.iter() {
                            acc += v * x[c];
                        }
                        out.push(acc);
                    }
                }
                out
            })
            .collect();
        let mut y = vec![ZERO; psi.len()];
        for (chunk, block) in env_off.chunks(64).zip(blocks) {
            for (k, &base) in chunk.iter().enumerate() {
                for (l, o) in own_off.iter().enumerate() {
                    y[base + o] = block[k * own_n + l];
                }
            }
        }
        y
    }
}

/// ⊗ of per-edge Gram matrices on a support, as a sparse operator.
pub fn gram_operator(support: Vec<usize>, dims: Vec<usize>, grams: &[ColMat]) -> LatticeOperator {
    let factors: Vec<&ColMat> = grams.iter().collect();
    LatticeOperator::from_terms(support, dims, &[(ONE, factors)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, max_diff, random_vector, seeded};

    fn rand_mat(rng: &mut impl rand::Rng, n: usize) -> DMatrix<C64> {
        let v = random_vector(rng, n * n);
        DMatrix::from_vec(n, n, v)
    }

    #[test]
    fn from_terms_matches_kron() {
        let mut rng = seeded(3);
        let a = rand_mat(&mut rng, 2);
        let b = rand_mat(&mut rng, 3);
        let (ca, cb) = (col_mat(&a), col_mat(&b));
        let op = LatticeOperator::from_terms(vec![4, 1], vec![2, 3], &[(ONE, vec![&ca, &cb])]);
        let dense = op.to_local_dense();
        assert!(crate::linalg::mat_max_abs(&(dense - kron(&a, &b))) < 1e-12);
    }

    #[test]
    fn apply_matches_dense_embedding() {
        let mut rng = seeded(5);
        let dims = vec![2, 3, 2, 2];
        let a = rand_mat(&mut rng, 6);
        let op = LatticeOperator::from_columns(vec![3, 1], vec![2, 3], |dig, out| {
            let j = dig[0] * 3 + dig[1];
            for i in 0..6 {
                out.push((i, a[(i, j)]));
            }
        });
        let psi = random_vector(&mut rng, 24);
        let dense = op.to_dense(&dims, 8192).unwrap();
        let want = crate::linalg::mat_vec(&dense, &psi);
        assert!(max_diff(&op.apply(&dims, &psi), &want) < 1e-12);
        // identity away from the support
        let mut away = vec![ZERO; 24];
        away[0] = ONE;
        let id = LatticeOperator::identity(vec![0, 2], vec![2, 2]);
        assert!(max_diff(&id.apply(&dims, &psi), &psi) < 1e-15);
        assert_eq!(op.apply(&dims, &away).len(), 24);
    }

    #[test]
    fn compose_matches_dense_product() {
        let mut rng = seeded(7);
        let dims = vec![2, 2, 2];
        let a = rand_mat(&mut rng, 4);
        let b = rand_mat(&mut rng, 4);
        let (ca, cb) = (col_mat(&a), col_mat(&b));
        let full = |m: &ColMat, s: Vec<usize>| {
            LatticeOperator::from_columns(s, vec![2, 2], |dig, out| {
                out.extend_from_slice(&m[dig[0] * 2 + dig[1]]);
            })
        };
        let oa = full(&ca, vec![0, 1]);
        let ob = full(&cb, vec![2, 1]);
        let prod = oa.compose(&ob).unwrap();
        let da = oa.to_dense(&dims, 64).unwrap();
        let db = ob.to_dense(&dims, 64).unwrap();
        let dp = prod.to_dense(&dims, 64).unwrap();
        assert!(crate::linalg::mat_max_abs(&(dp - da * db)) < 1e-12);
    }

    #[test]
    fn commutator_matches_dense() {
        let mut rng = seeded(8);
        let dims = vec![2, 3, 2, 2];
        let a = rand_mat(&mut rng, 6);
        let b = rand_mat(&mut rng, 6);
        let (ca, cb) = (col_mat(&a), col_mat(&b));
        let oa = LatticeOperator::from_columns(vec![1, 0], vec![3, 2], |dig, out| {
            out.extend_from_slice(&ca[dig[0] * 2 + dig[1]]);
        });
        let ob = LatticeOperator::from_columns(vec![3, 1], vec![2, 3], |dig, out| {
            out.extend_from_slice(&cb[dig[0] * 3 + dig[1]]);
        });
        let da = oa.to_dense(&dims, 64).unwrap();
        let db = ob.to_dense(&dims, 64).unwrap();
        let dense = crate::linalg::mat_max_abs(&(&da * &db - &db * &da));
        assert!(dense > 1e-3);
        assert!((oa.commutator_max(&ob).unwrap() - dense).abs() < 1e-12);
        let oc = LatticeOperator::from_columns(vec![2], vec![2], |dig, out| out.push((1 - dig[0], ONE)));
        assert!(oa.commutator_max(&oc).unwrap() < 1e-15);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let op = LatticeOperator::identity(vec![0], vec![2]);
        assert!(matches!(op.to_dense(&[2; 14], 8192), Err(Error::TooLarge { .. })));
    }
}
