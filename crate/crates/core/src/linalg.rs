//! Small dense linear-algebra helpers over `Complex64`.

use na::{DMatrix, DVector};
use nalgebra as na;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Max-abs distance between two coefficient vectors.
pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn norm2(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn basis_vec(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[i] = ONE;
    v
}

pub fn mat_vec(m: &DMatrix<C64>, x: &[C64]) -> Vec<C64> {
    let v = m * DVector::from_column_slice(x);
    v.as_slice().to_vec()
}

pub fn mat_max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis (columns) of the null space of `m`, using singular values below `tol * max(1, s_max)`.
pub fn nullspace(m: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    // thin SVD drops null directions when rows < cols
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thr = tol * smax.max(1.0);
    let idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= thr)
        .collect();
    let mut out = DMatrix::zeros(cols, idx.len());
    for (c, &i) in idx.iter().enumerate() {
        for j in 0..cols {
            out[(j, c)] = vt[(i, j)].conj();
        }
    }
    out
}

pub fn rank(m: &DMatrix<C64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = m.clone().singular_values();
    let smax = s.iter().cloned().fold(0.0, f64::max);
    s.iter().filter(|&&x| x > tol * smax.max(1.0)).count()
}

/// Least-squares solution of `a x = b`; returns the solution and the max-abs residual.
pub fn lstsq(a: &DMatrix<C64>, b: &[C64]) -> (Vec<C64>, f64) {
    let (rows, cols) = a.shape();
    let (aa, bb) = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        let mut q = DVector::zeros(cols);
        q.rows_mut(0, rows).copy_from(&DVector::from_column_slice(b));
        (p, q)
    } else {
        (a.clone(), DVector::from_column_slice(b))
    };
    let svd = aa.clone().svd(true, true);
    let x = svd.solve(&bb, 1e-12).expect("svd solve");
    let res = &aa * &x - &bb;
    (x.as_slice()[..cols].to_vec(), res.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Column indices forming a basis of the column space, chosen greedily left to right
/// (deterministic column pivoting by first-independent order).
pub fn pivot_columns(m: &DMatrix<C64>, tol: f64) -> Vec<usize> {
    let mut q: Vec<DVector<C64>> = Vec::new();
    let mut piv = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).clone_owned();
        for _ in 0..2 {
            for u in &q {
                let p = u.dotc(&v);
                v -= u * p;
            }
        }
        let n = v.norm();
        if n > tol {
            q.push(v / C64::from(n));
            piv.push(j);
        }
    }
    piv
}

/// Kronecker product of dense matrices.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Hermitian eigen-decomposition (ascending eigenvalues).
pub fn herm_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let e = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].partial_cmp(&e.eigenvalues[b]).unwrap());
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(m.nrows(), idx.len());
    for (c, &i) in idx.iter().enumerate() {
        vecs.set_column(c, &e.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| random_complex(rng)).collect()
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Serde for complex vectors in files: `[re, im]` pairs on output; pairs or plain reals on
/// input.
pub mod cvec {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Real(f64),
        Pair([f64; 2]),
    }

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw: Vec<Entry> = Vec::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|e| match e {
                Entry::Real(x) => C64::new(x, 0.0),
                Entry::Pair([re, im]) => C64::new(re, im),
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let m = DMatrix::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let n = nullspace(&m, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!(mat_max_abs(&(&m * &n)) < 1e-12);
    }

    #[test]
    fn lstsq_exact() {
        let a = DMatrix::from_row_slice(3, 2, &[ONE, ZERO, ZERO, ONE, ONE, ONE]);
        let (x, res) = lstsq(&a, &[r(1.0), r(2.0), r(3.0)]);
        assert!(res < 1e-12);
        assert!(max_diff(&x, &[r(1.0), r(2.0)]) < 1e-12);
    }

    #[test]
    fn pivots_skip_dependent_columns() {
        let m = DMatrix::from_row_slice(2, 3, &[ONE, r(2.0), ZERO, ZERO, ZERO, ONE]);
        assert_eq!(pivot_columns(&m, 1e-12), vec![0, 2]);
    }
}
