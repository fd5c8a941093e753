//! Artin–Wedderburn decomposition of a semisimple C* Hopf algebra.
//!
//! Central idempotents come from a random self-adjoint central element; each block
//! `e_ν A ≅ M_{d_ν}` is then split into irreducible left ideals by the eigenspaces of
//! right multiplication by a random self-adjoint element, computed in Haar-orthonormal
//! coordinates so that the operator is Hermitian.

use super::{gram_matrix, FinHopfAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, ZERO};
use nalgebra::DMatrix;

#[derive(Clone, Debug)]
pub struct IrrepDecomposition {
    /// dim ν for each block, in order of the eigenvalues of the splitting central element.
    pub block_dims: Vec<usize>,
    /// Columns span irreducible left ideals, grouped block by block; `P⁻¹ L(a) P` is block diagonal.
    pub change_of_basis: DMatrix<C64>,
    /// Primitive central idempotents, one per block.
    pub central_idempotents: Vec<Vec<C64>>,
    /// Unitary irrep matrices `D^ν(e_i)` for every basis element `e_i`, one set per block.
    pub irreps: Vec<Vec<DMatrix<C64>>>,
}

impl IrrepDecomposition {
    /// Sizes of the diagonal blocks of the change of basis (dim ν repeated dim ν times).
    pub fn ideal_sizes(&self) -> Vec<usize> {
        self.block_dims
            .iter()
            .flat_map(|&n| std::iter::repeat(n).take(n))
            .collect()
    }

    /// D^ν(x) for a general element.
    pub fn irrep_of(&self, nu: usize, x: &[C64]) -> DMatrix<C64> {
        let n = self.block_dims[nu];
        let mut m = DMatrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if *xi != ZERO {
                m += &self.irreps[nu][i] * *xi;
            }
        }
        m
    }
}

const MAX_TRIES: usize = 8;

pub fn artin_wedderburn(a: &FinHopfAlgebra, seed: u64) -> Result<IrrepDecomposition> {
    let d = a.dim();
    let mut rng = linalg::seeded(seed);
    let g = gram_matrix(a)?;
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotSemisimple("Gram matrix not positive".into()))?;
    let l = chol.l();
    let lh = l.adjoint();
    let lh_inv = lh
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotSemisimple("singular Gram factor".into()))?;
    // orthonormal coordinates: y = Lᴴ x
    let to_on = |m: &DMatrix<C64>| &lh * m * &lh_inv;

    let zb = a.center_basis(1e-9);
    let nz = zb.ncols();
    if nz == 0 {
        return Err(Error::NotSemisimple("trivial center".into()));
    }

    for _ in 0..MAX_TRIES {
        // random self-adjoint central element
        let coeffs = linalg::random_vector(&mut rng, nz);
        let c0 = linalg::mat_vec(&zb, &coeffs);
        let cs = a.star_of(&c0);
        let c: Vec<C64> = c0.iter().zip(&cs).map(|(x, y)| x + y).collect();
        let lc = to_on(&a.left_matrix(&c));
        let herm = (&lc + lc.adjoint()) * linalg::r(0.5);
        let (vals, vecs) = linalg::herm_eigen(&herm);
        let clusters = cluster(&vals, 1e-7);
        if clusters.len() != nz {
            continue;
        }
        let mut block_dims = Vec::new();
        let mut idems = Vec::new();
        let mut block_spaces = Vec::new();
        let mut ok = true;
        for cl in &clusters {
            let dim2 = cl.len();
            let n = (dim2 as f64).sqrt().round() as usize;
            if n * n != dim2 {
                ok = false;
                break;
            }
            let mut space = DMatrix::zeros(d, dim2);
            for (c, &i) in cl.iter().enumerate() {
                space.set_column(c, &vecs.column(i));
            }
            // e_ν: projector onto the block in orthonormal coordinates is the image of 1 under L(e_ν);
            // e_ν = P_ν(1) because e_ν A is the eigenspace and 1 = Σ e_ν.
            let one_on = linalg::mat_vec(&lh, &a.unit);
            let proj = &space * space.adjoint();
            let e_on = linalg::mat_vec(&proj, &one_on);
            let e = linalg::mat_vec(&lh_inv, &e_on);
            block_dims.push(n);
            idems.push(e);
            block_spaces.push(space);
        }
        if !ok {
            continue;
        }

        // split each block into irreducible left ideals
        let mut cob = DMatrix::zeros(d, d);
        let mut col = 0;
        let mut irreps = Vec::new();
        for (nu, space) in block_spaces.iter().enumerate() {
            let n = block_dims[nu];
            let y0 = linalg::random_vector(&mut rng, d);
            let ys = a.star_of(&y0);
            let y: Vec<C64> = y0.iter().zip(&ys).map(|(p, q)| p + q).collect();
            let rb = to_on(&a.right_matrix(&y));
            let restricted = space.adjoint() * &rb * space;
            let restricted = (&restricted + restricted.adjoint()) * linalg::r(0.5);
            let (rv, rvec) = linalg::herm_eigen(&restricted);
            let rcl = cluster(&rv, 1e-7);
            if rcl.len() != n || rcl.iter().any(|c| c.len() != n) {
                ok = false;
                break;
            }
            let mut first_ideal: Option<DMatrix<C64>> = None;
            for cl in &rcl {
                let mut w = DMatrix::zeros(d, n);
                for (c, &i) in cl.iter().enumerate() {
                    let v = space * rvec.column(i);
                    w.set_column(c, &v);
                }
                for c in 0..n {
                    let x = &lh_inv * w.column(c);
                    cob.set_column(col, &x);
                    col += 1;
                }
                if first_ideal.is_none() {
                    first_ideal = Some(w);
                }
            }
            let w = first_ideal.unwrap();
            let mats = (0..d)
                .map(|i| w.adjoint() * to_on(&a.left_matrix(&a.basis(i))) * &w)
                .collect();
            irreps.push(mats);
        }
        if !ok {
            continue;
        }
        let dec = IrrepDecomposition {
            block_dims,
            change_of_basis: cob,
            central_idempotents: idems,
            irreps,
        };
        if block_residual(a, &dec) > 1e-8 {
            continue;
        }
        return Ok(dec);
    }
    Err(Error::NotSemisimple(format!(
        "could not block-diagonalize `{}`",
        a.name
    )))
}

fn cluster(vals: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        match out.last_mut() {
            Some(cl) if (v - vals[*cl.last().unwrap()]).abs() <= tol * scale => cl.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Largest off-block entry of `P⁻¹ L(e_i) P` over all basis elements.
pub fn block_residual(a: &FinHopfAlgebra, dec: &IrrepDecomposition) -> f64 {
    let p = &dec.change_of_basis;
    let Some(pinv) = p.clone().try_inverse() else {
        return f64::INFINITY;
    };
    let sizes = dec.ideal_sizes();
    let mut owner = Vec::new();
    for (b, &s) in sizes.iter().enumerate() {
        owner.extend(std::iter::repeat(b).take(s));
    }
    let mut worst: f64 = 0.0;
    for i in 0..a.dim() {
        let m = &pinv * a.left_matrix(&a.basis(i)) * p;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if owner[r] != owner[c] {
                    worst = worst.max(m[(r, c)].norm());
                }
            }
        }
    }
    worst
}

/// Fusion basis |ν;a,b⟩ = √(dim ν / dim H) Σ D^ν(h⁽¹⁾)_{ab} h⁽²⁾ as columns, ordered by (ν, a, b).
pub fn fusion_basis(a: &FinHopfAlgebra, dec: &IrrepDecomposition, haar: &[C64]) -> DMatrix<C64> {
    let d = a.dim();
    let sw = a.sweedler(haar, 2);
    let mut out = DMatrix::zeros(d, d);
    let mut col = 0;
    for (nu, &n) in dec.block_dims.iter().enumerate() {
        let norm = ((n as f64) / (d as f64)).sqrt();
        for ia in 0..n {
            for ib in 0..n {
                let mut v = vec![ZERO; d];
                for (legs, w) in &sw {
                    v[legs[1]] += w * dec.irreps[nu][legs[0]][(ia, ib)] * norm;
                }
                for k in 0..d {
                    out[(k, col)] = v[k];
                }
                col += 1;
            }
        }
    }
    out
}
