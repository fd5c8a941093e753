//! JSON algebra files: sparse structure tensors and dense maps, written with shortest
//! round-trip decimals so that reading back reproduces every coefficient bit for bit.

use super::{FinHopfAlgebra, StructTensor};
use crate::error::{Error, Result};
use crate::linalg::C64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// `[i, j, k, re, im]`.
pub type SparseEntry = (usize, usize, usize, f64, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    #[serde(default)]
    pub name: String,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    pub mult: Vec<SparseEntry>,
    pub comult: Vec<SparseEntry>,
    pub unit: Vec<[f64; 2]>,
    pub counit: Vec<[f64; 2]>,
    /// Row-major d×d.
    pub antipode: Vec<[f64; 2]>,
    pub star: Vec<[f64; 2]>,
}

pub fn sparse_entries(t: &StructTensor) -> Vec<SparseEntry> {
    t.triples().into_iter().map(|(i, j, k, v)| (i, j, k, v.re, v.im)).collect()
}

pub fn tensor_from_entries(dims: [usize; 3], entries: &[SparseEntry]) -> Result<StructTensor> {
    let mut t = StructTensor::zeros(dims);
    for &(i, j, k, re, im) in entries {
        if i >= dims[0] || j >= dims[1] || k >= dims[2] {
            return Err(Error::InvalidInput(format!("entry ({i},{j},{k}) out of range")));
        }
        t.add(i, j, k, C64::new(re, im));
    }
    Ok(t)
}

pub fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}

pub fn matrix_pairs(m: &DMatrix<C64>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

pub fn matrix_from_pairs(d: usize, v: &[[f64; 2]]) -> Result<DMatrix<C64>> {
    if v.len() != d * d {
        return Err(Error::InvalidInput(format!("expected {} matrix entries, got {}", d * d, v.len())));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| C64::new(v[i * d + j][0], v[i * d + j][1])))
}

impl FinHopfAlgebra {
    pub fn to_file(&self) -> AlgebraFile {
        AlgebraFile {
            name: self.name.clone(),
            dim: self.dim(),
            basis_labels: self.basis_labels.clone(),
            mult: sparse_entries(&self.mult),
            comult: sparse_entries(&self.comult),
            unit: pairs(&self.unit),
            counit: pairs(&self.counit),
            antipode: matrix_pairs(&self.antipode),
            star: matrix_pairs(&self.star),
        }
    }

    pub fn from_file(f: &AlgebraFile) -> Result<Self> {
        let d = f.dim;
        if f.basis_labels.len() != d || f.unit.len() != d || f.counit.len() != d {
            return Err(Error::InvalidInput("algebra file: vector lengths do not match dim".into()));
        }
        FinHopfAlgebra::new(
            f.name.clone(),
            f.basis_labels.clone(),
            tensor_from_entries([d, d, d], &f.mult)?,
            from_pairs(&f.unit),
            tensor_from_entries([d, d, d], &f.comult)?,
            from_pairs(&f.counit),
            matrix_from_pairs(d, &f.antipode)?,
            matrix_from_pairs(d, &f.star)?,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }
}
