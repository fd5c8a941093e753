//! Finite-dimensional C* Hopf algebras stored as structure constants over a fixed basis.
//!
//! Products, coproducts and the antipode are all linear maps given by tensors; the star
//! is antilinear, `x* = star · conj(x)`. Sweedler expansions are materialized explicitly
//! as sparse lists of basis tuples.

mod constructions;
pub mod file;
mod tensor;
mod wedderburn;

pub use constructions::{
    coopposite, double_elem, double_embed_h, double_embed_hat, drinfeld_double, dual, opposite,
    tensor_product,
};
pub use file::{AlgebraFile, SparseEntry};
pub use tensor::StructTensor;
pub use wedderburn::{artin_wedderburn, fusion_basis, IrrepDecomposition};

use crate::error::{Error, Result};
use crate::linalg::{self, max_diff, C64, ONE, ZERO};
use nalgebra::DMatrix;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct FinHopfAlgebra {
    pub name: String,
    pub basis_labels: Vec<String>,
    pub mult: StructTensor,
    pub unit: Vec<C64>,
    pub comult: StructTensor,
    pub counit: Vec<C64>,
    pub antipode: DMatrix<C64>,
    pub star: DMatrix<C64>,
    antipode_inv: DMatrix<C64>,
}

/// An element tagged with the name of the algebra it lives in.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub parent: String,
    pub coeffs: Vec<C64>,
}

impl AlgebraElement {
    pub fn new(parent: &FinHopfAlgebra, coeffs: Vec<C64>) -> Result<Self> {
        parent.check_len(coeffs.len())?;
        Ok(AlgebraElement {
            parent: parent.name.clone(),
            coeffs,
        })
    }
}

/// Sparse Sweedler expansion: basis tuples with coefficients.
pub type Sweedler = Vec<(Vec<usize>, C64)>;

const SWEEDLER_DROP: f64 = 1e-15;

impl FinHopfAlgebra {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        basis_labels: Vec<String>,
        mult: StructTensor,
        unit: Vec<C64>,
        comult: StructTensor,
        counit: Vec<C64>,
        antipode: DMatrix<C64>,
        star: DMatrix<C64>,
    ) -> Result<Self> {
        let d = basis_labels.len();
        let ok = mult.dims == [d, d, d]
            && comult.dims == [d, d, d]
            && unit.len() == d
            && counit.len() == d
            && antipode.shape() == (d, d)
            && star.shape() == (d, d);
        if !ok {
            return Err(Error::InvalidInput("inconsistent tensor shapes".into()));
        }
        let antipode_inv = antipode
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("antipode is not invertible".into()))?;
        Ok(FinHopfAlgebra {
            name: name.into(),
            basis_labels,
            mult,
            unit,
            comult,
            counit,
            antipode,
            star,
            antipode_inv,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn antipode_inv(&self) -> &DMatrix<C64> {
        &self.antipode_inv
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::ParentMismatch {
                algebra: self.name.clone(),
                expected: self.dim(),
                got: n,
            });
        }
        Ok(())
    }

    fn check_parent(&self, x: &AlgebraElement) -> Result<()> {
        self.check_len(x.coeffs.len())?;
        if x.parent != self.name {
            return Err(Error::ParentMismatch {
                algebra: self.name.clone(),
                expected: self.dim(),
                got: x.coeffs.len(),
            });
        }
        Ok(())
    }

    pub fn element(&self, coeffs: Vec<C64>) -> Result<AlgebraElement> {
        AlgebraElement::new(self, coeffs)
    }

    pub fn basis(&self, i: usize) -> Vec<C64> {
        linalg::basis_vec(self.dim(), i)
    }

    pub fn one(&self) -> Vec<C64> {
        self.unit.clone()
    }

    /// Index of a basis label.
    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.basis_labels.iter().position(|l| l == label)
    }

    pub fn mul(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let d = self.dim();
        let mut out = vec![ZERO; d];
        for (i, xi) in x.iter().enumerate() {
            if *xi == ZERO {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if *yj == ZERO {
                    continue;
                }
                let s = xi * yj;
                for &(k, v) in self.mult.row(i, j) {
                    out[k] += s * v;
                }
            }
        }
        out
    }

    /// Checked product of tagged elements.
    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_parent(x)?;
        self.check_parent(y)?;
        self.element(self.mul(&x.coeffs, &y.coeffs))
    }

    pub fn mul3(&self, x: &[C64], y: &[C64], z: &[C64]) -> Vec<C64> {
        self.mul(&self.mul(x, y), z)
    }

    /// Matrix of `y ↦ x·y`.
    pub fn left_matrix(&self, x: &[C64]) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (i, xi) in x.iter().enumerate() {
            if *xi == ZERO {
                continue;
            }
            for j in 0..d {
                for &(k, v) in self.mult.row(i, j) {
                    m[(k, j)] += xi * v;
                }
            }
        }
        m
    }

    /// Matrix of `y ↦ y·x`.
    pub fn right_matrix(&self, x: &[C64]) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (j, xj) in x.iter().enumerate() {
            if *xj == ZERO {
                continue;
            }
            for i in 0..d {
                for &(k, v) in self.mult.row(i, j) {
                    m[(k, i)] += xj * v;
                }
            }
        }
        m
    }

    /// Δ(x) as a row-major d² vector over `e_j ⊗ e_k`.
    pub fn comul(&self, x: &[C64]) -> Vec<C64> {
        let d = self.dim();
        let mut out = vec![ZERO; d * d];
        for (i, xi) in x.iter().enumerate() {
            if *xi == ZERO {
                continue;
            }
            for j in 0..d {
                for &(k, v) in self.comult.row(i, j) {
                    out[j * d + k] += xi * v;
                }
            }
        }
        out
    }

    pub fn comultiply(&self, x: &AlgebraElement) -> Result<Vec<C64>> {
        self.check_parent(x)?;
        Ok(self.comul(&x.coeffs))
    }

    /// Iterated coproduct Δ⁽ⁿ⁻¹⁾(x) with `n` tensor legs, built left-nested
    /// (the first leg is split repeatedly).
    pub fn sweedler(&self, x: &[C64], n: usize) -> Sweedler {
        assert!(n >= 1);
        let mut cur: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
        for (i, xi) in x.iter().enumerate() {
            if xi.norm() > SWEEDLER_DROP {
                cur.insert(vec![i], *xi);
            }
        }
        for _ in 1..n {
            let mut next: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
            for (idx, w) in &cur {
                let first = idx[0];
                for j in 0..self.dim() {
                    for &(k, v) in self.comult.row(first, j) {
                        let mut t = Vec::with_capacity(idx.len() + 1);
                        t.push(j);
                        t.push(k);
                        t.extend_from_slice(&idx[1..]);
                        *next.entry(t).or_insert(ZERO) += w * v;
                    }
                }
            }
            next.retain(|_, v| v.norm() > SWEEDLER_DROP);
            cur = next;
        }
        cur.into_iter().collect()
    }

    /// Same expansion as [`sweedler`](Self::sweedler) but splitting the last leg each time.
    pub fn sweedler_right_nested(&self, x: &[C64], n: usize) -> Sweedler {
        let mut cur: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
        for (i, xi) in x.iter().enumerate() {
            if xi.norm() > SWEEDLER_DROP {
                cur.insert(vec![i], *xi);
            }
        }
        for _ in 1..n {
            let mut next: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
            for (idx, w) in &cur {
                let last = *idx.last().unwrap();
                for j in 0..self.dim() {
                    for &(k, v) in self.comult.row(last, j) {
                        let mut t = idx[..idx.len() - 1].to_vec();
                        t.push(j);
                        t.push(k);
                        *next.entry(t).or_insert(ZERO) += w * v;
                    }
                }
            }
            next.retain(|_, v| v.norm() > SWEEDLER_DROP);
            cur = next;
        }
        cur.into_iter().collect()
    }

    pub fn counit_of(&self, x: &[C64]) -> C64 {
        x.iter().zip(&self.counit).map(|(a, b)| a * b).sum()
    }

    pub fn s(&self, x: &[C64]) -> Vec<C64> {
        linalg::mat_vec(&self.antipode, x)
    }

    pub fn s_inv(&self, x: &[C64]) -> Vec<C64> {
        linalg::mat_vec(&self.antipode_inv, x)
    }

    pub fn star_of(&self, x: &[C64]) -> Vec<C64> {
        let conj: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        linalg::mat_vec(&self.star, &conj)
    }

    pub fn antipode_elem(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_parent(x)?;
        self.element(self.s(&x.coeffs))
    }

    pub fn counit_elem(&self, x: &AlgebraElement) -> Result<C64> {
        self.check_parent(x)?;
        Ok(self.counit_of(&x.coeffs))
    }

    pub fn star_elem(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_parent(x)?;
        self.element(self.star_of(&x.coeffs))
    }

    pub fn is_commutative(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| max_diff(&self.mul(&self.basis(i), &self.basis(j)), &self.mul(&self.basis(j), &self.basis(i))) <= tol)
        })
    }

    pub fn is_cocommutative(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            let c = self.comul(&self.basis(i));
            (0..d).all(|j| (0..d).all(|k| (c[j * d + k] - c[k * d + j]).norm() <= tol))
        })
    }

    /// Central elements: `x` with `x·e_i = e_i·x` for all `i`, as columns.
    pub fn center_basis(&self, tol: f64) -> DMatrix<C64> {
        let d = self.dim();
        let mut sys = DMatrix::zeros(d * d, d);
        for i in 0..d {
            let e = self.basis(i);
            let diff = self.right_matrix(&e) - self.left_matrix(&e);
            sys.view_mut((i * d, 0), (d, d)).copy_from(&diff);
        }
        linalg::nullspace(&sys, tol)
    }
}

/// Evaluates a functional given in the dual basis on an element: `φ(x) = Σ φᵢ xᵢ`.
pub fn pair(phi: &[C64], x: &[C64]) -> C64 {
    phi.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// The functional `t ↦ φ(a·t·b)`, in the dual basis.
pub fn sandwich(h: &FinHopfAlgebra, phi: &[C64], a: &[C64], b: &[C64]) -> Vec<C64> {
    (0..h.dim())
        .map(|t| pair(phi, &h.mul3(a, &h.basis(t), b)))
        .collect()
}

/// A bilinear pairing between two Hopf algebras given by its matrix on basis pairs.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub matrix: DMatrix<C64>,
}

impl Pairing {
    /// The evaluation pairing ⟨φ, x⟩ = φ(x) between dual(H) and H.
    pub fn canonical(h: &FinHopfAlgebra) -> Self {
        Pairing {
            matrix: DMatrix::identity(h.dim(), h.dim()),
        }
    }

    pub fn eval(&self, x: &[C64], y: &[C64]) -> C64 {
        let mut s = ZERO;
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                s += xi * self.matrix[(i, j)] * yj;
            }
        }
        s
    }

    /// Largest violation of the Hopf pairing axioms between `left` and `right`.
    pub fn residual(&self, left: &FinHopfAlgebra, right: &FinHopfAlgebra) -> f64 {
        let (m, n) = (left.dim(), right.dim());
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let prod = left.mul(&left.basis(i), &left.basis(j));
                for a in 0..n {
                    let lhs = self.eval(&prod, &right.basis(a));
                    let da = right.comul(&right.basis(a));
                    let mut rhs = ZERO;
                    for p in 0..n {
                        for q in 0..n {
                            let w = da[p * n + q];
                            if w != ZERO {
                                rhs += w * self.matrix[(i, p)] * self.matrix[(j, q)];
                            }
                        }
                    }
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let prod = right.mul(&right.basis(a), &right.basis(b));
                for i in 0..m {
                    let lhs = self.eval(&left.basis(i), &prod);
                    let di = left.comul(&left.basis(i));
                    let mut rhs = ZERO;
                    for p in 0..m {
                        for q in 0..m {
                            let w = di[p * m + q];
                            if w != ZERO {
                                rhs += w * self.matrix[(p, a)] * self.matrix[(q, b)];
                            }
                        }
                    }
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        for a in 0..n {
            let lhs = self.eval(&left.unit, &right.basis(a));
            worst = worst.max((lhs - right.counit[a]).norm());
        }
        for i in 0..m {
            let lhs = self.eval(&left.basis(i), &right.unit);
            worst = worst.max((lhs - left.counit[i]).norm());
        }
        worst
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            threshold,
            pass: residual <= threshold,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub algebra: String,
    pub tol: f64,
    pub checks: Vec<Check>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.residual)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

fn sparse_mul_into(h: &FinHopfAlgebra, x: &[(usize, C64)], y: &[(usize, C64)], out: &mut [C64]) {
    for &(i, a) in x {
        for &(j, b) in y {
            for &(k, v) in h.mult.row(i, j) {
                out[k] += a * b * v;
            }
        }
    }
}

fn nz(v: &[C64]) -> Vec<(usize, C64)> {
    v.iter().enumerate().filter(|(_, z)| **z != ZERO).map(|(i, z)| (i, *z)).collect()
}

/// Checks every defining identity of a C* Hopf algebra and reports per-axiom max residuals.
pub fn verify_hopf_axioms(a: &FinHopfAlgebra, tol: f64) -> Result<AxiomReport> {
    let bad = a.mult.has_non_finite()
        || a.comult.has_non_finite()
        || a.unit.iter().chain(&a.counit).any(|z| !z.re.is_finite() || !z.im.is_finite())
        || a.antipode.iter().chain(a.star.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite());
    if bad {
        return Err(Error::InvalidInput(format!("non-finite entries in `{}`", a.name)));
    }
    let d = a.dim();
    let mut checks = Vec::new();
    let basis_nz: Vec<Vec<(usize, C64)>> = (0..d).map(|i| vec![(i, ONE)]).collect();

    // associativity
    let mut assoc: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let ij: Vec<(usize, C64)> = a.mult.row(i, j).to_vec();
            for k in 0..d {
                let mut lhs = vec![ZERO; d];
                sparse_mul_into(a, &ij, &basis_nz[k], &mut lhs);
                let jk: Vec<(usize, C64)> = a.mult.row(j, k).to_vec();
                let mut rhs = vec![ZERO; d];
                sparse_mul_into(a, &basis_nz[i], &jk, &mut rhs);
                assoc = assoc.max(max_diff(&lhs, &rhs));
            }
        }
    }
    checks.push(Check::new("associativity", assoc, tol));

    let one = nz(&a.unit);
    let mut unit_res: f64 = 0.0;
    for i in 0..d {
        let mut l = vec![ZERO; d];
        sparse_mul_into(a, &one, &basis_nz[i], &mut l);
        let mut r = vec![ZERO; d];
        sparse_mul_into(a, &basis_nz[i], &one, &mut r);
        let e = a.basis(i);
        unit_res = unit_res.max(max_diff(&l, &e)).max(max_diff(&r, &e));
    }
    checks.push(Check::new("unit", unit_res, tol));

    // coassociativity: (Δ⊗id)Δ = (id⊗Δ)Δ
    let mut coassoc: f64 = 0.0;
    for i in 0..d {
        let e = a.basis(i);
        let l = a.sweedler(&e, 3);
        let r = a.sweedler_right_nested(&e, 3);
        coassoc = coassoc.max(sweedler_diff(&l, &r));
    }
    checks.push(Check::new("coassociativity", coassoc, tol));

    let mut counit_res: f64 = 0.0;
    for i in 0..d {
        let c = a.comul(&a.basis(i));
        let mut l = vec![ZERO; d];
        let mut r = vec![ZERO; d];
        for j in 0..d {
            for k in 0..d {
                l[k] += a.counit[j] * c[j * d + k];
                r[j] += c[j * d + k] * a.counit[k];
            }
        }
        let e = a.basis(i);
        counit_res = counit_res.max(max_diff(&l, &e)).max(max_diff(&r, &e));
    }
    checks.push(Check::new("counit", counit_res, tol));

    // bialgebra compatibility
    let coprods: Vec<Vec<C64>> = (0..d).map(|i| a.comul(&a.basis(i))).collect();
    let mut bialg: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let prod = a.mul(&a.basis(i), &a.basis(j));
            let lhs = a.comul(&prod);
            let rhs = tensor_square_mul(a, &coprods[i], &coprods[j]);
            bialg = bialg.max(max_diff(&lhs, &rhs));
            let ce = a.counit_of(&prod) - a.counit[i] * a.counit[j];
            bialg = bialg.max(ce.norm());
        }
    }
    let d1 = a.comul(&a.unit);
    let mut oo = vec![ZERO; d * d];
    for j in 0..d {
        for k in 0..d {
            oo[j * d + k] = a.unit[j] * a.unit[k];
        }
    }
    bialg = bialg.max(max_diff(&d1, &oo)).max((a.counit_of(&a.unit) - ONE).norm());
    checks.push(Check::new("bialgebra", bialg, tol));

    // antipode law
    let mut anti: f64 = 0.0;
    for i in 0..d {
        let c = &coprods[i];
        let mut l = vec![ZERO; d];
        let mut r = vec![ZERO; d];
        for j in 0..d {
            for k in 0..d {
                let w = c[j * d + k];
                if w == ZERO {
                    continue;
                }
                linalg::axpy(w, &a.mul(&a.s(&a.basis(j)), &a.basis(k)), &mut l);
                linalg::axpy(w, &a.mul(&a.basis(j), &a.s(&a.basis(k))), &mut r);
            }
        }
        let target: Vec<C64> = a.unit.iter().map(|u| u * a.counit[i]).collect();
        anti = anti.max(max_diff(&l, &target)).max(max_diff(&r, &target));
    }
    checks.push(Check::new("antipode", anti, tol));

    let s2 = &a.antipode * &a.antipode - DMatrix::identity(d, d);
    checks.push(Check::new("antipode_involutive", linalg::mat_max_abs(&s2), tol));

    // star: antilinear involution, anti-multiplicative, Δ a *-homomorphism
    let invol = &a.star * a.star.map(|z| z.conj()) - DMatrix::identity(d, d);
    let mut star_res = linalg::mat_max_abs(&invol);
    star_res = star_res.max(max_diff(&a.star_of(&a.unit), &a.unit));
    for i in 0..d {
        for j in 0..d {
            let lhs = a.star_of(&a.mul(&a.basis(i), &a.basis(j)));
            let rhs = a.mul(&a.star_of(&a.basis(j)), &a.star_of(&a.basis(i)));
            star_res = star_res.max(max_diff(&lhs, &rhs));
        }
    }
    checks.push(Check::new("star_algebra", star_res, tol));

    let mut star_co: f64 = 0.0;
    for i in 0..d {
        let lhs = a.comul(&a.star_of(&a.basis(i)));
        let rhs = tensor_square_star(a, &coprods[i]);
        star_co = star_co.max(max_diff(&lhs, &rhs));
    }
    checks.push(Check::new("star_coproduct", star_co, tol));

    Ok(AxiomReport {
        algebra: a.name.clone(),
        tol,
        checks,
    })
}

fn sweedler_diff(a: &Sweedler, b: &Sweedler) -> f64 {
    let mut m: BTreeMap<&Vec<usize>, C64> = BTreeMap::new();
    for (k, v) in a {
        *m.entry(k).or_insert(ZERO) += v;
    }
    for (k, v) in b {
        *m.entry(k).or_insert(ZERO) -= v;
    }
    m.values().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Product in A⊗A of two row-major d² vectors.
pub fn tensor_square_mul(a: &FinHopfAlgebra, x: &[C64], y: &[C64]) -> Vec<C64> {
    let d = a.dim();
    let mut out = vec![ZERO; d * d];
    let xs = nz(x);
    let ys = nz(y);
    for &(p, xv) in &xs {
        let (i1, i2) = (p / d, p % d);
        for &(q, yv) in &ys {
            let (j1, j2) = (q / d, q % d);
            for &(k1, v1) in a.mult.row(i1, j1) {
                for &(k2, v2) in a.mult.row(i2, j2) {
                    out[k1 * d + k2] += xv * yv * v1 * v2;
                }
            }
        }
    }
    out
}

fn tensor_square_star(a: &FinHopfAlgebra, x: &[C64]) -> Vec<C64> {
    let d = a.dim();
    let stars: Vec<Vec<C64>> = (0..d).map(|i| a.star_of(&a.basis(i))).collect();
    let mut out = vec![ZERO; d * d];
    for (p, xv) in nz(x) {
        let (i1, i2) = (p / d, p % d);
        for k1 in 0..d {
            for k2 in 0..d {
                out[k1 * d + k2] += xv.conj() * stars[i1][k1] * stars[i2][k2];
            }
        }
    }
    out
}

/// The unique normalized two-sided integral, found by solving
/// `x·h = ε(x)h = h·x` for all basis `x` together with `ε(h) = 1`.
pub fn haar_integral(a: &FinHopfAlgebra) -> Result<Vec<C64>> {
    let d = a.dim();
    let mut sys = DMatrix::zeros(2 * d * d + 1, d);
    for i in 0..d {
        let e = a.basis(i);
        let l = a.left_matrix(&e) - DMatrix::identity(d, d) * a.counit[i];
        let r = a.right_matrix(&e) - DMatrix::identity(d, d) * a.counit[i];
        sys.view_mut((2 * i * d, 0), (d, d)).copy_from(&l);
        sys.view_mut((2 * i * d + d, 0), (d, d)).copy_from(&r);
    }
    let hom = sys.rows(0, 2 * d * d).clone_owned();
    let ns = linalg::nullspace(&hom, 1e-10);
    if ns.ncols() != 1 {
        return Err(Error::NotSemisimple(format!(
            "integral space of `{}` has dimension {}",
            a.name,
            ns.ncols()
        )));
    }
    for j in 0..d {
        sys[(2 * d * d, j)] = a.counit[j];
    }
    let mut rhs = vec![ZERO; 2 * d * d + 1];
    rhs[2 * d * d] = ONE;
    let (h, res) = linalg::lstsq(&sys, &rhs);
    if res > 1e-9 {
        return Err(Error::NotSemisimple(format!(
            "integral of `{}` is not normalizable (residual {res:e})",
            a.name
        )));
    }
    Ok(h)
}

/// Residuals of the standard Haar-integral properties.
pub fn haar_properties(a: &FinHopfAlgebra, h: &[C64], tol: f64) -> Vec<Check> {
    let d = a.dim();
    let sq = max_diff(&a.mul(h, h), h);
    let s = max_diff(&a.s(h), h);
    let st = max_diff(&a.star_of(h), h);
    let mut central: f64 = 0.0;
    for i in 0..d {
        let e = a.basis(i);
        central = central.max(max_diff(&a.mul(&e, h), &a.mul(h, &e)));
    }
    let c = a.comul(h);
    let mut cocomm: f64 = 0.0;
    for j in 0..d {
        for k in 0..d {
            cocomm = cocomm.max((c[j * d + k] - c[k * d + j]).norm());
        }
    }
    let mut inv: f64 = 0.0;
    for i in 0..d {
        let e = a.basis(i);
        let target: Vec<C64> = h.iter().map(|z| z * a.counit[i]).collect();
        inv = inv.max(max_diff(&a.mul(&e, h), &target));
    }
    vec![
        Check::new("haar_invariance", inv, tol),
        Check::new("haar_idempotent", sq, tol),
        Check::new("haar_antipode", s, tol),
        Check::new("haar_selfadjoint", st, tol),
        Check::new("haar_central", central, tol),
        Check::new("haar_cocommutative", cocomm, tol),
    ]
}

/// Gram matrix `G[i,j] = φ_Ĥ(eᵢ* eⱼ)` of the Haar inner product, where φ_Ĥ is the Haar
/// integral of the dual. Fails if the star does not give a positive form.
pub fn gram_matrix(a: &FinHopfAlgebra) -> Result<DMatrix<C64>> {
    let phi = haar_integral(&dual(a))?;
    gram_with(a, &phi)
}

pub fn gram_with(a: &FinHopfAlgebra, phi: &[C64]) -> Result<DMatrix<C64>> {
    let d = a.dim();
    let stars: Vec<Vec<C64>> = (0..d).map(|i| a.star_of(&a.basis(i))).collect();
    let mut g = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            g[(i, j)] = pair(phi, &a.mul(&stars[i], &a.basis(j)));
        }
    }
    let herm = linalg::mat_max_abs(&(&g - g.adjoint()));
    if herm > 1e-9 {
        return Err(Error::InvalidStar(-herm));
    }
    let (vals, _) = linalg::herm_eigen(&((&g + g.adjoint()) * linalg::r(0.5)));
    let min = vals.first().cloned().unwrap_or(0.0);
    if min <= 1e-12 {
        return Err(Error::InvalidStar(min));
    }
    Ok(g)
}

/// ⟨x, y⟩ = φ_Ĥ(x* y).
pub fn inner_product(a: &FinHopfAlgebra, x: &[C64], y: &[C64]) -> Result<C64> {
    let phi = haar_integral(&dual(a))?;
    Ok(pair(&phi, &a.mul(&a.star_of(x), y)))
}

#[cfg(test)]
mod tests;
