//! Triangle and ribbon operators, bulk-to-boundary ribbons over H⫽K ⊗ K̂, condensation
//! generators and excitation reports.
//!
//! Ribbon labels are stored as flat coefficient arrays `x[a·m + j]` of `e_a ⊗ k̂_j`, where
//! `e_a` runs over the basis of H and `k̂_j` over the dual of a basis `{k_j}` of K (K = H
//! for bulk ribbons). The recursion splits a ribbon with the coproduct
//! `Δ(h⊗φ) = Σ_k (h⁽¹⁾ ⊗ k̂) ⊗ (S(k⁽³⁾)h⁽²⁾k⁽¹⁾ ⊗ φ(k⁽²⁾•))`.

use crate::comodule::{quotient_h_mod_k, Quotient};
use crate::error::{Error, Result};
use crate::hopf::{self, Check, FinHopfAlgebra};
use crate::lattice::{Chirality, Ribbon, RibbonType, Site, Step, Triangle, TriangleKind};
use crate::linalg::{self, C64, ONE, ZERO};
use crate::operators::{
    boundary_face_operator, commutator_norm, defect_vertex_operator, edge_action, face_operator,
    hamiltonian_terms, sweedler_by_basis, vertex_operator, DefectKind, EdgeKind, LatticeOperator,
    Model, Term, TermKind,
};
use crate::zoo::HopfSubalgebra;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// A pure label h ⊗ φ. For boundary ribbons `h` represents its class in H⫽K and `phi`
/// holds the values of φ ∈ K̂ on the basis of K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RibbonLabel {
    #[serde(with = "linalg::cvec")]
    pub h: Vec<C64>,
    #[serde(with = "linalg::cvec")]
    pub phi: Vec<C64>,
}

impl RibbonLabel {
    pub fn new(h: Vec<C64>, phi: Vec<C64>) -> Self {
        RibbonLabel { h, phi }
    }

    /// Flat coefficients of h ⊗ φ.
    pub fn flat(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.h.len() * self.phi.len());
        for a in &self.h {
            for p in &self.phi {
                out.push(a * p);
            }
        }
        out
    }
}

/// Coalgebra data for the ribbon recursion.
#[derive(Clone, Debug)]
pub struct RibbonAlgebra {
    pub h: FinHopfAlgebra,
    /// k_j as elements of H.
    pub kbasis: Vec<Vec<C64>>,
    /// k̂_j extended to functionals on H (values on the basis of H).
    pub kdual: Vec<Vec<C64>>,
    /// The Haar integral of K for bulk-to-boundary ribbons: dual triangles act by L^{h h_K}.
    pub h_k: Option<Vec<C64>>,
    /// K as a Hopf algebra in its own basis (equal to H for bulk ribbons).
    pub k: FinHopfAlgebra,
    /// Δ of each basis label: (first label, second label, coefficient).
    coproduct: Vec<Vec<(usize, usize, C64)>>,
}

impl RibbonAlgebra {
    pub fn bulk(h: &FinHopfAlgebra) -> Self {
        let d = h.dim();
        let kbasis = (0..d).map(|i| h.basis(i)).collect();
        let kdual = (0..d).map(|i| h.basis(i)).collect();
        Self::build(h.clone(), h.clone(), kbasis, kdual, None)
    }

    /// Labels in H⫽K ⊗ K̂. The dual basis of K is extended to H by completing the basis of
    /// K with standard basis vectors of H.
    pub fn boundary(h: &FinHopfAlgebra, k: &HopfSubalgebra) -> Result<Self> {
        let d = h.dim();
        let m = k.algebra.dim();
        let mut cols: Vec<Vec<C64>> = (0..m).map(|j| k.include(&k.algebra.basis(j))).collect();
        for i in 0..d {
            if cols.len() == d {
                break;
            }
            let mut trial = cols.clone();
            trial.push(h.basis(i));
            let mat = DMatrix::from_fn(d, trial.len(), |r, c| trial[c][r]);
            if linalg::rank(&mat, 1e-10) == trial.len() {
                cols = trial;
            }
        }
        let full = DMatrix::from_fn(d, d, |r, c| cols[c][r]);
        let inv = full
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("basis completion of K failed".into()))?;
        let kdual = (0..m).map(|j| inv.row(j).iter().copied().collect()).collect();
        let kbasis = cols[..m].to_vec();
        let hk = hopf::haar_integral(&k.algebra)?;
        Ok(Self::build(h.clone(), k.algebra.clone(), kbasis, kdual, Some(k.include(&hk))))
    }

    fn build(
        h: FinHopfAlgebra,
        k: FinHopfAlgebra,
        kbasis: Vec<Vec<C64>>,
        kdual: Vec<Vec<C64>>,
        h_k: Option<Vec<C64>>,
    ) -> Self {
        let d = h.dim();
        let m = kbasis.len();
        let n = d * m;
        let k_legs: Vec<hopf::Sweedler> = kbasis.iter().map(|x| h.sweedler(x, 3)).collect();
        // φ-part: k̂_b(e_t k_j)
        let shift: Vec<Vec<Vec<C64>>> = (0..m)
            .map(|b| {
                (0..d)
                    .map(|t| {
                        (0..m)
                            .map(|j| hopf::pair(&kdual[b], &h.mul(&h.basis(t), &kbasis[j])))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut conj: HashMap<(usize, usize, usize), Vec<C64>> = HashMap::new();
        let mut coproduct = Vec::with_capacity(n);
        for a in 0..d {
            let a_legs = h.sweedler(&h.basis(a), 2);
            for b in 0..m {
                let mut acc = vec![ZERO; n * n];
                for (la, ca) in &a_legs {
                    for (kk, legs) in k_legs.iter().enumerate() {
                        let first = la[0] * m + kk;
                        for (lk, ck) in legs {
                            let hv = conj.entry((lk[2], la[1], lk[0])).or_insert_with(|| {
                                h.mul3(&h.s(&h.basis(lk[2])), &h.basis(la[1]), &h.basis(lk[0]))
                            });
                            let pv = &shift[b][lk[1]];
                            for (p, hp) in hv.iter().enumerate() {
                                if *hp == ZERO {
                                    continue;
                                }
                                for (q, vq) in pv.iter().enumerate() {
                                    if *vq != ZERO {
                                        acc[first * n + p * m + q] += ca * ck * hp * vq;
                                    }
                                }
                            }
                        }
                    }
                }
                coproduct.push(
                    acc.iter()
                        .enumerate()
                        .filter(|(_, z)| z.norm() > 1e-14)
                        .map(|(i, z)| (i / n, i % n, *z))
                        .collect(),
                );
            }
        }
        RibbonAlgebra {
            h,
            kbasis,
            kdual,
            h_k,
            k,
            coproduct,
        }
    }

    pub fn h_dim(&self) -> usize {
        self.h.dim()
    }

    pub fn k_dim(&self) -> usize {
        self.kbasis.len()
    }

    pub fn label_dim(&self) -> usize {
        self.h_dim() * self.k_dim()
    }

    /// Δ(x) grouped by the first factor's basis label.
    pub fn coproduct(&self, x: &[C64]) -> Vec<(usize, Vec<C64>)> {
        let n = self.label_dim();
        let mut rows: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
        for (ab, c) in x.iter().enumerate() {
            if c.norm() < 1e-300 {
                continue;
            }
            for &(f, s, v) in &self.coproduct[ab] {
                rows.entry(f).or_insert_with(|| vec![ZERO; n])[s] += c * v;
            }
        }
        rows.into_iter()
            .filter(|(_, y)| y.iter().any(|z| z.norm() > 1e-14))
            .collect()
    }

    /// Label seen by a direct triangle: Σ_{a,j} x_{aj} ε(e_a) k̂_j, as a functional on H.
    fn direct_label(&self, x: &[C64]) -> Vec<C64> {
        let (d, m) = (self.h_dim(), self.k_dim());
        let mut out = vec![ZERO; d];
        for j in 0..m {
            let w: C64 = (0..d).map(|a| x[a * m + j] * self.h.counit[a]).sum();
            if w != ZERO {
                linalg::axpy(w, &self.kdual[j], &mut out);
            }
        }
        out
    }

    /// Label seen by a dual triangle: Σ_{a,j} x_{aj} k̂_j(1) e_a, times h_K for boundaries.
    fn dual_label(&self, x: &[C64]) -> Vec<C64> {
        let (d, m) = (self.h_dim(), self.k_dim());
        let one = self.h.one();
        let units: Vec<C64> = self.kdual.iter().map(|f| hopf::pair(f, &one)).collect();
        let h: Vec<C64> = (0..d)
            .map(|a| (0..m).map(|j| x[a * m + j] * units[j]).sum())
            .collect();
        match &self.h_k {
            Some(hk) => self.h.mul(&h, hk),
            None => h,
        }
    }
}

/// Edge operator kind of a triangle: T₋/T₊ (direct right), T̃₊/T̃₋ (direct left), L₋/L₊
/// (dual right), L̃₊/L̃₋ (dual left), the first of each pair when the edge points along
/// the triangle.
pub fn triangle_kind(t: &Triangle) -> EdgeKind {
    match (t.kind, t.chirality, t.along) {
        (TriangleKind::Direct, Chirality::Right, true) => EdgeKind::TMinus,
        (TriangleKind::Direct, Chirality::Right, false) => EdgeKind::TPlus,
        (TriangleKind::Direct, Chirality::Left, true) => EdgeKind::TtPlus,
        (TriangleKind::Direct, Chirality::Left, false) => EdgeKind::TtMinus,
        (TriangleKind::Dual, Chirality::Right, true) => EdgeKind::LMinus,
        (TriangleKind::Dual, Chirality::Right, false) => EdgeKind::LPlus,
        (TriangleKind::Dual, Chirality::Left, true) => EdgeKind::LtPlus,
        (TriangleKind::Dual, Chirality::Left, false) => EdgeKind::LtMinus,
    }
}

fn check_edges(model: &Model, alg: &RibbonAlgebra, rho: &Ribbon) -> Result<()> {
    let mut tag = None;
    for t in &rho.triangles {
        if model.is_defect_edge(t.edge) {
            return Err(Error::UnsupportedConfiguration(format!(
                "ribbon crosses boundary/wall edge {}",
                t.edge
            )));
        }
        let e_tag = model.edge_tag(t.edge);
        if *tag.get_or_insert(e_tag) != e_tag {
            return Err(Error::UnsupportedConfiguration("ribbon spans two bulk regions".into()));
        }
        let r = model.edge_region(t.edge)?;
        if r.algebra.name != alg.h.name || r.dim() != alg.h_dim() {
            return Err(Error::ParentMismatch {
                algebra: r.algebra.name.clone(),
                expected: r.dim(),
                got: alg.h_dim(),
            });
        }
    }
    Ok(())
}

/// F^x(τ) for a general label x.
pub fn triangle_operator_general(model: &Model, alg: &RibbonAlgebra, t: &Triangle, x: &[C64]) -> Result<LatticeOperator> {
    if x.len() != alg.label_dim() {
        return Err(Error::ParentMismatch {
            algebra: format!("ribbon labels over {}", alg.h.name),
            expected: alg.label_dim(),
            got: x.len(),
        });
    }
    let kind = triangle_kind(t);
    let label = match t.kind {
        TriangleKind::Direct => alg.direct_label(x),
        TriangleKind::Dual => alg.dual_label(x),
    };
    edge_action(model, kind, &label, t.edge)
}

/// F^{h,φ}(τ) for a bulk triangle.
pub fn triangle_operator(model: &Model, t: &Triangle, label: &RibbonLabel) -> Result<LatticeOperator> {
    let alg = RibbonAlgebra::bulk(&model.edge_region(t.edge)?.algebra);
    check_label(&alg, label)?;
    triangle_operator_general(model, &alg, t, &label.flat())
}

fn check_label(alg: &RibbonAlgebra, label: &RibbonLabel) -> Result<()> {
    if label.h.len() != alg.h_dim() || label.phi.len() != alg.k_dim() {
        return Err(Error::ParentMismatch {
            algebra: alg.h.name.clone(),
            expected: alg.h_dim(),
            got: label.h.len(),
        });
    }
    Ok(())
}

struct Recursion<'a> {
    model: &'a Model,
    alg: &'a RibbonAlgebra,
    rho: &'a Ribbon,
    cache: HashMap<(usize, usize, usize), LatticeOperator>,
}

impl Recursion<'_> {
    fn support(&self, lo: usize, hi: usize) -> (Vec<usize>, Vec<usize>) {
        let s: Vec<usize> = self.rho.triangles[lo..hi].iter().map(|t| t.edge).collect();
        let d = self.model.support_dims(&s);
        (s, d)
    }

    fn op(&mut self, lo: usize, hi: usize, x: &[C64], split: Option<usize>) -> Result<LatticeOperator> {
        if hi - lo == 1 {
            return triangle_operator_general(self.model, self.alg, &self.rho.triangles[lo], x);
        }
        let mid = split.unwrap_or(lo + (hi - lo) / 2);
        let (s, d) = self.support(lo, hi);
        let mut terms = Vec::new();
        for (f, y) in self.alg.coproduct(x) {
            let left = self.basis_op(lo, mid, f)?;
            if left.nnz() == 0 {
                continue;
            }
            let right = self.op(mid, hi, &y, None)?;
            if right.nnz() == 0 {
                continue;
            }
            terms.push((ONE, left.tensor(&right)?));
        }
        if terms.is_empty() {
            return Ok(LatticeOperator::zero(s, d));
        }
        LatticeOperator::linear_combination(s, d, &terms)
    }

    fn basis_op(&mut self, lo: usize, hi: usize, f: usize) -> Result<LatticeOperator> {
        if let Some(op) = self.cache.get(&(lo, hi, f)) {
            return Ok(op.clone());
        }
        let x = linalg::basis_vec(self.alg.label_dim(), f);
        let op = self.op(lo, hi, &x, None)?;
        self.cache.insert((lo, hi, f), op.clone());
        Ok(op)
    }
}

/// F^x(ρ) for a general label, splitting first at `split` (midpoint when `None`) and at
/// midpoints below.
pub fn ribbon_operator_general(
    model: &Model,
    alg: &RibbonAlgebra,
    rho: &Ribbon,
    x: &[C64],
    split: Option<usize>,
) -> Result<LatticeOperator> {
    check_edges(model, alg, rho)?;
    if let Some(k) = split {
        if k == 0 || k >= rho.len() {
            return Err(Error::InvalidInput(format!(
                "split {k} outside 1..{} for a ribbon of length {}",
                rho.len(),
                rho.len()
            )));
        }
    }
    if x.len() != alg.label_dim() {
        return Err(Error::ParentMismatch {
            algebra: format!("ribbon labels over {}", alg.h.name),
            expected: alg.label_dim(),
            got: x.len(),
        });
    }
    let mut rec = Recursion {
        model,
        alg,
        rho,
        cache: HashMap::new(),
    };
    rec.op(0, rho.len(), x, split)
}

/// The bulk algebra under a ribbon.
pub fn bulk_algebra(model: &Model, rho: &Ribbon) -> Result<RibbonAlgebra> {
    let e = rho.triangles[0].edge;
    Ok(RibbonAlgebra::bulk(&model.edge_region(e)?.algebra))
}

/// F^{h,φ}(ρ) for a bulk ribbon of either type.
pub fn ribbon_operator(model: &Model, rho: &Ribbon, label: &RibbonLabel) -> Result<LatticeOperator> {
    ribbon_operator_split(model, rho, label, None)
}

pub fn ribbon_operator_split(model: &Model, rho: &Ribbon, label: &RibbonLabel, split: Option<usize>) -> Result<LatticeOperator> {
    let alg = bulk_algebra(model, rho)?;
    check_label(&alg, label)?;
    ribbon_operator_general(model, &alg, rho, &label.flat(), split)
}

/// Ribbon algebra for the Hopf-subalgebra boundary of `model`.
pub fn boundary_algebra(model: &Model) -> Result<RibbonAlgebra> {
    let d = model.defect()?;
    if d.kind != DefectKind::Boundary {
        return Err(Error::UnsupportedConfiguration("bulk-to-boundary ribbons need a boundary".into()));
    }
    let k = d.subalgebra.as_ref().ok_or_else(|| {
        Error::UnsupportedConfiguration(
            "bulk-to-boundary ribbons are only defined for Hopf-subalgebra boundaries".into(),
        )
    })?;
    RibbonAlgebra::boundary(&model.regions[d.right_region].algebra, k)
}

/// F^{[h],φ}(ρ↓) with h ∈ H representing [h] ∈ H⫽K and φ ∈ K̂ given on the basis of K.
pub fn boundary_ribbon_operator(model: &Model, rho: &Ribbon, label: &RibbonLabel) -> Result<LatticeOperator> {
    let alg = boundary_algebra(model)?;
    check_label(&alg, label)?;
    ribbon_operator_general(model, &alg, rho, &label.flat(), None)
}

/// H⫽K for the boundary of `model`.
pub fn boundary_quotient(model: &Model) -> Result<Quotient> {
    let alg = boundary_algebra(model)?;
    let d = model.defect()?;
    quotient_h_mod_k(&alg.h, d.subalgebra.as_ref().expect("checked above"))
}

/// [S(k⁽³⁾)h⁽²⁾k⁽¹⁾] ⊗ k⁽²⁾ for every basis element k of K, projected to H⫽K. Used to check
/// that the second coproduct factor only depends on the class of h.
pub fn conjugated_classes(alg: &RibbonAlgebra, q: &Quotient, h: &[C64]) -> Vec<Vec<C64>> {
    let mut out = Vec::new();
    for kb in &alg.kbasis {
        let mut acc = vec![ZERO; q.dim * alg.h_dim()];
        for (lh, ch) in alg.h.sweedler(h, 2) {
            for (lk, ck) in alg.h.sweedler(kb, 3) {
                let v = alg.h.mul3(
                    &alg.h.s(&alg.h.basis(lk[2])),
                    &alg.h.basis(lh[1]),
                    &alg.h.basis(lk[0]),
                );
                let p = q.project(&v);
                for (i, pi) in p.iter().enumerate() {
                    acc[i * alg.h_dim() + lk[1]] += ch * ck * pi * alg.h.counit[lh[0]];
                }
            }
        }
        out.push(acc);
    }
    out
}

// ---------------------------------------------------------------------------
// commutation relations

fn outer(h: &[C64], phi: &[C64], c: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(h.len() * phi.len());
    for a in h {
        for p in phi {
            out.push(c * a * p);
        }
    }
    out
}

fn add_into(acc: &mut Vec<C64>, x: &[C64]) {
    if acc.is_empty() {
        acc.resize(x.len(), ZERO);
    }
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b;
    }
}

/// Σ_t F^{x_t} ∘ S_t over the nonempty entries of `groups`.
fn sum_f_then(
    f: &mut dyn FnMut(&[C64]) -> Result<LatticeOperator>,
    groups: &BTreeMap<usize, Vec<C64>>,
    stab: &mut dyn FnMut(usize) -> Result<LatticeOperator>,
) -> Result<Option<LatticeOperator>> {
    let mut acc: Option<LatticeOperator> = None;
    for (t, x) in groups {
        if x.iter().all(|z| z.norm() < 1e-14) {
            continue;
        }
        let term = f(x)?.compose(&stab(*t)?)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc)
}

fn residual(lhs: &LatticeOperator, rhs: Option<LatticeOperator>) -> Result<f64> {
    match rhs {
        Some(r) => lhs.max_diff(&r),
        None => Ok(lhs.max_abs()),
    }
}

/// Vertex and face operators at an end site, for bulk or boundary sites.
pub struct SiteOps<'a> {
    model: &'a Model,
    site: Site,
}

impl<'a> SiteOps<'a> {
    pub fn new(model: &'a Model, site: Site) -> Self {
        SiteOps { model, site }
    }

    pub fn vertex(&self, g: &[C64]) -> Result<LatticeOperator> {
        vertex_operator(self.model, self.site, g)
    }

    pub fn face(&self, psi: &[C64]) -> Result<LatticeOperator> {
        let touches = self.model.lattice.faces[self.site.face]
            .iter()
            .any(|d| self.model.is_defect_edge(d.edge));
        if touches {
            boundary_face_operator(self.model, self.site, psi)
        } else {
            face_operator(self.model, self.site, psi)
        }
    }
}

/// Residuals of the end-site relations for a bulk ribbon with label (h, φ), vertex label
/// g ∈ H and face label ψ ∈ Ĥ. Closed ribbons get the closed-ribbon relations at their
/// single end instead.
pub fn end_commutation_check(
    model: &Model,
    rho: &Ribbon,
    label: &RibbonLabel,
    g: &[C64],
    psi: &[C64],
    tol: f64,
) -> Result<Vec<Check>> {
    let alg = bulk_algebra(model, rho)?;
    check_label(&alg, label)?;
    let h = &alg.h;
    let d = h.dim();
    if g.len() != d || psi.len() != d {
        return Err(Error::ParentMismatch {
            algebra: h.name.clone(),
            expected: d,
            got: g.len().min(psi.len()),
        });
    }
    let x = label.flat();
    let one = h.one();
    let f_op = ribbon_operator_general(model, &alg, rho, &x, None)?;
    let mut f = |y: &[C64]| ribbon_operator_general(model, &alg, rho, y, None);
    let type_a = rho.kind == RibbonType::A;
    let mut out = Vec::new();
    let s0 = SiteOps::new(model, rho.start());
    let s1 = SiteOps::new(model, rho.end());
    let sp = |x: &[C64]| h.s(x);
    let e = |i: usize| h.basis(i);

    if rho.closed {
        // vertex relation
        let lhs = s0.vertex(g)?.compose(&f_op)?;
        let mut groups: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
        for (l, c) in sweedler_by_basis(h, g, 5) {
            let (hh, ph, t) = if type_a {
                (
                    h.mul3(&e(l[0]), &label.h, &sp(&e(l[2]))),
                    hopf::sandwich(h, &label.phi, &sp(&e(l[1])), &e(l[4])),
                    l[3],
                )
            } else {
                (
                    h.mul3(&e(l[2]), &label.h, &sp(&e(l[4]))),
                    hopf::sandwich(h, &label.phi, &sp(&e(l[3])), &e(l[0])),
                    l[1],
                )
            };
            add_into(groups.entry(t).or_default(), &outer(&hh, &ph, c));
        }
        let rhs = sum_f_then(&mut f, &groups, &mut |t| s0.vertex(&e(t)))?;
        out.push(Check::new("closed_vertex", residual(&lhs, rhs)?, tol));
        // face relation: the start-face and end-face shifts meet at the same face, so
        // Σ ψ(k⁽²⁾) F^{g⁽²⁾,k̂} B^{φ(S(g⁽¹⁾)•S(k⁽³⁾)g⁽³⁾k⁽¹⁾)} (type B), mirrored for type A
        let lhs = s0.face(psi)?.compose(&f_op)?;
        let mut face_labels: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
        for (lg, cg) in sweedler_by_basis(h, &label.h, 3) {
            for kk in 0..d {
                for (lk, ck) in h.sweedler(&e(kk), 3) {
                    let w = cg * ck * label.phi[lk[1]];
                    if w == ZERO {
                        continue;
                    }
                    let mid = h.mul3(&sp(&e(lk[2])), &e(lg[2]), &e(lk[0]));
                    let np = if type_a {
                        hopf::sandwich(h, psi, &mid, &sp(&e(lg[0])))
                    } else {
                        hopf::sandwich(h, psi, &sp(&e(lg[0])), &mid)
                    };
                    let slot = face_labels.entry(lg[1] * d + kk).or_insert_with(|| vec![ZERO; d]);
                    linalg::axpy(w, &np, slot);
                }
            }
        }
        let mut rhs: Option<LatticeOperator> = None;
        for (fl, np) in &face_labels {
            if np.iter().all(|z| z.norm() < 1e-14) {
                continue;
            }
            let term = f(&linalg::basis_vec(d * d, *fl))?.compose(&s0.face(np)?)?;
            rhs = Some(match rhs {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        out.push(Check::new("closed_face", residual(&lhs, rhs)?, tol));
        return Ok(out);
    }

    // start vertex
    let lhs = s0.vertex(g)?.compose(&f_op)?;
    let mut groups: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    for (l, c) in sweedler_by_basis(h, g, 4) {
        let (hh, ph, t) = if type_a {
            (
                h.mul3(&e(l[0]), &label.h, &sp(&e(l[2]))),
                hopf::sandwich(h, &label.phi, &sp(&e(l[1])), &one),
                l[3],
            )
        } else {
            (
                h.mul3(&e(l[1]), &label.h, &sp(&e(l[3]))),
                hopf::sandwich(h, &label.phi, &sp(&e(l[2])), &one),
                l[0],
            )
        };
        add_into(groups.entry(t).or_default(), &outer(&hh, &ph, c));
    }
    let rhs = sum_f_then(&mut f, &groups, &mut |t| s0.vertex(&e(t)))?;
    out.push(Check::new("start_vertex", residual(&lhs, rhs)?, tol));

    // start face: group by the face label through the first leg of h
    let lhs = s0.face(psi)?.compose(&f_op)?;
    let mut groups: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    for (l, c) in sweedler_by_basis(h, &label.h, 2) {
        add_into(groups.entry(l[0]).or_default(), &outer(&e(l[1]), &label.phi, c));
    }
    let face_label = |t: usize| {
        if type_a {
            hopf::sandwich(h, psi, &one, &sp(&e(t)))
        } else {
            hopf::sandwich(h, psi, &sp(&e(t)), &one)
        }
    };
    let rhs = sum_f_then(&mut f, &groups, &mut |t| s0.face(&face_label(t)))?;
    out.push(Check::new("start_face", residual(&lhs, rhs)?, tol));

    // end vertex
    let lhs = s1.vertex(g)?.compose(&f_op)?;
    let mut groups: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    for (l, c) in sweedler_by_basis(h, g, 2) {
        let (pair_leg, t) = if type_a { (l[1], l[0]) } else { (l[0], l[1]) };
        let ph = hopf::sandwich(h, &label.phi, &one, &e(pair_leg));
        add_into(groups.entry(t).or_default(), &outer(&label.h, &ph, c));
    }
    let rhs = sum_f_then(&mut f, &groups, &mut |t| s1.vertex(&e(t)))?;
    out.push(Check::new("end_vertex", residual(&lhs, rhs)?, tol));

    // end face: Σ φ(k⁽²⁾) F^{h⁽¹⁾,k̂} B^{ψ(S(k⁽³⁾)h⁽²⁾k⁽¹⁾•)} (type A) or ψ(•S(k⁽³⁾)h⁽²⁾k⁽¹⁾)
    let lhs = s1.face(psi)?.compose(&f_op)?;
    let mut face_labels: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    for (lh, ch) in sweedler_by_basis(h, &label.h, 2) {
        for kk in 0..d {
            for (lk, ck) in h.sweedler(&e(kk), 3) {
                let w = ch * ck * label.phi[lk[1]];
                if w == ZERO {
                    continue;
                }
                let mid = h.mul3(&sp(&e(lk[2])), &e(lh[1]), &e(lk[0]));
                let np = if type_a {
                    hopf::sandwich(h, psi, &mid, &one)
                } else {
                    hopf::sandwich(h, psi, &one, &mid)
                };
                let slot = face_labels.entry(lh[0] * d + kk).or_insert_with(|| vec![ZERO; d]);
                linalg::axpy(w, &np, slot);
            }
        }
    }
    let mut rhs: Option<LatticeOperator> = None;
    for (fl, np) in &face_labels {
        if np.iter().all(|z| z.norm() < 1e-14) {
            continue;
        }
        let term = f(&linalg::basis_vec(d * d, *fl))?.compose(&s1.face(np)?)?;
        rhs = Some(match rhs {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    out.push(Check::new("end_face", residual(&lhs, rhs)?, tol));
    Ok(out)
}

/// A^k(s_b) for k ∈ K (coordinates in K): the boundary vertex operator with label
/// Σ k⁽¹⁾ ⊗ S(k⁽²⁾) ∈ K ⊗ K.
pub fn boundary_vertex_k(model: &Model, s: Site, k: &[C64]) -> Result<LatticeOperator> {
    let def = model.defect()?;
    let kk = &def
        .subalgebra
        .as_ref()
        .ok_or_else(|| Error::UnsupportedConfiguration("boundary is not a Hopf subalgebra".into()))?
        .algebra;
    let n = kk.dim();
    if def.dim() != n {
        return Err(Error::ModelInconsistency("boundary algebra is not K".into()));
    }
    let mut ab = vec![ZERO; n * n];
    for (l, c) in kk.sweedler(k, 2) {
        let s2 = kk.s(&kk.basis(l[1]));
        for (j, v) in s2.iter().enumerate() {
            ab[l[0] * n + j] += c * v;
        }
    }
    defect_vertex_operator(model, s, &ab)
}

/// Residuals of the boundary-end relations for F^{[h],φ}(ρ↓) at s_b = ∂₁ρ↓, with k ∈ K (in
/// K coordinates) and ψ a functional on H vanishing on HK⁺.
pub fn boundary_commutation_check(
    model: &Model,
    rho: &Ribbon,
    label: &RibbonLabel,
    k: &[C64],
    psi: &[C64],
    tol: f64,
) -> Result<Vec<Check>> {
    let alg = boundary_algebra(model)?;
    check_label(&alg, label)?;
    let h = &alg.h;
    let kk = &alg.k;
    let (d, m) = (alg.h_dim(), alg.k_dim());
    let sb = rho.end();
    let type_a = rho.kind == RibbonType::A;
    let f_op = ribbon_operator_general(model, &alg, rho, &label.flat(), None)?;
    let mut f = |y: &[C64]| ribbon_operator_general(model, &alg, rho, y, None);
    let site = SiteOps::new(model, sb);
    let kone = kk.one();
    let incl = |x: &[C64]| linalg::mat_vec(&model.defect().unwrap().subalgebra.as_ref().unwrap().inclusion, x);
    let mut out = Vec::new();

    // vertex: Σ F^{[h],φ(•k⁽²⁾)} A^{k⁽¹⁾} (type A) or Σ F^{[h],φ(•k⁽¹⁾)} A^{k⁽²⁾} (type B)
    let lhs = boundary_vertex_k(model, sb, k)?.compose(&f_op)?;
    let mut groups: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    for (l, c) in kk.sweedler(k, 2) {
        let (pair_leg, t) = if type_a { (l[1], l[0]) } else { (l[0], l[1]) };
        let ph = hopf::sandwich(kk, &label.phi, &kone, &kk.basis(pair_leg));
        add_into(groups.entry(t).or_default(), &outer(&label.h, &ph, c));
    }
    let rhs = sum_f_then(&mut f, &groups, &mut |t| boundary_vertex_k(model, sb, &kk.basis(t)))?;
    out.push(Check::new("boundary_vertex", residual(&lhs, rhs)?, tol));

    // face: Σ φ(ℓ⁽²⁾) F^{[h⁽¹⁾],ℓ̂} B^{ψ(S(ℓ⁽³⁾)h⁽²⁾ℓ⁽¹⁾•)} (type A) or ψ(•S(ℓ⁽³⁾)h⁽²⁾ℓ⁽¹⁾)
    let lhs = site.face(psi)?.compose(&f_op)?;
    let one = h.one();
    let mut face_labels: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    for (lh, ch) in sweedler_by_basis(h, &label.h, 2) {
        for ell in 0..m {
            for (lk, ck) in kk.sweedler(&kk.basis(ell), 3) {
                let w = ch * ck * label.phi[lk[1]];
                if w == ZERO {
                    continue;
                }
                let mid = h.mul3(
                    &incl(&kk.s(&kk.basis(lk[2]))),
                    &h.basis(lh[1]),
                    &incl(&kk.basis(lk[0])),
                );
                let np = if type_a {
                    hopf::sandwich(h, psi, &mid, &one)
                } else {
                    hopf::sandwich(h, psi, &one, &mid)
                };
                let slot = face_labels.entry(lh[0] * m + ell).or_insert_with(|| vec![ZERO; d]);
                linalg::axpy(w, &np, slot);
            }
        }
    }
    let mut rhs: Option<LatticeOperator> = None;
    for (fl, np) in &face_labels {
        if np.iter().all(|z| z.norm() < 1e-14) {
            continue;
        }
        let term = f(&linalg::basis_vec(d * m, *fl))?.compose(&site.face(np)?)?;
        rhs = Some(match rhs {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    out.push(Check::new("boundary_face", residual(&lhs, rhs)?, tol));
    Ok(out)
}

/// Largest commutator of F with the Hamiltonian terms away from the ribbon's end sites.
pub fn interior_commutation(model: &Model, rho: &Ribbon, f: &LatticeOperator) -> Result<f64> {
    let ends = [rho.start(), rho.end()];
    let mut worst: f64 = 0.0;
    for t in hamiltonian_terms(model)? {
        if at_end(&t, &ends) {
            continue;
        }
        worst = worst.max(commutator_norm(&t.op, f)?);
    }
    Ok(worst)
}

fn at_end(t: &Term, ends: &[Site]) -> bool {
    match t.kind {
        TermKind::Vertex | TermKind::BoundaryVertex | TermKind::WallVertex => {
            ends.iter().any(|s| s.vertex == t.site.vertex)
        }
        TermKind::Face | TermKind::BoundaryFace | TermKind::WallFace => {
            ends.iter().any(|s| s.face == t.site.face)
        }
    }
}

// ---------------------------------------------------------------------------
// condensation

/// A ribbon operator with its flat label over H ⊗ K̂.
#[derive(Clone, Debug)]
pub struct Generator {
    pub label: Vec<C64>,
    pub op: LatticeOperator,
}

/// The family F^{[k],φ(•h_K)}(ρ↓) for k and φ running over the bases of K and K̂.
pub fn condensation_family(model: &Model, rho: &Ribbon) -> Result<Vec<Generator>> {
    let alg = boundary_algebra(model)?;
    let kk = &alg.k;
    let m = kk.dim();
    let hk = hopf::haar_integral(kk)?;
    let one = kk.one();
    let mut out = Vec::new();
    for kb in 0..m {
        for p in 0..m {
            let phi = hopf::sandwich(kk, &kk.basis(p), &one, &hk);
            let label = RibbonLabel::new(alg.kbasis[kb].clone(), phi).flat();
            let op = ribbon_operator_general(model, &alg, rho, &label, None)?;
            out.push(Generator { label, op });
        }
    }
    Ok(out)
}

/// A^{h_K}(s_b) and the face stabilizer at s_b.
pub fn boundary_end_stabilizers(model: &Model, sb: Site) -> Result<(LatticeOperator, LatticeOperator)> {
    let def = model.defect()?;
    let kk = &def
        .subalgebra
        .as_ref()
        .ok_or_else(|| Error::UnsupportedConfiguration("boundary is not a Hopf subalgebra".into()))?
        .algebra;
    let hk = hopf::haar_integral(kk)?;
    let a = boundary_vertex_k(model, sb, &hk)?;
    let b = SiteOps::new(model, sb).face(&model.regions[def.right_region].dual_haar)?;
    Ok((a, b))
}

/// Commutators of F with A^{h_K}(s_b) and B^{φ_Ĥ}(s_b).
pub fn condensation_residuals(model: &Model, rho: &Ribbon, f: &LatticeOperator) -> Result<(f64, f64)> {
    let (a, b) = boundary_end_stabilizers(model, rho.end())?;
    Ok((commutator_norm(&a, f)?, commutator_norm(&b, f)?))
}

fn commutator(a: &LatticeOperator, b: &LatticeOperator) -> Result<LatticeOperator> {
    a.compose(b)?.sub(&b.compose(a)?)
}

/// The condensation algebra 𝒞_ρ: ribbon operators on ρ↓ commuting with both stabilizers
/// at the boundary end, found as a null space over all labels. Returns a basis of the
/// operator span (labels with F = 0 are dropped).
pub fn condensation_subalgebra(model: &Model, rho: &Ribbon, tol: f64) -> Result<Vec<Generator>> {
    let alg = boundary_algebra(model)?;
    let (a, b) = boundary_end_stabilizers(model, rho.end())?;
    let n = alg.label_dim();
    let mut ops = Vec::with_capacity(n);
    let mut comms = Vec::with_capacity(2 * n);
    for i in 0..n {
        let op = ribbon_operator_general(model, &alg, rho, &linalg::basis_vec(n, i), None)?;
        comms.push(commutator(&a, &op)?);
        comms.push(commutator(&b, &op)?);
        ops.push(op);
    }
    // each label contributes two stacked commutator columns
    let cm = entry_matrix(&comms)?;
    let rows = cm.nrows();
    let m = DMatrix::from_fn(2 * rows, n, |r, c| cm[(r % rows, 2 * c + r / rows)]);
    let null = linalg::nullspace(&m, tol);
    let em = entry_matrix(&ops)?;
    let image = &em * &null;
    let keep = linalg::pivot_columns(&image, tol);
    let mut out = Vec::new();
    for c in keep {
        let label: Vec<C64> = null.column(c).iter().copied().collect();
        let op = ribbon_operator_general(model, &alg, rho, &label, None)?;
        out.push(Generator { label, op });
    }
    Ok(out)
}

/// Operators as columns of their entries on a common support.
fn entry_matrix(ops: &[LatticeOperator]) -> Result<DMatrix<C64>> {
    let Some(first) = ops.first() else {
        return Ok(DMatrix::zeros(0, 0));
    };
    let mut support = first.support.clone();
    let mut dims = first.dims.clone();
    for o in ops {
        for (e, k) in o.support.iter().zip(&o.dims) {
            if !support.contains(e) {
                support.push(*e);
                dims.push(*k);
            }
        }
    }
    let mut cols: Vec<BTreeMap<(usize, usize), C64>> = Vec::new();
    for o in ops {
        let emb = o.embed(&support, &dims)?;
        cols.push(emb.mat.iter().map(|(v, (r, c))| ((r, c), *v)).collect());
    }
    let mut keys: Vec<(usize, usize)> = cols.iter().flat_map(|c| c.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    Ok(DMatrix::from_fn(keys.len(), ops.len(), |i, j| {
        cols[j].get(&keys[i]).copied().unwrap_or(ZERO)
    }))
}

/// Rank of the span of operators.
pub fn span_rank(ops: &[LatticeOperator], tol: f64) -> Result<usize> {
    if ops.is_empty() {
        return Ok(0);
    }
    Ok(linalg::rank(&entry_matrix(ops)?, tol))
}

// ---------------------------------------------------------------------------
// excitations

/// Residual ‖P|ψ⟩ − |ψ⟩‖ per Hamiltonian term, keyed by term label.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ExcitationReport {
    pub residuals: BTreeMap<String, f64>,
    /// Set when the ribbon annihilated the input state.
    #[serde(default)]
    pub annihilated: bool,
}

impl ExcitationReport {
    pub fn excited(&self, tol: f64) -> Vec<String> {
        self.residuals
            .iter()
            .filter(|(_, r)| **r > tol)
            .map(|(k, _)| k.clone())
            .collect()
    }
}

fn centre_site(model: &Model) -> Result<Site> {
    let lat = &model.lattice;
    (0..lat.n_vertices)
        .find(|&v| !lat.is_boundary_vertex(v))
        .and_then(|v| lat.vertex_site(v))
        .ok_or_else(|| Error::InvalidInput(format!("{} has no interior vertex", model.name)))
}

/// Two triangles from an interior vertex to the rim of a wheel-like disk: a dual triangle
/// followed by a direct one, ending on a boundary site.
pub fn rim_ribbon(model: &Model, kind: RibbonType) -> Result<Ribbon> {
    let steps = match kind {
        RibbonType::A => [Step::VertexCcw, Step::FacePrev],
        RibbonType::B => [Step::VertexCw, Step::FaceNext],
    };
    let rho = model.lattice.walk(centre_site(model)?, &steps)?;
    if !model.lattice.is_boundary_vertex(rho.end().vertex) {
        return Err(Error::InvalidInput("rim ribbon does not reach the boundary".into()));
    }
    Ok(rho)
}

/// One direct triangle from an interior vertex along a spoke to the boundary.
pub fn spoke_ribbon(model: &Model, kind: RibbonType) -> Result<Ribbon> {
    let step = match kind {
        RibbonType::A => Step::FacePrev,
        RibbonType::B => Step::FaceNext,
    };
    let rho = model.lattice.walk(centre_site(model)?, &[step])?;
    if !model.lattice.is_boundary_vertex(rho.end().vertex) {
        return Err(Error::InvalidInput("spoke ribbon does not reach the boundary".into()));
    }
    Ok(rho)
}

/// Edges met an odd number of times by the boundaries of `faces`, each with the direction
/// in which the face set traverses it.
pub fn enclosing_edges(model: &Model, faces: &[usize]) -> Vec<(usize, bool)> {
    let mut count: BTreeMap<usize, (usize, bool)> = BTreeMap::new();
    for &f in faces {
        for d in &model.lattice.faces[f] {
            let slot = count.entry(d.edge).or_insert((0, d.forward));
            slot.0 += 1;
            slot.1 = d.forward;
        }
    }
    count
        .into_iter()
        .filter(|(_, (n, _))| n % 2 == 1)
        .map(|(e, (_, along))| (e, along))
        .collect()
}

/// ⊗ T^χ over the edges enclosing `faces`: T₋ where the faces run along a bulk edge, T₊
/// otherwise, and the coaction legs Σ x[0] χ(x[1]) or Σ χ(S(x[-1])) x[0] on boundary and
/// wall edges. For C[Z₂] and the sign character this is the Z-string around the faces.
pub fn enclosing_string(model: &Model, faces: &[usize], chi: &[C64]) -> Result<LatticeOperator> {
    let mut op: Option<LatticeOperator> = None;
    for (e, along) in enclosing_edges(model, faces) {
        let t = if model.is_defect_edge(e) {
            let d = model.defect()?;
            let legs = if along { &d.left_leg } else { &d.right_leg };
            if legs.len() != chi.len() {
                return Err(Error::ParentMismatch {
                    algebra: format!("coaction leg of edge {e}"),
                    expected: legs.len(),
                    got: chi.len(),
                });
            }
            let n = d.dim();
            let mut m = DMatrix::zeros(n, n);
            for (k, c) in chi.iter().enumerate() {
                m += crate::operators::col_mat_to_dense(&legs[k], n) * *c;
            }
            let m = crate::operators::col_mat(&m);
            LatticeOperator::from_terms(vec![e], vec![n], &[(ONE, vec![&m])])
        } else {
            let kind = if along { EdgeKind::TMinus } else { EdgeKind::TPlus };
            edge_action(model, kind, chi, e)?
        };
        op = Some(match op {
            None => t,
            Some(o) => o.tensor(&t)?,
        });
    }
    op.ok_or_else(|| Error::InvalidInput("face set has no enclosing edges".into()))
}

/// ∏ B^χ(s_f) over `faces`, using boundary face operators where a face touches a defect.
pub fn enclosed_face_product(model: &Model, faces: &[usize], chi: &[C64]) -> Result<LatticeOperator> {
    let mut op: Option<LatticeOperator> = None;
    for &f in faces {
        let site = model.lattice.face_start(f);
        let b = SiteOps { model, site }.face(chi)?;
        op = Some(match op {
            None => b,
            Some(o) => o.compose(&b)?,
        });
    }
    op.ok_or_else(|| Error::InvalidInput("empty face set".into()))
}

/// A state with every term satisfied except the face term at `face`: the remaining
/// projectors applied to (1 − B^{φ_Ĥ}) on a seeded random vector.
pub fn single_flux_state(model: &Model, face: usize, seed: u64) -> Result<Vec<C64>> {
    let terms = hamiltonian_terms(model)?;
    let n = model.total_dim().ok_or(Error::TooLarge {
        dim: usize::MAX,
        budget: crate::operators::dense_cap(),
    })?;
    let mut rng = linalg::seeded(seed);
    let mut psi = linalg::random_vector(&mut rng, n);
    let is_flux = |t: &Term| {
        matches!(t.kind, TermKind::Face | TermKind::BoundaryFace | TermKind::WallFace) && t.site.face == face
    };
    let flux = terms
        .iter()
        .find(|t| is_flux(t))
        .ok_or_else(|| Error::InvalidInput(format!("no face term at face {face}")))?;
    let p = flux.op.apply(&model.dims, &psi);
    for (a, b) in psi.iter_mut().zip(&p) {
        *a -= b;
    }
    for t in terms.iter().filter(|t| !is_flux(t)) {
        psi = t.op.apply(&model.dims, &psi);
    }
    let norm = linalg::norm2(&psi);
    if norm < 1e-10 {
        return Err(Error::Degenerate(format!("no state with a single flux at face {face}")));
    }
    Ok(psi.into_iter().map(|z| z / norm).collect())
}

pub fn excitations_with(model: &Model, terms: &[Term], state: &[C64]) -> ExcitationReport {
    let mut residuals = BTreeMap::new();
    for t in terms {
        let p = t.op.apply(&model.dims, state);
        let r: f64 = p
            .iter()
            .zip(state)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residuals.insert(t.label.clone(), r);
    }
    ExcitationReport {
        residuals,
        annihilated: false,
    }
}

pub fn excitations(model: &Model, state: &[C64]) -> Result<ExcitationReport> {
    let terms = hamiltonian_terms(model)?;
    Ok(excitations_with(model, &terms, state))
}

/// F|ψ⟩ normalized, with its excitation report. A vanishing output is flagged and returned
/// unnormalized.
pub fn create_pair(model: &Model, state: &[C64], f: &LatticeOperator) -> Result<(Vec<C64>, ExcitationReport)> {
    let out = f.apply(&model.dims, state);
    let norm = linalg::norm2(&out);
    if norm < 1e-12 {
        let mut rep = ExcitationReport::default();
        rep.annihilated = true;
        return Ok((out, rep));
    }
    let out: Vec<C64> = out.iter().map(|z| z / norm).collect();
    let rep = excitations(model, &out)?;
    Ok((out, rep))
}

// ---------------------------------------------------------------------------
// scripts

/// A site given as (vertex, face).
pub type SiteRef = (usize, usize);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TriangleRef {
    pub s0: SiteRef,
    pub s1: SiteRef,
    pub edge: usize,
}

/// Either an explicit triangle list or a start site with walking steps.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RibbonPath {
    Triangles { triangles: Vec<TriangleRef> },
    Walk { start: SiteRef, steps: Vec<Step> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RibbonOp {
    #[serde(flatten)]
    pub path: RibbonPath,
    pub label: RibbonLabel,
    /// Interpret the label in H⫽K ⊗ K̂ (bulk-to-boundary ribbon).
    #[serde(default)]
    pub boundary: bool,
}

/// Ribbon operators applied in order to a state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RibbonScript {
    pub operations: Vec<RibbonOp>,
}

fn site_ref(model: &Model, r: SiteRef) -> Result<Site> {
    model
        .lattice
        .site_at(r.0, r.1)
        .ok_or_else(|| Error::Lattice(format!("({}, {}) is not a site", r.0, r.1)))
}

impl RibbonOp {
    pub fn ribbon(&self, model: &Model) -> Result<Ribbon> {
        match &self.path {
            RibbonPath::Triangles { triangles } => {
                let tris = triangles
                    .iter()
                    .map(|t| Ok((site_ref(model, t.s0)?, site_ref(model, t.s1)?, t.edge)))
                    .collect::<Result<Vec<_>>>()?;
                model.lattice.make_ribbon(&tris)
            }
            RibbonPath::Walk { start, steps } => model.lattice.walk(site_ref(model, *start)?, steps),
        }
    }

    pub fn operator(&self, model: &Model) -> Result<LatticeOperator> {
        let rho = self.ribbon(model)?;
        if self.boundary {
            boundary_ribbon_operator(model, &rho, &self.label)
        } else {
            ribbon_operator(model, &rho, &self.label)
        }
    }
}

impl RibbonScript {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Applies every operation and reports the excitations of the normalized result.
    pub fn run(&self, model: &Model, state: &[C64]) -> Result<(Vec<C64>, ExcitationReport)> {
        let mut cur = state.to_vec();
        for op in &self.operations {
            cur = op.operator(model)?.apply(&model.dims, &cur);
        }
        let norm = linalg::norm2(&cur);
        if norm < 1e-12 {
            let mut rep = ExcitationReport::default();
            rep.annihilated = true;
            return Ok((cur, rep));
        }
        let cur: Vec<C64> = cur.iter().map(|z| z / norm).collect();
        let rep = excitations(model, &cur)?;
        Ok((cur, rep))
    }
}
