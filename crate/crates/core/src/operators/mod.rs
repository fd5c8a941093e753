//! Edge, vertex, face, boundary and wall operators, the Hamiltonian and projector
//! diagnostics.
//!
//! Vertex fans run counterclockwise from the site; an edge gets L₋ when the vertex is its
//! tail and L₊ when it is its head. Face fans use T₋ for edges the face traverses along
//! their direction and T₊ otherwise. Fan coproducts are left-nested Sweedler expansions.

mod local;
mod model;

pub use local::{col_mat, col_mat_to_dense, dense_cap, gram_operator, strides, ColMat, LatticeOperator};
pub use model::{
    boundary_as_bicomodule, matrix_boundary, preset_lattice, subalgebra_ref, Defect, DefectInput,
    DefectKind, LatticeSpec, Model, ModelSpec, Region,
};

use crate::error::{Error, Result};
use crate::hopf::{self, Check};
use crate::lattice::{Dart, Sign, Site};
use crate::linalg::{C64, ONE, ZERO};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    #[serde(rename = "L+")]
    LPlus,
    #[serde(rename = "L-")]
    LMinus,
    #[serde(rename = "T+")]
    TPlus,
    #[serde(rename = "T-")]
    TMinus,
    #[serde(rename = "Lt+")]
    LtPlus,
    #[serde(rename = "Lt-")]
    LtMinus,
    #[serde(rename = "Tt+")]
    TtPlus,
    #[serde(rename = "Tt-")]
    TtMinus,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 8] = [
        EdgeKind::LPlus,
        EdgeKind::LMinus,
        EdgeKind::TPlus,
        EdgeKind::TMinus,
        EdgeKind::LtPlus,
        EdgeKind::LtMinus,
        EdgeKind::TtPlus,
        EdgeKind::TtMinus,
    ];

    /// T-type operators take a label in Ĥ, L-type ones a label in H.
    pub fn takes_dual_label(self) -> bool {
        matches!(
            self,
            EdgeKind::TPlus | EdgeKind::TMinus | EdgeKind::TtPlus | EdgeKind::TtMinus
        )
    }

    fn basis_mats(self, r: &Region) -> &[ColMat] {
        match self {
            EdgeKind::LPlus => &r.lplus,
            EdgeKind::LMinus => &r.lminus,
            EdgeKind::LtPlus => &r.ltplus,
            EdgeKind::LtMinus => &r.ltminus,
            EdgeKind::TPlus => &r.tplus,
            EdgeKind::TMinus => &r.tminus,
            EdgeKind::TtPlus => &r.ttplus,
            EdgeKind::TtMinus => &r.ttminus,
        }
    }
}

/// The single-edge matrix of an edge action, linear in the label.
pub fn edge_matrix(r: &Region, kind: EdgeKind, label: &[C64]) -> Result<DMatrix<C64>> {
    let d = r.dim();
    if label.len() != d {
        return Err(Error::ParentMismatch {
            algebra: if kind.takes_dual_label() {
                r.hat.name.clone()
            } else {
                r.algebra.name.clone()
            },
            expected: d,
            got: label.len(),
        });
    }
    let mut m = DMatrix::zeros(d, d);
    for (i, c) in label.iter().enumerate() {
        if *c != ZERO {
            m += col_mat_to_dense(&kind.basis_mats(r)[i], d) * *c;
        }
    }
    Ok(m)
}

pub fn edge_action(model: &Model, kind: EdgeKind, label: &[C64], edge: usize) -> Result<LatticeOperator> {
    if edge >= model.dims.len() {
        return Err(Error::InvalidInput(format!("edge {edge} out of range")));
    }
    let r = model.edge_region(edge)?;
    let m = col_mat(&edge_matrix(r, kind, label)?);
    Ok(LatticeOperator::from_terms(vec![edge], vec![r.dim()], &[(ONE, vec![&m])]))
}

fn check_distinct(edges: &[usize]) -> Result<()> {
    for (i, e) in edges.iter().enumerate() {
        if edges[..i].contains(e) {
            return Err(Error::UnsupportedConfiguration(format!(
                "edge {e} appears twice in one fan"
            )));
        }
    }
    Ok(())
}

fn check_len(name: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::ParentMismatch {
            algebra: name.to_string(),
            expected,
            got,
        });
    }
    Ok(())
}

/// Σ_g x_g Δ⁽ⁿ⁾(e_g) without merging equal tuples across basis elements. For labels with
/// many nonzero coefficients this is much shorter than the merged expansion.
pub fn sweedler_by_basis(h: &hopf::FinHopfAlgebra, x: &[C64], n: usize) -> hopf::Sweedler {
    let mut out = Vec::new();
    for (g, c) in x.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        for (legs, w) in h.sweedler(&h.basis(g), n) {
            out.push((legs, w * c));
        }
    }
    out
}

/// A^h(s) = Σ ⊗ᵢ L^{h⁽ⁱ⁾} over the vertex fan of a bulk site.
pub fn vertex_operator(model: &Model, s: Site, h: &[C64]) -> Result<LatticeOperator> {
    let tag = model.lattice.vertex_region(s.vertex).ok_or_else(|| {
        Error::ModelInconsistency(format!(
            "vertex {} touches a boundary or wall; use the boundary/wall vertex operator",
            s.vertex
        ))
    })?;
    let r = &model.regions[Model::region_index(tag)];
    check_len(&r.algebra.name, r.dim(), h.len())?;
    let fan = model.lattice.vertex_fan(s)?;
    let support: Vec<usize> = fan.iter().map(|x| x.0).collect();
    check_distinct(&support)?;
    let sw = sweedler_by_basis(&r.algebra, h, fan.len());
    let terms: Vec<(C64, Vec<&ColMat>)> = sw
        .iter()
        .map(|(legs, c)| {
            let f = legs
                .iter()
                .zip(&fan)
                .map(|(&i, (_, sign))| match sign {
                    Sign::Plus => &r.lplus[i],
                    Sign::Minus => &r.lminus[i],
                })
                .collect();
            (*c, f)
        })
        .collect();
    let dims = model.support_dims(&support);
    Ok(LatticeOperator::from_terms(support, dims, &terms))
}

/// One way of splitting a basis vector on a face leg: (remaining basis index, the part
/// fed to φ as a sparse vector, coefficient).
type Split = (usize, Vec<(usize, C64)>, C64);

fn sparse(v: &[C64]) -> Vec<(usize, C64)> {
    v.iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-15)
        .map(|(i, z)| (i, *z))
        .collect()
}

/// Splits of every basis vector for one face leg.
fn face_leg_splits(model: &Model, r: &Region, e: usize, forward: bool) -> Result<Vec<Vec<Split>>> {
    let h = &r.algebra;
    if model.is_defect_edge(e) {
        let d = model.defect()?;
        let bic = &d.algebra;
        if forward && d.kind == DefectKind::Boundary {
            return Err(Error::UnsupportedConfiguration(format!(
                "edge {e}: bulk on the left of a boundary edge"
            )));
        }
        return Ok((0..d.dim())
            .map(|i| {
                bic.coaction[i]
                    .iter()
                    .filter_map(|&(p1, j, p2, v)| {
                        if forward {
                            // Σ φ(S(x[-1])) x[0]
                            let w = v * bic.h2.counit[p2];
                            (w != ZERO).then(|| (j, sparse(&bic.h1.s(&bic.h1.basis(p1))), w))
                        } else {
                            // Σ x[0] φ(x[1])
                            let w = v * bic.h1.counit[p1];
                            (w != ZERO).then(|| (j, vec![(p2, ONE)], w))
                        }
                    })
                    .collect()
            })
            .collect());
    }
    let mut out = vec![Vec::new(); h.dim()];
    for (i, j, l, c) in h.comult.triples() {
        if forward {
            // T₋: Σ φ(S(x⁽¹⁾)) x⁽²⁾
            out[i].push((l, sparse(&h.s(&h.basis(j))), c));
        } else {
            // T₊: Σ x⁽¹⁾ φ(x⁽²⁾)
            out[i].push((j, vec![(l, ONE)], c));
        }
    }
    Ok(out)
}

/// B^φ(s) for any face: bulk legs get T±, boundary and wall legs get the coaction legs
/// Σ x[0] φ(x[1]) (face on the right) or Σ φ(S(x[-1])) x[0] (face on the left).
///
/// Evaluated as φ(ℓ₁ℓ₂⋯ℓₙ) over all splits of the legs, which is the pairing of the
/// iterated Ĥ coproduct of φ with the legs.
fn face_operator_any(model: &Model, s: Site, phi: &[C64]) -> Result<LatticeOperator> {
    let f = s.face;
    let r = &model.regions[Model::region_index(model.lattice.face_region(f))];
    check_len(&r.hat.name, r.dim(), phi.len())?;
    let fan = model.lattice.face_fan(s);
    let support: Vec<usize> = fan.iter().map(|x| x.0).collect();
    check_distinct(&support)?;
    let splits: Vec<Vec<Vec<Split>>> = fan
        .iter()
        .map(|&(e, sign)| face_leg_splits(model, r, e, sign == Sign::Minus))
        .collect::<Result<_>>()?;
    let dims = model.support_dims(&support);
    let h = &r.algebra;
    let d = h.dim();
    let n = fan.len();
    let dims2 = dims.clone();
    Ok(LatticeOperator::from_columns(support, dims, move |dig, out| {
        // depth-first over splits with prefix products of the legs
        let mut prefix: Vec<Vec<C64>> = vec![vec![ZERO; d]; n + 1];
        prefix[0] = h.unit.clone();
        let mut choice = vec![0usize; n];
        let mut coeff = vec![ONE; n + 1];
        let mut row = vec![0usize; n + 1];
        let mut k = 0;
        loop {
            if k == n {
                let val: C64 = prefix[n].iter().zip(phi).map(|(a, b)| a * b).sum();
                if val.norm() > 1e-15 {
                    out.push((row[n], val * coeff[n]));
                }
                k -= 1;
                choice[k] += 1;
                continue;
            }
            let opts = &splits[k][dig[k]];
            if choice[k] >= opts.len() {
                if k == 0 {
                    break;
                }
                choice[k] = 0;
                k -= 1;
                choice[k] += 1;
                continue;
            }
            let (rest, leg, c) = &opts[choice[k]];
            let mut next = vec![ZERO; d];
            for (a, av) in prefix[k].iter().enumerate() {
                if *av == ZERO {
                    continue;
                }
                for &(b, bv) in leg {
                    for &(t, tv) in h.mult.row(a, b) {
                        next[t] += av * bv * tv;
                    }
                }
            }
            prefix[k + 1] = next;
            coeff[k + 1] = coeff[k] * c;
            row[k + 1] = row[k] * dims2[k] + rest;
            k += 1;
        }
    }))
}

/// B^φ(s) = Σ ⊗ᵢ T^{φ⁽ⁱ⁾} over the face fan of a bulk face.
pub fn face_operator(model: &Model, s: Site, phi: &[C64]) -> Result<LatticeOperator> {
    if let Some(d) = model.lattice.faces[s.face].iter().find(|d| model.is_defect_edge(d.edge)) {
        return Err(Error::ModelInconsistency(format!(
            "face {} contains boundary/wall edge {}; use the boundary face operator",
            s.face, d.edge
        )));
    }
    face_operator_any(model, s, phi)
}

/// B^φ(s_b) on a face touching a boundary or wall.
pub fn boundary_face_operator(model: &Model, s: Site, phi: &[C64]) -> Result<LatticeOperator> {
    if !model.lattice.faces[s.face].iter().any(|d| model.is_defect_edge(d.edge)) {
        return Err(Error::ModelInconsistency(format!(
            "face {} has no boundary or wall edge",
            s.face
        )));
    }
    face_operator_any(model, s, phi)
}

/// Local picture at a boundary or wall vertex: incoming defect edge x, outgoing defect edge
/// y, at most one bulk edge on each side, and whether the site sits below or above the
/// bulk edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DefectVertex {
    pub x: usize,
    pub y: usize,
    /// Outgoing dart of the bulk edge on the left (H₁ side).
    pub left: Option<Dart>,
    /// Outgoing dart of the bulk edge on the right.
    pub right: Option<Dart>,
    pub below: bool,
}

impl DefectVertex {
    /// Name of the matching displayed picture: A1–A4 for boundaries, D1–D8 for walls,
    /// "corner" for a boundary vertex without bulk edges.
    pub fn picture(&self) -> String {
        let inc = |d: &Dart| !d.forward;
        match (self.left, self.right) {
            (None, None) => "corner".into(),
            (None, Some(h)) => {
                let n = match (inc(&h), self.below) {
                    (true, true) => 1,
                    (true, false) => 2,
                    (false, true) => 3,
                    (false, false) => 4,
                };
                format!("A{n}")
            }
            (Some(k), Some(h)) => {
                let n = match (inc(&k), inc(&h)) {
                    (false, true) => 1,
                    (true, false) => 3,
                    (false, false) => 5,
                    (true, true) => 7,
                };
                format!("D{}", if self.below { n } else { n + 1 })
            }
            (Some(_), None) => "left-only".into(),
        }
    }
}

pub fn defect_vertex_config(model: &Model, s: Site) -> Result<DefectVertex> {
    let lat = &model.lattice;
    let v = s.vertex;
    let unsupported = |m: String| Err(Error::UnsupportedConfiguration(format!("vertex {v}: {m}")));
    let incident = lat.incident_edges(v);
    let ins: Vec<usize> = incident
        .iter()
        .copied()
        .filter(|&e| model.is_defect_edge(e) && lat.edges[e].head == v)
        .collect();
    let outs: Vec<usize> = incident
        .iter()
        .copied()
        .filter(|&e| model.is_defect_edge(e) && lat.edges[e].tail == v)
        .collect();
    if ins.len() != 1 || outs.len() != 1 {
        return unsupported(format!(
            "{} incoming and {} outgoing boundary/wall edges; exactly one of each is supported",
            ins.len(),
            outs.len()
        ));
    }
    let (x, y) = (ins[0], outs[0]);
    let from = Dart::new(x, false);
    let to = Dart::new(y, true);
    let collect_side = |start: Dart, stop: Dart| -> Result<Vec<Dart>> {
        let mut out = Vec::new();
        let mut o = start;
        loop {
            o = lat.rot_next(o).ok_or_else(|| {
                Error::UnsupportedConfiguration(format!("vertex {v}: rotation leaves the surface"))
            })?;
            if o == stop {
                return Ok(out);
            }
            if model.is_defect_edge(o.edge) || out.len() > incident.len() {
                return Err(Error::UnsupportedConfiguration(format!(
                    "vertex {v}: unexpected boundary/wall edge {} between x and y",
                    o.edge
                )));
            }
            out.push(o);
        }
    };
    let right = collect_side(from, to)?;
    let left = if lat.dart_location(to).is_some() {
        collect_side(to, from)?
    } else {
        Vec::new()
    };
    if right.len() > 1 || left.len() > 1 {
        return unsupported(format!(
            "{} bulk edges on the right and {} on the left; at most one per side is supported",
            right.len(),
            left.len()
        ));
    }
    let out_s = lat.outgoing(s);
    let in_s = lat.incoming(s);
    let below = if out_s == from || in_s == Dart::new(x, true) {
        true
    } else if out_s == to || in_s == Dart::new(y, false) {
        false
    } else {
        return unsupported("site is not adjacent to the boundary/wall edges".into());
    };
    Ok(DefectVertex {
        x,
        y,
        left: left.first().copied(),
        right: right.first().copied(),
        below,
    })
}

/// A^{a⊗b}(s) at a boundary or wall vertex, with `ab` a row-major dim𝔄² coefficient
/// array over e_i ⊗ e_j ∈ 𝔄⊗𝔄^op.
///
/// Below the bulk edges: |ax, y b[0]⟩ with b[1] acting on the right bulk edge and b[-1] on
/// the left one. Above: |a[0]x, yb⟩ with a[±1] on the bulk edges.
pub fn defect_vertex_operator(model: &Model, s: Site, ab: &[C64]) -> Result<LatticeOperator> {
    let d = model.defect()?;
    let n = d.dim();
    check_len(&d.algebra.algebra.name, n * n, ab.len())?;
    let cfg = defect_vertex_config(model, s)?;
    if cfg.left.is_some() && d.kind == DefectKind::Boundary {
        return Err(Error::UnsupportedConfiguration(format!(
            "vertex {}: bulk on both sides of a boundary",
            s.vertex
        )));
    }
    let r1 = &model.regions[0];
    let r2 = &model.regions[d.right_region];
    let mut support = vec![cfg.x, cfg.y];
    if let Some(k) = cfg.left {
        support.push(k.edge);
    }
    if let Some(h) = cfg.right {
        support.push(h.edge);
    }
    let (eps1, eps2) = (&d.algebra.h1.counit, &d.algebra.h2.counit);
    let mut terms: Vec<(C64, Vec<&ColMat>)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = ab[i * n + j];
            if c == ZERO {
                continue;
            }
            let coacted = if cfg.below { j } else { i };
            for &(p1, m, p2, v) in &d.algebra.coaction[coacted] {
                let mut w = c * v;
                let mut f: Vec<&ColMat> = if cfg.below {
                    vec![&d.left_mul[i], &d.right_mul[m]]
                } else {
                    vec![&d.left_mul[m], &d.right_mul[j]]
                };
                match cfg.left {
                    Some(k) => {
                        let outgoing = k.forward;
                        f.push(match (cfg.below, outgoing) {
                            (true, true) => &r1.ltminus[p1],
                            (true, false) => &r1.ltplus[p1],
                            (false, true) => &r1.lminus[p1],
                            (false, false) => &r1.lplus[p1],
                        });
                    }
                    None => w *= eps1[p1],
                }
                match cfg.right {
                    Some(h) => {
                        let outgoing = h.forward;
                        f.push(match (cfg.below, outgoing) {
                            (true, false) => &r2.ltplus[p2],
                            (true, true) => &r2.ltminus[p2],
                            (false, false) => &r2.lplus[p2],
                            (false, true) => &r2.lminus[p2],
                        });
                    }
                    None => w *= eps2[p2],
                }
                if w != ZERO {
                    terms.push((w, f));
                }
            }
        }
    }
    let dims = model.support_dims(&support);
    Ok(LatticeOperator::from_terms(support, dims, &terms))
}

/// Boundary vertex operator A^{a⊗b}(s_b); the site must be at a boundary vertex.
pub fn boundary_vertex_operator(model: &Model, s: Site, ab: &[C64]) -> Result<LatticeOperator> {
    if model.defect()?.kind != DefectKind::Boundary {
        return Err(Error::ModelInconsistency("model has no boundary".into()));
    }
    defect_vertex_operator(model, s, ab)
}

/// Wall vertex operator A^{a⊗b}(s_d); the site must be at a wall vertex.
pub fn wall_vertex_operator(model: &Model, s: Site, ab: &[C64]) -> Result<LatticeOperator> {
    if model.defect()?.kind != DefectKind::Wall {
        return Err(Error::ModelInconsistency("model has no wall".into()));
    }
    defect_vertex_operator(model, s, ab)
}

/// λ as a row-major dim𝔄² array.
pub fn lambda_array(d: &Defect) -> Vec<C64> {
    d.lambda.lambda.clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Vertex,
    Face,
    BoundaryVertex,
    BoundaryFace,
    WallVertex,
    WallFace,
}

#[derive(Clone, Debug)]
pub struct Term {
    pub label: String,
    pub kind: TermKind,
    pub site: Site,
    pub op: LatticeOperator,
}

/// The Hamiltonian terms without the commutation check.
pub fn hamiltonian_terms(model: &Model) -> Result<Vec<Term>> {
    let lat = &model.lattice;
    let mut terms = Vec::new();
    let wall = model.defect.as_ref().map(|d| d.kind == DefectKind::Wall).unwrap_or(false);
    for v in 0..lat.n_vertices {
        let sites: Vec<Site> = lat.sites().into_iter().filter(|s| s.vertex == v).collect();
        let Some(&s0) = sites.first() else {
            continue;
        };
        if let Some(tag) = lat.vertex_region(v) {
            let r = &model.regions[Model::region_index(tag)];
            terms.push(Term {
                label: format!("A_v{v}"),
                kind: TermKind::Vertex,
                site: s0,
                op: vertex_operator(model, s0, &r.haar)?,
            });
            continue;
        }
        let d = model.defect()?;
        let lambda = lambda_array(d);
        let kind = if wall { TermKind::WallVertex } else { TermKind::BoundaryVertex };
        let mut done: Vec<bool> = Vec::new();
        for s in sites {
            let cfg = defect_vertex_config(model, s)?;
            if done.contains(&cfg.below) {
                continue;
            }
            done.push(cfg.below);
            let op = defect_vertex_operator(model, s, &lambda)?;
            let dup = terms
                .iter()
                .rev()
                .take_while(|t: &&Term| t.site.vertex == v)
                .any(|t| t.op.support == op.support && t.op.max_diff(&op).map(|x| x < 1e-12).unwrap_or(false));
            if dup {
                continue;
            }
            terms.push(Term {
                label: format!("A_v{v}:{}", cfg.picture()),
                kind,
                site: s,
                op,
            });
        }
    }
    for f in 0..lat.n_faces() {
        let s = lat.face_start(f);
        let r = &model.regions[Model::region_index(lat.face_region(f))];
        let touches = lat.faces[f].iter().any(|d| model.is_defect_edge(d.edge));
        let kind = match (touches, wall) {
            (false, _) => TermKind::Face,
            (true, false) => TermKind::BoundaryFace,
            (true, true) => TermKind::WallFace,
        };
        terms.push(Term {
            label: format!("B_f{f}"),
            kind,
            site: s,
            op: face_operator_any(model, s, &r.dual_haar)?,
        });
    }
    Ok(terms)
}

/// Labeled projectors of the Hamiltonian. Fails if a term is not a projector or two
/// terms do not commute at `tol`.
pub fn hamiltonian(model: &Model, tol: f64) -> Result<Vec<Term>> {
    let terms = hamiltonian_terms(model)?;
    for t in &terms {
        let rep = is_projector(model, &t.op)?;
        if !rep.passes(tol) {
            return Err(Error::ModelInconsistency(format!(
                "{} is not a projector (idempotency {:e}, hermiticity {:e})",
                t.label, rep.idempotency, rep.hermiticity
            )));
        }
    }
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            let c = commutator_norm(&a.op, &b.op)?;
            if c > tol {
                return Err(Error::ModelInconsistency(format!(
                    "{} and {} do not commute (max entry {c:e})",
                    a.label, b.label
                )));
            }
        }
    }
    Ok(terms)
}

/// Largest entry of [a, b] on the union of the supports (exactly 0 when disjoint).
pub fn commutator_norm(a: &LatticeOperator, b: &LatticeOperator) -> Result<f64> {
    if !a.support.iter().any(|e| b.support.contains(e)) {
        return Ok(0.0);
    }
    a.commutator_max(b)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProjectorReport {
    pub idempotency: f64,
    pub hermiticity: f64,
}

impl ProjectorReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.idempotency <= tol && self.hermiticity <= tol
    }
}

/// Gram matrix of the local Haar inner product on an operator's support.
pub fn local_gram(model: &Model, support: &[usize]) -> LatticeOperator {
    let grams: Vec<ColMat> = support.iter().map(|&e| model.edge_gram(e).clone()).collect();
    gram_operator(support.to_vec(), model.support_dims(support), &grams)
}

/// Adjoint with respect to the Haar inner product: G⁻¹ Mᴴ G on the support.
pub fn gram_adjoint(model: &Model, op: &LatticeOperator) -> Result<LatticeOperator> {
    let support = &op.support;
    let inv: Vec<ColMat> = support
        .iter()
        .map(|&e| {
            let g = col_mat_to_dense(model.edge_gram(e), model.dims[e]);
            let gi = g
                .try_inverse()
                .ok_or_else(|| Error::InvalidStar(0.0))?;
            Ok(col_mat(&gi))
        })
        .collect::<Result<_>>()?;
    let ginv = gram_operator(support.clone(), op.dims.clone(), &inv);
    let g = local_gram(model, support);
    ginv.compose(&op.conj_transpose())?.compose(&g)
}

/// P² = P and P† = P in the Haar inner product, as largest entry residuals.
pub fn is_projector(model: &Model, op: &LatticeOperator) -> Result<ProjectorReport> {
    let idempotency = op.compose(op)?.max_diff(op)?;
    let g = local_gram(model, &op.support);
    let gp = g.compose(op)?;
    let hermiticity = gp.max_diff(&gp.conj_transpose())?;
    Ok(ProjectorReport {
        idempotency,
        hermiticity,
    })
}

/// Ordered product of all Hamiltonian projectors, applied matrix-free.
#[derive(Clone, Debug)]
pub struct ProjectorProduct {
    pub dims: Vec<usize>,
    pub factors: Vec<LatticeOperator>,
}

impl ProjectorProduct {
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut cur = psi.to_vec();
        for f in &self.factors {
            cur = f.apply(&self.dims, &cur);
        }
        cur
    }

    pub fn to_dense(&self, cap: usize) -> Result<DMatrix<C64>> {
        let n = self.dims.iter().try_fold(1usize, |a, &b| a.checked_mul(b));
        let n = match n {
            Some(n) if n <= cap => n,
            _ => {
                return Err(Error::TooLarge {
                    dim: n.unwrap_or(usize::MAX),
                    budget: cap,
                })
            }
        };
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.apply(&crate::linalg::basis_vec(n, j));
            for (i, v) in col.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }
}

pub fn ground_projector(model: &Model) -> Result<ProjectorProduct> {
    Ok(ProjectorProduct {
        dims: model.dims.clone(),
        factors: hamiltonian_terms(model)?.into_iter().map(|t| t.op).collect(),
    })
}

/// Φ(X) = Σ B^{φᵢ}(s) A^{xⱼ}(s) for X = Σ φᵢ⊗xⱼ ∈ D(H) on the row-major basis of
/// `drinfeld_double`.
pub fn site_double_rep(model: &Model, s: Site, x: &[C64]) -> Result<LatticeOperator> {
    let tag = model.lattice.vertex_region(s.vertex).ok_or_else(|| {
        Error::ModelInconsistency(format!("vertex {} is not a bulk vertex", s.vertex))
    })?;
    let r = &model.regions[Model::region_index(tag)];
    let d = r.dim();
    check_len(&format!("double:{}", r.algebra.name), d * d, x.len())?;
    let mut acc: Option<LatticeOperator> = None;
    for j in 0..d {
        let phi: Vec<C64> = (0..d).map(|i| x[i * d + j]).collect();
        if phi.iter().all(|z| *z == ZERO) {
            continue;
        }
        let term = face_operator(model, s, &phi)?.compose(&vertex_operator(model, s, &r.algebra.basis(j))?)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    match acc {
        Some(a) => Ok(a),
        None => face_operator(model, s, &vec![ZERO; d]),
    }
}

/// Coefficients of an element of (𝔄⊗𝔄^op)⋆Ĥ, indexed `(i·n + j)·d + k` for
/// (e_i⊗e_j)⋆eᵏ.
pub fn crossed_product_mul(model: &Model, x: &[C64], y: &[C64]) -> Result<Vec<C64>> {
    let def = model.defect()?;
    let r = &model.regions[def.right_region];
    let (n, d) = (def.dim(), r.dim());
    let a = &def.algebra.algebra;
    let h = &r.algebra;
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * d + k;
    let mut out = vec![ZERO; n * n * d];
    // coaction of basis elements into the right algebra, left leg counited
    let coact: Vec<Vec<(usize, usize, C64)>> = (0..n)
        .map(|i| {
            def.algebra.coaction[i]
                .iter()
                .map(|&(p1, m, p2, v)| (m, p2, v * def.algebra.h1.counit[p1]))
                .filter(|t| t.2 != ZERO)
                .collect()
        })
        .collect();
    for ai in 0..n {
        for bj in 0..n {
            for pk in 0..d {
                let xv = x[idx(ai, bj, pk)];
                if xv == ZERO {
                    continue;
                }
                for ci in 0..n {
                    for dj in 0..n {
                        for qk in 0..d {
                            let yv = y[idx(ci, dj, qk)];
                            if yv == ZERO {
                                continue;
                            }
                            for &(c0, c1, cv) in &coact[ci] {
                                let left = a.mul(&a.basis(ai), &a.basis(c0));
                                for &(d0, d1, dv) in &coact[dj] {
                                    let right = a.mul(&a.basis(d0), &a.basis(bj));
                                    let f = hopf::sandwich(h, &r.hat.basis(pk), &h.basis(c1), &h.basis(d1));
                                    let g = r.hat.mul(&f, &r.hat.basis(qk));
                                    let w = xv * yv * cv * dv;
                                    for (li, lv) in left.iter().enumerate() {
                                        if *lv == ZERO {
                                            continue;
                                        }
                                        for (ri, rv) in right.iter().enumerate() {
                                            if *rv == ZERO {
                                                continue;
                                            }
                                            for (gk, gv) in g.iter().enumerate() {
                                                if *gv != ZERO {
                                                    out[idx(li, ri, gk)] += w * lv * rv * gv;
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Ψ((a⊗b)⋆φ) = A^{a⊗b}(s_b) B^φ(s_b).
pub fn boundary_site_rep(model: &Model, s: Site, x: &[C64]) -> Result<LatticeOperator> {
    let def = model.defect()?;
    let r = &model.regions[def.right_region];
    let (n, d) = (def.dim(), r.dim());
    check_len("crossed product", n * n * d, x.len())?;
    let mut acc: Option<LatticeOperator> = None;
    for i in 0..n {
        for j in 0..n {
            let phi: Vec<C64> = (0..d).map(|k| x[(i * n + j) * d + k]).collect();
            if phi.iter().all(|z| *z == ZERO) {
                continue;
            }
            let mut ab = vec![ZERO; n * n];
            ab[i * n + j] = ONE;
            let term = defect_vertex_operator(model, s, &ab)?
                .compose(&boundary_face_operator(model, s, &phi)?)?;
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
    }
    acc.ok_or_else(|| Error::InvalidInput("zero element".into()))
}

/// Residual checks for every term plus all pairwise commutators.
pub fn verify_terms(model: &Model, terms: &[Term], tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut idem: f64 = 0.0;
    let mut herm: f64 = 0.0;
    for t in terms {
        let rep = is_projector(model, &t.op)?;
        idem = idem.max(rep.idempotency);
        herm = herm.max(rep.hermiticity);
    }
    let mut comm: f64 = 0.0;
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            comm = comm.max(commutator_norm(&a.op, &b.op)?);
        }
    }
    out.push(Check::new("terms_idempotent", idem, tol));
    out.push(Check::new("terms_hermitian", herm, tol));
    out.push(Check::new("terms_commute", comm, tol));
    Ok(out)
}

/// Dense export: row-major (re, im) pairs.
pub fn export_dense(m: &DMatrix<C64>) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

#[cfg(test)]
mod tests;
