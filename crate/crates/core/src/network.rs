//! Hopf tensor networks on a cellulation: traces, network states, ground states, ground
//! state degeneracy and entanglement entropy.
//!
//! Every edge label is split with iterated coproducts (or the coaction on boundary and wall
//! edges). A face that traverses the edge along its direction receives S of the earliest
//! factor, a face traversing it against its direction receives the last factor, and the
//! physical leg (when present) keeps the factor in between, like x[0] of a coaction. Each
//! face then pairs its label with the product of its legs in counterclockwise order from
//! the start site.

use crate::error::{Error, Result};
use crate::hopf::{self, FinHopfAlgebra};
use crate::lattice::Site;
use crate::linalg::{self, C64, ONE, ZERO};
use crate::operators::{self, hamiltonian_terms, Model, Term};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// Largest intermediate tensor (complex entries) the contraction may build.
pub const CONTRACTION_BUDGET: usize = 1 << 24;

/// Total dimension up to which `gsd` sweeps the full basis.
pub fn sweep_cap() -> usize {
    std::env::var("QDOUBLE_SWEEP_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(4096)
}

/// Leg ids at or above this value are internal; smaller ids are physical edges.
const LEG_BASE: usize = 1 << 40;

fn leg_id(face: usize, dart: usize) -> usize {
    LEG_BASE + face * 1024 + dart
}

/// Edge and face labels on a model's cellulation.
#[derive(Clone, Debug)]
pub struct LabeledNetwork<'a> {
    pub model: &'a Model,
    pub edge_labels: Vec<Option<Vec<C64>>>,
    pub face_labels: Vec<Option<Vec<C64>>>,
    pub starts: Vec<Site>,
}

impl<'a> LabeledNetwork<'a> {
    pub fn new(model: &'a Model) -> Self {
        let lat = &model.lattice;
        LabeledNetwork {
            model,
            edge_labels: vec![None; lat.n_edges()],
            face_labels: vec![None; lat.n_faces()],
            starts: (0..lat.n_faces()).map(|f| lat.face_start(f)).collect(),
        }
    }

    /// h_H on bulk edges, h_𝔄 on boundary and wall edges, φ_Ĥ on every face.
    pub fn haar(model: &'a Model) -> Result<Self> {
        let mut net = Self::new(model);
        for e in 0..model.lattice.n_edges() {
            let x = if model.is_defect_edge(e) {
                model.defect()?.ground_label()?
            } else {
                model.edge_region(e)?.haar.clone()
            };
            net.set_edge(e, x)?;
        }
        for f in 0..model.lattice.n_faces() {
            let phi = face_region(model, f).dual_haar.clone();
            net.set_face(f, phi)?;
        }
        Ok(net)
    }

    pub fn edge_dim(&self, e: usize) -> Result<usize> {
        Ok(if self.model.is_defect_edge(e) {
            self.model.defect()?.dim()
        } else {
            self.model.edge_region(e)?.dim()
        })
    }

    pub fn set_edge(&mut self, e: usize, x: Vec<C64>) -> Result<()> {
        let d = self.edge_dim(e)?;
        if x.len() != d {
            return Err(Error::ParentMismatch {
                algebra: format!("edge {e}"),
                expected: d,
                got: x.len(),
            });
        }
        self.edge_labels[e] = Some(x);
        Ok(())
    }

    pub fn set_face(&mut self, f: usize, phi: Vec<C64>) -> Result<()> {
        let d = face_region(self.model, f).dim();
        if phi.len() != d {
            return Err(Error::ParentMismatch {
                algebra: format!("face {f}"),
                expected: d,
                got: phi.len(),
            });
        }
        self.face_labels[f] = Some(phi);
        Ok(())
    }

    pub fn set_start(&mut self, s: Site) {
        self.starts[s.face] = s;
    }

    fn edge_label(&self, e: usize) -> Result<&[C64]> {
        self.edge_labels[e]
            .as_deref()
            .ok_or_else(|| Error::InvalidInput(format!("incomplete network: edge {e} has no label")))
    }

    fn face_label(&self, f: usize) -> Result<&[C64]> {
        self.face_labels[f]
            .as_deref()
            .ok_or_else(|| Error::InvalidInput(format!("incomplete network: face {f} has no label")))
    }
}

fn face_region(model: &Model, f: usize) -> &operators::Region {
    &model.regions[Model::region_index(model.lattice.face_region(f))]
}

/// Evaluation order knobs. The result does not depend on them.
#[derive(Clone, Debug, Default)]
pub struct TraceOrder {
    /// Order in which faces are absorbed; index order when empty.
    pub faces: Vec<usize>,
    /// Split the last Sweedler leg repeatedly instead of the first.
    pub right_nested: bool,
}

/// Dense tensor with named axes, row-major in `axes` order.
#[derive(Clone, Debug)]
struct Tensor {
    axes: Vec<usize>,
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl Tensor {
    fn scalar(v: C64) -> Self {
        Tensor {
            axes: vec![],
            dims: vec![],
            data: vec![v],
        }
    }

    /// Flat offsets of all index tuples over the chosen axis positions, row-major.
    fn offsets(&self, pos: &[usize]) -> Vec<usize> {
        let st = operators::strides(&self.dims);
        let mut out = vec![0usize];
        for &p in pos {
            let mut next = Vec::with_capacity(out.len() * self.dims[p]);
            for o in &out {
                for i in 0..self.dims[p] {
                    next.push(o + i * st[p]);
                }
            }
            out = next;
        }
        out
    }

    /// Sums over the axes the two tensors share. Result axes: free axes of `self`, then
    /// free axes of `other`.
    fn contract(&self, other: &Tensor, budget: usize) -> Result<Tensor> {
        let shared: Vec<usize> = self.axes.iter().copied().filter(|a| other.axes.contains(a)).collect();
        let free_a: Vec<usize> = (0..self.axes.len()).filter(|&i| !shared.contains(&self.axes[i])).collect();
        let free_b: Vec<usize> = (0..other.axes.len()).filter(|&i| !shared.contains(&other.axes[i])).collect();
        let sh_a: Vec<usize> = shared.iter().map(|a| self.axes.iter().position(|x| x == a).unwrap()).collect();
        let sh_b: Vec<usize> = shared.iter().map(|a| other.axes.iter().position(|x| x == a).unwrap()).collect();
        for (&i, &j) in sh_a.iter().zip(&sh_b) {
            if self.dims[i] != other.dims[j] {
                return Err(Error::ModelInconsistency(format!(
                    "leg {} has dimension {} and {}",
                    self.axes[i], self.dims[i], other.dims[j]
                )));
            }
        }
        let (fa, fb, sa, sb) = (
            self.offsets(&free_a),
            other.offsets(&free_b),
            self.offsets(&sh_a),
            other.offsets(&sh_b),
        );
        let size = fa.len().saturating_mul(fb.len());
        if size > budget {
            return Err(Error::TooLarge { dim: size, budget });
        }
        let am = DMatrix::from_fn(fa.len(), sa.len(), |i, s| self.data[fa[i] + sa[s]]);
        let bm = DMatrix::from_fn(sb.len(), fb.len(), |s, j| other.data[sb[s] + fb[j]]);
        let cm = am * bm;
        let mut data = Vec::with_capacity(size);
        for i in 0..fa.len() {
            for j in 0..fb.len() {
                data.push(cm[(i, j)]);
            }
        }
        let mut axes: Vec<usize> = free_a.iter().map(|&i| self.axes[i]).collect();
        axes.extend(free_b.iter().map(|&i| other.axes[i]));
        let mut dims: Vec<usize> = free_a.iter().map(|&i| self.dims[i]).collect();
        dims.extend(free_b.iter().map(|&i| other.dims[i]));
        Ok(Tensor { axes, dims, data })
    }

    fn reorder(&self, order: &[usize]) -> Vec<C64> {
        let pos: Vec<usize> = order
            .iter()
            .map(|a| self.axes.iter().position(|x| x == a).expect("axis present"))
            .collect();
        self.offsets(&pos).into_iter().map(|o| self.data[o]).collect()
    }
}

/// One occurrence of an edge in a face boundary.
#[derive(Clone, Copy, Debug)]
struct Occurrence {
    face: usize,
    leg: usize,
    /// The face traverses the edge along its direction.
    along: bool,
}

fn occurrences(model: &Model) -> Vec<Vec<Occurrence>> {
    let lat = &model.lattice;
    let mut occ = vec![Vec::new(); lat.n_edges()];
    for (f, darts) in lat.faces.iter().enumerate() {
        for (k, d) in darts.iter().enumerate() {
            occ[d.edge].push(Occurrence {
                face: f,
                leg: leg_id(f, k),
                along: d.forward,
            });
        }
    }
    occ
}

fn antipode_column(h: &FinHopfAlgebra, j: usize) -> Vec<(usize, C64)> {
    (0..h.dim())
        .filter_map(|k| {
            let v = h.antipode[(k, j)];
            (v != ZERO).then_some((k, v))
        })
        .collect()
}

/// Splits of one edge label: physical leg first (if any), then the face legs.
fn edge_tensor(net: &LabeledNetwork, e: usize, occ: &[Occurrence], physical: bool, right_nested: bool) -> Result<Tensor> {
    let model = net.model;
    let x = net.edge_label(e)?;
    let along: Vec<&Occurrence> = occ.iter().filter(|o| o.along).collect();
    let against: Vec<&Occurrence> = occ.iter().filter(|o| !o.along).collect();
    let mut axes = Vec::new();
    let mut dims = Vec::new();
    let phys_dim = net.edge_dim(e)?;
    if physical {
        axes.push(e);
        dims.push(phys_dim);
    }
    // (entry in axes order, coefficient)
    let mut entries: Vec<(Vec<usize>, C64)> = Vec::new();
    if model.is_defect_edge(e) {
        let d = model.defect()?;
        let bic = &d.algebra;
        if along.len() > 1 || against.len() > 1 {
            return Err(Error::UnsupportedConfiguration(format!(
                "defect edge {e} appears twice on one side"
            )));
        }
        for o in along.iter().chain(&against) {
            axes.push(o.leg);
            dims.push(face_region(model, o.face).dim());
        }
        let aug = if physical {
            None
        } else {
            Some(bic.augmentation.as_ref().ok_or(Error::NotAugmented)?)
        };
        for (i, xi) in x.iter().enumerate() {
            if *xi == ZERO {
                continue;
            }
            for &(p1, j, p2, v) in &bic.coaction[i] {
                let mut w = xi * v;
                let mut idx = Vec::new();
                match aug {
                    None => idx.push(j),
                    Some(a) => w *= a[j],
                }
                let mut opts: Vec<Vec<(usize, C64)>> = Vec::new();
                if along.is_empty() {
                    w *= bic.h1.counit[p1];
                } else {
                    opts.push(antipode_column(&bic.h1, p1));
                }
                if against.is_empty() {
                    w *= bic.h2.counit[p2];
                } else {
                    opts.push(vec![(p2, ONE)]);
                }
                if w == ZERO {
                    continue;
                }
                expand(&mut entries, idx, w, &opts);
            }
        }
    } else {
        let h = &model.edge_region(e)?.algebra;
        let n_legs = usize::from(physical) + along.len() + against.len();
        for o in along.iter().chain(&against) {
            axes.push(o.leg);
            dims.push(h.dim());
        }
        if n_legs == 0 {
            return Ok(Tensor::scalar(h.counit_of(x)));
        }
        let sw = if right_nested {
            h.sweedler_right_nested(x, n_legs)
        } else {
            h.sweedler(x, n_legs)
        };
        // Sweedler legs: along-face pieces, then the physical leg, then against-face pieces
        let na = along.len();
        for (legs, w) in sw {
            let mut opts: Vec<Vec<(usize, C64)>> = Vec::new();
            for &l in &legs[..na] {
                opts.push(antipode_column(h, l));
            }
            let rest = if physical { &legs[na + 1..] } else { &legs[na..] };
            for &l in rest {
                opts.push(vec![(l, ONE)]);
            }
            let prefix = if physical { vec![legs[na]] } else { vec![] };
            expand(&mut entries, prefix, w, &opts);
        }
    }
    let size: usize = dims.iter().product();
    let st = operators::strides(&dims);
    let mut data = vec![ZERO; size];
    for (idx, w) in entries {
        let o: usize = idx.iter().zip(&st).map(|(i, s)| i * s).sum();
        data[o] += w;
    }
    Ok(Tensor { axes, dims, data })
}

/// Pushes every choice of one option per leg.
fn expand(out: &mut Vec<(Vec<usize>, C64)>, prefix: Vec<usize>, w: C64, opts: &[Vec<(usize, C64)>]) {
    match opts.split_first() {
        None => out.push((prefix, w)),
        Some((first, rest)) => {
            for &(k, v) in first {
                let mut p = prefix.clone();
                p.push(k);
                expand(out, p, w * v, rest);
            }
        }
    }
}

/// Φ[a₁…aₙ] = φ(e_{a₁}⋯e_{aₙ}) over the face legs in fan order from the start site.
fn face_tensor(net: &LabeledNetwork, f: usize) -> Result<Tensor> {
    let model = net.model;
    let h = &face_region(model, f).algebra;
    let phi = net.face_label(f)?;
    let start = net.starts[f];
    let n = model.lattice.faces[f].len();
    let d = h.dim();
    let axes: Vec<usize> = (0..n).map(|k| leg_id(f, (start.pos + k) % n)).collect();
    let dims = vec![d; n];
    let mut data = Vec::with_capacity(d.pow(n as u32));
    fn rec(h: &FinHopfAlgebra, phi: &[C64], prefix: &[C64], left: usize, out: &mut Vec<C64>) {
        if left == 0 {
            out.push(hopf::pair(phi, prefix));
            return;
        }
        for a in 0..h.dim() {
            let next = h.mul(prefix, &h.basis(a));
            rec(h, phi, &next, left - 1, out);
        }
    }
    rec(h, phi, &h.one(), n, &mut data);
    Ok(Tensor { axes, dims, data })
}

fn contract_network(net: &LabeledNetwork, physical: bool, order: &TraceOrder) -> Result<Tensor> {
    let lat = &net.model.lattice;
    let occ = occurrences(net.model);
    let faces: Vec<usize> = if order.faces.is_empty() {
        (0..lat.n_faces()).collect()
    } else {
        let mut sorted = order.faces.clone();
        sorted.sort_unstable();
        if sorted != (0..lat.n_faces()).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("face order is not a permutation".into()));
        }
        order.faces.clone()
    };
    let mut t = Tensor::scalar(ONE);
    let mut done = vec![false; lat.n_edges()];
    for e in 0..lat.n_edges() {
        if occ[e].is_empty() {
            t = t.contract(&edge_tensor(net, e, &occ[e], physical, order.right_nested)?, CONTRACTION_BUDGET)?;
            done[e] = true;
        }
    }
    let mut processed = vec![false; lat.n_faces()];
    for &f in &faces {
        processed[f] = true;
        let mut local = face_tensor(net, f)?;
        for d in &lat.faces[f] {
            let e = d.edge;
            if done[e] || !occ[e].iter().all(|o| processed[o.face]) {
                continue;
            }
            let c = edge_tensor(net, e, &occ[e], physical, order.right_nested)?;
            local = local.contract(&c, CONTRACTION_BUDGET)?;
            done[e] = true;
        }
        t = t.contract(&local, CONTRACTION_BUDGET)?;
    }
    Ok(t)
}

/// The scalar Hopf trace of a fully labeled network.
pub fn hopf_trace(net: &LabeledNetwork) -> Result<C64> {
    hopf_trace_ordered(net, &TraceOrder::default())
}

pub fn hopf_trace_ordered(net: &LabeledNetwork, order: &TraceOrder) -> Result<C64> {
    let t = contract_network(net, false, order)?;
    Ok(t.data[0])
}

/// Ψ(x, φ) = φ(x).
pub fn rank2(x: &[C64], phi: &[C64]) -> C64 {
    hopf::pair(phi, x)
}

/// Σ φ(x⁽²⁾) ψ(S(x⁽¹⁾)): one edge shared by a face labelled ψ traversing it along its
/// direction and a face labelled φ traversing it against.
pub fn parallel_glue(h: &FinHopfAlgebra, x: &[C64], phi: &[C64], psi: &[C64]) -> C64 {
    h.sweedler(x, 2)
        .into_iter()
        .map(|(l, w)| w * hopf::pair(phi, &h.basis(l[1])) * hopf::pair(psi, &h.s(&h.basis(l[0]))))
        .sum()
}

/// Amplitudes over the row-major edge basis (edge 0 most significant).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub model: String,
    pub dims: Vec<usize>,
    #[serde(with = "linalg::cvec")]
    pub amplitudes: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateHeader {
    pub model: String,
    pub model_hash: String,
    pub edge_order: Vec<usize>,
    pub dims: Vec<usize>,
    pub len: usize,
    pub encoding: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        linalg::norm2(&self.amplitudes)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-12 {
            return Err(Error::Degenerate("state vector vanishes".into()));
        }
        for a in &mut self.amplitudes {
            *a /= n;
        }
        Ok(self)
    }

    pub fn header(&self) -> StateHeader {
        StateHeader {
            model: self.model.clone(),
            model_hash: sha256_hex(self.model.as_bytes()),
            edge_order: (0..self.dims.len()).collect(),
            dims: self.dims.clone(),
            len: self.amplitudes.len(),
            encoding: "f64le re,im".into(),
        }
    }

    /// Little-endian (re, im) pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * self.amplitudes.len());
        for a in &self.amplitudes {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(header: &StateHeader, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 16 * header.len || header.dims.iter().product::<usize>() != header.len {
            return Err(Error::InvalidInput("state payload does not match its header".into()));
        }
        let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8 bytes"));
        let amplitudes = bytes.chunks_exact(16).map(|c| C64::new(f(&c[..8]), f(&c[8..]))).collect();
        Ok(StateVector {
            model: header.model.clone(),
            dims: header.dims.clone(),
            amplitudes,
        })
    }
}

/// |Ψ⟩ = Σ ttr(x⁽¹⁾, x⁽³⁾; φ) |x⁽²⁾⟩ edge by edge, with x⁽¹⁾ fed to the face along the edge
/// and x⁽³⁾ to the face against it (coaction legs x[0] on boundary and wall edges).
pub fn network_state(net: &LabeledNetwork) -> Result<StateVector> {
    network_state_ordered(net, &TraceOrder::default())
}

pub fn network_state_ordered(net: &LabeledNetwork, order: &TraceOrder) -> Result<StateVector> {
    let t = contract_network(net, true, order)?;
    let edges: Vec<usize> = (0..net.model.lattice.n_edges()).collect();
    Ok(StateVector {
        model: net.model.name.clone(),
        dims: net.model.dims.clone(),
        amplitudes: t.reorder(&edges),
    })
}

/// The all-Haar network state, normalized in the Euclidean norm of the coefficient vector.
pub fn ground_state(model: &Model) -> Result<StateVector> {
    let net = LabeledNetwork::haar(model)?;
    network_state(&net)?
        .normalized()
        .map_err(|_| Error::Degenerate(format!("all-Haar network state of {} vanishes", model.name)))
}

/// max ‖P|ψ⟩ − |ψ⟩‖ / ‖ψ‖ over the given terms, keyed by term label.
pub fn term_residuals(model: &Model, terms: &[Term], psi: &[C64]) -> BTreeMap<String, f64> {
    let n = linalg::norm2(psi).max(1e-300);
    let mut out = BTreeMap::new();
    for t in terms {
        let r = linalg::max_diff(&t.op.apply(&model.dims, psi), psi) / n;
        let slot = out.entry(t.label.clone()).or_insert(0.0f64);
        *slot = slot.max(r);
    }
    out
}

pub fn ground_state_residuals(model: &Model, state: &StateVector) -> Result<BTreeMap<String, f64>> {
    Ok(term_residuals(model, &hamiltonian_terms(model)?, &state.amplitudes))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GsdReport {
    pub model: String,
    pub dim: usize,
    pub gsd: usize,
    /// The raw trace before rounding.
    pub trace: f64,
    /// `sweep` (full basis) or `range` (rank of P on random vectors).
    pub method: String,
}

/// Fixed-order pairwise sum, independent of how the inputs were chunked.
fn pairwise_sum(v: &[C64]) -> C64 {
    match v.len() {
        0 => ZERO,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Tr(∏A ∏B). Sweeps the full basis up to [`sweep_cap`]; beyond that (up to `range_cap`)
/// the rank of P on a growing block of random vectors is used, which equals Tr P for an
/// idempotent P almost surely.
pub fn gsd(model: &Model) -> Result<GsdReport> {
    gsd_with(model, sweep_cap(), 1 << 20)
}

pub fn gsd_with(model: &Model, sweep: usize, range_cap: usize) -> Result<GsdReport> {
    let n = model.total_dim().ok_or(Error::TooLarge {
        dim: usize::MAX,
        budget: range_cap,
    })?;
    let p = operators::ground_projector(model)?;
    let (trace, method) = if n <= sweep {
        let diag: Vec<C64> = (0..n)
            .into_par_iter()
            .map(|b| p.apply(&linalg::basis_vec(n, b))[b])
            .collect();
        (pairwise_sum(&diag).re, "sweep")
    } else if n <= range_cap {
        (range_trace(&p, n)?, "range")
    } else {
        return Err(Error::TooLarge { dim: n, budget: range_cap });
    };
    let g = trace.round();
    if (trace - g).abs() > 1e-6 || g < 0.0 {
        return Err(Error::ModelInconsistency(format!(
            "ground projector trace {trace} is not an integer"
        )));
    }
    Ok(GsdReport {
        model: model.name.clone(),
        dim: n,
        gsd: g as usize,
        trace,
        method: method.into(),
    })
}

/// Orthonormalizes P R and returns Tr(Q† P Q), growing R until its image is not saturated.
fn range_trace(p: &operators::ProjectorProduct, n: usize) -> Result<f64> {
    let mut k = 8usize.min(n);
    loop {
        let cols: Vec<Vec<C64>> = (0..k)
            .into_par_iter()
            .map(|j| {
                let mut r = linalg::seeded(0x95d ^ ((j as u64 + 1) << 20));
                p.apply(&linalg::random_vector(&mut r, n))
            })
            .collect();
        let gram = DMatrix::from_fn(k, k, |i, j| linalg::dotc(&cols[i], &cols[j]));
        let (vals, vecs) = linalg::herm_eigen(&gram);
        let top = vals.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..k).filter(|&i| vals[i] > 1e-10 * top.max(1e-300)).collect();
        if keep.len() == k && k < n {
            k = (2 * k).min(n);
            continue;
        }
        let q: Vec<Vec<C64>> = keep
            .iter()
            .map(|&i| {
                let mut v = vec![ZERO; n];
                for (j, c) in cols.iter().enumerate() {
                    linalg::axpy(vecs[(j, i)], c, &mut v);
                }
                let s = linalg::norm2(&v);
                v.iter().map(|z| z / s).collect()
            })
            .collect();
        let diag: Vec<C64> = q.par_iter().map(|v| linalg::dotc(v, &p.apply(v))).collect();
        return Ok(pairwise_sum(&diag).re);
    }
}

fn edge_gram_dense(model: &Model, e: usize) -> Result<DMatrix<C64>> {
    Ok(if model.is_defect_edge(e) {
        model.defect()?.gram.clone()
    } else {
        model.edge_region(e)?.gram.clone()
    })
}

fn hermitian_sqrt(g: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, u) = linalg::herm_eigen(g);
    let d = DMatrix::from_fn(vals.len(), vals.len(), |i, j| {
        if i == j {
            C64::new(vals[i].max(0.0).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    &u * d * u.adjoint()
}

/// Applies one matrix per axis to a row-major vector.
fn apply_per_axis(dims: &[usize], mats: &[DMatrix<C64>], psi: &[C64]) -> Vec<C64> {
    let st = operators::strides(dims);
    let mut cur = psi.to_vec();
    for (k, m) in mats.iter().enumerate() {
        let d = dims[k];
        let mut next = vec![ZERO; cur.len()];
        for base in 0..cur.len() {
            if (base / st[k]) % d != 0 {
                continue;
            }
            for i in 0..d {
                let mut acc = ZERO;
                for j in 0..d {
                    acc += m[(i, j)] * cur[base + j * st[k]];
                }
                next[base + i * st[k]] = acc;
            }
        }
        cur = next;
    }
    cur
}

/// Von Neumann entropy of the reduced state on `region` (edge indices), computed in the
/// Haar-orthonormalized local bases.
pub fn entanglement_entropy(model: &Model, state: &StateVector, region: &[usize]) -> Result<f64> {
    let dims = &state.dims;
    if dims.iter().product::<usize>() != state.amplitudes.len() || dims.len() != model.lattice.n_edges() {
        return Err(Error::InvalidInput("state does not match the model".into()));
    }
    let mut inside = vec![false; dims.len()];
    for &e in region {
        if e >= dims.len() {
            return Err(Error::InvalidInput(format!("edge {e} out of range")));
        }
        inside[e] = true;
    }
    let sqrt_grams: Vec<DMatrix<C64>> = (0..dims.len())
        .map(|e| edge_gram_dense(model, e).map(|g| hermitian_sqrt(&g)))
        .collect::<Result<_>>()?;
    let psi = apply_per_axis(dims, &sqrt_grams, &state.amplitudes);
    let a: Vec<usize> = (0..dims.len()).filter(|&e| inside[e]).collect();
    let b: Vec<usize> = (0..dims.len()).filter(|&e| !inside[e]).collect();
    let da: usize = a.iter().map(|&e| dims[e]).product();
    let db: usize = b.iter().map(|&e| dims[e]).product();
    let cap = operators::dense_cap();
    if da.min(db) > cap {
        return Err(Error::TooLarge {
            dim: da.min(db),
            budget: cap,
        });
    }
    let t = Tensor {
        axes: (0..dims.len()).collect(),
        dims: dims.clone(),
        data: psi,
    };
    let ta = t.offsets(&a);
    let tb = t.offsets(&b);
    let m = DMatrix::from_fn(da, db, |i, j| t.data[ta[i] + tb[j]]);
    let sv = m.singular_values();
    let total: f64 = sv.iter().map(|s| s * s).sum();
    if total < 1e-300 {
        return Err(Error::Degenerate("zero state".into()));
    }
    Ok(sv
        .iter()
        .map(|s| s * s / total)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        .max(0.0))
}

#[cfg(test)]
mod tests;
