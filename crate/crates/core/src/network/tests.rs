use super::*;
use crate::linalg::{random_vector, seeded};
use crate::operators::{boundary_face_operator, face_operator, vertex_operator};
use rand::seq::SliceRandom;
use std::time::Instant;

fn model(s: &str) -> Model {
    Model::from_ref(s).unwrap()
}

fn face_op(m: &Model, s: Site, phi: &[C64]) -> operators::LatticeOperator {
    if m.lattice.faces[s.face].iter().any(|d| m.is_defect_edge(d.edge)) {
        boundary_face_operator(m, s, phi).unwrap()
    } else {
        face_operator(m, s, phi).unwrap()
    }
}

fn random_network<'a>(m: &'a Model, seed: u64) -> LabeledNetwork<'a> {
    let mut rng = seeded(seed);
    let mut net = LabeledNetwork::new(m);
    for e in 0..m.lattice.n_edges() {
        let d = net.edge_dim(e).unwrap();
        net.set_edge(e, random_vector(&mut rng, d)).unwrap();
    }
    for f in 0..m.lattice.n_faces() {
        let d = face_region(m, f).dim();
        net.set_face(f, random_vector(&mut rng, d)).unwrap();
    }
    net
}

fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn product_state(net: &LabeledNetwork) -> Vec<C64> {
    let mut out = vec![ONE];
    for x in &net.edge_labels {
        out = kron(&out, x.as_ref().unwrap());
    }
    out
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn overlap(a: &[C64], b: &[C64]) -> f64 {
    linalg::dotc(a, b).norm() / (linalg::norm2(a) * linalg::norm2(b))
}

#[test]
fn units_and_counits_trace_to_one() {
    for name in ["torus2x2:h8", "sphere:s3", "disk:h8:K=z2z2"] {
        let m = model(name);
        let mut net = LabeledNetwork::new(&m);
        for e in 0..m.lattice.n_edges() {
            let one = if m.is_defect_edge(e) {
                m.defect().unwrap().algebra.algebra.unit.clone()
            } else {
                m.edge_region(e).unwrap().algebra.one()
            };
            net.set_edge(e, one).unwrap();
        }
        for f in 0..m.lattice.n_faces() {
            net.set_face(f, face_region(&m, f).algebra.counit.clone()).unwrap();
        }
        let t = hopf_trace(&net).unwrap();
        assert!((t - ONE).norm() < 1e-12, "{name}: {t}");
    }
}

#[test]
fn one_labelled_edge_reduces_to_pairing_and_parallel_gluing() {
    let m = model("torus2x2:h8");
    let h = &m.regions[0].algebra;
    let mut rng = seeded(3);
    let e = 0;
    let along = m.lattice.faces.iter().position(|f| f.iter().any(|d| d.edge == e && d.forward)).unwrap();
    let against = m.lattice.faces.iter().position(|f| f.iter().any(|d| d.edge == e && !d.forward)).unwrap();
    let x = random_vector(&mut rng, 8);
    let phi = random_vector(&mut rng, 8);
    let psi = random_vector(&mut rng, 8);
    let mut net = LabeledNetwork::new(&m);
    for k in 0..m.lattice.n_edges() {
        net.set_edge(k, if k == e { x.clone() } else { h.one() }).unwrap();
    }
    for f in 0..m.lattice.n_faces() {
        net.set_face(f, h.counit.clone()).unwrap();
    }
    net.set_face(against, phi.clone()).unwrap();
    assert!(rel(hopf_trace(&net).unwrap(), rank2(&x, &phi)) < 1e-12);
    net.set_face(along, psi.clone()).unwrap();
    assert!(rel(hopf_trace(&net).unwrap(), parallel_glue(h, &x, &phi, &psi)) < 1e-12);
}

#[test]
fn trace_is_independent_of_evaluation_order() {
    let m = model("torus2x2:h8");
    let net = random_network(&m, 11);
    let base = hopf_trace(&net).unwrap();
    let mut rng = seeded(12);
    for k in 0..4 {
        let mut faces: Vec<usize> = (0..m.lattice.n_faces()).collect();
        faces.shuffle(&mut rng);
        let order = TraceOrder {
            faces,
            right_nested: k % 2 == 1,
        };
        let t = hopf_trace_ordered(&net, &order).unwrap();
        assert!(rel(base, t) < 1e-10, "{base} vs {t}");
    }
}

#[test]
fn trace_matches_counit_of_face_operators_on_product_state() {
    // ε on every physical leg of ∏_f B^{φ_f} |⊗ x_e⟩ evaluates the same network
    for name in ["sphere:h8", "wheel3:h8:K=z2z2", "wall:s3:wall=(012)"] {
        let m = model(name);
        let net = random_network(&m, 21);
        let mut psi = product_state(&net);
        for f in 0..m.lattice.n_faces() {
            let op = face_op(&m, net.starts[f], net.face_labels[f].as_ref().unwrap());
            psi = op.apply(&m.dims, &psi);
        }
        let mut eps = vec![ONE];
        for e in 0..m.lattice.n_edges() {
            let c = if m.is_defect_edge(e) {
                m.defect().unwrap().algebra.augmentation.clone().unwrap()
            } else {
                m.edge_region(e).unwrap().algebra.counit.clone()
            };
            eps = kron(&eps, &c);
        }
        let via_ops: C64 = eps.iter().zip(&psi).map(|(a, b)| a * b).sum();
        let t = hopf_trace(&net).unwrap();
        assert!(rel(t, via_ops) < 1e-9, "{name}: {t} vs {via_ops}");
    }
}

#[test]
fn missing_labels_are_reported() {
    let m = model("sphere:z2");
    let mut net = LabeledNetwork::haar(&m).unwrap();
    net.face_labels[2] = None;
    let err = hopf_trace(&net).unwrap_err().to_string();
    assert!(err.contains("incomplete network"), "{err}");
    net.edge_labels[0] = None;
    assert!(network_state(&net).is_err());
    assert!(net.set_edge(1, vec![ONE; 3]).is_err());
}

#[test]
fn haar_network_state_is_projected_haar_product() {
    for name in ["sphere:z2", "sphere:s3", "torus2x2:z2", "torus:s3", "disk:z2:K=full", "disk2x1:z2:K=trivial", "wheel3:h8:K=z2z2", "wall:s3:wall=(012)"] {
        let m = model(name);
        let net = LabeledNetwork::haar(&m).unwrap();
        let state = network_state(&net).unwrap();
        let projected = operators::ground_projector(&m).unwrap().apply(&product_state(&net));
        let ov = overlap(&state.amplitudes, &projected);
        assert!(ov > 1.0 - 1e-8, "{name}: overlap {ov}");
    }
}

#[test]
fn ground_states_satisfy_every_term() {
    for name in [
        "sphere:z2",
        "sphere:s3",
        "sphere:h8",
        "torus2x2:z2",
        "torus:s3",
        "disk:z2:K=full",
        "disk:z2:K=trivial",
        "disk:h8:K=z2z2",
        "wheel3:s3:K=(012)",
        "wheel3:s3:K=(12)",
        "wall:z2:wall=full",
        "wall:s3:wall=(012)",
        "wall:h8:wall=z2z2",
    ] {
        let m = model(name);
        let gs = ground_state(&m).unwrap();
        assert!((gs.norm() - 1.0).abs() < 1e-12);
        let res = ground_state_residuals(&m, &gs).unwrap();
        let worst = res.values().cloned().fold(0.0, f64::max);
        assert!(worst < 1e-9, "{name}: {res:?}");
    }
}

#[test]
fn bulk_sites_satisfy_the_eigen_equation() {
    let m = model("sphere:s3");
    let gs = ground_state(&m).unwrap();
    let h = &m.regions[0].algebra;
    let mut rng = seeded(5);
    for s in m.lattice.sites().into_iter().take(4) {
        let g = random_vector(&mut rng, 6);
        let phi = random_vector(&mut rng, 6);
        let a = vertex_operator(&m, s, &g).unwrap();
        let b = face_operator(&m, s, &phi).unwrap();
        let lhs = b.apply(&m.dims, &a.apply(&m.dims, &gs.amplitudes));
        let c = h.counit_of(&g) * hopf::pair(&phi, &h.one());
        let rhs: Vec<C64> = gs.amplitudes.iter().map(|z| z * c).collect();
        assert!(linalg::max_diff(&lhs, &rhs) < 1e-10);
    }
}

#[test]
fn gsd_small_models() {
    for (name, want) in [
        ("sphere:z2", 1),
        ("sphere:s3", 1),
        ("torus2x2:z2", 4),
        ("disk:z2:K=full", 1),
        ("disk:z2:K=trivial", 1),
        ("disk:h8:K=z2z2", 1),
        ("wheel3:s3:K=(012)", 1),
    ] {
        let m = model(name);
        let r = gsd(&m).unwrap();
        assert_eq!(r.gsd, want, "{name}: {r:?}");
        assert!((r.trace - want as f64).abs() < 1e-6);
    }
}

#[test]
fn gsd_s3_torus_is_eight() {
    let m = model("torus:s3");
    assert_eq!(m.total_dim(), Some(1296));
    let t = Instant::now();
    let r = gsd(&m).unwrap();
    assert_eq!(r.gsd, 8, "{r:?}");
    assert_eq!(r.method, "sweep");
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn gsd_by_range_agrees_with_sweep() {
    for name in ["torus2x2:z2", "disk:h8:K=z2z2"] {
        let m = model(name);
        let a = gsd_with(&m, 1 << 20, 1 << 20).unwrap();
        let b = gsd_with(&m, 0, 1 << 20).unwrap();
        assert_eq!((a.method.as_str(), b.method.as_str()), ("sweep", "range"));
        assert_eq!(a.gsd, b.gsd);
    }
    let m = model("sphere:h8");
    let r = gsd(&m).unwrap();
    assert_eq!((r.gsd, r.method.as_str()), (1, "range"));
}

#[test]
fn gsd_is_the_rank_of_the_dense_projector() {
    for name in ["torus2x2:z2", "disk:z2:K=trivial", "sphere:z2"] {
        let m = model(name);
        let p = operators::ground_projector(&m).unwrap().to_dense(4096).unwrap();
        assert_eq!(gsd(&m).unwrap().gsd, linalg::rank(&p, 1e-8), "{name}");
    }
}

#[test]
fn gsd_respects_the_budget() {
    let m = model("torus2x2:s3");
    assert!(matches!(gsd_with(&m, 16, 1024), Err(Error::TooLarge { .. })));
}

#[test]
fn pairwise_sum_is_chunking_independent() {
    let mut rng = seeded(9);
    let v = random_vector(&mut rng, 1000);
    let whole = pairwise_sum(&v);
    let halves = pairwise_sum(&v[..500]) + pairwise_sum(&v[500..]);
    assert_eq!(whole, halves);
}

#[test]
fn entropy_of_product_state_vanishes() {
    let m = model("torus2x2:z2");
    let net = random_network(&m, 4);
    let state = StateVector {
        model: m.name.clone(),
        dims: m.dims.clone(),
        amplitudes: product_state(&net),
    };
    for region in [vec![0], vec![1, 2], vec![0, 3, 5, 7]] {
        let s = entanglement_entropy(&m, &state, &region).unwrap();
        assert!(s.abs() < 1e-10, "{region:?}: {s}");
    }
}

#[test]
fn toric_code_entropy_is_bounded_and_symmetric() {
    let m = model("torus2x2:z2");
    let gs = ground_state(&m).unwrap();
    let region = vec![0, 1];
    let rest: Vec<usize> = (2..m.lattice.n_edges()).collect();
    let s = entanglement_entropy(&m, &gs, &region).unwrap();
    let t = entanglement_entropy(&m, &gs, &rest).unwrap();
    assert!(s >= 0.0 && s <= (4f64).ln() + 1e-12, "{s}");
    assert!((s - t).abs() < 1e-10);
    assert!(s > 1e-3);
}

#[test]
fn state_binary_round_trip() {
    let m = model("disk:z2:K=full");
    let gs = ground_state(&m).unwrap();
    let header = gs.header();
    assert_eq!(header.model_hash.len(), 64);
    let json = serde_json::to_string(&header).unwrap();
    let back: StateHeader = serde_json::from_str(&json).unwrap();
    let restored = StateVector::from_bytes(&back, &gs.to_bytes()).unwrap();
    assert_eq!(restored, gs);
    assert!(StateVector::from_bytes(&back, &gs.to_bytes()[1..]).is_err());
}
