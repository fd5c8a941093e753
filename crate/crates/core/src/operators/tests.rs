use super::*;
use crate::hopf::{drinfeld_double, FinHopfAlgebra};
use crate::lattice::{self, Tag};
use crate::linalg::{kron, mat_max_abs, max_diff, r, random_vector, seeded};
use crate::zoo::builtin;

fn model(s: &str) -> Model {
    Model::from_ref(s).unwrap()
}

fn dense(op: &LatticeOperator) -> DMatrix<C64> {
    op.to_local_dense()
}

#[test]
fn group_algebra_edge_actions() {
    let m = model("torus2x2:s3");
    let h = &m.regions[0].algebra;
    let d = h.dim();
    for g in 0..d {
        let mut delta = vec![ZERO; d];
        delta[g] = ONE;
        let t = edge_matrix(&m.regions[0], EdgeKind::TPlus, &delta).unwrap();
        let mut want = DMatrix::zeros(d, d);
        want[(g, g)] = ONE;
        assert!(mat_max_abs(&(t - want)) < 1e-14);
    }
    // T₊^ε = id for every algebra
    for name in ["s3", "h8"] {
        let reg = Region::new(&builtin(name).unwrap()).unwrap();
        let eps = reg.algebra.counit.clone();
        let t = edge_matrix(&reg, EdgeKind::TPlus, &eps).unwrap();
        assert!(mat_max_abs(&(t - DMatrix::identity(reg.dim(), reg.dim()))) < 1e-13);
    }
}

#[test]
fn lminus_is_conjugated_lplus() {
    let mut rng = seeded(11);
    for name in ["s3", "h8"] {
        let reg = Region::new(&builtin(name).unwrap()).unwrap();
        let h = random_vector(&mut rng, reg.dim());
        let lp = edge_matrix(&reg, EdgeKind::LPlus, &h).unwrap();
        let lm = edge_matrix(&reg, EdgeKind::LMinus, &h).unwrap();
        let s = reg.algebra.antipode.clone();
        let sinv = reg.algebra.antipode_inv().clone();
        assert!(mat_max_abs(&(lm - &s * lp * sinv)) < 1e-12, "{name}");
    }
}

#[test]
fn edge_actions_are_representations() {
    // L± and T± are algebra maps; the tilded ones are anti-algebra maps
    let mut rng = seeded(12);
    let reg = Region::new(&builtin("h8").unwrap()).unwrap();
    let (a, b) = (random_vector(&mut rng, 8), random_vector(&mut rng, 8));
    for kind in EdgeKind::ALL {
        let alg = if kind.takes_dual_label() { &reg.hat } else { &reg.algebra };
        let ab = alg.mul(&a, &b);
        let ma = edge_matrix(&reg, kind, &a).unwrap();
        let mb = edge_matrix(&reg, kind, &b).unwrap();
        let mab = edge_matrix(&reg, kind, &ab).unwrap();
        let hom = mat_max_abs(&(&mab - &ma * &mb));
        let anti = mat_max_abs(&(&mab - &mb * &ma));
        let is_hom = matches!(kind, EdgeKind::LPlus | EdgeKind::LMinus | EdgeKind::TPlus | EdgeKind::TMinus);
        if is_hom {
            assert!(hom < 1e-12, "{kind:?} {hom}");
        } else {
            assert!(anti < 1e-12, "{kind:?} {anti}");
        }
    }
}

#[test]
fn edge_action_rejects_wrong_algebra() {
    let m = model("torus2x2:z2");
    assert!(matches!(
        edge_action(&m, EdgeKind::LPlus, &[ONE; 3], 0),
        Err(Error::ParentMismatch { .. })
    ));
    let d = model("disk:z2:K=full");
    assert!(edge_action(&d, EdgeKind::LPlus, &[ONE, ZERO], 0).is_err());
}

#[test]
fn toric_code_vertex_term() {
    let m = model("torus2x2:z2");
    let s = m.lattice.vertex_site(0).unwrap();
    let a = vertex_operator(&m, s, &m.regions[0].haar).unwrap();
    let x = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let xxxx = kron(&kron(&x, &x), &kron(&x, &x));
    let want = (DMatrix::identity(16, 16) + xxxx) * r(0.5);
    assert!(mat_max_abs(&(dense(&a) - want)) < 1e-14);
    let b = face_operator(&m, m.lattice.face_start(0), &m.regions[0].dual_haar).unwrap();
    // B_f = ½(1 + ZZZZ) is diagonal with entries 0 or 1
    let db = dense(&b);
    for i in 0..16 {
        let parity = (i as u32).count_ones() % 2;
        assert!((db[(i, i)] - r(if parity == 0 { 1.0 } else { 0.0 })).norm() < 1e-14);
    }
}

#[test]
fn bulk_terms_are_commuting_projectors() {
    for name in ["torus2x2:z2", "torus:s3", "sphere:s3", "sphere:h8", "torus:h8"] {
        let m = model(name);
        let terms = hamiltonian(&m, 1e-9).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(terms.len(), m.lattice.n_vertices + m.lattice.n_faces());
    }
    assert_eq!(hamiltonian_terms(&model("torus2x2:z2")).unwrap().len(), 8);
}

#[test]
fn s3_vertex_and_face_commute_on_torus2x2() {
    let m = model("torus2x2:s3");
    let r0 = &m.regions[0];
    for v in 0..4 {
        let a = vertex_operator(&m, m.lattice.vertex_site(v).unwrap(), &r0.haar).unwrap();
        for f in 0..4 {
            let b = face_operator(&m, m.lattice.face_start(f), &r0.dual_haar).unwrap();
            assert!(commutator_norm(&a, &b).unwrap() < 1e-10);
        }
    }
}

#[test]
fn bulk_constructors_reject_boundary_sites() {
    let m = model("disk:z2:K=full");
    let s = m.lattice.face_start(0);
    assert!(vertex_operator(&m, s, &[ONE, ZERO]).is_err());
    assert!(face_operator(&m, s, &[ONE, ZERO]).is_err());
}

fn random_double_check(name: &str, pairs: usize) {
    let m = model(name);
    let h = &m.regions[0].algebra;
    let dh = drinfeld_double(h).unwrap();
    let s = m.lattice.vertex_site(0).unwrap();
    let mut rng = seeded(21);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = random_vector(&mut rng, dh.dim());
        let y = random_vector(&mut rng, dh.dim());
        let lhs = site_double_rep(&m, s, &x).unwrap().compose(&site_double_rep(&m, s, &y).unwrap()).unwrap();
        let rhs = site_double_rep(&m, s, &dh.mul(&x, &y)).unwrap();
        worst = worst.max(lhs.max_diff(&rhs).unwrap());
    }
    assert!(worst < 1e-9, "{name}: {worst}");
}

#[test]
fn site_operators_represent_the_double() {
    random_double_check("torus:s3", 3);
    random_double_check("sphere:h8", 2);
}

#[test]
fn site_relation_for_random_labels() {
    // A^h B^φ = Σ B^{φ(S⁻¹(h⁽³⁾)•h⁽¹⁾)} A^{h⁽²⁾}
    let m = model("torus:h8");
    let reg = &m.regions[0];
    let h = &reg.algebra;
    let s = m.lattice.vertex_site(1).unwrap();
    let mut rng = seeded(5);
    let x = random_vector(&mut rng, 8);
    let phi = random_vector(&mut rng, 8);
    let lhs = vertex_operator(&m, s, &x).unwrap().compose(&face_operator(&m, s, &phi).unwrap()).unwrap();
    // group the Sweedler terms by the middle leg so each A^{e_g} is composed once
    let mut by_mid = vec![vec![ZERO; 8]; 8];
    for (legs, c) in h.sweedler(&x, 3) {
        let f = hopf::sandwich(h, &phi, &h.s_inv(&h.basis(legs[2])), &h.basis(legs[0]));
        for (acc, z) in by_mid[legs[1]].iter_mut().zip(&f) {
            *acc += z * c;
        }
    }
    let mut rhs: Option<LatticeOperator> = None;
    for (g, f) in by_mid.iter().enumerate() {
        let t = face_operator(&m, s, f).unwrap().compose(&vertex_operator(&m, s, &h.basis(g)).unwrap()).unwrap();
        rhs = Some(match rhs {
            None => t,
            Some(a) => a.add(&t).unwrap(),
        });
    }
    assert!(lhs.max_diff(&rhs.unwrap()).unwrap() < 1e-10);
}

#[test]
fn support_correctness_on_random_vectors() {
    let m = model("torus2x2:z2");
    let s = m.lattice.vertex_site(2).unwrap();
    let a = vertex_operator(&m, s, &m.regions[0].haar).unwrap();
    let mut rng = seeded(9);
    let psi = random_vector(&mut rng, 256);
    let out = a.apply(&m.dims, &psi);
    let full = a.to_dense(&m.dims, 8192).unwrap();
    assert!(max_diff(&out, &crate::linalg::mat_vec(&full, &psi)) < 1e-12);
    // the identity on the complement: A commutes with any operator away from its support
    let away: Vec<usize> = (0..8).filter(|e| !a.support.contains(e)).collect();
    let flip = edge_action(&m, EdgeKind::TPlus, &[ONE, ZERO], away[0]).unwrap();
    assert_eq!(commutator_norm(&a, &flip).unwrap(), 0.0);
}

/// Independent evaluation of the four boundary pictures on basis states.
fn boundary_oracle(m: &Model, cfg: &DefectVertex, a: usize, b: usize) -> DMatrix<C64> {
    let d = m.defect().unwrap();
    let alg = &d.algebra.algebra;
    let h: &FinHopfAlgebra = &m.regions[0].algebra;
    let n = alg.dim();
    let hd = h.dim();
    let hdart = cfg.right.unwrap();
    let incoming = !hdart.forward;
    let mut out = DMatrix::zeros(n * n * hd, n * n * hd);
    let co = |i: usize| -> Vec<(usize, usize, C64)> {
        d.algebra.coaction[i].iter().map(|&(_, j, p, v)| (j, p, v)).collect()
    };
    for xi in 0..n {
        for yi in 0..n {
            for hi in 0..hd {
                let col = (xi * n + yi) * hd + hi;
                let mut acc = vec![ZERO; n * n * hd];
                let push = |acc: &mut Vec<C64>, xv: &[C64], yv: &[C64], hv: &[C64], w: C64| {
                    for (p, xp) in xv.iter().enumerate() {
                        for (q, yq) in yv.iter().enumerate() {
                            for (t, ht) in hv.iter().enumerate() {
                                acc[(p * n + q) * hd + t] += w * xp * yq * ht;
                            }
                        }
                    }
                };
                if cfg.below {
                    let xv = alg.mul(&alg.basis(a), &alg.basis(xi));
                    for (b0, b1, w) in co(b) {
                        let yv = alg.mul(&alg.basis(yi), &alg.basis(b0));
                        let hv = if incoming {
                            h.mul(&h.s(&h.basis(b1)), &h.basis(hi))
                        } else {
                            h.mul(&h.basis(hi), &h.basis(b1))
                        };
                        push(&mut acc, &xv, &yv, &hv, w);
                    }
                } else {
                    let yv = alg.mul(&alg.basis(yi), &alg.basis(b));
                    for (a0, a1, w) in co(a) {
                        let xv = alg.mul(&alg.basis(a0), &alg.basis(xi));
                        let hv = if incoming {
                            h.mul(&h.basis(a1), &h.basis(hi))
                        } else {
                            h.mul(&h.basis(hi), &h.s(&h.basis(a1)))
                        };
                        push(&mut acc, &xv, &yv, &hv, w);
                    }
                }
                for (row, v) in acc.into_iter().enumerate() {
                    out[(row, col)] = v;
                }
            }
        }
    }
    out
}

#[test]
fn boundary_pictures_match_oracle() {
    // disk2x2 has boundary vertices with incoming and outgoing bulk edges
    let mut seen = std::collections::BTreeSet::new();
    for name in ["disk2x2:s3:K=(12)", "disk2x2:h8:K=z2z2"] {
        let m = model(name);
        let n = m.defect().unwrap().dim();
        for s in m.lattice.sites() {
            if m.lattice.vertex_region(s.vertex).is_some() {
                continue;
            }
            let cfg = defect_vertex_config(&m, s).unwrap();
            if cfg.right.is_none() {
                continue;
            }
            seen.insert(cfg.picture());
            for (a, b) in [(0, 0), (1, n - 1), (n - 1, 1)] {
                let mut ab = vec![ZERO; n * n];
                ab[a * n + b] = ONE;
                let op = defect_vertex_operator(&m, s, &ab).unwrap();
                let want = boundary_oracle(&m, &cfg, a, b);
                assert!(mat_max_abs(&(dense(&op) - want)) < 1e-12, "{name} {}", cfg.picture());
            }
        }
    }
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec!["A1", "A2", "A3", "A4"]);
}

#[test]
fn boundary_unit_and_counit_labels_are_identity() {
    let m = model("disk:h8:K=z2z2");
    let n = m.defect().unwrap().dim();
    let mut one = vec![ZERO; n * n];
    one[0] = ONE;
    for s in m.lattice.sites() {
        let op = boundary_vertex_operator(&m, s, &one).unwrap();
        let id = LatticeOperator::identity(op.support.clone(), op.dims.clone());
        assert!(op.max_diff(&id).unwrap() < 1e-13);
    }
    let s = m.lattice.face_start(0);
    // ε̂ is the unit of Ĥ, i.e. the counit of H as a functional
    let b = boundary_face_operator(&m, s, &m.regions[0].algebra.counit).unwrap();
    let id = LatticeOperator::identity(b.support.clone(), b.dims.clone());
    assert!(b.max_diff(&id).unwrap() < 1e-13);
}

#[test]
fn boundary_models_are_commuting_projectors() {
    for name in [
        "disk:z2:K=full",
        "disk:z2:K=trivial",
        "disk2x1:z2:K=full",
        "disk2x2:z2:K=full",
        "disk2x2:s3:K=(12)",
        "disk:h8:K=z2z2",
        "wheel3:h8:K=z2z2",
        "wheel3:h8:K=full",
        "disk2x1:h8:K=trivial",
    ] {
        let m = model(name);
        hamiltonian(&m, 1e-9).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn rough_boundary_vertex_terms_are_identity() {
    let m = model("disk2x1:z2:K=trivial");
    let terms = hamiltonian_terms(&m).unwrap();
    let mut count = 0;
    for t in terms.iter().filter(|t| t.kind == TermKind::BoundaryVertex) {
        let id = LatticeOperator::identity(t.op.support.clone(), t.op.dims.clone());
        assert!(t.op.max_diff(&id).unwrap() < 1e-13, "{}", t.label);
        count += 1;
    }
    assert!(count > 0);
}

#[test]
fn general_comodule_boundary_terms() {
    // M₂(C) with the trivial coaction: not a Hopf subalgebra, no augmentation
    let h = builtin("z2").unwrap();
    let lat = lattice::disk_square(1, 1).unwrap();
    let a = matrix_boundary(&h);
    let m = Model::new(
        lat,
        &h,
        None,
        Some(DefectInput::Boundary {
            comodule: a,
            subalgebra: None,
        }),
    )
    .unwrap();
    hamiltonian(&m, 1e-9).unwrap();
    assert!(m.defect().unwrap().ground_label().is_err());
}

#[test]
fn crossed_product_is_represented() {
    for name in ["disk:z2:K=full", "disk:h8:K=z2z2", "disk2x2:s3:K=(12)"] {
        let m = model(name);
        let def = m.defect().unwrap();
        let d = m.regions[0].dim();
        let dim = def.dim() * def.dim() * d;
        let mut rng = seeded(31);
        let s = m
            .lattice
            .sites()
            .into_iter()
            .find(|s| defect_vertex_config(&m, *s).is_ok())
            .unwrap();
        for _ in 0..2 {
            let x = random_vector(&mut rng, dim);
            let y = random_vector(&mut rng, dim);
            let lhs = boundary_site_rep(&m, s, &x).unwrap().compose(&boundary_site_rep(&m, s, &y).unwrap()).unwrap();
            let rhs = boundary_site_rep(&m, s, &crossed_product_mul(&m, &x, &y).unwrap()).unwrap();
            let err = lhs.max_diff(&rhs).unwrap();
            assert!(err < 1e-9, "{name}: {err}");
        }
    }
}

#[test]
fn wall_models_are_commuting_projectors() {
    for name in ["wall:z2:wall=full", "wall:z2:wall=trivial", "wall:s3:wall=full", "wall:s3:wall=(012)", "wall:h8:wall=z2z2"] {
        let m = model(name);
        let terms = hamiltonian(&m, 1e-9).unwrap_or_else(|e| panic!("{name}: {e}"));
        let pics: std::collections::BTreeSet<String> = terms
            .iter()
            .filter(|t| t.kind == TermKind::WallVertex)
            .map(|t| t.label.split(':').nth(1).unwrap().to_string())
            .collect();
        assert!(pics.iter().all(|p| p.starts_with('D')), "{name}: {pics:?}");
    }
}

#[test]
fn wall_with_trivial_left_bulk_reduces_to_boundary() {
    // H₁ = C: the wall operators carry the boundary formulas with the left leg counited
    let h = builtin("s3").unwrap();
    let triv = builtin("trivial").unwrap();
    let k = subalgebra_ref(&h, "(12)").unwrap();
    let comod = crate::comodule::comodule_from_hopf_subalgebra(&h, &k, crate::comodule::Side::Right);
    let bic = boundary_as_bicomodule(&comod).unwrap();
    let lat = lattice::wall_strip(1, 2).unwrap();
    let m = Model::new(
        lat,
        &triv,
        Some(&h),
        Some(DefectInput::Wall {
            bicomodule: bic,
            subalgebra: None,
        }),
    )
    .unwrap();
    hamiltonian(&m, 1e-9).unwrap();
    let n = m.defect().unwrap().dim();
    for s in m.lattice.sites() {
        let cfg = defect_vertex_config(&m, s).unwrap();
        for (a, b) in [(0, 1), (1, 0), (1, 1)] {
            let mut ab = vec![ZERO; n * n];
            ab[a * n + b] = ONE;
            let op = wall_vertex_operator(&m, s, &ab).unwrap();
            // the left bulk edge is one-dimensional, so the local matrices agree directly
            assert!(op.support.iter().any(|&e| m.edge_tag(e) == Tag::Bulk1 && m.dims[e] == 1) || cfg.left.is_none());
            let mut r_model = m.clone();
            r_model.regions[0] = m.regions[1].clone();
            let oracle_cfg = DefectVertex { left: None, ..cfg };
            let want = boundary_oracle(&r_model, &oracle_cfg, a, b);
            let got = dense(&op);
            assert!(mat_max_abs(&(got - want)) < 1e-12);
        }
    }
}

#[test]
fn ground_projector_is_idempotent() {
    let m = model("torus2x2:z2");
    let p = ground_projector(&m).unwrap().to_dense(8192).unwrap();
    assert!(mat_max_abs(&(&p * &p - &p)) < 1e-12);
    let tr: C64 = p.trace();
    assert!((tr - r(4.0)).norm() < 1e-9);
}

#[test]
fn dense_export_is_row_major() {
    let m = DMatrix::from_row_slice(2, 2, &[ONE, r(2.0), r(3.0), C64::new(0.0, 4.0)]);
    let e = export_dense(&m);
    assert_eq!(e[1], [2.0, 0.0]);
    assert_eq!(e[3], [0.0, 4.0]);
}
