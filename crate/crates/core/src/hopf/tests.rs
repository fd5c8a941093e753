use super::*;
use crate::linalg::{r, ONE, ZERO};
use crate::zoo::{builtin, function_algebra, group_algebra, GroupTable};

fn all_builtins() -> Vec<FinHopfAlgebra> {
    ["z2", "z4", "z2z2", "s3", "fun:s3", "h8"]
        .iter()
        .map(|n| builtin(n).unwrap())
        .collect()
}

#[test]
fn builtins_pass_axioms() {
    for a in all_builtins() {
        let rep = verify_hopf_axioms(&a, 1e-12).unwrap();
        assert!(rep.pass(), "{}: {:?}", a.name, rep.checks);
    }
}

#[test]
fn group_algebra_axioms_are_exact() {
    let a = builtin("s3").unwrap();
    let rep = verify_hopf_axioms(&a, 0.0).unwrap();
    assert_eq!(rep.max_residual(), 0.0);
}

#[test]
fn corrupted_multiplication_fails() {
    // Any change to x·x alone leaves C[x]/(x² − bx − a), which is still associative;
    // the corruption shows up in the bialgebra and antipode laws instead.
    let mut a = builtin("z2").unwrap();
    a.mult.add(1, 1, 1, r(0.3));
    let rep = verify_hopf_axioms(&a, 1e-10).unwrap();
    assert!(!rep.pass());
    assert!(rep.residual("bialgebra").unwrap() > 1e-10);
    assert!(rep.residual("antipode").unwrap() > 1e-10);
}

#[test]
fn corrupted_mixed_product_fails_associativity() {
    let mut a = builtin("z2z2").unwrap();
    a.mult.add(1, 2, 1, r(0.3));
    let rep = verify_hopf_axioms(&a, 1e-10).unwrap();
    assert!(rep.residual("associativity").unwrap() > 1e-10);
}

#[test]
fn nan_is_invalid_input() {
    let mut a = builtin("z2").unwrap();
    a.mult.add(0, 0, 1, C64::new(f64::NAN, 0.0));
    assert!(matches!(verify_hopf_axioms(&a, 1e-10), Err(Error::InvalidInput(_))));
}

#[test]
fn parent_mismatch_is_reported() {
    let a = builtin("z2").unwrap();
    let b = builtin("z4").unwrap();
    let x = b.element(b.basis(1)).unwrap();
    let y = a.element(a.basis(1)).unwrap();
    assert!(matches!(a.multiply(&x, &y), Err(Error::ParentMismatch { .. })));
    assert!(a.element(vec![ONE; 3]).is_err());
}

#[test]
fn haar_of_z2() {
    let a = builtin("z2").unwrap();
    let h = haar_integral(&a).unwrap();
    assert!(max_diff(&h, &[r(0.5), r(0.5)]) < 1e-12);
}

#[test]
fn haar_properties_hold_for_builtins_and_duals() {
    for a in all_builtins() {
        for alg in [a.clone(), dual(&a)] {
            let h = haar_integral(&alg).unwrap();
            for c in haar_properties(&alg, &h, 1e-10) {
                assert!(c.pass, "{} {} {}", alg.name, c.name, c.residual);
            }
        }
    }
}

#[test]
fn h8_haar_absorbs_z() {
    let a = builtin("h8").unwrap();
    let h = haar_integral(&a).unwrap();
    assert!(max_diff(&a.mul(&a.basis(4), &h), &h) < 1e-10);
}

#[test]
fn dual_of_group_algebra_is_function_algebra() {
    let g = GroupTable::symmetric3();
    let d = dual(&group_algebra(&g, "s3"));
    let f = function_algebra(&g, "fun:s3");
    assert_eq!(d.mult.to_dense(), f.mult.to_dense());
    assert_eq!(d.comult.to_dense(), f.comult.to_dense());
    assert_eq!(d.unit, f.unit);
    assert_eq!(d.counit, f.counit);
    assert_eq!(d.antipode, f.antipode);
    assert_eq!(d.star, f.star);
}

#[test]
fn double_dual_is_exact() {
    for a in all_builtins() {
        let dd = dual(&dual(&a));
        assert_eq!(dd.mult.to_dense(), a.mult.to_dense());
        assert_eq!(dd.comult.to_dense(), a.comult.to_dense());
        assert_eq!(dd.unit, a.unit);
        assert_eq!(dd.counit, a.counit);
        assert_eq!(dd.antipode, a.antipode);
        assert_eq!(dd.star, a.star);
    }
}

#[test]
fn dual_counit_is_evaluation_at_one() {
    let a = builtin("h8").unwrap();
    let d = dual(&a);
    let mut rng = linalg::seeded(3);
    let phi = linalg::random_vector(&mut rng, 8);
    assert!((d.counit_of(&phi) - pair(&phi, &a.unit)).norm() < 1e-14);
}

#[test]
fn canonical_pairing_satisfies_axioms() {
    let a = builtin("h8").unwrap();
    let p = Pairing::canonical(&a);
    assert!(p.residual(&dual(&a), &a) < 1e-12);
}

#[test]
fn op_cop_and_tensor() {
    let z2 = builtin("z2").unwrap();
    assert_eq!(opposite(&z2).mult.to_dense(), z2.mult.to_dense());
    let f = function_algebra(&GroupTable::cyclic(2), "fun:z2");
    assert_eq!(coopposite(&f).comult.to_dense(), f.comult.to_dense());
    let t = tensor_product(&z2, &z2);
    let k = builtin("z2z2").unwrap();
    assert_eq!(t.dim(), 4);
    // basis (a⊗b) ↦ 2a+b matches XOR indexing of the Klein group
    assert_eq!(t.mult.to_dense(), k.mult.to_dense());
    assert_eq!(t.comult.to_dense(), k.comult.to_dense());
    for a in all_builtins() {
        for alg in [opposite(&a), coopposite(&a)] {
            assert!(verify_hopf_axioms(&alg, 1e-10).unwrap().pass(), "{}", alg.name);
        }
    }
    let h8 = builtin("h8").unwrap();
    assert!(verify_hopf_axioms(&tensor_product(&h8, &z2), 1e-10).unwrap().pass());
}

#[test]
fn doubles_pass_axioms() {
    for n in ["z2", "s3", "h8"] {
        let d = drinfeld_double(&builtin(n).unwrap()).unwrap();
        let rep = verify_hopf_axioms(&d, 1e-10).unwrap();
        assert!(rep.pass(), "{n}: {:?}", rep.checks);
    }
}

#[test]
fn double_embeddings_are_hopf_maps() {
    let a = builtin("h8").unwrap();
    let hat = dual(&a);
    let dh = drinfeld_double(&a).unwrap();
    let hatcop = coopposite(&hat);
    let d = a.dim();
    for i in 0..d {
        for j in 0..d {
            let lhs = dh.mul(&double_embed_h(&a, &a.basis(i)), &double_embed_h(&a, &a.basis(j)));
            let rhs = double_embed_h(&a, &a.mul(&a.basis(i), &a.basis(j)));
            assert!(max_diff(&lhs, &rhs) < 1e-12);
            let lhs = dh.mul(&double_embed_hat(&a, &hat.basis(i)), &double_embed_hat(&a, &hat.basis(j)));
            let rhs = double_embed_hat(&a, &hat.mul(&hat.basis(i), &hat.basis(j)));
            assert!(max_diff(&lhs, &rhs) < 1e-12);
        }
        // comultiplication: Δ_D(1̂⊗x) = (1̂⊗x⁽¹⁾)⊗(1̂⊗x⁽²⁾), Δ_D(φ⊗1) = Δ^cop(φ) embedded
        let n = d * d;
        let cd = dh.comul(&double_embed_h(&a, &a.basis(i)));
        let ch = a.comul(&a.basis(i));
        let mut expect = vec![ZERO; n * n];
        for p in 0..d {
            for q in 0..d {
                let u = double_embed_h(&a, &a.basis(p));
                let v = double_embed_h(&a, &a.basis(q));
                for s in 0..n {
                    for t in 0..n {
                        expect[s * n + t] += ch[p * d + q] * u[s] * v[t];
                    }
                }
            }
        }
        assert!(max_diff(&cd, &expect) < 1e-12);
        let cd = dh.comul(&double_embed_hat(&a, &hat.basis(i)));
        let ch = hatcop.comul(&hat.basis(i));
        let mut expect = vec![ZERO; n * n];
        for p in 0..d {
            for q in 0..d {
                let u = double_embed_hat(&a, &hat.basis(p));
                let v = double_embed_hat(&a, &hat.basis(q));
                for s in 0..n {
                    for t in 0..n {
                        expect[s * n + t] += ch[p * d + q] * u[s] * v[t];
                    }
                }
            }
        }
        assert!(max_diff(&cd, &expect) < 1e-12);
    }
}

#[test]
fn straightening_formula() {
    let a = builtin("h8").unwrap();
    let hat = dual(&a);
    let dh = drinfeld_double(&a).unwrap();
    let d = a.dim();
    for xi in 0..d {
        let x = a.basis(xi);
        for pi in 0..d {
            let phi = hat.basis(pi);
            let lhs = dh.mul(&double_embed_h(&a, &x), &double_embed_hat(&a, &phi));
            let mut rhs = vec![ZERO; d * d];
            for (legs, w) in a.sweedler(&x, 3) {
                let f = sandwich(&a, &phi, &a.s_inv(&a.basis(legs[2])), &a.basis(legs[0]));
                let term = double_elem(&f, &a.basis(legs[1]));
                linalg::axpy(w, &term, &mut rhs);
            }
            assert!(max_diff(&lhs, &rhs) < 1e-12);
        }
    }
}

#[test]
fn iterated_coproduct_nesting_is_immaterial() {
    let a = builtin("h8").unwrap();
    let mut rng = linalg::seeded(11);
    let x = linalg::random_vector(&mut rng, 8);
    for n in 2..5 {
        let l = a.sweedler(&x, n);
        let rr = a.sweedler_right_nested(&x, n);
        assert!(super::sweedler_diff(&l, &rr) < 1e-12);
    }
}

#[test]
fn inner_product_normalization() {
    let a = builtin("s3").unwrap();
    let g = gram_matrix(&a).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            // φ_Ĥ = δ_e, so ⟨g,h⟩ = δ_e(g⁻¹h)
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((g[(i, j)] - r(expect)).norm() < 1e-12);
        }
    }
    let one = inner_product(&a, &a.unit, &a.unit).unwrap();
    assert!(one.re > 0.0 && one.im.abs() < 1e-14);
}

#[test]
fn h8_gram_positive() {
    let a = builtin("h8").unwrap();
    let g = gram_matrix(&a).unwrap();
    let (vals, _) = linalg::herm_eigen(&g);
    assert!(vals[0] > 0.0);
}

#[test]
fn bad_star_rejected() {
    let mut a = builtin("z2").unwrap();
    a.star = -DMatrix::<C64>::identity(2, 2);
    assert!(matches!(gram_matrix(&a), Err(Error::InvalidStar(_))));
}

#[test]
fn wedderburn_block_dims() {
    let cases = [("z2", vec![1, 1]), ("s3", vec![1, 1, 2]), ("h8", vec![1, 1, 1, 1, 2])];
    for (n, expect) in cases {
        let a = builtin(n).unwrap();
        let dec = artin_wedderburn(&a, 7).unwrap();
        let mut dims = dec.block_dims.clone();
        dims.sort();
        assert_eq!(dims, expect, "{n}");
        assert_eq!(dims.iter().map(|x| x * x).sum::<usize>(), a.dim());
        assert!(wedderburn::block_residual(&a, &dec) < 1e-8);
    }
}

#[test]
fn wedderburn_reassembles_regular_representation() {
    let a = builtin("h8").unwrap();
    let dec = artin_wedderburn(&a, 5).unwrap();
    let p = &dec.change_of_basis;
    let pinv = p.clone().try_inverse().unwrap();
    for i in 0..a.dim() {
        let l = a.left_matrix(&a.basis(i));
        let block = &pinv * &l * p;
        let back = p * block * &pinv;
        assert!(linalg::mat_max_abs(&(back - l)) < 1e-8);
    }
    // irreps are representations
    for nu in 0..dec.block_dims.len() {
        for i in 0..8 {
            for j in 0..8 {
                let lhs = dec.irrep_of(nu, &a.mul(&a.basis(i), &a.basis(j)));
                let rhs = &dec.irreps[nu][i] * &dec.irreps[nu][j];
                assert!(linalg::mat_max_abs(&(lhs - rhs)) < 1e-9);
            }
        }
    }
}

#[test]
fn fusion_basis_is_orthogonal_and_complete() {
    for n in ["s3", "h8"] {
        let a = builtin(n).unwrap();
        let dec = artin_wedderburn(&a, 9).unwrap();
        let h = haar_integral(&a).unwrap();
        let fb = fusion_basis(&a, &dec, &h);
        let g = gram_matrix(&a).unwrap();
        let m = fb.adjoint() * g * &fb;
        let scale = m[(0, 0)];
        assert!(scale.norm() > 1e-12);
        let resid = linalg::mat_max_abs(&(m.clone() / scale - DMatrix::identity(a.dim(), a.dim())));
        assert!(resid < 1e-8, "{n}: {resid}");
    }
}

#[test]
fn double_irreps() {
    let dz2 = drinfeld_double(&builtin("z2").unwrap()).unwrap();
    assert_eq!(artin_wedderburn(&dz2, 1).unwrap().block_dims, vec![1, 1, 1, 1]);
    let ds3 = drinfeld_double(&builtin("s3").unwrap()).unwrap();
    let dec = artin_wedderburn(&ds3, 1).unwrap();
    assert_eq!(dec.block_dims.len(), 8);
    assert_eq!(dec.block_dims.iter().map(|x| x * x).sum::<usize>(), 36);
}

#[test]
fn algebra_files_round_trip_exactly() {
    let mut all = all_builtins();
    all.push(builtin("dual:h8").unwrap());
    all.push(builtin("double:z2").unwrap());
    for a in all {
        let json = a.to_json().unwrap();
        let back = FinHopfAlgebra::from_json(&json).unwrap();
        assert_eq!(back.to_file(), a.to_file(), "{}", a.name);
        assert_eq!(back.to_json().unwrap(), json);
        assert_eq!(back.mult.to_dense(), a.mult.to_dense());
        assert_eq!(back.comult.to_dense(), a.comult.to_dense());
        assert_eq!(back.antipode, a.antipode);
        assert_eq!(back.star, a.star);
    }
}

#[test]
fn malformed_algebra_files_are_rejected() {
    let mut f = builtin("z2").unwrap().to_file();
    f.mult.push((0, 0, 5, 1.0, 0.0));
    assert!(FinHopfAlgebra::from_file(&f).is_err());
    let mut f = builtin("z2").unwrap().to_file();
    f.antipode.pop();
    assert!(FinHopfAlgebra::from_file(&f).is_err());
    assert!(FinHopfAlgebra::from_json("{\"dim\": 2}").is_err());
}
