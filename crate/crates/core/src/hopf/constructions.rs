use super::{FinHopfAlgebra, StructTensor};
use crate::error::Result;
use crate::linalg::{C64, ZERO};
use nalgebra::DMatrix;

/// Dual Hopf algebra on the dual basis {eⁱ}: products transpose coproducts and vice versa.
/// The star is fixed by ⟨φ*, x⟩ = conj(φ(S(x)*)).
pub fn dual(a: &FinHopfAlgebra) -> FinHopfAlgebra {
    let d = a.dim();
    let mut mult = StructTensor::zeros([d, d, d]);
    for (i, j, k, v) in a.comult.triples() {
        mult.add(j, k, i, v);
    }
    let mut comult = StructTensor::zeros([d, d, d]);
    for (j, k, i, v) in a.mult.triples() {
        comult.add(i, j, k, v);
    }
    let antipode = a.antipode.transpose();
    let star = (a.star.map(|z| z.conj()) * &a.antipode).transpose();
    let labels = a.basis_labels.iter().map(|l| dual_label(l)).collect();
    FinHopfAlgebra::new(
        dual_name(&a.name),
        labels,
        mult,
        a.counit.clone(),
        comult,
        a.unit.clone(),
        antipode,
        star,
    )
    .expect("dual of a valid algebra")
}

fn dual_name(n: &str) -> String {
    match n.strip_prefix("dual:") {
        Some(inner) => inner.to_string(),
        None => format!("dual:{n}"),
    }
}

fn dual_label(l: &str) -> String {
    match l.strip_prefix('δ') {
        Some(inner) => inner.trim_start_matches('_').to_string(),
        None => format!("δ_{l}"),
    }
}

pub fn opposite(a: &FinHopfAlgebra) -> FinHopfAlgebra {
    FinHopfAlgebra::new(
        format!("{}^op", a.name),
        a.basis_labels.clone(),
        a.mult.swap01(),
        a.unit.clone(),
        a.comult.clone(),
        a.counit.clone(),
        a.antipode_inv().clone(),
        a.star.clone(),
    )
    .expect("opposite of a valid algebra")
}

pub fn coopposite(a: &FinHopfAlgebra) -> FinHopfAlgebra {
    FinHopfAlgebra::new(
        format!("{}^cop", a.name),
        a.basis_labels.clone(),
        a.mult.clone(),
        a.unit.clone(),
        a.comult.swap12(),
        a.counit.clone(),
        a.antipode_inv().clone(),
        a.star.clone(),
    )
    .expect("coopposite of a valid algebra")
}

/// A⊗B on the row-major basis (aᵢ⊗bⱼ) ↦ i·dim B + j.
pub fn tensor_product(a: &FinHopfAlgebra, b: &FinHopfAlgebra) -> FinHopfAlgebra {
    let (da, db) = (a.dim(), b.dim());
    let n = da * db;
    let idx = |i: usize, j: usize| i * db + j;
    let mut mult = StructTensor::zeros([n, n, n]);
    let mut comult = StructTensor::zeros([n, n, n]);
    let at = a.mult.triples();
    let bt = b.mult.triples();
    for &(i, j, k, v) in &at {
        for &(p, q, r, w) in &bt {
            mult.add(idx(i, p), idx(j, q), idx(k, r), v * w);
        }
    }
    let act = a.comult.triples();
    let bct = b.comult.triples();
    for &(i, j, k, v) in &act {
        for &(p, q, r, w) in &bct {
            comult.add(idx(i, p), idx(j, q), idx(k, r), v * w);
        }
    }
    let mut unit = vec![ZERO; n];
    let mut counit = vec![ZERO; n];
    let mut labels = Vec::with_capacity(n);
    for i in 0..da {
        for j in 0..db {
            unit[idx(i, j)] = a.unit[i] * b.unit[j];
            counit[idx(i, j)] = a.counit[i] * b.counit[j];
            labels.push(format!("{}⊗{}", a.basis_labels[i], b.basis_labels[j]));
        }
    }
    FinHopfAlgebra::new(
        format!("{}⊗{}", a.name, b.name),
        labels,
        mult,
        unit,
        comult,
        counit,
        a.antipode.kronecker(&b.antipode),
        a.star.kronecker(&b.star),
    )
    .expect("tensor product of valid algebras")
}

/// Drinfeld double D(H) = Ĥ^cop ⋈ H on the row-major basis (φᵢ ⊗ eⱼ).
///
/// (φ⊗x)(ψ⊗y) = Σ φ·ψ(S⁻¹(x⁽³⁾) • x⁽¹⁾) ⊗ x⁽²⁾y,
/// Δ(φ⊗x) = Σ (φ⁽²⁾⊗x⁽¹⁾) ⊗ (φ⁽¹⁾⊗x⁽²⁾), ε(φ⊗x) = φ(1)ε(x).
/// The antipode and star are obtained from S(φ⊗x) = (1̂⊗S(x))(Ŝ⁻¹(φ)⊗1) and
/// (φ⊗x)* = (1̂⊗x*)(φ*⊗1).
pub fn drinfeld_double(a: &FinHopfAlgebra) -> Result<FinHopfAlgebra> {
    let d = a.dim();
    let hat = dual(a);
    let n = d * d;
    let idx = |phi: usize, x: usize| phi * d + x;

    // sand[(r*d + p)*d + t] = S⁻¹(e_r) e_t e_p
    let sinv: Vec<Vec<C64>> = (0..d).map(|r| a.s_inv(&a.basis(r))).collect();
    let mut sand = Vec::with_capacity(d * d * d);
    for r in 0..d {
        for p in 0..d {
            for t in 0..d {
                sand.push(a.mul3(&sinv[r], &a.basis(t), &a.basis(p)));
            }
        }
    }

    let mut dense = vec![ZERO; n * n * n];
    for b in 0..d {
        let sw = a.sweedler(&a.basis(b), 3);
        for (legs, w) in &sw {
            let (p, q, r) = (legs[0], legs[1], legs[2]);
            for c in 0..d {
                let f: Vec<C64> = (0..d).map(|t| sand[(r * d + p) * d + t][c]).collect();
                if f.iter().all(|z| *z == ZERO) {
                    continue;
                }
                for ai in 0..d {
                    let u = hat.mul(&hat.basis(ai), &f);
                    for dd in 0..d {
                        let xw = a.mult.row(q, dd);
                        for (uu, uv) in u.iter().enumerate() {
                            if *uv == ZERO {
                                continue;
                            }
                            for &(ww, wv) in xw {
                                let row = idx(ai, b) * n + idx(c, dd);
                                dense[row * n + idx(uu, ww)] += w * uv * wv;
                            }
                        }
                    }
                }
            }
        }
    }
    let mult = StructTensor::from_dense([n, n, n], &dense, 1e-14);

    let mut comult = StructTensor::zeros([n, n, n]);
    for (ai, j, k, v) in hat.comult.triples() {
        for (b, p, q, w) in a.comult.triples() {
            comult.add(idx(ai, b), idx(k, p), idx(j, q), v * w);
        }
    }
    let mut unit = vec![ZERO; n];
    let mut counit = vec![ZERO; n];
    let mut labels = Vec::with_capacity(n);
    for ai in 0..d {
        for b in 0..d {
            unit[idx(ai, b)] = hat.unit[ai] * a.unit[b];
            counit[idx(ai, b)] = hat.counit[ai] * a.counit[b];
            labels.push(format!("{}⊗{}", hat.basis_labels[ai], a.basis_labels[b]));
        }
    }

    // provisional algebra to evaluate products for S and *
    let provisional = FinHopfAlgebra::new(
        format!("double:{}", a.name),
        labels.clone(),
        mult.clone(),
        unit.clone(),
        comult.clone(),
        counit.clone(),
        DMatrix::identity(n, n),
        DMatrix::identity(n, n),
    )?;
    let embed_h = |x: &[C64]| -> Vec<C64> {
        let mut v = vec![ZERO; n];
        for ai in 0..d {
            for b in 0..d {
                v[idx(ai, b)] = hat.unit[ai] * x[b];
            }
        }
        v
    };
    let embed_hat = |phi: &[C64]| -> Vec<C64> {
        let mut v = vec![ZERO; n];
        for ai in 0..d {
            for b in 0..d {
                v[idx(ai, b)] = phi[ai] * a.unit[b];
            }
        }
        v
    };
    let mut antipode = DMatrix::zeros(n, n);
    let mut star = DMatrix::zeros(n, n);
    for ai in 0..d {
        for b in 0..d {
            let sx = embed_h(&a.s(&a.basis(b)));
            let sphi = embed_hat(&hat.s_inv(&hat.basis(ai)));
            let s = provisional.mul(&sx, &sphi);
            let xs = embed_h(&a.star_of(&a.basis(b)));
            let phis = embed_hat(&hat.star_of(&hat.basis(ai)));
            let st = provisional.mul(&xs, &phis);
            for k in 0..n {
                antipode[(k, idx(ai, b))] = s[k];
                star[(k, idx(ai, b))] = st[k];
            }
        }
    }
    FinHopfAlgebra::new(
        format!("double:{}", a.name),
        labels,
        mult,
        unit,
        comult,
        counit,
        antipode,
        star,
    )
}

/// Embeds x ∈ H as 1̂⊗x in D(H).
pub fn double_embed_h(a: &FinHopfAlgebra, x: &[C64]) -> Vec<C64> {
    let d = a.dim();
    let mut v = vec![ZERO; d * d];
    for ai in 0..d {
        for b in 0..d {
            v[ai * d + b] = a.counit[ai] * x[b];
        }
    }
    v
}

/// Embeds φ ∈ Ĥ as φ⊗1 in D(H).
pub fn double_embed_hat(a: &FinHopfAlgebra, phi: &[C64]) -> Vec<C64> {
    let d = a.dim();
    let mut v = vec![ZERO; d * d];
    for ai in 0..d {
        for b in 0..d {
            v[ai * d + b] = phi[ai] * a.unit[b];
        }
    }
    v
}

/// The element of D(H) given by φ⊗x.
pub fn double_elem(phi: &[C64], x: &[C64]) -> Vec<C64> {
    let mut v = Vec::with_capacity(phi.len() * x.len());
    for p in phi {
        for q in x {
            v.push(p * q);
        }
    }
    v
}
