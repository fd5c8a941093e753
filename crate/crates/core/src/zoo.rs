//! Concrete algebras: group algebras, function algebras, the Kac–Paljutkin algebra H₈,
//! and Hopf subalgebras spanned by chosen basis elements.

use crate::error::{Error, Result};
use crate::hopf::{self, FinHopfAlgebra, StructTensor};
use crate::linalg::{self, r, C64, ONE, ZERO};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub order: usize,
    /// `table[g][h]` is the index of g·h.
    pub table: Vec<Vec<usize>>,
    pub labels: Vec<String>,
    #[serde(skip)]
    pub inverse: Vec<usize>,
    #[serde(skip)]
    pub identity: usize,
}

impl GroupTable {
    /// Validates associativity, identity and inverses combinatorially.
    pub fn new(table: Vec<Vec<usize>>, labels: Vec<String>) -> Result<Self> {
        let n = table.len();
        if labels.len() != n || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table is not n×n over 0..n".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))?;
            inverse.push(inv);
        }
        Ok(GroupTable {
            order: n,
            table,
            labels,
            inverse,
            identity,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: GroupTable = serde_json::from_str(s)?;
        if raw.order != raw.table.len() {
            return Err(Error::InvalidGroup("order does not match table".into()));
        }
        GroupTable::new(raw.table, raw.labels)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n)
            .map(|k| match k {
                0 => "e".to_string(),
                1 => "a".to_string(),
                _ => format!("a{k}"),
            })
            .collect();
        GroupTable::new(table, labels).expect("cyclic group")
    }

    /// Z₂×Z₂ as {e, a, b, ab} with XOR multiplication.
    pub fn klein() -> Self {
        let table = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        let labels = ["e", "a", "b", "ab"].iter().map(|s| s.to_string()).collect();
        GroupTable::new(table, labels).expect("Klein group")
    }

    /// S₃ as permutations of {0,1,2}, listed lexicographically by image tuple.
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let find = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        // (g·h)(i) = g(h(i))
        let table = (0..6)
            .map(|a| {
                (0..6)
                    .map(|b| {
                        let (g, h) = (perms[a], perms[b]);
                        find([g[h[0]], g[h[1]], g[h[2]]])
                    })
                    .collect()
            })
            .collect();
        let labels = ["e", "(12)", "(01)", "(012)", "(021)", "(02)"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        GroupTable::new(table, labels).expect("S3")
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

/// C[G]: Δ(g)=g⊗g, S(g)=g⁻¹, ε(g)=1, g*=g⁻¹.
pub fn group_algebra(g: &GroupTable, name: &str) -> FinHopfAlgebra {
    let n = g.order;
    let mut mult = StructTensor::zeros([n, n, n]);
    let mut comult = StructTensor::zeros([n, n, n]);
    let mut antipode = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            mult.add(a, b, g.table[a][b], ONE);
        }
        comult.add(a, a, a, ONE);
        antipode[(g.inverse[a], a)] = ONE;
    }
    FinHopfAlgebra::new(
        name,
        g.labels.clone(),
        mult,
        linalg::basis_vec(n, g.identity),
        comult,
        vec![ONE; n],
        antipode.clone(),
        antipode,
    )
    .expect("group algebra")
}

/// C^G on the δ basis: pointwise product, Δ(δ_g) = Σ_{hk=g} δ_h⊗δ_k.
pub fn function_algebra(g: &GroupTable, name: &str) -> FinHopfAlgebra {
    let n = g.order;
    let mut mult = StructTensor::zeros([n, n, n]);
    let mut comult = StructTensor::zeros([n, n, n]);
    let mut antipode = DMatrix::zeros(n, n);
    for a in 0..n {
        mult.add(a, a, a, ONE);
        for b in 0..n {
            comult.add(g.table[a][b], a, b, ONE);
        }
        antipode[(g.inverse[a], a)] = ONE;
    }
    let labels = g.labels.iter().map(|l| format!("δ_{l}")).collect();
    FinHopfAlgebra::new(
        name,
        labels,
        mult,
        vec![ONE; n],
        comult,
        linalg::basis_vec(n, g.identity),
        antipode,
        DMatrix::identity(n, n),
    )
    .expect("function algebra")
}

// H₈ basis {1,x,y,xy,z,zx,zy,zxy}: index = 4·[has z] + g with g ∈ {1,x,y,xy} ↦ {0,1,2,3}
// multiplied by XOR. z·g = σ(g)·z where σ swaps x and y.
fn sigma(g: usize) -> usize {
    ((g & 1) << 1) | ((g & 2) >> 1)
}

fn h8_mul_basis(i: usize, j: usize) -> Vec<C64> {
    let mut out = vec![ZERO; 8];
    let (zi, gi) = (i >= 4, i & 3);
    let (zj, gj) = (j >= 4, j & 3);
    match (zi, zj) {
        (false, false) => out[gi ^ gj] += ONE,
        // g·(z h) = z σ(g) h
        (false, true) => out[4 + (sigma(gi) ^ gj)] += ONE,
        // (z g)·h = z (g h)
        (true, false) => out[4 + (gi ^ gj)] += ONE,
        // (z g)(z h) = z² σ(g) h with z² = ½(1+x+y−xy)
        (true, true) => {
            let s = sigma(gi) ^ gj;
            for (k, c) in [(0usize, 0.5), (1, 0.5), (2, 0.5), (3, -0.5)] {
                out[k ^ s] += r(c);
            }
        }
    }
    out
}

/// The eight-dimensional Kac–Paljutkin algebra.
///
/// Relations x²=y²=1, xy=yx, zx=yz, zy=xz, z²=½(1+x+y−xy);
/// Δ(z)=½(1⊗1+y⊗1+1⊗x−y⊗x)(z⊗z), ε(z)=1, S(z)=z.
/// Star: g*=g for group-likes and z*=z⁻¹=z·z² (z is unitary).
pub fn kac_paljutkin() -> FinHopfAlgebra {
    let d = 8;
    let labels: Vec<String> = ["1", "x", "y", "xy", "z", "zx", "zy", "zxy"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut mult = StructTensor::zeros([d, d, d]);
    for i in 0..d {
        for j in 0..d {
            for (k, v) in h8_mul_basis(i, j).into_iter().enumerate() {
                if v != ZERO {
                    mult.add(i, j, k, v);
                }
            }
        }
    }
    let mul = |a: &[C64], b: &[C64]| -> Vec<C64> {
        let mut out = vec![ZERO; d];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                if *ai != ZERO && *bj != ZERO {
                    linalg::axpy(ai * bj, &h8_mul_basis(i, j), &mut out);
                }
            }
        }
        out
    };
    let e = |i: usize| linalg::basis_vec(d, i);

    let mut comult = StructTensor::zeros([d, d, d]);
    for g in 0..4 {
        comult.add(g, g, g, ONE);
    }
    // Δ(z g) = Δ(z)(g⊗g), Δ(z) = ½(z⊗z + yz⊗z + z⊗xz − yz⊗xz)
    let yz = mul(&e(2), &e(4));
    let xz = mul(&e(1), &e(4));
    let z = e(4);
    let terms: [(f64, &Vec<C64>, &Vec<C64>); 4] = [(0.5, &z, &z), (0.5, &yz, &z), (0.5, &z, &xz), (-0.5, &yz, &xz)];
    for g in 0..4 {
        for (c, left, right) in terms.iter() {
            let l = mul(left, &e(g));
            let rr = mul(right, &e(g));
            for (a, la) in l.iter().enumerate() {
                for (b, rb) in rr.iter().enumerate() {
                    if *la != ZERO && *rb != ZERO {
                        comult.add(4 + g, a, b, la * rb * *c);
                    }
                }
            }
        }
    }

    let mut antipode = DMatrix::zeros(d, d);
    let mut star = DMatrix::zeros(d, d);
    let z2 = mul(&z, &z);
    let zinv = mul(&z, &z2);
    for g in 0..4 {
        antipode[(g, g)] = ONE;
        star[(g, g)] = ONE;
        // S(z g) = S(g) S(z) = g z
        let s = mul(&e(g), &z);
        // (z g)* = g* z* = g z⁻¹
        let st = mul(&e(g), &zinv);
        for k in 0..d {
            antipode[(k, 4 + g)] = s[k];
            star[(k, 4 + g)] = st[k];
        }
    }
    FinHopfAlgebra::new("h8", labels, mult, e(0), comult, vec![ONE; d], antipode, star)
        .expect("H8")
}

/// A Hopf subalgebra K ≤ A with its inclusion matrix (columns are K's basis in A).
#[derive(Clone, Debug)]
pub struct HopfSubalgebra {
    pub algebra: FinHopfAlgebra,
    pub inclusion: DMatrix<C64>,
    /// Whether dim K divides dim A (reported only).
    pub lagrange_ok: bool,
}

impl HopfSubalgebra {
    pub fn include(&self, k: &[C64]) -> Vec<C64> {
        linalg::mat_vec(&self.inclusion, k)
    }

    /// Coordinates in K of an element of A known to lie in K.
    pub fn restrict(&self, x: &[C64]) -> Vec<C64> {
        linalg::lstsq(&self.inclusion, x).0
    }
}

/// The Hopf subalgebra generated (as an algebra) by the given basis elements of `a`.
/// The span is closed under products; closure under Δ, S and * is checked.
pub fn hopf_subalgebra(a: &FinHopfAlgebra, generators: &[usize], name: &str) -> Result<HopfSubalgebra> {
    let d = a.dim();
    let mut vecs: Vec<Vec<C64>> = vec![a.unit.clone()];
    for &g in generators {
        if g >= d {
            return Err(Error::InvalidInput(format!("generator index {g} out of range")));
        }
        vecs.push(a.basis(g));
    }
    let span_of = |vs: &[Vec<C64>]| -> DMatrix<C64> {
        let m = DMatrix::from_fn(d, vs.len(), |i, j| vs[j][i]);
        let piv = linalg::pivot_columns(&m, 1e-10);
        DMatrix::from_fn(d, piv.len(), |i, j| vs[piv[j]][i])
    };
    let mut basis = span_of(&vecs);
    loop {
        let cols: Vec<Vec<C64>> = (0..basis.ncols()).map(|j| basis.column(j).iter().cloned().collect()).collect();
        let mut all = cols.clone();
        for p in &cols {
            for q in &cols {
                all.push(a.mul(p, q));
            }
        }
        let next = span_of(&all);
        if next.ncols() == basis.ncols() {
            break;
        }
        basis = next;
    }
    // prefer basis elements of A when the span is coordinate-aligned
    let k = basis.ncols();
    let aligned: Vec<usize> = (0..d)
        .filter(|&i| linalg::lstsq(&basis, &a.basis(i)).1 < 1e-10)
        .collect();
    let inclusion = if aligned.len() == k {
        DMatrix::from_fn(d, k, |i, j| if i == aligned[j] { ONE } else { ZERO })
    } else {
        basis
    };
    let coords = |x: &[C64]| -> Result<Vec<C64>> {
        let (c, res) = linalg::lstsq(&inclusion, x);
        if res > 1e-9 {
            return Err(Error::NotHopfSubalgebra(format!("element leaves the span (residual {res:e})")));
        }
        Ok(c)
    };
    let cols: Vec<Vec<C64>> = (0..k).map(|j| inclusion.column(j).iter().cloned().collect()).collect();
    let mut mult = StructTensor::zeros([k, k, k]);
    let mut comult = StructTensor::zeros([k, k, k]);
    let mut antipode = DMatrix::zeros(k, k);
    let mut star = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let p = coords(&a.mul(&cols[i], &cols[j]))?;
            for (t, v) in p.into_iter().enumerate() {
                if v.norm() > 1e-14 {
                    mult.add(i, j, t, v);
                }
            }
        }
        // Δ(k_i) must lie in K⊗K: solve (ι⊗ι) c = Δ(k_i)
        let dk = a.comul(&cols[i]);
        let mut m = DMatrix::zeros(d, d);
        for p in 0..d {
            for q in 0..d {
                m[(p, q)] = dk[p * d + q];
            }
        }
        let pinv = inclusion
            .clone()
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::NotHopfSubalgebra(e.to_string()))?;
        let c = &pinv * &m * pinv.transpose();
        let back = &inclusion * &c * inclusion.transpose();
        if linalg::mat_max_abs(&(&back - &m)) > 1e-9 {
            return Err(Error::NotHopfSubalgebra("span is not a subcoalgebra".into()));
        }
        for p in 0..k {
            for q in 0..k {
                if c[(p, q)].norm() > 1e-14 {
                    comult.add(i, p, q, c[(p, q)]);
                }
            }
        }
        let s = coords(&a.s(&cols[i]))?;
        let st = coords(&a.star_of(&cols[i]))?;
        for t in 0..k {
            antipode[(t, i)] = s[t];
            star[(t, i)] = st[t];
        }
    }
    let unit = coords(&a.unit)?;
    let counit: Vec<C64> = cols.iter().map(|c| a.counit_of(c)).collect();
    let labels = (0..k)
        .map(|j| {
            let nzs: Vec<usize> = (0..d).filter(|&i| cols[j][i].norm() > 1e-12).collect();
            if nzs.len() == 1 {
                a.basis_labels[nzs[0]].clone()
            } else {
                format!("k{j}")
            }
        })
        .collect();
    let algebra = FinHopfAlgebra::new(name, labels, mult, unit, comult, counit, antipode, star)?;
    Ok(HopfSubalgebra {
        algebra,
        inclusion,
        lagrange_ok: d % k == 0,
    })
}

/// Resolves a built-in algebra reference: z2, z4, z2z2, s3, h8, dual:<name>, double:<name>.
pub fn builtin(name: &str) -> Result<FinHopfAlgebra> {
    if let Some(inner) = name.strip_prefix("dual:") {
        let mut a = hopf::dual(&builtin(inner)?);
        a.name = name.to_string();
        return Ok(a);
    }
    if let Some(inner) = name.strip_prefix("double:") {
        return hopf::drinfeld_double(&builtin(inner)?);
    }
    Ok(match name {
        "trivial" => group_algebra(&GroupTable::cyclic(1), "trivial"),
        "z2" => group_algebra(&GroupTable::cyclic(2), "z2"),
        "z4" => group_algebra(&GroupTable::cyclic(4), "z4"),
        "z2z2" => group_algebra(&GroupTable::klein(), "z2z2"),
        "s3" => group_algebra(&GroupTable::symmetric3(), "s3"),
        "fun:s3" => function_algebra(&GroupTable::symmetric3(), "fun:s3"),
        "h8" => kac_paljutkin(),
        _ => return Err(Error::UnknownRef(name.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{haar_integral, verify_hopf_axioms};
    use crate::linalg::max_diff;

    #[test]
    fn z2_square_is_identity() {
        let a = builtin("z2").unwrap();
        assert!(max_diff(&a.mul(&a.basis(1), &a.basis(1)), &a.basis(0)) < 1e-15);
    }

    #[test]
    fn h8_presentation() {
        let h = kac_paljutkin();
        let z = h.basis(4);
        let z2 = h.mul(&z, &z);
        let expect = [r(0.5), r(0.5), r(0.5), r(-0.5), ZERO, ZERO, ZERO, ZERO];
        assert!(max_diff(&z2, &expect) < 1e-15);
        // zx = yz, both equal to the basis element zx
        let zx = h.mul(&z, &h.basis(1));
        assert!(max_diff(&zx, &h.basis(5)) < 1e-15);
        assert!(max_diff(&h.mul(&h.basis(2), &z), &zx) < 1e-15);
        assert!(max_diff(&h.s(&z), &z) < 1e-15);
        // z⁴ = 1
        let z4 = h.mul(&z2, &z2);
        assert!(max_diff(&z4, &h.basis(0)) < 1e-15);
    }

    #[test]
    fn h8_coproduct_of_z() {
        let h = kac_paljutkin();
        let dz = h.comul(&h.basis(4));
        // ½(z⊗z + zx⊗z + z⊗zy − zx⊗zy)
        let mut expect = vec![ZERO; 64];
        expect[4 * 8 + 4] = r(0.5);
        expect[5 * 8 + 4] = r(0.5);
        expect[4 * 8 + 6] = r(0.5);
        expect[5 * 8 + 6] = r(-0.5);
        assert!(max_diff(&dz, &expect) < 1e-15);
    }

    #[test]
    fn h8_is_neither_commutative_nor_cocommutative() {
        let h = kac_paljutkin();
        assert!(!h.is_commutative(1e-12));
        assert!(!h.is_cocommutative(1e-12));
        assert!(verify_hopf_axioms(&h, 1e-12).unwrap().pass());
    }

    #[test]
    fn s3_table_is_nonabelian() {
        let g = GroupTable::symmetric3();
        assert!(!g.is_abelian());
        let a = group_algebra(&g, "s3");
        assert!(!a.is_commutative(1e-12));
        assert!(a.is_cocommutative(1e-12));
    }

    #[test]
    fn bad_table_rejected() {
        let t = vec![vec![0, 1], vec![0, 1]];
        assert!(matches!(
            GroupTable::new(t, vec!["e".into(), "a".into()]),
            Err(Error::InvalidGroup(_))
        ));
    }

    #[test]
    fn function_algebra_haar_is_delta_e() {
        let f = function_algebra(&GroupTable::cyclic(2), "fun:z2");
        let h = haar_integral(&f).unwrap();
        assert!(max_diff(&h, &[ONE, ZERO]) < 1e-12);
    }

    #[test]
    fn subalgebra_of_grouplikes_in_h8() {
        let h = kac_paljutkin();
        let k = hopf_subalgebra(&h, &[1, 2], "K").unwrap();
        assert_eq!(k.algebra.dim(), 4);
        assert!(k.lagrange_ok);
        let hk = haar_integral(&k.algebra).unwrap();
        assert!(max_diff(&k.include(&hk), &[r(0.25), r(0.25), r(0.25), r(0.25), ZERO, ZERO, ZERO, ZERO]) < 1e-12);
    }

    #[test]
    fn z_alone_generates_everything_or_fails() {
        // span{1, z, z², z³} is closed under products but not under Δ
        let h = kac_paljutkin();
        assert!(matches!(hopf_subalgebra(&h, &[4], "bad"), Err(Error::NotHopfSubalgebra(_))));
    }
}
