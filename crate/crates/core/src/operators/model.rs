//! Model data: a cellulation, bulk algebras per region and optional boundary or wall data.

use super::local::{col_mat, ColMat};
use crate::comodule::{
    bicomodule_from_hopf_subalgebra, comodule_from_hopf_subalgebra, separability_idempotent,
    AssocAlgebra, BicomoduleAlgebra, ComoduleAlgebra, SeparabilityIdempotent, Side,
};
use crate::error::{Error, Result};
use crate::hopf::{self, FinHopfAlgebra};
use crate::lattice::{self, Cellulation, LatticeFile, Tag};
use crate::linalg::{C64, ZERO};
use crate::zoo::{self, hopf_subalgebra, HopfSubalgebra};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Per-region algebra data with the single-edge matrices of every basis label cached.
#[derive(Clone, Debug)]
pub struct Region {
    pub algebra: FinHopfAlgebra,
    pub hat: FinHopfAlgebra,
    pub haar: Vec<C64>,
    /// φ_Ĥ, the Haar integral of the dual, as a functional on H.
    pub dual_haar: Vec<C64>,
    pub gram: DMatrix<C64>,
    pub gram_cols: ColMat,
    /// L₊^{e_i}: x ↦ e_i x.
    pub lplus: Vec<ColMat>,
    /// L₋^{e_i}: x ↦ x S(e_i).
    pub lminus: Vec<ColMat>,
    /// L̃₊^{e_i}: x ↦ S(e_i) x.
    pub ltplus: Vec<ColMat>,
    /// L̃₋^{e_i}: x ↦ x e_i.
    pub ltminus: Vec<ColMat>,
    /// T₊^{eᵏ}: x ↦ Σ x⁽¹⁾ eᵏ(x⁽²⁾).
    pub tplus: Vec<ColMat>,
    /// T₋^{eᵏ}: x ↦ Σ eᵏ(S(x⁽¹⁾)) x⁽²⁾.
    pub tminus: Vec<ColMat>,
    /// T̃₊^{eᵏ}: x ↦ Σ eᵏ(S(x⁽²⁾)) x⁽¹⁾.
    pub ttplus: Vec<ColMat>,
    /// T̃₋^{eᵏ}: x ↦ Σ eᵏ(x⁽¹⁾) x⁽²⁾.
    pub ttminus: Vec<ColMat>,
}

impl Region {
    pub fn new(h: &FinHopfAlgebra) -> Result<Self> {
        let d = h.dim();
        let hat = hopf::dual(h);
        let haar = hopf::haar_integral(h)?;
        let dual_haar = hopf::haar_integral(&hat)?;
        let gram = hopf::gram_with(h, &dual_haar)?;
        let mut lplus = Vec::with_capacity(d);
        let mut lminus = Vec::with_capacity(d);
        let mut ltplus = Vec::with_capacity(d);
        let mut ltminus = Vec::with_capacity(d);
        for i in 0..d {
            let e = h.basis(i);
            let se = h.s(&e);
            lplus.push(col_mat(&h.left_matrix(&e)));
            lminus.push(col_mat(&h.right_matrix(&se)));
            ltplus.push(col_mat(&h.left_matrix(&se)));
            ltminus.push(col_mat(&h.right_matrix(&e)));
        }
        let s = &h.antipode;
        let mut tp = vec![DMatrix::zeros(d, d); d];
        let mut tm = vec![DMatrix::zeros(d, d); d];
        let mut ttp = vec![DMatrix::zeros(d, d); d];
        let mut ttm = vec![DMatrix::zeros(d, d); d];
        for (i, j, l, c) in h.comult.triples() {
            // Δ(e_i) ∋ c e_j ⊗ e_l
            tp[l][(j, i)] += c;
            ttm[j][(l, i)] += c;
            for k in 0..d {
                // eᵏ(S(e_j)) = S[k, j]
                if s[(k, j)] != ZERO {
                    tm[k][(l, i)] += c * s[(k, j)];
                }
                if s[(k, l)] != ZERO {
                    ttp[k][(j, i)] += c * s[(k, l)];
                }
            }
        }
        Ok(Region {
            algebra: h.clone(),
            hat,
            haar,
            dual_haar,
            gram_cols: col_mat(&gram),
            gram,
            lplus,
            lminus,
            ltplus,
            ltminus,
            tplus: tp.iter().map(col_mat).collect(),
            tminus: tm.iter().map(col_mat).collect(),
            ttplus: ttp.iter().map(col_mat).collect(),
            ttminus: ttm.iter().map(col_mat).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectKind {
    Boundary,
    Wall,
}

/// Boundary or wall data. A boundary is stored as a wall whose left algebra is trivial,
/// so 𝔄 ⊂ right comodule algebras becomes an C|H-bicomodule algebra.
#[derive(Clone, Debug)]
pub struct Defect {
    pub kind: DefectKind,
    pub algebra: BicomoduleAlgebra,
    pub lambda: SeparabilityIdempotent,
    pub subalgebra: Option<HopfSubalgebra>,
    /// Region index (0 = bulk1, 1 = bulk2) on the right of defect edges.
    pub right_region: usize,
    pub gram: DMatrix<C64>,
    pub gram_cols: ColMat,
    /// x ↦ e_i x and x ↦ x e_i on 𝔄.
    pub left_mul: Vec<ColMat>,
    pub right_mul: Vec<ColMat>,
    /// x ↦ Σ x[0] eᵏ(x[1]), eᵏ in the dual of the right algebra.
    pub right_leg: Vec<ColMat>,
    /// x ↦ Σ eᵏ(S(x[-1])) x[0], eᵏ in the dual of the left algebra.
    pub left_leg: Vec<ColMat>,
}

impl Defect {
    fn new(kind: DefectKind, algebra: BicomoduleAlgebra, subalgebra: Option<HopfSubalgebra>) -> Result<Self> {
        let lambda = separability_idempotent(&algebra.algebra)?;
        let n = algebra.dim();
        let a = &algebra.algebra;
        let left_mul = (0..n).map(|i| col_mat(&a.left_matrix(&a.basis(i)))).collect();
        let right_mul = (0..n).map(|i| col_mat(&a.right_matrix(&a.basis(i)))).collect();
        let (d1, d2) = (algebra.h1.dim(), algebra.h2.dim());
        let mut rl = vec![DMatrix::zeros(n, n); d2];
        let mut ll = vec![DMatrix::zeros(n, n); d1];
        for i in 0..n {
            for &(p1, j, p2, v) in &algebra.coaction[i] {
                rl[p2][(j, i)] += v * algebra.h1.counit[p1];
                for (k, m) in ll.iter_mut().enumerate() {
                    let s = algebra.h1.antipode[(k, p1)];
                    if s != ZERO {
                        m[(j, i)] += v * s * algebra.h2.counit[p2];
                    }
                }
            }
        }
        let gram = algebra.gram_matrix();
        Ok(Defect {
            kind,
            lambda,
            subalgebra,
            right_region: if kind == DefectKind::Boundary { 0 } else { 1 },
            gram_cols: col_mat(&gram),
            gram,
            left_mul,
            right_mul,
            right_leg: rl.iter().map(col_mat).collect(),
            left_leg: ll.iter().map(col_mat).collect(),
            algebra,
        })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// λ as (a index, b index, coefficient).
    pub fn lambda_components(&self) -> Vec<(usize, usize, C64)> {
        self.lambda.components(self.dim())
    }

    /// h_𝔄 = Σ λ¹ ε(λ²), the label carried by defect edges in the ground state.
    pub fn ground_label(&self) -> Result<Vec<C64>> {
        let eps = self.algebra.augmentation.as_ref().ok_or(Error::NotAugmented)?;
        let n = self.dim();
        let mut out = vec![ZERO; n];
        for (p, q, v) in self.lambda_components() {
            out[p] += v * eps[q];
        }
        Ok(out)
    }
}

/// Boundary or wall input data for [`Model::new`].
#[derive(Clone, Debug)]
pub enum DefectInput {
    /// A right H-comodule algebra for a boundary with the bulk on the right.
    Boundary {
        comodule: ComoduleAlgebra,
        subalgebra: Option<HopfSubalgebra>,
    },
    /// An H₁|H₂-bicomodule algebra.
    Wall {
        bicomodule: BicomoduleAlgebra,
        subalgebra: Option<HopfSubalgebra>,
    },
}

impl DefectInput {
    pub fn boundary_from_subalgebra(h: &FinHopfAlgebra, k: HopfSubalgebra) -> Self {
        DefectInput::Boundary {
            comodule: comodule_from_hopf_subalgebra(h, &k, Side::Right),
            subalgebra: Some(k),
        }
    }

    pub fn wall_from_subalgebra(h: &FinHopfAlgebra, k: HopfSubalgebra) -> Self {
        DefectInput::Wall {
            bicomodule: bicomodule_from_hopf_subalgebra(h, &k),
            subalgebra: Some(k),
        }
    }
}

/// Right comodule algebra over H as a C|H-bicomodule algebra.
pub fn boundary_as_bicomodule(a: &ComoduleAlgebra) -> Result<BicomoduleAlgebra> {
    if a.side != Side::Right {
        return Err(Error::UnsupportedConfiguration(
            "boundaries need a right comodule algebra (bulk on the right of boundary edges)".into(),
        ));
    }
    let n = a.dim();
    let mut coaction = vec![Vec::new(); n];
    for (i, j, p, v) in a.coaction.triples() {
        coaction[i].push((0, j, p, v));
    }
    Ok(BicomoduleAlgebra {
        algebra: a.algebra.clone(),
        h1: zoo::builtin("trivial")?,
        h2: a.host.clone(),
        coaction,
        augmentation: a.augmentation.clone(),
        gram: Some(a.gram_matrix()),
    })
}

#[derive(Clone, Debug)]
pub struct Model {
    pub lattice: Cellulation,
    /// Regions indexed 0 = bulk1, 1 = bulk2 (a copy of bulk1 when there is no second bulk).
    pub regions: [Region; 2],
    pub defect: Option<Defect>,
    pub dims: Vec<usize>,
    /// Human-readable reference, e.g. `torus2x2:z2`.
    pub name: String,
}

impl Model {
    pub fn new(
        lattice: Cellulation,
        bulk1: &FinHopfAlgebra,
        bulk2: Option<&FinHopfAlgebra>,
        defect: Option<DefectInput>,
    ) -> Result<Self> {
        let tags: Vec<Tag> = lattice.edges.iter().map(|e| e.tag).collect();
        let has = |t: Tag| tags.contains(&t);
        if has(Tag::Bulk2) && bulk2.is_none() {
            return Err(Error::ModelInconsistency("bulk2 edges but no second bulk algebra".into()));
        }
        if has(Tag::Boundary) && has(Tag::Wall) {
            return Err(Error::UnsupportedConfiguration(
                "boundaries and walls in the same model".into(),
            ));
        }
        let r1 = Region::new(bulk1)?;
        let r2 = match bulk2 {
            Some(b) => Region::new(b)?,
            None => r1.clone(),
        };
        let defect = match defect {
            None => {
                if has(Tag::Boundary) || has(Tag::Wall) {
                    return Err(Error::ModelInconsistency(
                        "lattice has boundary or wall edges but no defect data".into(),
                    ));
                }
                None
            }
            Some(DefectInput::Boundary { comodule, subalgebra }) => {
                if !has(Tag::Boundary) {
                    return Err(Error::ModelInconsistency("boundary data but no boundary edges".into()));
                }
                check_host(&comodule.host, bulk1, "boundary")?;
                Some(Defect::new(DefectKind::Boundary, boundary_as_bicomodule(&comodule)?, subalgebra)?)
            }
            Some(DefectInput::Wall { bicomodule, subalgebra }) => {
                if !has(Tag::Wall) {
                    return Err(Error::ModelInconsistency("wall data but no wall edges".into()));
                }
                check_host(&bicomodule.h1, bulk1, "wall left")?;
                check_host(&bicomodule.h2, bulk2.unwrap_or(bulk1), "wall right")?;
                Some(Defect::new(DefectKind::Wall, bicomodule, subalgebra)?)
            }
        };
        let dims = tags
            .iter()
            .map(|t| match t {
                Tag::Bulk1 => r1.dim(),
                Tag::Bulk2 => r2.dim(),
                Tag::Boundary | Tag::Wall => defect.as_ref().map(|d| d.dim()).unwrap_or(0),
            })
            .collect();
        Ok(Model {
            name: bulk1.name.clone(),
            lattice,
            regions: [r1, r2],
            defect,
            dims,
        })
    }

    pub fn total_dim(&self) -> Option<usize> {
        self.dims.iter().try_fold(1usize, |a, &b| a.checked_mul(b))
    }

    pub fn region_index(t: Tag) -> usize {
        if t == Tag::Bulk2 {
            1
        } else {
            0
        }
    }

    pub fn edge_tag(&self, e: usize) -> Tag {
        self.lattice.edges[e].tag
    }

    pub fn is_defect_edge(&self, e: usize) -> bool {
        matches!(self.edge_tag(e), Tag::Boundary | Tag::Wall)
    }

    pub fn defect(&self) -> Result<&Defect> {
        self.defect
            .as_ref()
            .ok_or_else(|| Error::ModelInconsistency("model has no boundary or wall".into()))
    }

    /// Region of a bulk edge.
    pub fn edge_region(&self, e: usize) -> Result<&Region> {
        match self.edge_tag(e) {
            Tag::Bulk1 => Ok(&self.regions[0]),
            Tag::Bulk2 => Ok(&self.regions[1]),
            t => Err(Error::ModelInconsistency(format!("edge {e} is a {t:?} edge, not a bulk edge"))),
        }
    }

    pub fn edge_gram(&self, e: usize) -> &ColMat {
        match self.edge_tag(e) {
            Tag::Bulk1 => &self.regions[0].gram_cols,
            Tag::Bulk2 => &self.regions[1].gram_cols,
            _ => &self.defect.as_ref().expect("defect edge implies defect").gram_cols,
        }
    }

    pub fn support_dims(&self, support: &[usize]) -> Vec<usize> {
        support.iter().map(|&e| self.dims[e]).collect()
    }

    /// Parses a model reference `surface[:algebra][:K=…][:bulk2=…]` (see [`ModelSpec::parse_ref`]).
    pub fn from_ref(s: &str) -> Result<Self> {
        Model::from_spec(&ModelSpec::parse_ref(s)?)
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let lattice = match &spec.lattice {
            LatticeSpec::Preset(p) => preset_lattice(p)?,
            LatticeSpec::File(f) => Cellulation::from_file(f)?,
        };
        let h1 = zoo::builtin(&spec.bulk)?;
        let has = |t: Tag| lattice.edges.iter().any(|e| e.tag == t);
        let h2 = match spec.bulk2.as_deref() {
            Some(b) => Some(zoo::builtin(b)?),
            None if has(Tag::Bulk2) => Some(h1.clone()),
            None => None,
        };
        let defect = if has(Tag::Boundary) || has(Tag::Wall) {
            let kref = spec.subalgebra.as_deref().unwrap_or("full");
            let k = subalgebra_ref(&h1, kref)?;
            if has(Tag::Boundary) {
                Some(DefectInput::boundary_from_subalgebra(&h1, k))
            } else {
                if spec.bulk2.as_ref().is_some_and(|b| *b != spec.bulk) {
                    return Err(Error::UnsupportedConfiguration(
                        "subalgebra walls need the same algebra on both sides".into(),
                    ));
                }
                Some(DefectInput::wall_from_subalgebra(&h1, k))
            }
        } else {
            None
        };
        let mut m = Model::new(lattice, &h1, h2.as_ref(), defect)?;
        m.name = spec.to_ref();
        Ok(m)
    }
}

fn check_host(host: &FinHopfAlgebra, bulk: &FinHopfAlgebra, what: &str) -> Result<()> {
    if host.dim() != bulk.dim() || host.name != bulk.name {
        return Err(Error::ModelInconsistency(format!(
            "{what} data is over `{}` but the adjacent bulk is `{}`",
            host.name, bulk.name
        )));
    }
    Ok(())
}

/// Resolves `full`, `trivial`, `z2z2` (group-likes of H₈) or a comma-separated list of
/// generator labels to a Hopf subalgebra.
pub fn subalgebra_ref(h: &FinHopfAlgebra, s: &str) -> Result<HopfSubalgebra> {
    let gens: Vec<usize> = match s {
        "full" => (0..h.dim()).collect(),
        "trivial" | "1" => Vec::new(),
        "z2z2" if h.name == "h8" => vec![1, 2],
        _ => s
            .split(',')
            .map(|l| {
                h.label_index(l.trim())
                    .ok_or_else(|| Error::UnknownRef(format!("`{l}` is not a basis label of {}", h.name)))
            })
            .collect::<Result<_>>()?,
    };
    hopf_subalgebra(h, &gens, &format!("K={s}"))
}

/// Lattice presets: `sphere`, `torusNxM` (`torus` = 1×2), `diskNxM` (`disk` = 1×1),
/// `wheelK`, `wallNxM` (`wall` = 1×2).
pub fn preset_lattice(p: &str) -> Result<Cellulation> {
    let dims = |rest: &str, default: (usize, usize)| -> Result<(usize, usize)> {
        if rest.is_empty() {
            return Ok(default);
        }
        let (a, b) = rest
            .split_once('x')
            .ok_or_else(|| Error::UnknownRef(format!("lattice `{p}`")))?;
        let parse = |t: &str| t.parse::<usize>().map_err(|_| Error::UnknownRef(format!("lattice `{p}`")));
        Ok((parse(a)?, parse(b)?))
    };
    if p == "sphere" {
        return lattice::sphere_tetrahedron();
    }
    if let Some(rest) = p.strip_prefix("torus") {
        let (n, m) = dims(rest, (1, 2))?;
        return lattice::torus_square(n, m);
    }
    if let Some(rest) = p.strip_prefix("disk") {
        let (n, m) = dims(rest, (1, 1))?;
        return lattice::disk_square(n, m);
    }
    if let Some(rest) = p.strip_prefix("wheel") {
        let k = if rest.is_empty() { 3 } else { rest.parse().map_err(|_| Error::UnknownRef(p.into()))? };
        return lattice::disk_wheel(k);
    }
    if let Some(rest) = p.strip_prefix("wall") {
        let (n, m) = dims(rest, (1, 2))?;
        return lattice::wall_strip(n, m);
    }
    Err(Error::UnknownRef(format!("lattice `{p}`")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Preset(String),
    File(LatticeFile),
}

/// Model file contents: a lattice (preset name or inline lattice file), algebra
/// references for the bulk regions and the Hopf subalgebra used for boundaries or walls.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelSpec {
    pub lattice: LatticeSpec,
    pub bulk: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bulk2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subalgebra: Option<String>,
}

impl ModelSpec {
    /// `surface[:algebra][:K=…][:bulk2=…]`, e.g. `torus2x2:z2`, `disk:h8:K=z2z2`.
    /// The algebra defaults to `z2` and K to `full`.
    pub fn parse_ref(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let surface = parts
            .next()
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::UnknownRef(s.into()))?;
        let mut spec = ModelSpec {
            lattice: LatticeSpec::Preset(surface.to_string()),
            bulk: "z2".into(),
            bulk2: None,
            subalgebra: None,
        };
        let mut bulk_seen = false;
        for p in parts {
            if let Some(k) = p.strip_prefix("K=").or_else(|| p.strip_prefix("wall=")) {
                spec.subalgebra = Some(k.to_string());
            } else if let Some(b) = p.strip_prefix("bulk2=") {
                spec.bulk2 = Some(b.to_string());
            } else if !bulk_seen {
                spec.bulk = p.to_string();
                bulk_seen = true;
            } else {
                return Err(Error::UnknownRef(format!("unexpected `{p}` in model ref `{s}`")));
            }
        }
        Ok(spec)
    }

    pub fn to_ref(&self) -> String {
        let mut out = match &self.lattice {
            LatticeSpec::Preset(p) => p.clone(),
            LatticeSpec::File(_) => "file".into(),
        };
        out.push(':');
        out.push_str(&self.bulk);
        if let Some(k) = &self.subalgebra {
            out.push_str(":K=");
            out.push_str(k);
        }
        if let Some(b) = &self.bulk2 {
            out.push_str(":bulk2=");
            out.push_str(b);
        }
        out
    }
}

/// A general comodule algebra example used in tests: M₂(C) with the trivial coaction.
pub fn matrix_boundary(h: &FinHopfAlgebra) -> ComoduleAlgebra {
    use crate::hopf::StructTensor;
    use crate::linalg::ONE;
    let mut mult = StructTensor::zeros([4, 4, 4]);
    // e_{ij} at index 2i + j
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                mult.add(2 * i + j, 2 * j + k, 2 * i + k, ONE);
            }
        }
    }
    let algebra = AssocAlgebra {
        name: "M2".into(),
        basis_labels: ["e00", "e01", "e10", "e11"].iter().map(|s| s.to_string()).collect(),
        mult,
        unit: vec![ONE, ZERO, ZERO, ONE],
    };
    let mut coaction = StructTensor::zeros([4, 4, h.dim()]);
    let one = h.unit.clone();
    for i in 0..4 {
        for (p, v) in one.iter().enumerate() {
            if *v != ZERO {
                coaction.add(i, i, p, *v);
            }
        }
    }
    ComoduleAlgebra {
        algebra,
        host: h.clone(),
        side: Side::Right,
        coaction,
        augmentation: None,
        gram: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_refs_parse() {
        let m = Model::from_ref("torus2x2:z2").unwrap();
        assert_eq!(m.dims, vec![2; 8]);
        let m = Model::from_ref("disk:h8:K=z2z2").unwrap();
        assert_eq!(m.dims, vec![4; 4]);
        let m = Model::from_ref("disk:z2:K=trivial").unwrap();
        assert_eq!(m.dims, vec![1; 4]);
        let m = Model::from_ref("sphere:s3").unwrap();
        assert_eq!(m.total_dim(), Some(6usize.pow(6)));
        assert!(Model::from_ref("klein:z2").is_err());
        assert!(Model::from_ref("torus:nope").is_err());
        let spec = ModelSpec::parse_ref("wall1x2:s3:wall=full").unwrap();
        assert_eq!(spec.subalgebra.as_deref(), Some("full"));
        let json = serde_json::to_string(&spec).unwrap();
        let back: ModelSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_ref(), spec.to_ref());
    }

    #[test]
    fn tags_must_match_data() {
        let h = zoo::builtin("z2").unwrap();
        let disk = lattice::disk_square(1, 1).unwrap();
        assert!(matches!(
            Model::new(disk, &h, None, None),
            Err(Error::ModelInconsistency(_))
        ));
        let torus = lattice::torus_square(2, 2).unwrap();
        let k = subalgebra_ref(&h, "full").unwrap();
        assert!(Model::new(torus, &h, None, Some(DefectInput::boundary_from_subalgebra(&h, k))).is_err());
    }

    #[test]
    fn left_comodule_boundary_is_rejected() {
        let h = zoo::builtin("z2").unwrap();
        let k = subalgebra_ref(&h, "full").unwrap();
        let left = comodule_from_hopf_subalgebra(&h, &k, Side::Left);
        assert!(matches!(
            boundary_as_bicomodule(&left),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }
}
