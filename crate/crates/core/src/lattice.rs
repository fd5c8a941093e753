//! Cellulated surfaces stored as darts.
//!
//! A dart is an edge with a traversal direction. Every face is a cycle of darts running
//! counterclockwise, so the face lies on the left of each of its darts. A site is a corner
//! `(face, pos)`: the face together with the start vertex of `faces[face][pos]`, and the
//! face's coproduct fan begins there.
//!
//! On open surfaces the outer region is not a face; boundary edges are used by exactly one
//! dart.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Bulk1,
    Bulk2,
    Boundary,
    Wall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Sphere,
    Torus,
    Disk,
}

impl Surface {
    pub fn euler_characteristic(self) -> i64 {
        match self {
            Surface::Sphere => 2,
            Surface::Torus => 0,
            Surface::Disk => 1,
        }
    }

    pub fn is_closed(self) -> bool {
        self != Surface::Disk
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: usize,
    pub forward: bool,
}

impl Dart {
    pub fn new(edge: usize, forward: bool) -> Self {
        Dart { edge, forward }
    }

    pub fn reverse(self) -> Self {
        Dart {
            edge: self.edge,
            forward: !self.forward,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub tag: Tag,
}

/// A corner of a face. `vertex` is derived from `(face, pos)` and kept for convenience.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub vertex: usize,
    pub face: usize,
    pub pos: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Edges around a vertex or a face in fan order, with the ± choice of edge operator.
pub type Fan = Vec<(usize, Sign)>;

#[derive(Clone, Debug)]
pub struct Cellulation {
    pub surface: Surface,
    pub n_vertices: usize,
    pub edges: Vec<Edge>,
    /// CCW dart cycles; `faces[f][0]` leaves the face's starting site.
    pub faces: Vec<Vec<Dart>>,
    pub boundary_loops: Vec<Vec<usize>>,
    /// `(face, pos)` of each dart, indexed `[edge][forward as usize]`.
    dart_loc: Vec<[Option<(usize, usize)>; 2]>,
    face_region: Vec<Tag>,
}

impl Cellulation {
    pub fn new(
        surface: Surface,
        n_vertices: usize,
        edges: Vec<Edge>,
        faces: Vec<Vec<Dart>>,
        boundary_loops: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::Lattice(m));
        for (e, ed) in edges.iter().enumerate() {
            if ed.tail >= n_vertices || ed.head >= n_vertices {
                return bad(format!("edge {e} references a missing vertex"));
            }
            if ed.tail == ed.head {
                return bad(format!("edge {e} is a self-loop at vertex {}", ed.tail));
            }
        }
        let mut dart_loc = vec![[None, None]; edges.len()];
        for (f, darts) in faces.iter().enumerate() {
            if darts.len() < 2 {
                return bad(format!("face {f} has fewer than two edges"));
            }
            for (pos, d) in darts.iter().enumerate() {
                if d.edge >= edges.len() {
                    return bad(format!("face {f} references missing edge {}", d.edge));
                }
                let slot = &mut dart_loc[d.edge][d.forward as usize];
                if slot.is_some() {
                    return bad(format!("edge {} traversed twice in the same direction", d.edge));
                }
                *slot = Some((f, pos));
            }
        }
        let mut c = Cellulation {
            surface,
            n_vertices,
            edges,
            faces,
            boundary_loops,
            dart_loc,
            face_region: Vec::new(),
        };
        for (f, darts) in c.faces.iter().enumerate() {
            for (pos, d) in darts.iter().enumerate() {
                let next = darts[(pos + 1) % darts.len()];
                if c.end(*d) != c.start(next) {
                    return bad(format!("face {f} is not a closed dart cycle at position {pos}"));
                }
            }
        }
        for (e, ed) in c.edges.iter().enumerate() {
            let used = c.dart_loc[e].iter().filter(|x| x.is_some()).count();
            let want = if ed.tag == Tag::Boundary { 1 } else { 2 };
            if used == 0 {
                return bad(format!("edge {e} is dangling (in no face)"));
            }
            if used != want {
                return bad(format!("edge {e} ({:?}) lies in {used} faces, expected {want}", ed.tag));
            }
        }
        if surface.is_closed() && c.edges.iter().any(|e| e.tag == Tag::Boundary) {
            return bad("closed surface with boundary edges".into());
        }
        let chi = c.n_vertices as i64 - c.edges.len() as i64 + c.faces.len() as i64;
        if chi != surface.euler_characteristic() {
            return bad(format!(
                "Euler characteristic {chi} does not match {:?} ({})",
                surface,
                surface.euler_characteristic()
            ));
        }
        // every interior vertex must have a single rotation orbit
        for v in 0..c.n_vertices {
            if c.is_boundary_vertex(v) {
                continue;
            }
            let out = c.outgoing_darts(v);
            let Some(&o0) = out.first() else {
                return bad(format!("vertex {v} is isolated"));
            };
            let mut seen = 1;
            let mut o = c.rot_next(o0).expect("interior dart lies in a face");
            while o != o0 {
                seen += 1;
                if seen > out.len() {
                    return bad(format!("rotation at vertex {v} does not close"));
                }
                o = c.rot_next(o).expect("interior dart lies in a face");
            }
            if seen != out.len() {
                return bad(format!("vertex {v} is not a disk neighbourhood"));
            }
        }
        c.face_region = c.compute_face_regions()?;
        Ok(c)
    }

    fn compute_face_regions(&self) -> Result<Vec<Tag>> {
        let mut out = Vec::with_capacity(self.faces.len());
        for (f, darts) in self.faces.iter().enumerate() {
            let mut region = None;
            for d in darts {
                let r = match self.edges[d.edge].tag {
                    Tag::Bulk1 | Tag::Boundary => Tag::Bulk1,
                    Tag::Bulk2 => Tag::Bulk2,
                    // the H₁ region is on the left of a wall edge
                    Tag::Wall => {
                        if d.forward {
                            Tag::Bulk1
                        } else {
                            Tag::Bulk2
                        }
                    }
                };
                match region {
                    None => region = Some(r),
                    Some(x) if x != r => {
                        return Err(Error::Lattice(format!("face {f} touches both bulk regions")))
                    }
                    _ => {}
                }
            }
            out.push(region.expect("faces are nonempty"));
        }
        Ok(out)
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Bulk region (`Bulk1` or `Bulk2`) a face belongs to.
    pub fn face_region(&self, f: usize) -> Tag {
        self.face_region[f]
    }

    pub fn start(&self, d: Dart) -> usize {
        let e = &self.edges[d.edge];
        if d.forward {
            e.tail
        } else {
            e.head
        }
    }

    pub fn end(&self, d: Dart) -> usize {
        self.start(d.reverse())
    }

    /// Face and position of a dart, or `None` for the outer side of a boundary edge.
    pub fn dart_location(&self, d: Dart) -> Option<(usize, usize)> {
        self.dart_loc[d.edge][d.forward as usize]
    }

    pub fn site(&self, face: usize, pos: usize) -> Site {
        let n = self.faces[face].len();
        let pos = pos % n;
        Site {
            vertex: self.start(self.faces[face][pos]),
            face,
            pos,
        }
    }

    pub fn sites(&self) -> Vec<Site> {
        let mut out = Vec::new();
        for (f, darts) in self.faces.iter().enumerate() {
            for pos in 0..darts.len() {
                out.push(self.site(f, pos));
            }
        }
        out
    }

    /// The face's starting site.
    pub fn face_start(&self, f: usize) -> Site {
        self.site(f, 0)
    }

    /// First corner of face `f` at vertex `v`.
    pub fn site_at(&self, v: usize, f: usize) -> Option<Site> {
        (0..self.faces[f].len())
            .map(|p| self.site(f, p))
            .find(|s| s.vertex == v)
    }

    /// Some site at vertex `v` (the first corner in face order).
    pub fn vertex_site(&self, v: usize) -> Option<Site> {
        self.sites().into_iter().find(|s| s.vertex == v)
    }

    pub fn outgoing(&self, s: Site) -> Dart {
        self.faces[s.face][s.pos]
    }

    pub fn incoming(&self, s: Site) -> Dart {
        let n = self.faces[s.face].len();
        self.faces[s.face][(s.pos + n - 1) % n]
    }

    pub fn corner_of(&self, outgoing: Dart) -> Option<Site> {
        self.dart_location(outgoing).map(|(f, p)| self.site(f, p))
    }

    pub fn outgoing_darts(&self, v: usize) -> Vec<Dart> {
        let mut out = Vec::new();
        for (e, ed) in self.edges.iter().enumerate() {
            if ed.tail == v {
                out.push(Dart::new(e, true));
            }
            if ed.head == v {
                out.push(Dart::new(e, false));
            }
        }
        out
    }

    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].tail == v || self.edges[e].head == v)
            .collect()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.incident_edges(v)
            .iter()
            .any(|&e| self.edges[e].tag == Tag::Boundary)
    }

    pub fn is_wall_vertex(&self, v: usize) -> bool {
        self.incident_edges(v)
            .iter()
            .any(|&e| self.edges[e].tag == Tag::Wall)
    }

    /// Region of a vertex none of whose edges are boundary or wall edges.
    pub fn vertex_region(&self, v: usize) -> Option<Tag> {
        let tags: Vec<Tag> = self
            .incident_edges(v)
            .iter()
            .map(|&e| self.edges[e].tag)
            .collect();
        match tags.first() {
            Some(&t) if tags.iter().all(|&x| x == t) && matches!(t, Tag::Bulk1 | Tag::Bulk2) => Some(t),
            _ => None,
        }
    }

    /// Next outgoing dart counterclockwise around its start vertex.
    pub fn rot_next(&self, o: Dart) -> Option<Dart> {
        let s = self.corner_of(o)?;
        Some(self.incoming(s).reverse())
    }

    /// Next outgoing dart clockwise around its start vertex.
    pub fn rot_prev(&self, o: Dart) -> Option<Dart> {
        let (f, p) = self.dart_location(o.reverse())?;
        let n = self.faces[f].len();
        Some(self.faces[f][(p + 1) % n])
    }

    /// Edges around the vertex counterclockwise from the site with their L± choice,
    /// and edges around the face counterclockwise from the site with their T± choice.
    pub fn site_fans(&self, s: Site) -> Result<(Fan, Fan)> {
        Ok((self.vertex_fan(s)?, self.face_fan(s)))
    }

    /// L₋ when the vertex is the edge's tail, L₊ when it is the head.
    pub fn vertex_fan(&self, s: Site) -> Result<Fan> {
        let o0 = self.outgoing(s);
        let mut out = Vec::new();
        let mut o = o0;
        loop {
            o = self.rot_next(o).ok_or_else(|| {
                Error::Lattice(format!("vertex {} is on the boundary; no closed fan", s.vertex))
            })?;
            out.push((o.edge, if o.forward { Sign::Minus } else { Sign::Plus }));
            if o == o0 {
                break;
            }
        }
        Ok(out)
    }

    /// T₋ when the face traverses the edge along its direction, T₊ otherwise.
    pub fn face_fan(&self, s: Site) -> Fan {
        let darts = &self.faces[s.face];
        let n = darts.len();
        (0..n)
            .map(|k| {
                let d = darts[(s.pos + k) % n];
                (d.edge, if d.forward { Sign::Minus } else { Sign::Plus })
            })
            .collect()
    }

    /// The corner after `s` going counterclockwise around its face.
    pub fn face_next(&self, s: Site) -> Site {
        self.site(s.face, s.pos + 1)
    }

    pub fn face_prev(&self, s: Site) -> Site {
        let n = self.faces[s.face].len();
        self.site(s.face, s.pos + n - 1)
    }

    /// The corner at the same vertex one face counterclockwise.
    pub fn vertex_ccw(&self, s: Site) -> Option<Site> {
        self.corner_of(self.incoming(s).reverse())
    }

    /// The corner at the same vertex one face clockwise.
    pub fn vertex_cw(&self, s: Site) -> Option<Site> {
        self.rot_prev(self.outgoing(s)).and_then(|o| self.corner_of(o))
    }

    /// Dual edge of `e` as (tail face, head face): from the face on the right of `e`
    /// to the face on its left, i.e. `e` rotated counterclockwise.
    pub fn dual_edge(&self, e: usize) -> (Option<usize>, Option<usize>) {
        let left = self.dart_loc[e][1].map(|x| x.0);
        let right = self.dart_loc[e][0].map(|x| x.0);
        (right, left)
    }

    /// Dual cellulation of a closed surface. Dual vertex `f` is face `f`, dual face `v` is
    /// vertex `v`, and dual edges keep the index of the edge they cross.
    pub fn dual(&self) -> Result<Cellulation> {
        if !self.surface.is_closed() {
            return Err(Error::Lattice("dual is only built for closed surfaces".into()));
        }
        let edges = (0..self.edges.len())
            .map(|e| {
                let (t, h) = self.dual_edge(e);
                Edge {
                    tail: t.expect("closed"),
                    head: h.expect("closed"),
                    tag: self.edges[e].tag,
                }
            })
            .collect();
        let mut faces = Vec::with_capacity(self.n_vertices);
        for v in 0..self.n_vertices {
            let s = self
                .vertex_site(v)
                .ok_or_else(|| Error::Lattice(format!("vertex {v} has no corner")))?;
            let o0 = self.outgoing(s);
            let mut cyc = Vec::new();
            let mut o = o0;
            loop {
                o = self.rot_next(o).expect("closed");
                cyc.push(Dart::new(o.edge, o.forward));
                if o == o0 {
                    break;
                }
            }
            faces.push(cyc);
        }
        Cellulation::new(self.surface, self.faces.len(), edges, faces, Vec::new())
    }

    /// Classifies the triangle from `s0` to `s1` through `edge`.
    pub fn classify_triangle(&self, s0: Site, s1: Site, edge: usize) -> Result<Triangle> {
        let err = || {
            Error::Lattice(format!(
                "no triangle from {s0:?} to {s1:?} through edge {edge}"
            ))
        };
        if s0.face == s1.face {
            let out = self.outgoing(s0);
            let inc = self.incoming(s0);
            if s1 == self.face_next(s0) && out.edge == edge {
                return Ok(Triangle {
                    kind: TriangleKind::Direct,
                    chirality: Chirality::Right,
                    s0,
                    s1,
                    edge,
                    along: out.forward,
                });
            }
            if s1 == self.face_prev(s0) && inc.edge == edge {
                return Ok(Triangle {
                    kind: TriangleKind::Direct,
                    chirality: Chirality::Left,
                    s0,
                    s1,
                    edge,
                    along: !inc.forward,
                });
            }
            return Err(err());
        }
        if s0.vertex == s1.vertex {
            let inc = self.incoming(s0);
            let out = self.outgoing(s0);
            if self.vertex_ccw(s0) == Some(s1) && inc.edge == edge {
                return Ok(Triangle {
                    kind: TriangleKind::Dual,
                    chirality: Chirality::Right,
                    s0,
                    s1,
                    edge,
                    along: !inc.forward,
                });
            }
            if self.vertex_cw(s0) == Some(s1) && out.edge == edge {
                return Ok(Triangle {
                    kind: TriangleKind::Dual,
                    chirality: Chirality::Left,
                    s0,
                    s1,
                    edge,
                    along: !out.forward,
                });
            }
        }
        Err(err())
    }

    pub fn make_ribbon(&self, tris: &[(Site, Site, usize)]) -> Result<Ribbon> {
        let triangles = tris
            .iter()
            .map(|&(a, b, e)| self.classify_triangle(a, b, e))
            .collect::<Result<Vec<_>>>()?;
        Ribbon::new(triangles)
    }

    /// Ribbon obtained by walking from `start` through the given moves.
    pub fn walk(&self, start: Site, steps: &[Step]) -> Result<Ribbon> {
        let mut s = start;
        let mut tris = Vec::with_capacity(steps.len());
        for step in steps {
            let (next, edge) = match step {
                Step::FaceNext => (Some(self.face_next(s)), self.outgoing(s).edge),
                Step::FacePrev => (Some(self.face_prev(s)), self.incoming(s).edge),
                Step::VertexCcw => (self.vertex_ccw(s), self.incoming(s).edge),
                Step::VertexCw => (self.vertex_cw(s), self.outgoing(s).edge),
            };
            let next = next.ok_or_else(|| {
                Error::Lattice(format!("step {step:?} from {s:?} leaves the surface"))
            })?;
            tris.push(self.classify_triangle(s, next, edge)?);
            s = next;
        }
        Ribbon::new(tris)
    }

    /// Closed type-A ribbon of dual triangles counterclockwise around the site's vertex.
    pub fn vertex_loop(&self, s: Site) -> Result<Ribbon> {
        let n = self.vertex_fan(s)?.len();
        self.walk(s, &vec![Step::VertexCcw; n])
    }

    /// Closed type-B ribbon of direct triangles counterclockwise around the site's face.
    pub fn face_loop(&self, s: Site) -> Result<Ribbon> {
        let n = self.faces[s.face].len();
        self.walk(s, &vec![Step::FaceNext; n])
    }

    pub fn to_file(&self) -> LatticeFile {
        LatticeFile {
            surface: self.surface,
            vertices: self.n_vertices,
            edges: self
                .edges
                .iter()
                .map(|e| (e.tail, e.head, e.tag))
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|ds| {
                    ds.iter()
                        .map(|d| (d.edge, if d.forward { Sign::Plus } else { Sign::Minus }))
                        .collect()
                })
                .collect(),
            face_start_sites: (0..self.faces.len()).map(|f| self.face_start(f).vertex).collect(),
            boundary_loops: self.boundary_loops.clone(),
        }
    }

    pub fn from_file(file: &LatticeFile) -> Result<Self> {
        if file.face_start_sites.len() != file.faces.len() {
            return Err(Error::Lattice("one start site per face required".into()));
        }
        let edges: Vec<Edge> = file
            .edges
            .iter()
            .map(|&(tail, head, tag)| Edge { tail, head, tag })
            .collect();
        let mut faces = Vec::with_capacity(file.faces.len());
        for (f, list) in file.faces.iter().enumerate() {
            let darts: Vec<Dart> = list
                .iter()
                .map(|&(e, s)| Dart::new(e, s == Sign::Plus))
                .collect();
            if darts.iter().any(|d| d.edge >= edges.len()) {
                return Err(Error::Lattice(format!("face {f} references a missing edge")));
            }
            let start = file.face_start_sites[f];
            let at = darts
                .iter()
                .position(|d| {
                    let e = &edges[d.edge];
                    (if d.forward { e.tail } else { e.head }) == start
                })
                .ok_or_else(|| {
                    Error::Lattice(format!("start vertex {start} is not on face {f}"))
                })?;
            let mut rotated = darts[at..].to_vec();
            rotated.extend_from_slice(&darts[..at]);
            faces.push(rotated);
        }
        Cellulation::new(
            file.surface,
            file.vertices,
            edges,
            faces,
            file.boundary_loops.clone(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: LatticeFile = serde_json::from_str(s)?;
        Cellulation::from_file(&file)
    }
}

/// Serialized lattice. Faces list `(edge, +)` for a traversal along the edge direction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeFile {
    pub surface: Surface,
    pub vertices: usize,
    pub edges: Vec<(usize, usize, Tag)>,
    pub faces: Vec<Vec<(usize, Sign)>>,
    pub face_start_sites: Vec<usize>,
    #[serde(default)]
    pub boundary_loops: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleKind {
    Direct,
    Dual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chirality {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub kind: TriangleKind,
    pub chirality: Chirality,
    pub s0: Site,
    pub s1: Site,
    pub edge: usize,
    /// The edge (direct) or dual edge (dual) points from `s0` towards `s1`.
    pub along: bool,
}

impl Triangle {
    /// Ribbon type this triangle is allowed in.
    pub fn ribbon_type(&self) -> RibbonType {
        match (self.kind, self.chirality) {
            (TriangleKind::Direct, Chirality::Left) | (TriangleKind::Dual, Chirality::Right) => {
                RibbonType::A
            }
            _ => RibbonType::B,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RibbonType {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// Direct right-handed triangle along the current face.
    FaceNext,
    /// Direct left-handed triangle backwards along the current face.
    FacePrev,
    /// Dual right-handed triangle counterclockwise around the current vertex.
    VertexCcw,
    /// Dual left-handed triangle clockwise around the current vertex.
    VertexCw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ribbon {
    pub triangles: Vec<Triangle>,
    pub kind: RibbonType,
    pub closed: bool,
}

impl Ribbon {
    pub fn new(triangles: Vec<Triangle>) -> Result<Self> {
        let Some(first) = triangles.first() else {
            return Err(Error::Lattice("empty ribbon".into()));
        };
        let kind = first.ribbon_type();
        for (i, t) in triangles.iter().enumerate() {
            if t.ribbon_type() != kind {
                return Err(Error::Lattice(format!(
                    "triangle {i} ({:?} {:?}) does not fit a type-{kind:?} ribbon",
                    t.kind, t.chirality
                )));
            }
            if i + 1 < triangles.len() && t.s1 != triangles[i + 1].s0 {
                return Err(Error::Lattice(format!("ribbon chain broken after triangle {i}")));
            }
            if triangles[..i].iter().any(|u| u.edge == t.edge) {
                return Err(Error::Lattice(format!(
                    "ribbon overlaps itself on edge {}",
                    t.edge
                )));
            }
        }
        let closed = triangles.last().unwrap().s1 == first.s0;
        Ok(Ribbon {
            triangles,
            kind,
            closed,
        })
    }

    pub fn start(&self) -> Site {
        self.triangles[0].s0
    }

    pub fn end(&self) -> Site {
        self.triangles.last().unwrap().s1
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn edges(&self) -> Vec<usize> {
        self.triangles.iter().map(|t| t.edge).collect()
    }

    /// Sub-ribbon of triangles `range`; closedness is recomputed.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Ribbon {
        let triangles = self.triangles[range].to_vec();
        let closed = triangles.last().unwrap().s1 == triangles[0].s0;
        Ribbon {
            triangles,
            kind: self.kind,
            closed,
        }
    }
}

// ---------------------------------------------------------------------------
// presets

struct Builder {
    edges: Vec<Edge>,
}

impl Builder {
    fn edge(&mut self, tail: usize, head: usize, tag: Tag) -> usize {
        self.edges.push(Edge { tail, head, tag });
        self.edges.len() - 1
    }
}

/// Square lattice on an n×m torus.
///
/// Vertex (i, j) has index `j·n + i`; edge `2(j·n + i)` runs (i,j)→(i+1,j) and edge
/// `2(j·n + i) + 1` runs (i,j)→(i,j+1). For n = 1 the horizontal identification is
/// sheared by one row, (i+1, j) ~ (i, j+1), so no edge closes on itself.
pub fn torus_square(n: usize, m: usize) -> Result<Cellulation> {
    if n == 0 || m < 2 {
        return Err(Error::Lattice(format!("torus_square({n},{m}) needs n ≥ 1 and m ≥ 2")));
    }
    let shear = usize::from(n == 1);
    let vid = |i: usize, j: usize| -> usize {
        let (mut i, mut j) = (i, j);
        while i >= n {
            i -= n;
            j += shear;
        }
        (j % m) * n + i
    };
    let h = |i: usize, j: usize| 2 * vid(i, j);
    let v = |i: usize, j: usize| 2 * vid(i, j) + 1;
    let mut b = Builder { edges: Vec::new() };
    for j in 0..m {
        for i in 0..n {
            b.edge(vid(i, j), vid(i + 1, j), Tag::Bulk1);
            b.edge(vid(i, j), vid(i, j + 1), Tag::Bulk1);
        }
    }
    let mut faces = Vec::new();
    for j in 0..m {
        for i in 0..n {
            faces.push(vec![
                Dart::new(h(i, j), true),
                Dart::new(v(i + 1, j), true),
                Dart::new(h(i, j + 1), false),
                Dart::new(v(i, j), false),
            ]);
        }
    }
    Cellulation::new(Surface::Torus, n * m, b.edges, faces, Vec::new())
}

/// Tetrahedron with edges directed from lower to higher vertex index.
pub fn sphere_tetrahedron() -> Result<Cellulation> {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let edges: Vec<Edge> = pairs
        .iter()
        .map(|&(tail, head)| Edge {
            tail,
            head,
            tag: Tag::Bulk1,
        })
        .collect();
    let cycles = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];
    let faces = cycles
        .iter()
        .map(|cyc| darts_from_cycle(&edges, cyc))
        .collect::<Result<Vec<_>>>()?;
    Cellulation::new(Surface::Sphere, 4, edges, faces, Vec::new())
}

fn darts_from_cycle(edges: &[Edge], cyc: &[usize]) -> Result<Vec<Dart>> {
    let n = cyc.len();
    (0..n)
        .map(|k| {
            let (a, b) = (cyc[k], cyc[(k + 1) % n]);
            edges
                .iter()
                .enumerate()
                .find_map(|(e, ed)| {
                    if ed.tail == a && ed.head == b {
                        Some(Dart::new(e, true))
                    } else if ed.tail == b && ed.head == a {
                        Some(Dart::new(e, false))
                    } else {
                        None
                    }
                })
                .ok_or_else(|| Error::Lattice(format!("no edge between {a} and {b}")))
        })
        .collect()
}

/// n×m squares forming a disk. Vertex (i, j) has index `j·(n+1) + i`.
///
/// Interior edges point right and up. Boundary edges run clockwise around the disk so the
/// bulk lies on their right; the single boundary loop lists the vertices in that order.
pub fn disk_square(n: usize, m: usize) -> Result<Cellulation> {
    if n == 0 || m == 0 {
        return Err(Error::Lattice("disk_square needs n, m ≥ 1".into()));
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut b = Builder { edges: Vec::new() };
    // horizontal edges between (i,j) and (i+1,j)
    let mut hor = vec![vec![Dart::new(0, true); m + 1]; n];
    for j in 0..=m {
        for (i, col) in hor.iter_mut().enumerate() {
            col[j] = if j == 0 {
                Dart::new(b.edge(vid(i + 1, j), vid(i, j), Tag::Boundary), false)
            } else if j == m {
                Dart::new(b.edge(vid(i, j), vid(i + 1, j), Tag::Boundary), true)
            } else {
                Dart::new(b.edge(vid(i, j), vid(i + 1, j), Tag::Bulk1), true)
            };
        }
    }
    // vertical edges between (i,j) and (i,j+1); the dart stored points up
    let mut ver = vec![vec![Dart::new(0, true); m]; n + 1];
    for (i, col) in ver.iter_mut().enumerate() {
        for (j, slot) in col.iter_mut().enumerate() {
            *slot = if i == n {
                Dart::new(b.edge(vid(i, j + 1), vid(i, j), Tag::Boundary), false)
            } else {
                let tag = if i == 0 { Tag::Boundary } else { Tag::Bulk1 };
                Dart::new(b.edge(vid(i, j), vid(i, j + 1), tag), true)
            };
        }
    }
    let mut faces = Vec::new();
    for j in 0..m {
        for i in 0..n {
            faces.push(vec![
                hor[i][j],
                ver[i + 1][j],
                hor[i][j + 1].reverse(),
                ver[i][j].reverse(),
            ]);
        }
    }
    let mut boundary = Vec::new();
    for j in 0..m {
        boundary.push(vid(0, j));
    }
    for i in 0..n {
        boundary.push(vid(i, m));
    }
    for j in (1..=m).rev() {
        boundary.push(vid(n, j));
    }
    for i in (1..=n).rev() {
        boundary.push(vid(i, 0));
    }
    Cellulation::new(
        Surface::Disk,
        (n + 1) * (m + 1),
        b.edges,
        faces,
        vec![boundary],
    )
}

/// A k-gon disk split into k triangles around a central bulk vertex 0.
///
/// Spoke `i` (edge i−1) runs from the centre to rim vertex i. Rim edges run clockwise,
/// i+1 → i, so the bulk is on their right. Face i−1 is (0, i, i+1).
pub fn disk_wheel(k: usize) -> Result<Cellulation> {
    if k < 2 {
        return Err(Error::Lattice("disk_wheel needs k ≥ 2".into()));
    }
    let mut b = Builder { edges: Vec::new() };
    for i in 1..=k {
        b.edge(0, i, Tag::Bulk1);
    }
    let rim: Vec<usize> = (1..=k)
        .map(|i| b.edge(i % k + 1, i, Tag::Boundary))
        .collect();
    let faces = (0..k)
        .map(|i| {
            vec![
                Dart::new(i, true),
                Dart::new(rim[i], false),
                Dart::new((i + 1) % k, false),
            ]
        })
        .collect();
    let boundary = (1..=k).rev().collect();
    Cellulation::new(Surface::Disk, k + 1, b.edges, faces, vec![boundary])
}

/// A 2n×m square torus cut by two vertical walls: columns `0..n` form the H₁ region and
/// columns `n..2n` the H₂ region.
///
/// The wall at x = n points up and the one at x = 0 points down, so H₁ is on the left of
/// both. Vertex and edge numbering follows [`torus_square`] with width 2n.
pub fn wall_strip(n: usize, m: usize) -> Result<Cellulation> {
    if n == 0 || m < 2 {
        return Err(Error::Lattice(format!("wall_strip({n},{m}) needs n ≥ 1 and m ≥ 2")));
    }
    let w = 2 * n;
    let vid = |i: usize, j: usize| (j % m) * w + (i % w);
    let mut b = Builder { edges: Vec::new() };
    let mut vert_fwd = vec![true; w * m];
    for j in 0..m {
        for i in 0..w {
            let region = if i < n { Tag::Bulk1 } else { Tag::Bulk2 };
            b.edge(vid(i, j), vid(i + 1, j), region);
            if i == 0 {
                b.edge(vid(i, j + 1), vid(i, j), Tag::Wall);
                vert_fwd[j * w + i] = false;
            } else if i == n {
                b.edge(vid(i, j), vid(i, j + 1), Tag::Wall);
            } else {
                b.edge(vid(i, j), vid(i, j + 1), region);
            }
        }
    }
    let h = |i: usize, j: usize| 2 * vid(i, j);
    let up = |i: usize, j: usize| {
        let k = vid(i, j);
        Dart::new(2 * k + 1, vert_fwd[k])
    };
    let mut faces = Vec::new();
    for j in 0..m {
        for i in 0..w {
            faces.push(vec![
                Dart::new(h(i, j), true),
                up(i + 1, j),
                Dart::new(h(i, j + 1), false),
                up(i, j).reverse(),
            ]);
        }
    }
    Cellulation::new(Surface::Torus, w * m, b.edges, faces, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(c: &Cellulation) -> (usize, usize, usize, i64) {
        (c.n_vertices, c.n_edges(), c.n_faces(), c.euler_characteristic())
    }

    #[test]
    fn preset_counts() {
        assert_eq!(counts(&torus_square(2, 2).unwrap()), (4, 8, 4, 0));
        assert_eq!(counts(&torus_square(1, 2).unwrap()), (2, 4, 2, 0));
        assert_eq!(counts(&torus_square(3, 2).unwrap()), (6, 12, 6, 0));
        assert_eq!(counts(&sphere_tetrahedron().unwrap()), (4, 6, 4, 2));
        let d = disk_square(2, 1).unwrap();
        assert_eq!(counts(&d), (6, 7, 2, 1));
        assert_eq!(d.boundary_loops.len(), 1);
        assert_eq!(d.boundary_loops[0].len(), 6);
        assert_eq!(counts(&wall_strip(2, 2).unwrap()), (8, 16, 8, 0));
        let w = disk_wheel(3).unwrap();
        assert_eq!(counts(&w), (4, 6, 3, 1));
        assert_eq!(w.vertex_region(0), Some(Tag::Bulk1));
        assert_eq!(w.vertex_fan(w.vertex_site(0).unwrap()).unwrap().len(), 3);
    }

    /// The 4-valent example: a vertex with edges j₄ (incoming from the left), j₅ (outgoing
    /// down), j₆ (incoming from the right) and j₁ (outgoing up); the face to the upper left
    /// is bounded by j₁, j₂, j₃, j₄ with j₂, j₃ pointing right and down respectively.
    fn cross() -> (Cellulation, Site, [usize; 6]) {
        // 3×3 torus; centre vertex (1,1) has index 4
        let c = torus_square(3, 3).unwrap();
        let vid = |i: usize, j: usize| j * 3 + i;
        let h = |i: usize, j: usize| 2 * vid(i, j);
        let v = |i: usize, j: usize| 2 * vid(i, j) + 1;
        // face (0,1) has corners (0,1),(1,1),(1,2),(0,2); its corner at (1,1) leaves along v(1,1)
        let f = vid(0, 1);
        let s = c.site_at(vid(1, 1), f).unwrap();
        (c, s, [v(1, 1), h(0, 2), v(0, 1), h(0, 1), v(1, 0), h(1, 1)])
    }

    #[test]
    fn four_valent_fans_follow_the_orientation_rules() {
        let (c, s, [up, top, left, west, down, east]) = cross();
        let (vf, ff) = c.site_fans(s).unwrap();
        // around the vertex: west (incoming, +), down (incoming from below, +),
        // east (outgoing, −), up (outgoing, −)
        assert_eq!(
            vf,
            vec![(west, Sign::Plus), (down, Sign::Plus), (east, Sign::Minus), (up, Sign::Minus)]
        );
        // around the face: up (forward, −), top (backward, +), left (backward, +), west (forward, −)
        assert_eq!(
            ff,
            vec![(up, Sign::Minus), (top, Sign::Plus), (left, Sign::Plus), (west, Sign::Minus)]
        );
        assert_eq!(vf.len(), 4);
    }

    fn reorient(c: &Cellulation, flip: &[usize]) -> Cellulation {
        let mut file = c.to_file();
        for &e in flip {
            let (t, h, tag) = file.edges[e];
            file.edges[e] = (h, t, tag);
        }
        for face in &mut file.faces {
            for (e, sg) in face.iter_mut() {
                if flip.contains(e) {
                    *sg = if *sg == Sign::Plus { Sign::Minus } else { Sign::Plus };
                }
            }
        }
        Cellulation::from_file(&file).unwrap()
    }

    #[test]
    fn four_valent_vertex_signs() {
        // j₁ = up, j₂ = top, j₃ = left, j₄ = west, j₅ = down, j₆ = east, oriented as in the
        // example: j₁, j₄ leave the vertex, j₅, j₆ arrive; j₁, j₂ run along the face.
        let (c, s, [j1, j2, j3, j4, j5, j6]) = cross();
        let c = reorient(&c, &[j2, j4, j6]);
        let s = c.site_at(s.vertex, s.face).unwrap();
        let (vf, ff) = c.site_fans(s).unwrap();
        use Sign::*;
        assert_eq!(vf, vec![(j4, Minus), (j5, Plus), (j6, Plus), (j1, Minus)]);
        assert_eq!(ff, vec![(j1, Minus), (j2, Minus), (j3, Plus), (j4, Plus)]);
    }

    #[test]
    fn reversing_an_edge_flips_its_sign_in_both_fans() {
        let (c, s, [up, ..]) = cross();
        let c2 = reorient(&c, &[up]);
        let s2 = c2.site_at(s.vertex, s.face).unwrap();
        let (vf1, ff1) = c.site_fans(s).unwrap();
        let (vf2, ff2) = c2.site_fans(s2).unwrap();
        let flip = |s: Sign| if s == Sign::Plus { Sign::Minus } else { Sign::Plus };
        for (a, b) in vf1.iter().zip(&vf2).chain(ff1.iter().zip(&ff2)) {
            assert_eq!(a.0, b.0);
            if a.0 == up {
                assert_eq!(flip(a.1), b.1);
            } else {
                assert_eq!(a.1, b.1);
            }
        }
    }

    #[test]
    fn trivalent_fan() {
        let c = sphere_tetrahedron().unwrap();
        for s in c.sites() {
            assert_eq!(c.vertex_fan(s).unwrap().len(), 3);
            assert_eq!(c.face_fan(s).len(), 3);
        }
    }

    #[test]
    fn validation_errors() {
        let e = |t, h| Edge { tail: t, head: h, tag: Tag::Bulk1 };
        let r = Cellulation::new(Surface::Sphere, 1, vec![e(0, 0)], vec![], vec![]);
        assert!(matches!(r, Err(Error::Lattice(m)) if m.contains("self-loop")));
        // a tetrahedron declared as a torus
        let mut f = sphere_tetrahedron().unwrap().to_file();
        f.surface = Surface::Torus;
        assert!(matches!(Cellulation::from_file(&f), Err(Error::Lattice(m)) if m.contains("Euler")));
        // an extra edge in no face
        let mut f = sphere_tetrahedron().unwrap().to_file();
        f.edges.push((0, 1, Tag::Bulk1));
        assert!(matches!(Cellulation::from_file(&f), Err(Error::Lattice(m)) if m.contains("dangling")));
        assert!(torus_square(2, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        for c in [torus_square(2, 2).unwrap(), disk_square(2, 2).unwrap(), wall_strip(1, 2).unwrap()] {
            let back = Cellulation::from_json(&c.to_json().unwrap()).unwrap();
            assert_eq!(back.edges, c.edges);
            assert_eq!(back.faces, c.faces);
            assert_eq!(back.boundary_loops, c.boundary_loops);
        }
    }

    #[test]
    fn dual_of_dual_restores_incidence() {
        for c in [torus_square(2, 2).unwrap(), torus_square(1, 2).unwrap(), sphere_tetrahedron().unwrap()] {
            let d = c.dual().unwrap();
            assert_eq!(d.n_vertices, c.n_faces());
            assert_eq!(d.n_faces(), c.n_vertices);
            let dd = d.dual().unwrap();
            assert_eq!(dd.n_vertices, c.n_vertices);
            // rotating twice by a quarter turn reverses every edge
            for (a, b) in c.edges.iter().zip(&dd.edges) {
                assert_eq!((a.tail, a.head), (b.head, b.tail));
            }
        }
    }

    #[test]
    fn elementary_loops_exist_everywhere() {
        for c in [torus_square(2, 2).unwrap(), sphere_tetrahedron().unwrap(), torus_square(1, 2).unwrap()] {
            for s in c.sites() {
                let a = c.vertex_loop(s).unwrap();
                assert!(a.closed);
                assert_eq!(a.kind, RibbonType::A);
                assert!(a.triangles.iter().all(|t| t.kind == TriangleKind::Dual));
                let b = c.face_loop(s).unwrap();
                assert!(b.closed);
                assert_eq!(b.kind, RibbonType::B);
                // the loop's edge order is the fan order
                let fan: Vec<usize> = c.vertex_fan(s).unwrap().iter().map(|x| x.0).collect();
                assert_eq!(a.edges(), fan);
                let ffan: Vec<usize> = c.face_fan(s).iter().map(|x| x.0).collect();
                assert_eq!(b.edges(), ffan);
            }
        }
    }

    #[test]
    fn ribbon_type_violations_are_rejected() {
        let c = torus_square(2, 2).unwrap();
        let s = c.face_start(0);
        // direct left-handed then dual left-handed
        let err = c.walk(s, &[Step::FacePrev, Step::VertexCw]);
        assert!(matches!(err, Err(Error::Lattice(m)) if m.contains("type-A")));
        let ok = c.walk(s, &[Step::FaceNext, Step::VertexCw, Step::FaceNext]).unwrap();
        assert_eq!(ok.kind, RibbonType::B);
        assert!(!ok.closed);
        let ok = c.walk(s, &[Step::FacePrev, Step::VertexCcw]).unwrap();
        assert_eq!(ok.kind, RibbonType::A);
        // broken chain
        let t1 = c.classify_triangle(s, c.face_next(s), c.outgoing(s).edge).unwrap();
        let t2 = c.classify_triangle(s, c.face_next(s), c.outgoing(s).edge).unwrap();
        assert!(Ribbon::new(vec![t1, t2]).is_err());
    }

    #[test]
    fn triangle_orientation_flags() {
        let c = torus_square(2, 2).unwrap();
        let s = c.face_start(0); // corner (0,0), outgoing h(0,0) forward
        let t = c.classify_triangle(s, c.face_next(s), c.outgoing(s).edge).unwrap();
        assert_eq!((t.kind, t.chirality, t.along), (TriangleKind::Direct, Chirality::Right, true));
        let t = c.classify_triangle(s, c.face_prev(s), c.incoming(s).edge).unwrap();
        // v(0,0) points up from s0's vertex (0,0) to s1's vertex (0,1)
        assert_eq!((t.chirality, t.along), (Chirality::Left, true));
        let ccw = c.vertex_ccw(s).unwrap();
        let t = c.classify_triangle(s, ccw, c.incoming(s).edge).unwrap();
        assert_eq!((t.kind, t.chirality), (TriangleKind::Dual, Chirality::Right));
        assert!(c.classify_triangle(s, ccw, c.outgoing(s).edge).is_err());
    }

    #[test]
    fn disk_boundary_has_bulk_on_the_right() {
        let c = disk_square(2, 2).unwrap();
        for (e, ed) in c.edges.iter().enumerate() {
            if ed.tag == Tag::Boundary {
                // only the backward dart is inside a face: the face is on the right
                assert!(c.dart_location(Dart::new(e, true)).is_none());
                assert!(c.dart_location(Dart::new(e, false)).is_some());
            }
        }
        let interior: Vec<usize> = (0..c.n_vertices).filter(|&v| !c.is_boundary_vertex(v)).collect();
        assert_eq!(interior, vec![4]);
    }

    #[test]
    fn wall_strip_regions() {
        let c = wall_strip(2, 2).unwrap();
        let tags: std::collections::BTreeSet<Tag> = c.edges.iter().map(|e| e.tag).collect();
        assert!(tags.contains(&Tag::Bulk1) && tags.contains(&Tag::Wall) && tags.contains(&Tag::Bulk2));
        for (e, ed) in c.edges.iter().enumerate() {
            if ed.tag == Tag::Wall {
                let (l, _) = c.dart_location(Dart::new(e, true)).unwrap();
                let (r, _) = c.dart_location(Dart::new(e, false)).unwrap();
                assert_eq!(c.face_region(l), Tag::Bulk1);
                assert_eq!(c.face_region(r), Tag::Bulk2);
            }
        }
        assert_eq!(counts(&wall_strip(1, 2).unwrap()), (4, 8, 4, 0));
    }
}
