//! Oriented 2-complexes with named boundary graphs.

use crate::spin_network::{Graph, Link};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "+")]
    Forward,
    #[serde(rename = "-")]
    Backward,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Forward => Dir::Backward,
            Dir::Backward => Dir::Forward,
        }
    }
}

/// A face is a closed edge path, read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Face {
    pub id: usize,
    pub edges: Vec<(usize, Dir)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryLinkSpec {
    Edge(usize),
    Mapped { edge: usize, link: usize },
}

impl BoundaryLinkSpec {
    pub fn edge(&self) -> usize {
        match *self {
            BoundaryLinkSpec::Edge(e) | BoundaryLinkSpec::Mapped { edge: e, .. } => e,
        }
    }
    pub fn link(&self) -> usize {
        match *self {
            BoundaryLinkSpec::Edge(e) => e,
            BoundaryLinkSpec::Mapped { link, .. } => link,
        }
    }
}

/// A boundary graph: a set of complex edges, each read as a link.
///
/// Link ids default to edge ids and node ids to vertex ids; `nodes` may
/// rename vertices and list isolated boundary vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub name: String,
    pub links: Vec<BoundaryLinkSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty", deserialize_with = "crate::keys::usize_keys")]
    pub nodes: BTreeMap<usize, usize>,
}

impl Boundary {
    pub fn edges(&self) -> Vec<usize> {
        self.links.iter().map(|l| l.edge()).collect()
    }

    pub fn node_of(&self, vertex: usize) -> usize {
        self.nodes.get(&vertex).copied().unwrap_or(vertex)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoComplex {
    pub vertices: Vec<usize>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    #[serde(default)]
    pub boundaries: Vec<Boundary>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("duplicate {kind} id {id}")]
    Duplicate { kind: &'static str, id: usize },
    #[error("edge {edge}: vertex {vertex} does not exist")]
    DanglingEdge { edge: usize, vertex: usize },
    #[error("face {face}: edge {edge} does not exist")]
    UnknownEdge { face: usize, edge: usize },
    #[error("face {face} is not a closed path at position {position}")]
    OpenFace { face: usize, position: usize },
    #[error("boundary `{boundary}`: {reason}")]
    Boundary { boundary: String, reason: String },
    #[error("boundaries `{0}` and `{1}` share edge {2}")]
    SharedBoundaryEdge(String, String, usize),
    #[error("move not applicable: {0}")]
    Inapplicable(String),
    #[error("no boundary named `{0}`")]
    NoSuchBoundary(String),
}

/// A refinement move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    /// Insert a vertex in the middle of an interior edge.
    SplitEdge { edge: usize },
    /// Cut a face along a new edge from the start of position `i` to the
    /// start of position `j` (`0 <= i <= j <= len`).
    SplitFace { face: usize, i: usize, j: usize },
}

impl TwoComplex {
    pub fn edge(&self, id: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn face(&self, id: usize) -> Option<&Face> {
        self.faces.iter().find(|f| f.id == id)
    }

    pub fn boundary(&self, name: &str) -> Option<&Boundary> {
        self.boundaries.iter().find(|b| b.name == name)
    }

    pub fn boundary_edges(&self) -> BTreeSet<usize> {
        self.boundaries.iter().flat_map(|b| b.edges()).collect()
    }

    fn next_vertex(&self) -> usize {
        self.vertices.iter().max().map_or(0, |v| v + 1)
    }

    fn next_edge(&self) -> usize {
        self.edges.iter().map(|e| e.id).max().map_or(0, |v| v + 1)
    }

    fn next_face(&self) -> usize {
        self.faces.iter().map(|f| f.id).max().map_or(0, |v| v + 1)
    }

    /// Start and end vertex of a traversal.
    fn ends(&self, e: usize, d: Dir) -> (usize, usize) {
        let ed = self.edge(e).expect("edge exists");
        match d {
            Dir::Forward => (ed.src, ed.dst),
            Dir::Backward => (ed.dst, ed.src),
        }
    }

    pub fn validate(&self) -> Result<(), ComplexError> {
        let mut vs = BTreeSet::new();
        for &v in &self.vertices {
            if !vs.insert(v) {
                return Err(ComplexError::Duplicate { kind: "vertex", id: v });
            }
        }
        let mut es = BTreeSet::new();
        for e in &self.edges {
            if !es.insert(e.id) {
                return Err(ComplexError::Duplicate { kind: "edge", id: e.id });
            }
            for v in [e.src, e.dst] {
                if !vs.contains(&v) {
                    return Err(ComplexError::DanglingEdge { edge: e.id, vertex: v });
                }
            }
        }
        let mut fs = BTreeSet::new();
        for f in &self.faces {
            if !fs.insert(f.id) {
                return Err(ComplexError::Duplicate { kind: "face", id: f.id });
            }
            for &(e, _) in &f.edges {
                if !es.contains(&e) {
                    return Err(ComplexError::UnknownEdge { face: f.id, edge: e });
                }
            }
            let k = f.edges.len();
            for i in 0..k {
                let (_, end) = self.ends(f.edges[i].0, f.edges[i].1);
                let (start, _) = self.ends(f.edges[(i + 1) % k].0, f.edges[(i + 1) % k].1);
                if end != start {
                    return Err(ComplexError::OpenFace { face: f.id, position: i });
                }
            }
        }
        let mut owner: BTreeMap<usize, &str> = BTreeMap::new();
        let mut names = BTreeSet::new();
        for b in &self.boundaries {
            let err = |reason: String| ComplexError::Boundary {
                boundary: b.name.clone(),
                reason,
            };
            if !names.insert(b.name.as_str()) {
                return Err(err("duplicate name".into()));
            }
            let mut links = BTreeSet::new();
            for l in &b.links {
                if !es.contains(&l.edge()) {
                    return Err(err(format!("edge {} does not exist", l.edge())));
                }
                if !links.insert(l.link()) {
                    return Err(err(format!("duplicate link id {}", l.link())));
                }
                if let Some(other) = owner.insert(l.edge(), &b.name) {
                    if other == b.name {
                        return Err(err(format!("edge {} listed twice", l.edge())));
                    }
                    return Err(ComplexError::SharedBoundaryEdge(other.to_string(), b.name.clone(), l.edge()));
                }
            }
            let mut imgs = BTreeSet::new();
            for (&v, &n) in &b.nodes {
                if !vs.contains(&v) {
                    return Err(err(format!("vertex {v} does not exist")));
                }
                if !imgs.insert(n) {
                    return Err(err(format!("node id {n} used twice")));
                }
            }
            // renamed and unrenamed vertices must not collide
            let g = self.boundary_graph(b);
            if g.nodes.iter().collect::<BTreeSet<_>>().len() != g.nodes.len() {
                return Err(err("node ids collide".into()));
            }
        }
        Ok(())
    }

    /// The boundary as a graph in its own node and link ids.
    pub fn boundary_graph(&self, b: &Boundary) -> Graph {
        let mut verts: BTreeSet<usize> = b.nodes.keys().copied().collect();
        let mut links = Vec::new();
        for l in &b.links {
            if let Some(e) = self.edge(l.edge()) {
                verts.insert(e.src);
                verts.insert(e.dst);
                links.push(Link {
                    id: l.link(),
                    src: b.node_of(e.src),
                    dst: b.node_of(e.dst),
                });
            }
        }
        links.sort_by_key(|l| l.id);
        let mut nodes: Vec<usize> = verts.into_iter().map(|v| b.node_of(v)).collect();
        nodes.sort_unstable();
        Graph::new(nodes, links)
    }

    /// Reverses every face and swaps the roles of `in` and `out`.
    pub fn reversed(&self) -> TwoComplex {
        let mut c = self.clone();
        for f in &mut c.faces {
            f.edges.reverse();
            for e in &mut f.edges {
                e.1 = e.1.flip();
            }
        }
        for b in &mut c.boundaries {
            if b.name == "in" {
                b.name = "out".into();
            } else if b.name == "out" {
                b.name = "in".into();
            }
        }
        c
    }

    /// Disjoint union with ids of `other` shifted; boundary names of `other`
    /// get a `'` suffix when they clash.
    pub fn disjoint_union(&self, other: &TwoComplex) -> TwoComplex {
        let (dv, de, df) = (self.next_vertex(), self.next_edge(), self.next_face());
        let mut c = self.clone();
        c.vertices.extend(other.vertices.iter().map(|v| v + dv));
        c.edges.extend(other.edges.iter().map(|e| Edge {
            id: e.id + de,
            src: e.src + dv,
            dst: e.dst + dv,
        }));
        c.faces.extend(other.faces.iter().map(|f| Face {
            id: f.id + df,
            edges: f.edges.iter().map(|&(e, d)| (e + de, d)).collect(),
        }));
        for b in &other.boundaries {
            let mut name = b.name.clone();
            while c.boundary(&name).is_some() {
                name.push('\'');
            }
            c.boundaries.push(Boundary {
                name,
                links: b
                    .links
                    .iter()
                    .map(|l| BoundaryLinkSpec::Mapped {
                        edge: l.edge() + de,
                        link: l.link(),
                    })
                    .collect(),
                nodes: {
                    let mut m: BTreeMap<usize, usize> = b.nodes.iter().map(|(&v, &n)| (v + dv, n)).collect();
                    for l in &b.links {
                        let e = other.edge(l.edge()).unwrap();
                        for v in [e.src, e.dst] {
                            m.entry(v + dv).or_insert(b.node_of(v));
                        }
                    }
                    m
                },
            });
        }
        c
    }

    pub fn apply(&self, mv: Move) -> Result<TwoComplex, ComplexError> {
        match mv {
            Move::SplitEdge { edge } => self.split_edge(edge),
            Move::SplitFace { face, i, j } => self.split_face(face, i, j),
        }
    }

    fn split_edge(&self, edge: usize) -> Result<TwoComplex, ComplexError> {
        let e = *self
            .edge(edge)
            .ok_or_else(|| ComplexError::Inapplicable(format!("edge {edge} does not exist")))?;
        if self.boundary_edges().contains(&edge) {
            return Err(ComplexError::Inapplicable(format!("edge {edge} is on the boundary")));
        }
        let mut c = self.clone();
        let v = c.next_vertex();
        let e2 = c.next_edge();
        c.vertices.push(v);
        for x in &mut c.edges {
            if x.id == edge {
                x.dst = v;
            }
        }
        c.edges.push(Edge { id: e2, src: v, dst: e.dst });
        for f in &mut c.faces {
            let mut out = Vec::with_capacity(f.edges.len() + 1);
            for &(x, d) in &f.edges {
                if x == edge {
                    match d {
                        Dir::Forward => out.extend([(edge, Dir::Forward), (e2, Dir::Forward)]),
                        Dir::Backward => out.extend([(e2, Dir::Backward), (edge, Dir::Backward)]),
                    }
                } else {
                    out.push((x, d));
                }
            }
            f.edges = out;
        }
        Ok(c)
    }

    fn split_face(&self, face: usize, i: usize, j: usize) -> Result<TwoComplex, ComplexError> {
        let f = self
            .face(face)
            .ok_or_else(|| ComplexError::Inapplicable(format!("face {face} does not exist")))?
            .clone();
        let k = f.edges.len();
        if k == 0 || i > j || j > k {
            return Err(ComplexError::Inapplicable(format!(
                "chord ({i}, {j}) on face {face} of length {k}"
            )));
        }
        let start = |p: usize| self.ends(f.edges[p % k].0, f.edges[p % k].1).0;
        let (a, b) = (start(i), start(j));
        let mut c = self.clone();
        let n = c.next_edge();
        let f2_id = c.next_face();
        c.edges.push(Edge { id: n, src: a, dst: b });
        let mut f1: Vec<(usize, Dir)> = f.edges[i..j].to_vec();
        f1.push((n, Dir::Backward));
        let mut f2 = vec![(n, Dir::Forward)];
        f2.extend_from_slice(&f.edges[j..]);
        f2.extend_from_slice(&f.edges[..i]);
        for x in &mut c.faces {
            if x.id == face {
                x.edges = f1.clone();
            }
        }
        c.faces.push(Face { id: f2_id, edges: f2 });
        Ok(c)
    }

    /// A uniformly chosen interior move: split a non-boundary edge or cut a
    /// face along a chord.
    pub fn random_interior_move<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Move> {
        let bnd = self.boundary_edges();
        let mut moves: Vec<Move> = self
            .edges
            .iter()
            .filter(|e| !bnd.contains(&e.id))
            .map(|e| Move::SplitEdge { edge: e.id })
            .collect();
        for f in &self.faces {
            let k = f.edges.len();
            if k == 0 {
                continue;
            }
            for i in 0..=k {
                for j in i..=k {
                    moves.push(Move::SplitFace { face: f.id, i, j });
                }
            }
        }
        if moves.is_empty() {
            None
        } else {
            Some(moves[rng.random_range(0..moves.len())])
        }
    }

    /// Glues `out` of `self` to `in` of `next` along the link ids, producing a
    /// complex whose `in` is that of `self` and whose `out` is that of `next`.
    pub fn compose(&self, next: &TwoComplex) -> Result<TwoComplex, ComplexError> {
        let out_b = self.boundary("out").ok_or_else(|| ComplexError::NoSuchBoundary("out".into()))?;
        let in_b = next.boundary("in").ok_or_else(|| ComplexError::NoSuchBoundary("in".into()))?;
        let not = |r: String| ComplexError::Boundary {
            boundary: "in/out".into(),
            reason: r,
        };
        if out_b.links.len() != in_b.links.len() {
            return Err(not("different numbers of links".into()));
        }
        let (dv, de, df) = (self.next_vertex(), self.next_edge(), self.next_face());
        // map edges and vertices of `next`'s in-boundary onto `self`'s out
        let mut edge_map: BTreeMap<usize, usize> = BTreeMap::new();
        let mut vert_map: BTreeMap<usize, usize> = BTreeMap::new();
        for l in &in_b.links {
            let target = out_b
                .links
                .iter()
                .find(|o| o.link() == l.link())
                .ok_or_else(|| not(format!("link {} missing on out", l.link())))?;
            let a = next.edge(l.edge()).unwrap();
            let b = self.edge(target.edge()).unwrap();
            edge_map.insert(a.id, b.id);
            for (x, y) in [(a.src, b.src), (a.dst, b.dst)] {
                if let Some(&prev) = vert_map.get(&x) {
                    if prev != y {
                        return Err(not("vertex correspondence is inconsistent".into()));
                    }
                }
                vert_map.insert(x, y);
            }
        }
        let vmap = |v: usize| vert_map.get(&v).copied().unwrap_or(v + dv);
        let emap = |e: usize| edge_map.get(&e).copied().unwrap_or(e + de);
        let mut c = self.clone();
        c.vertices
            .extend(next.vertices.iter().filter(|v| !vert_map.contains_key(v)).map(|v| v + dv));
        c.edges.extend(
            next.edges
                .iter()
                .filter(|e| !edge_map.contains_key(&e.id))
                .map(|e| Edge {
                    id: e.id + de,
                    src: vmap(e.src),
                    dst: vmap(e.dst),
                }),
        );
        c.faces.extend(next.faces.iter().map(|f| Face {
            id: f.id + df,
            edges: f.edges.iter().map(|&(e, d)| (emap(e), d)).collect(),
        }));
        c.boundaries.retain(|b| b.name != "out");
        if let Some(nb) = next.boundary("out") {
            c.boundaries.push(Boundary {
                name: "out".into(),
                links: nb
                    .links
                    .iter()
                    .map(|l| BoundaryLinkSpec::Mapped {
                        edge: emap(l.edge()),
                        link: l.link(),
                    })
                    .collect(),
                nodes: {
                    let mut m = BTreeMap::new();
                    for l in &nb.links {
                        let e = next.edge(l.edge()).unwrap();
                        for v in [e.src, e.dst] {
                            m.insert(vmap(v), nb.node_of(v));
                        }
                    }
                    for (&v, &n) in &nb.nodes {
                        m.insert(vmap(v), n);
                    }
                    m
                },
            });
        }
        c.validate()?;
        Ok(c)
    }
}

/// Builders for the bundled complexes.
pub mod corpus {
    use super::*;

    fn f(id: usize, edges: &[(usize, Dir)]) -> Face {
        Face { id, edges: edges.to_vec() }
    }

    const P: Dir = Dir::Forward;
    const M: Dir = Dir::Backward;

    /// One vertex, one loop edge bounding one face; the loop is the boundary.
    pub fn disk() -> TwoComplex {
        TwoComplex {
            vertices: vec![0],
            edges: vec![Edge { id: 0, src: 0, dst: 0 }],
            faces: vec![f(0, &[(0, P)])],
            boundaries: vec![Boundary {
                name: "boundary".into(),
                links: vec![BoundaryLinkSpec::Edge(0)],
                nodes: BTreeMap::new(),
            }],
        }
    }

    /// Loop `0` at vertex 0 (`in`), loop `1` at vertex 1 (`out`), joined by
    /// edge `2`; one square face `0 2 1^-1 2^-1`.
    pub fn annulus() -> TwoComplex {
        TwoComplex {
            vertices: vec![0, 1],
            edges: vec![
                Edge { id: 0, src: 0, dst: 0 },
                Edge { id: 1, src: 1, dst: 1 },
                Edge { id: 2, src: 0, dst: 1 },
            ],
            faces: vec![f(0, &[(0, P), (2, P), (1, M), (2, M)])],
            boundaries: vec![
                Boundary {
                    name: "in".into(),
                    links: vec![BoundaryLinkSpec::Mapped { edge: 0, link: 0 }],
                    nodes: BTreeMap::from([(0, 0)]),
                },
                Boundary {
                    name: "out".into(),
                    links: vec![BoundaryLinkSpec::Mapped { edge: 1, link: 0 }],
                    nodes: BTreeMap::from([(1, 0)]),
                },
            ],
        }
    }

    /// One loop edge bounding two faces.
    pub fn sphere() -> TwoComplex {
        TwoComplex {
            vertices: vec![0],
            edges: vec![Edge { id: 0, src: 0, dst: 0 }],
            faces: vec![f(0, &[(0, P)]), f(1, &[(0, M)])],
            boundaries: Vec::new(),
        }
    }

    /// Square `a b a^-1 b^-1` with all corners identified.
    pub fn torus() -> TwoComplex {
        TwoComplex {
            vertices: vec![0],
            edges: vec![Edge { id: 0, src: 0, dst: 0 }, Edge { id: 1, src: 0, dst: 0 }],
            faces: vec![f(0, &[(0, P), (1, P), (0, M), (1, M)])],
            boundaries: Vec::new(),
        }
    }

    /// Octagon `a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1`.
    pub fn genus2() -> TwoComplex {
        TwoComplex {
            vertices: vec![0],
            edges: (0..4).map(|id| Edge { id, src: 0, dst: 0 }).collect(),
            faces: vec![f(
                0,
                &[(0, P), (1, P), (0, M), (1, M), (2, P), (3, P), (2, M), (3, M)],
            )],
            boundaries: Vec::new(),
        }
    }

    /// Closed orientable surface of genus `g` from the standard 4g-gon
    /// (the sphere for `g = 0`).
    pub fn surface(g: usize) -> TwoComplex {
        if g == 0 {
            return sphere();
        }
        let mut edges = Vec::new();
        for k in 0..g {
            let (a, b) = (2 * k, 2 * k + 1);
            edges.extend([(a, P), (b, P), (a, M), (b, M)]);
        }
        TwoComplex {
            vertices: vec![0],
            edges: (0..2 * g).map(|id| Edge { id, src: 0, dst: 0 }).collect(),
            faces: vec![f(0, &edges)],
            boundaries: Vec::new(),
        }
    }

    /// `graph x [0, 1]`: vertex `(n, 0)` and `(n, 1)` per node, a bottom and
    /// top copy of every link, a vertical edge per node and a square per
    /// link. Boundaries `in` (bottom) and `out` (top) both carry the graph's
    /// own node and link ids.
    pub fn cylinder_over(g: &Graph) -> TwoComplex {
        let mut nodes = g.nodes.clone();
        nodes.sort_unstable();
        let nv = nodes.len();
        let pos = |n: usize| nodes.iter().position(|&x| x == n).unwrap();
        let bottom = |n: usize| pos(n);
        let top = |n: usize| nv + pos(n);
        let mut links = g.links.clone();
        links.sort_by_key(|l| l.id);
        let nl = links.len();
        let mut edges = Vec::new();
        for (i, l) in links.iter().enumerate() {
            edges.push(Edge { id: i, src: bottom(l.src), dst: bottom(l.dst) });
            edges.push(Edge { id: nl + i, src: top(l.src), dst: top(l.dst) });
        }
        for (k, &n) in nodes.iter().enumerate() {
            edges.push(Edge { id: 2 * nl + k, src: bottom(n), dst: top(n) });
        }
        edges.sort_by_key(|e| e.id);
        let vertical = |n: usize| 2 * nl + pos(n);
        let faces = links
            .iter()
            .enumerate()
            .map(|(i, l)| f(i, &[(i, P), (vertical(l.dst), P), (nl + i, M), (vertical(l.src), M)]))
            .collect();
        let boundary = |name: &str, offset: usize, vert: &dyn Fn(usize) -> usize| Boundary {
            name: name.into(),
            links: links
                .iter()
                .enumerate()
                .map(|(i, l)| BoundaryLinkSpec::Mapped { edge: offset + i, link: l.id })
                .collect(),
            nodes: nodes.iter().map(|&n| (vert(n), n)).collect(),
        };
        TwoComplex {
            vertices: (0..2 * nv).collect(),
            edges,
            faces,
            boundaries: vec![boundary("in", 0, &bottom), boundary("out", nl, &top)],
        }
    }

    /// Bundled corpus by name.
    pub fn by_name(name: &str) -> Option<TwoComplex> {
        let stem = name.trim_end_matches(".json");
        let stem = stem.rsplit('/').next().unwrap_or(stem);
        match stem {
            "disk" => Some(disk()),
            "annulus" => Some(annulus()),
            "sphere" => Some(sphere()),
            "torus" => Some(torus()),
            "genus2" | "genus-2" => Some(genus2()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 5] = ["disk", "annulus", "sphere", "torus", "genus2"];

    pub fn all() -> Vec<(&'static str, TwoComplex)> {
        NAMES.iter().map(|&n| (n, by_name(n).unwrap())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn corpus_is_valid() {
        for (name, c) in corpus::all() {
            c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        corpus::cylinder_over(&Graph::theta()).validate().unwrap();
        corpus::cylinder_over(&Graph::ring(3)).validate().unwrap();
        corpus::surface(3).validate().unwrap();
    }

    #[test]
    fn boundary_graphs() {
        let a = corpus::annulus();
        assert_eq!(a.boundary_graph(a.boundary("in").unwrap()), Graph::single_loop());
        assert_eq!(a.boundary_graph(a.boundary("out").unwrap()), Graph::single_loop());
        let cyl = corpus::cylinder_over(&Graph::theta());
        assert_eq!(cyl.boundary_graph(cyl.boundary("out").unwrap()), Graph::theta());
    }

    #[test]
    fn open_face_rejected() {
        let mut c = corpus::torus();
        c.edges[0].dst = 0;
        c.vertices.push(1);
        c.edges[1].src = 1;
        c.edges[1].dst = 1;
        assert!(matches!(c.validate(), Err(ComplexError::OpenFace { .. })));
    }

    #[test]
    fn split_edge_counts() {
        let s = corpus::sphere().apply(Move::SplitEdge { edge: 0 }).unwrap();
        assert_eq!((s.vertices.len(), s.edges.len(), s.faces.len()), (2, 2, 2));
        s.validate().unwrap();
        assert!(corpus::disk().apply(Move::SplitEdge { edge: 0 }).is_err());
    }

    #[test]
    fn split_face_diagonal() {
        let t = corpus::torus().apply(Move::SplitFace { face: 0, i: 0, j: 2 }).unwrap();
        t.validate().unwrap();
        assert_eq!(t.faces.len(), 2);
        assert!(t.faces.iter().all(|f| f.edges.len() == 3));
        assert!(corpus::torus().apply(Move::SplitFace { face: 0, i: 3, j: 1 }).is_err());
    }

    #[test]
    fn random_moves_stay_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for (_, mut c) in corpus::all() {
            for _ in 0..8 {
                let m = c.random_interior_move(&mut rng).unwrap();
                c = c.apply(m).unwrap();
                c.validate().unwrap();
            }
        }
    }

    #[test]
    fn composition_of_annuli() {
        let a = corpus::annulus();
        let aa = a.compose(&a).unwrap();
        assert_eq!(aa.faces.len(), 2);
        assert_eq!(aa.edges.len(), 5);
        let g_in = aa.boundary_graph(aa.boundary("in").unwrap());
        let g_out = aa.boundary_graph(aa.boundary("out").unwrap());
        assert_eq!(g_in, Graph::single_loop());
        assert_eq!(g_out, Graph::single_loop());
    }

    #[test]
    fn json_round_trip() {
        let c = corpus::annulus();
        let s = serde_json::to_string(&c).unwrap();
        let back: TwoComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
