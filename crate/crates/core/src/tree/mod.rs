//! Finite metric trees and points on them.
//!
//! A [`MetricTree`] is a connected acyclic graph with positive rational edge
//! lengths; its geodesic realization is the ambient metric tree. Points may
//! sit on vertices or strictly inside edges ([`TreePoint`]). Every distance
//! is an exact rational, so betweenness is decided by equality, never by a
//! tolerance.

mod axioms;
mod segment;
mod subtree;

pub use axioms::{check_tree_axioms, random_point, AxiomFailure, AxiomKind, AxiomReport};
pub use segment::{MetricSegment, SegmentPiece};
pub use subtree::Subtree;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, half, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree has no vertices")]
    EmptyTree,
    #[error("edge {u}-{v} has nonpositive length {length}")]
    NonpositiveLength { u: String, v: String, length: String },
    #[error("edge {u}-{v} appears more than once")]
    DuplicateEdge { u: String, v: String },
    #[error("edge {u}-{v} closes a cycle")]
    CycleDetected { u: String, v: String },
    #[error("vertex {vertex} is not connected to the rest of the tree")]
    Disconnected { vertex: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("no edge between {u} and {v}")]
    NoSuchEdge { u: String, v: String },
    #[error("point is not on the tree: {0}")]
    PointNotOnTree(String),
    #[error("empty input set")]
    EmptyInput,
}

pub type Result<T, E = TreeError> = std::result::Result<T, E>;

/// Index of a vertex. Ids follow the lexicographic order of vertex names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

/// An undirected edge stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub length: Rational,
}

impl Edge {
    pub fn other(&self, w: VertexId) -> VertexId {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }

    /// Offset (from `u`) of the endpoint `w`.
    pub fn offset_of(&self, w: VertexId) -> Rational {
        if w == self.u {
            Rational::zero()
        } else {
            self.length.clone()
        }
    }
}

/// A location on a tree, always in canonical form: endpoints of an edge are
/// represented as vertices, and edge offsets are measured from the edge's
/// lexicographically smaller endpoint. Structural equality is point equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreePoint {
    Vertex(VertexId),
    Edge { edge: EdgeId, offset: Rational },
}

#[derive(Debug, Clone)]
pub struct MetricTree {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<Edge>,
    edge_index: HashMap<(VertexId, VertexId), EdgeId>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    // rooted at vertex 0
    parent: Vec<Option<(VertexId, EdgeId)>>,
    depth: Vec<Rational>,
    level: Vec<usize>,
}

impl PartialEq for MetricTree {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for MetricTree {}

/// Builds a validated tree from an edge list.
pub fn build_tree<S: AsRef<str>>(edges: &[(S, S, Rational)]) -> Result<MetricTree> {
    MetricTree::from_edges(edges.iter().map(|(u, v, l)| (u.as_ref(), v.as_ref(), l.clone())))
}

impl MetricTree {
    pub fn from_edges<'a>(
        edges: impl IntoIterator<Item = (&'a str, &'a str, Rational)>,
    ) -> Result<Self> {
        Self::new(std::iter::empty::<&str>(), edges)
    }

    /// A tree consisting of one vertex and no edges.
    pub fn singleton(name: &str) -> Self {
        Self::new([name], std::iter::empty()).expect("a single vertex is a valid tree")
    }

    /// General constructor: the vertex set is `vertices` plus every edge endpoint.
    pub fn new<'a, 'b>(
        vertices: impl IntoIterator<Item = &'b str>,
        edges: impl IntoIterator<Item = (&'a str, &'a str, Rational)>,
    ) -> Result<Self> {
        let raw: Vec<(&str, &str, Rational)> = edges.into_iter().collect();
        let mut names: Vec<String> = vertices.into_iter().map(str::to_string).collect();
        for (u, v, _) in &raw {
            names.push(u.to_string());
            names.push(v.to_string());
        }
        names.sort();
        names.dedup();
        if names.is_empty() {
            return Err(TreeError::EmptyTree);
        }
        let index: HashMap<String, VertexId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), VertexId(i)))
            .collect();

        let mut edges = Vec::with_capacity(raw.len());
        let mut seen = HashMap::new();
        for (a, b, length) in raw {
            if a == b {
                return Err(TreeError::CycleDetected {
                    u: a.to_string(),
                    v: b.to_string(),
                });
            }
            if !length.is_positive() {
                return Err(TreeError::NonpositiveLength {
                    u: a.to_string(),
                    v: b.to_string(),
                    length: format_rational(&length),
                });
            }
            let (u, v) = (index[a].min(index[b]), index[a].max(index[b]));
            if seen.insert((u, v), ()).is_some() {
                return Err(TreeError::DuplicateEdge {
                    u: names[u.0].clone(),
                    v: names[v.0].clone(),
                });
            }
            edges.push(Edge { u, v, length });
        }

        // union-find in input order so the reported edge is the one closing the cycle
        let mut uf: Vec<usize> = (0..names.len()).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for e in &edges {
            let (ru, rv) = (find(&mut uf, e.u.0), find(&mut uf, e.v.0));
            if ru == rv {
                return Err(TreeError::CycleDetected {
                    u: names[e.u.0].clone(),
                    v: names[e.v.0].clone(),
                });
            }
            uf[ru] = rv;
        }
        let root = find(&mut uf, 0);
        if let Some(stray) = (0..names.len()).find(|&i| find(&mut uf, i) != root) {
            return Err(TreeError::Disconnected {
                vertex: names[stray].clone(),
            });
        }

        edges.sort_by_key(|e| (e.u, e.v));
        let mut adjacency = vec![Vec::new(); names.len()];
        let mut edge_index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.u.0].push((e.v, EdgeId(i)));
            adjacency[e.v.0].push((e.u, EdgeId(i)));
            edge_index.insert((e.u, e.v), EdgeId(i));
        }

        let n = names.len();
        let mut parent = vec![None; n];
        let mut depth = vec![Rational::zero(); n];
        let mut level = vec![0usize; n];
        let mut visited = vec![false; n];
        let mut queue = VecDeque::from([VertexId(0)]);
        visited[0] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &adjacency[x.0] {
                if !visited[y.0] {
                    visited[y.0] = true;
                    parent[y.0] = Some((x, e));
                    depth[y.0] = &depth[x.0] + &edges[e.0].length;
                    level[y.0] = level[x.0] + 1;
                    queue.push_back(y);
                }
            }
        }

        Ok(Self {
            names,
            index,
            edges,
            edge_index,
            adjacency,
            parent,
            depth,
            level,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.names.len()).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| TreeError::UnknownVertex(name.to_string()))
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len()
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().map(|e| e.length.clone()).sum()
    }

    /// Vertices of degree at most one: the final points of the whole tree.
    pub fn leaves(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.degree(v) <= 1).collect()
    }

    /// The largest `n` for which the tree contains a Tn-dimensional subset.
    /// The whole tree is its own hull of leaves, so this is the leaf count.
    pub fn max_dimension(&self) -> usize {
        self.leaves().len()
    }

    pub fn vertex(&self, name: &str) -> Result<TreePoint> {
        self.vertex_id(name).map(TreePoint::Vertex)
    }

    /// The point at `offset` from `u` along edge `u`-`v` (either orientation).
    pub fn point_on_edge(&self, u: &str, v: &str, offset: Rational) -> Result<TreePoint> {
        let (a, b) = (self.vertex_id(u)?, self.vertex_id(v)?);
        let e = self.edge_between(a, b).ok_or_else(|| TreeError::NoSuchEdge {
            u: u.to_string(),
            v: v.to_string(),
        })?;
        let from_u = if a == self.edges[e.0].u {
            offset
        } else {
            &self.edges[e.0].length - offset
        };
        self.edge_point(e, from_u)
    }

    /// Canonical point at `offset` from the smaller endpoint of `e`.
    pub fn edge_point(&self, e: EdgeId, offset: Rational) -> Result<TreePoint> {
        let edge = self
            .edges
            .get(e.0)
            .ok_or_else(|| TreeError::PointNotOnTree(format!("edge #{}", e.0)))?;
        if offset.is_negative() || offset > edge.length {
            return Err(TreeError::PointNotOnTree(format!(
                "offset {} outside edge {}-{} of length {}",
                format_rational(&offset),
                self.name(edge.u),
                self.name(edge.v),
                format_rational(&edge.length)
            )));
        }
        Ok(self.canonical(e, offset))
    }

    pub(crate) fn canonical(&self, e: EdgeId, offset: Rational) -> TreePoint {
        let edge = &self.edges[e.0];
        if offset.is_zero() {
            TreePoint::Vertex(edge.u)
        } else if offset == edge.length {
            TreePoint::Vertex(edge.v)
        } else {
            TreePoint::Edge { edge: e, offset }
        }
    }

    pub fn check_point(&self, p: &TreePoint) -> Result<()> {
        match p {
            TreePoint::Vertex(v) if v.0 < self.names.len() => Ok(()),
            TreePoint::Vertex(v) => Err(TreeError::PointNotOnTree(format!("vertex #{}", v.0))),
            TreePoint::Edge { edge, offset } => match self.edges.get(edge.0) {
                Some(e) if offset.is_positive() && offset < &e.length => Ok(()),
                _ => Err(TreeError::PointNotOnTree(format!(
                    "edge #{} offset {}",
                    edge.0,
                    format_rational(offset)
                ))),
            },
        }
    }

    pub fn check_points<'p>(&self, points: impl IntoIterator<Item = &'p TreePoint>) -> Result<()> {
        points.into_iter().try_for_each(|p| self.check_point(p))
    }

    /// `V <name>` or `E <u> <v> <offset-from-u>`; the points-file syntax.
    pub fn encode_point(&self, p: &TreePoint) -> String {
        match p {
            TreePoint::Vertex(v) => format!("V {}", self.name(*v)),
            TreePoint::Edge { edge, offset } => {
                let e = &self.edges[edge.0];
                format!(
                    "E {} {} {}",
                    self.name(e.u),
                    self.name(e.v),
                    format_rational(offset)
                )
            }
        }
    }

    pub fn display_point<'t>(&'t self, p: &'t TreePoint) -> PointDisplay<'t> {
        PointDisplay { tree: self, point: p }
    }

    fn lca(&self, mut a: VertexId, mut b: VertexId) -> VertexId {
        while self.level[a.0] > self.level[b.0] {
            a = self.parent[a.0].unwrap().0;
        }
        while self.level[b.0] > self.level[a.0] {
            b = self.parent[b.0].unwrap().0;
        }
        while a != b {
            a = self.parent[a.0].unwrap().0;
            b = self.parent[b.0].unwrap().0;
        }
        a
    }

    pub fn vertex_distance(&self, a: VertexId, b: VertexId) -> Rational {
        let c = self.lca(a, b);
        &self.depth[a.0] + &self.depth[b.0] - &self.depth[c.0] * Rational::from_integer(2.into())
    }

    /// Vertices and edges along the unique path from `a` to `b`.
    pub fn vertex_path(&self, a: VertexId, b: VertexId) -> (Vec<VertexId>, Vec<EdgeId>) {
        let c = self.lca(a, b);
        let mut up = vec![a];
        let mut up_edges = Vec::new();
        let mut x = a;
        while x != c {
            let (p, e) = self.parent[x.0].unwrap();
            up_edges.push(e);
            up.push(p);
            x = p;
        }
        let mut down = Vec::new();
        let mut down_edges = Vec::new();
        let mut y = b;
        while y != c {
            let (p, e) = self.parent[y.0].unwrap();
            down.push(y);
            down_edges.push(e);
            y = p;
        }
        up.extend(down.into_iter().rev());
        up_edges.extend(down_edges.into_iter().rev());
        (up, up_edges)
    }

    /// Ways to leave `p` toward the vertex skeleton: `(vertex, distance)`.
    pub(crate) fn exits(&self, p: &TreePoint) -> Vec<(VertexId, Rational)> {
        match p {
            TreePoint::Vertex(v) => vec![(*v, Rational::zero())],
            TreePoint::Edge { edge, offset } => {
                let e = &self.edges[edge.0];
                vec![(e.u, offset.clone()), (e.v, &e.length - offset)]
            }
        }
    }

    /// Distance for points already known to lie on the tree.
    pub(crate) fn dist(&self, p: &TreePoint, q: &TreePoint) -> Rational {
        if let (
            TreePoint::Edge { edge: e1, offset: x },
            TreePoint::Edge { edge: e2, offset: y },
        ) = (p, q)
        {
            if e1 == e2 {
                return (x - y).abs();
            }
        }
        let mut best: Option<Rational> = None;
        for (a, da) in self.exits(p) {
            for (b, db) in self.exits(q) {
                let d = &da + self.vertex_distance(a, b) + &db;
                if best.as_ref().is_none_or(|m| d < *m) {
                    best = Some(d);
                }
            }
        }
        best.unwrap()
    }

    pub fn distance(&self, p: &TreePoint, q: &TreePoint) -> Result<Rational> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.dist(p, q))
    }

    pub(crate) fn between(&self, x: &TreePoint, z: &TreePoint, y: &TreePoint) -> bool {
        self.dist(x, y) == self.dist(x, z) + self.dist(z, y)
    }

    /// `xy = xz + zy`, decided exactly.
    pub fn is_between(&self, x: &TreePoint, z: &TreePoint, y: &TreePoint) -> Result<bool> {
        self.check_points([x, z, y])?;
        Ok(self.between(x, z, y))
    }

    pub(crate) fn median_unchecked(&self, x: &TreePoint, y: &TreePoint, z: &TreePoint) -> TreePoint {
        // the median sits on [x,y] at the Gromov product (y|z)_x from x
        let t = half(&(self.dist(x, y) + self.dist(x, z) - self.dist(y, z)));
        self.segment_unchecked(x, y).point_at(self, &t)
    }

    /// The unique point common to `[x,y]`, `[y,z]` and `[x,z]`.
    pub fn median(&self, x: &TreePoint, y: &TreePoint, z: &TreePoint) -> Result<TreePoint> {
        self.check_points([x, y, z])?;
        Ok(self.median_unchecked(x, y, z))
    }

    pub fn segment(&self, x: &TreePoint, y: &TreePoint) -> Result<MetricSegment> {
        self.check_points([x, y])?;
        Ok(self.segment_unchecked(x, y))
    }

    /// The point on `[x,y]` at distance `t` from `x` (clamped to the segment).
    pub fn point_along(&self, x: &TreePoint, y: &TreePoint, t: &Rational) -> Result<TreePoint> {
        self.check_points([x, y])?;
        Ok(self.segment_unchecked(x, y).point_at(self, t))
    }

    pub fn convex_hull(&self, points: &[TreePoint]) -> Result<Subtree> {
        if points.is_empty() {
            return Err(TreeError::EmptyInput);
        }
        self.check_points(points)?;
        Ok(Subtree::hull_unchecked(self, points))
    }

    pub fn whole(&self) -> Subtree {
        Subtree::whole(self)
    }

    pub fn final_points(&self, s: &Subtree) -> Vec<TreePoint> {
        s.final_points(self)
    }

    pub fn tn_dimension(&self, s: &Subtree) -> usize {
        s.final_points(self).len()
    }

    pub fn project(&self, s: &Subtree, p: &TreePoint) -> Result<TreePoint> {
        self.check_point(p)?;
        Ok(s.project(self, p))
    }

    /// `max_{a in A} d(a, s)`.
    pub fn deviation(&self, points: &[TreePoint], s: &Subtree) -> Result<Rational> {
        if points.is_empty() {
            return Err(TreeError::EmptyInput);
        }
        self.check_points(points)?;
        Ok(s.deviation(self, points))
    }
}

pub struct PointDisplay<'t> {
    tree: &'t MetricTree,
    point: &'t TreePoint,
}

impl fmt::Display for PointDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tree.encode_point(self.point))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::rational::{int, ratio};

    pub fn star3() -> MetricTree {
        build_tree(&[("c", "u", int(1)), ("c", "v", int(2)), ("c", "w", int(3))]).unwrap()
    }

    pub fn path2() -> MetricTree {
        build_tree(&[("u", "v", int(2))]).unwrap()
    }

    pub fn v(t: &MetricTree, name: &str) -> TreePoint {
        t.vertex(name).unwrap()
    }

    pub fn e(t: &MetricTree, a: &str, b: &str, num: i64, den: i64) -> TreePoint {
        t.point_on_edge(a, b, ratio(num, den)).unwrap()
    }
}
