use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use super::{EdgeId, MetricSegment, MetricTree, TreePoint, VertexId};
use crate::rational::Rational;

/// A closed convex subset of a tree, stored as the vertices it contains and,
/// per edge, the covered closed interval of offsets.
///
/// A subtree is either a single point or a union of positive-length
/// intervals. The single-interior-point case is the only place a degenerate
/// interval `(x, x)` appears.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subtree {
    vertices: BTreeSet<VertexId>,
    spans: BTreeMap<EdgeId, (Rational, Rational)>,
}

impl Subtree {
    pub fn singleton(p: &TreePoint) -> Self {
        let mut s = Self {
            vertices: BTreeSet::new(),
            spans: BTreeMap::new(),
        };
        match p {
            TreePoint::Vertex(v) => {
                s.vertices.insert(*v);
            }
            TreePoint::Edge { edge, offset } => {
                s.spans.insert(*edge, (offset.clone(), offset.clone()));
            }
        }
        s
    }

    pub fn whole(tree: &MetricTree) -> Self {
        Self {
            vertices: tree.vertices().collect(),
            spans: tree
                .edges()
                .iter()
                .enumerate()
                .map(|(i, e)| (EdgeId(i), (Rational::zero(), e.length.clone())))
                .collect(),
        }
    }

    /// Union of `[p0, p]` over all `p`: the convex hull in a tree.
    pub(crate) fn hull_unchecked(tree: &MetricTree, points: &[TreePoint]) -> Self {
        let first = &points[0];
        let mut hull = Self::singleton(first);
        for p in &points[1..] {
            if p != first {
                hull.absorb_segment(&tree.segment_unchecked(first, p));
            }
        }
        hull
    }

    fn absorb_segment(&mut self, seg: &MetricSegment) {
        if seg.is_degenerate() {
            return;
        }
        // a nondegenerate segment replaces any lone interior point it passes through
        self.spans.retain(|_, (lo, hi)| lo != hi);
        self.vertices.extend(seg.vertices.iter().copied());
        for piece in &seg.pieces {
            let (a, b) = if piece.from <= piece.to {
                (piece.from.clone(), piece.to.clone())
            } else {
                (piece.to.clone(), piece.from.clone())
            };
            self.spans
                .entry(piece.edge)
                .and_modify(|(lo, hi)| {
                    if a < *lo {
                        *lo = a.clone();
                    }
                    if b > *hi {
                        *hi = b.clone();
                    }
                })
                .or_insert((a, b));
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    /// Covered intervals `(edge, lo, hi)`, offsets from the edge's smaller endpoint.
    pub fn spans(&self) -> impl Iterator<Item = (EdgeId, &Rational, &Rational)> + '_ {
        self.spans.iter().map(|(e, (lo, hi))| (*e, lo, hi))
    }

    pub fn span(&self, e: EdgeId) -> Option<(&Rational, &Rational)> {
        self.spans.get(&e).map(|(lo, hi)| (lo, hi))
    }

    /// The single point this subtree consists of, if it is degenerate.
    pub fn as_point(&self) -> Option<TreePoint> {
        match (self.vertices.len(), self.spans.len()) {
            (1, 0) => self.vertices.first().map(|v| TreePoint::Vertex(*v)),
            (0, 1) => {
                let (e, (lo, hi)) = self.spans.first_key_value().unwrap();
                (lo == hi).then(|| TreePoint::Edge {
                    edge: *e,
                    offset: lo.clone(),
                })
            }
            _ => None,
        }
    }

    pub fn is_point(&self) -> bool {
        self.as_point().is_some()
    }

    pub fn length(&self) -> Rational {
        self.spans.values().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn contains(&self, p: &TreePoint) -> bool {
        match p {
            TreePoint::Vertex(v) => self.vertices.contains(v),
            TreePoint::Edge { edge, offset } => self
                .spans
                .get(edge)
                .is_some_and(|(lo, hi)| lo <= offset && offset <= hi),
        }
    }

    pub fn is_subset_of(&self, other: &Subtree) -> bool {
        if let Some(p) = self.as_point() {
            return other.contains(&p);
        }
        self.vertices.iter().all(|v| other.vertices.contains(v))
            && self.spans.iter().all(|(e, (lo, hi))| {
                other
                    .spans
                    .get(e)
                    .is_some_and(|(olo, ohi)| olo <= lo && hi <= ohi)
            })
    }

    /// Intersection of two subtrees; `None` when they are disjoint.
    pub fn intersection(&self, tree: &MetricTree, other: &Subtree) -> Option<Subtree> {
        let vertices: BTreeSet<VertexId> =
            self.vertices.intersection(&other.vertices).copied().collect();
        let mut spans = BTreeMap::new();
        let mut lone = None;
        for (e, (lo, hi)) in &self.spans {
            let Some((olo, ohi)) = other.spans.get(e) else {
                continue;
            };
            let lo = lo.max(olo).clone();
            let hi = hi.min(ohi).clone();
            if lo < hi {
                spans.insert(*e, (lo, hi));
            } else if lo == hi {
                if let p @ TreePoint::Edge { .. } = tree.canonical(*e, lo) {
                    lone = Some(p);
                }
            }
        }
        if !vertices.is_empty() || !spans.is_empty() {
            Some(Subtree { vertices, spans })
        } else {
            lone.map(|p| Subtree::singleton(&p))
        }
    }

    /// Union with a subtree it touches. The result is only meaningful when
    /// the two sets intersect.
    pub fn union_touching(&self, other: &Subtree) -> Subtree {
        let mut out = self.clone();
        out.vertices.extend(other.vertices.iter().copied());
        for (e, (lo, hi)) in &other.spans {
            out.spans
                .entry(*e)
                .and_modify(|(a, b)| {
                    if lo < a {
                        *a = lo.clone();
                    }
                    if hi > b {
                        *b = hi.clone();
                    }
                })
                .or_insert((lo.clone(), hi.clone()));
        }
        if out.vertices.len() + out.spans.len() > 1 {
            out.spans.retain(|_, (lo, hi)| lo != hi);
        }
        out
    }

    /// Points of the subtree lying in no open segment between two members:
    /// the tips of its branches, or the point itself when degenerate.
    pub fn final_points(&self, tree: &MetricTree) -> Vec<TreePoint> {
        if let Some(p) = self.as_point() {
            return vec![p];
        }
        let mut out = Vec::new();
        for &v in &self.vertices {
            let degree = tree
                .neighbors(v)
                .iter()
                .filter(|(_, e)| {
                    self.spans.get(e).is_some_and(|(lo, hi)| {
                        let edge = tree.edge(*e);
                        if edge.u == v {
                            lo.is_zero() && hi.is_positive()
                        } else {
                            *hi == edge.length && *lo < edge.length
                        }
                    })
                })
                .count();
            if degree <= 1 {
                out.push(TreePoint::Vertex(v));
            }
        }
        for (e, (lo, hi)) in &self.spans {
            if lo.is_positive() {
                out.push(TreePoint::Edge {
                    edge: *e,
                    offset: lo.clone(),
                });
            }
            if *hi < tree.edge(*e).length {
                out.push(TreePoint::Edge {
                    edge: *e,
                    offset: hi.clone(),
                });
            }
        }
        out.sort();
        out
    }

    fn any_member(&self) -> TreePoint {
        match self.vertices.first() {
            Some(v) => TreePoint::Vertex(*v),
            None => {
                let (e, (lo, _)) = self.spans.first_key_value().expect("subtree is nonempty");
                TreePoint::Edge {
                    edge: *e,
                    offset: lo.clone(),
                }
            }
        }
    }

    /// Nearest member: the first point of the subtree met when walking from
    /// `p` toward any member.
    pub(crate) fn project(&self, tree: &MetricTree, p: &TreePoint) -> TreePoint {
        if self.contains(p) {
            return p.clone();
        }
        let target = self.any_member();
        let seg = tree.segment_unchecked(p, &target);
        for piece in &seg.pieces {
            if let Some((lo, hi)) = self.spans.get(&piece.edge) {
                let (pmin, pmax) = if piece.from <= piece.to {
                    (&piece.from, &piece.to)
                } else {
                    (&piece.to, &piece.from)
                };
                if lo.max(pmin) <= hi.min(pmax) {
                    let entry = if piece.from <= piece.to {
                        piece.from.clone().max(lo.clone())
                    } else {
                        piece.from.clone().min(hi.clone())
                    };
                    return tree.canonical(piece.edge, entry);
                }
            }
            if let TreePoint::Vertex(v) = tree.canonical(piece.edge, piece.to.clone()) {
                if self.vertices.contains(&v) {
                    return TreePoint::Vertex(v);
                }
            }
        }
        target
    }

    pub(crate) fn distance_to(&self, tree: &MetricTree, p: &TreePoint) -> Rational {
        tree.dist(p, &self.project(tree, p))
    }

    pub(crate) fn deviation(&self, tree: &MetricTree, points: &[TreePoint]) -> Rational {
        points
            .iter()
            .map(|a| self.distance_to(tree, a))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn hull_of_star_leaves_is_whole_star() {
        let t = star3();
        let h = t
            .convex_hull(&[v(&t, "u"), v(&t, "v"), v(&t, "w")])
            .unwrap();
        assert_eq!(h, t.whole());
        assert_eq!(t.final_points(&h), vec![v(&t, "u"), v(&t, "v"), v(&t, "w")]);
        assert_eq!(t.tn_dimension(&h), 3);
    }

    #[test]
    fn hull_of_one_point() {
        let t = star3();
        let x = e(&t, "c", "w", 1, 2);
        let h = t.convex_hull(&[x.clone(), x.clone()]).unwrap();
        assert_eq!(h.as_point(), Some(x.clone()));
        assert_eq!(t.final_points(&h), vec![x]);
        assert_eq!(t.tn_dimension(&h), 1);
        assert!(t.convex_hull(&[]).is_err());
    }

    #[test]
    fn hull_of_two_leaves_skips_third_edge() {
        let t = star3();
        let h = t.convex_hull(&[v(&t, "u"), v(&t, "v")]).unwrap();
        assert!(h.contains(&v(&t, "c")));
        assert!(!h.contains(&v(&t, "w")));
        assert!(!h.contains(&e(&t, "c", "w", 1, 2)));
        assert_eq!(t.final_points(&h), vec![v(&t, "u"), v(&t, "v")]);
        let p = path2();
        assert_eq!(p.tn_dimension(&p.whole()), 2);
    }

    #[test]
    fn interior_final_points() {
        let t = star3();
        let a = e(&t, "c", "u", 1, 2);
        let b = e(&t, "c", "w", 2, 1);
        let h = t.convex_hull(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(t.final_points(&h), vec![a, b]);
        assert_eq!(h.length(), ratio(5, 2));
    }

    #[test]
    fn projection_examples() {
        let t = star3();
        let uv = t.convex_hull(&[v(&t, "u"), v(&t, "v")]).unwrap();
        assert_eq!(t.project(&uv, &v(&t, "w")).unwrap(), v(&t, "c"));
        assert_eq!(uv.distance_to(&t, &v(&t, "w")), int(3));
        let inside = e(&t, "c", "v", 1, 2);
        assert_eq!(t.project(&uv, &inside).unwrap(), inside);
        let p = path2();
        let su = Subtree::singleton(&v(&p, "u"));
        assert_eq!(p.project(&su, &v(&p, "v")).unwrap(), v(&p, "u"));
        assert_eq!(su.distance_to(&p, &v(&p, "v")), int(2));
        // projecting onto an interior-only segment
        let seg = t
            .convex_hull(&[e(&t, "c", "w", 1, 1), e(&t, "c", "w", 2, 1)])
            .unwrap();
        assert_eq!(t.project(&seg, &v(&t, "u")).unwrap(), e(&t, "c", "w", 1, 1));
        assert_eq!(t.project(&seg, &v(&t, "w")).unwrap(), e(&t, "c", "w", 2, 1));
    }

    #[test]
    fn deviation_examples() {
        let t = star3();
        let a = [v(&t, "u"), v(&t, "v"), v(&t, "w")];
        let center = Subtree::singleton(&v(&t, "c"));
        assert_eq!(t.deviation(&a, &center).unwrap(), int(3));
        let hull = t.convex_hull(&a).unwrap();
        assert_eq!(t.deviation(&a, &hull).unwrap(), int(0));
        let vw = t.convex_hull(&[v(&t, "v"), v(&t, "w")]).unwrap();
        assert_eq!(t.deviation(&a, &vw).unwrap(), int(1));
        assert!(t.deviation(&[], &vw).is_err());
    }

    #[test]
    fn intersection_and_union() {
        let t = star3();
        let uc = t.convex_hull(&[v(&t, "u"), v(&t, "c")]).unwrap();
        let cv = t.convex_hull(&[v(&t, "c"), v(&t, "v")]).unwrap();
        let meet = uc.intersection(&t, &cv).unwrap();
        assert_eq!(meet.as_point(), Some(v(&t, "c")));
        let uv = t.convex_hull(&[v(&t, "u"), v(&t, "v")]).unwrap();
        assert_eq!(uc.union_touching(&cv), uv);
        let a = t.convex_hull(&[v(&t, "c"), e(&t, "c", "w", 1, 1)]).unwrap();
        let b = t.convex_hull(&[e(&t, "c", "w", 1, 1), v(&t, "w")]).unwrap();
        assert_eq!(
            a.intersection(&t, &b).unwrap().as_point(),
            Some(e(&t, "c", "w", 1, 1))
        );
        let far = Subtree::singleton(&v(&t, "w"));
        assert!(uc.intersection(&t, &far).is_none());
        assert!(uc.is_subset_of(&uv));
        assert!(!uv.is_subset_of(&uc));
    }
}
