use num_traits::{Signed, Zero};

use super::{EdgeId, MetricTree, TreePoint, VertexId};
use crate::rational::Rational;

/// A traversed stretch of one edge, with offsets measured from the edge's
/// smaller endpoint. `from` is where the walk enters, `to` where it leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentPiece {
    pub edge: EdgeId,
    pub from: Rational,
    pub to: Rational,
}

impl SegmentPiece {
    pub fn length(&self) -> Rational {
        (&self.to - &self.from).abs()
    }

    fn covers(&self, offset: &Rational) -> bool {
        let (lo, hi) = if self.from <= self.to {
            (&self.from, &self.to)
        } else {
            (&self.to, &self.from)
        };
        lo <= offset && offset <= hi
    }
}

/// The unique geodesic `[start, end]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSegment {
    pub start: TreePoint,
    pub end: TreePoint,
    /// Vertices visited, in walking order. No vertex repeats.
    pub vertices: Vec<VertexId>,
    pub pieces: Vec<SegmentPiece>,
    pub length: Rational,
}

impl MetricTree {
    pub(crate) fn segment_unchecked(&self, x: &TreePoint, y: &TreePoint) -> MetricSegment {
        let done = |vertices, pieces: Vec<SegmentPiece>| {
            let length = pieces.iter().map(SegmentPiece::length).sum();
            MetricSegment {
                start: x.clone(),
                end: y.clone(),
                vertices,
                pieces,
                length,
            }
        };
        if x == y {
            let vertices = match x {
                TreePoint::Vertex(v) => vec![*v],
                TreePoint::Edge { .. } => Vec::new(),
            };
            return done(vertices, Vec::new());
        }
        if let (
            TreePoint::Edge { edge: e1, offset: a },
            TreePoint::Edge { edge: e2, offset: b },
        ) = (x, y)
        {
            if e1 == e2 {
                let piece = SegmentPiece {
                    edge: *e1,
                    from: a.clone(),
                    to: b.clone(),
                };
                return done(Vec::new(), vec![piece]);
            }
        }

        let mut best: Option<(Rational, VertexId, VertexId)> = None;
        for (a, da) in self.exits(x) {
            for (b, db) in self.exits(y) {
                let d = &da + self.vertex_distance(a, b) + &db;
                if best.as_ref().is_none_or(|(m, _, _)| d < *m) {
                    best = Some((d, a, b));
                }
            }
        }
        let (_, a, b) = best.unwrap();
        let (vertices, path_edges) = self.vertex_path(a, b);

        let mut pieces = Vec::with_capacity(path_edges.len() + 2);
        if let TreePoint::Edge { edge, offset } = x {
            pieces.push(SegmentPiece {
                edge: *edge,
                from: offset.clone(),
                to: self.edge(*edge).offset_of(a),
            });
        }
        for (w, e) in vertices.windows(2).zip(&path_edges) {
            let edge = self.edge(*e);
            pieces.push(SegmentPiece {
                edge: *e,
                from: edge.offset_of(w[0]),
                to: edge.offset_of(w[1]),
            });
        }
        if let TreePoint::Edge { edge, offset } = y {
            pieces.push(SegmentPiece {
                edge: *edge,
                from: self.edge(*edge).offset_of(b),
                to: offset.clone(),
            });
        }
        done(vertices, pieces)
    }
}

impl MetricSegment {
    pub fn is_degenerate(&self) -> bool {
        self.length.is_zero()
    }

    /// Membership by walking the pieces; agrees with betweenness.
    pub fn contains(&self, p: &TreePoint) -> bool {
        if *p == self.start || *p == self.end {
            return true;
        }
        match p {
            TreePoint::Vertex(v) => self.vertices.contains(v),
            TreePoint::Edge { edge, offset } => self
                .pieces
                .iter()
                .any(|piece| piece.edge == *edge && piece.covers(offset)),
        }
    }

    /// The point at distance `t` from `start`, clamped into `[0, length]`.
    pub fn point_at(&self, tree: &MetricTree, t: &Rational) -> TreePoint {
        if !t.is_positive() {
            return self.start.clone();
        }
        let mut walked = Rational::zero();
        for piece in &self.pieces {
            let len = piece.length();
            if *t <= &walked + &len {
                let step = t - &walked;
                let offset = if piece.from <= piece.to {
                    &piece.from + step
                } else {
                    &piece.from - step
                };
                return tree.canonical(piece.edge, offset);
            }
            walked += len;
        }
        self.end.clone()
    }

    pub fn midpoint(&self, tree: &MetricTree) -> TreePoint {
        self.point_at(tree, &(&self.length / Rational::from_integer(2.into())))
    }
}
