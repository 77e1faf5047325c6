use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{MetricTree, Subtree, TreePoint};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomKind {
    /// `[x,z] ∩ [z,y] = {z}` implies `[x,z] ∪ [z,y] = [x,y]`.
    SegmentGluing,
    /// Segment membership, length and betweenness agree.
    SegmentConsistency,
    /// `abc` and `acd` imply `abd` and `bcd`.
    Transitivity,
    /// The union of `[a,f]` over final points `f` is the whole tree.
    CompactTreeCovering,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub kind: AxiomKind,
    /// Offending points in points-file syntax, exact offsets.
    pub points: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub triples: usize,
    pub quadruples: usize,
    pub anchors: usize,
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A random point: a vertex, or an edge point on a grid of `grid` steps.
pub fn random_point<R: Rng + ?Sized>(tree: &MetricTree, rng: &mut R, grid: u32) -> TreePoint {
    if tree.edge_count() == 0 || rng.gen_bool(0.3) {
        return TreePoint::Vertex(super::VertexId(rng.gen_range(0..tree.vertex_count())));
    }
    let e = super::EdgeId(rng.gen_range(0..tree.edge_count()));
    let k = rng.gen_range(1..grid.max(2));
    let offset = &tree.edge(e).length * Rational::new(k.into(), grid.max(2).into());
    tree.canonical(e, offset)
}

fn random_fraction<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(0..=16).into(), 16.into())
}

/// Checks segment gluing and segment consistency on `triples`, betweenness
/// transitivity on quadruples and the covering identity on anchors drawn
/// from `seed`. Failures are reported, never raised.
pub fn check_tree_axioms(
    tree: &MetricTree,
    triples: &[(TreePoint, TreePoint, TreePoint)],
    seed: u64,
) -> AxiomReport {
    let mut report = AxiomReport::default();
    let enc = |ps: &[&TreePoint]| ps.iter().map(|p| tree.encode_point(p)).collect::<Vec<_>>();

    for (x, y, z) in triples {
        if tree.check_points([x, y, z]).is_err() {
            report.failures.push(AxiomFailure {
                kind: AxiomKind::SegmentConsistency,
                points: vec![format!("{x:?}"), format!("{y:?}"), format!("{z:?}")],
                detail: "point not on tree".into(),
            });
            continue;
        }
        report.triples += 1;
        let xz = Subtree::hull_unchecked(tree, &[x.clone(), z.clone()]);
        let zy = Subtree::hull_unchecked(tree, &[z.clone(), y.clone()]);
        let xy = Subtree::hull_unchecked(tree, &[x.clone(), y.clone()]);
        let between = tree.between(x, z, y);
        let meets_only_at_z = xz
            .intersection(tree, &zy)
            .is_some_and(|m| m.as_point().as_ref() == Some(z));
        if meets_only_at_z && xz.union_touching(&zy) != xy {
            report.failures.push(AxiomFailure {
                kind: AxiomKind::SegmentGluing,
                points: enc(&[x, y, z]),
                detail: "[x,z] and [z,y] meet only at z but do not glue to [x,y]".into(),
            });
        }
        if meets_only_at_z != between {
            report.failures.push(AxiomFailure {
                kind: AxiomKind::SegmentGluing,
                points: enc(&[x, y, z]),
                detail: format!(
                    "[x,z] ∩ [z,y] = {{z}} is {meets_only_at_z} but xzy is {between}"
                ),
            });
        }
        let seg = tree.segment_unchecked(x, y);
        let d = tree.dist(x, y);
        if seg.length != d || seg.contains(z) != between || xy.contains(z) != between {
            report.failures.push(AxiomFailure {
                kind: AxiomKind::SegmentConsistency,
                points: enc(&[x, y, z]),
                detail: format!(
                    "segment length {} vs distance {}, contains z: {}, hull contains z: {}, xzy: {}",
                    format_rational(&seg.length),
                    format_rational(&d),
                    seg.contains(z),
                    xy.contains(z),
                    between
                ),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..triples.len().max(1) {
        let a = random_point(tree, &mut rng, 8);
        let d = random_point(tree, &mut rng, 8);
        let ad = tree.segment_unchecked(&a, &d);
        let c = ad.point_at(tree, &(&ad.length * random_fraction(&mut rng)));
        let ac = tree.segment_unchecked(&a, &c);
        let b = ac.point_at(tree, &(&ac.length * random_fraction(&mut rng)));
        report.quadruples += 1;
        if tree.between(&a, &b, &c)
            && tree.between(&a, &c, &d)
            && !(tree.between(&a, &b, &d) && tree.between(&b, &c, &d))
        {
            report.failures.push(AxiomFailure {
                kind: AxiomKind::Transitivity,
                points: enc(&[&a, &b, &c, &d]),
                detail: "abc and acd hold but abd or bcd fails".into(),
            });
        }
    }

    let whole = Subtree::whole(tree);
    let finals = whole.final_points(tree);
    let mut anchors: Vec<TreePoint> = tree.vertices().map(TreePoint::Vertex).collect();
    for _ in 0..triples.len().min(16) {
        anchors.push(random_point(tree, &mut rng, 8));
    }
    for a in &anchors {
        report.anchors += 1;
        let mut cover = Subtree::singleton(a);
        for f in &finals {
            cover = cover.union_touching(&Subtree::hull_unchecked(tree, &[a.clone(), f.clone()]));
        }
        if cover != whole {
            report.failures.push(AxiomFailure {
                kind: AxiomKind::CompactTreeCovering,
                points: enc(&[a]),
                detail: "union of [a,f] over final points misses part of the tree".into(),
            });
        }
    }
    report
}
