//! Ball-absorption witnesses and their sampled verification.

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Result, WidthError};
use crate::rational::{half, Rational};
use crate::tree::{EdgeId, MetricTree, TreePoint};

const GRID_BITS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1Witness {
    pub x: TreePoint,
    pub y: TreePoint,
    pub epsilon: Rational,
    pub radius: Rational,
    /// Always `epsilon / 2`.
    pub delta: Rational,
    /// On `[x, y]` at distance `min(delta, d(x, y))` from `x`.
    pub z: TreePoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1Violation {
    pub w: TreePoint,
    pub dist_x: Rational,
    pub dist_y: Rational,
    pub dist_z: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1Report {
    pub theta: Rational,
    pub samples: usize,
    /// Samples that landed in `B(x, r+δ) ∩ B(y, r+θ)`.
    pub in_intersection: usize,
    pub violations: Vec<P1Violation>,
}

impl P1Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Builds `z` with `B(x, r+δ) ∩ B(y, r+θ) ⊆ B(z, r+θ)` for every `0 < θ < δ`.
pub fn p1_witness(
    tree: &MetricTree,
    x: &TreePoint,
    y: &TreePoint,
    epsilon: &Rational,
    radius: &Rational,
) -> Result<P1Witness> {
    if !epsilon.is_positive() {
        return Err(WidthError::NonpositiveParameter("epsilon"));
    }
    if !radius.is_positive() {
        return Err(WidthError::NonpositiveParameter("radius"));
    }
    tree.check_points([x, y])?;
    let delta = half(epsilon);
    let seg = tree.segment_unchecked(x, y);
    let z = if seg.length < delta {
        y.clone()
    } else {
        seg.point_at(tree, &delta)
    };
    Ok(P1Witness {
        x: x.clone(),
        y: y.clone(),
        epsilon: epsilon.clone(),
        radius: radius.clone(),
        delta,
        z,
    })
}

/// A point drawn uniformly by length, on a grid of `2^20` steps of the total
/// length. A single-vertex tree yields its vertex.
pub fn uniform_point<R: Rng + ?Sized>(tree: &MetricTree, rng: &mut R) -> TreePoint {
    if tree.edge_count() == 0 {
        return TreePoint::Vertex(tree.vertices().next().unwrap());
    }
    let k: u64 = rng.gen_range(0..(1u64 << GRID_BITS));
    let mut t = tree.total_length() * Rational::new(BigInt::from(k), BigInt::from(1u64 << GRID_BITS));
    for (i, edge) in tree.edges().iter().enumerate() {
        if t < edge.length {
            return tree.canonical(EdgeId(i), t);
        }
        t -= &edge.length;
    }
    unreachable!("grid fraction is below one")
}

/// Samples `sample_count` points and checks the absorption inclusion with
/// open balls.
pub fn p1_check(
    tree: &MetricTree,
    witness: &P1Witness,
    theta: &Rational,
    sample_count: usize,
    seed: u64,
) -> Result<P1Report> {
    if !theta.is_positive() || *theta >= witness.delta {
        return Err(WidthError::ThetaOutOfRange);
    }
    tree.check_points([&witness.x, &witness.y, &witness.z])?;
    let outer_x = &witness.radius + &witness.delta;
    let outer = &witness.radius + theta;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = P1Report {
        theta: theta.clone(),
        samples: sample_count,
        in_intersection: 0,
        violations: Vec::new(),
    };
    for _ in 0..sample_count {
        let w = uniform_point(tree, &mut rng);
        let dist_x = tree.dist(&witness.x, &w);
        let dist_y = tree.dist(&witness.y, &w);
        if dist_x >= outer_x || dist_y >= outer {
            continue;
        }
        report.in_intersection += 1;
        let dist_z = tree.dist(&witness.z, &w);
        if dist_z >= outer {
            report.violations.push(P1Violation {
                w,
                dist_x,
                dist_y,
                dist_z,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::tree::fixtures::*;

    #[test]
    fn witness_examples() {
        let p = path2();
        let w = p1_witness(&p, &v(&p, "u"), &v(&p, "v"), &ratio(1, 2), &int(1)).unwrap();
        assert_eq!(w.delta, ratio(1, 4));
        assert_eq!(w.z, e(&p, "u", "v", 1, 4));
        let r = p1_check(&p, &w, &ratio(1, 8), 1000, 3).unwrap();
        assert!(r.passed());
        assert!(r.in_intersection > 0);

        let x = e(&p, "u", "v", 1, 3);
        let w = p1_witness(&p, &x, &x, &int(1), &int(1)).unwrap();
        assert_eq!(w.z, x);

        let t = star3();
        let w = p1_witness(&t, &v(&t, "u"), &v(&t, "w"), &int(4), &int(1)).unwrap();
        assert_eq!(w.delta, int(2));
        assert_eq!(w.z, e(&t, "c", "w", 1, 1));
        assert!(p1_check(&t, &w, &int(1), 1000, 9).unwrap().passed());
    }

    #[test]
    fn short_segment_takes_y() {
        let p = path2();
        let w = p1_witness(&p, &v(&p, "u"), &e(&p, "u", "v", 1, 2), &int(4), &int(1)).unwrap();
        assert_eq!(w.z, e(&p, "u", "v", 1, 2));
    }

    #[test]
    fn theta_range() {
        let p = path2();
        let w = p1_witness(&p, &v(&p, "u"), &v(&p, "v"), &ratio(1, 2), &int(1)).unwrap();
        assert_eq!(p1_check(&p, &w, &ratio(1, 4), 10, 0), Err(WidthError::ThetaOutOfRange));
        assert_eq!(p1_check(&p, &w, &int(0), 10, 0), Err(WidthError::ThetaOutOfRange));
        assert_eq!(
            p1_witness(&p, &v(&p, "u"), &v(&p, "v"), &int(0), &int(1)),
            Err(WidthError::NonpositiveParameter("epsilon"))
        );
    }

    #[test]
    fn uniform_points_lie_on_tree() {
        let t = star3();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            assert!(t.check_point(&uniform_point(&t, &mut rng)).is_ok());
        }
    }
}
