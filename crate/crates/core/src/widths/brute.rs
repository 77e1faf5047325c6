//! Exhaustive oracle over a grid of candidate final points.
//!
//! Independent of the decision oracle: it never refines or runs the DP, it
//! only evaluates `max_a d(a, hull(S))` for every candidate set `S` using
//! integer Gromov products on a common denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{Result, WidthError};
use crate::rational::Rational;
use crate::tree::{MetricTree, Subtree, TreePoint};

/// Default cap on the number of candidate tuples examined.
pub const DEFAULT_TUPLE_LIMIT: u128 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceResult {
    /// Best deviation found; an upper bound on the width within `resolution`.
    pub value: Rational,
    pub witness: Subtree,
    /// The candidate points spanning the witness.
    pub tuple: Vec<TreePoint>,
    pub candidates: usize,
}

/// Candidate grid and scaled distance table for one `(tree, A, resolution)`.
pub struct BruteForceOracle<'t> {
    tree: &'t MetricTree,
    sites: Vec<TreePoint>,
    hull: Subtree,
    candidates: Vec<TreePoint>,
    scale: BigInt,
    /// `site_dist[a][p]`, scaled to integers.
    site_dist: Vec<Vec<i128>>,
    /// `cand_dist[p][q]`, scaled to integers.
    cand_dist: Vec<Vec<i128>>,
    tuple_limit: u128,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

impl<'t> BruteForceOracle<'t> {
    pub fn new(tree: &'t MetricTree, points: &[TreePoint], resolution: &Rational) -> Result<Self> {
        if points.is_empty() {
            return Err(WidthError::EmptyInput);
        }
        if *resolution <= Rational::zero() {
            return Err(WidthError::NonpositiveParameter("resolution"));
        }
        tree.check_points(points)?;
        let mut sites = points.to_vec();
        sites.sort();
        sites.dedup();
        let hull = Subtree::hull_unchecked(tree, &sites);

        let mut candidates: Vec<TreePoint> = hull.vertices().map(TreePoint::Vertex).collect();
        candidates.extend(hull.final_points(tree));
        candidates.extend(sites.iter().cloned());
        for (e, lo, hi) in hull.spans() {
            let mut k = (lo / resolution).ceil();
            while &(&k * resolution) <= hi {
                candidates.push(tree.canonical(e, &k * resolution));
                k += Rational::one();
            }
        }
        for (i, a) in sites.iter().enumerate() {
            for b in &sites[i + 1..] {
                candidates.push(tree.segment_unchecked(a, b).midpoint(tree));
            }
        }
        candidates.sort();
        candidates.dedup();

        let raw_sites: Vec<Vec<Rational>> = sites
            .iter()
            .map(|a| candidates.iter().map(|p| tree.dist(a, p)).collect())
            .collect();
        let raw_cands: Vec<Vec<Rational>> = candidates
            .iter()
            .map(|p| candidates.iter().map(|q| tree.dist(p, q)).collect())
            .collect();
        let scale = raw_sites
            .iter()
            .chain(&raw_cands)
            .flatten()
            .fold(BigInt::one(), |acc, d| acc.lcm(d.denom()));
        let to_int = |d: &Rational| -> i128 {
            (d.numer() * (&scale / d.denom()))
                .to_i128()
                .expect("scaled distance fits in i128")
        };
        let site_dist = raw_sites.iter().map(|row| row.iter().map(to_int).collect()).collect();
        let cand_dist = raw_cands.iter().map(|row| row.iter().map(to_int).collect()).collect();
        Ok(Self {
            tree,
            sites,
            hull,
            candidates,
            scale,
            site_dist,
            cand_dist,
            tuple_limit: DEFAULT_TUPLE_LIMIT,
        })
    }

    pub fn with_tuple_limit(mut self, limit: u128) -> Self {
        self.tuple_limit = limit;
        self
    }

    pub fn candidates(&self) -> &[TreePoint] {
        &self.candidates
    }

    /// `2 · max_a d(a, hull(tuple))`, scaled.
    fn doubled_deviation(&self, tuple: &[usize]) -> i128 {
        self.site_dist
            .iter()
            .map(|da| {
                let mut best = i128::MAX;
                for (i, &p) in tuple.iter().enumerate() {
                    best = best.min(2 * da[p]);
                    for &q in &tuple[i + 1..] {
                        best = best.min(da[p] + da[q] - self.cand_dist[p][q]);
                    }
                }
                best
            })
            .max()
            .unwrap()
    }

    pub fn solve(&self, n: usize) -> Result<BruteForceResult> {
        if n == 0 {
            return Err(WidthError::ZeroN);
        }
        let hull_finals = self.hull.final_points(self.tree);
        if n >= hull_finals.len() {
            return Ok(BruteForceResult {
                value: Rational::zero(),
                witness: self.hull.clone(),
                tuple: hull_finals,
                candidates: self.candidates.len(),
            });
        }
        let c = self.candidates.len();
        let k = n.min(c);
        let tuples = binomial(c, k);
        if tuples > self.tuple_limit {
            return Err(WidthError::InstanceTooLarge {
                tuples,
                limit: self.tuple_limit,
            });
        }
        let (value, tuple) = (0..c)
            .into_par_iter()
            .map(|first| {
                let mut best: Option<(i128, Vec<usize>)> = None;
                let mut tuple = vec![first];
                self.search(&mut tuple, k, &mut best);
                best
            })
            .flatten()
            .min()
            .expect("at least one candidate tuple");
        let points: Vec<TreePoint> = tuple.iter().map(|&i| self.candidates[i].clone()).collect();
        Ok(BruteForceResult {
            value: Rational::new(value.into(), &self.scale * BigInt::from(2)),
            witness: Subtree::hull_unchecked(self.tree, &points),
            tuple: points,
            candidates: c,
        })
    }

    fn search(&self, tuple: &mut Vec<usize>, k: usize, best: &mut Option<(i128, Vec<usize>)>) {
        if tuple.len() == k {
            let v = self.doubled_deviation(tuple);
            let better = match best {
                None => true,
                Some((bv, bt)) => (v, tuple.as_slice()) < (*bv, bt.as_slice()),
            };
            if better {
                *best = Some((v, tuple.clone()));
            }
            return;
        }
        let next = tuple.last().unwrap() + 1;
        for i in next..self.candidates.len() {
            tuple.push(i);
            self.search(tuple, k, best);
            tuple.pop();
        }
    }

    pub fn sites(&self) -> &[TreePoint] {
        &self.sites
    }
}

/// Minimum deviation over hulls of `n` candidate points from the grid of
/// hull vertices, final points, sites, pairwise midpoints and edge points at
/// multiples of `resolution`.
pub fn brute_force_tn_width(
    tree: &MetricTree,
    points: &[TreePoint],
    n: usize,
    resolution: &Rational,
) -> Result<BruteForceResult> {
    BruteForceOracle::new(tree, points, resolution)?.solve(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::tree::fixtures::*;

    #[test]
    fn spec_examples() {
        let t = star3();
        let a = [v(&t, "u"), v(&t, "v"), v(&t, "w")];
        let r = brute_force_tn_width(&t, &a, 2, &ratio(1, 4)).unwrap();
        assert_eq!(r.value, int(1));
        assert_eq!(t.deviation(&a, &r.witness).unwrap(), int(1));
        let r = brute_force_tn_width(&t, &a, 3, &ratio(1, 4)).unwrap();
        assert_eq!((r.value, r.witness), (int(0), t.whole()));
        let r = brute_force_tn_width(&t, &a, 1, &ratio(1, 4)).unwrap();
        assert_eq!(r.value, ratio(5, 2));
        assert_eq!(r.tuple, vec![e(&t, "c", "w", 1, 2)]);

        let p = path2();
        let r = brute_force_tn_width(&p, &[v(&p, "u"), v(&p, "v")], 1, &ratio(1, 8)).unwrap();
        assert_eq!(r.value, int(1));
    }

    #[test]
    fn guard_and_errors() {
        let t = star3();
        let a = [v(&t, "u"), v(&t, "v"), v(&t, "w")];
        let oracle = BruteForceOracle::new(&t, &a, &ratio(1, 64)).unwrap().with_tuple_limit(10);
        assert!(matches!(oracle.solve(2), Err(WidthError::InstanceTooLarge { .. })));
        assert_eq!(
            brute_force_tn_width(&t, &a, 1, &int(0)).unwrap_err(),
            WidthError::NonpositiveParameter("resolution")
        );
        assert_eq!(brute_force_tn_width(&t, &[], 1, &int(1)).unwrap_err(), WidthError::EmptyInput);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(300, 3), 4_455_100);
        assert_eq!(binomial(2, 3), 0);
    }
}
