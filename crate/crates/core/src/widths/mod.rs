//! Tn-widths and compact widths of finite sets on finite metric trees.
//!
//! `δ_n(A) = inf over Tn-dimensional X of max_{a in A} d(a, X)`. The solver
//! bisects on the radius with an exact decision oracle
//! ([`min_leaves_cover`]); searching over subtrees with *at most* `n` final
//! points gives the same infimum because the width sequence is
//! non-increasing. Once the bracket is narrower than the tolerance, the
//! smallest candidate critical radius inside it is tried; if the oracle
//! accepts it, the bracket collapses to that exact value.

mod brute;
mod cover;
mod p1;

pub use brute::{brute_force_tn_width, BruteForceOracle, BruteForceResult, DEFAULT_TUPLE_LIMIT};
pub use p1::{p1_check, p1_witness, uniform_point, P1Report, P1Violation, P1Witness};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{half, parse_rational, Rational};
use crate::tree::{MetricTree, Subtree, TreeError, TreePoint};
use cover::{refine, CoverDp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WidthError {
    #[error("empty point set")]
    EmptyInput,
    #[error("radius must be nonnegative")]
    NegativeRadius,
    #[error("tolerance must be positive")]
    NonpositiveTolerance,
    #[error("n must be at least 1")]
    ZeroN,
    #[error("{0} must be positive")]
    NonpositiveParameter(&'static str),
    #[error("instance too large: {tuples} candidate tuples exceed the limit {limit}")]
    InstanceTooLarge { tuples: u128, limit: u128 },
    #[error("theta must satisfy 0 < theta < delta")]
    ThetaOutOfRange,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

pub type Result<T, E = WidthError> = std::result::Result<T, E>;

/// Default bisection tolerance, `1e-9`.
pub fn default_tolerance() -> Rational {
    parse_rational("1e-9").unwrap()
}

/// Critical-radius snapping is skipped above this many sites (the candidate
/// set grows cubically).
const SNAP_SITE_LIMIT: usize = 64;

#[derive(Debug, Clone)]
pub struct WidthProblem<'t> {
    pub tree: &'t MetricTree,
    pub points: Vec<TreePoint>,
    pub n: usize,
}

impl<'t> WidthProblem<'t> {
    pub fn new(tree: &'t MetricTree, points: Vec<TreePoint>, n: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(WidthError::EmptyInput);
        }
        if n == 0 {
            return Err(WidthError::ZeroN);
        }
        tree.check_points(&points)?;
        Ok(Self { tree, points, n })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthResult {
    pub n: usize,
    /// The width lies in `(lo, hi]`, or equals `lo = hi` when `exact`.
    pub lo: Rational,
    pub hi: Rational,
    pub exact: bool,
    /// A subtree with at most `n` final points and deviation at most `hi`.
    pub witness: Subtree,
    pub witness_final_points: Vec<TreePoint>,
    pub witness_dimension: usize,
    /// `n` exceeds the largest dimension available in the tree, so the value
    /// repeats the width at that dimension.
    pub star_convention_applied: bool,
    pub tolerance: Rational,
}

impl WidthResult {
    /// The certified upper end, attained by the witness.
    pub fn value(&self) -> &Rational {
        &self.hi
    }
}

/// Reusable per-instance state for repeated oracle calls.
struct CoverSolver<'t> {
    tree: &'t MetricTree,
    sites: Vec<TreePoint>,
    hull: Subtree,
}

impl<'t> CoverSolver<'t> {
    fn new(tree: &'t MetricTree, points: &[TreePoint]) -> Self {
        let mut sites = points.to_vec();
        sites.sort();
        sites.dedup();
        let hull = Subtree::hull_unchecked(tree, &sites);
        Self { tree, sites, hull }
    }

    fn count(&self, radius: &Rational) -> usize {
        let refined = refine(self.tree, &self.hull, &self.sites, radius);
        CoverDp::new(&refined, radius).min_count()
    }

    /// Tips of the optimal forced subtree, each pushed out to the smallest
    /// final point of the hull lying beyond it. Superset, same tip count.
    fn witness(&self, radius: &Rational) -> Vec<TreePoint> {
        let refined = refine(self.tree, &self.hull, &self.sites, radius);
        let tips = CoverDp::new(&refined, radius).best_tips();
        if tips.len() < 2 {
            return tips;
        }
        let core = Subtree::hull_unchecked(self.tree, &tips);
        let outer = self.hull.final_points(self.tree);
        let mut out: Vec<TreePoint> = tips
            .iter()
            .map(|t| {
                outer
                    .iter()
                    .find(|f| !core.contains(f) && core.project(self.tree, f) == *t)
                    .unwrap_or(t)
                    .clone()
            })
            .collect();
        out.sort();
        out
    }

    /// Radii at which the optimum can sit: half a pairwise distance (one
    /// centre) or a site's distance to a segment between two sites.
    fn critical_radii(&self) -> Vec<Rational> {
        let d: Vec<Vec<Rational>> = self
            .sites
            .iter()
            .map(|a| self.sites.iter().map(|b| self.tree.dist(a, b)).collect())
            .collect();
        let k = self.sites.len();
        let mut out = vec![Rational::zero()];
        for a in 0..k {
            for b in 0..k {
                out.push(half(&d[a][b]));
                for c in b + 1..k {
                    out.push(half(&(&d[a][b] + &d[a][c] - &d[b][c])));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// The fewest final points of a subtree whose deviation from `points` is at
/// most `radius`.
pub fn min_leaves_cover(tree: &MetricTree, points: &[TreePoint], radius: &Rational) -> Result<usize> {
    if points.is_empty() {
        return Err(WidthError::EmptyInput);
    }
    if radius.is_negative() {
        return Err(WidthError::NegativeRadius);
    }
    tree.check_points(points)?;
    Ok(CoverSolver::new(tree, points).count(radius))
}

/// The Tn-width `δ_n(A, M)` as a certified bracket of width at most
/// `tolerance`, with a witness subtree.
pub fn tn_width(problem: &WidthProblem<'_>, tolerance: &Rational) -> Result<WidthResult> {
    if !tolerance.is_positive() {
        return Err(WidthError::NonpositiveTolerance);
    }
    let tree = problem.tree;
    let dim_cap = tree.max_dimension();
    let star = problem.n > dim_cap;
    let n = problem.n.min(dim_cap);
    let solver = CoverSolver::new(tree, &problem.points);
    let feasible = |r: &Rational| solver.count(r) <= n;

    let finish = |lo: Rational, hi: Rational, exact: bool| {
        let tips = solver.witness(&hi);
        let witness = Subtree::hull_unchecked(tree, &tips);
        let witness_final_points = witness.final_points(tree);
        WidthResult {
            n: problem.n,
            lo,
            hi,
            exact,
            witness_dimension: witness_final_points.len(),
            witness,
            witness_final_points,
            star_convention_applied: star,
            tolerance: tolerance.clone(),
        }
    };

    if feasible(&Rational::zero()) {
        return Ok(finish(Rational::zero(), Rational::zero(), true));
    }
    // a single site is always a feasible one-point subtree
    let anchor = &solver.sites[0];
    let mut hi = solver
        .sites
        .iter()
        .map(|a| tree.dist(a, anchor))
        .max()
        .unwrap();
    let mut lo = Rational::zero();
    let two = Rational::from_integer(2.into());
    while &hi - &lo > *tolerance {
        let mid = (&lo + &hi) / &two;
        if feasible(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    if solver.sites.len() <= SNAP_SITE_LIMIT {
        if let Some(c) = solver
            .critical_radii()
            .into_iter()
            .find(|c| *c > lo && *c <= hi)
        {
            if feasible(&c) {
                return Ok(finish(c.clone(), c, true));
            }
        }
    }
    Ok(finish(lo, hi, false))
}

/// Half the diameter of `A`, with the midpoint of the lexicographically
/// first diametral pair as centre. Equals `δ_1(A)` exactly.
pub fn chebyshev_radius(tree: &MetricTree, points: &[TreePoint]) -> Result<(Rational, TreePoint)> {
    if points.is_empty() {
        return Err(WidthError::EmptyInput);
    }
    tree.check_points(points)?;
    let mut sites = points.to_vec();
    sites.sort();
    sites.dedup();
    let mut best = (Rational::zero(), 0, 0);
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            let d = tree.dist(&sites[i], &sites[j]);
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    let (diameter, i, j) = best;
    let center = tree
        .segment_unchecked(&sites[i], &sites[j])
        .point_at(tree, &half(&diameter));
    Ok((half(&diameter), center))
}

/// `(δ_1, …, δ_{n_max})`. Entries past the largest dimension the tree
/// admits repeat that entry with the star convention flagged.
pub fn width_sequence(
    tree: &MetricTree,
    points: &[TreePoint],
    n_max: usize,
    tolerance: &Rational,
) -> Result<Vec<WidthResult>> {
    if n_max == 0 {
        return Err(WidthError::ZeroN);
    }
    let cap = tree.max_dimension();
    let mut out: Vec<WidthResult> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n > cap {
            let mut repeated = out[cap - 1].clone();
            repeated.n = n;
            repeated.star_convention_applied = true;
            out.push(repeated);
        } else {
            let problem = WidthProblem::new(tree, points.to_vec(), n)?;
            out.push(tn_width(&problem, tolerance)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactWidthResult {
    /// Always zero: a finite set is compact and approximates itself.
    pub value: Rational,
    /// The compact set attaining the value: `A` itself.
    pub witness: Vec<TreePoint>,
    pub attained: bool,
    /// `lim δ_n`, read from the width sequence once it reaches zero.
    pub sequence_limit: Rational,
    /// First `n` with `δ_n = 0`.
    pub stabilization_index: usize,
}

/// `max_{a in A} min_{x in X} d(a, x)` for a finite `X`.
pub fn point_set_deviation(tree: &MetricTree, points: &[TreePoint], set: &[TreePoint]) -> Result<Rational> {
    if points.is_empty() || set.is_empty() {
        return Err(WidthError::EmptyInput);
    }
    tree.check_points(points.iter().chain(set))?;
    Ok(points
        .iter()
        .map(|a| set.iter().map(|x| tree.dist(a, x)).min().unwrap())
        .max()
        .unwrap())
}

/// The compact width `a(A, M)` of a finite set, cross-checked against the
/// limit of the Tn-width sequence.
pub fn compact_width(tree: &MetricTree, points: &[TreePoint], tolerance: &Rational) -> Result<CompactWidthResult> {
    if points.is_empty() {
        return Err(WidthError::EmptyInput);
    }
    tree.check_points(points)?;
    let mut witness = points.to_vec();
    witness.sort();
    witness.dedup();
    let value = point_set_deviation(tree, points, &witness)?;
    let hull_dim = Subtree::hull_unchecked(tree, &witness).final_points(tree).len();
    let seq = width_sequence(tree, points, hull_dim, tolerance)?;
    let stabilization_index = seq
        .iter()
        .position(|w| w.exact && w.hi.is_zero())
        .map(|i| i + 1)
        .unwrap_or(hull_dim);
    let sequence_limit = seq.last().map(|w| w.hi.clone()).unwrap_or_else(Rational::zero);
    Ok(CompactWidthResult {
        value,
        witness,
        attained: true,
        sequence_limit,
        stabilization_index,
    })
}
