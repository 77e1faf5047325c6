//! Decision oracle: the fewest final points of a subtree within `r` of
//! every point of `A`.
//!
//! Only `conv(A)` needs to be searched: projecting a candidate subtree onto
//! the hull moves no point of `A` farther away and does not add final
//! points. The hull is refined so that every point at distance exactly `r`
//! from some site becomes a vertex; then each ball `B(a, r) ∩ conv(A)` is a
//! union of whole refined edges, and an optimal subtree can be assembled
//! from whole refined edges too.
//!
//! Fixing one vertex `t` of the answer forces the rest: from `t`, the subtree
//! must step toward a neighbor exactly when some site beyond that neighbor
//! is farther than `r` from the current vertex. Counting the tips of that
//! forced subtree for every `t` is a dynamic program over directed edges.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::rational::Rational;
use crate::tree::{MetricTree, Subtree, TreePoint};

pub(crate) struct RefinedTree {
    pub points: Vec<TreePoint>,
    pub adj: Vec<Vec<(usize, Rational)>>,
    /// Refined vertex of each site, parallel to the input sites.
    pub sites: Vec<usize>,
}

fn distance_on_edge(
    site: &TreePoint,
    edge: crate::tree::EdgeId,
    len: &Rational,
    to_u: &Rational,
    to_v: &Rational,
    x: &Rational,
) -> Rational {
    match site {
        TreePoint::Edge { edge: e, offset } if *e == edge => {
            let d = offset - x;
            if d < Rational::zero() {
                -d
            } else {
                d
            }
        }
        _ => (to_u + x).min(to_v + len - x),
    }
}

/// Refines `hull` at the sites and at every point exactly `radius` from a site.
pub(crate) fn refine(
    tree: &MetricTree,
    hull: &Subtree,
    sites: &[TreePoint],
    radius: &Rational,
) -> RefinedTree {
    if let Some(p) = hull.as_point() {
        return RefinedTree {
            points: vec![p],
            adj: vec![Vec::new()],
            sites: vec![0; sites.len()],
        };
    }
    let mut index: BTreeMap<TreePoint, usize> = BTreeMap::new();
    let mut points = Vec::new();
    let mut adj: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut intern = |p: TreePoint, points: &mut Vec<TreePoint>, adj: &mut Vec<Vec<_>>| {
        *index.entry(p.clone()).or_insert_with(|| {
            points.push(p);
            adj.push(Vec::new());
            points.len() - 1
        })
    };

    for (e, lo, hi) in hull.spans() {
        let edge = tree.edge(e);
        let (u, v) = (TreePoint::Vertex(edge.u), TreePoint::Vertex(edge.v));
        let mut cuts = vec![lo.clone(), hi.clone()];
        for a in sites {
            if let TreePoint::Edge { edge: ae, offset } = a {
                if *ae == e && lo <= offset && offset <= hi {
                    cuts.push(offset.clone());
                }
            }
            let (to_u, to_v) = (tree.dist(a, &u), tree.dist(a, &v));
            let mut candidates = vec![radius - &to_u, &edge.length - (radius - &to_v)];
            if let TreePoint::Edge { edge: ae, offset } = a {
                if *ae == e {
                    candidates.push(offset - radius);
                    candidates.push(offset + radius);
                }
            }
            for x in candidates {
                if lo < &x
                    && &x < hi
                    && distance_on_edge(a, e, &edge.length, &to_u, &to_v, &x) == *radius
                {
                    cuts.push(x);
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        let ids: Vec<usize> = cuts
            .iter()
            .map(|x| intern(tree.canonical(e, x.clone()), &mut points, &mut adj))
            .collect();
        for (w, pair) in cuts.windows(2).zip(ids.windows(2)) {
            let len = &w[1] - &w[0];
            adj[pair[0]].push((pair[1], len.clone()));
            adj[pair[1]].push((pair[0], len));
        }
    }
    let site_ids = sites.iter().map(|a| index[a]).collect();
    RefinedTree {
        points,
        adj,
        sites: site_ids,
    }
}

impl RefinedTree {
    fn distances_from(&self, start: usize) -> Vec<Rational> {
        let mut dist = vec![None; self.points.len()];
        dist[start] = Some(Rational::zero());
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            let dx = dist[x].clone().unwrap();
            for (y, len) in &self.adj[x] {
                if dist[*y].is_none() {
                    dist[*y] = Some(&dx + len);
                    stack.push(*y);
                }
            }
        }
        dist.into_iter().map(|d| d.expect("refined hull is connected")).collect()
    }
}

/// Forced-subtree tip counts on a refined hull at a fixed radius.
pub(crate) struct CoverDp<'a> {
    refined: &'a RefinedTree,
    /// `need[p][k]`: the subtree must step from `p` to its `k`-th neighbor.
    need: Vec<Vec<bool>>,
    /// Tips contributed beyond a directed edge, given it is traversed.
    tips: Vec<Vec<usize>>,
}

impl<'a> CoverDp<'a> {
    pub fn new(refined: &'a RefinedTree, radius: &Rational) -> Self {
        let site_dist: Vec<Vec<Rational>> = {
            let mut unique: Vec<usize> = refined.sites.clone();
            unique.sort();
            unique.dedup();
            unique.iter().map(|&s| refined.distances_from(s)).collect()
        };
        let need: Vec<Vec<bool>> = refined
            .adj
            .iter()
            .enumerate()
            .map(|(p, nbrs)| {
                nbrs.iter()
                    .map(|(c, _)| {
                        // some site lies beyond c and is out of reach from p
                        site_dist
                            .iter()
                            .any(|d| d[*c] < d[p] && d[p] > *radius)
                    })
                    .collect()
            })
            .collect();

        // Tip counts, filled in post-order over directed edges.
        let mut tips: Vec<Vec<usize>> = refined.adj.iter().map(|n| vec![0; n.len()]).collect();
        let mut done: Vec<Vec<bool>> = refined.adj.iter().map(|n| vec![false; n.len()]).collect();
        for p in 0..refined.adj.len() {
            for k in 0..refined.adj[p].len() {
                if done[p][k] {
                    continue;
                }
                let mut stack = vec![(p, k, false)];
                while let Some((a, j, expanded)) = stack.pop() {
                    if done[a][j] {
                        continue;
                    }
                    let c = refined.adj[a][j].0;
                    let onward: Vec<usize> = (0..refined.adj[c].len())
                        .filter(|&m| refined.adj[c][m].0 != a && need[c][m])
                        .collect();
                    if expanded {
                        tips[a][j] = if onward.is_empty() {
                            1
                        } else {
                            onward.iter().map(|&m| tips[c][m]).sum()
                        };
                        done[a][j] = true;
                    } else {
                        stack.push((a, j, true));
                        for m in onward {
                            if !done[c][m] {
                                stack.push((c, m, false));
                            }
                        }
                    }
                }
            }
        }
        Self { refined, need, tips }
    }

    /// Tips of the forced subtree through refined vertex `t`.
    pub fn count_at(&self, t: usize) -> usize {
        let needed: Vec<usize> = (0..self.refined.adj[t].len())
            .filter(|&k| self.need[t][k])
            .collect();
        match needed.len() {
            0 => 1,
            1 => 1 + self.tips[t][needed[0]],
            _ => needed.iter().map(|&k| self.tips[t][k]).sum(),
        }
    }

    pub fn min_count(&self) -> usize {
        (0..self.refined.points.len())
            .map(|t| self.count_at(t))
            .min()
            .unwrap_or(1)
    }

    /// Tips of the forced subtree through `t`, as tree points.
    pub fn tips_at(&self, t: usize) -> Vec<TreePoint> {
        let mut out = Vec::new();
        let needed: Vec<usize> = (0..self.refined.adj[t].len())
            .filter(|&k| self.need[t][k])
            .collect();
        if needed.len() <= 1 {
            out.push(self.refined.points[t].clone());
        }
        let mut stack: Vec<(usize, usize)> = needed.iter().map(|&k| (t, k)).collect();
        while let Some((a, j)) = stack.pop() {
            let c = self.refined.adj[a][j].0;
            let onward: Vec<usize> = (0..self.refined.adj[c].len())
                .filter(|&m| self.refined.adj[c][m].0 != a && self.need[c][m])
                .collect();
            if onward.is_empty() {
                out.push(self.refined.points[c].clone());
            }
            stack.extend(onward.into_iter().map(|m| (c, m)));
        }
        out.sort();
        out
    }

    /// The optimal forced subtree whose sorted tips compare smallest.
    pub fn best_tips(&self) -> Vec<TreePoint> {
        let best = self.min_count();
        (0..self.refined.points.len())
            .filter(|&t| self.count_at(t) == best)
            .map(|t| self.tips_at(t))
            .min()
            .expect("refined tree has a vertex")
    }
}
