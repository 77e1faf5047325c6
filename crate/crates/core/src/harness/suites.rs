use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;

use super::{random_points, random_tree, HarnessError, RandomInstanceSpec, Result};
use crate::io::{emit_points, emit_tree_tsv};
use crate::radial::{
    ball_width, ball_width_lower_bound_witness, radial_distance, radial_is_between, radial_segment, RadialBall,
    RadialPoint, SurdSum,
};
use crate::rational::{format_rational, int, ratio, Rational};
use crate::tree::{check_tree_axioms, random_point, MetricTree, Subtree, TreePoint};
use crate::widths::{
    brute_force_tn_width, chebyshev_radius, compact_width, default_tolerance, min_leaves_cover, p1_check, p1_witness,
    point_set_deviation, tn_width, width_sequence, WidthProblem,
};

pub(super) type Failure = (String, BTreeMap<String, String>);
pub(super) type Trial = fn(&RandomInstanceSpec, &mut ChaCha8Rng) -> Vec<Failure>;

pub const SUITES: &[&str] = &[
    "axioms",
    "betweenness",
    "dim-char",
    "nolarger",
    "lower-dim",
    "noninc",
    "geq",
    "lim-delta",
    "p1",
    "compact-tree",
    "radial",
    "oracle",
    "chebyshev",
];

pub(super) fn lookup(name: &str) -> Result<Trial> {
    Ok(match name {
        "axioms" => axioms,
        "betweenness" => betweenness,
        "dim-char" => dim_char,
        "nolarger" => nolarger,
        "lower-dim" => lower_dim,
        "noninc" => noninc,
        "geq" => geq,
        "lim-delta" => lim_delta,
        "p1" => p1,
        "compact-tree" => compact_tree,
        "radial" => radial,
        "oracle" => oracle,
        "chebyshev" => chebyshev,
        other => return Err(HarnessError::UnknownSuite(other.to_string())),
    })
}

/// Collects failures with the instance attached.
struct Log<'t> {
    tree: &'t MetricTree,
    base: BTreeMap<String, String>,
    failures: Vec<Failure>,
}

impl<'t> Log<'t> {
    fn new(tree: &'t MetricTree) -> Self {
        let mut base = BTreeMap::new();
        base.insert("tree".into(), emit_tree_tsv(tree));
        Self {
            tree,
            base,
            failures: Vec::new(),
        }
    }

    fn points(mut self, key: &str, points: &[TreePoint]) -> Self {
        self.base.insert(key.into(), emit_points(self.tree, points));
        self
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push((detail(), self.base.clone()));
        }
    }

    fn fail_with(&mut self, detail: String, extra: &[(&str, String)]) {
        let mut data = self.base.clone();
        for (k, v) in extra {
            data.insert((*k).into(), v.clone());
        }
        self.failures.push((detail, data));
    }

    fn done(self) -> Vec<Failure> {
        self.failures
    }
}

fn fmt(r: &Rational) -> String {
    format_rational(r)
}

fn axioms(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let triples: Vec<_> = (0..20)
        .map(|_| {
            (
                random_point(&tree, rng, 8),
                random_point(&tree, rng, 8),
                random_point(&tree, rng, 8),
            )
        })
        .collect();
    let report = check_tree_axioms(&tree, &triples, rng.next_u64());
    let mut log = Log::new(&tree);
    for f in report.failures {
        log.fail_with(format!("{:?}: {}", f.kind, f.detail), &[("points", f.points.join("\n"))]);
    }
    log.done()
}

fn betweenness(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let mut log = Log::new(&tree);
    let t = &tree;
    for _ in 0..20 {
        // structured quadruple with abc and acd
        let a = random_point(t, rng, 8);
        let d = random_point(t, rng, 8);
        let ad = t.segment_unchecked(&a, &d);
        let c = ad.point_at(t, &(&ad.length * ratio(rng.gen_range(0..=8), 8)));
        let ac = t.segment_unchecked(&a, &c);
        let b = ac.point_at(t, &(&ac.length * ratio(rng.gen_range(0..=8), 8)));
        for (a, b, c, d) in [(&a, &b, &c, &d), (&a, &random_point(t, rng, 8), &c, &random_point(t, rng, 8))] {
            if t.between(a, b, c) && t.between(a, c, d) && !(t.between(a, b, d) && t.between(b, c, d)) {
                let pts = emit_points(t, &[a.clone(), b.clone(), c.clone(), d.clone()]);
                log.fail_with("abc and acd hold but abd or bcd fails".into(), &[("points", pts)]);
            }
        }

        // three point property
        let (x, y, z) = (random_point(t, rng, 8), random_point(t, rng, 8), random_point(t, rng, 8));
        let m = t.median_unchecked(&x, &y, &z);
        let hull = |p: &TreePoint, q: &TreePoint| Subtree::hull_unchecked(t, &[p.clone(), q.clone()]);
        let xz_yz = hull(&x, &z).intersection(t, &hull(&y, &z));
        let xy_mz = hull(&x, &y).intersection(t, &hull(&m, &z));
        let ok = t.between(&x, &m, &y)
            && t.between(&x, &m, &z)
            && t.between(&y, &m, &z)
            && xz_yz == Some(hull(&m, &z))
            && xy_mz.and_then(|s| s.as_point()) == Some(m.clone());
        if !ok {
            let pts = emit_points(t, &[x, y, z, m]);
            log.fail_with("median violates the three point property".into(), &[("points", pts)]);
        }
    }
    log.done()
}

fn has_between_triple(t: &MetricTree, pts: &[TreePoint]) -> bool {
    (0..pts.len()).any(|i| {
        (0..pts.len()).any(|j| {
            j != i && (0..pts.len()).any(|k| k != i && k != j && t.between(&pts[i], &pts[j], &pts[k]))
        })
    })
}

fn dim_char(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let target = rng.gen_range(1..=t.max_dimension());
    let mut gens: Vec<TreePoint> = Vec::new();
    for _ in 0..8 * target {
        if gens.len() == target {
            break;
        }
        let p = random_point(t, rng, 8);
        let mut trial = gens.clone();
        trial.push(p);
        if !gens.contains(&trial[trial.len() - 1]) && !has_between_triple(t, &trial) {
            gens = trial;
        }
    }
    let hull = t.convex_hull(&gens).unwrap();
    let mut sorted = gens.clone();
    sorted.sort();
    let mut log = Log::new(t).points("generators", &gens);
    let finals = hull.final_points(t);
    log.check(finals == sorted, || {
        format!("final points of the hull differ from {} generators with no betweenness triple", gens.len())
    });

    // a set with a betweenness triple has fewer final points than members
    let mut mixed = random_points(spec, t, rng);
    mixed.sort();
    mixed.dedup();
    if mixed.len() >= 3 && has_between_triple(t, &mixed) {
        let dim = t.tn_dimension(&t.convex_hull(&mixed).unwrap());
        log.check(dim < mixed.len(), || {
            format!("set of {} with a betweenness triple has dimension {dim}", mixed.len())
        });
    }
    log.done()
}

fn nolarger(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let inner_pts = random_points(spec, t, rng);
    let mut outer_pts = inner_pts.clone();
    outer_pts.extend(random_points(spec, t, rng));
    let inner = t.convex_hull(&inner_pts).unwrap();
    let outer = t.convex_hull(&outer_pts).unwrap();
    let (m, n) = (t.tn_dimension(&inner), t.tn_dimension(&outer));
    let mut log = Log::new(t).points("inner", &inner_pts).points("outer", &outer_pts);
    log.check(inner.is_subset_of(&outer), || "hull of a subset is not contained in the hull".into());
    log.check(m <= n, || format!("nested subtrees with dimensions {m} > {n}"));
    log.check(n <= t.max_dimension(), || format!("dimension {n} exceeds the leaf count"));
    log.done()
}

fn lower_dim(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let pts = random_points(spec, t, rng);
    let x = t.convex_hull(&pts).unwrap();
    let finals = x.final_points(t);
    let mut log = Log::new(t).points("points", &pts);
    for m in 1..=finals.len() {
        let y = t.convex_hull(&finals[..m]).unwrap();
        let dim = t.tn_dimension(&y);
        log.check(dim == m && y.is_subset_of(&x), || {
            format!("hull of {m} final points has dimension {dim} or leaves the set")
        });
    }
    log.done()
}

fn sequence_bound(t: &MetricTree, pts: &[TreePoint]) -> usize {
    (t.tn_dimension(&t.convex_hull(pts).unwrap()) + 1).min(t.max_dimension())
}

fn noninc(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let a = random_points(spec, t, rng);
    let mut b = a.clone();
    b.extend(random_points(spec, t, rng).into_iter().take(2));
    let tol = default_tolerance();
    let slack = &tol * int(2);
    let n_max = sequence_bound(t, &b).max(sequence_bound(t, &a));
    let seq_a = width_sequence(t, &a, n_max, &tol).unwrap();
    let seq_b = width_sequence(t, &b, n_max, &tol).unwrap();
    let mut log = Log::new(t).points("A", &a).points("B", &b);
    for seq in [&seq_a, &seq_b] {
        for w in seq.windows(2) {
            log.check(w[1].hi <= &w[0].hi + &slack, || {
                format!("width rises from {} at n={} to {}", fmt(&w[0].hi), w[0].n, fmt(&w[1].hi))
            });
        }
    }
    for (wa, wb) in seq_a.iter().zip(&seq_b) {
        log.check(wa.hi <= &wb.hi + &slack, || {
            format!("n={}: width of A {} exceeds width of B {}", wa.n, fmt(&wa.hi), fmt(&wb.hi))
        });
    }
    let r1 = ratio(rng.gen_range(0..=32), 8);
    let r2 = &r1 + ratio(rng.gen_range(0..=16), 8);
    let (c1, c2) = (
        min_leaves_cover(t, &a, &r1).unwrap(),
        min_leaves_cover(t, &a, &r2).unwrap(),
    );
    log.check(c1 >= c2, || format!("cover count {c1} at {} below {c2} at {}", fmt(&r1), fmt(&r2)));
    log.done()
}

fn geq(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let a = random_points(spec, t, rng);
    let tol = default_tolerance();
    let cw = compact_width(t, &a, &tol).unwrap();
    let mut log = Log::new(t).points("A", &a);
    let dev = point_set_deviation(t, &a, &cw.witness).unwrap();
    log.check(dev == cw.value, || format!("compact witness deviation {} != {}", fmt(&dev), fmt(&cw.value)));
    for w in width_sequence(t, &a, sequence_bound(t, &a), &tol).unwrap() {
        log.check(w.hi >= cw.value && w.lo >= cw.value, || {
            format!("n={}: width [{}, {}] below compact width {}", w.n, fmt(&w.lo), fmt(&w.hi), fmt(&cw.value))
        });
        let dev = t.deviation(&a, &w.witness).unwrap();
        log.check(dev <= w.hi && w.witness_dimension <= w.n, || {
            format!("n={}: witness deviation {} or dimension {} breaks the bracket", w.n, fmt(&dev), w.witness_dimension)
        });
        if !w.exact {
            let c = min_leaves_cover(t, &a, &w.lo).unwrap();
            log.check(c > w.n.min(t.max_dimension()), || format!("n={}: lower end {} is feasible", w.n, fmt(&w.lo)));
        }
    }
    log.done()
}

fn lim_delta(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let a = random_points(spec, t, rng);
    let cw = compact_width(t, &a, &default_tolerance()).unwrap();
    let bound = t.tn_dimension(&t.convex_hull(&a).unwrap());
    let mut sorted = a.clone();
    sorted.sort();
    sorted.dedup();
    let mut log = Log::new(t).points("A", &a);
    log.check(cw.value.is_zero() && cw.witness == sorted && cw.attained, || {
        format!("compact width {} with a witness other than A", fmt(&cw.value))
    });
    log.check(cw.sequence_limit.is_zero(), || format!("width sequence ends at {}", fmt(&cw.sequence_limit)));
    log.check(cw.stabilization_index <= bound, || {
        format!("sequence reaches 0 at n={} beyond {bound} final points", cw.stabilization_index)
    });
    log.done()
}

fn p1(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let x = random_point(t, rng, 8);
    let y = random_point(t, rng, 8);
    let epsilon = ratio(rng.gen_range(1..=16), 8);
    let radius = ratio(rng.gen_range(1..=8), 4);
    let w = p1_witness(t, &x, &y, &epsilon, &radius).unwrap();
    let theta = &w.delta * ratio(rng.gen_range(1..=15), 16);
    let report = p1_check(t, &w, &theta, spec.samples, rng.next_u64()).unwrap();
    let mut log = Log::new(t).points("x,y,z", &[x, y, w.z.clone()]);
    let params = format!("epsilon={} r={} theta={}", fmt(&epsilon), fmt(&radius), fmt(&theta));
    for v in report.violations {
        log.fail_with(
            format!(
                "sample at distances x:{} y:{} z:{} escapes B(z, r+theta)",
                fmt(&v.dist_x),
                fmt(&v.dist_y),
                fmt(&v.dist_z)
            ),
            &[("params", params.clone()), ("w", t.encode_point(&v.w))],
        );
    }
    log.done()
}

fn compact_tree(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let pts = random_points(spec, t, rng);
    let mut log = Log::new(t).points("points", &pts);
    for s in [t.whole(), t.convex_hull(&pts).unwrap()] {
        let finals = s.final_points(t);
        for _ in 0..4 {
            let anchor = s.project(t, &random_point(t, rng, 8));
            let cover = finals.iter().fold(Subtree::singleton(&anchor), |acc, f| {
                acc.union_touching(&Subtree::hull_unchecked(t, &[anchor.clone(), f.clone()]))
            });
            log.check(cover == s, || {
                format!("union of [a,f] from {} misses part of the subtree", t.encode_point(&anchor))
            });
        }
    }
    log.done()
}

fn radial_point(rng: &mut ChaCha8Rng, pool: &[RadialPoint]) -> RadialPoint {
    match (rng.gen_range(0..10), pool.is_empty()) {
        (0, _) => RadialPoint::origin(2).unwrap(),
        (1..=3, false) => {
            // same or opposite ray as an earlier point
            let base = &pool[rng.gen_range(0..pool.len())];
            let k = rng.gen_range(1..=8) * if rng.gen_bool(0.5) { 1 } else { -1 };
            base.scaled(&ratio(k, 4))
        }
        _ => RadialPoint::new(vec![ratio(rng.gen_range(-8..=8), 4), ratio(rng.gen_range(-8..=8), 4)]).unwrap(),
    }
}

fn radial(_spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let mut failures = Vec::new();
    let mut fail = |detail: String, pts: &[&RadialPoint]| {
        let mut data = BTreeMap::new();
        data.insert(
            "points".into(),
            pts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\n"),
        );
        failures.push((detail, data));
    };
    let mut pool: Vec<RadialPoint> = Vec::new();
    for _ in 0..3 {
        let p = radial_point(rng, &pool);
        pool.push(p);
    }
    let (x, y, z) = (&pool[0], &pool[1], &pool[2]);
    let d = |p: &RadialPoint, q: &RadialPoint| radial_distance(p, q).unwrap();
    if !d(x, x).is_zero() {
        fail("d(x,x) is not zero".into(), &[x]);
    }
    if !(d(x, y) - d(y, x)).is_zero() {
        fail("distance is not symmetric".into(), &[x, y]);
    }
    if x != y && d(x, y).signum() != Ok(Ordering::Greater) {
        fail("distinct points at distance zero".into(), &[x, y]);
    }
    match (d(x, y) + d(y, z)).try_cmp(&d(x, z)) {
        Ok(Ordering::Less) => fail("triangle inequality fails".into(), &[x, y, z]),
        Err(_) => fail("triangle inequality undecided".into(), &[x, y, z]),
        _ => {}
    }
    let between = radial_is_between(x, z, y).unwrap();
    let equality = (d(x, z) + d(z, y) - d(x, y)).is_zero();
    if between != equality {
        fail(format!("betweenness {between} but additivity {equality}"), &[x, z, y]);
    }

    // balls: the width is r, and a witness beats r - epsilon against random generators
    let r = ratio(rng.gen_range(1..=40), 4);
    let n = rng.gen_range(1..=8);
    let epsilon = &r / int(1 << rng.gen_range(1..=10));
    let ball = RadialBall::closed(r.clone()).unwrap();
    match ball_width(&ball, n, &epsilon) {
        Ok(cert) if cert.value == r && cert.distinct_rays && cert.origin_in_hull => {}
        other => fail(format!("ball width certificate for r={} n={n}: {other:?}", fmt(&r)), &[]),
    }
    let gens: Vec<RadialPoint> = (0..n)
        .map(|_| {
            let p = radial_point(rng, &pool);
            let scale = ratio(1, 1) / (int(1) + p.norm_sq());
            p.scaled(&(&r * scale))
        })
        .collect();
    match ball_width_lower_bound_witness(&ball, &gens, &epsilon) {
        Ok(w) => {
            let bound = SurdSum::rational(&r - &epsilon);
            let mut hull_pts = gens.clone();
            for g in &gens[1..] {
                for (p, q) in radial_segment(&gens[0], g).unwrap() {
                    for k in 0..=4 {
                        hull_pts.push(p.lerp(&q, &ratio(k, 4)));
                    }
                }
            }
            let close = hull_pts
                .iter()
                .find(|h| d(&w, h).try_cmp(&bound) != Ok(Ordering::Greater));
            if !ball.contains(&w) {
                fail("lower witness outside the ball".into(), &[&w]);
            }
            if let Some(h) = close {
                fail(format!("lower witness within r - epsilon = {} of the hull", fmt(&(&r - &epsilon))), &[&w, h]);
            }
        }
        Err(e) => fail(format!("no lower witness: {e}"), &gens.iter().collect::<Vec<_>>()),
    }
    failures
}

fn oracle(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let a = random_points(spec, t, rng);
    let tol = default_tolerance();
    let resolution = ratio(1, 16);
    let mut log = Log::new(t).points("A", &a);
    for n in 1..=3 {
        let w = tn_width(&WidthProblem::new(t, a.clone(), n).unwrap(), &tol).unwrap();
        match brute_force_tn_width(t, &a, n, &resolution) {
            Ok(b) => {
                let gap = (&w.hi - &b.value).abs();
                log.check(gap <= &tol + &resolution && b.value >= w.lo, || {
                    format!("n={n}: solver [{}, {}] vs brute force {}", fmt(&w.lo), fmt(&w.hi), fmt(&b.value))
                });
            }
            Err(e) => log.check(false, || format!("n={n}: brute force failed: {e}")),
        }
    }
    log.done()
}

fn chebyshev(spec: &RandomInstanceSpec, rng: &mut ChaCha8Rng) -> Vec<Failure> {
    let tree = random_tree(spec, rng);
    let t = &tree;
    let a = random_points(spec, t, rng);
    let tol = default_tolerance();
    let (value, center) = chebyshev_radius(t, &a).unwrap();
    let diameter = a
        .iter()
        .flat_map(|p| a.iter().map(move |q| (p, q)))
        .map(|(p, q)| t.dist(p, q))
        .max()
        .unwrap();
    let w = tn_width(&WidthProblem::new(t, a.clone(), 1).unwrap(), &tol).unwrap();
    let dev = point_set_deviation(t, &a, std::slice::from_ref(&center)).unwrap();
    let mut log = Log::new(t).points("A", &a);
    log.check(&value * int(2) == diameter, || format!("radius {} is not half the diameter {}", fmt(&value), fmt(&diameter)));
    log.check(dev == value, || format!("center deviation {} != radius {}", fmt(&dev), fmt(&value)));
    log.check((&w.hi - &value).abs() <= tol && w.lo <= value, || {
        format!("n=1 width [{}, {}] vs radius {}", fmt(&w.lo), fmt(&w.hi), fmt(&value))
    });
    log.done()
}
