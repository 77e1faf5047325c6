//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.
//!
//! Run with `cargo test -p metric-widths --test acceptance -- --nocapture`.

use std::cmp::Ordering;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use metric_widths::harness::{run_suite, RandomInstanceSpec, SuiteReport};
use metric_widths::radial::{
    ball_width, ball_width_lower_bound_witness, radial_distance, radial_segment, region_width, RadialBall,
    RadialPoint, RadialRegion, SurdSum, WidthValue,
};
use metric_widths::rational::{int, ratio};
use metric_widths::widths::{chebyshev_radius, default_tolerance, tn_width, WidthProblem};
use metric_widths::{build_tree, parse_rational, Rational};

struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn suite(name: &str, trials: usize, seed: u64, tweak: impl FnOnce(&mut RandomInstanceSpec)) -> SuiteReport {
    let mut spec = RandomInstanceSpec {
        trials,
        seed,
        ..Default::default()
    };
    tweak(&mut spec);
    run_suite(name, &spec).expect("known suite")
}

fn summarize(reports: &[&SuiteReport]) -> (bool, String) {
    let passed = reports.iter().all(|r| r.passed);
    let detail = reports
        .iter()
        .map(|r| {
            let mut s = format!("{} {}/{} clean", r.suite, r.trials - distinct_trials(r), r.trials);
            if let Some(f) = r.failures.first() {
                s.push_str(&format!(" (first: trial {} seed {}: {})", f.trial, f.sub_seed, f.detail));
            }
            s
        })
        .collect::<Vec<_>>()
        .join("; ");
    (passed, detail)
}

fn distinct_trials(r: &SuiteReport) -> usize {
    let mut t: Vec<usize> = r.failures.iter().map(|f| f.trial).collect();
    t.dedup();
    t.len()
}

fn timed(limit: Option<Duration>, body: impl FnOnce() -> (bool, String)) -> (bool, String) {
    let start = Instant::now();
    let (ok, detail) = body();
    let elapsed = start.elapsed();
    match limit {
        Some(l) => (
            ok && elapsed < l,
            format!("{detail}; {:.2}s of {:.0}s budget", elapsed.as_secs_f64(), l.as_secs_f64()),
        ),
        None => (ok, format!("{detail}; {:.2}s", elapsed.as_secs_f64())),
    }
}

fn cli_ball_width(r: &str, n: u32) -> Option<String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mtw"))
        .args(["radial", "ball-width", "--r", r, "--n", &n.to_string(), "--output", "plain"])
        .output()
        .ok()?;
    out.status
        .success()
        .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn random_radial_generators(rng: &mut ChaCha8Rng, r: &Rational, count: usize) -> Vec<RadialPoint> {
    let mut out: Vec<RadialPoint> = Vec::new();
    for _ in 0..count {
        let p = match rng.gen_range(0..6) {
            0 => RadialPoint::origin(2).unwrap(),
            1 if !out.is_empty() => {
                let base = out[rng.gen_range(0..out.len())].clone();
                base.scaled(&ratio(rng.gen_range(-4..=4), 4))
            }
            _ => RadialPoint::new(vec![ratio(rng.gen_range(-16..=16), 16), ratio(rng.gen_range(-16..=16), 16)])
                .unwrap(),
        };
        // shrink into the ball
        let scale = r / (int(1) + p.norm_sq());
        out.push(p.scaled(&scale));
    }
    out
}

fn criterion_radial() -> (bool, String) {
    timed(Some(Duration::from_secs(1)), || {
        let mut mismatches = Vec::new();
        let epsilon = parse_rational("1e-3").unwrap();
        for r_lit in ["1", "5/2", "10"] {
            let r = parse_rational(r_lit).unwrap();
            let ball = RadialBall::closed(r.clone()).unwrap();
            for n in [1u32, 2, 5, 100] {
                let cert = ball_width(&ball, n as usize, &epsilon).unwrap();
                let value = region_width(&RadialRegion::Ball(ball.clone()), n as usize).unwrap();
                let cli = cli_ball_width(r_lit, n);
                let ok = cert.value == r
                    && value == WidthValue::Finite(r.clone())
                    && cert.distinct_rays
                    && cert.origin_in_hull
                    && cli.as_deref() == Some(metric_widths::format_rational(&r).as_str());
                if !ok {
                    mismatches.push(format!("r={r_lit} n={n} cli={cli:?}"));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut witness_failures = 0;
        for set in 0..50 {
            let r = [int(1), ratio(5, 2), int(10)][set % 3].clone();
            let ball = RadialBall::closed(r.clone()).unwrap();
            let count = rng.gen_range(1..=8);
            let gens = random_radial_generators(&mut rng, &r, count);
            let bound = SurdSum::rational(&r - &epsilon);
            let ok = match ball_width_lower_bound_witness(&ball, &gens, &epsilon) {
                Ok(w) => {
                    let mut hull_pts = gens.clone();
                    for g in &gens[1..] {
                        for (p, q) in radial_segment(&gens[0], g).unwrap() {
                            for k in 0..=4 {
                                hull_pts.push(p.lerp(&q, &ratio(k, 4)));
                            }
                        }
                    }
                    ball.contains(&w)
                        && hull_pts.iter().all(|h| {
                            radial_distance(&w, h).unwrap().try_cmp(&bound) == Ok(Ordering::Greater)
                        })
                }
                Err(_) => false,
            };
            witness_failures += usize::from(!ok);
        }
        let ok = mismatches.is_empty() && witness_failures == 0;
        (
            ok,
            format!(
                "12 exact values ({} mismatches: {:?}), 50 generator sets ({} witness failures)",
                mismatches.len(),
                mismatches,
                witness_failures
            ),
        )
    })
}

fn criterion_chebyshev() -> (bool, String) {
    timed(None, || {
        let report = suite("chebyshev", 200, 303, |_| {});
        let t = build_tree(&[("c", "u", int(1)), ("c", "v", int(2)), ("c", "w", int(3))]).unwrap();
        let a = vec![t.vertex("u").unwrap(), t.vertex("v").unwrap(), t.vertex("w").unwrap()];
        let (value, center) = chebyshev_radius(&t, &a).unwrap();
        let w1 = tn_width(&WidthProblem::new(&t, a, 1).unwrap(), &default_tolerance()).unwrap();
        let star_ok = value == ratio(5, 2)
            && center == t.point_on_edge("c", "w", ratio(1, 2)).unwrap()
            && w1.hi == value
            && w1.exact;
        let (ok, detail) = summarize(&[&report]);
        (ok && star_ok, format!("{detail}; STAR3 radius 5/2 at E c w 1/2: {star_ok}"))
    })
}

#[test]
fn acceptance_criteria() {
    println!();
    let mut outcomes: Vec<Outcome> = Vec::new();
    let mut record = |id: u32, name: &'static str, (passed, detail): (bool, String)| {
        let line = format!(
            "criterion {id} [{}] {name}: {detail}",
            if passed { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        outcomes.push(Outcome {
            id,
            name,
            passed,
            detail,
        });
    };

    record(1, "radial ball width equals the radius", criterion_radial());

    record(
        2,
        "solver agrees with brute force at resolution 1/16",
        timed(Some(Duration::from_secs(60)), || {
            summarize(&[&suite("oracle", 100, 202, |s| s.max_points = 6)])
        }),
    );

    record(3, "n = 1 width equals the Chebyshev radius", criterion_chebyshev());

    record(
        4,
        "width sequences are non-increasing and bounded below by the compact width",
        timed(None, || {
            let a = suite("noninc", 200, 404, |_| {});
            let b = suite("geq", 200, 405, |_| {});
            summarize(&[&a, &b])
        }),
    );

    record(
        5,
        "width sequences reach 0 within the hull dimension",
        timed(None, || summarize(&[&suite("lim-delta", 200, 505, |_| {})])),
    );

    record(
        6,
        "dimension characterization and monotonicity",
        timed(None, || {
            let a = suite("dim-char", 500, 606, |_| {});
            let b = suite("nolarger", 200, 607, |_| {});
            let c = suite("lower-dim", 200, 608, |_| {});
            summarize(&[&a, &b, &c])
        }),
    );

    record(
        7,
        "ball absorption holds on sampled configurations",
        timed(Some(Duration::from_secs(30)), || {
            summarize(&[&suite("p1", 100, 707, |s| s.samples = 1000)])
        }),
    );

    record(
        8,
        "tree and radial axiom suites",
        timed(None, || {
            let a = suite("axioms", 200, 808, |_| {});
            let b = suite("betweenness", 200, 809, |_| {});
            let c = suite("compact-tree", 200, 810, |_| {});
            let d = suite("radial", 200, 811, |_| {});
            summarize(&[&a, &b, &c, &d])
        }),
    );

    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap_or_default();
    let documented = readme.contains("Sobolev");
    record(
        9,
        "normed-space widths are out of scope and documented as such",
        (documented, format!("README scope note present: {documented}")),
    );

    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{} ({}): {}", o.id, o.name, o.detail))
        .collect();
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.join("\n"));
}
