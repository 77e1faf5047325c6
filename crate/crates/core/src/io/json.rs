//! JSON rendering. Objects are `serde_json::Map`, which keeps keys sorted,
//! and every rational is a canonical string, so output is byte-stable.

use serde_json::{json, Map, Value};

use crate::harness::SuiteReport;
use crate::radial::BallWidthCertificate;
use crate::rational::{format_rational, to_f64, Rational};
use crate::tree::{MetricTree, Subtree, TreePoint};
use crate::widths::{BruteForceResult, CompactWidthResult, P1Report, P1Witness, WidthResult};

pub const SCHEMA_VERSION: &str = "1";

pub fn rational(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn point(tree: &MetricTree, p: &TreePoint) -> Value {
    Value::String(tree.encode_point(p))
}

pub fn points(tree: &MetricTree, ps: &[TreePoint]) -> Value {
    Value::Array(ps.iter().map(|p| point(tree, p)).collect())
}

/// Adds `"schema"` and `"op"` to a result object.
pub fn envelope(op: &str, body: Value) -> Value {
    let mut map = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    map.insert("op".into(), Value::String(op.into()));
    map.insert("schema".into(), Value::String(SCHEMA_VERSION.into()));
    Value::Object(map)
}

/// Adds an `"approx"` object of floating-point renderings for the given keys.
pub fn with_approx(mut value: Value, entries: &[(&str, &Rational)]) -> Value {
    let approx: Map<String, Value> = entries
        .iter()
        .map(|(k, r)| ((*k).to_string(), json!(to_f64(r))))
        .collect();
    if let Value::Object(m) = &mut value {
        m.insert("approx".into(), Value::Object(approx));
    }
    value
}

pub fn subtree(tree: &MetricTree, s: &Subtree) -> Value {
    let finals = s.final_points(tree);
    json!({
        "final_points": points(tree, &finals),
        "dimension": finals.len(),
        "length": rational(&s.length()),
    })
}

/// `tolerance` is echoed verbatim, as the caller wrote it.
pub fn width_result(tree: &MetricTree, w: &WidthResult, tolerance: &str) -> Value {
    json!({
        "n": w.n,
        "lo": rational(&w.lo),
        "hi": rational(&w.hi),
        "exact": w.exact,
        "witness": {
            "final_points": points(tree, &w.witness_final_points),
            "dimension": w.witness_dimension,
        },
        "star_convention": w.star_convention_applied,
        "tolerance": tolerance,
    })
}

pub fn compact_width(tree: &MetricTree, c: &CompactWidthResult) -> Value {
    json!({
        "value": rational(&c.value),
        "witness": points(tree, &c.witness),
        "attained": c.attained,
        "sequence_limit": rational(&c.sequence_limit),
        "stabilization_index": c.stabilization_index,
    })
}

pub fn brute_force(tree: &MetricTree, b: &BruteForceResult) -> Value {
    json!({
        "value": rational(&b.value),
        "witness": {"final_points": points(tree, &b.witness.final_points(tree))},
        "candidates": b.candidates,
    })
}

pub fn p1(tree: &MetricTree, w: &P1Witness, report: Option<&P1Report>) -> Value {
    let mut v = json!({
        "x": point(tree, &w.x),
        "y": point(tree, &w.y),
        "epsilon": rational(&w.epsilon),
        "r": rational(&w.radius),
        "delta": rational(&w.delta),
        "z": point(tree, &w.z),
    });
    if let (Some(r), Value::Object(m)) = (report, &mut v) {
        let violations: Vec<Value> = r
            .violations
            .iter()
            .map(|x| {
                json!({
                    "w": point(tree, &x.w),
                    "dist_x": rational(&x.dist_x),
                    "dist_y": rational(&x.dist_y),
                    "dist_z": rational(&x.dist_z),
                })
            })
            .collect();
        m.insert(
            "check".into(),
            json!({
                "theta": rational(&r.theta),
                "samples": r.samples,
                "in_intersection": r.in_intersection,
                "passed": r.passed(),
                "violations": violations,
            }),
        );
    }
    v
}

pub fn ball_width(c: &BallWidthCertificate) -> Value {
    serde_json::to_value(c).expect("certificate serializes")
}

pub fn suite_report(r: &SuiteReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

/// Compact single-line JSON with a trailing newline.
pub fn render(value: &Value) -> String {
    format!("{value}\n")
}
