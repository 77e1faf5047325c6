//! Seeded property suites over random trees and point sets.
//!
//! Each trial draws its own sub-seed from `(seed, trial)`, so trials run in
//! parallel and a reported counterexample replays from its sub-seed alone.

mod suites;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;
use crate::tree::{random_point, MetricTree, TreePoint};

pub use suites::SUITES;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("unknown suite `{0}`; known suites: {known}", known = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("invalid instance spec: {0}")]
    InvalidSpec(&'static str),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

/// Ranges for random instances. Edge lengths are `k / length_denominator`
/// for `k` in `1..=max_length_steps`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RandomInstanceSpec {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub length_denominator: u32,
    pub max_length_steps: u32,
    pub min_points: usize,
    pub max_points: usize,
    pub trials: usize,
    /// Membership samples per trial in the absorption suite.
    pub samples: usize,
    pub seed: u64,
}

impl Default for RandomInstanceSpec {
    fn default() -> Self {
        Self {
            min_vertices: 2,
            max_vertices: 10,
            length_denominator: 4,
            max_length_steps: 8,
            min_points: 1,
            max_points: 6,
            trials: 200,
            samples: 1000,
            seed: 42,
        }
    }
}

impl RandomInstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.min_vertices < 2 {
            return Err(HarnessError::InvalidSpec("at least two vertices are required"));
        }
        if self.min_vertices > self.max_vertices {
            return Err(HarnessError::InvalidSpec("vertex range is empty"));
        }
        if self.length_denominator == 0 || self.max_length_steps == 0 {
            return Err(HarnessError::InvalidSpec("length grid must be positive"));
        }
        if self.min_points == 0 || self.min_points > self.max_points {
            return Err(HarnessError::InvalidSpec("point count range is empty or zero"));
        }
        Ok(())
    }

    fn random_length<R: Rng + ?Sized>(&self, rng: &mut R) -> Rational {
        Rational::new(
            rng.gen_range(1..=self.max_length_steps).into(),
            self.length_denominator.into(),
        )
    }
}

/// Uniform labelled tree (decoded from a random Prüfer sequence) with
/// vertices `v00`, `v01`, ... and grid lengths.
pub fn random_tree<R: Rng + ?Sized>(spec: &RandomInstanceSpec, rng: &mut R) -> MetricTree {
    let n = rng.gen_range(spec.min_vertices..=spec.max_vertices);
    let names: Vec<String> = (0..n).map(|i| format!("v{i:02}")).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n - 1);
    if n == 2 {
        pairs.push((0, 1));
    } else {
        let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        let mut degree = vec![1usize; n];
        for &c in &code {
            degree[c] += 1;
        }
        for &c in &code {
            let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
            pairs.push((leaf, c));
            degree[leaf] -= 1;
            degree[c] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
        pairs.push((rest[0], rest[1]));
    }
    let edges: Vec<(&str, &str, Rational)> = pairs
        .iter()
        .map(|&(a, b)| (names[a].as_str(), names[b].as_str(), spec.random_length(rng)))
        .collect();
    MetricTree::from_edges(edges).expect("Prüfer decoding yields a tree")
}

pub fn generate_random_tree(spec: &RandomInstanceSpec) -> Result<MetricTree> {
    spec.validate()?;
    Ok(random_tree(spec, &mut ChaCha8Rng::seed_from_u64(spec.seed)))
}

/// Between `min_points` and `max_points` random points on an eighth-edge grid.
pub fn random_points<R: Rng + ?Sized>(
    spec: &RandomInstanceSpec,
    tree: &MetricTree,
    rng: &mut R,
) -> Vec<TreePoint> {
    let k = rng.gen_range(spec.min_points..=spec.max_points);
    (0..k).map(|_| random_point(tree, rng, 8)).collect()
}

/// Sub-seed of trial `trial` under `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub sub_seed: u64,
    pub detail: String,
    /// Exact data: tree TSV, points-file lines, parameters.
    pub data: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub seed: u64,
    pub passed: bool,
    pub failures: Vec<Counterexample>,
    pub elapsed_ms: u128,
}

pub fn run_suite(name: &str, spec: &RandomInstanceSpec) -> Result<SuiteReport> {
    let suite = suites::lookup(name)?;
    spec.validate()?;
    let start = Instant::now();
    let mut failures: Vec<Counterexample> = (0..spec.trials)
        .into_par_iter()
        .flat_map_iter(|trial| run_trial_with(suite, spec, trial))
        .collect();
    failures.sort_by_key(|c| c.trial);
    Ok(SuiteReport {
        suite: name.to_string(),
        trials: spec.trials,
        seed: spec.seed,
        passed: failures.is_empty(),
        failures,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Re-runs one trial; used to replay a reported counterexample.
pub fn run_trial(name: &str, spec: &RandomInstanceSpec, trial: usize) -> Result<Vec<Counterexample>> {
    let suite = suites::lookup(name)?;
    spec.validate()?;
    Ok(run_trial_with(suite, spec, trial))
}

fn run_trial_with(suite: suites::Trial, spec: &RandomInstanceSpec, trial: usize) -> Vec<Counterexample> {
    let sub_seed = trial_seed(spec.seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
    suite(spec, &mut rng)
        .into_iter()
        .map(|(detail, data)| Counterexample {
            trial,
            sub_seed,
            detail,
            data,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_trees() {
        let small = RandomInstanceSpec {
            min_vertices: 2,
            max_vertices: 2,
            seed: 3,
            ..Default::default()
        };
        let t = generate_random_tree(&small).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (2, 1));

        let ten = RandomInstanceSpec {
            min_vertices: 10,
            max_vertices: 10,
            length_denominator: 2,
            seed: 7,
            ..Default::default()
        };
        let t = generate_random_tree(&ten).unwrap();
        assert_eq!((t.vertex_count(), t.edge_count()), (10, 9));
        assert!(t
            .edges()
            .iter()
            .all(|e| e.length >= Rational::new(1.into(), 2.into()) && e.length <= Rational::from_integer(4.into())));
        assert_eq!(generate_random_tree(&ten).unwrap(), t);

        let bad = RandomInstanceSpec {
            min_vertices: 1,
            ..Default::default()
        };
        assert!(matches!(generate_random_tree(&bad), Err(HarnessError::InvalidSpec(_))));
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(
            run_suite("unknown", &RandomInstanceSpec::default()),
            Err(HarnessError::UnknownSuite("unknown".into()))
        );
    }

    #[test]
    fn every_suite_passes_a_few_trials() {
        let spec = RandomInstanceSpec {
            trials: 6,
            samples: 200,
            seed: 11,
            ..Default::default()
        };
        for name in SUITES {
            let report = run_suite(name, &spec).unwrap();
            assert!(report.passed, "{name}: {:#?}", report.failures);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let spec = RandomInstanceSpec {
            trials: 10,
            ..Default::default()
        };
        let mut a = run_suite("noninc", &spec).unwrap();
        let mut b = run_suite("noninc", &spec).unwrap();
        a.elapsed_ms = 0;
        b.elapsed_ms = 0;
        assert_eq!(a, b);
        assert_ne!(trial_seed(42, 0), trial_seed(42, 1));
    }
}
