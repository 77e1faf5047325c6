//! Exact computation of Tn-widths and compact widths of finite sets in
//! metric trees.
//!
//! The crate is organized around five pieces:
//!
//! - [`tree`]: finite metric trees, points on them, segments, betweenness,
//!   medians, convex hulls, final points and Tn-dimension.
//! - [`radial`]: the plane (or `R^k`) with the radial metric, where every
//!   ball has Tn-width equal to its radius.
//! - [`widths`]: the Tn-width solver (exact decision oracle plus bisection),
//!   the Chebyshev radius, a brute-force oracle, width sequences, compact
//!   widths and the property P1 construction.
//! - [`harness`]: seeded property suites over random instances.
//! - [`io`]: tree/points file formats, Newick, and JSON rendering for the
//!   `mtw` command-line tool.
//!
//! All lengths are [`num_rational::BigRational`]; nothing in the tree code
//! compares with a tolerance.

pub mod harness;
pub mod io;
pub mod radial;
pub mod rational;
pub mod tree;
pub mod widths;

pub use rational::{format_rational, parse_rational, Rational};
pub use tree::{build_tree, MetricSegment, MetricTree, Subtree, TreeError, TreePoint};
