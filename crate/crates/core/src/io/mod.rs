//! File formats: TSV edge lists, points files, Newick, and JSON output.
//!
//! TSV: one edge per line, `u<TAB>v<TAB>length`, `#` starts a comment.
//! Points: `V <vertex>` or `E <u> <v> <offset-from-u>`, one per line.

pub mod json;
mod newick;

pub use newick::{emit_newick, parse_newick};

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::rational::{format_rational, parse_rational, Rational};
use crate::tree::{MetricTree, TreeError, TreePoint};

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at {position}: {message}")]
    Parse { position: Position, message: String },
    #[error("missing branch length at {position}")]
    MissingBranchLength { position: Position },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        position: Position { line, column },
        message: message.into(),
    }
}

/// Meaningful lines with their 1-based numbers, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim_end();
        (!line.trim().is_empty()).then_some((i + 1, line))
    })
}

fn column_of(line: &str, field: &str) -> usize {
    field.as_ptr() as usize - line.as_ptr() as usize + 1
}

fn parse_length(line_no: usize, line: &str, field: &str) -> Result<Rational> {
    parse_rational(field).map_err(|e| parse_error(line_no, column_of(line, field), e.to_string()))
}

pub fn parse_tree_tsv(text: &str) -> Result<MetricTree> {
    let mut edges: Vec<(String, String, Rational)> = Vec::new();
    for (no, line) in content_lines(text) {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 3 || fields.iter().any(|f| f.is_empty()) {
            return Err(parse_error(no, 1, "expected `u<TAB>v<TAB>length`"));
        }
        let length = parse_length(no, line, fields[2])?;
        edges.push((fields[0].to_string(), fields[1].to_string(), length));
    }
    if edges.is_empty() {
        return Err(TreeError::EmptyTree.into());
    }
    Ok(MetricTree::from_edges(
        edges.iter().map(|(u, v, l)| (u.as_str(), v.as_str(), l.clone())),
    )?)
}

pub fn emit_tree_tsv(tree: &MetricTree) -> String {
    let mut out = String::new();
    for e in tree.edges() {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            tree.name(e.u),
            tree.name(e.v),
            format_rational(&e.length)
        ));
    }
    out
}

pub fn parse_point(tree: &MetricTree, line: &str) -> Result<TreePoint> {
    parse_point_at(tree, 1, line)
}

fn parse_point_at(tree: &MetricTree, no: usize, line: &str) -> Result<TreePoint> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    match fields.as_slice() {
        ["V", id] => Ok(tree.vertex(id)?),
        ["E", u, v, offset] => {
            let offset = parse_length(no, line, offset)?;
            Ok(tree.point_on_edge(u, v, offset)?)
        }
        _ => Err(parse_error(no, 1, "expected `V <vertex>` or `E <u> <v> <offset>`")),
    }
}

pub fn parse_points(tree: &MetricTree, text: &str) -> Result<Vec<TreePoint>> {
    content_lines(text)
        .map(|(no, line)| parse_point_at(tree, no, line))
        .collect()
}

pub fn emit_points(tree: &MetricTree, points: &[TreePoint]) -> String {
    points
        .iter()
        .map(|p| format!("{}\n", tree.encode_point(p)))
        .collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a tree, as Newick when the text starts with `(` or ends with `;`,
/// as TSV otherwise.
pub fn read_tree_file(path: &Path) -> Result<MetricTree> {
    let text = read(path)?;
    let trimmed = text.trim();
    if trimmed.starts_with('(') || trimmed.ends_with(';') {
        parse_newick(&text)
    } else {
        parse_tree_tsv(&text)
    }
}

pub fn read_points_file(tree: &MetricTree, path: &Path) -> Result<Vec<TreePoint>> {
    parse_points(tree, &read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::tree::fixtures::*;

    #[test]
    fn tsv_round_trip_and_comments() {
        let text = "# star\nc\tu\t1\nc\tv\t2 # inline\n\nw\tc\t3\n";
        let t = parse_tree_tsv(text).unwrap();
        assert_eq!(t, star3());
        assert_eq!(parse_tree_tsv(&emit_tree_tsv(&t)).unwrap(), t);
        let dec = parse_tree_tsv("a\tb\t0.25\n").unwrap();
        assert_eq!(dec.edges()[0].length, ratio(1, 4));
    }

    #[test]
    fn tsv_errors_are_positioned() {
        match parse_tree_tsv("a\tb\t1\nb\tc\tx/2\n") {
            Err(IoError::Parse { position, .. }) => assert_eq!(position, Position { line: 2, column: 5 }),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_tree_tsv("a b 1\n"), Err(IoError::Parse { .. })));
        assert!(matches!(
            parse_tree_tsv("a\tb\t0\n"),
            Err(IoError::Tree(TreeError::NonpositiveLength { .. }))
        ));
        assert!(matches!(parse_tree_tsv("# nothing\n"), Err(IoError::Tree(TreeError::EmptyTree))));
    }

    #[test]
    fn points_files() {
        let t = star3();
        let pts = parse_points(&t, "V u\nE w c 2\n# c\nE c v 2\n").unwrap();
        assert_eq!(pts, vec![v(&t, "u"), e(&t, "c", "w", 1, 1), v(&t, "v")]);
        assert_eq!(parse_points(&t, &emit_points(&t, &pts)).unwrap(), pts);
        assert!(matches!(parse_points(&t, "V q\n"), Err(IoError::Tree(_))));
        assert!(matches!(
            parse_points(&t, "E c u 5\n"),
            Err(IoError::Tree(TreeError::PointNotOnTree(_)))
        ));
        assert!(matches!(parse_points(&t, "X\n"), Err(IoError::Parse { .. })));
    }
}
