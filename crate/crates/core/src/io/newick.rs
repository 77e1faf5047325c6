use std::collections::BTreeSet;

use super::{IoError, Position, Result};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::tree::{MetricTree, VertexId};

struct Node {
    label: Option<String>,
    length: Option<(Rational, Position)>,
    children: Vec<usize>,
    position: Position,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    nodes: Vec<Node>,
}

impl Parser {
    fn position_at(&self, index: usize) -> Position {
        let mut line = 1;
        let mut column = 1;
        for c in self.chars.iter().take(index) {
            if *c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Position { line, column }
    }

    fn error(&self, message: impl Into<String>) -> IoError {
        IoError::Parse {
            position: self.position_at(self.pos),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn label(&mut self) -> Result<Option<String>> {
        match self.peek() {
            Some('\'') => {
                self.pos += 1;
                let mut out = String::new();
                loop {
                    match self.chars.get(self.pos) {
                        None => return Err(self.error("unterminated quoted label")),
                        Some('\'') if self.chars.get(self.pos + 1) == Some(&'\'') => {
                            out.push('\'');
                            self.pos += 2;
                        }
                        Some('\'') => {
                            self.pos += 1;
                            return Ok(Some(out));
                        }
                        Some(c) => {
                            out.push(*c);
                            self.pos += 1;
                        }
                    }
                }
            }
            _ => {
                let start = self.pos;
                while self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| !"():,;'[]".contains(*c) && !c.is_whitespace())
                {
                    self.pos += 1;
                }
                Ok((self.pos > start).then(|| self.chars[start..self.pos].iter().collect()))
            }
        }
    }

    fn length(&mut self) -> Result<Option<(Rational, Position)>> {
        if self.peek() != Some(':') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || "+-./".contains(*c))
        {
            self.pos += 1;
        }
        let literal: String = self.chars[start..self.pos].iter().collect();
        let position = self.position_at(start);
        let value = parse_rational(&literal).map_err(|e| IoError::Parse {
            position,
            message: e.to_string(),
        })?;
        Ok(Some((value, position)))
    }

    fn subtree(&mut self) -> Result<usize> {
        self.skip_ws();
        let position = self.position_at(self.pos);
        let mut children = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                children.push(self.subtree()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        let label = self.label()?;
        if children.is_empty() && label.is_none() && self.peek() != Some(':') {
            return Err(self.error("expected a label or `(`"));
        }
        let length = self.length()?;
        self.nodes.push(Node {
            label,
            length,
            children,
            position,
        });
        Ok(self.nodes.len() - 1)
    }
}

/// Parses a rooted Newick string. Every non-root node needs a branch
/// length; unnamed nodes get fresh names `n1`, `n2`, ...
pub fn parse_newick(text: &str) -> Result<MetricTree> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        nodes: Vec::new(),
    };
    let root = p.subtree()?;
    p.expect(';')?;
    if p.peek().is_some() {
        return Err(p.error("trailing input after `;`"));
    }

    let mut used: BTreeSet<String> = BTreeSet::new();
    for node in &p.nodes {
        if let Some(l) = &node.label {
            if !used.insert(l.clone()) {
                return Err(IoError::Parse {
                    position: node.position,
                    message: format!("duplicate label `{l}`"),
                });
            }
        }
    }
    let mut fresh = 0;
    let names: Vec<String> = p
        .nodes
        .iter()
        .map(|node| {
            node.label.clone().unwrap_or_else(|| loop {
                fresh += 1;
                let candidate = format!("n{fresh}");
                if !used.contains(&candidate) {
                    used.insert(candidate.clone());
                    break candidate;
                }
            })
        })
        .collect();

    let mut edges: Vec<(&str, &str, Rational)> = Vec::new();
    for (i, node) in p.nodes.iter().enumerate() {
        for &c in &node.children {
            let child = &p.nodes[c];
            let (length, _) = child.length.clone().ok_or(IoError::MissingBranchLength {
                position: child.position,
            })?;
            edges.push((names[i].as_str(), names[c].as_str(), length));
        }
    }
    Ok(MetricTree::new([names[root].as_str()], edges)?)
}

fn quote(name: &str) -> String {
    let plain = !name.is_empty()
        && name
            .chars()
            .all(|c| !"():,;'[]".contains(c) && !c.is_whitespace());
    if plain {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\'', "''"))
    }
}

/// Newick text rooted at the lexicographically first vertex.
pub fn emit_newick(tree: &MetricTree) -> String {
    fn walk(tree: &MetricTree, v: VertexId, parent: Option<VertexId>, out: &mut String) {
        let children: Vec<_> = tree
            .neighbors(v)
            .iter()
            .filter(|(w, _)| Some(*w) != parent)
            .collect();
        if !children.is_empty() {
            out.push('(');
            for (i, (w, e)) in children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                walk(tree, *w, Some(v), out);
                out.push(':');
                out.push_str(&format_rational(&tree.edge(*e).length));
            }
            out.push(')');
        }
        out.push_str(&quote(tree.name(v)));
    }
    let mut out = String::new();
    walk(tree, VertexId(0), None, &mut out);
    out.push(';');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::fixtures::*;

    #[test]
    fn examples() {
        assert_eq!(parse_newick("(u:1,v:2,w:3)c;").unwrap(), star3());
        assert_eq!(parse_newick("(u:2)v;").unwrap(), path2());
        assert!(matches!(
            parse_newick("(u,v);"),
            Err(IoError::MissingBranchLength { .. })
        ));
    }

    #[test]
    fn round_trip_and_fresh_names() {
        let t = parse_newick("((a:1/2,b:0.25):1,'c d':3);").unwrap();
        assert_eq!(t.vertex_count(), 5);
        assert!(t.vertex_id("n1").is_ok() && t.vertex_id("c d").is_ok());
        assert_eq!(parse_newick(&emit_newick(&t)).unwrap(), t);
        assert_eq!(parse_newick(&emit_newick(&star3())).unwrap(), star3());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_newick("(a:1,\n b:1;") {
            Err(IoError::Parse { position, .. }) => assert_eq!(position, Position { line: 2, column: 5 }),
            other => panic!("{other:?}"),
        }
        match parse_newick("(a:1,b:zz)r;") {
            Err(IoError::Parse { position, .. }) => assert_eq!(position.column, 8),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_newick("(a:1,a:2)r;"), Err(IoError::Parse { .. })));
        assert!(matches!(parse_newick("(a:1)r; x"), Err(IoError::Parse { .. })));
    }
}
