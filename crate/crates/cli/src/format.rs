//! Edge-list text format.
//!
//! ```text
//! # comment
//! n m
//! tail head length      (m lines)
//! ```
//!
//! Tokens are separated by ASCII whitespace and `#` starts a comment that
//! runs to the end of the line. Blank lines are ignored. `n` and `m` are
//! unsigned decimal integers, vertices are `0..n`, and `length` is a decimal
//! literal (`[+-]digits[.digits][(e|E)[+-]digits]`, leading digits optional
//! when a fraction is present).

use std::fmt::Write as _;

use dirspan::graph::{DiGraph, GraphError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

/// Whitespace-separated tokens of one line with 1-based columns, comment stripped.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        match (c.is_ascii_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &body[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}

fn parse_uint(tok: &str, line: usize, col: usize, what: &str) -> Result<usize, ParseError> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, col, format!("expected {what}, found `{tok}`")));
    }
    tok.parse()
        .map_err(|_| syntax(line, col, format!("{what} `{tok}` is out of range")))
}

fn is_decimal(tok: &str) -> bool {
    let b = tok.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

fn parse_length(tok: &str, line: usize, col: usize) -> Result<f64, ParseError> {
    if !is_decimal(tok) {
        return Err(syntax(line, col, format!("expected a decimal length, found `{tok}`")));
    }
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(syntax(line, col, format!("length `{tok}` is out of range"))),
    }
}

pub fn parse_graph(text: &str) -> Result<DiGraph, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        last_line = ln;
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        match header {
            None => {
                if toks.len() != 2 {
                    let col = toks.get(2).map_or(toks[0].0, |t| t.0);
                    return Err(syntax(ln, col, "header must be `n m`"));
                }
                let n = parse_uint(toks[0].1, ln, toks[0].0, "vertex count")?;
                let m = parse_uint(toks[1].1, ln, toks[1].0, "edge count")?;
                header = Some((n, m, ln));
            }
            Some((_, m, hl)) => {
                if edges.len() == m {
                    return Err(syntax(
                        ln,
                        toks[0].0,
                        format!("header on line {hl} declares {m} edges, found more"),
                    ));
                }
                if toks.len() != 3 {
                    let col = toks.get(3).map_or(toks[toks.len() - 1].0, |t| t.0);
                    return Err(syntax(ln, col, "edge line must be `tail head length`"));
                }
                let t = parse_uint(toks[0].1, ln, toks[0].0, "tail vertex")?;
                let h = parse_uint(toks[1].1, ln, toks[1].0, "head vertex")?;
                let len = parse_length(toks[2].1, ln, toks[2].0)?;
                edges.push((t, h, len));
            }
        }
    }
    let (n, m, hl) = header.ok_or_else(|| syntax(last_line.max(1), 1, "missing `n m` header"))?;
    if edges.len() != m {
        return Err(syntax(
            last_line.max(1),
            1,
            format!("header on line {hl} declares {m} edges, found {}", edges.len()),
        ));
    }
    Ok(DiGraph::new(n, &edges)?)
}

/// Inverse of [`parse_graph`]; lengths use the shortest exact decimal form.
pub fn serialize_graph(g: &DiGraph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.m());
    for e in g.edges() {
        writeln!(s, "{} {} {:?}", e.tail, e.head, e.len).unwrap();
    }
    s
}

/// Edge ids of `g` named by the edge lines of `text` (a graph on the same
/// vertex set). Lengths in `text` are ignored.
pub fn parse_subgraph(g: &DiGraph, text: &str) -> Result<Vec<usize>, ParseError> {
    let h = parse_graph(text)?;
    if h.n() != g.n() {
        return Err(syntax(1, 1, format!("subgraph has {} vertices, graph has {}", h.n(), g.n())));
    }
    let mut ids = Vec::with_capacity(h.m());
    for (i, e) in h.edges().iter().enumerate() {
        match g.find_edge(e.tail, e.head) {
            Some(id) => ids.push(id),
            None => {
                return Err(syntax(
                    0,
                    0,
                    format!("subgraph edge {i} ({} -> {}) is not in the graph", e.tail, e.head),
                ))
            }
        }
    }
    ids.sort_unstable();
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic() {
        let g = parse_graph("2 1\n0 1 1.0\n").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(g.edge(0).len, 1.0);
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_graph("# triangle\n\n3 3 # header\n0 1 1\n0 2 1e0\n\n2 1 .5 # tail\n").unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.edge(2).len, 0.5);
    }

    #[test]
    fn negative_length() {
        assert!(matches!(
            parse_graph("2 1\n0 1 -1\n"),
            Err(ParseError::Graph(GraphError::NegativeLength { edge: 0, .. }))
        ));
    }

    #[test]
    fn count_mismatch_names_line() {
        match parse_graph("3 2\n0 1 1\n") {
            Err(ParseError::Syntax { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("declares 2 edges, found 1"));
            }
            other => panic!("{other:?}"),
        }
        match parse_graph("3 1\n0 1 1\n1 2 1\n") {
            Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (3, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_tokens() {
        let cases = [
            ("2 1\n0 1 inf\n", 2, 5),
            ("2 1\n0 x 1\n", 2, 3),
            ("2 1 7\n", 1, 5),
            ("2 1\n0 1 1 1\n", 2, 7),
            ("2 1\n0 1 1e\n", 2, 5),
            ("", 1, 1),
        ];
        for (text, l, c) in cases {
            match parse_graph(text) {
                Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (l, c), "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn semantic_errors() {
        assert!(matches!(parse_graph("2 1\n0 2 1\n"), Err(ParseError::Graph(_))));
        assert!(matches!(parse_graph("2 1\n1 1 1\n"), Err(ParseError::Graph(_))));
        assert!(matches!(parse_graph("2 2\n0 1 1\n0 1 2\n"), Err(ParseError::Graph(_))));
    }

    #[test]
    fn round_trip_odd_lengths() {
        let g = DiGraph::new(3, &[(0, 1, 0.1), (1, 2, 1e-300), (2, 0, 12345.678901234567)]).unwrap();
        assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
    }

    #[test]
    fn subgraph_ids() {
        let g = parse_graph("3 3\n0 1 1\n0 2 1\n2 1 1\n").unwrap();
        assert_eq!(parse_subgraph(&g, "3 2\n2 1 1\n0 2 1\n").unwrap(), vec![1, 2]);
        assert!(parse_subgraph(&g, "3 1\n1 0 1\n").is_err());
    }
}
