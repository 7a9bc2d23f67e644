//! Plain-text edge lists: a header line `n m`, then `m` lines `u v` with
//! `0 <= u < v < n`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dupnet_core::Graph;

use crate::error::{CliError, CliResult};

/// A parse failure with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn two_numbers(line: usize, text: &str) -> Result<(usize, usize), ParseError> {
    let mut fields = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize, ParseError> {
        let field = fields.next().ok_or_else(|| err(line, format!("missing {what}")))?;
        field
            .parse()
            .map_err(|_| err(line, format!("{what} `{field}` is not a nonnegative integer")))
    };
    let a = next("first number")?;
    let b = next("second number")?;
    if fields.next().is_some() {
        return Err(err(line, "expected exactly two numbers"));
    }
    Ok((a, b))
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (header_line, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let (n, m) = two_numbers(header_line, header)?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for (line, text) in lines {
        let (u, v) = two_numbers(line, text)?;
        if u == v {
            return Err(err(line, format!("self-loop at vertex {u}")));
        }
        if u.max(v) >= n {
            return Err(err(line, format!("label {} out of range for {n} vertices", u.max(v))));
        }
        if u > v {
            return Err(err(
                line,
                format!("edge must be written smaller label first: `{v} {u}`"),
            ));
        }
        if !seen.insert((u, v)) {
            return Err(err(line, format!("duplicate edge {u} {v}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(err(
            header_line,
            format!("header declares {m} edges but {} were listed", edges.len()),
        ));
    }
    Graph::from_edges(n, &edges).map_err(|e| err(header_line, e.to_string()))
}

/// Edge list of the active part of `g`, relabeled `0..k` in label order.
pub fn serialize_graph(g: &Graph) -> String {
    let c = g.compact();
    let edges = c.edges();
    let mut out = format!("{} {}\n", c.capacity(), edges.len());
    for (u, v) in edges {
        writeln!(out, "{u} {v}").expect("writing to a string");
    }
    out
}

pub fn read_graph(path: &Path) -> CliResult<Graph> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_graph(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line,
        message: e.message,
    })
}
