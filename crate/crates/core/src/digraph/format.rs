//! Text formats for graphs: edge lists, JSON, and Graphviz DOT (write-only).
//!
//! Edge list: first line `n m`, then `m` lines `tail head` or
//! `tail head weight`, 1-based, space separated, LF terminated.
//!
//! JSON: `{"n": 3, "arcs": [[1, 2], [2, 3]], "weights": [1, -2]}` with
//! `weights` optional and aligned with `arcs`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{make_digraph, DiGraph, GraphError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("header declares {declared} arcs but {found} were listed")]
    ArcCountMismatch { declared: usize, found: usize },
    #[error("invalid JSON graph: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    n: usize,
    arcs: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<i64>>,
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

pub fn write_edge_list(g: &DiGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for ((t, h), w) in g.weighted_arcs() {
        if g.is_weighted() {
            let _ = writeln!(out, "{t} {h} {w}");
        } else {
            let _ = writeln!(out, "{t} {h}");
        }
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<DiGraph, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(syntax(hline, "expected header `n m`"));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| syntax(hline, "vertex count is not a nonnegative integer"))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| syntax(hline, "arc count is not a nonnegative integer"))?;

    let mut arcs = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    let mut weighted: Option<bool> = None;
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let has_weight = match fields.len() {
            2 => false,
            3 => true,
            _ => return Err(syntax(lineno, "expected `tail head` or `tail head weight`")),
        };
        if *weighted.get_or_insert(has_weight) != has_weight {
            return Err(syntax(lineno, "mixed weighted and unweighted arc lines"));
        }
        let parse_vertex = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| syntax(lineno, format!("bad vertex label `{s}`")))
        };
        arcs.push((parse_vertex(fields[0])?, parse_vertex(fields[1])?));
        if has_weight {
            weights.push(
                fields[2]
                    .parse::<i64>()
                    .map_err(|_| syntax(lineno, format!("bad weight `{}`", fields[2])))?,
            );
        }
    }
    if arcs.len() != m {
        return Err(FormatError::ArcCountMismatch {
            declared: m,
            found: arcs.len(),
        });
    }
    let w = weighted.unwrap_or(false).then_some(weights.as_slice());
    Ok(make_digraph(n, &arcs, w)?)
}

pub fn write_json(g: &DiGraph) -> String {
    let doc = GraphJson {
        n: g.n(),
        arcs: g.arcs().map(|(t, h)| [t, h]).collect(),
        weights: g
            .is_weighted()
            .then(|| g.weighted_arcs().map(|(_, w)| w).collect()),
    };
    serde_json::to_string(&doc).expect("graph JSON serialization cannot fail")
}

pub fn parse_json(text: &str) -> Result<DiGraph, FormatError> {
    let doc: GraphJson = serde_json::from_str(text)?;
    let arcs: Vec<(usize, usize)> = doc.arcs.iter().map(|a| (a[0], a[1])).collect();
    Ok(make_digraph(doc.n, &arcs, doc.weights.as_deref())?)
}

/// Reads either format; input whose first non-blank character is `{` is JSON.
pub fn parse_graph(text: &str) -> Result<DiGraph, FormatError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_edge_list(text)
    }
}

/// Graphviz output. An opposed pair `(i, j)`, `(j, i)` with equal weights is
/// drawn once as `i -> j [dir=both]` with `i < j`.
pub fn write_dot(g: &DiGraph) -> String {
    let mut out = String::from("digraph G {\n");
    for v in 1..=g.n() {
        let _ = writeln!(out, "  {v};");
    }
    for ((t, h), w) in g.weighted_arcs() {
        let reverse = g.weight(h, t);
        let paired = reverse == Some(w);
        if paired && t > h {
            continue;
        }
        let mut attrs = Vec::new();
        if paired {
            attrs.push("dir=both".to_string());
        }
        if g.is_weighted() {
            attrs.push(format!("label=\"{w}\""));
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  {t} -> {h};");
        } else {
            let _ = writeln!(out, "  {t} -> {h} [{}];", attrs.join(", "));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = DiGraph::new(4, &[(3, 1), (1, 2), (2, 4)]).unwrap();
        let text = write_edge_list(&g);
        assert_eq!(text, "4 3\n1 2\n2 4\n3 1\n");
        assert_eq!(parse_edge_list(&text).unwrap(), g);

        let w = DiGraph::with_weights(3, &[(1, 2), (2, 3)], &[4, -1]).unwrap();
        let text = write_edge_list(&w);
        assert_eq!(text, "3 2\n1 2 4\n2 3 -1\n");
        assert_eq!(parse_graph(&text).unwrap(), w);
    }

    #[test]
    fn json_round_trip() {
        let w = DiGraph::with_weights(3, &[(1, 2), (2, 3)], &[4, -1]).unwrap();
        let text = write_json(&w);
        assert_eq!(text, r#"{"n":3,"arcs":[[1,2],[2,3]],"weights":[4,-1]}"#);
        assert_eq!(parse_graph(&text).unwrap(), w);
        let g = parse_json(r#"{"n": 2, "arcs": [[1, 2]]}"#).unwrap();
        assert!(!g.is_weighted());
    }

    #[test]
    fn malformed_inputs_are_errors() {
        for bad in [
            "",
            "3",
            "3 1\n1\n",
            "3 1\n1 x\n",
            "3 2\n1 2\n",
            "3 2\n1 2\n2 3 5\n",
            "3 1\n1 1\n",
            "3 1\n1 2 0\n",
            "-1 0\n",
            "{\"n\": 3}",
            "{\"n\": 3, \"arcs\": [[1, 2]], \"weights\": []}",
            "{not json",
        ] {
            assert!(parse_graph(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn dot_merges_opposed_pairs() {
        let g = DiGraph::new(3, &[(1, 2), (2, 1), (2, 3)]).unwrap();
        let dot = write_dot(&g);
        assert!(dot.contains("1 -> 2 [dir=both];"));
        assert!(!dot.contains("2 -> 1"));
        assert!(dot.contains("2 -> 3;"));
    }
}
