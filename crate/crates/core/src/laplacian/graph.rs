//! Edge-list input.
//!
//! ```text
//! # directed n=5
//! 0 1
//! 0 2 0.5
//! ```
//!
//! The header line is mandatory. Each further non-empty, non-comment line is
//! `u v [weight]` with 0-based vertices; the weight defaults to 1. Undirected
//! edges are entered in both directions. Repeated edges accumulate.

use crate::error::{Error, Result};
use crate::numkit::DenseMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeList {
    pub directed: bool,
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge list".into()))?;
    let (directed, n) = parse_header(header)?;

    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let at = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(at(format!("expected 'u v [weight]', got '{line}'")));
        }
        let vertex = |s: &str| -> Result<usize> {
            let i: usize = s.parse().map_err(|_| at(format!("bad vertex '{s}'")))?;
            if i >= n {
                return Err(at(format!("vertex {i} out of range for n={n}")));
            }
            Ok(i)
        };
        let (u, v) = (vertex(fields[0])?, vertex(fields[1])?);
        if u == v {
            return Err(at(format!("self-loop at vertex {u}")));
        }
        let w = match fields.get(2) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| at(format!("bad weight '{s}'")))?,
            None => 1.0,
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(at(format!("weight must be positive and finite, got {w}")));
        }
        edges.push((u, v, w));
    }
    Ok(EdgeList { directed, n, edges })
}

fn parse_header(line: &str) -> Result<(bool, usize)> {
    let bad = || {
        Error::Parse(format!(
            "expected header '# directed|undirected n=<count>', got '{line}'"
        ))
    };
    let rest = line.trim().strip_prefix('#').ok_or_else(bad)?;
    let mut parts = rest.split_whitespace();
    let directed = match parts.next() {
        Some("directed") => true,
        Some("undirected") => false,
        _ => return Err(bad()),
    };
    let n = parts
        .next()
        .and_then(|p| p.strip_prefix("n="))
        .and_then(|p| p.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok((directed, n))
}

/// `L = D_out - Adj`, where `Adj[u][v]` is the weight of edge `u -> v`.
pub fn laplacian_from_edges(g: &EdgeList) -> DenseMatrix {
    let mut l = DenseMatrix::zeros(g.n, g.n);
    let mut add = |u: usize, v: usize, w: f64| {
        l[(u, v)] -= w;
        l[(u, u)] += w;
    };
    for &(u, v, w) in &g.edges {
        add(u, v, w);
        if !g.directed {
            add(v, u, w);
        }
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undirected_star_with_chord() {
        let g = parse_edge_list("# undirected n=4\n0 1\n0 2\n0 3\n2 3\n").unwrap();
        let l = laplacian_from_edges(&g);
        assert_eq!(
            l.to_rows(),
            vec![
                vec![3.0, -1.0, -1.0, -1.0],
                vec![-1.0, 1.0, 0.0, 0.0],
                vec![-1.0, 0.0, 2.0, -1.0],
                vec![-1.0, 0.0, -1.0, 2.0],
            ]
        );
    }

    #[test]
    fn directed_uses_out_degree_and_weights() {
        let g = parse_edge_list("# directed n=3\n\n# comment\n0 1 2.5\n1 2\n").unwrap();
        let l = laplacian_from_edges(&g);
        assert_eq!(
            l.to_rows(),
            vec![
                vec![2.5, -2.5, 0.0],
                vec![0.0, 1.0, -1.0],
                vec![0.0, 0.0, 0.0]
            ]
        );
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_edge_list("").is_err());
        assert!(parse_edge_list("0 1\n").is_err());
        assert!(parse_edge_list("# directed\n").is_err());
        assert!(parse_edge_list("# sideways n=3\n").is_err());
        assert!(parse_edge_list("# directed n=2\n0 2\n").is_err());
        assert!(parse_edge_list("# directed n=2\n0 0\n").is_err());
        assert!(parse_edge_list("# directed n=2\n0 1 -1\n").is_err());
        assert!(parse_edge_list("# directed n=2\n0 1 1 1\n").is_err());
    }
}
