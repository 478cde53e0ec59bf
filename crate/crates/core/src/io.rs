//! Graph and matrix file formats.
//!
//! Graphs are read from JSON, either dense `{"n": 3, "weights": [[..], ..]}`
//! or as an edge list `{"n": 3, "edges": [[i, j, w], ..]}` (0-based, each
//! undirected pair once), or from Matrix Market coordinate files. Graphs are
//! always written in the dense JSON form, which round-trips bit-exactly.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Deserialize)]
#[serde(untagged)]
enum GraphFile {
    Dense { n: usize, weights: Vec<Vec<f64>> },
    Edges { n: usize, edges: Vec<(usize, usize, f64)> },
}

#[derive(Serialize)]
struct DenseOut<'a> {
    n: usize,
    weights: &'a [Vec<f64>],
}

pub fn graph_from_json(text: &str) -> Result<Graph> {
    match serde_json::from_str::<GraphFile>(text)? {
        GraphFile::Dense { n, weights } => {
            if weights.len() != n {
                return Err(Error::Dimension(format!("declared n = {n} but {} rows given", weights.len())));
            }
            Graph::from_rows(&weights)
        }
        GraphFile::Edges { n, edges } => Graph::from_edges(n, &edges),
    }
}

pub fn graph_to_json(graph: &Graph) -> String {
    let rows = graph.rows();
    serde_json::to_string(&DenseOut {
        n: graph.n(),
        weights: &rows,
    })
    .expect("dense graph serializes")
}

/// Parses a Matrix Market `coordinate` file (`real`, `integer` or `pattern`;
/// `symmetric` or `general`).
pub fn graph_from_matrix_market(text: &str) -> Result<Graph> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market file".into()))?
        .to_ascii_lowercase();
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(Error::Parse(format!("unsupported Matrix Market header: {header}")));
    }
    let pattern = match fields[3] {
        "real" | "integer" => false,
        "pattern" => true,
        other => return Err(Error::Parse(format!("unsupported field type {other}"))),
    };
    let symmetric = match fields[4] {
        "symmetric" => true,
        "general" => false,
        other => return Err(Error::Parse(format!("unsupported symmetry {other}"))),
    };

    let mut body = lines.map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size = body.next().ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad size line: {size}"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 || dims[0] != dims[1] {
        return Err(Error::Dimension(format!("expected square 'n n nnz', got {size}")));
    }
    let n = dims[0];
    let mut w = DMatrix::zeros(n, n);
    let mut count = 0;
    for line in body {
        let tok: Vec<&str> = line.split_whitespace().collect();
        let parse_idx = |t: &str| -> Result<usize> {
            let k: usize = t.parse().map_err(|_| Error::Parse(format!("bad index in: {line}")))?;
            if k == 0 || k > n {
                return Err(Error::Dimension(format!("index {k} out of range in: {line}")));
            }
            Ok(k - 1)
        };
        if tok.len() < 2 {
            return Err(Error::Parse(format!("bad entry line: {line}")));
        }
        let i = parse_idx(tok[0])?;
        let j = parse_idx(tok[1])?;
        let x = if pattern {
            1.0
        } else {
            tok.get(2)
                .ok_or_else(|| Error::Parse(format!("missing value in: {line}")))?
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad value in: {line}")))?
        };
        w[(i, j)] = x;
        if symmetric {
            w[(j, i)] = x;
        }
        count += 1;
    }
    if count != dims[2] {
        return Err(Error::Parse(format!("declared {} entries, found {count}", dims[2])));
    }
    Graph::new(w)
}

/// Reads a graph, choosing the format by extension (`.mtx` is Matrix Market, anything else JSON).
pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
        graph_from_matrix_market(&text)
    } else {
        graph_from_json(&text)
    }
}

pub fn write_graph(path: &Path, graph: &Graph) -> Result<()> {
    fs::write(path, graph_to_json(graph))?;
    Ok(())
}

/// Parses a dense matrix given as a JSON array of rows.
pub fn matrix_from_json(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text)?;
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    matrix_from_json(&fs::read_to_string(path)?)
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Serializes a matrix as an array of rows.
pub fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix_rows(m).serialize(s)
}
