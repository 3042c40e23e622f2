//! Weighted undirected graphs, their unnormalized Laplacians, a planted-partition
//! community generator, and the plain-text edge-list format.
//!
//! Graphs are stored densely: every experiment in this crate works with a full
//! Fourier basis anyway, so an `n x n` weight matrix costs nothing extra.
//!
//! # Edge-list format
//!
//! ```text
//! n 4
//! 0 1 1.0
//! 1 2 0.5
//! 2 3 1
//! ```
//!
//! The header `n <count>` comes first. Each following line is `i j w` with
//! 0-based node indices and a positive weight; every undirected edge is written
//! once and mirrored on load. Blank lines and lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EdgeListError, Error, Result};

/// Largest graph accepted by the edge-list reader. Storage is dense, so this
/// bounds memory at 128 MiB per matrix.
pub const MAX_EDGE_LIST_NODES: usize = 4096;

/// Symmetric, non-negative similarity matrix without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weights: DMatrix<f64>,
}

impl WeightedGraph {
    /// Validates symmetry, non-negativity and an empty diagonal, all exactly.
    pub fn from_weights(weights: DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if n == 0 || weights.ncols() != n {
            return Err(Error::InvalidGraph(format!(
                "weight matrix must be square and non-empty, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::InvalidGraph(format!("self-loop on node {i}")));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidGraph(format!(
                        "weight ({i}, {j}) = {w} is not a finite non-negative number"
                    )));
                }
                if w != weights[(j, i)] {
                    return Err(Error::InvalidGraph(format!(
                        "weights ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        Ok(WeightedGraph { weights })
    }

    /// Builds a graph from undirected edges `(i, j, w)`; each edge is mirrored.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut weights = DMatrix::zeros(node_count, node_count);
        for &(i, j, w) in edges {
            if i >= node_count || j >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) out of range for {node_count} nodes"
                )));
            }
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
        Self::from_weights(weights)
    }

    pub fn node_count(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    /// Undirected edges with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.node_count();
        (0..n).flat_map(move |i| {
            ((i + 1)..n).filter_map(move |j| {
                let w = self.weights[(i, j)];
                (w != 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.weights.row_iter().map(|row| row.sum()).collect()
    }

    /// Number of connected components (zero-weight entries are non-edges).
    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for (u, w) in self.weights.row(v).iter().enumerate() {
                    if *w != 0.0 && !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }
}

/// Dense unnormalized Laplacian `L = D - W`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    entries: DMatrix<f64>,
}

impl LaplacianMatrix {
    #[cfg(test)]
    pub(crate) fn from_entries_unchecked(entries: DMatrix<f64>) -> Self {
        LaplacianMatrix { entries }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }
}

pub fn build_laplacian(g: &WeightedGraph) -> LaplacianMatrix {
    let w = g.weights();
    let mut entries = -w.clone();
    for (i, degree) in g.degrees().into_iter().enumerate() {
        entries[(i, i)] = degree;
    }
    LaplacianMatrix { entries }
}

/// Anything that can produce a graph for the benchmark harness.
pub trait GraphGenerator {
    fn generate(&self) -> Result<WeightedGraph>;
}

/// Planted-partition community graph: contiguous near-equal blocks, with each
/// node's expected degree split into an intra-block share `1 - mixing` and an
/// inter-block share `mixing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityGraphConfig {
    pub node_count: usize,
    pub community_count: usize,
    pub mixing: f64,
    pub mean_degree: f64,
    pub seed: u64,
}

impl Default for CommunityGraphConfig {
    fn default() -> Self {
        CommunityGraphConfig {
            node_count: 1000,
            community_count: 10,
            mixing: 0.4,
            mean_degree: 20.0,
            seed: 0,
        }
    }
}

impl CommunityGraphConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.node_count == 0 {
            return bad("node_count must be positive".into());
        }
        if self.community_count == 0 || self.community_count > self.node_count {
            return bad(format!(
                "community_count must be in 1..={}, got {}",
                self.node_count, self.community_count
            ));
        }
        if !(0.0..=1.0).contains(&self.mixing) {
            return bad(format!("mixing must be in [0, 1], got {}", self.mixing));
        }
        if !(self.mean_degree > 0.0 && self.mean_degree < self.node_count as f64) {
            return bad(format!(
                "mean_degree must be in (0, {}), got {}",
                self.node_count, self.mean_degree
            ));
        }
        let (p_in, p_out) = self.edge_probabilities()?;
        for (name, p) in [("intra", p_in), ("inter", p_out)] {
            if p > 1.0 {
                return bad(format!(
                    "{name}-community edge probability {p} exceeds 1; lower mean_degree or adjust mixing"
                ));
            }
        }
        Ok(())
    }

    /// Community label of every node (`node * k / n`).
    pub fn membership(&self) -> Vec<usize> {
        let (n, k) = (self.node_count, self.community_count);
        (0..n).map(|i| i * k / n).collect()
    }

    /// `(p_in, p_out)` computed from the average block size.
    pub fn edge_probabilities(&self) -> Result<(f64, f64)> {
        let n = self.node_count as f64;
        let block = n / self.community_count as f64;
        let intra_degree = self.mean_degree * (1.0 - self.mixing);
        let inter_degree = self.mean_degree * self.mixing;
        let p_in = if intra_degree == 0.0 {
            0.0
        } else if block > 1.0 {
            intra_degree / (block - 1.0)
        } else {
            return Err(Error::InvalidConfig(
                "singleton communities cannot host intra-community edges".into(),
            ));
        };
        let p_out = if inter_degree == 0.0 {
            0.0
        } else if n - block > 0.0 {
            inter_degree / (n - block)
        } else {
            return Err(Error::InvalidConfig(
                "a single community cannot host inter-community edges".into(),
            ));
        };
        Ok((p_in, p_out))
    }
}

impl GraphGenerator for CommunityGraphConfig {
    fn generate(&self) -> Result<WeightedGraph> {
        generate_community_graph(self)
    }
}

pub fn generate_community_graph(cfg: &CommunityGraphConfig) -> Result<WeightedGraph> {
    cfg.validate()?;
    let (p_in, p_out) = cfg.edge_probabilities()?;
    let labels = cfg.membership();
    let n = cfg.node_count;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut weights = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            // One draw per pair keeps the stream layout independent of p.
            let u: f64 = rng.random();
            if u < p {
                weights[(i, j)] = 1.0;
                weights[(j, i)] = 1.0;
            }
        }
    }
    Ok(WeightedGraph { weights })
}

pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let err = |line: usize, kind: EdgeListError| Error::EdgeList { line, kind };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| err(1, EdgeListError::MissingHeader))?;
    let node_count = {
        let mut parts = header.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some("n"), Some(count), None) => count
                .parse::<usize>()
                .ok()
                .filter(|&c| c > 0 && c <= MAX_EDGE_LIST_NODES)
                .ok_or_else(|| err(header_line, EdgeListError::BadHeader(header.into())))?,
            _ => return Err(err(header_line, EdgeListError::MissingHeader)),
        }
    };

    let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
    let mut weights = DMatrix::zeros(node_count, node_count);
    for (line_no, line) in lines {
        let malformed = || err(line_no, EdgeListError::Malformed(line.into()));
        let mut parts = line.split_whitespace();
        let (i, j, w) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(i), Some(j), Some(w), None) => (
                i.parse::<usize>().map_err(|_| malformed())?,
                j.parse::<usize>().map_err(|_| malformed())?,
                w.parse::<f64>().map_err(|_| malformed())?,
            ),
            _ => return Err(malformed()),
        };
        for index in [i, j] {
            if index >= node_count {
                return Err(err(
                    line_no,
                    EdgeListError::IndexOutOfRange { index, node_count },
                ));
            }
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(err(line_no, EdgeListError::BadWeight(w)));
        }
        if i == j {
            return Err(err(line_no, EdgeListError::SelfLoop(i)));
        }
        let key = (i.min(j), i.max(j));
        if let Some(&first) = seen.get(&key) {
            if first != w {
                return Err(err(
                    line_no,
                    EdgeListError::ConflictingDuplicate {
                        i: key.0,
                        j: key.1,
                        first,
                        second: w,
                    },
                ));
            }
            continue;
        }
        seen.insert(key, w);
        weights[(i, j)] = w;
        weights[(j, i)] = w;
    }
    Ok(WeightedGraph { weights })
}

/// Writes each undirected edge once with `i < j`. Weights use the shortest
/// representation that parses back to the same `f64`.
pub fn format_edge_list(g: &WeightedGraph) -> String {
    let mut out = format!("n {}\n", g.node_count());
    for (i, j, w) in g.edges() {
        let _ = writeln!(out, "{i} {j} {w}");
    }
    out
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

pub fn save_edge_list(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_edge_list(g)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedGraph {
        WeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn laplacian_of_path() {
        let l = build_laplacian(&path3());
        let expected = DMatrix::from_row_slice(3, 3, &[1., -1., 0., -1., 2., -1., 0., -1., 1.]);
        assert_eq!(l.entries(), &expected);
    }

    #[test]
    fn laplacian_of_isolated_node() {
        let g = WeightedGraph::from_weights(DMatrix::zeros(1, 1)).unwrap();
        assert_eq!(build_laplacian(&g).entries(), &DMatrix::zeros(1, 1));
    }

    #[test]
    fn rejects_invalid_weights() {
        let mut w = DMatrix::zeros(2, 2);
        w[(0, 1)] = 1.0;
        assert!(WeightedGraph::from_weights(w.clone()).is_err());
        w[(1, 0)] = 1.0;
        assert!(WeightedGraph::from_weights(w.clone()).is_ok());
        w[(0, 0)] = 0.5;
        assert!(WeightedGraph::from_weights(w.clone()).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[0., -1., -1., 0.]);
        assert!(WeightedGraph::from_weights(neg).is_err());
    }

    #[test]
    fn unmixed_generator_is_block_diagonal() {
        let cfg = CommunityGraphConfig {
            node_count: 60,
            community_count: 4,
            mixing: 0.0,
            mean_degree: 6.0,
            seed: 3,
        };
        let g = generate_community_graph(&cfg).unwrap();
        let labels = cfg.membership();
        assert!(g.edge_count() > 0);
        assert_eq!(
            g.edges()
                .filter(|&(i, j, _)| labels[i] != labels[j])
                .count(),
            0
        );
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = CommunityGraphConfig {
            node_count: 100,
            community_count: 5,
            mixing: 0.4,
            mean_degree: 8.0,
            seed: 42,
        };
        let a = generate_community_graph(&cfg).unwrap();
        let b = generate_community_graph(&cfg).unwrap();
        assert_eq!(a, b);
        let c = generate_community_graph(&CommunityGraphConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generator_rejects_impossible_probabilities() {
        let cfg = CommunityGraphConfig {
            node_count: 20,
            community_count: 10,
            mixing: 0.0,
            mean_degree: 5.0,
            seed: 0,
        };
        assert!(matches!(
            generate_community_graph(&cfg),
            Err(Error::InvalidConfig(_))
        ));
        let single = CommunityGraphConfig {
            node_count: 20,
            community_count: 1,
            mixing: 0.3,
            mean_degree: 5.0,
            seed: 0,
        };
        assert!(generate_community_graph(&single).is_err());
        let bad_mixing = CommunityGraphConfig {
            mixing: 1.5,
            ..CommunityGraphConfig::default()
        };
        assert!(bad_mixing.validate().is_err());
    }

    #[test]
    fn parses_minimal_edge_list() {
        let g = parse_edge_list("n 2\n0 1 1.0").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.weight(1, 0), 1.0);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn edge_list_errors() {
        let line_err = |text: &str| match parse_edge_list(text) {
            Err(Error::EdgeList { kind, .. }) => kind,
            other => panic!("expected edge-list error, got {other:?}"),
        };
        assert_eq!(
            line_err("n 3\n0 5 1.0"),
            EdgeListError::IndexOutOfRange {
                index: 5,
                node_count: 3
            }
        );
        assert_eq!(line_err("0 1 1.0"), EdgeListError::MissingHeader);
        assert_eq!(line_err(""), EdgeListError::MissingHeader);
        assert_eq!(line_err("n 0"), EdgeListError::BadHeader("n 0".into()));
        assert_eq!(line_err("n 3\n0 1 -2"), EdgeListError::BadWeight(-2.0));
        assert_eq!(line_err("n 3\n1 1 1"), EdgeListError::SelfLoop(1));
        assert_eq!(line_err("n 3\n0 1"), EdgeListError::Malformed("0 1".into()));
        assert!(matches!(
            line_err("n 3\n0 1 1.0\n1 0 2.0"),
            EdgeListError::ConflictingDuplicate { i: 0, j: 1, .. }
        ));
        // consistent duplicates are tolerated
        assert!(parse_edge_list("n 3\n0 1 1.0\n1 0 1.0\n# comment\n\n").is_ok());
    }

    #[test]
    fn edge_list_round_trip() {
        let g =
            WeightedGraph::from_edges(4, &[(0, 1, 0.1), (1, 3, 1.0 / 3.0), (2, 3, 7.5)]).unwrap();
        let back = parse_edge_list(&format_edge_list(&g)).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn components() {
        assert!(path3().is_connected());
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(g.component_count(), 2);
    }
}
