//! Graph representation and vertex-domain primitives.
//!
//! Graphs here are undirected, weighted, simple and connected. Edge weights
//! are *path lengths*: the length of a path is the sum of the weights of its
//! edges, so a larger weight means the endpoints are farther apart. This is
//! the opposite of the similarity convention used elsewhere in graph signal
//! processing; sensor graphs built from Euclidean distances are consistent
//! with it.
//!
//! Node indices are 0-based everywhere, including file formats.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected weighted edge with `u < v` and `w > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected, weighted, simple, connected graph.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    /// Neighbor lists sorted by node index: `adj[u]` holds `(v, w)`.
    adj: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
}

impl Graph {
    /// Builds a graph from an edge list, validating simplicity, positivity
    /// of weights and connectivity.
    pub fn from_edges(n: usize, raw: &[(usize, usize, f64)]) -> Result<Graph> {
        if n < 2 {
            return Err(Error::InvalidParam(format!(
                "graph needs at least 2 nodes, got {n}"
            )));
        }
        let mut edges = Vec::with_capacity(raw.len());
        let mut adj = vec![Vec::new(); n];
        for &(a, b, w) in raw {
            if a >= n {
                return Err(Error::NodeOutOfRange { node: a, n });
            }
            if b >= n {
                return Err(Error::NodeOutOfRange { node: b, n });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::NonPositiveWeight { u: a, v: b, w });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            edges.push(Edge { u, v, w });
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        edges.sort_by_key(|x| (x.u, x.v));
        for win in edges.windows(2) {
            if (win[0].u, win[0].v) == (win[1].u, win[1].v) {
                return Err(Error::DuplicateEdge {
                    u: win[0].u,
                    v: win[0].v,
                });
            }
        }
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
        }
        let degrees: Vec<f64> = adj
            .iter()
            .map(|list| list.iter().map(|&(_, w)| w).sum())
            .collect();
        let g = Graph {
            n,
            edges,
            adj,
            degrees,
        };
        if let Some((u, v)) = g.find_disconnection() {
            return Err(Error::Disconnected { u, v });
        }
        Ok(g)
    }

    /// BFS from node 0; returns a pair of mutually unreachable nodes if any.
    fn find_disconnection(&self) -> Option<(usize, usize)> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().position(|&s| !s).map(|v| (0, v))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    /// Adjacency accessor `W(u, v)`; zero when no edge is present.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        match self.adj[u].binary_search_by_key(&v, |&(x, _)| x) {
            Ok(i) => self.adj[u][i].1,
            Err(_) => 0.0,
        }
    }

    /// Weighted degree `D(u, u) = Σ_v W(u, v)`.
    pub fn degree(&self, u: usize) -> f64 {
        self.degrees[u]
    }

    /// Combinatorial Laplacian `L = D − W` as a dense symmetric matrix.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.u, e.v)] = -e.w;
            l[(e.v, e.u)] = -e.w;
        }
        for u in 0..self.n {
            l[(u, u)] = self.degrees[u];
        }
        l
    }

    /// Volume of the whole graph: sum of all weighted degrees.
    pub fn volume(&self) -> f64 {
        self.degrees.iter().sum()
    }

    /// Volume of a node subset: `vol(S) = Σ_{u∈S} D(u, u)`.
    pub fn volume_of(&self, subset: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for &u in subset {
            if u >= self.n {
                return Err(Error::NodeOutOfRange { node: u, n: self.n });
            }
            total += self.degrees[u];
        }
        Ok(total)
    }

    /// Total edge weight from `v` into the set `S`: `w_S(v) = Σ_{s∈S} W(s, v)`.
    /// Self terms vanish because the graph has no self-loops.
    pub fn boundary_weight(&self, set: &[usize], v: usize) -> f64 {
        let mut in_set = vec![false; self.n];
        for &s in set {
            in_set[s] = true;
        }
        self.adj[v]
            .iter()
            .filter(|&&(u, _)| in_set[u])
            .map(|&(_, w)| w)
            .sum()
    }

    /// Quadratic form `x^T L x = Σ_{(u,v)∈E} W(u,v) (x(u) − x(v))²`,
    /// evaluated edge-wise without forming the Laplacian.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self
            .edges
            .iter()
            .map(|e| {
                let d = x[e.u] - x[e.v];
                e.w * d * d
            })
            .sum())
    }

    /// Weight of the cut between `S` and its complement:
    /// `Σ_{v∉S} w_S(v)`, which equals `s^T L s` for the indicator of `S`.
    pub fn cut_weight(&self, set: &[usize]) -> f64 {
        let mut in_set = vec![false; self.n];
        for &s in set {
            in_set[s] = true;
        }
        self.edges
            .iter()
            .filter(|e| in_set[e.u] != in_set[e.v])
            .map(|e| e.w)
            .sum()
    }

    /// Exact geodesic distances between all node pairs (Dijkstra from every
    /// source). Rows are independent, so sources run in parallel; the result
    /// does not depend on scheduling.
    ///
    /// The dense matrix is sized for desk-scale graphs (n up to a few
    /// thousand); past that, call [`Graph::dijkstra`] per source instead.
    pub fn geodesic_distances(&self) -> Result<DistanceMatrix> {
        let rows: Vec<Vec<f64>> = (0..self.n)
            .into_par_iter()
            .map(|s| self.dijkstra(s))
            .collect();
        for (u, row) in rows.iter().enumerate() {
            if let Some(v) = row.iter().position(|d| !d.is_finite()) {
                return Err(Error::Disconnected { u, v });
            }
        }
        let mut data = Vec::with_capacity(self.n * self.n);
        for row in rows {
            data.extend_from_slice(&row);
        }
        // The two directions of a path accumulate weights in opposite
        // order, which can differ in the last ulp; keep the smaller sum so
        // the matrix is exactly symmetric.
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                let m = data[u * self.n + v].min(data[v * self.n + u]);
                data[u * self.n + v] = m;
                data[v * self.n + u] = m;
            }
        }
        Ok(DistanceMatrix { n: self.n, data })
    }

    /// Single-source shortest path lengths (sum of edge weights).
    pub fn dijkstra(&self, source: usize) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Entry {
            dist: f64,
            node: usize,
        }
        impl Eq for Entry {}
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> Ordering {
                // min-heap on distance; weights are finite so unwrap is safe
                other
                    .dist
                    .partial_cmp(&self.dist)
                    .unwrap()
                    .then_with(|| other.node.cmp(&self.node))
            }
        }

        let mut dist = vec![f64::INFINITY; self.n];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Entry {
            dist: 0.0,
            node: source,
        });
        while let Some(Entry { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Entry { dist: nd, node: v });
                }
            }
        }
        dist
    }

    /// Subgraph induced by a node set. Connectivity is not required; the
    /// result reports it instead.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<InducedSubgraph> {
        if nodes.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut sorted: Vec<usize> = nodes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &u in &sorted {
            if u >= self.n {
                return Err(Error::NodeOutOfRange { node: u, n: self.n });
            }
        }
        let mut local = vec![usize::MAX; self.n];
        for (i, &u) in sorted.iter().enumerate() {
            local[u] = i;
        }
        let edges: Vec<(usize, usize, f64)> = self
            .edges
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| (local[e.u], local[e.v], e.w))
            .collect();

        // connectivity of the induced subgraph by traversal
        let k = sorted.len();
        let mut adj = vec![Vec::new(); k];
        for &(a, b, _) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(a) = stack.pop() {
            for &b in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    reached += 1;
                    stack.push(b);
                }
            }
        }
        Ok(InducedSubgraph {
            nodes: sorted,
            edges,
            connected: reached == k,
        })
    }

    /// Serializes to the edge-list CSV format (`u,v,w` header, one edge per
    /// line with `u < v`, 0-based indices, LF line endings).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,v,w\n");
        for e in &self.edges {
            let _ = writeln!(out, "{},{},{}", e.u, e.v, e.w);
        }
        out
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses the edge-list CSV format. The node count is inferred as the
    /// largest index plus one; connectivity then guarantees every node
    /// appears in some edge.
    pub fn from_csv(text: &str) -> Result<Graph> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "u,v,w" => {}
            Some((_, header)) => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected header `u,v,w`, got `{header}`"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty file".into(),
                })
            }
        }
        let mut raw = Vec::new();
        let mut max_node = 0usize;
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |p: Option<&str>, what: &str| -> Result<String> {
                p.map(str::trim).map(String::from).ok_or(Error::Parse {
                    line: idx + 1,
                    msg: format!("missing {what}"),
                })
            };
            let u: usize = parse(parts.next(), "u")?.parse().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("bad u: {e}"),
            })?;
            let v: usize = parse(parts.next(), "v")?.parse().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("bad v: {e}"),
            })?;
            let w: f64 = parse(parts.next(), "w")?.parse().map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("bad w: {e}"),
            })?;
            max_node = max_node.max(u).max(v);
            raw.push((u, v, w));
        }
        Graph::from_edges(max_node + 1, &raw)
    }

    pub fn load_csv(path: &Path) -> Result<Graph> {
        let text = std::fs::read_to_string(path)?;
        Graph::from_csv(&text)
    }
}

/// Induced subgraph with local 0-based indices and a connectivity flag.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    /// Original node ids, ascending; local index i maps to `nodes[i]`.
    pub nodes: Vec<usize>,
    /// Edges in local indices.
    pub edges: Vec<(usize, usize, f64)>,
    pub connected: bool,
}

impl InducedSubgraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Laplacian of the induced subgraph.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let k = self.nodes.len();
        let mut l = DMatrix::zeros(k, k);
        for &(a, b, w) in &self.edges {
            l[(a, b)] = -w;
            l[(b, a)] = -w;
            l[(a, a)] += w;
            l[(b, b)] += w;
        }
        l
    }
}

/// Binary sampling pattern: indicator signal `s` with support `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPattern {
    n: usize,
    support: Vec<usize>,
}

impl SamplingPattern {
    pub fn from_support(n: usize, support: &[usize]) -> Result<SamplingPattern> {
        let mut s: Vec<usize> = support.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != support.len() {
            return Err(Error::InvalidParam("duplicate support indices".into()));
        }
        if let Some(&last) = s.last() {
            if last >= n {
                return Err(Error::NodeOutOfRange { node: last, n });
            }
        }
        if s.len() > n {
            return Err(Error::PatternTooLarge { m: s.len(), n });
        }
        Ok(SamplingPattern { n, support: s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted, duplicate-free support `S`.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Number of ones `m = |S|`.
    pub fn m(&self) -> usize {
        self.support.len()
    }

    /// Density `d = m / N`.
    pub fn density(&self) -> f64 {
        self.support.len() as f64 / self.n as f64
    }

    /// Indicator vector of length n.
    pub fn indicator(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n];
        for &i in &self.support {
            s[i] = 1.0;
        }
        s
    }

    pub fn contains(&self, v: usize) -> bool {
        self.support.binary_search(&v).is_ok()
    }

    /// Complement set `S^c`, ascending.
    pub fn complement(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n - self.support.len());
        let mut it = self.support.iter().peekable();
        for v in 0..self.n {
            if it.peek() == Some(&&v) {
                it.next();
            } else {
                out.push(v);
            }
        }
        out
    }

    /// Pattern with ones and zeros swapped.
    pub fn complement_pattern(&self) -> SamplingPattern {
        SamplingPattern {
            n: self.n,
            support: self.complement(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pattern serialization cannot fail")
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<SamplingPattern> {
        let raw: SamplingPattern = serde_json::from_str(text)?;
        SamplingPattern::from_support(raw.n, &raw.support)
    }

    pub fn load_json(path: &Path) -> Result<SamplingPattern> {
        let text = std::fs::read_to_string(path)?;
        SamplingPattern::from_json(&text)
    }
}

/// Dense matrix of pairwise geodesic distances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    /// Largest pairwise distance (graph diameter in path-length metric).
    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(0.0, f64::max)
    }

    /// Mean over off-diagonal entries.
    pub fn mean_offdiagonal(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let total: f64 = self.data.iter().sum();
        total / (self.n * self.n - self.n) as f64
    }

    /// Open ball `B(v, ρ) = { u : Γ(v, u) < ρ }`; contains `v` for ρ > 0.
    pub fn open_ball(&self, v: usize, rho: f64) -> Vec<usize> {
        self.row(v)
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d < rho)
            .map(|(u, _)| u)
            .collect()
    }

    /// Annulus `B_θ(v, ρ) = { u : ρ−θ ≤ Γ(v, u) < ρ+θ }`.
    pub fn annulus(&self, v: usize, rho: f64, theta: f64) -> Vec<usize> {
        self.row(v)
            .iter()
            .enumerate()
            .filter(|&(_, &d)| rho - theta <= d && d < rho + theta)
            .map(|(u, _)| u)
            .collect()
    }
}

/// Canonical small fixtures used across tests and the CLI.
pub mod fixtures {
    use super::Graph;

    /// Path graph P_n with unit weights.
    pub fn path_graph(n: usize) -> Graph {
        let edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        Graph::from_edges(n, &edges).expect("path graph is valid")
    }

    /// rows × cols grid with unit weights.
    pub fn grid_graph(rows: usize, cols: usize) -> Graph {
        let at = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((at(r, c), at(r, c + 1), 1.0));
                }
                if r + 1 < rows {
                    edges.push((at(r, c), at(r + 1, c), 1.0));
                }
            }
        }
        Graph::from_edges(rows * cols, &edges).expect("grid graph is valid")
    }

    /// Complete graph K_n with unit weights.
    pub fn complete_graph(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v, 1.0));
            }
        }
        Graph::from_edges(n, &edges).expect("complete graph is valid")
    }
}
