//! Seeded generators for the graph families used in the experiments, plus
//! canonical test fixtures. Equal spec and seed always produce identical
//! graphs, byte-for-byte in CSV form.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub use crate::graph::fixtures::{complete_graph, grid_graph, path_graph};

fn default_p_in() -> f64 {
    0.3
}

fn default_p_out() -> f64 {
    0.005
}

/// Declarative description of a generated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Sensor {
        n: usize,
        k_max: usize,
        seed: u64,
    },
    Community {
        n: usize,
        communities: usize,
        #[serde(default = "default_p_in")]
        p_in: f64,
        #[serde(default = "default_p_out")]
        p_out: f64,
        seed: u64,
    },
    BarabasiAlbert {
        n: usize,
        m_attach: usize,
        seed: u64,
    },
    Path {
        n: usize,
    },
    Grid {
        rows: usize,
        cols: usize,
    },
    Complete {
        n: usize,
    },
}

/// What the generator had to do beyond the base construction.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GenReport {
    /// Edges added to stitch disconnected components together.
    pub bridges_added: usize,
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Graph> {
        self.build_detailed().map(|(g, _)| g)
    }

    pub fn build_detailed(&self) -> Result<(Graph, GenReport)> {
        match *self {
            GeneratorSpec::Sensor { n, k_max, seed } => sensor_graph_detailed(n, k_max, seed),
            GeneratorSpec::Community {
                n,
                communities,
                p_in,
                p_out,
                seed,
            } => community_graph_detailed(n, communities, p_in, p_out, seed),
            GeneratorSpec::BarabasiAlbert { n, m_attach, seed } => {
                barabasi_albert(n, m_attach, seed).map(|g| (g, GenReport::default()))
            }
            GeneratorSpec::Path { n } => {
                if n < 2 {
                    return Err(Error::InvalidParam("path graph needs n >= 2".into()));
                }
                Ok((path_graph(n), GenReport::default()))
            }
            GeneratorSpec::Grid { rows, cols } => {
                if rows * cols < 2 {
                    return Err(Error::InvalidParam("grid graph needs >= 2 nodes".into()));
                }
                Ok((grid_graph(rows, cols), GenReport::default()))
            }
            GeneratorSpec::Complete { n } => {
                if n < 2 {
                    return Err(Error::InvalidParam("complete graph needs n >= 2".into()));
                }
                Ok((complete_graph(n), GenReport::default()))
            }
        }
    }
}

fn euclid(p: (f64, f64), q: (f64, f64)) -> f64 {
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

/// Random sensor network: n points uniform in the unit square, each joined
/// to its `k_max` nearest neighbors (union rule: the edge is kept if either
/// endpoint lists the other). Edge weight is the Euclidean distance, so
/// weights follow the path-length convention.
pub fn sensor_graph(n: usize, k_max: usize, seed: u64) -> Result<Graph> {
    sensor_graph_detailed(n, k_max, seed).map(|(g, _)| g)
}

pub fn sensor_graph_detailed(n: usize, k_max: usize, seed: u64) -> Result<(Graph, GenReport)> {
    if k_max == 0 {
        return Err(Error::InvalidParam("k_max must be >= 1".into()));
    }
    if n < k_max + 1 {
        return Err(Error::InvalidParam(format!(
            "sensor graph needs n >= k_max + 1 (got n={n}, k_max={k_max})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();

    // per-node lists capped at k_max before symmetrization
    let mut listed = vec![false; n * n];
    for u in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&v| v != u).collect();
        order.sort_by(|&a, &b| {
            euclid(points[u], points[a])
                .partial_cmp(&euclid(points[u], points[b]))
                .unwrap()
                .then(a.cmp(&b))
        });
        for &v in order.iter().take(k_max) {
            listed[u * n + v] = true;
        }
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if listed[u * n + v] || listed[v * n + u] {
                edges.push((u, v, euclid(points[u], points[v])));
            }
        }
    }
    let report = repair_connectivity(n, &mut edges, |u, v| euclid(points[u], points[v]));
    Ok((Graph::from_edges(n, &edges)?, report))
}

/// Planted-partition community graph: nodes split into near-equal
/// contiguous blocks, unit-weight edges drawn with probability `p_in`
/// inside a block and `p_out` across blocks.
pub fn community_graph(n: usize, communities: usize, seed: u64) -> Result<Graph> {
    community_graph_detailed(n, communities, default_p_in(), default_p_out(), seed).map(|(g, _)| g)
}

pub fn community_graph_detailed(
    n: usize,
    communities: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, GenReport)> {
    if communities == 0 {
        return Err(Error::InvalidParam("need at least one community".into()));
    }
    if n < 2 * communities {
        return Err(Error::InvalidParam(format!(
            "community graph needs n >= 2 * communities (got n={n}, communities={communities})"
        )));
    }
    for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParam(format!("{name}={p} must be in [0,1]")));
        }
    }
    let labels = community_labels(n, communities);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    let report = repair_connectivity(n, &mut edges, |_, _| 1.0);
    Ok((Graph::from_edges(n, &edges)?, report))
}

/// Community label per node for the contiguous near-equal split used by
/// `community_graph`.
pub fn community_labels(n: usize, communities: usize) -> Vec<usize> {
    let base = n / communities;
    let extra = n % communities;
    let mut labels = Vec::with_capacity(n);
    for c in 0..communities {
        let size = base + usize::from(c < extra);
        labels.extend(std::iter::repeat_n(c, size));
    }
    labels
}

/// Barabási–Albert preferential attachment from an `m_attach`-clique seed;
/// every later node attaches to `m_attach` distinct existing nodes with
/// probability proportional to degree. Unit weights.
pub fn barabasi_albert(n: usize, m_attach: usize, seed: u64) -> Result<Graph> {
    if m_attach == 0 {
        return Err(Error::InvalidParam("m_attach must be >= 1".into()));
    }
    if n <= m_attach {
        return Err(Error::InvalidParam(format!(
            "barabasi-albert needs n > m_attach (got n={n}, m_attach={m_attach})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut degrees = vec![0usize; n];
    for u in 0..m_attach {
        for v in (u + 1)..m_attach {
            edges.push((u, v, 1.0));
            degrees[u] += 1;
            degrees[v] += 1;
        }
    }
    for t in m_attach..n {
        let total: usize = degrees[..t].iter().sum();
        let mut targets: Vec<usize> = Vec::with_capacity(m_attach);
        while targets.len() < m_attach {
            let pick = if total == 0 {
                // degenerate start (m_attach = 1): uniform over existing nodes
                rng.random_range(0..t)
            } else {
                let mut r = rng.random::<f64>() * total as f64;
                let mut chosen = t - 1;
                for (v, &deg) in degrees[..t].iter().enumerate() {
                    r -= deg as f64;
                    if r < 0.0 {
                        chosen = v;
                        break;
                    }
                }
                chosen
            };
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        for v in targets {
            edges.push((v, t, 1.0));
            degrees[v] += 1;
            degrees[t] += 1;
        }
    }
    Graph::from_edges(n, &edges)
}

/// Adds the lightest candidate edge between distinct components until the
/// graph is connected. `candidate_weight` gives the weight of the edge that
/// would join a pair of nodes; ties fall back to lexicographic (u, v) order.
fn repair_connectivity<F>(n: usize, edges: &mut Vec<(usize, usize, f64)>, candidate_weight: F) -> GenReport
where
    F: Fn(usize, usize) -> f64,
{
    let mut report = GenReport::default();
    loop {
        let comp = components(n, edges);
        let ncomp = 1 + comp.iter().cloned().max().unwrap_or(0);
        if ncomp <= 1 {
            return report;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for u in 0..n {
            for v in (u + 1)..n {
                if comp[u] != comp[v] {
                    let w = candidate_weight(u, v);
                    let key = (w, u, v);
                    if best.is_none_or(|(bw, bu, bv)| key < (bw, bu, bv)) {
                        best = Some(key);
                    }
                }
            }
        }
        let (w, u, v) = best.expect("disconnected graph has a cross-component pair");
        edges.push((u, v, w));
        report.bridges_added += 1;
    }
}

fn components(n: usize, edges: &[(usize, usize, f64)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = next;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sensor_two_nodes_single_edge() {
        let g = sensor_graph(2, 1, 42).unwrap();
        assert_eq!(g.edges().len(), 1);
        let e = g.edges()[0];
        assert!(e.w > 0.0 && e.w < 2f64.sqrt());
    }

    #[test]
    fn sensor_instance_connected_with_bounded_degree() {
        let g = sensor_graph(300, 6, 1).unwrap();
        assert_eq!(g.node_count(), 300);
        let max_deg = (0..300).map(|u| g.neighbors(u).len()).max().unwrap();
        assert!(max_deg <= 12, "max degree {max_deg} exceeds 2*k_max");
    }

    #[test]
    fn sensor_is_deterministic() {
        let a = sensor_graph(80, 6, 9).unwrap().to_csv();
        let b = sensor_graph(80, 6, 9).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn community_single_block_is_er_like() {
        let g = community_graph(20, 1, 5).unwrap();
        assert_eq!(g.node_count(), 20);
    }

    #[test]
    fn community_is_deterministic() {
        let a = community_graph(120, 8, 7).unwrap().to_csv();
        let b = community_graph(120, 8, 7).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn community_blocks_have_strong_modularity() {
        let g = community_graph(200, 16, 7).unwrap();
        let labels = community_labels(200, 16);
        // Newman modularity of the planted partition
        let total_w: f64 = g.edges().iter().map(|e| e.w).sum();
        let mut intra = [0.0; 16];
        let mut vol = [0.0; 16];
        for e in g.edges() {
            if labels[e.u] == labels[e.v] {
                intra[labels[e.u]] += e.w;
            }
        }
        for u in 0..200 {
            vol[labels[u]] += g.degree(u);
        }
        let q: f64 = (0..16)
            .map(|c| intra[c] / total_w - (vol[c] / (2.0 * total_w)).powi(2))
            .sum();
        assert!(q > 0.5, "planted modularity {q} too weak");
    }

    #[test]
    fn ba_forced_complete_graph() {
        let g = barabasi_albert(5, 4, 0).unwrap();
        assert_eq!(g.edges().len(), 10);
        for u in 0..5 {
            assert_eq!(g.neighbors(u).len(), 4);
        }
    }

    #[test]
    fn ba_edge_count_formula() {
        let n = 1000;
        let m = 2;
        let g = barabasi_albert(n, m, 3).unwrap();
        assert_eq!(g.edges().len(), m * (m - 1) / 2 + (n - m) * m);
        let a = barabasi_albert(200, 3, 11).unwrap().to_csv();
        let b = barabasi_albert(200, 3, 11).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn fixture_shapes() {
        assert_eq!(path_graph(3).edges().len(), 2);
        let c4 = grid_graph(2, 2);
        assert_eq!(c4.edges().len(), 4);
        for u in 0..4 {
            assert_eq!(c4.neighbors(u).len(), 2);
        }
        assert_eq!(complete_graph(3).edges().len(), 3);
    }

    #[test]
    fn spec_round_trip_and_build() {
        let spec = GeneratorSpec::Community {
            n: 64,
            communities: 4,
            p_in: 0.3,
            p_out: 0.005,
            seed: 2,
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: GeneratorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        let (g, _) = spec.build_detailed().unwrap();
        assert_eq!(g.node_count(), 64);
    }
}
