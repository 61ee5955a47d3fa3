//! Vertex-domain quality metrics for sampling patterns and the diagnostics
//! tied to uniqueness results: pair correlation over geodesic annuli,
//! principal wavelength, the K_S constant, pattern-induced partitions and
//! their spectral constant Λ_P.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph, SamplingPattern};

/// Pair correlation `R(ρ)` on an ascending radius grid, averaged over an
/// ensemble of patterns. Radii whose denominator vanished for some pattern
/// are excluded from the grid rather than reported as zero.
#[derive(Debug, Clone)]
pub struct PairCorrelation {
    pub rho: Vec<f64>,
    pub values: Vec<f64>,
    /// Annulus half-width used for every ring.
    pub theta: f64,
}

impl PairCorrelation {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,R\n");
        for (r, v) in self.rho.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", r, v));
        }
        out
    }

    /// Value at the grid radius nearest to `rho`.
    pub fn value_near(&self, rho: f64) -> Option<f64> {
        self.rho
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (*a - rho).abs().partial_cmp(&(*b - rho).abs()).unwrap()
            })
            .map(|(i, _)| self.values[i])
    }
}

/// Default annulus half-width: the average nonzero edge weight.
pub fn default_theta(g: &Graph) -> f64 {
    let total: f64 = g.edges().iter().map(|e| e.w).sum();
    total / g.edges().len() as f64
}

/// Sample pair correlation of an ensemble of patterns: for each radius, the
/// mean number of ones in the annulus around a sampling node divided by the
/// mean number around an arbitrary node, averaged over the ensemble. The
/// grid runs from θ to the graph diameter in steps of θ/2.
pub fn pair_correlation(
    gamma: &DistanceMatrix,
    patterns: &[SamplingPattern],
    theta: f64,
) -> Result<PairCorrelation> {
    if patterns.is_empty() {
        return Err(Error::InvalidParam("need at least one pattern".into()));
    }
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::InvalidParam(format!("theta must be positive, got {theta}")));
    }
    let n = gamma.n();
    for p in patterns {
        if p.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.n(),
            });
        }
        if p.m() == 0 {
            return Err(Error::EmptyPattern);
        }
    }
    let max_dist = gamma.max();
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let rho = theta + k as f64 * theta / 2.0;
        if rho > max_dist + 1e-12 {
            break;
        }
        grid.push(rho);
        k += 1;
    }

    // per pattern: sorted distances from every node to the sampling nodes
    let mut sums = vec![0.0f64; grid.len()];
    let mut defined = vec![true; grid.len()];
    for p in patterns {
        let support = p.support();
        let m = support.len();
        let mut to_support: Vec<Vec<f64>> = Vec::with_capacity(n);
        for v in 0..n {
            let mut d: Vec<f64> = support.iter().map(|&s| gamma.dist(v, s)).collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            to_support.push(d);
        }
        let count_in = |v: usize, lo: f64, hi: f64| -> usize {
            let d = &to_support[v];
            d.partition_point(|&x| x < lo).abs_diff(d.partition_point(|&x| x < hi))
        };
        for (gi, &rho) in grid.iter().enumerate() {
            let lo = rho - theta;
            let hi = rho + theta;
            let num: usize = support.iter().map(|&s| count_in(s, lo, hi)).sum();
            let den: usize = (0..n).map(|v| count_in(v, lo, hi)).sum();
            if den == 0 {
                defined[gi] = false;
            } else {
                let num = num as f64 / m as f64;
                let den = den as f64 / n as f64;
                sums[gi] += num / den;
            }
        }
    }
    let q = patterns.len() as f64;
    let mut rho_out = Vec::new();
    let mut val_out = Vec::new();
    for (gi, &rho) in grid.iter().enumerate() {
        if defined[gi] {
            rho_out.push(rho);
            val_out.push(sums[gi] / q);
        }
    }
    Ok(PairCorrelation {
        rho: rho_out,
        values: val_out,
        theta,
    })
}

/// Principal wavelength λ_b for density d: the smallest distance r (among
/// realized pairwise distances) at which the expected closed-ball
/// population `E[N(r)]`, averaged over all centers, reaches 1/d.
pub fn principal_wavelength(gamma: &DistanceMatrix, d: f64) -> Result<f64> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::InvalidParam(format!("density d={d} must be in (0, 1]")));
    }
    let n = gamma.n();
    let threshold = n as f64 / d; // count over all ordered pairs incl. self
    if 1.0 / d > n as f64 + 1e-9 {
        return Err(Error::InvalidParam(format!(
            "wavelength undefined: 1/d = {} exceeds node count {n}",
            1.0 / d
        )));
    }
    let mut all: Vec<f64> = Vec::with_capacity(n * n);
    for v in 0..n {
        all.extend_from_slice(gamma.row(v));
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let required = (threshold - 1e-9 * threshold.max(1.0)).ceil().max(1.0) as usize;
    Ok(all[required - 1])
}

/// Mean closed-ball population `E[N(r)]` over all centers; nondecreasing
/// in r.
pub fn expected_ball_population(gamma: &DistanceMatrix, r: f64) -> f64 {
    let n = gamma.n();
    let total: usize = (0..n)
        .map(|v| gamma.row(v).iter().filter(|&&x| x <= r).count())
        .sum();
    total as f64 / n as f64
}

/// Uniqueness constant of Fuhr–Pesenson type:
/// `K_S = min_{v ∉ S} w_S(v)`, the smallest total edge weight from a
/// non-sampling node into the sampling set.
pub fn uniqueness_constant_ks(g: &Graph, set: &[usize]) -> Result<f64> {
    let n = g.node_count();
    if set.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut in_set = vec![false; n];
    for &s in set {
        if s >= n {
            return Err(Error::NodeOutOfRange { node: s, n });
        }
        in_set[s] = true;
    }
    if in_set.iter().all(|&b| b) {
        return Err(Error::InvalidParam(
            "K_S undefined when S covers all nodes".into(),
        ));
    }
    let mut w = vec![0.0f64; n];
    for &s in set {
        for &(v, weight) in g.neighbors(s) {
            w[v] += weight;
        }
    }
    Ok((0..n)
        .filter(|&v| !in_set[v])
        .map(|v| w[v])
        .fold(f64::INFINITY, f64::min))
}

/// Disjoint cover of the nodes with one sampling node (seed) per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// `cells[j]` lists the nodes of cell j, ascending.
    pub cells: Vec<Vec<usize>>,
    /// `seeds[j]` is the sampling node of cell j.
    pub seeds: Vec<usize>,
    /// Largest distance from a node to its assigned seed. Not serialized;
    /// recomputed by [`partition_from_pattern`].
    #[serde(skip)]
    pub lambda: f64,
}

impl Partition {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("partition serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Partition> {
        Ok(serde_json::from_str(text)?)
    }

    /// Verifies the cover: disjoint cells, union = V(G), one seed per cell
    /// inside its own cell.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.cells.len() != self.seeds.len() {
            return Err(Error::InvalidParam(
                "cells and seeds must have equal length".into(),
            ));
        }
        let mut owner = vec![usize::MAX; n];
        for (j, cell) in self.cells.iter().enumerate() {
            for &v in cell {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
                if owner[v] != usize::MAX {
                    return Err(Error::InvalidParam(format!(
                        "node {v} appears in two cells"
                    )));
                }
                owner[v] = j;
            }
            if owner[self.seeds[j]] != j {
                return Err(Error::InvalidParam(format!(
                    "seed {} not inside its cell {j}",
                    self.seeds[j]
                )));
            }
        }
        if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidParam(format!("node {v} not covered")));
        }
        Ok(())
    }
}

/// Geodesic Voronoi partition seeded by the sampling nodes. Every node goes
/// to its nearest seed; exact distance ties go to the cell with the
/// currently smallest volume (greedy stand-in for the volume-balancing
/// objective), then to the lowest seed index. Nodes are processed in index
/// order, which makes the result independent of evaluation order.
pub fn partition_from_pattern(
    g: &Graph,
    gamma: &DistanceMatrix,
    s: &SamplingPattern,
) -> Result<Partition> {
    if s.m() == 0 {
        return Err(Error::EmptyPattern);
    }
    let n = g.node_count();
    if s.n() != n || gamma.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.n().min(gamma.n()),
        });
    }
    let seeds: Vec<usize> = s.support().to_vec();
    let mut cells: Vec<Vec<usize>> = seeds.iter().map(|&x| vec![x]).collect();
    let mut volumes: Vec<f64> = seeds.iter().map(|&x| g.degree(x)).collect();
    let mut lambda = 0.0f64;
    for v in 0..n {
        if s.contains(v) {
            continue;
        }
        let dists: Vec<f64> = seeds.iter().map(|&sd| gamma.dist(v, sd)).collect();
        let best = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut chosen = usize::MAX;
        for (j, &dj) in dists.iter().enumerate() {
            if dj == best && (chosen == usize::MAX || volumes[j] < volumes[chosen]) {
                chosen = j;
            }
        }
        cells[chosen].push(v);
        volumes[chosen] += g.degree(v);
        lambda = lambda.max(best);
    }
    for cell in &mut cells {
        cell.sort_unstable();
    }
    Ok(Partition {
        cells,
        seeds,
        lambda,
    })
}

/// Λ_P of a partition together with the cells that break the assumptions
/// of the underlying result.
#[derive(Debug, Clone)]
pub struct PartitionSpectralGap {
    /// `inf_j μ_{1,j}` over the cells, where μ_{1,j} is the smallest
    /// nonzero Laplacian eigenvalue of the induced cell subgraph. Zero when
    /// any cell is a singleton or disconnected.
    pub value: f64,
    /// Indices of singleton or disconnected cells.
    pub degenerate_cells: Vec<usize>,
}

/// Computes Λ_P: per cell, the smallest nonzero eigenvalue of the induced
/// subgraph Laplacian. Singleton cells have no nonzero eigenvalue and
/// disconnected cells have a second zero eigenvalue; either forces the
/// constant to zero and is reported in `degenerate_cells`.
pub fn lambda_partition(g: &Graph, p: &Partition) -> Result<PartitionSpectralGap> {
    p.validate(g.node_count())?;
    let mut value = f64::INFINITY;
    let mut degenerate = Vec::new();
    for (j, cell) in p.cells.iter().enumerate() {
        let sub = g.induced_subgraph(cell)?;
        if sub.node_count() == 1 || !sub.connected {
            degenerate.push(j);
            value = 0.0;
            continue;
        }
        let mut eig: Vec<f64> = sub.laplacian().symmetric_eigenvalues().iter().cloned().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        value = value.min(eig[1]);
    }
    Ok(PartitionSpectralGap {
        value,
        degenerate_cells: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{complete_graph, path_graph};
    use approx::assert_relative_eq;

    #[test]
    fn pair_correlation_of_full_pattern_is_one() {
        let g = path_graph(6);
        let gamma = g.geodesic_distances().unwrap();
        let all = SamplingPattern::from_support(6, &(0..6).collect::<Vec<_>>()).unwrap();
        let pc = pair_correlation(&gamma, &[all], default_theta(&g)).unwrap();
        assert!(!pc.rho.is_empty());
        for v in &pc.values {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pair_correlation_rejects_bad_input() {
        let g = path_graph(4);
        let gamma = g.geodesic_distances().unwrap();
        assert!(pair_correlation(&gamma, &[], 1.0).is_err());
        let p = SamplingPattern::from_support(4, &[0]).unwrap();
        assert!(pair_correlation(&gamma, std::slice::from_ref(&p), 0.0).is_err());
        let empty = SamplingPattern::from_support(4, &[]).unwrap();
        assert!(pair_correlation(&gamma, &[empty], 1.0).is_err());
        assert!(pair_correlation(&gamma, &[p], 1.0).is_ok());
    }

    #[test]
    fn wavelength_on_p3() {
        let gamma = path_graph(3).geodesic_distances().unwrap();
        assert_eq!(principal_wavelength(&gamma, 1.0 / 3.0).unwrap(), 2.0);
        assert_eq!(principal_wavelength(&gamma, 1.0).unwrap(), 0.0);
        assert!(principal_wavelength(&gamma, 0.2).is_err()); // 1/d = 5 > 3
        assert!(principal_wavelength(&gamma, 0.0).is_err());
    }

    #[test]
    fn ball_population_is_nondecreasing() {
        let gamma = crate::gen::sensor_graph(25, 4, 6)
            .unwrap()
            .geodesic_distances()
            .unwrap();
        let mut prev = 0.0;
        for i in 0..20 {
            let r = i as f64 * gamma.max() / 19.0;
            let e = expected_ball_population(&gamma, r);
            assert!(e >= prev);
            prev = e;
        }
        assert_relative_eq!(prev, 25.0, epsilon = 1e-12);
    }

    #[test]
    fn ks_on_small_fixtures() {
        let p3 = path_graph(3);
        assert_eq!(uniqueness_constant_ks(&p3, &[1]).unwrap(), 1.0);
        assert_eq!(uniqueness_constant_ks(&p3, &[0]).unwrap(), 0.0);
        let k3 = complete_graph(3);
        assert_eq!(uniqueness_constant_ks(&k3, &[0]).unwrap(), 1.0);
        assert!(uniqueness_constant_ks(&p3, &[]).is_err());
        assert!(uniqueness_constant_ks(&p3, &[0, 1, 2]).is_err());
    }

    #[test]
    fn partition_of_p3_resolves_tie_to_first_seed() {
        let g = path_graph(3);
        let gamma = g.geodesic_distances().unwrap();
        let s = SamplingPattern::from_support(3, &[0, 2]).unwrap();
        let p = partition_from_pattern(&g, &gamma, &s).unwrap();
        // node 1 is equidistant; both cells start with volume 1, so the
        // lower seed index wins
        assert_eq!(p.cells, vec![vec![0, 1], vec![2]]);
        assert_eq!(p.seeds, vec![0, 2]);
        assert_eq!(p.lambda, 1.0);
        p.validate(3).unwrap();
    }

    #[test]
    fn partition_with_all_nodes_sampled_is_singletons() {
        let g = path_graph(4);
        let gamma = g.geodesic_distances().unwrap();
        let s = SamplingPattern::from_support(4, &[0, 1, 2, 3]).unwrap();
        let p = partition_from_pattern(&g, &gamma, &s).unwrap();
        assert_eq!(p.cells.len(), 4);
        assert!(p.cells.iter().all(|c| c.len() == 1));
        assert_eq!(p.lambda, 0.0);
    }

    #[test]
    fn lambda_partition_p3_cases() {
        let g = path_graph(3);
        // {0,1} has a single unit edge (gap 2); {2} is a singleton
        let p = Partition {
            cells: vec![vec![0, 1], vec![2]],
            seeds: vec![0, 2],
            lambda: 1.0,
        };
        let gap = lambda_partition(&g, &p).unwrap();
        assert_eq!(gap.value, 0.0);
        assert_eq!(gap.degenerate_cells, vec![1]);

        // whole graph in one cell: algebraic connectivity of P3 is 1
        let p = Partition {
            cells: vec![vec![0, 1, 2]],
            seeds: vec![1],
            lambda: 1.0,
        };
        let gap = lambda_partition(&g, &p).unwrap();
        assert!(gap.degenerate_cells.is_empty());
        assert_relative_eq!(gap.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn lambda_partition_rejects_invalid_cover() {
        let g = path_graph(3);
        let p = Partition {
            cells: vec![vec![0, 1]],
            seeds: vec![0],
            lambda: 0.0,
        };
        assert!(lambda_partition(&g, &p).is_err());
    }

    #[test]
    fn partition_json_shape() {
        let p = Partition {
            cells: vec![vec![0, 1], vec![2]],
            seeds: vec![0, 2],
            lambda: 1.0,
        };
        let json = p.to_json();
        assert!(json.contains("\"cells\""));
        assert!(json.contains("\"seeds\""));
        assert!(!json.contains("lambda"));
        let q = Partition::from_json(&json).unwrap();
        assert_eq!(q.cells, p.cells);
        assert_eq!(q.seeds, p.seeds);
    }
}
