//! Shared oracles for the integration tests. Everything here is written
//! from scratch on plain `Vec` storage so it shares no code path with the
//! library implementations it checks.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Dense symmetric matrix as nested rows.
pub type Mat = Vec<Vec<f64>>;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.len();
    let mut m: Mat = a.clone();
    for sweep in 0..200 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&m)) {
            break;
        }
        assert!(sweep < 199, "jacobi failed to converge");
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

fn frobenius(m: &Mat) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Laplacian rows assembled directly from an edge list.
pub fn laplacian_rows(n: usize, edges: &[(usize, usize, f64)]) -> Mat {
    let mut l = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        l[u][v] -= w;
        l[v][u] -= w;
        l[u][u] += w;
        l[v][v] += w;
    }
    l
}

pub fn mat_vec(m: &Mat, x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Gram matrix of { L^q e_i : i in set } built by repeated matrix-vector
/// application; its smallest eigenvalue is the squared minimum of
/// ‖L^q φ‖/‖φ‖ over signals supported on the set.
pub fn power_gram(l: &Mat, set: &[usize], q: u32) -> Mat {
    let n = l.len();
    let cols: Vec<Vec<f64>> = set
        .iter()
        .map(|&i| {
            let mut x = vec![0.0; n];
            x[i] = 1.0;
            for _ in 0..q {
                x = mat_vec(l, &x);
            }
            x
        })
        .collect();
    let k = set.len();
    let mut g = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in a..k {
            let dot: f64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum();
            g[a][b] = dot;
            g[b][a] = dot;
        }
    }
    g
}

/// All-pairs shortest paths by Bellman–Ford relaxation rounds.
pub fn bellman_ford_all_pairs(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    (0..n)
        .map(|src| {
            let mut dist = vec![f64::INFINITY; n];
            dist[src] = 0.0;
            for _ in 0..n.saturating_sub(1) {
                let mut changed = false;
                for &(u, v, w) in edges {
                    if dist[u] + w < dist[v] {
                        dist[v] = dist[u] + w;
                        changed = true;
                    }
                    if dist[v] + w < dist[u] {
                        dist[u] = dist[v] + w;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            dist
        })
        .collect()
}

/// Uniform random m-subset from a seeded generator (reference sampler for
/// tests that need patterns without going through the library).
pub fn random_subset(n: usize, m: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    let mut out = pool[..m].to_vec();
    out.sort_unstable();
    out
}

/// Gaussian elimination solve of a small dense system (partial pivoting).
pub fn solve_dense(a: &Mat, b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        assert!(m[col][col].abs() > 1e-14, "singular system in oracle");
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = m[row][n];
        for k in (row + 1)..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x
}
