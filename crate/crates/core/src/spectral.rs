//! Laplacian eigenstructure, graph Fourier transform, spectral signal
//! models and the spectral quality measures for sampling patterns.
//!
//! Index convention: formulas number eigenvalues 1-based, `μ_1 ≤ … ≤ μ_N`,
//! and spectral sums usually start at ℓ = 2 (the first eigenvalue of a
//! connected graph is 0). Arrays here are 0-based, so `μ_ℓ` is `mu[ℓ-1]`
//! and "ℓ ≥ 2" means indices `1..n`.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::graph::{Graph, SamplingPattern};

/// Ascending Laplacian eigenvalues with the matching orthonormal
/// eigenvector columns. `u.column(l)` pairs with `mu[l]`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    mu: Vec<f64>,
    u: DMatrix<f64>,
}

/// Full dense symmetric eigendecomposition, eigenvalues sorted ascending.
/// Every eigenvector is normalized so that its first entry of significant
/// magnitude is positive, which makes GFT coefficients reproducible.
pub fn eigendecompose(l: &DMatrix<f64>) -> Result<SpectralBasis> {
    let n = l.nrows();
    if n != l.ncols() {
        return Err(Error::NotSymmetric);
    }
    let scale = l.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (l[(i, j)] - l[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let se = l.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let mu: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut u = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = se.eigenvectors.column(src);
        let max_abs = col.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let flip = col
            .iter()
            .find(|x| x.abs() > 1e-8 * max_abs)
            .is_some_and(|&x| x < 0.0);
        for r in 0..n {
            u[(r, dst)] = if flip { -col[r] } else { col[r] };
        }
    }
    Ok(SpectralBasis { mu, u })
}

impl SpectralBasis {
    pub fn from_graph(g: &Graph) -> Result<SpectralBasis> {
        eigendecompose(&g.laplacian())
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// Eigenvalues, ascending; `mu()[0]` is numerically zero on a
    /// connected graph.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// First k eigenvector columns (the bandlimited synthesis matrix).
    pub fn u_k(&self, k: usize) -> DMatrix<f64> {
        self.u.columns(0, k).into_owned()
    }

    /// Graph Fourier transform `x̂ = U^T x`.
    pub fn gft(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(self.u.tr_mul(x))
    }

    /// Inverse transform `x = U x̂`.
    pub fn igft(&self, xhat: &DVector<f64>) -> Result<DVector<f64>> {
        if xhat.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: xhat.len(),
            });
        }
        Ok(&self.u * xhat)
    }

    /// GFT of a binary sampling pattern.
    pub fn pattern_gft(&self, s: &SamplingPattern) -> Result<DVector<f64>> {
        self.gft(&DVector::from_vec(s.indicator()))
    }

    /// Checks the basis against its Laplacian: orthonormality to 1e-8,
    /// eigen residuals to 1e-7 relative, zero first eigenvalue, ascending
    /// order. Used by tests and the theory checker.
    pub fn verify(&self, l: &DMatrix<f64>) -> Result<()> {
        let n = self.n();
        let gram = self.u.tr_mul(&self.u);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - want).abs() > 1e-8 {
                    return Err(Error::InvalidParam(format!(
                        "basis not orthonormal at ({i},{j})"
                    )));
                }
            }
        }
        let scale = self.mu.last().copied().unwrap_or(1.0).max(1.0);
        let lu = l * &self.u;
        for c in 0..n {
            let mut resid = 0.0f64;
            for r in 0..n {
                resid = resid.max((lu[(r, c)] - self.mu[c] * self.u[(r, c)]).abs());
            }
            if resid > 1e-7 * scale {
                return Err(Error::InvalidParam(format!(
                    "eigen residual {resid:.3e} too large at column {c}"
                )));
            }
        }
        if self.mu[0].abs() > 1e-9 * scale {
            return Err(Error::InvalidParam(format!(
                "first eigenvalue {} is not zero",
                self.mu[0]
            )));
        }
        if self.mu.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParam("eigenvalues not ascending".into()));
        }
        Ok(())
    }
}

/// Bandlimited random signal (SM1): `x = U_k c` with coefficients drawn
/// i.i.d. from Normal(1, 0.5²).
pub fn signal_sm1(basis: &SpectralBasis, k: usize, seed: u64) -> Result<DVector<f64>> {
    if k == 0 || k > basis.n() {
        return Err(Error::InvalidParam(format!(
            "bandwidth k={k} out of range 1..={}",
            basis.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(1.0, 0.5).expect("valid normal");
    let c = DVector::from_iterator(k, (0..k).map(|_| normal.sample(&mut rng)));
    Ok(basis.u.columns(0, k) * c)
}

/// Spectral modulation of SM2: flat up to the reference eigenvalue, then
/// exponential decay `exp(−4 (μ − μ_ref))`.
pub fn sm2_modulation(mu: f64, mu_ref: f64) -> f64 {
    if mu <= mu_ref {
        1.0
    } else {
        (-4.0 * (mu - mu_ref)).exp()
    }
}

/// Full-band random signal (SM2): Fourier coefficients from Normal(1, 0.5²)
/// modulated by `sm2_modulation` around the eigenvalue of 1-based rank
/// `ref_rank` (rank 50, i.e. μ_50, in the standard experiment setup).
pub fn signal_sm2(basis: &SpectralBasis, ref_rank: usize, seed: u64) -> Result<DVector<f64>> {
    let n = basis.n();
    if ref_rank == 0 || ref_rank > n {
        return Err(Error::InvalidParam(format!(
            "ref_rank={ref_rank} out of range 1..={n}"
        )));
    }
    let mu_ref = basis.mu[ref_rank - 1];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(1.0, 0.5).expect("valid normal");
    let xhat = DVector::from_iterator(
        n,
        basis
            .mu
            .iter()
            .map(|&mu| sm2_modulation(mu, mu_ref) * normal.sample(&mut rng)),
    );
    basis.igft(&xhat)
}

/// Redness of a sampling pattern: `R_s = (1/m) Σ_{ℓ≥2} ŝ(ℓ)² / μ_ℓ`,
/// the low-frequency energy measure. Small redness means blue-noise-like.
pub fn redness(basis: &SpectralBasis, s: &SamplingPattern) -> Result<f64> {
    if s.m() == 0 {
        return Err(Error::EmptyPattern);
    }
    if s.n() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            got: s.n(),
        });
    }
    let scale = basis.mu.last().copied().unwrap_or(1.0).max(1.0);
    if basis.mu[1] <= 1e-12 * scale {
        return Err(Error::InvalidParam(
            "second eigenvalue is zero; redness requires a connected graph".into(),
        ));
    }
    let shat = basis.pattern_gft(s)?;
    let sum: f64 = (1..basis.n())
        .map(|l| shat[l] * shat[l] / basis.mu[l])
        .sum();
    Ok(sum / s.m() as f64)
}

/// Averaged power spectrum of a collection of patterns,
/// `p(ℓ) = (N/q) Σ_i x̂_i(ℓ)² / ‖x̂_i‖²` for ℓ = 2..N.
#[derive(Debug, Clone)]
pub struct PowerSpectrum {
    /// Eigenvalues μ_2..μ_N paired with the entries of `p`.
    pub mu: Vec<f64>,
    pub p: Vec<f64>,
}

impl PowerSpectrum {
    /// CSV with header `ell,mu,p`; `ell` is the 1-based eigenvalue rank,
    /// starting at 2.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,mu,p\n");
        for (i, (mu, p)) in self.mu.iter().zip(&self.p).enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 2, mu, p));
        }
        out
    }
}

pub fn power_spectrum(basis: &SpectralBasis, patterns: &[SamplingPattern]) -> Result<PowerSpectrum> {
    if patterns.is_empty() {
        return Err(Error::InvalidParam("need at least one pattern".into()));
    }
    let n = basis.n();
    let mut p = vec![0.0; n - 1];
    for s in patterns {
        if s.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: s.n(),
            });
        }
        let shat = basis.pattern_gft(s)?;
        let energy = shat.norm_squared();
        if energy == 0.0 {
            return Err(Error::EmptyPattern);
        }
        for l in 1..n {
            p[l - 1] += shat[l] * shat[l] / energy;
        }
    }
    let q = patterns.len() as f64;
    for v in &mut p {
        *v *= n as f64 / q;
    }
    Ok(PowerSpectrum {
        mu: basis.mu[1..].to_vec(),
        p,
    })
}

/// Serializes a node signal as CSV with header `node,value`.
pub fn signal_to_csv(x: &DVector<f64>) -> String {
    let mut out = String::from("node,value\n");
    for (i, v) in x.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i, v));
    }
    out
}

/// Parses the `node,value` CSV format; rows may come in any order but must
/// cover 0..n-1 exactly once.
pub fn signal_from_csv(text: &str) -> Result<DVector<f64>> {
    let mut rows: Vec<(usize, f64)> = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "node,value" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header `node,value`".into(),
            })
        }
    }
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let node: usize = parts
            .next()
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("bad node: {e}"),
            })?;
        let value: f64 = parts
            .next()
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|e| Error::Parse {
                line: idx + 1,
                msg: format!("bad value: {e}"),
            })?;
        rows.push((node, value));
    }
    rows.sort_by_key(|&(n, _)| n);
    for (i, &(n, _)) in rows.iter().enumerate() {
        if n != i {
            return Err(Error::Parse {
                line: 0,
                msg: format!("signal rows must cover 0..n-1; problem near node {n}"),
            });
        }
    }
    Ok(DVector::from_iterator(rows.len(), rows.into_iter().map(|(_, v)| v)))
}

/// `m^p` by repeated multiplication. Powers used here are small (≤ 6).
pub fn matrix_power(m: &DMatrix<f64>, p: u32) -> DMatrix<f64> {
    assert!(p >= 1, "matrix power requires p >= 1");
    let mut out = m.clone();
    for _ in 1..p {
        out = &out * m;
    }
    out
}

/// Spectral proxy of the cutoff frequency for sampling on `S`:
/// `Ω_q(S) = λ_min(L^{2q}_{S^c,S^c})^{1/(2q)}`, equivalently the minimum of
/// `(‖L^q φ‖ / ‖φ‖)^{1/q}` over signals supported on the complement of `S`.
pub fn cutoff_proxy(l: &DMatrix<f64>, sampled: &[usize], q: u32) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidParam("q must be >= 1".into()));
    }
    let n = l.nrows();
    let comp = complement_of(n, sampled)?;
    if comp.is_empty() {
        return Err(Error::InvalidParam(
            "cutoff proxy undefined when S covers all nodes".into(),
        ));
    }
    let lp = matrix_power(l, 2 * q);
    let reduced = lp.select_rows(comp.iter()).select_columns(comp.iter());
    let eig = reduced.symmetric_eigen();
    let smallest = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(smallest.max(0.0).powf(1.0 / (2.0 * q as f64)))
}

/// Λ-set constant: the largest Λ with `‖x‖ ≤ (1/Λ)‖Lx‖` for all signals
/// supported on `set`; equals the smallest singular value of the column
/// submatrix `L[:, set]`.
pub fn lambda_set(l: &DMatrix<f64>, set: &[usize]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySubset);
    }
    let n = l.nrows();
    for &v in set {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
    }
    let cols = l.select_columns(set.iter());
    let svd = cols.svd(false, false);
    Ok(svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Rank of the row-sampled bandlimited basis `U_k(S, :)`, counting singular
/// values above `1e-10 · σ_max`. The uniqueness results for removable sets
/// and for the boundary-weight constant predict rank k whenever μ_k lies
/// strictly below the corresponding constant.
pub fn sampled_basis_rank(basis: &SpectralBasis, sampled: &[usize], k: usize) -> Result<usize> {
    if k == 0 || k > basis.n() {
        return Err(Error::InvalidParam(format!("k={k} out of range")));
    }
    if sampled.is_empty() {
        return Err(Error::EmptySubset);
    }
    let rows = basis.u.columns(0, k).select_rows(sampled.iter());
    let svd = rows.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * smax)
        .count())
}

fn complement_of(n: usize, set: &[usize]) -> Result<Vec<usize>> {
    let mut in_set = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
        in_set[v] = true;
    }
    Ok((0..n).filter(|&v| !in_set[v]).collect())
}
