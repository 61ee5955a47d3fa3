//! Sampling of signals, noise injection and least-squares bandlimited
//! reconstruction `x_rec = U_k (M U_k)† y`.

use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::spectral::SpectralBasis;

/// Relative cutoff under which singular values are treated as zero by the
/// pseudo-inverse, and below which the sampling set counts as
/// rank-deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Restriction `M x`: the entries of `x` at the sampling nodes, ascending.
pub fn sample_signal(x: &DVector<f64>, set: &[usize]) -> Result<DVector<f64>> {
    let mut s: Vec<usize> = set.to_vec();
    s.sort_unstable();
    s.dedup();
    for &v in &s {
        if v >= x.len() {
            return Err(Error::NodeOutOfRange {
                node: v,
                n: x.len(),
            });
        }
    }
    Ok(DVector::from_iterator(s.len(), s.iter().map(|&v| x[v])))
}

/// Adds i.i.d. zero-mean Gaussian noise with per-sample power
/// `σ_n² = (‖y‖²/m) · 10^(−snr_db/10)`.
pub fn add_noise(y: &DVector<f64>, snr_db: f64, seed: u64) -> Result<DVector<f64>> {
    let power = y.norm_squared() / y.len() as f64;
    if power == 0.0 {
        return Err(Error::InvalidParam(
            "SNR undefined for an all-zero sample vector".into(),
        ));
    }
    let sigma = (power * 10f64.powf(-snr_db / 10.0)).sqrt();
    if sigma == 0.0 {
        return Ok(y.clone());
    }
    let normal = Normal::new(0.0, sigma).expect("valid normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(DVector::from_iterator(
        y.len(),
        y.iter().map(|&v| v + normal.sample(&mut rng)),
    ))
}

/// Quality report of one reconstruction.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    /// `‖x_rec − x‖² / n`.
    pub mse: f64,
    /// `‖x_rec − x‖ / ‖x‖`.
    pub relative_error: f64,
    /// k-th singular value of `M U_k`; zero when fewer than k samples.
    pub sigma_min: f64,
    /// True iff `sigma_min` fell below `RANK_TOL · σ_max`.
    pub rank_deficient: bool,
}

/// Conditioning of one sampling set, independent of any reference signal.
#[derive(Debug, Clone, Copy)]
pub struct LsInfo {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rank_deficient: bool,
}

/// Least-squares reconstruction from samples `y` taken on `set`:
/// the minimizer of `‖M z − y‖` over `z ∈ span(U_k)`, computed through the
/// SVD pseudo-inverse with singular values under `RANK_TOL · σ_max`
/// truncated. Rank deficiency is reported, never thrown; the result is then
/// the minimum-norm solution.
pub fn reconstruct_ls(
    basis: &SpectralBasis,
    k: usize,
    set: &[usize],
    y: &DVector<f64>,
) -> Result<(DVector<f64>, LsInfo)> {
    let n = basis.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParam(format!("k={k} out of range 1..={n}")));
    }
    let mut s: Vec<usize> = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    for &v in &s {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
    }
    if y.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            got: y.len(),
        });
    }
    let u_k = basis.u_k(k);
    let a = u_k.select_rows(s.iter());
    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smallest = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let sigma_min = if s.len() < k { 0.0 } else { smallest };
    let tol = RANK_TOL * sigma_max;
    let info = LsInfo {
        sigma_min,
        sigma_max,
        rank_deficient: sigma_min < tol || sigma_max == 0.0,
    };

    let pinv_apply = |rhs: &DVector<f64>| -> DVector<f64> {
        let u = svd.u.as_ref().expect("svd with u");
        let vt = svd.v_t.as_ref().expect("svd with v_t");
        let mut coeffs = DVector::zeros(k);
        for (i, &sv) in svd.singular_values.iter().enumerate() {
            if sv > tol {
                let proj = u.column(i).dot(rhs) / sv;
                coeffs.axpy(proj, &vt.row(i).transpose(), 1.0);
            }
        }
        coeffs
    };
    let mut coeffs = pinv_apply(y);
    // one step of iterative refinement keeps noise-free recovery exact even
    // for poorly conditioned sampling sets
    let residual = y - &a * &coeffs;
    coeffs += pinv_apply(&residual);

    Ok((u_k * coeffs, info))
}

/// Convenience wrapper that also scores the reconstruction against the
/// reference signal.
pub fn reconstruct_with_report(
    basis: &SpectralBasis,
    k: usize,
    set: &[usize],
    y: &DVector<f64>,
    reference: &DVector<f64>,
) -> Result<(DVector<f64>, ReconstructionReport)> {
    let (x_rec, info) = reconstruct_ls(basis, k, set, y)?;
    if reference.len() != basis.n() {
        return Err(Error::DimensionMismatch {
            expected: basis.n(),
            got: reference.len(),
        });
    }
    let report = ReconstructionReport {
        mse: mse(reference, &x_rec)?,
        relative_error: (&x_rec - reference).norm() / reference.norm(),
        sigma_min: info.sigma_min,
        rank_deficient: info.rank_deficient,
    };
    Ok((x_rec, report))
}

/// Mean squared error `‖x_rec − x‖² / n`.
pub fn mse(x: &DVector<f64>, x_rec: &DVector<f64>) -> Result<f64> {
    if x.len() != x_rec.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: x_rec.len(),
        });
    }
    Ok((x_rec - x).norm_squared() / x.len() as f64)
}
