//! Blue-noise sampling of signals on undirected weighted graphs.
//!
//! The crate covers the full pipeline: graph construction and generators,
//! Laplacian spectral analysis (GFT, bandlimited signal models), sampling-
//! set construction (white noise, void-and-cluster relocation, greedy
//! spectral baselines), vertex-domain and spectral pattern metrics, and
//! least-squares reconstruction of bandlimited signals from samples.
//!
//! Conventions used throughout:
//! - edge weights are path lengths (larger weight = farther apart);
//! - node indices are 0-based, including in file formats;
//! - eigenvalues are sorted ascending and referred to by 1-based rank ℓ in
//!   formulas, so `μ_ℓ` lives at array index ℓ−1.

pub mod error;
pub mod gen;
pub mod graph;
pub mod metrics;
pub mod reconstruct;
pub mod samplers;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{DistanceMatrix, Graph, SamplingPattern};
pub use spectral::SpectralBasis;

/// Stable seed derivation for independent per-task random streams: mixing
/// is splitmix64-based so results do not depend on platform or library
/// hash implementations. Adding a new label never perturbs the streams of
/// existing ones.
pub fn derive_seed(base: u64, label: &str, m: usize, trial: usize) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let mut h = splitmix(base);
    for &b in label.as_bytes() {
        h = splitmix(h ^ u64::from(b));
    }
    h = splitmix(h ^ (m as u64));
    splitmix(h ^ (trial as u64))
}
