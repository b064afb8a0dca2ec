//! Schmidt number of a sampled kernel.
//!
//! With `M_ij = Ψ(k_i, k_j)·Δk` normalized so that `∑ M_ij² = 1`, the
//! singular values `σ_n` of `M` give the Schmidt weights `λ_n = σ_n²` and
//! `K = 1/∑ λ_n²`.
//!
//! SPDC kernels are symmetric under exchange `k₁ ↔ k₂` and under the mirror
//! `k → −k`. On a mirror-exact grid the matrix then splits into even and
//! odd blocks of half the size, and its singular values are the absolute
//! eigenvalues of those symmetric blocks. Kernels without both symmetries
//! go through a general SVD.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::kernel::{DiscretizedKernel, GridSpec, KernelProfile, UniformGrid, DEFAULT_SVD_POINTS};
use crate::error::{Error, Result};

/// Schmidt weights of a dense kernel, largest first, summing to one.
pub fn schmidt_weights(kernel: &DiscretizedKernel) -> Result<Vec<f64>> {
    let m = kernel.matrix().ok_or_else(|| {
        Error::InvalidInput("Schmidt decomposition needs a dense kernel".into())
    })?;
    let norm_sq = m.norm_squared();
    if !(norm_sq > 0.0) || !norm_sq.is_finite() {
        return Err(Error::NonNormalizable);
    }
    let scaled = m / norm_sq.sqrt();
    let mut weights: Vec<f64> = singular_values(&scaled).iter().map(|s| s * s).collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    Ok(weights)
}

/// Relative tolerance on the exchange and mirror symmetries for the
/// parity-split route.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let peak = m.amax();
    let mirror = |i: usize| n - 1 - i;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let v = m[(i, j)];
            worst = worst.max((v - m[(j, i)]).abs()).max((v - m[(mirror(i), mirror(j))]).abs());
        }
    }
    if n < 4 || worst > SYMMETRY_TOLERANCE * peak {
        return m.singular_values().iter().copied().collect();
    }
    let (even, odd) = parity_blocks(m);
    let mut sv: Vec<f64> = even.symmetric_eigenvalues().iter().map(|e| e.abs()).collect();
    sv.extend(odd.symmetric_eigenvalues().iter().map(|e| e.abs()));
    sv
}

/// `M` in the basis `(e_i ± e_{n−1−i})/√2`, plus `e_c` for odd `n`.
fn parity_blocks(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let h = n / 2;
    let centre = n % 2 == 1;
    let r = |i: usize| n - 1 - i;
    let mut even = DMatrix::from_fn(h, h, |i, j| 0.5 * (m[(i, j)] + m[(i, r(j))] + m[(r(i), j)] + m[(r(i), r(j))]));
    let odd = DMatrix::from_fn(h, h, |i, j| 0.5 * (m[(i, j)] - m[(i, r(j))] - m[(r(i), j)] + m[(r(i), r(j))]));
    if centre {
        let c = h;
        even = even.resize(h + 1, h + 1, 0.0);
        for i in 0..h {
            let v = (m[(i, c)] + m[(r(i), c)]) / std::f64::consts::SQRT_2;
            even[(i, h)] = v;
            even[(h, i)] = v;
        }
        even[(h, h)] = m[(c, c)];
    }
    (even, odd)
}

/// `K = 1/∑λ²` on the kernel's own grid. The uniform `Δk` cancels in the
/// normalization, so the raw samples suffice.
pub fn schmidt_number_svd(kernel: &DiscretizedKernel) -> Result<f64> {
    let weights = schmidt_weights(kernel)?;
    let purity: f64 = weights.iter().map(|l| l * l).sum();
    Ok(1.0 / purity)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtEstimate {
    pub k: f64,
    /// Grid size of the accepted value.
    pub points: usize,
    /// Relative change from the half-size grid.
    pub change: f64,
}

/// Double the grid from the starting size until `K` changes by less than
/// `svd_tolerance`, within `max_svd_points`.
///
/// Sizes that do not resolve the narrow width are skipped; if even the
/// largest allowed size does not, this fails with `GridTooCoarse`.
pub fn schmidt_number_converged(profile: KernelProfile, spec: &GridSpec) -> Result<SchmidtEstimate> {
    let extent = spec.half_extent(&profile);
    let mut points = spec.points.unwrap_or(DEFAULT_SVD_POINTS);
    let needed = spec.resolving_points(&profile);
    while points < needed && points * 2 <= spec.max_svd_points {
        points *= 2;
    }
    let grid = UniformGrid::new(extent, points)?;
    DiscretizedKernel::lazy(profile, grid)?.check_resolution(spec.min_samples)?;
    let first = DiscretizedKernel::dense(profile, grid)?;
    let mut previous = schmidt_number_svd(&first)?;
    loop {
        let next_points = points * 2;
        if next_points > spec.max_svd_points {
            return Err(Error::NotConverged {
                previous,
                latest: previous,
                points,
            });
        }
        let kernel = DiscretizedKernel::dense(profile, UniformGrid::new(extent, next_points)?)?;
        let k = schmidt_number_svd(&kernel)?;
        let change = (k - previous).abs() / k;
        if change < spec.svd_tolerance {
            return Ok(SchmidtEstimate {
                k,
                points: next_points,
                change,
            });
        }
        if next_points * 2 > spec.max_svd_points {
            return Err(Error::NotConverged {
                previous,
                latest: k,
                points,
            });
        }
        previous = k;
        points = next_points;
    }
}
