//! Sampled two-photon kernels on the `k₁ₓ`, `k₂ₓ` slice (y-components zero).
//!
//! A [`DiscretizedKernel`] is either dense (every sample stored, needed for
//! the SVD) or lazy (samples evaluated on demand). Width computations only
//! touch the band of each row where the sum-coordinate Gaussian is
//! representable, which keeps high-R slices that need tens of thousands of
//! grid points tractable without a dense matrix.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::quadrature::sinc;
use crate::spdc_state::SpdcConfig;

/// `exp(−x) < ε²` beyond this `x`: such samples cannot change a sum of
/// squares that includes the peak.
const NEGLIGIBLE_EXPONENT: f64 = 74.0;

/// Largest grid that will be stored densely.
pub const MAX_DENSE_POINTS: usize = 8192;

/// Largest grid handled lazily.
pub const MAX_LAZY_POINTS: usize = 4_000_000;

/// Amplitude shape on the 1D slice, unnormalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelProfile {
    /// `exp(−(k₁ + k₂)² w_p²/2) · sinc(c_s (k₁ − k₂)²)`.
    Spdc { w_p: f64, sinc_coefficient: f64 },
    /// `exp(−(k₁ + k₂)²/(2a²)) · exp(−(k₁ − k₂)²/(2b²))`.
    DoubleGaussian { a: f64, b: f64 },
}

impl KernelProfile {
    pub fn spdc(cfg: &SpdcConfig) -> Self {
        KernelProfile::Spdc {
            w_p: cfg.w_p(),
            sinc_coefficient: cfg.sinc_coefficient(),
        }
    }

    /// The SPDC slice with its sinc replaced by a Gaussian of the same width `b`.
    pub fn double_gaussian_surrogate(cfg: &SpdcConfig) -> Self {
        let (a, b) = super::analytic_widths(cfg);
        KernelProfile::DoubleGaussian { a, b }
    }

    /// Widths `(a, b)` of the sum and difference factors.
    pub fn widths(&self) -> (f64, f64) {
        match *self {
            KernelProfile::Spdc {
                w_p,
                sinc_coefficient,
            } => (1.0 / w_p, (PI / (2.0 * sinc_coefficient)).sqrt()),
            KernelProfile::DoubleGaussian { a, b } => (a, b),
        }
    }

    pub fn value(&self, k1: f64, k2: f64) -> f64 {
        let s = k1 + k2;
        let d = k1 - k2;
        match *self {
            KernelProfile::Spdc {
                w_p,
                sinc_coefficient,
            } => (-0.5 * s * s * w_p * w_p).exp() * sinc(sinc_coefficient * d * d),
            KernelProfile::DoubleGaussian { a, b } => {
                (-0.5 * (s * s / (a * a) + d * d / (b * b))).exp()
            }
        }
    }

    /// Half-widths in `k₁ + k₂` and `k₁ − k₂` beyond which `value²` is
    /// negligible against the peak;
    /// `None` for factors with algebraic tails.
    fn squared_support(&self) -> (Option<f64>, Option<f64>) {
        match *self {
            KernelProfile::Spdc { w_p, .. } => (Some(NEGLIGIBLE_EXPONENT.sqrt() / w_p), None),
            KernelProfile::DoubleGaussian { a, b } => {
                (Some(NEGLIGIBLE_EXPONENT.sqrt() * a), Some(NEGLIGIBLE_EXPONENT.sqrt() * b))
            }
        }
    }
}

/// Symmetric uniform grid `k_i = −E + iΔ`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    half_extent: f64,
    points: usize,
}

impl UniformGrid {
    pub fn new(half_extent: f64, points: usize) -> Result<Self> {
        if !(half_extent > 0.0) || points < 3 {
            return Err(Error::InvalidInput(format!(
                "grid needs a positive extent and ≥ 3 points, got ±{half_extent:e} with {points}"
            )));
        }
        Ok(Self {
            half_extent,
            points,
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_extent / (self.points - 1) as f64
    }

    pub fn at(&self, i: usize) -> f64 {
        // Mirror-exact: at(i) == −at(n − 1 − i).
        let centered = i as f64 - 0.5 * (self.points - 1) as f64;
        centered * self.step()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.at(i)).collect()
    }

    /// Index range of nodes within `[lo, hi]`.
    fn index_range(&self, lo: f64, hi: f64) -> Range<usize> {
        let to_index = |k: f64| (k + self.half_extent) / self.step();
        let start = to_index(lo).floor().max(0.0) as usize;
        let end = (to_index(hi).ceil() as isize + 1).clamp(0, self.points as isize) as usize;
        start.min(end)..end
    }
}

/// How a kernel grid is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Half-extent in units of `max(a, b)`.
    pub extent_factor: f64,
    /// Starting point count; `None` picks the smallest count that resolves
    /// the narrow width.
    pub points: Option<usize>,
    /// Required samples across `min(a, b)`.
    pub min_samples: usize,
    /// Upper limit for the grid-doubling Schmidt-number search.
    pub max_svd_points: usize,
    /// Relative change under grid doubling accepted as converged.
    pub svd_tolerance: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            extent_factor: 6.0,
            points: None,
            min_samples: 8,
            max_svd_points: 4096,
            svd_tolerance: 0.01,
        }
    }
}

/// Default starting size of the grid-doubling Schmidt search.
pub const DEFAULT_SVD_POINTS: usize = 512;

impl GridSpec {
    pub fn half_extent(&self, profile: &KernelProfile) -> f64 {
        let (a, b) = profile.widths();
        self.extent_factor * a.max(b)
    }

    /// Smallest point count meeting the resolution requirement.
    pub fn resolving_points(&self, profile: &KernelProfile) -> usize {
        let (a, b) = profile.widths();
        let needed_step = a.min(b) / self.min_samples as f64;
        let n = (2.0 * self.half_extent(profile) / needed_step).ceil() as usize + 1;
        n | 1
    }

    pub fn grid(&self, profile: &KernelProfile) -> Result<UniformGrid> {
        let points = self.points.unwrap_or_else(|| self.resolving_points(profile));
        UniformGrid::new(self.half_extent(profile), points)
    }
}

/// Kernel samples `Ψ(k_i, k_j)` on a uniform grid.
#[derive(Debug, Clone)]
pub struct DiscretizedKernel {
    profile: KernelProfile,
    grid: UniformGrid,
    values: Option<DMatrix<f64>>,
}

impl DiscretizedKernel {
    /// Materialize every sample.
    pub fn dense(profile: KernelProfile, grid: UniformGrid) -> Result<Self> {
        let n = grid.points();
        if n > MAX_DENSE_POINTS {
            return Err(Error::InvalidInput(format!(
                "dense kernel limited to {MAX_DENSE_POINTS} points, asked for {n}"
            )));
        }
        let ks = grid.values();
        let cols: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|j| {
                let kj = ks[j];
                ks.iter().map(move |&ki| profile.value(ki, kj)).collect::<Vec<_>>()
            })
            .collect();
        Ok(Self {
            profile,
            grid,
            values: Some(DMatrix::from_vec(n, n, cols)),
        })
    }

    /// Evaluate samples on demand.
    pub fn lazy(profile: KernelProfile, grid: UniformGrid) -> Result<Self> {
        if grid.points() > MAX_LAZY_POINTS {
            return Err(Error::InvalidInput(format!(
                "kernel grid limited to {MAX_LAZY_POINTS} points, asked for {}",
                grid.points()
            )));
        }
        Ok(Self {
            profile,
            grid,
            values: None,
        })
    }

    pub fn profile(&self) -> &KernelProfile {
        &self.profile
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        self.values.as_ref()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        match &self.values {
            Some(m) => m[(i, j)],
            None => self.profile.value(self.grid.at(i), self.grid.at(j)),
        }
    }

    /// Column indices of row `i` where `value²` can be non-zero.
    pub fn row_support(&self, i: usize) -> Range<usize> {
        let k1 = self.grid.at(i);
        let e = self.grid.half_extent();
        let (sum, diff) = self.profile.squared_support();
        let mut lo = -e;
        let mut hi = e;
        if let Some(s) = sum {
            lo = lo.max(-k1 - s);
            hi = hi.min(-k1 + s);
        }
        if let Some(d) = diff {
            lo = lo.max(k1 - d);
            hi = hi.min(k1 + d);
        }
        if lo > hi {
            return 0..0;
        }
        self.grid.index_range(lo, hi)
    }

    /// `max |Ψ_ij − Ψ_ji|` relative to the largest sample (dense kernels).
    pub fn asymmetry(&self) -> Option<f64> {
        let m = self.values.as_ref()?;
        let peak = m.amax();
        let diff = (m - m.transpose()).amax();
        Some(if peak > 0.0 { diff / peak } else { 0.0 })
    }

    /// Check the grid resolves the narrow width with `min_samples` points.
    pub fn check_resolution(&self, min_samples: usize) -> Result<()> {
        let (a, b) = self.profile.widths();
        let width = a.min(b);
        let spacing = self.grid.step();
        let samples = width / spacing;
        // Slack so that the auto-sized grid passes its own test.
        if samples * (1.0 + 1e-9) < min_samples as f64 {
            return Err(Error::GridTooCoarse {
                spacing,
                width,
                samples,
                required: min_samples,
            });
        }
        Ok(())
    }
}
