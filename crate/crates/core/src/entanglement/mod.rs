//! Transverse entanglement of the biphoton: the widths `a = 1/w_p` and
//! `b = 2π sqrt(n_o/(Lλ_p))` of the sum and difference factors, the
//! width-ratio parameter `R`, asymptotic Schmidt-number estimates, and
//! numerical `R` and `K` from a sampled kernel.
//!
//! Numerical quantities are computed on the one-dimensional `k₁ₓ`, `k₂ₓ`
//! slice. The Gaussian factor separates exactly in x and y; the sinc
//! factor does not, so the slice is an approximation for the SPDC kernel.
//! The two-dimensional Schmidt number of an x/y-separable state would be
//! the square of the slice value; [`EntanglementReport::k_svd_2d`] reports
//! that product under an isotropy assumption.

mod kernel;
mod schmidt;

pub use kernel::{
    DiscretizedKernel, GridSpec, KernelProfile, UniformGrid, DEFAULT_SVD_POINTS, MAX_DENSE_POINTS,
    MAX_LAZY_POINTS,
};
pub use schmidt::{schmidt_number_converged, schmidt_number_svd, schmidt_weights, SchmidtEstimate};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::moments_mass::{diffraction_length, regime, Regime, RegimeThresholds};
use crate::spdc_state::SpdcConfig;

/// `(a, b) = (1/w_p, 2π sqrt(n_o/(Lλ_p)))` (1/m).
pub fn analytic_widths(cfg: &SpdcConfig) -> (f64, f64) {
    (
        1.0 / cfg.w_p(),
        2.0 * PI * (cfg.n_o() / (cfg.length() * cfg.lambda_p())).sqrt(),
    )
}

/// `R = max(a, b)/min(a, b)`.
pub fn r_parameter_analytic(cfg: &SpdcConfig) -> f64 {
    let (a, b) = analytic_widths(cfg);
    a.max(b) / a.min(b)
}

/// Short-crystal form `2πw_p sqrt(n_o/(Lλ_p))` (= b/a).
pub fn k_short_crystal(cfg: &SpdcConfig) -> f64 {
    2.0 * PI * cfg.w_p() * (cfg.n_o() / (cfg.length() * cfg.lambda_p())).sqrt()
}

/// Strong-focusing form `sqrt(L/L_d)`.
pub fn k_strong_focusing(cfg: &SpdcConfig) -> f64 {
    (cfg.length() / diffraction_length(cfg)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub value: f64,
    pub regime: Regime,
    /// Set when neither asymptotic formula applies.
    pub low_confidence: bool,
}

/// Order-of-magnitude Schmidt number from the regime's asymptotic formula.
pub fn k_regime_estimate(cfg: &SpdcConfig, thresholds: &RegimeThresholds) -> KEstimate {
    let regime = regime(cfg, thresholds);
    let (value, low_confidence) = match regime {
        Regime::ShortCrystal => (k_short_crystal(cfg), false),
        Regime::StrongFocusing => (k_strong_focusing(cfg), false),
        Regime::Intermediate => (r_parameter_analytic(cfg).max(1.0), true),
    };
    KEstimate {
        value,
        regime,
        low_confidence,
    }
}

/// How the width of a 1D distribution is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthConvention {
    #[default]
    Rms,
    Fwhm,
}

/// Edge-to-peak density ratio above which a distribution is considered
/// cut off by the grid.
pub const EDGE_TOLERANCE: f64 = 1e-3;

/// Width of a sampled, non-negative distribution on `grid`.
pub fn distribution_width(grid: &UniformGrid, density: &[f64], convention: WidthConvention) -> Result<f64> {
    let peak = density.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::NonNormalizable);
    }
    let edge = density[0].max(density[density.len() - 1]);
    if edge > EDGE_TOLERANCE * peak {
        return Err(Error::WidthHitsBoundary {
            edge_ratio: edge / peak,
        });
    }
    match convention {
        WidthConvention::Rms => {
            let total: f64 = density.iter().sum();
            let mean = density
                .iter()
                .enumerate()
                .map(|(i, p)| grid.at(i) * p)
                .sum::<f64>()
                / total;
            let var = density
                .iter()
                .enumerate()
                .map(|(i, p)| (grid.at(i) - mean).powi(2) * p)
                .sum::<f64>()
                / total;
            Ok(var.sqrt())
        }
        WidthConvention::Fwhm => {
            let half = 0.5 * peak;
            let first = density.iter().position(|&p| p >= half).expect("peak exists");
            let last = density.iter().rposition(|&p| p >= half).expect("peak exists");
            let cross = |inside: usize, outside: usize| {
                let (pi, po) = (density[inside], density[outside]);
                let t = (pi - half) / (pi - po);
                grid.at(inside) + t * (grid.at(outside) - grid.at(inside))
            };
            let left = if first == 0 { grid.at(0) } else { cross(first, first - 1) };
            let right = if last + 1 == density.len() {
                grid.at(last)
            } else {
                cross(last, last + 1)
            };
            Ok(right - left)
        }
    }
}

/// Single-photon (unconditional) density `∑_j |Ψ_ij|²` over the grid.
pub fn marginal_density(kernel: &DiscretizedKernel) -> Vec<f64> {
    (0..kernel.grid().points())
        .into_par_iter()
        .map(|i| {
            kernel
                .row_support(i)
                .map(|j| {
                    let v = kernel.value(i, j);
                    v * v
                })
                .sum()
        })
        .collect()
}

/// Coincidence (conditional) density `|Ψ(k_i, k2_fixed)|²`.
pub fn conditional_density(kernel: &DiscretizedKernel, k2_fixed: f64) -> Vec<f64> {
    let grid = kernel.grid();
    (0..grid.points())
        .map(|i| kernel.profile().value(grid.at(i), k2_fixed).powi(2))
        .collect()
}

/// Width of the single-photon distribution of `k₁ₓ`.
pub fn marginal_width(kernel: &DiscretizedKernel, min_samples: usize, convention: WidthConvention) -> Result<f64> {
    kernel.check_resolution(min_samples)?;
    distribution_width(kernel.grid(), &marginal_density(kernel), convention)
}

/// Width of the `k₁ₓ` distribution with the partner detector held at `k2_fixed`.
pub fn conditional_width(
    kernel: &DiscretizedKernel,
    k2_fixed: f64,
    min_samples: usize,
    convention: WidthConvention,
) -> Result<f64> {
    kernel.check_resolution(min_samples)?;
    distribution_width(kernel.grid(), &conditional_density(kernel, k2_fixed), convention)
}

/// Width-ratio entanglement parameter from a sampled kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RNumeric {
    pub value: f64,
    pub marginal_width: f64,
    pub conditional_width: f64,
    pub points: usize,
    pub convention: WidthConvention,
}

/// `R` as the ratio of single-photon to coincidence widths for any profile.
pub fn r_parameter_numeric_profile(
    profile: KernelProfile,
    grid_spec: &GridSpec,
    k2_fixed: f64,
    convention: WidthConvention,
) -> Result<RNumeric> {
    let grid = grid_spec.grid(&profile)?;
    let kernel = DiscretizedKernel::lazy(profile, grid)?;
    let marginal = marginal_width(&kernel, grid_spec.min_samples, convention)?;
    let conditional = conditional_width(&kernel, k2_fixed, grid_spec.min_samples, convention)?;
    Ok(RNumeric {
        value: marginal / conditional,
        marginal_width: marginal,
        conditional_width: conditional,
        points: grid.points(),
        convention,
    })
}

/// `R` for the SPDC slice, detector held at `k₂ₓ = 0`, rms widths.
pub fn r_parameter_numeric(cfg: &SpdcConfig, grid_spec: &GridSpec) -> Result<RNumeric> {
    r_parameter_numeric_profile(KernelProfile::spdc(cfg), grid_spec, 0.0, WidthConvention::Rms)
}

/// Options for [`entanglement_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementOptions {
    pub grid: GridSpec,
    pub thresholds: RegimeThresholds,
    pub k2_fixed: f64,
    pub convention: WidthConvention,
    pub compute_r_numeric: bool,
    pub compute_svd: bool,
}

impl Default for EntanglementOptions {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            thresholds: RegimeThresholds::default(),
            k2_fixed: 0.0,
            convention: WidthConvention::Rms,
            compute_r_numeric: true,
            compute_svd: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub width_a: f64,
    pub width_b: f64,
    pub r_analytic: f64,
    pub r_numeric: Option<RNumeric>,
    pub k_regime_estimate: KEstimate,
    pub k_svd: Option<SchmidtEstimate>,
    pub regime: Regime,
    /// Reasons a numeric quantity is missing, with remediation hints.
    pub notes: Vec<String>,
}

impl EntanglementReport {
    /// `K_svd²`, the transverse (x and y) Schmidt number if the state
    /// factorized between the two Cartesian components.
    pub fn k_svd_2d(&self) -> Option<f64> {
        self.k_svd.map(|k| k.k * k.k)
    }

    /// `R_numeric / R_analytic`.
    pub fn r_ratio(&self) -> Option<f64> {
        self.r_numeric.map(|r| r.value / self.r_analytic)
    }
}

fn is_grid_limit(e: &Error) -> bool {
    matches!(
        e,
        Error::GridTooCoarse { .. } | Error::WidthHitsBoundary { .. } | Error::NotConverged { .. }
    ) || matches!(e, Error::InvalidInput(msg) if msg.contains("limited to"))
}

/// Full entanglement summary. Grid limitations on the numeric quantities
/// are recorded in `notes`; other failures are returned.
pub fn entanglement_report(cfg: &SpdcConfig, opts: &EntanglementOptions) -> Result<EntanglementReport> {
    let (a, b) = analytic_widths(cfg);
    let k_est = k_regime_estimate(cfg, &opts.thresholds);
    let mut notes = Vec::new();
    let profile = KernelProfile::spdc(cfg);

    let r_numeric = if opts.compute_r_numeric {
        match r_parameter_numeric_profile(profile, &opts.grid, opts.k2_fixed, opts.convention) {
            Ok(r) => Some(r),
            Err(e) if is_grid_limit(&e) => {
                notes.push(format!("R_numeric unavailable: {e}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let k_svd = if opts.compute_svd {
        match schmidt_number_converged(profile, &opts.grid) {
            Ok(k) => Some(k),
            Err(e) if is_grid_limit(&e) => {
                notes.push(format!(
                    "K_svd unavailable: {e} (the slice needs about {} points; raise --max-points or use a smaller R)",
                    opts.grid.resolving_points(&profile)
                ));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    Ok(EntanglementReport {
        width_a: a,
        width_b: b,
        r_analytic: a.max(b) / a.min(b),
        r_numeric,
        k_regime_estimate: k_est,
        k_svd,
        regime: k_est.regime,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> SpdcConfig {
        SpdcConfig::new(1e-6, 1e-3, 1e-3, 1.5).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn widths_reference() {
        let (a, b) = analytic_widths(&reference());
        assert!(rel(a, 1000.0) < 1e-15);
        assert!(rel(b, 2.0 * PI * 1.5e9f64.sqrt()) < 1e-14);
        assert!(rel(b, 2.4335e5) < 1e-4);
    }

    #[test]
    fn equal_widths_give_unit_r() {
        let cfg = reference();
        // a = b when w_p = sqrt(Lλ_p/n_o)/(2π)
        let w = (cfg.length() * cfg.lambda_p() / cfg.n_o()).sqrt() / (2.0 * PI);
        let eq = cfg.with_w_p(w).unwrap();
        let (a, b) = analytic_widths(&eq);
        assert!(rel(a, b) < 1e-14);
        assert!((r_parameter_analytic(&eq) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn r_reference_and_short_crystal_formula() {
        let cfg = reference();
        let r = r_parameter_analytic(&cfg);
        assert!(rel(r, 243.346_720_558_416_7) < 1e-10);
        assert!(rel(r, k_short_crystal(&cfg)) < 1e-14);
    }

    #[test]
    fn regime_estimates() {
        let cfg = reference();
        let t = RegimeThresholds::default();
        let short = k_regime_estimate(&cfg, &t);
        assert_eq!(short.regime, Regime::ShortCrystal);
        assert!(rel(short.value, 243.3467) < 1e-6);

        let strong = cfg.with_length(100.0).unwrap();
        let k = k_regime_estimate(&strong, &t);
        assert_eq!(k.regime, Regime::StrongFocusing);
        assert!(rel(k.value, 10.0) < 1e-12);

        let boundary = cfg.with_length(1.0).unwrap();
        let k = k_regime_estimate(&boundary, &t);
        assert!(k.low_confidence);
        assert_eq!(k.regime, Regime::Intermediate);
    }

    #[test]
    fn fwhm_of_sampled_gaussian() {
        let grid = UniformGrid::new(10.0, 2001).unwrap();
        let sigma: f64 = 1.3;
        let d: Vec<f64> = grid.values().iter().map(|k| (-k * k / (2.0 * sigma * sigma)).exp()).collect();
        let fwhm = distribution_width(&grid, &d, WidthConvention::Fwhm).unwrap();
        let exact = 2.0 * (2.0 * 2f64.ln()).sqrt() * sigma;
        assert!(rel(fwhm, exact) < 1e-4);
        let rms = distribution_width(&grid, &d, WidthConvention::Rms).unwrap();
        assert!(rel(rms, sigma) < 1e-12);
    }

    #[test]
    fn truncated_distribution_rejected() {
        let grid = UniformGrid::new(1.0, 101).unwrap();
        let d = vec![1.0; 101];
        assert!(matches!(
            distribution_width(&grid, &d, WidthConvention::Rms),
            Err(Error::WidthHitsBoundary { .. })
        ));
    }

    /// Closed-form widths of the double-Gaussian `|Ψ|² = exp(−q₊²/a² − q₋²/b²)`:
    /// k₁ = (q₊ + q₋)/2 has variance (a² + b²)/8; at fixed k₂ = 0 the density
    /// is exp(−k₁²(1/a² + 1/b²)) with variance a²b²/(2(a² + b²)).
    fn double_gaussian_widths(a: f64, b: f64) -> (f64, f64) {
        (
            ((a * a + b * b) / 8.0).sqrt(),
            (a * a * b * b / (2.0 * (a * a + b * b))).sqrt(),
        )
    }

    #[test]
    fn double_gaussian_widths_match_closed_form() {
        let (a, b) = (1.0, 7.0);
        let profile = KernelProfile::DoubleGaussian { a, b };
        let spec = GridSpec::default();
        let grid = spec.grid(&profile).unwrap();
        let kernel = DiscretizedKernel::lazy(profile, grid).unwrap();
        let (m, c) = double_gaussian_widths(a, b);
        let mw = marginal_width(&kernel, 8, WidthConvention::Rms).unwrap();
        let cw = conditional_width(&kernel, 0.0, 8, WidthConvention::Rms).unwrap();
        assert!(rel(mw, m) < 1e-6, "{mw} vs {m}");
        assert!(rel(cw, c) < 1e-6, "{cw} vs {c}");
    }

    #[test]
    fn separable_conditional_is_offset_independent() {
        let profile = KernelProfile::DoubleGaussian { a: 2.0, b: 2.0 };
        let spec = GridSpec::default();
        let kernel = DiscretizedKernel::lazy(profile, spec.grid(&profile).unwrap()).unwrap();
        let at0 = conditional_width(&kernel, 0.0, 8, WidthConvention::Rms).unwrap();
        let at1 = conditional_width(&kernel, 1.5, 8, WidthConvention::Rms).unwrap();
        assert!(rel(at0, at1) < 1e-10);
    }

    #[test]
    fn r_numeric_for_separable_surrogate_is_one() {
        let profile = KernelProfile::DoubleGaussian { a: 3.0, b: 3.0 };
        let r = r_parameter_numeric_profile(profile, &GridSpec::default(), 0.0, WidthConvention::Rms).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn r_numeric_for_wide_surrogate() {
        // a/b = 100; closed-form width ratio (a² + b²)/(2ab).
        let (a, b) = (100.0, 1.0);
        let profile = KernelProfile::DoubleGaussian { a, b };
        let r = r_parameter_numeric_profile(profile, &GridSpec::default(), 0.0, WidthConvention::Rms).unwrap();
        let (m, c) = double_gaussian_widths(a, b);
        assert!(rel(r.value, m / c) < 1e-2);
    }

    #[test]
    fn r_numeric_reference_is_order_of_analytic() {
        let cfg = reference();
        let r = r_parameter_numeric(&cfg, &GridSpec::default()).unwrap();
        let ratio = r.value / r_parameter_analytic(&cfg);
        assert!((1.0 / 3.0..3.0).contains(&ratio), "R_numeric = {}", r.value);
    }
}
