//! Transverse moments, longitudinal momentum deficit and the biphoton
//! Lorentz-invariant mass.
//!
//! In the paraxial approximation the mean longitudinal momentum of a pair is
//! `ħω_p/c − δp` with `δp = (ħc/2ω_p)(⟨q₊²⟩ + ⟨q₋²⟩)`, and since the pair
//! energy is exactly ħω_p the mass follows from
//! `ε² − (cp)² ≈ 2ħω_p·cδp`:
//!
//! ```text
//! m = (ħ/c) sqrt(⟨q₊²⟩ + ⟨q₋²⟩)
//! ```
//!
//! `⟨q₋²⟩` diverges logarithmically without the paraxial cutoff
//! `x_max = πL/(2n_oλ_p)` on the sinc argument. Two evaluations are kept:
//!
//! * [`Method::AnalyticLog`]: `(4πn_o/Lλ_p) ln x_max`, the estimate that
//!   replaces `∫ x sinc²x` by `½ ln x_max`;
//! * [`Method::NumericExact`]: the ratio of the cutoff integrals
//!   `∬ q₋² sinc² / ∬ sinc²`, which reduces to `(1/c_s)·I₁(X)/I₀(X)` with
//!   `Iₙ(X) = ∫₀^X xⁿ sinc²x dx`, evaluated by per-period summation.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::constants::{C, HBAR};
use crate::error::{Error, Result};
use crate::quadrature::{self, CutoffSpec, MomentOrder, QuadratureSpec, SincMoment};
use crate::spdc_state::{anisotropy_validity, SpdcConfig, DEFAULT_ANISOTROPY_THRESHOLD};

/// Largest `cδp/ħω_p` accepted as paraxial.
pub const PARAXIAL_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AnalyticLog,
    NumericExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMethod {
    AnalyticLog,
    NumericExact,
    ViaSchmidt,
}

impl From<Method> for MassMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::AnalyticLog => MassMethod::AnalyticLog,
            Method::NumericExact => MassMethod::NumericExact,
        }
    }
}

/// Conditions under which a result was computed outside its assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidityFlag {
    /// `L|n_p′|/w_p` above threshold: the anisotropy term is not negligible.
    Anisotropy { ratio: f64, threshold: f64 },
    /// `cδp/ħω_p` above [`PARAXIAL_LIMIT`].
    Paraxiality { ratio: f64 },
    /// Neither asymptotic entanglement formula applies.
    IntermediateRegime,
}

impl ValidityFlag {
    pub fn token(&self) -> &'static str {
        match self {
            ValidityFlag::Anisotropy { .. } => "anisotropy",
            ValidityFlag::Paraxiality { .. } => "paraxiality",
            ValidityFlag::IntermediateRegime => "intermediate_regime",
        }
    }
}

impl fmt::Display for ValidityFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidityFlag::Anisotropy { ratio, threshold } => write!(
                f,
                "anisotropy term not negligible: L|n_p'|/w_p = {ratio:.4} exceeds {threshold}"
            ),
            ValidityFlag::Paraxiality { ratio } => write!(
                f,
                "paraxial approximation strained: c·δp/(ħω_p) = {ratio:.3e} exceeds {PARAXIAL_LIMIT}"
            ),
            ValidityFlag::IntermediateRegime => write!(
                f,
                "intermediate regime: L is comparable to the diffraction length, K estimate is low-confidence"
            ),
        }
    }
}

/// `⟨q₊²⟩` (1/m²).
pub fn q_plus_sq_mean(cfg: &SpdcConfig, method: Method, spec: &QuadratureSpec) -> Result<f64> {
    let w2 = cfg.w_p() * cfg.w_p();
    match method {
        Method::AnalyticLog => Ok(1.0 / w2),
        Method::NumericExact => {
            let scale = 1.0 / w2;
            let moment = quadrature::radial_integral_2d(|u| u * (-u * w2).exp(), scale, spec)?;
            let norm = quadrature::radial_integral_2d(|u| (-u * w2).exp(), scale, spec)?;
            Ok(moment.value / norm.value)
        }
    }
}

/// `(4πn_o/Lλ_p) ln(πL/(2n_oλ_p))`.
pub fn q_minus_sq_log_estimate(cfg: &SpdcConfig) -> f64 {
    4.0 * PI * cfg.n_o() / (cfg.length() * cfg.lambda_p()) * cfg.x_max().ln()
}

/// Both evaluations of `⟨q₋²⟩` with the quantities needed to compare them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QMinusSquared {
    /// `(4πn_o/Lλ_p) ln x_max` (1/m²).
    pub analytic_log: f64,
    /// `(1/c_s) I₁/I₀` from per-period summation (1/m²).
    pub numeric_exact: f64,
    pub numeric_error: f64,
    /// Same ratio from the Si/Ci closed forms of `I₀`, `I₁`.
    pub closed_form: f64,
    /// `(8πn_o/Lλ_p) I₁`: the first moment with the `8π` prefactor and no
    /// normalization ratio. Exceeds `numeric_exact` by ≈ π/2.
    pub eight_pi_prefactor: f64,
    pub first_moment: SincMoment,
    pub zeroth_moment: SincMoment,
}

impl QMinusSquared {
    pub fn value(&self, method: Method) -> f64 {
        match method {
            Method::AnalyticLog => self.analytic_log,
            Method::NumericExact => self.numeric_exact,
        }
    }

    /// Log estimate over exact numeric value.
    pub fn log_to_numeric_ratio(&self) -> f64 {
        self.analytic_log / self.numeric_exact
    }

    /// `8π`-prefactor form over exact numeric value.
    pub fn prefactor_ratio(&self) -> f64 {
        self.eight_pi_prefactor / self.numeric_exact
    }
}

pub fn q_minus_sq_report(cfg: &SpdcConfig, spec: &QuadratureSpec) -> Result<QMinusSquared> {
    let cutoff = CutoffSpec::new(cfg.x_max())?;
    let i1 = quadrature::sinc_sq_moment(MomentOrder::One, Some(cutoff), spec)?;
    let i0 = quadrature::sinc_sq_moment(MomentOrder::Zero, Some(cutoff), spec)?;
    let inv_cs = 1.0 / cfg.sinc_coefficient();
    let numeric = inv_cs * i1.value / i0.value;
    let numeric_error = numeric * (i1.error / i1.value + i0.error / i0.value);
    Ok(QMinusSquared {
        analytic_log: q_minus_sq_log_estimate(cfg),
        numeric_exact: numeric,
        numeric_error,
        closed_form: inv_cs * i1.closed_form / i0.closed_form,
        eight_pi_prefactor: inv_cs * i1.value,
        first_moment: i1,
        zeroth_moment: i0,
    })
}

/// `⟨q₋²⟩` (1/m²) by the chosen method.
pub fn q_minus_sq_mean(cfg: &SpdcConfig, method: Method, spec: &QuadratureSpec) -> Result<f64> {
    match method {
        Method::AnalyticLog => Ok(q_minus_sq_log_estimate(cfg)),
        Method::NumericExact => Ok(q_minus_sq_report(cfg, spec)?.numeric_exact),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiphotonMoments {
    pub q_plus_sq_mean: f64,
    pub q_minus_sq_mean: f64,
    /// δp (kg·m/s).
    pub delta_p: f64,
    /// ⟨p_z1 + p_z2⟩ = ħω_p/c − δp (kg·m/s).
    pub mean_longitudinal_momentum: f64,
    pub method: Method,
}

impl BiphotonMoments {
    /// `cδp/ħω_p`.
    pub fn paraxial_ratio(&self, cfg: &SpdcConfig) -> f64 {
        C * self.delta_p / (HBAR * cfg.omega_p())
    }

    pub fn is_paraxial(&self, cfg: &SpdcConfig) -> bool {
        self.paraxial_ratio(cfg) < PARAXIAL_LIMIT
    }
}

/// δp = (ħc/2ω_p)(⟨q₊²⟩ + ⟨q₋²⟩) from given moments.
pub fn deficit_from_moments(cfg: &SpdcConfig, q_plus_sq: f64, q_minus_sq: f64) -> f64 {
    HBAR * C / (2.0 * cfg.omega_p()) * (q_plus_sq + q_minus_sq)
}

/// Moments and momentum deficit. Strained paraxiality is reported through
/// [`BiphotonMoments::is_paraxial`], not as an error.
pub fn momentum_deficit(cfg: &SpdcConfig, method: Method, spec: &QuadratureSpec) -> Result<BiphotonMoments> {
    let qp = q_plus_sq_mean(cfg, method, spec)?;
    let qm = q_minus_sq_mean(cfg, method, spec)?;
    Ok(moments_from(cfg, qp, qm, method))
}

fn moments_from(cfg: &SpdcConfig, qp: f64, qm: f64, method: Method) -> BiphotonMoments {
    let delta_p = deficit_from_moments(cfg, qp, qm);
    BiphotonMoments {
        q_plus_sq_mean: qp,
        q_minus_sq_mean: qm,
        delta_p,
        mean_longitudinal_momentum: HBAR * cfg.omega_p() / C - delta_p,
        method,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassResult {
    /// Mass from the linearized difference `ε² − (cp)² ≈ 2ħω_p·cδp` (kg).
    pub mass: f64,
    /// Mass from the unexpanded `ε² − (ħω_p − cδp)²` (kg); absent for
    /// [`MassMethod::ViaSchmidt`].
    pub mass_exact_square: Option<f64>,
    pub method: MassMethod,
    pub validity_flags: Vec<ValidityFlag>,
}

impl MassResult {
    /// Relative size of the dropped `(cδp)²` term.
    pub fn linearization_gap(&self) -> Option<f64> {
        self.mass_exact_square.map(|m| (self.mass - m) / self.mass)
    }
}

/// Mass from a set of moments.
pub fn mass_from_moments(cfg: &SpdcConfig, moments: &BiphotonMoments, anisotropy_threshold: f64) -> MassResult {
    let energy = HBAR * cfg.omega_p();
    let c_dp = C * moments.delta_p;
    let linear = (2.0 * energy * c_dp).sqrt() / (C * C);
    let exact = (c_dp * (2.0 * energy - c_dp)).max(0.0).sqrt() / (C * C);
    let mut flags = Vec::new();
    let aniso = anisotropy_validity(cfg, anisotropy_threshold);
    if !aniso.valid {
        flags.push(ValidityFlag::Anisotropy {
            ratio: aniso.ratio,
            threshold: aniso.threshold,
        });
    }
    if !moments.is_paraxial(cfg) {
        flags.push(ValidityFlag::Paraxiality {
            ratio: moments.paraxial_ratio(cfg),
        });
    }
    MassResult {
        mass: linear,
        mass_exact_square: Some(exact),
        method: moments.method.into(),
        validity_flags: flags,
    }
}

/// Biphoton Lorentz-invariant mass per pair, default anisotropy threshold.
pub fn biphoton_mass(cfg: &SpdcConfig, method: Method, spec: &QuadratureSpec) -> Result<MassResult> {
    biphoton_mass_checked(cfg, method, spec, DEFAULT_ANISOTROPY_THRESHOLD)
}

pub fn biphoton_mass_checked(
    cfg: &SpdcConfig,
    method: Method,
    spec: &QuadratureSpec,
    anisotropy_threshold: f64,
) -> Result<MassResult> {
    let moments = momentum_deficit(cfg, method, spec)?;
    Ok(mass_from_moments(cfg, &moments, anisotropy_threshold))
}

/// `(ħ/c) sqrt(1/w_p² + (4πn_o/Lλ_p) ln x_max)` in closed form.
pub fn biphoton_mass_log_formula(cfg: &SpdcConfig) -> f64 {
    HBAR / C * (1.0 / (cfg.w_p() * cfg.w_p()) + q_minus_sq_log_estimate(cfg)).sqrt()
}

/// Mass written through the Schmidt number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtMass {
    pub k: f64,
    /// `(ħ/cw_p) sqrt(1 + (K²/π) ln x_max)`.
    pub full: f64,
    /// Large-K limit of `full`: `(ħK/cw_p) sqrt(ln x_max / π)`.
    pub large_k: f64,
    /// `(ħK/2cw_p) sqrt(ln x_max / π)`, exactly half of `large_k`.
    pub large_k_halved: f64,
}

impl SchmidtMass {
    pub fn as_result(&self, cfg: &SpdcConfig, anisotropy_threshold: f64) -> MassResult {
        let aniso = anisotropy_validity(cfg, anisotropy_threshold);
        let validity_flags = if aniso.valid {
            Vec::new()
        } else {
            vec![ValidityFlag::Anisotropy {
                ratio: aniso.ratio,
                threshold: aniso.threshold,
            }]
        };
        MassResult {
            mass: self.full,
            mass_exact_square: None,
            method: MassMethod::ViaSchmidt,
            validity_flags,
        }
    }
}

pub fn mass_via_schmidt(cfg: &SpdcConfig, k: f64) -> Result<SchmidtMass> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::InvalidInput(format!("Schmidt number must be ≥ 1, got {k}")));
    }
    let scale = HBAR / (C * cfg.w_p());
    let log = cfg.x_max().ln();
    let large_k = scale * k * (log / PI).sqrt();
    Ok(SchmidtMass {
        k,
        full: scale * (1.0 + k * k / PI * log).sqrt(),
        large_k,
        large_k_halved: 0.5 * large_k,
    })
}

/// Ratio of the `⟨q₋²⟩` term to the `1/w_p²` term in the mass,
/// `4πn_o ln(x_max)·L_d/L`.
pub fn focusing_dominance_ratio(cfg: &SpdcConfig) -> f64 {
    q_minus_sq_log_estimate(cfg) * cfg.w_p() * cfg.w_p()
}

/// `L_d = w_p²/λ_p`.
pub fn diffraction_length(cfg: &SpdcConfig) -> f64 {
    cfg.w_p() * cfg.w_p() / cfg.lambda_p()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ShortCrystal,
    Intermediate,
    StrongFocusing,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::ShortCrystal => "short_crystal",
            Regime::Intermediate => "intermediate",
            Regime::StrongFocusing => "strong_focusing",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "short_crystal" => Ok(Regime::ShortCrystal),
            "intermediate" => Ok(Regime::Intermediate),
            "strong_focusing" => Ok(Regime::StrongFocusing),
            other => Err(Error::InvalidInput(format!("unknown regime `{other}`"))),
        }
    }
}

/// `L/L_d` bounds of the asymptotic regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// Short crystal when `L ≤ short_max · L_d`.
    pub short_max: f64,
    /// Strong focusing when `L ≥ strong_min · L_d`.
    pub strong_min: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            short_max: 0.1,
            strong_min: 10.0,
        }
    }
}

pub fn regime(cfg: &SpdcConfig, thresholds: &RegimeThresholds) -> Regime {
    let ratio = cfg.length() / diffraction_length(cfg);
    // Relative slack keeps exact boundary ratios on the asymptotic side.
    let slack = 1.0 + 1e-12;
    if ratio <= thresholds.short_max * slack {
        Regime::ShortCrystal
    } else if ratio * slack >= thresholds.strong_min {
        Regime::StrongFocusing
    } else {
        Regime::Intermediate
    }
}
