//! Report structs for each subcommand: JSON via serde, text at 4
//! significant digits.

use std::fmt::Write;

use biphoton::constants::{C, GRAMS_PER_KG, HBAR};
use biphoton::entanglement::{
    entanglement_report, EntanglementOptions, KEstimate, RNumeric, SchmidtEstimate,
};
use biphoton::kinematics::{
    invariant_mass, mean_velocity, pair_mass_from_angle, pump_mass_per_photon, pump_mass_total,
    pump_speed_deficit_estimate, speed_deficit, PhotonPair, PumpPulse,
};
use biphoton::moments_mass::{
    diffraction_length, focusing_dominance_ratio, mass_from_moments, mass_via_schmidt,
    momentum_deficit, q_minus_sq_report, regime, MassResult, Method, QMinusSquared, Regime,
    RegimeThresholds, SchmidtMass,
};
use biphoton::quadrature::QuadratureSpec;
use biphoton::spdc_state::{anisotropy_validity, normalization_constant, AnisotropyCheck};
use biphoton::{Error, SpdcConfig};
use serde::Serialize;

pub trait Render: Serialize {
    fn text(&self) -> String;
    fn warnings(&self) -> Vec<String> {
        Vec::new()
    }
}

fn sig4(v: f64) -> String {
    format!("{v:.3e}")
}

fn line(out: &mut String, label: &str, value: f64, unit: &str) {
    let _ = writeln!(out, "{label:<28} {} {unit}", sig4(value));
}

fn opt_line(out: &mut String, label: &str, value: Option<f64>, unit: &str) {
    match value {
        Some(v) => line(out, label, v, unit),
        None => {
            let _ = writeln!(out, "{label:<28} unavailable");
        }
    }
}

fn config_lines(out: &mut String, cfg: &SpdcConfig) {
    line(out, "lambda_p", cfg.lambda_p(), "m");
    line(out, "w_p", cfg.w_p(), "m");
    line(out, "L", cfg.length(), "m");
    line(out, "n_o", cfg.n_o(), "");
    line(out, "|n_p'|", cfg.n_p_prime_abs(), "");
}

#[derive(Debug, Serialize)]
pub struct PairMassReport {
    pub omega: f64,
    pub lambda: f64,
    pub theta: f64,
    pub mass_kg: f64,
    pub mass_g: f64,
    /// Same mass from the explicit 4-momenta.
    pub mass_four_vector_kg: f64,
    pub max_mass_kg: f64,
    pub mean_velocity: f64,
    pub speed_deficit: f64,
    pub count: f64,
    pub group_mass_kg: f64,
}

impl PairMassReport {
    pub fn compute(omega: f64, theta: f64, count: f64) -> Result<Self, Error> {
        if !(count > 0.0) || !count.is_finite() {
            return Err(Error::InvalidInput(format!("--count must be positive, got {count}")));
        }
        let pair = PhotonPair::new(omega, theta)?;
        let mass = pair_mass_from_angle(&pair);
        let energy = 2.0 * HBAR * omega;
        let lambda = 2.0 * std::f64::consts::PI * C / omega;
        Ok(Self {
            omega,
            lambda,
            theta,
            mass_kg: mass,
            mass_g: mass * GRAMS_PER_KG,
            mass_four_vector_kg: invariant_mass(&pair.momenta())?,
            max_mass_kg: biphoton::kinematics::max_pair_mass(lambda),
            mean_velocity: mean_velocity(energy, mass)?,
            speed_deficit: speed_deficit(energy, mass)?,
            count,
            group_mass_kg: count * mass,
        })
    }
}

impl Render for PairMassReport {
    fn text(&self) -> String {
        let mut s = String::from("two-photon invariant mass\n");
        line(&mut s, "omega", self.omega, "rad/s");
        line(&mut s, "lambda", self.lambda, "m");
        line(&mut s, "theta", self.theta, "rad");
        line(&mut s, "m(theta)", self.mass_kg, "kg");
        line(&mut s, "m(theta)", self.mass_g, "g");
        line(&mut s, "m_max (theta = pi)", self.max_mass_kg, "kg");
        line(&mut s, "mean velocity", self.mean_velocity, "m/s");
        line(&mut s, "1 - v/c", self.speed_deficit, "");
        line(&mut s, "pairs", self.count, "");
        line(&mut s, "group mass", self.group_mass_kg, "kg");
        s
    }
}

#[derive(Debug, Serialize)]
pub struct PumpReport {
    pub pulse: PumpPulse,
    pub mass_total_kg: f64,
    pub mass_per_photon_kg: f64,
    pub mean_velocity: f64,
    pub speed_deficit: f64,
    /// λ_p²/(8π²w_p²).
    pub speed_deficit_estimate: f64,
    pub weakly_diverging: bool,
}

impl PumpReport {
    pub fn compute(lambda_p: f64, w_p: f64, photons: f64) -> Result<Self, Error> {
        let pulse = PumpPulse::with_photons(lambda_p, w_p, photons)?;
        let total = pump_mass_total(&pulse);
        let energy = pulse.total_energy();
        Ok(Self {
            pulse,
            mass_total_kg: total,
            mass_per_photon_kg: pump_mass_per_photon(&pulse),
            mean_velocity: mean_velocity(energy, total)?,
            speed_deficit: speed_deficit(energy, total)?,
            speed_deficit_estimate: pump_speed_deficit_estimate(&pulse),
            weakly_diverging: pulse.is_weakly_diverging(),
        })
    }
}

impl Render for PumpReport {
    fn text(&self) -> String {
        let mut s = String::from("Gaussian pump pulse\n");
        line(&mut s, "lambda_p", self.pulse.lambda_p, "m");
        line(&mut s, "w_p", self.pulse.w_p, "m");
        line(&mut s, "photons", self.pulse.photon_count, "");
        line(&mut s, "mass (pulse)", self.mass_total_kg, "kg");
        line(&mut s, "mass per photon", self.mass_per_photon_kg, "kg");
        line(&mut s, "mean velocity", self.mean_velocity, "m/s");
        line(&mut s, "1 - v/c", self.speed_deficit, "");
        line(&mut s, "1 - v/c (lambda^2/8pi^2w^2)", self.speed_deficit_estimate, "");
        s
    }

    fn warnings(&self) -> Vec<String> {
        if self.weakly_diverging {
            Vec::new()
        } else {
            vec![format!(
                "w_p/lambda_p = {:.3} is below {}: the pulse diverges strongly and the estimate is rough",
                self.pulse.w_p / self.pulse.lambda_p,
                PumpPulse::PARAXIAL_RATIO
            )]
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpdcReport {
    pub config: SpdcConfig,
    pub x_max: f64,
    pub n_norm: f64,
    pub q_plus_sq: f64,
    pub q_minus_sq: QMinusSquared,
    pub delta_p_log: f64,
    pub delta_p_numeric: f64,
    pub mass_log: MassResult,
    pub mass_numeric: MassResult,
    pub l_over_ld: f64,
    /// ⟨q₋²⟩w_p², the weight of the crystal term against the waist term.
    pub focusing_dominance: f64,
    pub regime: Regime,
    pub anisotropy: AnisotropyCheck,
}

impl SpdcReport {
    pub fn compute(cfg: &SpdcConfig, spec: &QuadratureSpec, anisotropy_threshold: f64) -> Result<Self, Error> {
        let anisotropy = anisotropy_validity(cfg, anisotropy_threshold);
        let numeric = momentum_deficit(cfg, Method::NumericExact, spec)?;
        let log = momentum_deficit(cfg, Method::AnalyticLog, spec)?;
        Ok(Self {
            config: *cfg,
            x_max: cfg.x_max(),
            n_norm: normalization_constant(cfg),
            q_plus_sq: numeric.q_plus_sq_mean,
            q_minus_sq: q_minus_sq_report(cfg, spec)?,
            delta_p_log: log.delta_p,
            delta_p_numeric: numeric.delta_p,
            mass_log: mass_from_moments(cfg, &log, anisotropy_threshold),
            mass_numeric: mass_from_moments(cfg, &numeric, anisotropy_threshold),
            l_over_ld: cfg.length() / diffraction_length(cfg),
            focusing_dominance: focusing_dominance_ratio(cfg),
            regime: regime(cfg, &RegimeThresholds::default()),
            anisotropy,
        })
    }
}

impl Render for SpdcReport {
    fn text(&self) -> String {
        let mut s = String::from("SPDC biphoton\n");
        config_lines(&mut s, &self.config);
        line(&mut s, "x_max", self.x_max, "");
        line(&mut s, "N", self.n_norm, "m");
        line(&mut s, "<q+^2>", self.q_plus_sq, "1/m^2");
        line(&mut s, "<q-^2> (log estimate)", self.q_minus_sq.analytic_log, "1/m^2");
        line(&mut s, "<q-^2> (numeric)", self.q_minus_sq.numeric_exact, "1/m^2");
        line(&mut s, "<q-^2> log/numeric", self.q_minus_sq.log_to_numeric_ratio(), "");
        line(&mut s, "<q-^2> 8pi-prefactor/numeric", self.q_minus_sq.prefactor_ratio(), "");
        line(&mut s, "delta_p (log estimate)", self.delta_p_log, "kg m/s");
        line(&mut s, "delta_p (numeric)", self.delta_p_numeric, "kg m/s");
        line(&mut s, "m_biph (log estimate)", self.mass_log.mass, "kg");
        line(&mut s, "m_biph (numeric)", self.mass_numeric.mass, "kg");
        line(&mut s, "L/L_d", self.l_over_ld, "");
        let _ = writeln!(s, "{:<28} {}", "regime", self.regime);
        line(&mut s, "L|n_p'|/w_p", self.anisotropy.ratio, "");
        for w in self.warnings() {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }

    fn warnings(&self) -> Vec<String> {
        self.mass_numeric.validity_flags.iter().map(ToString::to_string).collect()
    }
}

#[derive(Debug, Serialize)]
pub struct EntanglementSummary {
    pub config: SpdcConfig,
    pub a: f64,
    pub b: f64,
    pub r_analytic: f64,
    pub r_numeric: Option<RNumeric>,
    pub k_regime: KEstimate,
    pub k_svd: Option<SchmidtEstimate>,
    /// K_svd², assuming x/y isotropy.
    pub k_svd_2d: Option<f64>,
    pub mass_via_k_regime: SchmidtMass,
    pub mass_via_k_svd: Option<SchmidtMass>,
    /// ħ/(cw_p).
    pub inverse_waist_mass: f64,
    pub regime: Regime,
    pub anisotropy: AnisotropyCheck,
    pub notes: Vec<String>,
}

impl EntanglementSummary {
    pub fn compute(cfg: &SpdcConfig, opts: &EntanglementOptions, anisotropy_threshold: f64) -> Result<Self, Error> {
        let rep = entanglement_report(cfg, opts)?;
        Ok(Self {
            config: *cfg,
            a: rep.width_a,
            b: rep.width_b,
            r_analytic: rep.r_analytic,
            r_numeric: rep.r_numeric,
            k_regime: rep.k_regime_estimate,
            k_svd: rep.k_svd,
            k_svd_2d: rep.k_svd_2d(),
            mass_via_k_regime: mass_via_schmidt(cfg, rep.k_regime_estimate.value)?,
            mass_via_k_svd: rep.k_svd.map(|k| mass_via_schmidt(cfg, k.k.max(1.0))).transpose()?,
            inverse_waist_mass: HBAR / (C * cfg.w_p()),
            regime: rep.regime,
            anisotropy: anisotropy_validity(cfg, anisotropy_threshold),
            notes: rep.notes,
        })
    }
}

impl Render for EntanglementSummary {
    fn text(&self) -> String {
        let mut s = String::from("biphoton entanglement\n");
        config_lines(&mut s, &self.config);
        line(&mut s, "a = 1/w_p", self.a, "1/m");
        line(&mut s, "b", self.b, "1/m");
        line(&mut s, "R_analytic", self.r_analytic, "");
        opt_line(&mut s, "R_numeric", self.r_numeric.map(|r| r.value), "");
        line(&mut s, "K_regime", self.k_regime.value, "");
        opt_line(&mut s, "K_svd (1D slice)", self.k_svd.map(|k| k.k), "");
        opt_line(&mut s, "K_svd^2 (isotropy assumed)", self.k_svd_2d, "");
        line(&mut s, "m via K_regime", self.mass_via_k_regime.full, "kg");
        opt_line(&mut s, "m via K_svd", self.mass_via_k_svd.map(|m| m.full), "kg");
        line(&mut s, "hbar/(c w_p)", self.inverse_waist_mass, "kg");
        let _ = writeln!(s, "{:<28} {}", "regime", self.regime);
        for w in self.warnings() {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }

    fn warnings(&self) -> Vec<String> {
        let mut w = self.notes.clone();
        if self.k_regime.low_confidence {
            w.push(biphoton::moments_mass::ValidityFlag::IntermediateRegime.to_string());
        }
        if !self.anisotropy.valid {
            w.push(
                biphoton::moments_mass::ValidityFlag::Anisotropy {
                    ratio: self.anisotropy.ratio,
                    threshold: self.anisotropy.threshold,
                }
                .to_string(),
            );
        }
        w
    }
}
