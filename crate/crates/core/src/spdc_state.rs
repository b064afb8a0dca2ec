//! SPDC configuration and the biphoton transverse-momentum wave function
//!
//! ```text
//! Ψ(k⊥₁, k⊥₂) = N exp(−(k⊥₁ + k⊥₂)² w_p² / 2) · sinc(c_s (k⊥₁ − k⊥₂)²),   c_s = Lλ_p / (8π n_o)
//! ```
//!
//! for collinear, frequency-degenerate type-I phase matching (both photons
//! at ω_p/2). In the sum/difference coordinates `q± = k⊥₁ ± k⊥₂` the
//! density factorizes into a Gaussian in `q₊` and a sinc² in `q₋`.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

use crate::constants::{angular_frequency, C};
use crate::error::{Error, Result};
use crate::quadrature::{self, sinc, Estimate, QuadratureSpec};

/// Default |dn_p/dϑ|.
pub const DEFAULT_N_P_PRIME_ABS: f64 = 0.1;

/// Default upper bound on `L|n_p′|/w_p`.
pub const DEFAULT_ANISOTROPY_THRESHOLD: f64 = 0.1;

/// Pump and crystal parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpdcConfig {
    lambda_p: f64,
    w_p: f64,
    length: f64,
    n_o: f64,
    n_p_prime_abs: f64,
}

impl SpdcConfig {
    pub fn new(lambda_p: f64, w_p: f64, length: f64, n_o: f64) -> Result<Self> {
        Self::with_anisotropy(lambda_p, w_p, length, n_o, DEFAULT_N_P_PRIME_ABS)
    }

    pub fn with_anisotropy(
        lambda_p: f64,
        w_p: f64,
        length: f64,
        n_o: f64,
        n_p_prime_abs: f64,
    ) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::ConfigInvalid(format!("{name} must be a positive length, got {v}")))
            }
        };
        positive("lambda_p", lambda_p)?;
        positive("w_p", w_p)?;
        positive("L", length)?;
        if !(n_o > 1.0) || !n_o.is_finite() {
            return Err(Error::ConfigInvalid(format!("n_o must exceed 1, got {n_o}")));
        }
        if !(n_p_prime_abs >= 0.0) || !n_p_prime_abs.is_finite() {
            return Err(Error::ConfigInvalid(format!(
                "n_p_prime_abs must be ≥ 0, got {n_p_prime_abs}"
            )));
        }
        let cfg = Self {
            lambda_p,
            w_p,
            length,
            n_o,
            n_p_prime_abs,
        };
        if !(cfg.x_max() > 1.0) {
            return Err(Error::ConfigInvalid(format!(
                "paraxial cutoff x_max = πL/(2n_oλ_p) = {} must exceed 1",
                cfg.x_max()
            )));
        }
        Ok(cfg)
    }

    pub fn lambda_p(&self) -> f64 {
        self.lambda_p
    }
    pub fn w_p(&self) -> f64 {
        self.w_p
    }
    /// Crystal length L.
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn n_o(&self) -> f64 {
        self.n_o
    }
    pub fn n_p_prime_abs(&self) -> f64 {
        self.n_p_prime_abs
    }

    pub fn with_lambda_p(self, v: f64) -> Result<Self> {
        Self::with_anisotropy(v, self.w_p, self.length, self.n_o, self.n_p_prime_abs)
    }
    pub fn with_w_p(self, v: f64) -> Result<Self> {
        Self::with_anisotropy(self.lambda_p, v, self.length, self.n_o, self.n_p_prime_abs)
    }
    pub fn with_length(self, v: f64) -> Result<Self> {
        Self::with_anisotropy(self.lambda_p, self.w_p, v, self.n_o, self.n_p_prime_abs)
    }

    pub fn omega_p(&self) -> f64 {
        angular_frequency(self.lambda_p)
    }

    /// `c_s = Lλ_p/(8π n_o)`, the coefficient of `q₋²` in the sinc argument.
    pub fn sinc_coefficient(&self) -> f64 {
        self.length * self.lambda_p / (8.0 * PI * self.n_o)
    }

    /// Paraxial cutoff on the sinc argument, `c_s (ω_p/c)² = πL/(2n_oλ_p)`.
    pub fn x_max(&self) -> f64 {
        PI * self.length / (2.0 * self.n_o * self.lambda_p)
    }

    /// `|q₋|` at the paraxial cutoff, ω_p/c.
    pub fn q_minus_cutoff(&self) -> f64 {
        self.omega_p() / C
    }
}

/// Sum and difference transverse wave vectors (1/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransversePoint {
    pub q_plus: Vector2<f64>,
    pub q_minus: Vector2<f64>,
}

impl TransversePoint {
    pub fn from_photons(k1: Vector2<f64>, k2: Vector2<f64>) -> Self {
        Self {
            q_plus: k1 + k2,
            q_minus: k1 - k2,
        }
    }

    /// `(k⊥₁, k⊥₂) = ((q₊ + q₋)/2, (q₊ − q₋)/2)`.
    pub fn photons(&self) -> (Vector2<f64>, Vector2<f64>) {
        (
            (self.q_plus + self.q_minus) * 0.5,
            (self.q_plus - self.q_minus) * 0.5,
        )
    }
}

/// `N = (w_p/π²) sqrt(Lλ_p/n_o)`.
pub fn normalization_constant(cfg: &SpdcConfig) -> f64 {
    cfg.w_p / (PI * PI) * (cfg.length * cfg.lambda_p / cfg.n_o).sqrt()
}

/// Normalized biphoton amplitude at transverse wave vectors `k1`, `k2` (1/m).
pub fn amplitude(k1: &Vector2<f64>, k2: &Vector2<f64>, cfg: &SpdcConfig) -> f64 {
    let sum = (k1 + k2).norm_squared();
    let diff = (k1 - k2).norm_squared();
    normalization_constant(cfg)
        * (-0.5 * sum * cfg.w_p * cfg.w_p).exp()
        * sinc(cfg.sinc_coefficient() * diff)
}

/// `|Ψ|²` in `q±` coordinates: `N² exp(−q₊²w_p²) sinc²(c_s q₋²)`.
pub fn density_q(point: &TransversePoint, cfg: &SpdcConfig) -> f64 {
    let n = normalization_constant(cfg);
    let s = sinc(cfg.sinc_coefficient() * point.q_minus.norm_squared());
    n * n * (-point.q_plus.norm_squared() * cfg.w_p * cfg.w_p).exp() * s * s
}

/// `(1/4)∬|Ψ|² d²q₊ d²q₋` by quadrature; 1 for a correctly normalized state.
pub fn normalization_integral(cfg: &SpdcConfig, spec: &QuadratureSpec) -> Result<Estimate> {
    let w2 = cfg.w_p * cfg.w_p;
    let gauss = quadrature::radial_integral_2d(|u| (-u * w2).exp(), 1.0 / w2, spec)?;
    let sinc = quadrature::radial_sinc_sq(cfg.sinc_coefficient(), None, spec)?;
    let n2 = normalization_constant(cfg).powi(2);
    let value = 0.25 * n2 * gauss.value * sinc.value;
    let error = 0.25 * n2 * (gauss.error * sinc.value + sinc.error * gauss.value);
    Ok(Estimate { value, error })
}

/// Size of the neglected anisotropy term, `L|n_p′|/w_p`, against a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyCheck {
    pub ratio: f64,
    pub threshold: f64,
    pub valid: bool,
}

pub fn anisotropy_validity(cfg: &SpdcConfig, threshold: f64) -> AnisotropyCheck {
    let ratio = cfg.length * cfg.n_p_prime_abs / cfg.w_p;
    AnisotropyCheck {
        ratio,
        threshold,
        // Relative slack so that the boundary value itself passes.
        valid: ratio <= threshold * (1.0 + 1e-12),
    }
}

/// Keys of the flat key-value config format.
pub const CONFIG_KEYS: [&str; 5] = ["lambda_p_m", "w_p_m", "L_m", "n_o", "n_p_prime_abs"];

/// Partially specified configuration, merged from a file and CLI flags.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigBuilder {
    pub lambda_p: Option<f64>,
    pub w_p: Option<f64>,
    pub length: Option<f64>,
    pub n_o: Option<f64>,
    pub n_p_prime_abs: Option<f64>,
}

impl ConfigBuilder {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut b = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| {
                    Error::ConfigInvalid(format!("line {}: expected `key = value`", lineno + 1))
                })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::ConfigInvalid(format!(
                    "line {}: value for `{key}` is not a number: {:?}",
                    lineno + 1,
                    value.trim()
                ))
            })?;
            let slot = match key {
                "lambda_p_m" => &mut b.lambda_p,
                "w_p_m" => &mut b.w_p,
                "L_m" => &mut b.length,
                "n_o" => &mut b.n_o,
                "n_p_prime_abs" => &mut b.n_p_prime_abs,
                other => {
                    return Err(Error::ConfigInvalid(format!(
                        "line {}: unknown key `{other}` (expected one of {})",
                        lineno + 1,
                        CONFIG_KEYS.join(", ")
                    )))
                }
            };
            if slot.replace(value).is_some() {
                return Err(Error::ConfigInvalid(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        Ok(b)
    }

    /// Fields set in `other` win.
    pub fn overridden_by(self, other: &ConfigBuilder) -> Self {
        Self {
            lambda_p: other.lambda_p.or(self.lambda_p),
            w_p: other.w_p.or(self.w_p),
            length: other.length.or(self.length),
            n_o: other.n_o.or(self.n_o),
            n_p_prime_abs: other.n_p_prime_abs.or(self.n_p_prime_abs),
        }
    }

    pub fn build(&self) -> Result<SpdcConfig> {
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| Error::MissingKey(key.to_string()));
        SpdcConfig::with_anisotropy(
            need(self.lambda_p, "lambda_p_m")?,
            need(self.w_p, "w_p_m")?,
            need(self.length, "L_m")?,
            need(self.n_o, "n_o")?,
            self.n_p_prime_abs.unwrap_or(DEFAULT_N_P_PRIME_ABS),
        )
    }
}

impl FromStr for SpdcConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConfigBuilder::parse(s)?.build()
    }
}

impl SpdcConfig {
    /// The config in the key-value file format.
    pub fn to_kv_string(&self) -> String {
        format!(
            "lambda_p_m = {:e}\nw_p_m = {:e}\nL_m = {:e}\nn_o = {}\nn_p_prime_abs = {}\n",
            self.lambda_p, self.w_p, self.length, self.n_o, self.n_p_prime_abs
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn reference() -> SpdcConfig {
        SpdcConfig::new(1e-6, 1e-3, 1e-3, 1.5).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn rejects_unphysical_parameters() {
        assert!(SpdcConfig::new(0.0, 1e-3, 1e-3, 1.5).is_err());
        assert!(SpdcConfig::new(1e-6, -1e-3, 1e-3, 1.5).is_err());
        assert!(SpdcConfig::new(1e-6, 1e-3, 1e-3, 1.0).is_err());
        // x_max = πL/(2n_oλ_p) < 1
        assert!(SpdcConfig::new(1e-6, 1e-3, 5e-7, 1.5).is_err());
    }

    #[test]
    fn derived_quantities() {
        let cfg = reference();
        assert!(rel(cfg.x_max(), 1_047.197_551_196_597_7) < 1e-12);
        let via_cutoff = cfg.sinc_coefficient() * cfg.q_minus_cutoff().powi(2);
        assert!(rel(via_cutoff, cfg.x_max()) < 1e-12);
    }

    #[test]
    fn normalization_constant_reference() {
        let n = normalization_constant(&reference());
        let direct = 1e-3 / (PI * PI) * (1e-9f64 / 1.5).sqrt();
        assert!(rel(n, direct) < 1e-14);
        assert!(rel(n, 2.616e-9) < 1e-3);
    }

    #[test]
    fn normalization_closes_analytically() {
        let cfg = reference();
        let n = normalization_constant(&cfg);
        let w2 = cfg.w_p() * cfg.w_p();
        let closure = 0.25 * n * n * (PI / w2) * (PI * PI / (2.0 * cfg.sinc_coefficient()));
        assert!((closure - 1.0).abs() < 1e-10);
    }

    #[test]
    fn normalization_scaling() {
        let cfg = reference();
        let n = normalization_constant(&cfg);
        assert!(rel(normalization_constant(&cfg.with_w_p(2e-3).unwrap()), 2.0 * n) < 1e-14);
        assert!(rel(normalization_constant(&cfg.with_length(4e-3).unwrap()), 2.0 * n) < 1e-14);
    }

    #[test]
    fn normalization_closes_numerically() {
        let est = normalization_integral(&reference(), &QuadratureSpec::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6, "{}", est.value);
    }

    #[test]
    fn amplitude_peak_and_zero() {
        let cfg = reference();
        let zero = Vector2::zeros();
        assert_eq!(amplitude(&zero, &zero, &cfg), normalization_constant(&cfg));
        // c_s |2k|² = π
        let k = (PI / cfg.sinc_coefficient()).sqrt() / 2.0;
        let k1 = Vector2::new(k, 0.0);
        let v = amplitude(&k1, &-k1, &cfg);
        assert!(v.abs() < 1e-15 * normalization_constant(&cfg));
    }

    #[test]
    fn amplitude_exchange_symmetry() {
        let cfg = reference();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let k1 = Vector2::new(rng.gen_range(-3e3..3e3), rng.gen_range(-3e3..3e3));
            let k2 = Vector2::new(rng.gen_range(-3e5..3e5), rng.gen_range(-3e5..3e5));
            assert_eq!(amplitude(&k1, &k2, &cfg), amplitude(&k2, &k1, &cfg));
        }
    }

    #[test]
    fn density_is_amplitude_squared() {
        let cfg = reference();
        let k1 = Vector2::new(700.0, -200.0);
        let k2 = Vector2::new(-900.0, 400.0);
        let a = amplitude(&k1, &k2, &cfg);
        let d = density_q(&TransversePoint::from_photons(k1, k2), &cfg);
        assert!(rel(d, a * a) < 1e-14);
    }

    #[test]
    fn density_factorizes() {
        let cfg = reference();
        let p = TransversePoint {
            q_plus: Vector2::new(800.0, 100.0),
            q_minus: Vector2::new(1e5, -4e4),
        };
        let zero = Vector2::zeros();
        let at = |qp, qm| {
            density_q(
                &TransversePoint {
                    q_plus: qp,
                    q_minus: qm,
                },
                &cfg,
            )
        };
        let lhs = at(p.q_plus, p.q_minus) * at(zero, zero);
        let rhs = at(p.q_plus, zero) * at(zero, p.q_minus);
        assert!(rel(lhs, rhs) < 1e-14);
        assert_eq!(at(zero, zero), normalization_constant(&cfg).powi(2));
    }

    #[test]
    fn transverse_point_round_trip() {
        let k1 = Vector2::new(1.25, -3.5);
        let k2 = Vector2::new(0.5, 2.0);
        let (a, b) = TransversePoint::from_photons(k1, k2).photons();
        assert_eq!((a, b), (k1, k2));
    }

    #[test]
    fn anisotropy_examples() {
        let base = SpdcConfig::with_anisotropy(1e-6, 1e-3, 1e-3, 1.5, 0.1).unwrap();
        let check = anisotropy_validity(&base, DEFAULT_ANISOTROPY_THRESHOLD);
        assert!(rel(check.ratio, 0.1) < 1e-12);
        assert!(check.valid);

        let iso = SpdcConfig::with_anisotropy(1e-6, 1e-3, 1e-3, 1.5, 0.0).unwrap();
        assert_eq!(anisotropy_validity(&iso, 0.1).ratio, 0.0);

        let bad = SpdcConfig::with_anisotropy(1e-6, 1e-4, 1e-2, 1.5, 0.1).unwrap();
        let check = anisotropy_validity(&bad, 0.1);
        assert!(rel(check.ratio, 10.0) < 1e-12);
        assert!(!check.valid);
    }

    #[test]
    fn parses_config_file() {
        let text = "# reference crystal\nlambda_p_m = 1e-6\nw_p_m = 1e-3\nL_m = 1e-3\nn_o = 1.5\n";
        let cfg: SpdcConfig = text.parse().unwrap();
        assert_eq!(cfg, reference());
        let again: SpdcConfig = cfg.to_kv_string().parse().unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn missing_key_is_named() {
        let err = "lambda_p_m = 1e-6\nw_p_m = 1e-3\nn_o = 1.5\n"
            .parse::<SpdcConfig>()
            .unwrap_err();
        assert_eq!(err, Error::MissingKey("L_m".into()));
    }

    #[test]
    fn bad_lines_rejected() {
        assert!(ConfigBuilder::parse("bogus = 1").is_err());
        assert!(ConfigBuilder::parse("n_o = abc").is_err());
        assert!(ConfigBuilder::parse("n_o 1.5").is_err());
        assert!(ConfigBuilder::parse("n_o = 1.5\nn_o = 1.6").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = ConfigBuilder::parse("lambda_p_m = 1e-6\nw_p_m = 1e-3\nL_m = 1e-3\nn_o = 1.5").unwrap();
        let flags = ConfigBuilder {
            w_p: Some(2e-3),
            ..Default::default()
        };
        let cfg = file.overridden_by(&flags).build().unwrap();
        assert_eq!(cfg.w_p(), 2e-3);
        assert_eq!(cfg.length(), 1e-3);
    }
}
