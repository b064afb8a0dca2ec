//! Relativistic 4-momentum algebra for groups of photons and particles.
//!
//! The invariant mass of a group is `m²c⁴ = ε_tot² − c²|p_tot|²`. Evaluating
//! that difference directly loses every significant digit for nearly
//! collinear photons, so [`invariant_mass`] expands it pairwise:
//!
//! ```text
//! m²c⁴ = Σᵢ mᵢ²c⁴ + 2 Σᵢ<ⱼ [ (εᵢεⱼ − c²|pᵢ||pⱼ|) + c²|pᵢ||pⱼ| |n̂ᵢ − n̂ⱼ|²/2 ]
//! ```
//!
//! which is exact algebra and keeps full relative precision for small
//! opening angles.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::constants::{angular_frequency, C, HBAR};
use crate::error::{Error, Result};

/// Negative radicands above `-RADICAND_CLAMP · ε_tot²` are rounding noise.
pub const RADICAND_CLAMP: f64 = 1e-12;

/// Energy (J) and 3-momentum (kg·m/s) of one particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourMomentum {
    pub energy: f64,
    pub momentum: Vector3<f64>,
}

impl FourMomentum {
    pub fn new(energy: f64, momentum: Vector3<f64>) -> Result<Self> {
        if !(energy >= 0.0) || !momentum.iter().all(|p| p.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "4-momentum needs finite energy ≥ 0, got {energy:e}"
            )));
        }
        Ok(Self { energy, momentum })
    }

    /// Photon of angular frequency `omega` travelling along `direction`.
    ///
    /// `direction` need not be normalized but must be non-zero.
    pub fn photon(omega: f64, direction: Vector3<f64>) -> Result<Self> {
        let norm = direction.norm();
        if !(omega > 0.0) || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput(
                "photon needs ω > 0 and a non-zero direction".into(),
            ));
        }
        let energy = HBAR * omega;
        Ok(Self {
            energy,
            momentum: direction * (energy / (C * norm)),
        })
    }

    /// Rest mass of this single particle (0 for an on-shell photon).
    pub fn mass(&self) -> f64 {
        let cp = C * self.momentum.norm();
        let radicand = (self.energy - cp) * (self.energy + cp);
        radicand.max(0.0).sqrt() / (C * C)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            energy: self.energy + other.energy,
            momentum: self.momentum + other.momentum,
        }
    }
}

/// Two photons of equal frequency `omega` (rad/s) separated by angle `theta` (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonPair {
    omega: f64,
    theta: f64,
}

impl PhotonPair {
    pub fn new(omega: f64, theta: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidInput(format!("ω must be > 0, got {omega}")));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidInput(format!("θ must lie in [0, π], got {theta}")));
        }
        Ok(Self { omega, theta })
    }

    pub fn from_wavelength(lambda: f64, theta: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!("λ must be > 0, got {lambda}")));
        }
        Self::new(angular_frequency(lambda), theta)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Explicit 4-momenta: the first photon along ẑ, the second rotated by θ in the xz-plane.
    pub fn momenta(&self) -> [FourMomentum; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = HBAR * self.omega;
        let p = e / C;
        [
            FourMomentum {
                energy: e,
                momentum: Vector3::new(0.0, 0.0, p),
            },
            FourMomentum {
                energy: e,
                momentum: Vector3::new(p * s, 0.0, p * c),
            },
        ]
    }
}

/// A Gaussian pump pulse of `photon_count` photons at wavelength `lambda_p`
/// focused to waist `w_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpPulse {
    pub lambda_p: f64,
    pub w_p: f64,
    pub photon_count: f64,
}

impl PumpPulse {
    /// Smallest `w_p / λ_p` for which the pulse is treated as weakly diverging.
    pub const PARAXIAL_RATIO: f64 = 10.0;

    pub fn new(lambda_p: f64, w_p: f64) -> Result<Self> {
        Self::with_photons(lambda_p, w_p, 1.0)
    }

    pub fn with_photons(lambda_p: f64, w_p: f64, photon_count: f64) -> Result<Self> {
        if !(lambda_p > 0.0) || !(w_p > 0.0) || !(photon_count > 0.0) {
            return Err(Error::InvalidInput(
                "pump needs λ_p > 0, w_p > 0 and a positive photon count".into(),
            ));
        }
        Ok(Self {
            lambda_p,
            w_p,
            photon_count,
        })
    }

    pub fn omega_p(&self) -> f64 {
        angular_frequency(self.lambda_p)
    }

    /// ε_tot = N ħω_p.
    pub fn total_energy(&self) -> f64 {
        self.photon_count * HBAR * self.omega_p()
    }

    pub fn is_weakly_diverging(&self) -> bool {
        self.w_p / self.lambda_p >= Self::PARAXIAL_RATIO
    }
}

fn total(momenta: &[FourMomentum]) -> FourMomentum {
    momenta.iter().fold(
        FourMomentum {
            energy: 0.0,
            momentum: Vector3::zeros(),
        },
        |acc, p| acc.add(p),
    )
}

/// Mass-shell offsets below this fraction of the energy are rounding noise.
const SHELL_SNAP: f64 = 8.0 * f64::EPSILON;

/// `ε − c|p|`, snapped to zero for on-shell photons.
fn shell_offset(p: &FourMomentum) -> f64 {
    let d = p.energy - C * p.momentum.norm();
    if d.abs() <= SHELL_SNAP * p.energy {
        0.0
    } else {
        d
    }
}

/// m²c⁴ of the group via the pairwise expansion.
///
/// With `εᵢ = c|pᵢ| + dᵢ`, each pair contributes
/// `c|pᵢ|dⱼ + c|pⱼ|dᵢ + dᵢdⱼ + c²|pᵢ||pⱼ||n̂ᵢ − n̂ⱼ|²/2`.
fn mass_energy_squared(momenta: &[FourMomentum]) -> f64 {
    let parts: Vec<(f64, f64, Vector3<f64>)> = momenta
        .iter()
        .map(|p| {
            let norm = p.momentum.norm();
            let dir = if norm > 0.0 {
                p.momentum / norm
            } else {
                Vector3::zeros()
            };
            (C * norm, shell_offset(p), dir)
        })
        .collect();
    let mut sum = 0.0;
    for (i, &(cpi, di, ni)) in parts.iter().enumerate() {
        sum += di * (2.0 * cpi + di);
        for &(cpj, dj, nj) in &parts[i + 1..] {
            let angular = if cpi > 0.0 && cpj > 0.0 {
                0.5 * cpi * cpj * (ni - nj).norm_squared()
            } else {
                0.0
            };
            sum += 2.0 * (cpi * dj + cpj * di + di * dj + angular);
        }
    }
    sum
}

/// Lorentz-invariant mass (kg) of a group of particles.
pub fn invariant_mass(momenta: &[FourMomentum]) -> Result<f64> {
    if momenta.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let energy = total(momenta).energy;
    let radicand = mass_energy_squared(momenta);
    if radicand < 0.0 {
        let ratio = radicand / (energy * energy);
        if ratio < -RADICAND_CLAMP || !ratio.is_finite() {
            return Err(Error::SpacelikeTotal {
                radicand_ratio: ratio,
            });
        }
        return Ok(0.0);
    }
    Ok(radicand.sqrt() / (C * C))
}

/// m(θ) = (2ħω/c²) sin(θ/2) for two photons of equal frequency.
pub fn pair_mass_from_angle(pair: &PhotonPair) -> f64 {
    2.0 * HBAR * pair.omega / (C * C) * (0.5 * pair.theta).sin()
}

/// Maximal two-photon mass 4πħ/(cλ), reached for counter-propagating photons.
pub fn max_pair_mass(lambda: f64) -> f64 {
    4.0 * std::f64::consts::PI * HBAR / (C * lambda)
}

/// Mean speed c·sqrt(1 − m²c⁴/ε²) of a group with total energy `total_energy`.
pub fn mean_velocity(total_energy: f64, mass: f64) -> Result<f64> {
    Ok(C * (1.0 - speed_deficit(total_energy, mass)?))
}

/// 1 − v̄/c, computed without cancellation for nearly luminal groups.
pub fn speed_deficit(total_energy: f64, mass: f64) -> Result<f64> {
    let rest_energy = mass * C * C;
    // A few ulps of excess is rounding in mc² = ε, e.g. back-to-back photons.
    if !(mass >= 0.0) || rest_energy > total_energy * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::MassExceedsEnergy {
            rest_energy,
            total_energy,
        });
    }
    if mass == 0.0 {
        return Ok(0.0);
    }
    let ratio = (rest_energy / total_energy).min(1.0);
    let eps = ratio * ratio;
    // 1 − sqrt(1 − ε) = ε / (1 + sqrt(1 − ε))
    Ok(eps / (1.0 + (1.0 - eps).sqrt()))
}

/// Mean speed from the group's total momentum, c²|p_tot|/ε_tot.
pub fn group_velocity_from_momentum(momenta: &[FourMomentum]) -> Result<f64> {
    if momenta.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let t = total(momenta);
    Ok(C * C * t.momentum.norm() / t.energy)
}

/// Pure (rotation-free) boost of `p` into the frame moving with velocity `beta`·c.
pub fn lorentz_boost(p: &FourMomentum, beta: &Vector3<f64>) -> Result<FourMomentum> {
    let b2 = beta.norm_squared();
    if !(b2 < 1.0) {
        return Err(Error::SuperluminalBoost { beta: b2.sqrt() });
    }
    if b2 == 0.0 {
        return Ok(*p);
    }
    let gamma = 1.0 / (1.0 - b2).sqrt();
    let bp = beta.dot(&p.momentum);
    let energy = gamma * (p.energy - C * bp);
    // (γ − 1)/β² = γ²/(γ + 1)
    let coeff = gamma * gamma / (gamma + 1.0) * bp - gamma * p.energy / C;
    Ok(FourMomentum {
        energy,
        momentum: p.momentum + beta * coeff,
    })
}

pub fn boost_all(momenta: &[FourMomentum], beta: &Vector3<f64>) -> Result<Vec<FourMomentum>> {
    momenta.iter().map(|p| lorentz_boost(p, beta)).collect()
}

/// Velocity β = c·p_tot/ε_tot of the group's rest frame.
pub fn rest_frame_beta(momenta: &[FourMomentum]) -> Result<Vector3<f64>> {
    if invariant_mass(momenta)? == 0.0 {
        return Err(Error::MasslessGroup);
    }
    let t = total(momenta);
    Ok(t.momentum * (C / t.energy))
}

/// ε_tot λ_p/(2πc² w_p): invariant mass of the whole pump pulse.
pub fn pump_mass_total(pulse: &PumpPulse) -> f64 {
    pulse.total_energy() * pulse.lambda_p / (2.0 * std::f64::consts::PI * C * C * pulse.w_p)
}

/// ħ/(c w_p): pump mass per photon.
pub fn pump_mass_per_photon(pulse: &PumpPulse) -> f64 {
    HBAR / (C * pulse.w_p)
}

/// Predicted 1 − v̄/c of a diverging Gaussian pulse, λ_p²/(8π²w_p²).
pub fn pump_speed_deficit_estimate(pulse: &PumpPulse) -> f64 {
    let r = pulse.lambda_p / pulse.w_p;
    r * r / (8.0 * std::f64::consts::PI * std::f64::consts::PI)
}
