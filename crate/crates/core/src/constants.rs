//! Physical constants (SI, CODATA 2018 exact/recommended values).

/// Reduced Planck constant ħ (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum (m/s), exact.
pub const C: f64 = 2.997_924_58e8;

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Grams per kilogram, for reporting masses in CGS.
pub const GRAMS_PER_KG: f64 = 1.0e3;

/// Angular frequency ω = 2πc/λ of light with vacuum wavelength `lambda` (m).
pub fn angular_frequency(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_of_one_micron() {
        let omega = angular_frequency(1e-6);
        assert!((omega - 1.883_651_567_308_853e15).abs() / omega < 1e-14);
    }

    #[test]
    fn euler_gamma_digits() {
        // γ = 0.5772156649015328606...
        assert!((EULER_GAMMA - 0.577_215_664_901_532_860_6).abs() < 1e-16);
    }
}
