//! sinc and the sine/cosine integrals.
//!
//! `Si`/`Ci` back the closed-form route for the truncated sinc² integrals;
//! the production values come from per-period quadrature, and the two are
//! compared in reports and tests.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::constants::EULER_GAMMA;

/// Below this |x| sinc uses its Taylor series.
const SINC_SERIES_LIMIT: f64 = 1e-4;

/// sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_LIMIT {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Switch from power series to continued fraction.
const CISI_SERIES_LIMIT: f64 = 2.0;
const CISI_MAX_ITER: usize = 200;

/// Sine and cosine integrals `(Si(x), Ci(x))` for `x > 0`.
///
/// Power series below 2, otherwise the continued fraction for `E₁(ix)`
/// evaluated with the modified Lentz algorithm.
pub fn sici(x: f64) -> (f64, f64) {
    assert!(x > 0.0, "sici needs x > 0, got {x}");
    if x <= CISI_SERIES_LIMIT {
        sici_series(x)
    } else {
        sici_continued_fraction(x)
    }
}

pub fn si(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let (s, _) = sici(x.abs());
    s.copysign(x)
}

pub fn ci(x: f64) -> f64 {
    sici(x).1
}

fn sici_series(x: f64) -> (f64, f64) {
    // term_k = (−1)^k x^k / k!, split by parity into Si and Ci sums.
    let mut si = 0.0;
    let mut ci = 0.0;
    let mut fact = 1.0;
    let mut k = 1usize;
    let mut power = x;
    loop {
        fact *= k as f64;
        let term = power / (fact * k as f64);
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            si += sign * term;
        } else {
            ci += sign * term;
        }
        if term < f64::EPSILON * 1e-3 * (si.abs() + ci.abs() + 1.0) {
            break;
        }
        k += 1;
        power *= x;
        if k > 200 {
            break;
        }
    }
    (si, EULER_GAMMA + x.ln() + ci)
}

fn sici_continued_fraction(x: f64) -> (f64, f64) {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..CISI_MAX_ITER {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += Complex64::new(2.0, 0.0);
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < f64::EPSILON {
            break;
        }
    }
    let (s, co) = x.sin_cos();
    h *= Complex64::new(co, -s);
    (FRAC_PI_2 + h.im, -h.re)
}

/// ∫₀^X sin²x/x dx = (ln 2X + γ − Ci(2X))/2.
pub fn sin_sq_over_x_integral(x_max: f64) -> f64 {
    let z = 2.0 * x_max;
    if z < 1e-3 {
        // Cin(z) = z²/4 − z⁴/96 + …
        let z2 = z * z;
        return 0.5 * (z2 / 4.0 - z2 * z2 / 96.0);
    }
    0.5 * (z.ln() + EULER_GAMMA - ci(z))
}

/// ∫₀^X sinc²x dx = Si(2X) − sin²X / X.
pub fn sinc_sq_integral(x_max: f64) -> f64 {
    let s = x_max.sin();
    si(2.0 * x_max) - s * s / x_max
}
