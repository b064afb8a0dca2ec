//! Numerical integration: adaptive Gauss–Kronrod on finite and
//! semi-infinite ranges, radial reduction of axially symmetric 2D
//! integrals, and per-period summation of the sinc² family.
//!
//! The sinc² integrands oscillate with period π and decay only
//! algebraically, so they are never handed to the adaptive driver as a
//! whole. [`integrate_periodic`] splits `[0, X]` at the zeros of `sin x`,
//! integrates each period separately and sums the pieces pairwise.

mod gauss_kronrod;
pub mod special;

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

pub use special::{ci, si, sinc};

/// Environment variable that overrides the default relative tolerance.
pub const TOLERANCE_ENV: &str = "BIPHOTON_QUAD_RTOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 10 {
            return Err(Error::InvalidInput(
                "quadrature tolerances must be > 0 and max_subdivisions ≥ 10".into(),
            ));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    /// Defaults, with `rel_tol` taken from [`TOLERANCE_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut spec = Self::default();
        if let Ok(raw) = std::env::var(TOLERANCE_ENV) {
            let tol: f64 = raw.trim().parse().map_err(|_| {
                Error::ConfigInvalid(format!("{TOLERANCE_ENV}={raw:?} is not a number"))
            })?;
            spec = Self::new(tol, spec.abs_tol, spec.max_subdivisions)?;
        }
        Ok(spec)
    }

    pub fn tolerance_for(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

/// Sharp upper limit on the sinc argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    x_max: f64,
}

impl CutoffSpec {
    pub fn new(x_max: f64) -> Result<Self> {
        if !(x_max > 1.0) || !x_max.is_finite() {
            return Err(Error::InvalidInput(format!("cutoff x_max must exceed 1, got {x_max}")));
        }
        Ok(Self { x_max })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }
}

/// A quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Recursive pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        xs.iter().sum()
    } else {
        let (l, r) = xs.split_at(xs.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

/// Adaptive G10K21 quadrature of `f` over `[a, b]`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!("need finite a < b, got [{a}, {b}]")));
    }
    gauss_kronrod::adaptive(&f, a, b, spec)
}

/// ∫ₐ^∞ f(x) dx through `x = a + s·t/(1 − t)`; `scale` sets `s` and should
/// be the width of the integrand's bulk.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if !(scale > 0.0) {
        return Err(Error::InvalidInput(format!("scale must be > 0, got {scale}")));
    }
    let mapped = |t: f64| {
        let one_minus = 1.0 - t;
        let x = a + scale * t / one_minus;
        let jac = scale / (one_minus * one_minus);
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    gauss_kronrod::adaptive(&mapped, 0.0, 1.0, spec)
}

/// `2π ∫₀^∞ g(r²) r dr = π ∫₀^∞ g(u) du` for an axially symmetric,
/// non-oscillatory `g`; `u_scale` is the characteristic width in `u = r²`.
///
/// The integral runs in the dimensionless variable `u / u_scale`, so
/// `spec.abs_tol` applies relative to that scale.
pub fn radial_integral_2d<G: Fn(f64) -> f64>(g: G, u_scale: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let inner = integrate_semi_infinite(|v| g(v * u_scale), 0.0, 1.0, spec)?;
    Ok(Estimate {
        value: PI * u_scale * inner.value,
        error: PI * u_scale * inner.error,
    })
}

/// `π ∫₀^{u_max} g(u) du` for an oscillatory `g` whose sign changes every
/// `u_period`; without `u_max` the range is infinite and `tail(U)` must
/// return `∫_U^∞ g`.
pub fn radial_integral_2d_periodic<G, T>(
    g: G,
    u_period: f64,
    u_max: Option<f64>,
    tail: T,
    spec: &QuadratureSpec,
) -> Result<Estimate>
where
    G: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    if !(u_period > 0.0) {
        return Err(Error::InvalidInput(format!("period must be > 0, got {u_period}")));
    }
    // Work in v = u / period so every block has unit length.
    let scaled = |v: f64| g(v * u_period);
    let est = match u_max {
        Some(u) => integrate_periodic(scaled, 1.0, u / u_period, spec)?,
        None => {
            let blocks = TAIL_START_BLOCKS as f64;
            let mut est = integrate_periodic(scaled, 1.0, blocks, spec)?;
            est.value += tail(blocks * u_period) / u_period;
            est
        }
    };
    Ok(Estimate {
        value: PI * u_period * est.value,
        error: PI * u_period * est.error,
    })
}

/// Periods integrated numerically before the asymptotic sinc² tail takes over.
const TAIL_START_BLOCKS: usize = 200;

/// ∫₀^X f over consecutive blocks of length `period`, summed pairwise.
///
/// Each block is one G10K21 panel when that meets the tolerance, falling
/// back to the adaptive driver otherwise.
pub fn integrate_periodic<F: Fn(f64) -> f64>(
    f: F,
    period: f64,
    x_max: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if !(x_max > 0.0) || !(period > 0.0) {
        return Err(Error::InvalidInput("need x_max > 0 and period > 0".into()));
    }
    let full = (x_max / period).floor() as usize;
    let mut values = Vec::with_capacity(full + 1);
    let mut error = 0.0;
    let mut block = |a: f64, b: f64| -> Result<()> {
        let one = gauss_kronrod::gk21(&f, a, b);
        let est = if one.error <= spec.tolerance_for(one.value) * 1e-2 {
            one
        } else {
            gauss_kronrod::adaptive(&f, a, b, spec)?
        };
        values.push(est.value);
        error += est.error;
        Ok(())
    };
    for k in 0..full {
        block(k as f64 * period, (k + 1) as f64 * period)?;
    }
    let start = full as f64 * period;
    if x_max - start > period * 1e-14 {
        block(start, x_max)?;
    }
    Ok(Estimate {
        value: pairwise_sum(&values),
        error,
    })
}

/// sinc²(x), with the series branch at the origin.
fn sinc_sq(x: f64) -> f64 {
    let s = sinc(x);
    s * s
}

/// x·sinc²(x) = sin²x / x.
fn x_sinc_sq(x: f64) -> f64 {
    x * sinc_sq(x)
}

/// ∫_X^∞ sinc²x dx for X a multiple of π.
fn sinc_sq_tail(x: f64) -> f64 {
    let x2 = x * x;
    (0.5 - (0.25 - 0.75 / x2) / x2) / x
}

/// Periods summed numerically for a cutoff moment; the rest of `[0, X]`
/// is added in closed form. Keeps strongly focused configurations, where
/// `X` reaches 10⁸, at a fixed cost.
pub const SUMMATION_PERIODS: usize = 20_000;

/// ∫_{X0}^{X} x^order sinc²x dx from Si/Ci differences.
fn sinc_moment_remainder(order: MomentOrder, x0: f64, x: f64) -> f64 {
    match order {
        MomentOrder::One => 0.5 * (x / x0).ln() - 0.5 * (special::ci(2.0 * x) - special::ci(2.0 * x0)),
        MomentOrder::Zero => {
            let (s0, s) = (x0.sin(), x.sin());
            special::si(2.0 * x) - special::si(2.0 * x0) - s * s / x + s0 * s0 / x0
        }
    }
}

/// Per-period sum up to `min(X, SUMMATION_PERIODS·π)`, closed-form remainder beyond.
fn cutoff_moment<F: Fn(f64) -> f64>(order: MomentOrder, f: F, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let x0 = SUMMATION_PERIODS as f64 * PI;
    if x <= x0 {
        return integrate_periodic(f, PI, x, spec);
    }
    let est = integrate_periodic(f, PI, x0, spec)?;
    Ok(Estimate {
        value: est.value + sinc_moment_remainder(order, x0, x),
        error: est.error,
    })
}

/// Which sinc² integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentOrder {
    /// ∫ sinc²x dx (converges; π/2 over the half line).
    Zero,
    /// ∫ x sinc²x dx = ∫ sin²x / x dx (diverges logarithmically).
    One,
}

/// A sinc² moment from per-period summation, with the closed-form value
/// and the ½ ln X estimate alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SincMoment {
    pub order: MomentOrder,
    pub x_max: Option<f64>,
    pub value: f64,
    pub error: f64,
    /// Si/Ci closed form of the same truncated integral.
    pub closed_form: f64,
    /// ½ ln(X) for order one (lower limit 1, period-averaged sin²).
    pub log_estimate: Option<f64>,
}

/// ∫₀^X x^order sinc²x dx by per-period summation.
///
/// Beyond [`SUMMATION_PERIODS`] periods the remainder is added in closed form.
/// Order zero without a cutoff integrates the half line, adding the
/// asymptotic tail after 200 periods.
pub fn sinc_sq_moment(order: MomentOrder, cutoff: Option<CutoffSpec>, spec: &QuadratureSpec) -> Result<SincMoment> {
    match (order, cutoff) {
        (MomentOrder::One, None) => Err(Error::MissingCutoff),
        (MomentOrder::One, Some(c)) => {
            let x = c.x_max();
            let est = cutoff_moment(order, x_sinc_sq, x, spec)?;
            Ok(SincMoment {
                order,
                x_max: Some(x),
                value: est.value,
                error: est.error,
                closed_form: special::sin_sq_over_x_integral(x),
                log_estimate: Some(0.5 * x.ln()),
            })
        }
        (MomentOrder::Zero, Some(c)) => {
            let x = c.x_max();
            let est = cutoff_moment(order, sinc_sq, x, spec)?;
            Ok(SincMoment {
                order,
                x_max: Some(x),
                value: est.value,
                error: est.error,
                closed_form: special::sinc_sq_integral(x),
                log_estimate: None,
            })
        }
        (MomentOrder::Zero, None) => {
            let x = TAIL_START_BLOCKS as f64 * PI;
            let est = integrate_periodic(sinc_sq, PI, x, spec)?;
            Ok(SincMoment {
                order,
                x_max: None,
                value: est.value + sinc_sq_tail(x),
                error: est.error,
                closed_form: FRAC_PI_2,
                log_estimate: None,
            })
        }
    }
}

/// `π ∫₀^∞ sinc²(c·u) du = π²/(2c)`: the 2D integral of `sinc²(c r²)`.
pub fn radial_sinc_sq(c: f64, u_max: Option<f64>, spec: &QuadratureSpec) -> Result<Estimate> {
    radial_integral_2d_periodic(
        |u| sinc_sq(c * u),
        PI / c,
        u_max,
        |u| sinc_sq_tail(c * u) / c,
        spec,
    )
}
