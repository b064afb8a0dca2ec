//! Lorentz-invariant mass and transverse-momentum entanglement of
//! biphoton states from type-I, frequency-degenerate SPDC.
//!
//! The crate is organized bottom-up:
//!
//! * [`kinematics`]: 4-momentum algebra, invariant mass of photon groups,
//!   boosts, rest frames and the Gaussian pump mass.
//! * [`spdc_state`]: the biphoton wave function, its normalization and the
//!   crystal-anisotropy validity check.
//! * [`quadrature`]: adaptive Gauss–Kronrod and per-period summation for
//!   the oscillatory sinc² integrals.
//! * [`moments_mass`]: transverse moments, longitudinal momentum deficit
//!   and biphoton mass.
//! * [`entanglement`]: widths, the R parameter, regime estimates of the
//!   Schmidt number and its SVD evaluation on a sampled kernel.
//! * [`sweep`]: parameter grids and their CSV/JSON tables.
//!
//! ```
//! use biphoton::{moments_mass::{biphoton_mass, Method}, SpdcConfig};
//! use biphoton::quadrature::QuadratureSpec;
//!
//! let cfg = SpdcConfig::new(1e-6, 1e-3, 1e-3, 1.5).unwrap();
//! let m = biphoton_mass(&cfg, Method::AnalyticLog, &QuadratureSpec::default()).unwrap();
//! assert!((m.mass / 1.2736e-37 - 1.0).abs() < 1e-3);
//! ```

pub mod constants;
pub mod entanglement;
pub mod error;
pub mod kinematics;
pub mod moments_mass;
pub mod quadrature;
pub mod spdc_state;
pub mod sweep;

pub use error::{Error, Result};
pub use spdc_state::SpdcConfig;

// Compile and run the guide's code listings as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kinematics.md")]
    mod kinematics {}
    #[doc = include_str!("../../../book/src/spdc-state.md")]
    mod spdc_state {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/moments-and-mass.md")]
    mod moments_and_mass {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
