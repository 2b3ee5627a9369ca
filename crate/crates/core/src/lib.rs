//! Bohmian velocity inside square tunnelling barriers, in the time domain.
//!
//! A flat-top pulse is launched at a barrier and evolved with a Strang
//! split-step Fourier integrator. Density, current, Bohmian velocity and
//! the quantum potential are sampled at probe positions inside the barrier,
//! and compared against closed-form stationary states.
//!
//! Internal units are μm, ns and meV throughout, so speeds come out in
//! μm/ns = km/s and rates in ns⁻¹ = GHz.
//!
//! ```
//! use bohm_tunnel::analytic::{classify, steady_velocity};
//! use bohm_tunnel::config::{BarrierWidth, PhysicalConstants};
//!
//! let c = PhysicalConstants::standard();
//! let above = classify(0.638, 0.538, &c).unwrap();
//! let v = steady_velocity(50.0, &above, BarrierWidth::SemiInfinite).unwrap();
//! assert!((v - 2147.0).abs() < 1.0);
//! ```

pub mod analytic;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod grid;
pub mod observables;
pub mod presets;
pub mod propagator;
pub mod pulse;
pub mod units;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/units.md")]
    mod units {}
    #[doc = include_str!("../../../book/src/stationary.md")]
    mod stationary {}
    #[doc = include_str!("../../../book/src/propagation.md")]
    mod propagation {}
    #[doc = include_str!("../../../book/src/observables.md")]
    mod observables {}
    #[doc = include_str!("../../../book/src/coupled.md")]
    mod coupled {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
