//! Relativistic electron scattering off a rectangular potential step in a
//! magnetic field parallel to the beam.
//!
//! All quantities are dimensionless: energies in units of `mc²`, `c = ħ = 1`,
//! lengths in Compton units `ħ/(mc)`. See [`units`] for the conventions.
//!
//! ```
//! use kleinb::{amplitudes, current_budget, make_channel, Spin};
//!
//! let params = make_channel(2.0, 6.0, 0.2, Spin::Up, 1).unwrap();
//! let amps = amplitudes(&params).unwrap();
//! assert!(amps.r_flip.norm() > 0.0);
//! assert!((current_budget(&params).unwrap().sum() - 1.0).abs() < 1e-12);
//! ```

pub mod filter;
pub mod gridfile;
pub mod landau;
pub mod quadrature;
pub mod sampling;
pub mod scattering;
pub mod selftest;
pub mod units;
pub mod wavefield;

pub use landau::{eval_oscillator, level_energy, momentum_left, momentum_right};
pub use scattering::{
    amplitudes, current_budget, general_amplitudes, h0_amplitudes, kinematic_factor, klein_limit,
    solve_boundary_system, CurrentBudget, KinematicFactor, KleinLimit, ScatterAmplitudes,
    ScatterError,
};
pub use units::{
    make_channel, ChannelError, ChannelParams, FieldStrength, IncomingState, Regime, Spin,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/units.md")]
    pub struct Units;
    #[doc = include_str!("../../../book/src/landau.md")]
    pub struct Landau;
    #[doc = include_str!("../../../book/src/amplitudes.md")]
    pub struct Amplitudes;
    #[doc = include_str!("../../../book/src/conservation.md")]
    pub struct Conservation;
    #[doc = include_str!("../../../book/src/klein.md")]
    pub struct Klein;
    #[doc = include_str!("../../../book/src/wavefield.md")]
    pub struct Wavefield;
    #[doc = include_str!("../../../book/src/spin_filter.md")]
    pub struct SpinFilter;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
