//! Modelling and analysis of two-photon (Hong-Ou-Mandel) interference between
//! two independent, electrically tunable quantum-dot emitters.
//!
//! Units are fixed across the crate: energies in µeV, times in ps, electric
//! fields in kV·cm⁻¹. The only conversion constant is [`constants::HBAR_UEV_PS`].
//!
//! Module map:
//!
//! - [`lineshape`]: Lorentzian, Gaussian and Voigt profiles, width/time conversions.
//! - [`stark`]: parabolic field-to-energy map and the inverse tuning solve.
//! - [`correlation`]: ideal and detector-convolved g²(τ), auto and HOM cross.
//! - [`visibility`]: visibility traces, post-selected visibility, detuning sweeps.
//! - [`fitting`]: damped least-squares fits of spectra, g² histograms and peaks.
//! - [`synthdata`]: seeded Monte Carlo coincidence histograms and noisy spectra.
//! - [`io`] and [`config`]: CSV formats and the JSON experiment description.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod constants;
pub mod correlation;
mod error;
mod faddeeva;
pub mod fitting;
pub mod io;
pub mod lineshape;
pub mod stark;
pub mod synthdata;
pub mod visibility;

pub use error::{Error, Result};
