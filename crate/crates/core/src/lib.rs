//! Thermodynamic formalism for beta-shifts on a two-sided lattice:
//! certified digit algebra, the shift language, finite-window Gibbs kernels,
//! conformal cocycles, and pressure estimates.

pub mod algebra;
pub mod beta_lang;
pub mod conformal;
pub mod error;
pub mod gibbs;
pub mod oracle;
pub mod parse;
pub mod potential;
pub mod real;
pub mod shift_space;
pub mod thermo;

pub use algebra::BetaNumber;
pub use beta_lang::{DigitStream, Language, Word};
pub use error::{Error, Result};
pub use parse::{parse_beta, parse_potential};
pub use real::Real;

pub type Potential64 = potential::Potential<f64>;
pub type Potential32 = potential::Potential<f32>;
pub type CylinderMeasure64 = thermo::CylinderMeasure<f64>;
pub type CylinderMeasure32 = thermo::CylinderMeasure<f32>;
pub type KernelRow64 = gibbs::KernelRow<f64>;
pub type DecayReport64 = thermo::DecayReport<f64>;
