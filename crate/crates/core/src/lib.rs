//! Radiation of a two-level atom dressed by a strong near-resonant field.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod dipoles;
pub mod dressed;
pub mod ensemble;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod rates;
pub mod spectrum;

pub use dipoles::{
    adiabatic_dipoles, sudden_dipoles_asymptotic, sudden_dipoles_exact, Basis, DipoleComponent,
    DressedDipoles, Element, Regime,
};
pub use dressed::{derive_params, Alpha, DressedParams, SystemConfig};
pub use error::{Error, Result};
pub use spectrum::{Coherence, Line, Part, Phased, SpectralKey, Spectrum};
