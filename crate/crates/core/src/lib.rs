//! Coincidence-rate models for standard and modified Hong-Ou-Mandel
//! interferometers driven by bi-photon (BP) or coherent-pulse (CP) light.
//!
//! Units are whatever the caller chooses, provided frequencies are angular
//! and delays are their reciprocal; the CLI works with `ΔΩ₋ = 1`, `c = 1`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod amp_serde;
pub mod error;
pub mod network;
pub mod qps;
pub mod rates;
pub mod sensing;
pub mod spectra;

pub use error::{Error, RegimeViolation, Result};
pub use network::{hom_network, mhom_network, OpticalElement, OpticalNetwork, TransferMatrix};
pub use num_complex::Complex64;
pub use rates::{LossParams, RateCurve, RateSurface};
pub use spectra::{CoherentSpectrum, FrequencyGrid, GaussianJointSpectrum};
