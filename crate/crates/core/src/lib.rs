//! Exact tools for uniform families of bounded VC-dimension: witness
//! selection, extremal constructions, shadow and sunflower audits,
//! structural decompositions, a polynomial rank certificate and exhaustive
//! search for extremal families.

pub mod error;
pub mod extremal;
pub mod family;
pub mod mask;
pub mod polycert;
pub mod search;
pub mod shadow;
pub mod structure;
pub mod sunflower;
pub mod vc;

pub use error::{Error, Result};
pub use family::{complement_family, parse_family, serialize_family, Family};
pub use mask::{binomial, enumerate_k_subsets, SubsetMask, MAX_N};
pub use vc::{parse_witnessed, select_witnesses, serialize_witnessed, shatters, vc_dimension, WitnessedFamily};
