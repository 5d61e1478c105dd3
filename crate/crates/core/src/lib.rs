//! Parameterized Gromov-Wasserstein distances between parameterized measure
//! networks: solvers, lower bounds, generators and feature selection.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod distortion;
pub mod error;
mod fw;
pub mod gw;
pub mod network;
pub mod ot;
pub mod par;
pub mod pgw;
pub mod validate;
pub mod bounds;
pub mod generators;
pub mod featsel;
pub mod io;
pub mod experiments;
