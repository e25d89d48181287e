//! Uplink beamforming and interference mitigation for a cognitive LEO
//! satellite driven by radio environment map (REM) snapshots.
//!
//! The crate models the full desk-scale pipeline:
//!
//! - [`geom`]: Keplerian orbit propagation and ECEF -> local NED -> spherical
//!   arrival-angle geometry on a spherical Earth.
//! - [`array`]: planar-array steering vectors and array factors.
//! - [`link`]: free-space path loss, SINR, and Shannon capacity.
//! - [`opt`]: the constrained weight-synthesis problem with six
//!   interchangeable solvers and a paired-seed benchmark harness.
//! - [`rem`]: the ground-truth world and the REM policy that degrades it into
//!   stale, partial, or position-errored snapshots.
//! - [`sim`]: time-stepped passes producing capacity traces, sweep tables,
//!   and footprint grids.
//!
//! Independent work items (sweep cells, benchmark trials, grid cells) are
//! data-parallel through [`par`]; disabling the default `parallel` feature
//! swaps in a sequential fallback with identical output.

pub mod array;
pub mod error;
pub mod geom;
pub mod link;
pub mod opt;
pub mod par;
pub mod rem;
pub mod seeds;
pub mod sim;

pub use error::{Error, Result};
