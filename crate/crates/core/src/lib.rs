//! Radial reconfiguration of power networks.
//!
//! The crate models a network as a graph of buses joined by switchable
//! branches, solves AC power flow with Newton-Raphson, and searches the
//! space of radial (spanning-tree) switch configurations for minimum real
//! power loss using a Prim-seeded Tabu search with elitist candidate
//! filtering. An exhaustive oracle over every spanning tree is provided
//! for validating the search on small networks.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command line live in the `hatsga` companion crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod graphops;
pub mod hatsga;
pub mod netmodel;
pub mod oracle;
pub mod powerflow;

pub use graphops::{SectorLoop, Topology};
pub use netmodel::{AdmittanceMatrix, BranchRecord, BusKind, BusRecord, Network, SwitchId};
pub use powerflow::{PowerFlowSolution, SolverConfig};
