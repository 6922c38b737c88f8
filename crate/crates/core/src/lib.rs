//! Moran birth-death process on superstars and related graphs.
//!
//! * [`topology`] builds the graph families and checks circulation.
//! * [`dynamics`] simulates single trajectories under the four update rules.
//! * [`trainkinetics`], [`rootchain`] and [`closedform`] evaluate the stem
//!   train statistics, the root competition chain and every fixation formula
//!   and finite-size error term.
//! * [`exactchain`] solves the full absorbing chain for small graphs.
//! * [`montecarlo`] runs seeded replicas and reports Wilson intervals.

pub mod closedform;
pub mod dynamics;
pub mod error;
pub mod exactchain;
pub mod montecarlo;
pub mod rootchain;
pub mod scalar;
pub mod topology;
pub mod trainkinetics;

#[cfg(test)]
mod proptests;

pub use dynamics::{
    Absorption, Placement, PopulationState, SimConfig, SimRng, SimulationOutcome, UpdateRule,
};
pub use error::{Error, Result};
pub use topology::{build_family, build_superstar, FamilyKind, GraphTopology, NodeRole, SuperstarSpec};
