//! Ferry scheduling on time-expanded networks.
//!
//! The crate builds per-ferry flow networks and per-destination passenger
//! networks from a [`ProblemInstance`], assembles the integer program over
//! them, solves small instances exactly with a rational branch-and-bound,
//! and turns assignments back into validated ferry schedules.
//!
//! Everything here is `no_std` and only needs an allocator. File formats,
//! wall-clock timing and the command line live in the companion `ferrysched`
//! crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assignment;
pub mod instance;
pub mod lp;
pub mod mip;
pub mod model;
pub mod naming;
pub mod network;
pub mod num;
pub mod oracle;
pub mod schedule;

pub use assignment::Assignment;
pub use instance::{
    total_demand_aeq, CostParams, Demand, DwellForm, Ferry, FerryId, Horizon, InstanceBuilder, InstanceError,
    Minutes, NetworkMode, Port, PortId, ProblemInstance, TransferForm,
};
pub use mip::{solve_mip, solve_mip_with_clock, BranchRule, Clock, MipError, MipResult, MipStatus, SearchOrder, SolverConfig};
pub use model::{build_model, model_stats, BuildError, IpModel, ModelStats};
pub use network::{build_ferry_network, build_passenger_network, build_supergraph, Arc, ArcKind, Node};
pub use num::Rational;
pub use oracle::{brute_force_oracle, OracleError, OracleLimits, OracleOutcome};
pub use schedule::{extract_schedule, kpis, validate, Kpis, Schedule, ValidationReport};
