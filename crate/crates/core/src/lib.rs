//! Simulator for reputation-gated, ledger-settled spectrum trading in a
//! multibeam satellite system.
//!
//! The pipeline runs footprint geometry and link budgets, an
//! interference-pricing game between the satellite and terrestrial users,
//! trade settlement in spectrum coin, and a commit round among edge-node
//! miners whose eligibility follows their trading reputation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod consensus;
pub mod geometry;
pub mod ids;
pub mod ledger;
pub mod market;
pub mod reputation;
pub mod sim;

pub use ids::{AccountId, NodeId, OperatorId};

/// Any error the library can report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Channel(#[from] channel::ChannelError),
    #[error(transparent)]
    Reputation(#[from] reputation::ReputationError),
    #[error(transparent)]
    Ledger(#[from] ledger::LedgerError),
    #[error(transparent)]
    Dump(#[from] ledger::dump::DumpError),
    #[error(transparent)]
    Market(#[from] market::MarketError),
    #[error(transparent)]
    Round(#[from] consensus::RoundFailure),
    #[error(transparent)]
    Config(#[from] sim::ConfigError),
    #[error(transparent)]
    Sim(#[from] sim::SimError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
