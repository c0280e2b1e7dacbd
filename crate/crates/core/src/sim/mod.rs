//! Deterministic simulation of the upload and computation phases.
//!
//! Users, servers and the collector exchange messages through an
//! in-process mailbox; the run is recorded as a [`Transcript`] with symbol
//! counts per phase. Per-party randomness comes from [`Stream`]s keyed by
//! the master seed.

mod party;
mod streams;
mod sweep;
mod transcript;

use thiserror::Error;

use crate::csa::CsaError;

pub use party::{run_protocol, RunInputs};
pub use streams::{sample_block, sample_values, Stream};
pub use sweep::{capacity, sweep_rates, GridPoint, RateRow};
pub use transcript::{extract_view, Cost, PartyView, Rate, Role, ServerRecord, Transcript, Upload};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Protocol(#[from] CsaError),
    #[error("{what}: expected {expected} entries, found {found}")]
    Input {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("decoded statistic {decoded:?} differs from direct computation {expected:?}")]
    OracleMismatch {
        decoded: Vec<u64>,
        expected: Vec<u64>,
    },
    #[error("transcript field `{0}` does not match a replay of its inputs")]
    Inconsistent(String),
    #[error("unknown role `{0}` (expected user:<k>, server:<n> or collector)")]
    BadRole(String),
    #[error("{0}")]
    Flow(String),
}
