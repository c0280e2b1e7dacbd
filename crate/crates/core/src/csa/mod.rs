//! Cross-subspace-alignment scheme for retrieving one private linear
//! combination of K users' messages from N servers.
//!
//! Upload phase: user k masks each symbol of its message with a degree-E
//! polynomial in `(l + α_n)` and sends one share row to every server.
//! Computation phase: the collector sends each server a blinded query, each
//! server returns a single inner product, and the collector recovers
//! `W^l · f` for `l = 1..L` by inverting one Cauchy-Vandermonde system.
//!
//! Every function here is pure. Randomness (user and collector noise) is
//! supplied by the caller.

mod params;
mod protocol;
mod types;

use thiserror::Error;

use crate::gf::GfError;

pub use params::{make_params, AlphaPolicy, SystemParams};
pub use protocol::{
    answer, assemble_store, compute_statistic_oracle, decode, delta, encode_upload, make_query,
};
pub use types::{
    Answer, Coefficients, CollectorNoise, Message, Query, ServerStore, Statistic, UserNoise,
    UserShare,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsaError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(
        "infeasible configuration: E={colluders} >= N-1={}; correctness and security \
         constraints contradict each other, so no positive-rate scheme exists",
        servers.saturating_sub(1)
    )]
    Infeasible { servers: usize, colluders: usize },
    #[error("field too small: q={q} but N+L={required} values are needed")]
    FieldTooSmall { q: u64, required: usize },
    #[error("at least one user is required")]
    NoUsers,
    #[error("expected {expected} evaluation points, got {found}")]
    AlphaCount { expected: usize, found: usize },
    #[error("invalid evaluation point {alpha}: {reason}")]
    InvalidAlpha { alpha: u64, reason: &'static str },
    #[error("{what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("server id {0} is outside 1..=N")]
    UnknownServer(usize),
    #[error("user id {0} is outside 1..=K")]
    UnknownUser(usize),
    #[error("server mismatch: expected server {expected}, got {found}")]
    ServerMismatch { expected: usize, found: usize },
    #[error("user mismatch: expected user {expected}, got {found}")]
    UserMismatch { expected: usize, found: usize },
    #[error("missing share from user {user} at server {server}")]
    MissingShare { server: usize, user: usize },
    #[error("duplicate share from user {user} at server {server}")]
    DuplicateShare { server: usize, user: usize },
    #[error("missing answer from server {0}")]
    MissingAnswer(usize),
    #[error("duplicate answer from server {0}")]
    DuplicateAnswer(usize),
    #[error("missing message for user {0}")]
    MissingMessage(usize),
    #[error("duplicate message for user {0}")]
    DuplicateMessage(usize),
    #[error("decoding matrix is singular; evaluation points violate the scheme invariants")]
    SingularDecodingMatrix,
}
