//! Secure collection of one private linear statistic over secret-shared
//! user data.
//!
//! K users secret-share their messages across N servers so that any E
//! servers together learn nothing. A collector then retrieves exactly one
//! linear combination `Σ_k f_k W_k` with a single field symbol downloaded
//! per server, while no single server learns `f`.
//!
//! * [`gf`]: prime-field arithmetic and linear algebra.
//! * [`csa`]: the cross-subspace-alignment scheme (encode, query, answer,
//!   decode).
//! * [`sim`]: deterministic multi-party simulation with transcripts and
//!   cost accounting.
//! * [`audit`]: exhaustive privacy audits at small parameters.

pub mod audit;
pub mod csa;
pub mod gf;
pub mod sim;
