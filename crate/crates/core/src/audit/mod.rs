//! Exhaustive privacy audits.
//!
//! Each audit enumerates every value of the relevant randomness at small
//! parameters, builds exact outcome distributions of what an adversary
//! sees, and compares them. A pass means total variation distance exactly
//! zero.
//!
//! * P1: any E colluding servers learn nothing about the messages.
//! * P2: the collector learns nothing about the messages beyond `W^f`.
//! * P3: no single server learns anything about `f`.
//!
//! [`NoiseHook`] forces degenerate noise so the audits can be shown to fail
//! when protection is removed.

mod checks;
mod distribution;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csa::{CsaError, SystemParams};

pub use checks::{
    audit_all, audit_collector_privacy_vs_server, audit_user_privacy_vs_collector,
    audit_user_privacy_vs_servers, coefficient_directions, independent_pairs,
    predicted_enumeration,
};
pub use distribution::{DistributionTable, Probability};

/// Default cap on enumerated outcomes per audit.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Constraint {
    P1,
    P2,
    P3,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Constraint::P1 => "P1",
            Constraint::P2 => "P2",
            Constraint::P3 => "P3",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Constraint {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "P1" | "p1" => Ok(Constraint::P1),
            "P2" | "p2" => Ok(Constraint::P2),
            "P3" | "p3" => Ok(Constraint::P3),
            other => Err(format!("unknown constraint `{other}`")),
        }
    }
}

/// Degenerate-noise switches. Only for demonstrating that audits detect
/// leakage; never used by protocol runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseHook {
    #[default]
    None,
    ZeroUserNoise,
    ZeroCollectorNoise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditOptions {
    pub budget: u64,
    pub hook: NoiseHook,
    /// Cap on (f, f') pairs per server in [`audit_all`].
    pub max_pairs_per_server: usize,
    /// Cap on coefficient vectors for P2 in [`audit_all`].
    pub max_coefficient_choices: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            budget: DEFAULT_BUDGET,
            hook: NoiseHook::None,
            max_pairs_per_server: 15,
            max_coefficient_choices: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Over budget; nothing was enumerated.
    Refused,
    /// No instance of the constraint exists at these parameters (P3 with a
    /// single user has no linearly independent pair).
    NotApplicable,
}

/// Concrete evidence of a leak: one observable outcome whose probability
/// differs between two secrets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub left: String,
    pub right: String,
    pub outcome: Vec<u64>,
    pub left_probability: Probability,
    pub right_probability: Probability,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub constraint: Constraint,
    pub params: SystemParams,
    /// Which subset, server or coefficient choice was audited.
    pub scope: String,
    pub hook: NoiseHook,
    pub verdict: Verdict,
    /// Maximum distance found; `None` if nothing was enumerated.
    pub distance: Option<Probability>,
    pub enumerated: u64,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error(transparent)]
    Params(#[from] CsaError),
    #[error("enumeration of {predicted} outcomes exceeds the budget of {budget}")]
    BudgetExceeded { predicted: u128, budget: u64 },
    #[error("coefficient vectors {f:?} and {f_prime:?} are linearly dependent")]
    DependentPair { f: Vec<u64>, f_prime: Vec<u64> },
    #[error("the coefficient vector must be nonzero")]
    ZeroCoefficients,
    #[error("colluding set {set:?} must hold {expected} distinct server ids in 1..=N")]
    BadColludingSet { set: Vec<usize>, expected: usize },
}
