//! Recorded runs and per-party projections of them.
//!
//! A [`Transcript`] serializes to JSON with a fixed key order and integer
//! values only; see `docs/transcript-schema.md`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::party::{run_protocol, RunInputs};
use super::SimError;
use crate::csa::SystemParams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cost {
    pub upload_symbols: u64,
    pub query_symbols: u64,
    pub download_symbols: u64,
}

/// A nonnegative rational in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rate {
    pub numerator: u64,
    pub denominator: u64,
}

impl Rate {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        Self::from(Ratio::new(numerator, denominator))
    }

    pub fn zero() -> Self {
        Rate {
            numerator: 0,
            denominator: 1,
        }
    }

    pub fn as_ratio(self) -> Ratio<u64> {
        Ratio::new(self.numerator, self.denominator)
    }
}

impl From<Ratio<u64>> for Rate {
    fn from(r: Ratio<u64>) -> Self {
        Rate {
            numerator: *r.numer(),
            denominator: *r.denom(),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerRecord {
    pub id: usize,
    /// L rows of K shares.
    pub store: Vec<Vec<u64>>,
    /// L rows of K.
    pub query: Vec<Vec<u64>>,
    pub answer: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub params: SystemParams,
    pub master_seed: u64,
    pub messages: Vec<Vec<u64>>,
    pub user_noises: Vec<Vec<Vec<u64>>>,
    pub coefficients: Vec<u64>,
    pub collector_noise: Vec<Vec<u64>>,
    pub servers: Vec<ServerRecord>,
    pub statistic: Vec<u64>,
    pub cost: Cost,
    pub rate: Rate,
}

impl Transcript {
    /// Replays the recorded inputs through the protocol and checks every
    /// recorded value, including the oracle comparison. Needs nothing but
    /// the transcript itself.
    pub fn reverify(&self) -> Result<(), SimError> {
        let inputs = RunInputs {
            messages: Some(self.messages.clone()),
            coefficients: Some(self.coefficients.clone()),
            user_noises: Some(self.user_noises.clone()),
            collector_noise: Some(self.collector_noise.clone()),
        };
        let replay = run_protocol(&self.params, self.master_seed, &inputs)?;
        let mismatch = |field: &str| Err(SimError::Inconsistent(field.to_string()));
        if replay.servers != self.servers {
            return mismatch("servers");
        }
        if replay.statistic != self.statistic {
            return mismatch("statistic");
        }
        if replay.cost != self.cost {
            return mismatch("cost");
        }
        if replay.rate != self.rate {
            return mismatch("rate");
        }
        let n = self.params.servers() as u64;
        if self.rate != Rate::new(n - self.params.colluders() as u64 - 1, n) {
            return mismatch("rate");
        }
        Ok(())
    }
}

/// A protocol participant, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    User(usize),
    Server(usize),
    Collector,
}

impl FromStr for Role {
    type Err = SimError;

    /// Accepts `user:<k>`, `server:<n>` or `collector`.
    fn from_str(s: &str) -> Result<Self, SimError> {
        let bad = || SimError::BadRole(s.to_string());
        if s == "collector" {
            return Ok(Role::Collector);
        }
        let (kind, idx) = s.split_once(':').ok_or_else(bad)?;
        let idx: usize = idx.parse().map_err(|_| bad())?;
        match kind {
            "user" => Ok(Role::User(idx)),
            "server" => Ok(Role::Server(idx)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::User(k) => write!(f, "user:{k}"),
            Role::Server(n) => write!(f, "server:{n}"),
            Role::Collector => write!(f, "collector"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Upload {
    pub server: usize,
    pub symbols: Vec<u64>,
}

/// Exactly what one party legitimately observes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum PartyView {
    User {
        user: usize,
        message: Vec<u64>,
        noise: Vec<Vec<u64>>,
        uploads: Vec<Upload>,
    },
    Server {
        server: usize,
        store: Vec<Vec<u64>>,
        query: Vec<Vec<u64>>,
        answer: u64,
    },
    Collector {
        coefficients: Vec<u64>,
        collector_noise: Vec<Vec<u64>>,
        queries: Vec<Vec<Vec<u64>>>,
        answers: Vec<u64>,
        statistic: Vec<u64>,
    },
}

pub fn extract_view(t: &Transcript, role: Role) -> Result<PartyView, SimError> {
    match role {
        Role::User(k) => {
            if k == 0 || k > t.messages.len() {
                return Err(SimError::BadRole(role.to_string()));
            }
            let uploads = t
                .servers
                .iter()
                .map(|s| Upload {
                    server: s.id,
                    symbols: s.store.iter().map(|row| row[k - 1]).collect(),
                })
                .collect();
            Ok(PartyView::User {
                user: k,
                message: t.messages[k - 1].clone(),
                noise: t.user_noises[k - 1].clone(),
                uploads,
            })
        }
        Role::Server(n) => {
            let s = t
                .servers
                .iter()
                .find(|s| s.id == n)
                .ok_or_else(|| SimError::BadRole(role.to_string()))?;
            Ok(PartyView::Server {
                server: n,
                store: s.store.clone(),
                query: s.query.clone(),
                answer: s.answer,
            })
        }
        Role::Collector => Ok(PartyView::Collector {
            coefficients: t.coefficients.clone(),
            collector_noise: t.collector_noise.clone(),
            queries: t.servers.iter().map(|s| s.query.clone()).collect(),
            answers: t.servers.iter().map(|s| s.answer).collect(),
            statistic: t.statistic.clone(),
        }),
    }
}
