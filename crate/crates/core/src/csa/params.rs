use serde::{Deserialize, Serialize};

use super::CsaError;
use crate::gf::Modulus;

/// How the N evaluation points α_n are chosen.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum AlphaPolicy {
    /// The N smallest field values α with `α + i ≠ 0` for every `i ∈ 1..=L`.
    #[default]
    SmallestValid,
    /// Caller-supplied points, validated against the same constraints.
    Explicit(Vec<u64>),
}

/// Validated system configuration: field, party counts and evaluation
/// points. Only obtainable through [`make_params`] (or deserialization,
/// which runs the same checks).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SystemParams {
    q: Modulus,
    users: usize,
    servers: usize,
    colluders: usize,
    message_len: usize,
    alphas: Vec<u64>,
}

#[derive(Deserialize)]
struct RawParams {
    q: u64,
    users: usize,
    servers: usize,
    colluders: usize,
    message_len: usize,
    alphas: Vec<u64>,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = CsaError;

    fn try_from(raw: RawParams) -> Result<Self, CsaError> {
        let params = make_params(
            raw.q,
            raw.users,
            raw.servers,
            raw.colluders,
            AlphaPolicy::Explicit(raw.alphas),
        )?;
        if params.message_len != raw.message_len {
            return Err(CsaError::Dimension {
                what: "message length",
                expected: params.message_len,
                found: raw.message_len,
            });
        }
        Ok(params)
    }
}

impl SystemParams {
    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.q
    }

    /// K
    #[inline]
    pub fn users(&self) -> usize {
        self.users
    }

    /// N
    #[inline]
    pub fn servers(&self) -> usize {
        self.servers
    }

    /// E, the number of servers that may pool their stores.
    #[inline]
    pub fn colluders(&self) -> usize {
        self.colluders
    }

    /// L = N - E - 1 symbols per message.
    #[inline]
    pub fn message_len(&self) -> usize {
        self.message_len
    }

    /// α_1..α_N, indexed from 0.
    #[inline]
    pub fn alphas(&self) -> &[u64] {
        &self.alphas
    }

    /// α_n for a 1-based server id.
    pub fn alpha(&self, server: usize) -> Result<u64, CsaError> {
        self.check_server(server)?;
        Ok(self.alphas[server - 1])
    }

    pub(crate) fn check_server(&self, server: usize) -> Result<(), CsaError> {
        if server == 0 || server > self.servers {
            Err(CsaError::UnknownServer(server))
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_user(&self, user: usize) -> Result<(), CsaError> {
        if user == 0 || user > self.users {
            Err(CsaError::UnknownUser(user))
        } else {
            Ok(())
        }
    }
}

fn alpha_allowed(q: u64, message_len: usize, alpha: u64) -> bool {
    (1..=message_len as u64).all(|i| !(alpha + i).is_multiple_of(q))
}

/// Validates a configuration and fixes the evaluation points.
pub fn make_params(
    q: u64,
    users: usize,
    servers: usize,
    colluders: usize,
    policy: AlphaPolicy,
) -> Result<SystemParams, CsaError> {
    let modulus = Modulus::new(q)?;
    if colluders + 1 >= servers {
        return Err(CsaError::Infeasible { servers, colluders });
    }
    if users == 0 {
        return Err(CsaError::NoUsers);
    }
    let message_len = servers - colluders - 1;
    let required = servers + message_len;
    if (q as u128) < required as u128 {
        return Err(CsaError::FieldTooSmall { q, required });
    }

    let alphas = match policy {
        AlphaPolicy::SmallestValid => (0..q)
            .filter(|&a| alpha_allowed(q, message_len, a))
            .take(servers)
            .collect(),
        AlphaPolicy::Explicit(alphas) => {
            if alphas.len() != servers {
                return Err(CsaError::AlphaCount {
                    expected: servers,
                    found: alphas.len(),
                });
            }
            for (i, &a) in alphas.iter().enumerate() {
                if a >= q {
                    return Err(CsaError::InvalidAlpha {
                        alpha: a,
                        reason: "not a reduced field element",
                    });
                }
                if !alpha_allowed(q, message_len, a) {
                    return Err(CsaError::InvalidAlpha {
                        alpha: a,
                        reason: "alpha + i = 0 for some i in 1..=L",
                    });
                }
                if alphas[..i].contains(&a) {
                    return Err(CsaError::InvalidAlpha {
                        alpha: a,
                        reason: "duplicate evaluation point",
                    });
                }
            }
            alphas
        }
    };
    debug_assert_eq!(alphas.len(), servers);

    Ok(SystemParams {
        q: modulus,
        users,
        servers,
        colluders,
        message_len,
        alphas,
    })
}
