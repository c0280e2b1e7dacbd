use serde::{Deserialize, Serialize};

use super::party::{run_protocol, RunInputs};
use super::transcript::Rate;
use crate::csa::{make_params, AlphaPolicy, CsaError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    pub q: u64,
    pub users: usize,
    pub servers: usize,
    pub colluders: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateRow {
    pub q: u64,
    pub users: usize,
    pub servers: usize,
    pub colluders: usize,
    pub message_len: usize,
    /// Measured from an actual run: decoded symbols per downloaded symbol.
    pub rate: Rate,
    /// `(N-E-1)/N` when `E < N-1`, else 0.
    pub capacity: Rate,
    /// `None` when the row could not be run for a reason unrelated to
    /// feasibility (e.g. the field is too small for N+L points).
    pub matches: Option<bool>,
    pub reason: Option<String>,
}

/// The asymptotic capacity formula.
pub fn capacity(servers: usize, colluders: usize) -> Rate {
    if colluders + 1 < servers {
        Rate::new((servers - colluders - 1) as u64, servers as u64)
    } else {
        Rate::zero()
    }
}

/// One protocol run per grid point; infeasible points become rate-0 rows.
pub fn sweep_rates(grid: &[GridPoint], seed: u64) -> Vec<RateRow> {
    grid.iter()
        .map(|p| {
            let cap = capacity(p.servers, p.colluders);
            let row = |rate: Rate, message_len, matches, reason| RateRow {
                q: p.q,
                users: p.users,
                servers: p.servers,
                colluders: p.colluders,
                message_len,
                rate,
                capacity: cap,
                matches,
                reason,
            };
            let params = match make_params(
                p.q,
                p.users,
                p.servers,
                p.colluders,
                AlphaPolicy::SmallestValid,
            ) {
                Ok(params) => params,
                Err(e @ CsaError::Infeasible { .. }) => {
                    let reason = format!("E >= N-1: {e}");
                    return row(Rate::zero(), 0, Some(cap == Rate::zero()), Some(reason));
                }
                Err(e) => return row(Rate::zero(), 0, None, Some(e.to_string())),
            };
            match run_protocol(&params, seed, &RunInputs::default()) {
                Ok(t) => {
                    let downloaded = t.cost.download_symbols;
                    let rate = Rate::new(t.statistic.len() as u64, downloaded);
                    row(rate, params.message_len(), Some(rate == cap), None)
                }
                Err(e) => row(
                    Rate::zero(),
                    params.message_len(),
                    Some(false),
                    Some(e.to_string()),
                ),
            }
        })
        .collect()
}
