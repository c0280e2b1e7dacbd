//! `--grid` strings such as `N=3..6,E=1..4,q=13,K=2`.

use pedc_core::gf::is_prime;
use pedc_core::sim::GridPoint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub servers: Vec<usize>,
    pub colluders: Vec<usize>,
    /// Fixed field size; `None` picks the smallest workable prime per point.
    pub q: Option<Vec<u64>>,
    pub users: Vec<usize>,
}

impl GridSpec {
    /// Cartesian product in (q, K, N, E) order with N and E varying fastest.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        let qs: Vec<Option<u64>> = match &self.q {
            Some(qs) => qs.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        for q in &qs {
            for &users in &self.users {
                for &servers in &self.servers {
                    for &colluders in &self.colluders {
                        let q = q.unwrap_or_else(|| smallest_prime_for(servers, colluders));
                        out.push(GridPoint {
                            q,
                            users,
                            servers,
                            colluders,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Smallest prime q with q >= N + L, which is what distinct evaluation
/// points need.
pub fn smallest_prime_for(servers: usize, colluders: usize) -> u64 {
    let l = servers.saturating_sub(colluders + 1);
    let mut q = ((servers + l) as u64).max(2);
    while !is_prime(q) {
        q += 1;
    }
    q
}

fn parse_range(key: &str, s: &str) -> Result<Vec<u64>, String> {
    let one = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| format!("bad value `{s}` for {key}"))
    };
    match s.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (one(lo)?, one(hi)?);
            if lo > hi {
                return Err(format!("empty range `{s}` for {key}"));
            }
            Ok((lo..=hi).collect())
        }
        None => s.split('|').map(one).collect(),
    }
}

/// Parses comma-separated `key=value` pairs. Values are a single number,
/// an inclusive range `a..b`, or alternatives `a|b|c`. `N` and `E` are
/// required; `K` defaults to 2.
pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let mut servers = None;
    let mut colluders = None;
    let mut q = None;
    let mut users = None;
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in grid, got `{part}`"))?;
        let key = key.trim();
        let value = value.trim();
        let wide = |v: Vec<u64>| v.into_iter().map(|x| x as usize).collect::<Vec<_>>();
        match key {
            "N" => servers = Some(wide(parse_range(key, value)?)),
            "E" => colluders = Some(wide(parse_range(key, value)?)),
            "K" => users = Some(wide(parse_range(key, value)?)),
            "q" => q = Some(parse_range(key, value)?),
            other => {
                return Err(format!(
                    "unknown grid key `{other}` (expected N, E, q or K)"
                ))
            }
        }
    }
    Ok(GridSpec {
        servers: servers.ok_or("grid needs N")?,
        colluders: colluders.ok_or("grid needs E")?,
        q,
        users: users.unwrap_or_else(|| vec![2]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_defaults() {
        let g = parse_grid("N=3..6,E=1..4").unwrap();
        assert_eq!(g.servers, vec![3, 4, 5, 6]);
        assert_eq!(g.colluders, vec![1, 2, 3, 4]);
        assert_eq!(g.users, vec![2]);
        assert_eq!(g.points().len(), 16);
    }

    #[test]
    fn alternatives_and_fixed_q() {
        let g = parse_grid("N=4, E=1|2, q=13, K=3").unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 2);
        assert!(pts
            .iter()
            .all(|p| p.q == 13 && p.users == 3 && p.servers == 4));
    }

    #[test]
    fn auto_prime() {
        // N=3, E=1: L=1, need 4 points
        assert_eq!(smallest_prime_for(3, 1), 5);
        assert_eq!(smallest_prime_for(6, 1), 11);
        assert_eq!(smallest_prime_for(2, 0), 3);
        // infeasible rows still get a prime
        assert_eq!(smallest_prime_for(3, 4), 3);
    }

    #[test]
    fn errors() {
        assert!(parse_grid("E=1").is_err());
        assert!(parse_grid("N=3").is_err());
        assert!(parse_grid("N=5..3,E=1").is_err());
        assert!(parse_grid("N=3,E=1,X=2").is_err());
        assert!(parse_grid("N=a,E=1").is_err());
        assert!(parse_grid("N3,E=1").is_err());
    }
}
