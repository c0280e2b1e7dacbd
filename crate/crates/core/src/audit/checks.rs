use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;

use super::{
    AuditError, AuditOptions, AuditReport, Constraint, DistributionTable, NoiseHook, Probability,
    Verdict, Witness,
};
use crate::csa::{
    answer, assemble_store, compute_statistic_oracle, encode_upload, make_query, Coefficients,
    CollectorNoise, CsaError, Message, Query, ServerStore, SystemParams, UserNoise, UserShare,
};

/// Size of GF(q)^len, saturating.
fn space_size(q: u64, len: usize) -> u128 {
    (0..len).fold(1u128, |acc, _| acc.saturating_mul(q as u128))
}

/// The `idx`-th vector of GF(q)^len in little-endian digit order.
fn nth_vector(mut idx: u64, q: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = idx % q;
            idx /= q;
            d
        })
        .collect()
}

/// Sizes of the spaces each audit enumerates, honoring the hook.
struct Spaces {
    q: u64,
    messages: usize,
    user_noise: usize,
    collector_noise: usize,
}

impl Spaces {
    fn new(params: &SystemParams, hook: NoiseHook) -> Self {
        let (k, l, e) = (params.users(), params.message_len(), params.colluders());
        Spaces {
            q: params.modulus().get(),
            messages: k * l,
            user_noise: if hook == NoiseHook::ZeroUserNoise {
                0
            } else {
                k * l * e
            },
            collector_noise: if hook == NoiseHook::ZeroCollectorNoise {
                0
            } else {
                l * k
            },
        }
    }

    fn count(&self, len: usize) -> u64 {
        u64::try_from(space_size(self.q, len)).expect("checked against budget")
    }
}

/// Outcomes an audit of the given constraint would enumerate for one
/// subset / pair / coefficient choice.
pub fn predicted_enumeration(
    params: &SystemParams,
    constraint: Constraint,
    hook: NoiseHook,
) -> u128 {
    let s = Spaces::new(params, hook);
    let w = space_size(s.q, s.messages);
    let z = space_size(s.q, s.user_noise);
    let zp = space_size(s.q, s.collector_noise);
    match constraint {
        Constraint::P1 => w.saturating_mul(z),
        Constraint::P2 => w.saturating_mul(z).saturating_mul(zp),
        Constraint::P3 => w.saturating_mul(z).saturating_mul(zp).saturating_mul(2),
    }
}

fn check_budget(predicted: u128, opts: &AuditOptions) -> Result<u64, AuditError> {
    if predicted > opts.budget as u128 {
        return Err(AuditError::BudgetExceeded {
            predicted,
            budget: opts.budget,
        });
    }
    Ok(predicted as u64)
}

fn messages_from(params: &SystemParams, flat: &[u64]) -> Result<Vec<Message>, CsaError> {
    let l = params.message_len();
    (0..params.users())
        .map(|k| Message::from_values(params, k + 1, &flat[k * l..(k + 1) * l]))
        .collect()
}

fn user_noises_from(params: &SystemParams, flat: &[u64]) -> Result<Vec<UserNoise>, CsaError> {
    let (l, e) = (params.message_len(), params.colluders());
    (0..params.users())
        .map(|k| {
            if flat.is_empty() {
                return UserNoise::zero(params, k + 1);
            }
            let rows: Vec<&[u64]> = (0..l)
                .map(|li| &flat[(k * l + li) * e..(k * l + li + 1) * e])
                .collect();
            UserNoise::from_rows(params, k + 1, &rows)
        })
        .collect()
}

fn collector_noise_from(params: &SystemParams, flat: &[u64]) -> Result<CollectorNoise, CsaError> {
    if flat.is_empty() {
        return Ok(CollectorNoise::zero(params));
    }
    let k = params.users();
    let rows: Vec<&[u64]> = flat.chunks(k).collect();
    CollectorNoise::from_rows(params, &rows)
}

/// Runs the upload phase for every user and assembles all N stores.
fn all_stores(
    params: &SystemParams,
    messages: &[Message],
    noises: &[UserNoise],
) -> Result<Vec<ServerStore>, CsaError> {
    let mut per_server: Vec<Vec<UserShare>> = vec![Vec::new(); params.servers()];
    for (w, z) in messages.iter().zip(noises) {
        for share in encode_upload(params, w, z)? {
            per_server[share.server() - 1].push(share);
        }
    }
    per_server
        .iter()
        .enumerate()
        .map(|(i, shares)| assemble_store(params, i + 1, shares))
        .collect()
}

/// Flattened collector noise paired with the queries it produces.
type QuerySet = (Vec<u64>, Vec<Query>);

/// Queries to every server for each enumerated collector noise value.
fn all_queries(
    params: &SystemParams,
    f: &Coefficients,
    spaces: &Spaces,
) -> Result<Vec<QuerySet>, CsaError> {
    (0..spaces.count(spaces.collector_noise))
        .map(|idx| {
            let zp_flat = nth_vector(idx, spaces.q, spaces.collector_noise);
            let zp = collector_noise_from(params, &zp_flat)?;
            let queries = (1..=params.servers())
                .map(|n| make_query(params, f, &zp, n))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((zp_flat, queries))
        })
        .collect()
}

fn label(name: &str, v: &[u64]) -> String {
    format!("{name}={v:?}")
}

/// Folds per-item comparison results into (max distance, first witness).
fn summarize(results: Vec<(Probability, Option<Witness>)>) -> (Probability, Option<Witness>) {
    let mut max = Ratio::from_integer(0u128);
    let mut witness = None;
    for (d, w) in results {
        if d.as_ratio() > max {
            max = d.as_ratio();
        }
        if witness.is_none() {
            witness = w;
        }
    }
    (max.into(), witness)
}

fn compare(
    left: &DistributionTable,
    right: &DistributionTable,
    left_label: impl FnOnce() -> String,
    right_label: impl FnOnce() -> String,
) -> (Probability, Option<Witness>) {
    let d = left.distance(right);
    let witness = left
        .first_difference(right)
        .map(|(outcome, lp, rp)| Witness {
            left: left_label(),
            right: right_label(),
            outcome,
            left_probability: lp,
            right_probability: rp,
        });
    (d, witness)
}

fn report(
    constraint: Constraint,
    params: &SystemParams,
    scope: String,
    opts: &AuditOptions,
    enumerated: u64,
    (distance, witness): (Probability, Option<Witness>),
) -> AuditReport {
    AuditReport {
        constraint,
        params: params.clone(),
        scope,
        hook: opts.hook,
        verdict: if distance.is_zero() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        distance: Some(distance),
        enumerated,
        witness,
        note: None,
    }
}

/// P1: the pooled stores of the `colluding` servers have the same
/// distribution (over all user noise) for every assignment of messages.
pub fn audit_user_privacy_vs_servers(
    params: &SystemParams,
    colluding: &[usize],
    opts: &AuditOptions,
) -> Result<AuditReport, AuditError> {
    let mut set = colluding.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() != colluding.len()
        || set.len() != params.colluders()
        || set.iter().any(|&n| n == 0 || n > params.servers())
    {
        return Err(AuditError::BadColludingSet {
            set: colluding.to_vec(),
            expected: params.colluders(),
        });
    }
    let enumerated = check_budget(
        predicted_enumeration(params, Constraint::P1, opts.hook),
        opts,
    )?;
    let spaces = Spaces::new(params, opts.hook);

    let table_for = |w_idx: u64| -> Result<DistributionTable, CsaError> {
        let messages = messages_from(params, &nth_vector(w_idx, spaces.q, spaces.messages))?;
        let mut table = DistributionTable::new();
        for z_idx in 0..spaces.count(spaces.user_noise) {
            let noises = user_noises_from(params, &nth_vector(z_idx, spaces.q, spaces.user_noise))?;
            let stores = all_stores(params, &messages, &noises)?;
            let outcome: Vec<u64> = set
                .iter()
                .flat_map(|&n| stores[n - 1].shares().as_flat().to_vec())
                .collect();
            table.record(outcome);
        }
        Ok(table)
    };

    let reference = table_for(0)?;
    let w0 = nth_vector(0, spaces.q, spaces.messages);
    let results = (1..spaces.count(spaces.messages))
        .into_par_iter()
        .map(|w_idx| {
            let table = table_for(w_idx)?;
            Ok(compare(
                &reference,
                &table,
                || label("W", &w0),
                || label("W", &nth_vector(w_idx, spaces.q, spaces.messages)),
            ))
        })
        .collect::<Result<Vec<_>, CsaError>>()?;

    Ok(report(
        Constraint::P1,
        params,
        format!("colluding servers {set:?}"),
        opts,
        enumerated,
        summarize(results),
    ))
}

/// True when `f` and `g` span a 2-dimensional space.
fn linearly_independent(params: &SystemParams, f: &[u64], g: &[u64]) -> bool {
    let m = params.modulus();
    (0..f.len()).any(|i| {
        (i + 1..f.len()).any(|j| {
            let a = m.element(f[i]) * m.element(g[j]);
            let b = m.element(f[j]) * m.element(g[i]);
            a != b
        })
    })
}

/// P3: for every fixed messages and user noise, server n's (query, answer)
/// has the same distribution over collector noise under `f` and `f_prime`.
pub fn audit_collector_privacy_vs_server(
    params: &SystemParams,
    server: usize,
    f: &[u64],
    f_prime: &[u64],
    opts: &AuditOptions,
) -> Result<AuditReport, AuditError> {
    params.alpha(server)?;
    let fc = Coefficients::from_values(params, f)?;
    let gc = Coefficients::from_values(params, f_prime)?;
    if !linearly_independent(params, fc.vector().values(), gc.vector().values()) {
        return Err(AuditError::DependentPair {
            f: f.to_vec(),
            f_prime: f_prime.to_vec(),
        });
    }
    let enumerated = check_budget(
        predicted_enumeration(params, Constraint::P3, opts.hook),
        opts,
    )?;
    let spaces = Spaces::new(params, opts.hook);
    let queries_f = all_queries(params, &fc, &spaces)?;
    let queries_g = all_queries(params, &gc, &spaces)?;

    let z_count = spaces.count(spaces.user_noise);
    let total = spaces.count(spaces.messages) * z_count;
    let results = (0..total)
        .into_par_iter()
        .map(|idx| {
            let w_flat = nth_vector(idx / z_count, spaces.q, spaces.messages);
            let z_flat = nth_vector(idx % z_count, spaces.q, spaces.user_noise);
            let messages = messages_from(params, &w_flat)?;
            let noises = user_noises_from(params, &z_flat)?;
            let store = all_stores(params, &messages, &noises)?.swap_remove(server - 1);
            let table_for =
                |queries: &[(Vec<u64>, Vec<Query>)]| -> Result<DistributionTable, CsaError> {
                    let mut table = DistributionTable::new();
                    for (_, qs) in queries {
                        let q = &qs[server - 1];
                        let mut outcome = q.rows().as_flat().to_vec();
                        outcome.push(answer(&store, q)?.value().value());
                        table.record(outcome);
                    }
                    Ok(table)
                };
            let (tf, tg) = (table_for(&queries_f)?, table_for(&queries_g)?);
            Ok(compare(
                &tf,
                &tg,
                || format!("f={f:?}, W={w_flat:?}, Z={z_flat:?}"),
                || format!("f'={f_prime:?}, W={w_flat:?}, Z={z_flat:?}"),
            ))
        })
        .collect::<Result<Vec<_>, CsaError>>()?;

    Ok(report(
        Constraint::P3,
        params,
        format!("server {server}, f={f:?}, f'={f_prime:?}"),
        opts,
        enumerated,
        summarize(results),
    ))
}

/// P2: message assignments with equal `W^f` induce identical distributions
/// of the collector's view (collector noise, all queries, all answers) over
/// all user and collector noise.
pub fn audit_user_privacy_vs_collector(
    params: &SystemParams,
    f: &[u64],
    opts: &AuditOptions,
) -> Result<AuditReport, AuditError> {
    let fc = Coefficients::from_values(params, f)?;
    if fc.vector().is_zero() {
        return Err(AuditError::ZeroCoefficients);
    }
    let enumerated = check_budget(
        predicted_enumeration(params, Constraint::P2, opts.hook),
        opts,
    )?;
    let spaces = Spaces::new(params, opts.hook);
    let queries = all_queries(params, &fc, &spaces)?;

    let view_table = |w_flat: &[u64]| -> Result<DistributionTable, CsaError> {
        let messages = messages_from(params, w_flat)?;
        let mut table = DistributionTable::new();
        for z_idx in 0..spaces.count(spaces.user_noise) {
            let noises = user_noises_from(params, &nth_vector(z_idx, spaces.q, spaces.user_noise))?;
            let stores = all_stores(params, &messages, &noises)?;
            for (zp_flat, qs) in &queries {
                let mut outcome = zp_flat.clone();
                for (store, q) in stores.iter().zip(qs) {
                    outcome.extend_from_slice(q.rows().as_flat());
                    outcome.push(answer(store, q)?.value().value());
                }
                table.record(outcome);
            }
        }
        Ok(table)
    };
    let statistic_of = |w_flat: &[u64]| -> Result<Vec<u64>, CsaError> {
        let messages = messages_from(params, w_flat)?;
        Ok(compute_statistic_oracle(&messages, &fc)?.values().to_vec())
    };

    // first assignment (in enumeration order) of each statistic value is
    // that group's reference
    let w_count = spaces.count(spaces.messages);
    let mut representatives: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::new();
    for w_idx in 0..w_count {
        let w_flat = nth_vector(w_idx, spaces.q, spaces.messages);
        representatives
            .entry(statistic_of(&w_flat)?)
            .or_insert(w_flat);
    }
    let references: BTreeMap<Vec<u64>, DistributionTable> = representatives
        .par_iter()
        .map(|(stat, w)| Ok((stat.clone(), view_table(w)?)))
        .collect::<Result<_, CsaError>>()?;

    let results = (0..w_count)
        .into_par_iter()
        .map(|w_idx| {
            let w_flat = nth_vector(w_idx, spaces.q, spaces.messages);
            let stat = statistic_of(&w_flat)?;
            let rep = &representatives[&stat];
            if *rep == w_flat {
                return Ok((Probability::zero(), None));
            }
            let table = view_table(&w_flat)?;
            Ok(compare(
                &references[&stat],
                &table,
                || format!("W={rep:?} (W^f={stat:?})"),
                || format!("W={w_flat:?} (W^f={stat:?})"),
            ))
        })
        .collect::<Result<Vec<_>, CsaError>>()?;

    Ok(report(
        Constraint::P2,
        params,
        format!("f={f:?}, {} statistic groups", representatives.len()),
        opts,
        enumerated,
        summarize(results),
    ))
}

/// Nonzero coefficient vectors normalized so the first nonzero entry is 1,
/// in lexicographic order: one representative per line through the origin.
pub fn coefficient_directions(params: &SystemParams) -> impl Iterator<Item = Vec<u64>> + '_ {
    let q = params.modulus().get();
    let k = params.users();
    let total = space_size(q, k).min(u64::MAX as u128) as u64;
    (1..total).filter_map(move |idx| {
        // big-endian so the order is lexicographic
        let mut v = nth_vector(idx, q, k);
        v.reverse();
        (v.iter().find(|&&x| x != 0) == Some(&1)).then_some(v)
    })
}

/// Unordered pairs of distinct directions, i.e. linearly independent
/// coefficient pairs, capped at `limit`.
pub fn independent_pairs(params: &SystemParams, limit: usize) -> Vec<(Vec<u64>, Vec<u64>)> {
    let dirs: Vec<Vec<u64>> = coefficient_directions(params).take(limit + 1).collect();
    let mut out = Vec::new();
    'outer: for j in 1..dirs.len() {
        for i in 0..j {
            if out.len() == limit {
                break 'outer;
            }
            out.push((dirs[i].clone(), dirs[j].clone()));
        }
    }
    out
}

/// P2 coefficient choices: directions first, then their scalar multiples.
fn p2_choices(params: &SystemParams, limit: usize) -> Vec<Vec<u64>> {
    let m = params.modulus();
    let dirs: Vec<Vec<u64>> = coefficient_directions(params).take(limit).collect();
    let mut out = dirs.clone();
    for c in 2..m.get() {
        for d in &dirs {
            if out.len() >= limit {
                return out;
            }
            out.push(d.iter().map(|&x| m.mul_raw(x, c)).collect());
        }
    }
    out.truncate(limit);
    out
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, r, &mut Vec::new(), &mut out);
    out
}

fn refused(
    constraint: Constraint,
    params: &SystemParams,
    scope: String,
    opts: &AuditOptions,
    err: &AuditError,
) -> AuditReport {
    AuditReport {
        constraint,
        params: params.clone(),
        scope,
        hook: opts.hook,
        verdict: Verdict::Refused,
        distance: None,
        enumerated: 0,
        witness: None,
        note: Some(err.to_string()),
    }
}

/// Runs P1 over every E-subset, P3 over independent pairs at every server,
/// and P2 over several coefficient vectors. Over-budget audits appear as
/// `Refused` reports.
pub fn audit_all(
    params: &SystemParams,
    constraints: &[Constraint],
    opts: &AuditOptions,
) -> Result<Vec<AuditReport>, AuditError> {
    let mut reports = Vec::new();
    let push = |reports: &mut Vec<AuditReport>,
                constraint,
                scope: String,
                r: Result<AuditReport, AuditError>| {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e @ AuditError::BudgetExceeded { .. }) => {
                reports.push(refused(constraint, params, scope, opts, &e))
            }
            Err(e) => return Err(e),
        }
        Ok(())
    };

    if constraints.contains(&Constraint::P1) {
        for set in combinations(params.servers(), params.colluders()) {
            let r = audit_user_privacy_vs_servers(params, &set, opts);
            push(
                &mut reports,
                Constraint::P1,
                format!("colluding servers {set:?}"),
                r,
            )?;
        }
    }
    if constraints.contains(&Constraint::P2) {
        for f in p2_choices(params, opts.max_coefficient_choices) {
            let r = audit_user_privacy_vs_collector(params, &f, opts);
            push(&mut reports, Constraint::P2, format!("f={f:?}"), r)?;
        }
    }
    if constraints.contains(&Constraint::P3) {
        let pairs = independent_pairs(params, opts.max_pairs_per_server);
        if pairs.is_empty() {
            reports.push(AuditReport {
                constraint: Constraint::P3,
                params: params.clone(),
                scope: "all servers".into(),
                hook: opts.hook,
                verdict: Verdict::NotApplicable,
                distance: None,
                enumerated: 0,
                witness: None,
                note: Some("no linearly independent coefficient pair exists for K=1".into()),
            });
        }
        for n in 1..=params.servers() {
            for (f, g) in &pairs {
                let r = audit_collector_privacy_vs_server(params, n, f, g, opts);
                push(
                    &mut reports,
                    Constraint::P3,
                    format!("server {n}, f={f:?}, f'={g:?}"),
                    r,
                )?;
            }
        }
    }
    Ok(reports)
}
