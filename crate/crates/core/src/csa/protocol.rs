use super::types::{
    Answer, Coefficients, CollectorNoise, Message, Query, ServerStore, Statistic, UserNoise,
    UserShare,
};
use super::{CsaError, SystemParams};
use crate::gf::{
    build_decoding_matrix, solve_linear, FieldElement, FieldMatrix, FieldVector, GfError,
};

/// `Δ_n = ∏_{i=1}^{L} (i + α_n)`; never zero for valid params.
pub fn delta(params: &SystemParams, server: usize) -> Result<FieldElement, CsaError> {
    let m = params.modulus();
    let alpha = m.element(params.alpha(server)?);
    Ok((1..=params.message_len() as u64).fold(m.one(), |acc, i| acc * (alpha + m.element(i))))
}

/// `Δ_n / (l + α_n)`, computed as the product over `i ≠ l`.
fn delta_without(params: &SystemParams, alpha: FieldElement, l: usize) -> FieldElement {
    let m = params.modulus();
    (1..=params.message_len())
        .filter(|&i| i != l)
        .fold(m.one(), |acc, i| acc * (alpha + m.element(i as u64)))
}

/// User-side share encoding. Returns one share per server, in server order.
///
/// Share symbol l at server n is `W_k^l + Σ_{e=1}^{E} (l + α_n)^e Z^k_{le}`.
pub fn encode_upload(
    params: &SystemParams,
    message: &Message,
    noise: &UserNoise,
) -> Result<Vec<UserShare>, CsaError> {
    if message.user() != noise.user() {
        return Err(CsaError::UserMismatch {
            expected: message.user(),
            found: noise.user(),
        });
    }
    let m = params.modulus();
    let l_len = params.message_len();
    let e_len = params.colluders();
    if message.symbols().len() != l_len {
        return Err(CsaError::Dimension {
            what: "message length",
            expected: l_len,
            found: message.symbols().len(),
        });
    }
    let z = noise.block();
    if z.rows() != l_len || z.cols() != e_len {
        return Err(CsaError::Dimension {
            what: "user noise",
            expected: l_len * e_len,
            found: z.rows() * z.cols(),
        });
    }

    params
        .alphas()
        .iter()
        .enumerate()
        .map(|(idx, &alpha)| {
            let alpha = m.element(alpha);
            let symbols: Vec<FieldElement> = (1..=l_len)
                .map(|l| {
                    let shift = alpha + m.element(l as u64);
                    let mut power = m.one();
                    let mut acc = message.symbols().get(l - 1);
                    for e in 1..=e_len {
                        power = power * shift;
                        acc = acc + power * z.get(l - 1, e - 1);
                    }
                    acc
                })
                .collect();
            Ok(UserShare {
                user: message.user(),
                server: idx + 1,
                symbols: FieldVector::from_elements(&symbols)?,
            })
        })
        .collect()
}

/// Collects exactly one share from each of the K users into server n's
/// L×K store.
pub fn assemble_store(
    params: &SystemParams,
    server: usize,
    shares: &[UserShare],
) -> Result<ServerStore, CsaError> {
    params.check_server(server)?;
    let k_len = params.users();
    let l_len = params.message_len();
    let mut columns: Vec<Option<&FieldVector>> = vec![None; k_len];
    for share in shares {
        if share.server != server {
            return Err(CsaError::ServerMismatch {
                expected: server,
                found: share.server,
            });
        }
        params.check_user(share.user)?;
        if share.symbols.len() != l_len {
            return Err(CsaError::Dimension {
                what: "share length",
                expected: l_len,
                found: share.symbols.len(),
            });
        }
        if share.symbols.modulus() != params.modulus() {
            return Err(GfError::ModulusMismatch {
                left: params.modulus().get(),
                right: share.symbols.modulus().get(),
            }
            .into());
        }
        let slot = &mut columns[share.user - 1];
        if slot.is_some() {
            return Err(CsaError::DuplicateShare {
                server,
                user: share.user,
            });
        }
        *slot = Some(&share.symbols);
    }

    let mut store = FieldMatrix::zeros(params.modulus(), l_len, k_len);
    for (k, col) in columns.iter().enumerate() {
        let col = col.ok_or(CsaError::MissingShare {
            server,
            user: k + 1,
        })?;
        for l in 0..l_len {
            store.set(l, k, col.get(l));
        }
    }
    Ok(ServerStore {
        server,
        shares: store,
    })
}

/// Collector-side query for server n.
///
/// Row l is `(Δ_n / (l + α_n)) · (f + (l + α_n) Z'_l)`. No message data
/// enters the computation.
pub fn make_query(
    params: &SystemParams,
    f: &Coefficients,
    noise: &CollectorNoise,
    server: usize,
) -> Result<Query, CsaError> {
    let m = params.modulus();
    let alpha = m.element(params.alpha(server)?);
    let k_len = params.users();
    let l_len = params.message_len();
    if f.vector().len() != k_len {
        return Err(CsaError::Dimension {
            what: "coefficient vector",
            expected: k_len,
            found: f.vector().len(),
        });
    }
    let zp = noise.block();
    if zp.rows() != l_len || zp.cols() != k_len {
        return Err(CsaError::Dimension {
            what: "collector noise",
            expected: l_len * k_len,
            found: zp.rows() * zp.cols(),
        });
    }

    let mut rows = FieldMatrix::zeros(m, l_len, k_len);
    for l in 1..=l_len {
        let shift = alpha + m.element(l as u64);
        let scale = delta_without(params, alpha, l);
        for k in 0..k_len {
            let blinded = f.vector().get(k) + shift * zp.get(l - 1, k);
            rows.set(l - 1, k, scale * blinded);
        }
    }
    Ok(Query { server, rows })
}

/// Server-side answer: the inner product of the flattened store and query.
pub fn answer(store: &ServerStore, query: &Query) -> Result<Answer, CsaError> {
    if store.server != query.server {
        return Err(CsaError::ServerMismatch {
            expected: store.server,
            found: query.server,
        });
    }
    let (d, q) = (&store.shares, &query.rows);
    if d.modulus() != q.modulus() {
        return Err(GfError::ModulusMismatch {
            left: d.modulus().get(),
            right: q.modulus().get(),
        }
        .into());
    }
    if d.rows() != q.rows() || d.cols() != q.cols() {
        return Err(CsaError::Dimension {
            what: "query shape",
            expected: d.rows() * d.cols(),
            found: q.rows() * q.cols(),
        });
    }
    let m = d.modulus();
    let value = d
        .as_flat()
        .iter()
        .zip(q.as_flat())
        .fold(0, |acc, (&a, &b)| m.add_raw(acc, m.mul_raw(a, b)));
    Ok(Answer::new(store.server, m.element(value)))
}

/// Recovers `(W^l · f)_{l=1..L}` from all N answers.
///
/// `f` and `noise` are the collector's own inputs; the aligned scheme does
/// not need them to decode, but they are checked for consistency.
pub fn decode(
    params: &SystemParams,
    answers: &[Answer],
    f: &Coefficients,
    noise: &CollectorNoise,
) -> Result<Statistic, CsaError> {
    if f.vector().len() != params.users() {
        return Err(CsaError::Dimension {
            what: "coefficient vector",
            expected: params.users(),
            found: f.vector().len(),
        });
    }
    if noise.block().rows() != params.message_len() || noise.block().cols() != params.users() {
        return Err(CsaError::Dimension {
            what: "collector noise",
            expected: params.message_len() * params.users(),
            found: noise.block().rows() * noise.block().cols(),
        });
    }
    decode_with_interference(params, answers).map(|(stat, _)| stat)
}

/// Solves the full system and also returns the interference terms
/// `I_0..I_E`. Crate-internal: the interference must not reach callers of
/// the public decoder.
pub(crate) fn decode_with_interference(
    params: &SystemParams,
    answers: &[Answer],
) -> Result<(Statistic, Vec<FieldElement>), CsaError> {
    let m = params.modulus();
    let n_len = params.servers();
    let mut ordered: Vec<Option<FieldElement>> = vec![None; n_len];
    for a in answers {
        params.check_server(a.server())?;
        if a.value().modulus() != m {
            return Err(GfError::ModulusMismatch {
                left: m.get(),
                right: a.value().modulus().get(),
            }
            .into());
        }
        let slot = &mut ordered[a.server() - 1];
        if slot.is_some() {
            return Err(CsaError::DuplicateAnswer(a.server()));
        }
        *slot = Some(a.value());
    }

    let mut rhs = Vec::with_capacity(n_len);
    for (idx, a) in ordered.iter().enumerate() {
        let a = a.ok_or(CsaError::MissingAnswer(idx + 1))?;
        let d = delta(params, idx + 1)?;
        rhs.push(a.checked_div(d)?);
    }
    let rhs = FieldVector::from_elements(&rhs)?;
    let matrix = build_decoding_matrix(params);
    let solution = solve_linear(&matrix, &rhs).map_err(|e| match e {
        GfError::SingularMatrix => CsaError::SingularDecodingMatrix,
        other => other.into(),
    })?;

    let l_len = params.message_len();
    let wanted: Vec<u64> = solution.values()[..l_len].to_vec();
    let interference: Vec<FieldElement> = solution.iter().skip(l_len).collect();
    Ok((
        Statistic(FieldVector::from_values(m, &wanted)?),
        interference,
    ))
}

/// Direct `Σ_k f_k W_k`, bypassing the protocol. Ground truth for tests.
pub fn compute_statistic_oracle(
    messages: &[Message],
    f: &Coefficients,
) -> Result<Statistic, CsaError> {
    let k_len = f.vector().len();
    if messages.len() != k_len {
        return Err(CsaError::Dimension {
            what: "message count",
            expected: k_len,
            found: messages.len(),
        });
    }
    let m = f.vector().modulus();
    let l_len = messages[0].symbols().len();
    let mut by_user: Vec<Option<&Message>> = vec![None; k_len];
    for msg in messages {
        if msg.user() == 0 || msg.user() > k_len {
            return Err(CsaError::UnknownUser(msg.user()));
        }
        if msg.symbols().len() != l_len {
            return Err(CsaError::Dimension {
                what: "message length",
                expected: l_len,
                found: msg.symbols().len(),
            });
        }
        let slot = &mut by_user[msg.user() - 1];
        if slot.is_some() {
            return Err(CsaError::DuplicateMessage(msg.user()));
        }
        *slot = Some(msg);
    }

    let mut acc = FieldVector::zeros(m, l_len)?;
    for (k, msg) in by_user.iter().enumerate() {
        let msg = msg.ok_or(CsaError::MissingMessage(k + 1))?;
        acc = acc.add(&msg.symbols().scale(f.vector().get(k))?)?;
    }
    Ok(Statistic(acc))
}
