//! Users, servers and the collector as message-passing parties.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;

use super::streams::{sample_block, sample_values, Stream};
use super::transcript::{Cost, Rate, ServerRecord, Transcript};
use super::SimError;
use crate::csa::{
    answer, assemble_store, compute_statistic_oracle, decode, encode_upload, make_query, Answer,
    Coefficients, CollectorNoise, Message, Query, ServerStore, Statistic, SystemParams, UserNoise,
    UserShare,
};

/// Optional fixed inputs for a run. Anything left `None` is sampled from
/// the master seed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunInputs {
    /// K rows of L symbols.
    pub messages: Option<Vec<Vec<u64>>>,
    /// Length K.
    pub coefficients: Option<Vec<u64>>,
    /// K blocks of L×E.
    pub user_noises: Option<Vec<Vec<Vec<u64>>>>,
    /// L rows of K.
    pub collector_noise: Option<Vec<Vec<u64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Address {
    Server(usize),
    Collector,
}

#[derive(Clone, Debug)]
enum Envelope {
    Upload(UserShare),
    Query(Query),
    Answer(Answer),
}

impl Envelope {
    fn symbols(&self) -> u64 {
        match self {
            Envelope::Upload(s) => s.symbols().len() as u64,
            Envelope::Query(q) => (q.rows().rows() * q.rows().cols()) as u64,
            Envelope::Answer(_) => 1,
        }
    }
}

/// In-process message queues with per-kind symbol counters.
#[derive(Default)]
struct Mailbox {
    queues: BTreeMap<Address, VecDeque<Envelope>>,
    cost: Cost,
}

impl Mailbox {
    fn send(&mut self, to: Address, env: Envelope) {
        let n = env.symbols();
        match env {
            Envelope::Upload(_) => self.cost.upload_symbols += n,
            Envelope::Query(_) => self.cost.query_symbols += n,
            Envelope::Answer(_) => self.cost.download_symbols += n,
        }
        self.queues.entry(to).or_default().push_back(env);
    }

    fn drain(&mut self, at: Address) -> Vec<Envelope> {
        self.queues.remove(&at).map(Vec::from).unwrap_or_default()
    }
}

struct UserParty {
    message: Message,
    noise: UserNoise,
}

impl UserParty {
    fn upload(&self, params: &SystemParams, mailbox: &mut Mailbox) -> Result<(), SimError> {
        for share in encode_upload(params, &self.message, &self.noise)? {
            mailbox.send(Address::Server(share.server()), Envelope::Upload(share));
        }
        Ok(())
    }
}

struct ServerParty {
    id: usize,
    store: Option<ServerStore>,
    pending: Option<Query>,
}

impl ServerParty {
    fn receive_uploads(
        &mut self,
        params: &SystemParams,
        inbox: Vec<Envelope>,
    ) -> Result<(), SimError> {
        let shares: Vec<UserShare> = inbox
            .into_iter()
            .filter_map(|e| match e {
                Envelope::Upload(s) => Some(s),
                _ => None,
            })
            .collect();
        self.store = Some(assemble_store(params, self.id, &shares)?);
        Ok(())
    }

    fn receive_query(&mut self, inbox: Vec<Envelope>) -> Result<(), SimError> {
        let mut queries = inbox.into_iter().filter_map(|e| match e {
            Envelope::Query(q) => Some(q),
            _ => None,
        });
        self.pending = queries.next();
        if self.pending.is_none() || queries.next().is_some() {
            return Err(SimError::Flow(format!(
                "server {} expected exactly one query",
                self.id
            )));
        }
        Ok(())
    }

    fn respond(&self) -> Result<Answer, SimError> {
        let store = self
            .store
            .as_ref()
            .ok_or_else(|| SimError::Flow(format!("server {} answered before upload", self.id)))?;
        let query = self
            .pending
            .as_ref()
            .ok_or_else(|| SimError::Flow(format!("server {} has no query", self.id)))?;
        Ok(answer(store, query)?)
    }
}

struct CollectorParty {
    f: Coefficients,
    noise: CollectorNoise,
}

impl CollectorParty {
    fn issue_queries(
        &self,
        params: &SystemParams,
        mailbox: &mut Mailbox,
    ) -> Result<Vec<Query>, SimError> {
        let mut sent = Vec::with_capacity(params.servers());
        for n in 1..=params.servers() {
            let q = make_query(params, &self.f, &self.noise, n)?;
            sent.push(q.clone());
            mailbox.send(Address::Server(n), Envelope::Query(q));
        }
        Ok(sent)
    }

    fn reconstruct(
        &self,
        params: &SystemParams,
        inbox: Vec<Envelope>,
    ) -> Result<(Vec<Answer>, Statistic), SimError> {
        let answers: Vec<Answer> = inbox
            .into_iter()
            .filter_map(|e| match e {
                Envelope::Answer(a) => Some(a),
                _ => None,
            })
            .collect();
        let stat = decode(params, &answers, &self.f, &self.noise)?;
        Ok((answers, stat))
    }
}

fn check_outer<T>(what: &'static str, v: &[T], expected: usize) -> Result<(), SimError> {
    if v.len() != expected {
        return Err(SimError::Input {
            what,
            expected,
            found: v.len(),
        });
    }
    Ok(())
}

/// Runs both phases end to end and records everything.
///
/// Identical `(params, seed, inputs)` always yield an identical transcript.
pub fn run_protocol(
    params: &SystemParams,
    master_seed: u64,
    inputs: &RunInputs,
) -> Result<Transcript, SimError> {
    let m = params.modulus();
    let (k_len, l_len, e_len) = (params.users(), params.message_len(), params.colluders());

    // Upload phase
    let mut users = Vec::with_capacity(k_len);
    if let Some(w) = &inputs.messages {
        check_outer("messages", w, k_len)?;
    }
    if let Some(z) = &inputs.user_noises {
        check_outer("user noises", z, k_len)?;
    }
    for k in 1..=k_len {
        let w = match &inputs.messages {
            Some(w) => w[k - 1].clone(),
            None => sample_values(&mut Stream::UserMessage(k).rng(master_seed), m, l_len),
        };
        let z = match &inputs.user_noises {
            Some(z) => z[k - 1].clone(),
            None => sample_block(&mut Stream::UserNoise(k).rng(master_seed), m, l_len, e_len),
        };
        users.push(UserParty {
            message: Message::from_values(params, k, &w)?,
            noise: UserNoise::from_rows(params, k, &z)?,
        });
    }

    let mut mailbox = Mailbox::default();
    for u in &users {
        u.upload(params, &mut mailbox)?;
    }
    let mut servers: Vec<ServerParty> = (1..=params.servers())
        .map(|id| ServerParty {
            id,
            store: None,
            pending: None,
        })
        .collect();
    for s in &mut servers {
        let inbox = mailbox.drain(Address::Server(s.id));
        s.receive_uploads(params, inbox)?;
    }

    // Computation phase
    let f = match &inputs.coefficients {
        Some(f) => f.clone(),
        None => sample_values(
            &mut Stream::CollectorCoefficients.rng(master_seed),
            m,
            k_len,
        ),
    };
    let zp = match &inputs.collector_noise {
        Some(z) => z.clone(),
        None => sample_block(
            &mut Stream::CollectorNoise.rng(master_seed),
            m,
            l_len,
            k_len,
        ),
    };
    if let Some(z) = &inputs.collector_noise {
        check_outer("collector noise", z, l_len)?;
    }
    let collector = CollectorParty {
        f: Coefficients::from_values(params, &f)?,
        noise: CollectorNoise::from_rows(params, &zp)?,
    };
    let queries = collector.issue_queries(params, &mut mailbox)?;
    for s in &mut servers {
        let inbox = mailbox.drain(Address::Server(s.id));
        s.receive_query(inbox)?;
    }
    // answering is independent per server; results are posted in id order
    let answers: Vec<Answer> = servers
        .par_iter()
        .map(ServerParty::respond)
        .collect::<Result<_, _>>()?;
    for a in answers {
        mailbox.send(Address::Collector, Envelope::Answer(a));
    }
    let (answers, statistic) = collector.reconstruct(params, mailbox.drain(Address::Collector))?;

    let messages: Vec<Message> = users.iter().map(|u| u.message.clone()).collect();
    let oracle = compute_statistic_oracle(&messages, &collector.f)?;
    if oracle != statistic {
        return Err(SimError::OracleMismatch {
            decoded: statistic.values().to_vec(),
            expected: oracle.values().to_vec(),
        });
    }

    let server_records = servers
        .iter()
        .zip(&queries)
        .zip(&answers)
        .map(|((s, q), a)| ServerRecord {
            id: s.id,
            store: s
                .store
                .as_ref()
                .map(|st| st.shares().to_rows())
                .unwrap_or_default(),
            query: q.rows().to_rows(),
            answer: a.value().value(),
        })
        .collect();

    let cost = mailbox.cost;
    Ok(Transcript {
        params: params.clone(),
        master_seed,
        messages: users
            .iter()
            .map(|u| u.message.symbols().values().to_vec())
            .collect(),
        user_noises: users.iter().map(|u| u.noise.block().to_rows()).collect(),
        coefficients: f.iter().map(|v| v % m.get()).collect(),
        collector_noise: collector.noise.block().to_rows(),
        servers: server_records,
        statistic: statistic.values().to_vec(),
        rate: Rate::new(statistic.values().len() as u64, cost.download_symbols),
        cost,
    })
}
