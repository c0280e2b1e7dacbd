//! Protocol data. Server and user ids are 1-based throughout.

use super::{CsaError, SystemParams};
use crate::gf::{FieldElement, FieldMatrix, FieldVector, Modulus};

fn check_modulus(params: &SystemParams, found: Modulus) -> Result<(), CsaError> {
    let expected = params.modulus();
    if expected != found {
        return Err(crate::gf::GfError::ModulusMismatch {
            left: expected.get(),
            right: found.get(),
        }
        .into());
    }
    Ok(())
}

fn check_shape(
    what: &'static str,
    m: &FieldMatrix,
    rows: usize,
    cols: usize,
) -> Result<(), CsaError> {
    if m.rows() != rows {
        return Err(CsaError::Dimension {
            what,
            expected: rows,
            found: m.rows(),
        });
    }
    if m.cols() != cols {
        return Err(CsaError::Dimension {
            what,
            expected: cols,
            found: m.cols(),
        });
    }
    Ok(())
}

/// User k's private message `W_k`, L symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    user: usize,
    symbols: FieldVector,
}

impl Message {
    pub fn new(params: &SystemParams, user: usize, symbols: FieldVector) -> Result<Self, CsaError> {
        params.check_user(user)?;
        check_modulus(params, symbols.modulus())?;
        if symbols.len() != params.message_len() {
            return Err(CsaError::Dimension {
                what: "message length",
                expected: params.message_len(),
                found: symbols.len(),
            });
        }
        Ok(Message { user, symbols })
    }

    pub fn from_values(
        params: &SystemParams,
        user: usize,
        values: &[u64],
    ) -> Result<Self, CsaError> {
        Self::new(
            params,
            user,
            FieldVector::from_values(params.modulus(), values)?,
        )
    }

    pub fn user(&self) -> usize {
        self.user
    }

    pub fn symbols(&self) -> &FieldVector {
        &self.symbols
    }
}

/// User k's masking noise `Z^k_{le}`, an L×E block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserNoise {
    user: usize,
    block: FieldMatrix,
}

impl UserNoise {
    pub fn new(params: &SystemParams, user: usize, block: FieldMatrix) -> Result<Self, CsaError> {
        params.check_user(user)?;
        check_modulus(params, block.modulus())?;
        check_shape(
            "user noise",
            &block,
            params.message_len(),
            params.colluders(),
        )?;
        Ok(UserNoise { user, block })
    }

    pub fn from_rows<R: AsRef<[u64]>>(
        params: &SystemParams,
        user: usize,
        rows: &[R],
    ) -> Result<Self, CsaError> {
        let block = FieldMatrix::from_rows(params.modulus(), rows)?;
        Self::new(params, user, block)
    }

    /// All-zero noise. Only meaningful for tests and audit hooks; it
    /// removes all protection against colluding servers.
    pub fn zero(params: &SystemParams, user: usize) -> Result<Self, CsaError> {
        Self::new(
            params,
            user,
            FieldMatrix::zeros(params.modulus(), params.message_len(), params.colluders()),
        )
    }

    pub fn user(&self) -> usize {
        self.user
    }

    pub fn block(&self) -> &FieldMatrix {
        &self.block
    }
}

/// The L symbols user k uploads to server n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserShare {
    pub(crate) user: usize,
    pub(crate) server: usize,
    pub(crate) symbols: FieldVector,
}

impl UserShare {
    pub fn user(&self) -> usize {
        self.user
    }

    pub fn server(&self) -> usize {
        self.server
    }

    pub fn symbols(&self) -> &FieldVector {
        &self.symbols
    }
}

/// What server n holds after the upload phase: `D[l][k]`, L rows by K
/// columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ServerStore {
    pub(crate) server: usize,
    pub(crate) shares: FieldMatrix,
}

impl ServerStore {
    /// Rebuilds a store from its raw L×K block (e.g. from a transcript).
    pub fn from_rows<R: AsRef<[u64]>>(
        params: &SystemParams,
        server: usize,
        rows: &[R],
    ) -> Result<Self, CsaError> {
        params.check_server(server)?;
        let shares = FieldMatrix::from_rows(params.modulus(), rows)?;
        check_shape(
            "server store",
            &shares,
            params.message_len(),
            params.users(),
        )?;
        Ok(ServerStore { server, shares })
    }

    pub fn server(&self) -> usize {
        self.server
    }

    pub fn shares(&self) -> &FieldMatrix {
        &self.shares
    }
}

/// The collector's coefficient vector f, length K. The zero vector is
/// accepted and decodes to zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficients(FieldVector);

impl Coefficients {
    pub fn new(params: &SystemParams, f: FieldVector) -> Result<Self, CsaError> {
        check_modulus(params, f.modulus())?;
        if f.len() != params.users() {
            return Err(CsaError::Dimension {
                what: "coefficient vector",
                expected: params.users(),
                found: f.len(),
            });
        }
        Ok(Coefficients(f))
    }

    pub fn from_values(params: &SystemParams, values: &[u64]) -> Result<Self, CsaError> {
        Self::new(params, FieldVector::from_values(params.modulus(), values)?)
    }

    pub fn vector(&self) -> &FieldVector {
        &self.0
    }
}

/// The collector's blinding vectors `Z'_1..Z'_L`, stored as an L×K block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollectorNoise {
    block: FieldMatrix,
}

impl CollectorNoise {
    pub fn new(params: &SystemParams, block: FieldMatrix) -> Result<Self, CsaError> {
        check_modulus(params, block.modulus())?;
        check_shape(
            "collector noise",
            &block,
            params.message_len(),
            params.users(),
        )?;
        Ok(CollectorNoise { block })
    }

    pub fn from_rows<R: AsRef<[u64]>>(params: &SystemParams, rows: &[R]) -> Result<Self, CsaError> {
        Self::new(params, FieldMatrix::from_rows(params.modulus(), rows)?)
    }

    /// All-zero blinding; tests and audit hooks only.
    pub fn zero(params: &SystemParams) -> Self {
        CollectorNoise {
            block: FieldMatrix::zeros(params.modulus(), params.message_len(), params.users()),
        }
    }

    pub fn block(&self) -> &FieldMatrix {
        &self.block
    }
}

/// Query block `Q_n^f` sent to server n, L×K.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    pub(crate) server: usize,
    pub(crate) rows: FieldMatrix,
}

impl Query {
    pub fn from_rows<R: AsRef<[u64]>>(
        params: &SystemParams,
        server: usize,
        rows: &[R],
    ) -> Result<Self, CsaError> {
        params.check_server(server)?;
        let rows = FieldMatrix::from_rows(params.modulus(), rows)?;
        check_shape("query", &rows, params.message_len(), params.users())?;
        Ok(Query { server, rows })
    }

    pub fn server(&self) -> usize {
        self.server
    }

    pub fn rows(&self) -> &FieldMatrix {
        &self.rows
    }
}

/// Server n's one-symbol reply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Answer {
    server: usize,
    value: FieldElement,
}

impl Answer {
    pub fn new(server: usize, value: FieldElement) -> Self {
        Answer { server, value }
    }

    pub fn server(&self) -> usize {
        self.server
    }

    pub fn value(&self) -> FieldElement {
        self.value
    }
}

/// `(W^1·f, …, W^L·f)`, the one thing the collector is entitled to learn.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Statistic(pub(crate) FieldVector);

impl Statistic {
    pub fn vector(&self) -> &FieldVector {
        &self.0
    }

    pub fn values(&self) -> &[u64] {
        self.0.values()
    }
}
