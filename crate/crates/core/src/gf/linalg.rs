//! Vectors, matrices and exact linear solving over GF(q).

use super::{FieldElement, GfError, Modulus};

/// A nonempty vector over a single prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldVector {
    modulus: Modulus,
    values: Vec<u64>,
}

impl FieldVector {
    /// Builds a vector from raw integers, reducing each one mod q.
    pub fn from_values(modulus: Modulus, values: &[u64]) -> Result<Self, GfError> {
        if values.is_empty() {
            return Err(GfError::Empty);
        }
        Ok(FieldVector {
            modulus,
            values: values.iter().map(|&v| v % modulus.get()).collect(),
        })
    }

    pub fn from_elements(elements: &[FieldElement]) -> Result<Self, GfError> {
        let first = elements.first().ok_or(GfError::Empty)?;
        let modulus = first.modulus();
        let mut values = Vec::with_capacity(elements.len());
        for e in elements {
            if e.modulus() != modulus {
                return Err(GfError::ModulusMismatch {
                    left: modulus.get(),
                    right: e.modulus().get(),
                });
            }
            values.push(e.value());
        }
        Ok(FieldVector { modulus, values })
    }

    pub fn zeros(modulus: Modulus, len: usize) -> Result<Self, GfError> {
        if len == 0 {
            return Err(GfError::Empty);
        }
        Ok(FieldVector {
            modulus,
            values: vec![0; len],
        })
    }

    /// Unit vector `e_index` (0-based).
    pub fn unit(modulus: Modulus, len: usize, index: usize) -> Result<Self, GfError> {
        let mut v = Self::zeros(modulus, len)?;
        if index >= len {
            return Err(GfError::IndexOutOfRange { index, len });
        }
        v.values[index] = 1 % modulus.get();
        Ok(v)
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with `len`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> FieldElement {
        self.modulus.element(self.values[i])
    }

    #[inline]
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.values.iter().map(move |&v| self.modulus.element(v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    fn check_compatible(&self, other: &FieldVector) -> Result<(), GfError> {
        if self.modulus != other.modulus {
            return Err(GfError::ModulusMismatch {
                left: self.modulus.get(),
                right: other.modulus.get(),
            });
        }
        if self.len() != other.len() {
            return Err(GfError::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub fn dot(&self, other: &FieldVector) -> Result<FieldElement, GfError> {
        self.check_compatible(other)?;
        let m = self.modulus;
        let acc = self
            .values
            .iter()
            .zip(&other.values)
            .fold(0, |acc, (&a, &b)| m.add_raw(acc, m.mul_raw(a, b)));
        Ok(m.element(acc))
    }

    pub fn add(&self, other: &FieldVector) -> Result<FieldVector, GfError> {
        self.check_compatible(other)?;
        let m = self.modulus;
        Ok(FieldVector {
            modulus: m,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| m.add_raw(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: FieldElement) -> Result<FieldVector, GfError> {
        if c.modulus() != self.modulus {
            return Err(GfError::ModulusMismatch {
                left: self.modulus.get(),
                right: c.modulus().get(),
            });
        }
        let m = self.modulus;
        Ok(FieldVector {
            modulus: m,
            values: self
                .values
                .iter()
                .map(|&a| m.mul_raw(a, c.value()))
                .collect(),
        })
    }
}

/// A dense row-major matrix over a single prime field.
///
/// Zero rows or columns are allowed (e.g. an L×0 noise block when there is
/// no collusion to defend against).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FieldMatrix {
    pub fn zeros(modulus: Modulus, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: Modulus, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from nested rows, reducing every entry mod q.
    pub fn from_rows<R: AsRef<[u64]>>(modulus: Modulus, rows: &[R]) -> Result<Self, GfError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(GfError::Ragged {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&v| v % modulus.get()));
        }
        Ok(FieldMatrix {
            modulus,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a `rows × cols` matrix from a row-major slice, reducing mod q.
    pub fn from_flat(
        modulus: Modulus,
        rows: usize,
        cols: usize,
        data: &[u64],
    ) -> Result<Self, GfError> {
        if data.len() != rows * cols {
            return Err(GfError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(FieldMatrix {
            modulus,
            rows,
            cols,
            data: data.iter().map(|&v| v % modulus.get()).collect(),
        })
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.modulus.element(self.data[r * self.cols + c])
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: FieldElement) {
        assert_eq!(value.modulus(), self.modulus, "field modulus mismatch");
        self.data[r * self.cols + c] = value.value();
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Row `r` as a vector. Fails on a zero-column matrix.
    pub fn row_vector(&self, r: usize) -> Result<FieldVector, GfError> {
        FieldVector::from_values(self.modulus, self.row(r))
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn as_flat(&self) -> &[u64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &FieldVector) -> Result<FieldVector, GfError> {
        if x.modulus() != self.modulus {
            return Err(GfError::ModulusMismatch {
                left: self.modulus.get(),
                right: x.modulus().get(),
            });
        }
        if x.len() != self.cols {
            return Err(GfError::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        let m = self.modulus;
        let out: Vec<u64> = (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x.values())
                    .fold(0, |acc, (&a, &b)| m.add_raw(acc, m.mul_raw(a, b)))
            })
            .collect();
        FieldVector::from_values(m, &out)
    }
}

/// Solves `a · x = b` by Gauss-Jordan elimination with first-nonzero pivoting.
pub fn solve_linear(a: &FieldMatrix, b: &FieldVector) -> Result<FieldVector, GfError> {
    if a.rows() != a.cols() {
        return Err(GfError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.modulus() != b.modulus() {
        return Err(GfError::ModulusMismatch {
            left: a.modulus().get(),
            right: b.modulus().get(),
        });
    }
    let n = a.rows();
    if b.len() != n {
        return Err(GfError::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let m = a.modulus();
    let width = n + 1;
    // augmented [A | b]
    let mut aug: Vec<u64> = Vec::with_capacity(n * width);
    for r in 0..n {
        aug.extend_from_slice(a.row(r));
        aug.push(b.values()[r]);
    }

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| aug[r * width + col] != 0)
            .ok_or(GfError::SingularMatrix)?;
        if pivot != col {
            for c in 0..width {
                aug.swap(pivot * width + c, col * width + c);
            }
        }
        let inv = m.inv_raw(aug[col * width + col])?;
        for c in col..width {
            aug[col * width + c] = m.mul_raw(aug[col * width + c], inv);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = aug[r * width + col];
            if factor == 0 {
                continue;
            }
            for c in col..width {
                let sub = m.mul_raw(factor, aug[col * width + c]);
                aug[r * width + c] = m.sub_raw(aug[r * width + c], sub);
            }
        }
    }

    let x: Vec<u64> = (0..n).map(|r| aug[r * width + n]).collect();
    FieldVector::from_values(m, &x)
}
