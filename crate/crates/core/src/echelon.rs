//! Incremental, fully reduced row echelon form over F_p for sample vectors
//! `(x, 1 | y)`.
//!
//! Rows are appended in insertion order and never re-sorted; a pivot map
//! records which row owns each pivot column. Every insertion back-reduces the
//! existing rows, so each pivot column is zero outside its owning row.

use crate::error::{Error, Result};
use crate::fp::{FpScalar, FpVector, PrimeModulus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// A new row was appended.
    Inserted,
    /// The vector lies in the row space; nothing changed.
    Dependent,
    /// The vector reduces to a pivot in the `y` column: the sample contradicts
    /// the stored ones. Nothing changed.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EchelonForm {
    modulus: PrimeModulus,
    dim: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    owner: Vec<Option<usize>>,
}

impl EchelonForm {
    /// An empty form for samples with `dim` features (row width `dim + 2`).
    pub fn new(modulus: PrimeModulus, dim: usize) -> Self {
        Self {
            modulus,
            dim,
            rows: Vec::with_capacity(dim + 1),
            pivots: Vec::with_capacity(dim + 1),
            owner: vec![None; dim + 2],
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.dim + 2
    }

    /// Number of stored rows (`L`).
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = FpVector> + '_ {
        self.rows
            .iter()
            .map(|r| FpVector::from_canonical(self.modulus, r.clone()))
    }

    /// Pivot column of each row, in row order.
    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivots
    }

    pub fn pivot_owner(&self, column: usize) -> Option<usize> {
        self.owner.get(column).copied().flatten()
    }

    pub(crate) fn reduce_in_place(&self, v: &mut [u64]) {
        let m = self.modulus;
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let k = v[col];
            if k == 0 {
                continue;
            }
            for (vj, &rj) in v.iter_mut().zip(row) {
                if rj != 0 {
                    *vj = m.sub(*vj, m.mul(k, rj));
                }
            }
        }
    }

    /// Eliminates every pivot column of `v` using the stored rows.
    pub fn reduce_vector(&self, v: &FpVector) -> Result<FpVector> {
        self.check_width(v.len())?;
        if v.modulus() != self.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: v.modulus().get(),
            });
        }
        let mut out = v.as_slice().to_vec();
        self.reduce_in_place(&mut out);
        Ok(FpVector::from_canonical(self.modulus, out))
    }

    /// The extended sample vector `(x, 1 | y)`.
    pub fn sample_vector(&self, x: &[u64], y: u64) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.width());
        v.extend(x.iter().map(|&e| self.modulus.reduce(e)));
        v.push(1 % self.modulus.get());
        v.push(self.modulus.reduce(y));
        v
    }

    pub(crate) fn insert_raw(&mut self, x: &[u64], y: u64) -> InsertOutcome {
        debug_assert_eq!(x.len(), self.dim);
        let mut v = self.sample_vector(x, y);
        self.insert_reduced_candidate(&mut v)
    }

    fn insert_reduced_candidate(&mut self, v: &mut [u64]) -> InsertOutcome {
        let m = self.modulus;
        self.reduce_in_place(v);
        let Some(lead) = v.iter().position(|&e| e != 0) else {
            return InsertOutcome::Dependent;
        };
        if lead == self.dim + 1 {
            return InsertOutcome::Inconsistent;
        }
        let inv = m.inv(v[lead]).expect("leading entry is nonzero");
        for e in v.iter_mut() {
            *e = m.mul(*e, inv);
        }
        for row in &mut self.rows {
            let k = row[lead];
            if k == 0 {
                continue;
            }
            for (rj, &vj) in row.iter_mut().zip(v.iter()) {
                if vj != 0 {
                    *rj = m.sub(*rj, m.mul(k, vj));
                }
            }
        }
        self.owner[lead] = Some(self.rows.len());
        self.pivots.push(lead);
        self.rows.push(v.to_vec());
        InsertOutcome::Inserted
    }

    /// Inserts the sample `(x, y)` in place.
    pub fn insert_sample(&mut self, x: &FpVector, y: FpScalar) -> Result<InsertOutcome> {
        if x.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if x.modulus() != self.modulus || y.modulus() != self.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.get(),
                right: if x.modulus() != self.modulus {
                    x.modulus().get()
                } else {
                    y.modulus().get()
                },
            });
        }
        Ok(self.insert_raw(x.as_slice(), y.value()))
    }

    /// Inserts an arbitrary vector of full width `dim + 2`.
    pub fn insert_vector(&mut self, v: &FpVector) -> Result<InsertOutcome> {
        self.check_width(v.len())?;
        let mut v = v.as_slice().to_vec();
        Ok(self.insert_reduced_candidate(&mut v))
    }

    /// Copy-on-insert: returns the outcome and the extended form, leaving `self`
    /// untouched.
    pub fn with_sample(&self, x: &FpVector, y: FpScalar) -> Result<(InsertOutcome, EchelonForm)> {
        let mut next = self.clone();
        let outcome = next.insert_sample(x, y)?;
        Ok((outcome, next))
    }

    /// The equations `y = <c_j, x>` whose common solution set is the affine hull
    /// of the stored samples.
    ///
    /// Row `(a | b)` is read as the linear condition `sum_{d<=D} a_d c_d = b` on
    /// the unknown coefficient vector `c`. The particular solution sets all free
    /// unknowns to zero; each free column `f` contributes the particular
    /// solution plus the kernel vector that is one at `f`.
    pub fn equation_system(&self) -> Result<EquationSystem> {
        if self.rows.is_empty() {
            return Err(Error::EmptyForm);
        }
        let m = self.modulus;
        let n = self.dim + 1;
        let mut particular = vec![0u64; n];
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            particular[col] = row[self.dim + 1];
        }
        let mut vectors = vec![FpVector::from_canonical(m, particular.clone())];
        for free in (0..n).filter(|&c| self.owner[c].is_none()) {
            let mut c = particular.clone();
            c[free] = m.add(c[free], 1);
            for (row, &col) in self.rows.iter().zip(&self.pivots) {
                c[col] = m.sub(c[col], row[free]);
            }
            vectors.push(FpVector::from_canonical(m, c));
        }
        Ok(EquationSystem {
            modulus: m,
            dim: self.dim,
            vectors,
        })
    }

    /// The unique coefficient vector, available once `L = D + 1`.
    pub fn coefficient_vector(&self) -> Result<FpVector> {
        if self.rows.len() < self.dim + 1 {
            return Err(Error::RankDeficient {
                rows: self.rows.len(),
                needed: self.dim + 1,
            });
        }
        let mut c = vec![0u64; self.dim + 1];
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            c[col] = row[self.dim + 1];
        }
        Ok(FpVector::from_canonical(self.modulus, c))
    }

    fn check_width(&self, len: usize) -> Result<()> {
        if len != self.width() {
            return Err(Error::LengthMismatch {
                expected: self.width(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Coefficient vectors `c_j` (each of length `D + 1`); a sample lies in the
/// hull iff `y = <c_j, x>` for every `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    modulus: PrimeModulus,
    dim: usize,
    vectors: Vec<FpVector>,
}

impl EquationSystem {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[FpVector] {
        &self.vectors
    }

    #[inline]
    pub(crate) fn contains_raw(&self, x: &[u64], y: u64) -> bool {
        self.vectors
            .iter()
            .all(|c| self.modulus.affine_raw(c.as_slice(), x) == y)
    }

    pub fn contains(&self, x: &FpVector, y: FpScalar) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self.contains_raw(x.as_slice(), y.value()))
    }
}

pub fn membership(system: &EquationSystem, x: &FpVector, y: FpScalar) -> Result<bool> {
    system.contains(x, y)
}
