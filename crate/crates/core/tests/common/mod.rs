#![allow(dead_code)]

//! Reference implementations shared by the integration tests. Nothing here
//! calls into the library's arithmetic.

use padic_linreg::{EchelonForm, PrimeModulus};

pub fn m(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Inverse by Fermat's little theorem.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Batch Gauss-Jordan: the nonzero rows of the reduced row echelon form,
/// ordered by pivot column.
pub fn rref(p: u64, rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|v| v % p).collect()).collect();
    let width = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pivot);
        let inv = inv_mod(a[rank][col], p);
        for v in a[rank].iter_mut() {
            *v = *v * inv % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][col] != 0 {
                let k = a[r][col];
                let pivot_row = a[rank].clone();
                for (v, &w) in a[r].iter_mut().zip(&pivot_row) {
                    *v = (*v + p * p - k * w % p) % p;
                }
            }
        }
        rank += 1;
    }
    a.truncate(rank);
    a
}

pub fn leading_column(row: &[u64]) -> Option<usize> {
    row.iter().position(|&v| v != 0)
}

/// The form's rows ordered by pivot column, for comparison with [`rref`].
pub fn sorted_rows(form: &EchelonForm) -> Vec<Vec<u64>> {
    let mut rows: Vec<(usize, Vec<u64>)> = form
        .pivot_columns()
        .iter()
        .copied()
        .zip(form.rows().map(|r| r.into_inner()))
        .collect();
    rows.sort_by_key(|(c, _)| *c);
    rows.into_iter().map(|(_, r)| r).collect()
}

/// Sample vector `(x, 1 | y)`.
pub fn extended(x: &[u64], y: u64) -> Vec<u64> {
    let mut v = x.to_vec();
    v.push(1);
    v.push(y);
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOutcome {
    Inserted,
    Dependent,
    Inconsistent,
}

/// Classifies adding `v` to the accepted vectors by comparing batch ranks.
pub fn classify(p: u64, accepted: &[Vec<u64>], v: &[u64]) -> OracleOutcome {
    let before = rref(p, accepted).len();
    let mut all = accepted.to_vec();
    all.push(v.to_vec());
    let after = rref(p, &all);
    if after.len() == before {
        OracleOutcome::Dependent
    } else if after.iter().any(|r| leading_column(r) == Some(v.len() - 1)) {
        OracleOutcome::Inconsistent
    } else {
        OracleOutcome::Inserted
    }
}

/// `<c, (x, 1)>` in plain integer arithmetic.
pub fn affine(p: u64, c: &[u64], x: &[u64]) -> u64 {
    let (lin, k) = c.split_at(x.len());
    (lin.iter().zip(x).map(|(a, b)| (a % p) * (b % p) % p).sum::<u64>() + k[0]) % p
}

/// Every vector of `F_p^len`, in lexicographic order.
pub fn all_vectors(p: u64, len: usize) -> Vec<Vec<u64>> {
    let total = p.pow(len as u32);
    (0..total)
        .map(|mut k| {
            (0..len)
                .map(|_| {
                    let d = k % p;
                    k /= p;
                    d
                })
                .collect()
        })
        .collect()
}
