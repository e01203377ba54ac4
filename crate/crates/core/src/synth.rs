//! Seeded synthetic instances with ground truth.
//!
//! [`gen_modp_instance`] follows the experimental protocol for the mod-p
//! tables: a uniform nonzero truth, uniform features, an exact-size random
//! noise set whose targets are redrawn uniformly. [`gen_padic_instance`] adds
//! digitwise noise: each sample survives level `e` with probability `1 - r`
//! and, if corrupted there, gets a residual of valuation exactly `e`.

use num_bigint::BigUint;
use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fp::{FpVector, PrimeModulus};
use crate::modp::Dataset;
use crate::padic::PadicDataset;
use crate::seeding;
use crate::zp::{zp_affine_eval, ZpTrunc};

#[derive(Debug, Clone, PartialEq)]
pub struct ModpInstance {
    pub dataset: Dataset,
    pub truth: FpVector,
    /// Indices whose target was redrawn, ascending. A redrawn target may
    /// coincide with the true value.
    pub noise_indices: Vec<usize>,
    pub r: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PadicInstance {
    pub dataset: PadicDataset,
    pub truth: Vec<ZpTrunc>,
    /// Valuation of `y_i - <truth, x_i>` per sample; `E` for clean samples.
    pub corruption_levels: Vec<u32>,
    pub r: f64,
    pub seed: u64,
}

fn check_rate(r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("noise rate {r} outside [0, 1)")));
    }
    Ok(())
}

pub fn gen_modp_instance(p: PrimeModulus, dim: usize, n: usize, r: f64, seed: u64) -> Result<ModpInstance> {
    check_rate(r)?;
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let mut rng = seeding::generator_rng(seed);
    let pv = p.get();
    let truth = loop {
        let c: Vec<u64> = (0..=dim).map(|_| rng.random_range(0..pv)).collect();
        if c.iter().any(|&v| v != 0) {
            break c;
        }
    };
    let xs: Vec<u64> = (0..n * dim).map(|_| rng.random_range(0..pv)).collect();
    let noise_count = (r * n as f64).round() as usize;
    let mut noise_indices = index::sample(&mut rng, n, noise_count).into_vec();
    noise_indices.sort_unstable();

    let mut ys: Vec<u64> = (0..n)
        .map(|i| p.affine_raw(&truth, &xs[i * dim..(i + 1) * dim]))
        .collect();
    for &i in &noise_indices {
        ys[i] = rng.random_range(0..pv);
    }
    let instance = ModpInstance {
        dataset: Dataset::from_flat(p, dim, xs, ys)?,
        truth: FpVector::new(p, truth),
        noise_indices,
        r,
        seed,
    };
    debug_assert!(modp_invariants_hold(&instance));
    Ok(instance)
}

/// Clean samples lie on the truth and the noise set has the prescribed size.
pub fn modp_invariants_hold(inst: &ModpInstance) -> bool {
    let data = &inst.dataset;
    let p = data.modulus();
    let expected = (inst.r * data.len() as f64).round() as usize;
    let mut noisy = vec![false; data.len()];
    inst.noise_indices.iter().for_each(|&i| noisy[i] = true);
    inst.truth.as_slice().iter().any(|&c| c != 0)
        && inst.noise_indices.len() == expected
        && (0..data.len())
            .filter(|&i| !noisy[i])
            .all(|i| p.affine_raw(inst.truth.as_slice(), data.x(i)) == data.y(i))
}

/// Uniform residue modulo `p^precision`.
pub(crate) fn random_residue<R: Rng>(rng: &mut R, p: PrimeModulus, precision: u32) -> ZpTrunc {
    match p.get().checked_pow(precision) {
        Some(m) => ZpTrunc::new(p, precision, rng.random_range(0..m)),
        None => {
            let mut acc = BigUint::ZERO;
            for _ in 0..precision {
                acc = acc * p.get() + rng.random_range(0..p.get());
            }
            ZpTrunc::from_biguint(p, precision, &acc)
        }
    }
}

/// Uniform unit (nonzero last digit) modulo `p^precision`, `precision >= 1`.
fn random_unit<R: Rng>(rng: &mut R, p: PrimeModulus, precision: u32) -> ZpTrunc {
    let low = rng.random_range(1..p.get());
    let high = random_residue(rng, p, precision - 1).to_biguint();
    ZpTrunc::from_biguint(p, precision, &(high * p.get() + low))
}

pub fn gen_padic_instance(
    p: PrimeModulus,
    dim: usize,
    precision: u32,
    n: usize,
    r: f64,
    seed: u64,
) -> Result<PadicInstance> {
    check_rate(r)?;
    if precision == 0 {
        return Err(Error::InvalidParameter("E must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let mut rng = seeding::generator_rng(seed);
    let truth: Vec<ZpTrunc> = (0..=dim).map(|_| random_residue(&mut rng, p, precision)).collect();
    let xs: Vec<Vec<ZpTrunc>> = (0..n)
        .map(|_| (0..dim).map(|_| random_residue(&mut rng, p, precision)).collect())
        .collect();
    let mut ys = Vec::with_capacity(n);
    let mut corruption_levels = Vec::with_capacity(n);
    for x in &xs {
        let clean = zp_affine_eval(&truth, x)?;
        let mut level = 0;
        while level < precision && !rng.random_bool(r) {
            level += 1;
        }
        let y = if level < precision {
            let shift = ZpTrunc::from_biguint(p, precision, &ZpTrunc::modulus_big(p, level));
            let unit = random_unit(&mut rng, p, precision - level);
            let perturbation = ZpTrunc::from_biguint(p, precision, &unit.to_biguint()).mul(&shift)?;
            clean.add(&perturbation)?
        } else {
            clean
        };
        ys.push(y);
        corruption_levels.push(level);
    }
    let instance = PadicInstance {
        dataset: PadicDataset::new(p, dim, precision, xs, ys)?,
        truth,
        corruption_levels,
        r,
        seed,
    };
    debug_assert!(padic_invariants_hold(&instance));
    Ok(instance)
}

/// Every residual has exactly the recorded valuation.
pub fn padic_invariants_hold(inst: &PadicInstance) -> bool {
    let data = &inst.dataset;
    (0..data.len()).all(|i| {
        zp_affine_eval(&inst.truth, data.x(i))
            .and_then(|v| data.y(i).sub(&v))
            .map(|res| res.valuation() == inst.corruption_levels[i])
            .unwrap_or(false)
    })
}
