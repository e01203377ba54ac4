//! Randomized consensus regression modulo p.
//!
//! A candidate index set is grown one random sample at a time inside an
//! [`EchelonForm`]. Below the threshold `n` samples are accepted blindly; from
//! `n` on, every extension must pass the consensus gate, which compares the
//! number of samples lying on the candidate hull against `#I`. A candidate that
//! cannot be extended `rep` times in a row is discarded and the search
//! restarts from scratch.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::echelon::{EchelonForm, InsertOutcome};
use crate::error::{Error, Result};
use crate::fp::{FpScalar, FpVector, PrimeModulus};
use crate::seeding;

/// Samples `(x_i, y_i)` over F_p, indexed densely by `0..N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    modulus: PrimeModulus,
    dim: usize,
    xs: Vec<u64>,
    ys: Vec<u64>,
}

impl Dataset {
    pub fn new(modulus: PrimeModulus, dim: usize, xs: &[FpVector], ys: &[FpScalar]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                expected: xs.len(),
                found: ys.len(),
            });
        }
        let mut flat = Vec::with_capacity(xs.len() * dim);
        for x in xs {
            if x.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    found: x.len(),
                });
            }
            if x.modulus() != modulus {
                return Err(Error::ModulusMismatch {
                    left: modulus.get(),
                    right: x.modulus().get(),
                });
            }
            flat.extend_from_slice(x.as_slice());
        }
        if let Some(y) = ys.iter().find(|y| y.modulus() != modulus) {
            return Err(Error::ModulusMismatch {
                left: modulus.get(),
                right: y.modulus().get(),
            });
        }
        Self::from_flat(modulus, dim, flat, ys.iter().map(|y| y.value()).collect())
    }

    /// Builds a dataset from a row-major `N x D` feature buffer; entries are
    /// reduced modulo `p`.
    pub fn from_flat(modulus: PrimeModulus, dim: usize, mut xs: Vec<u64>, mut ys: Vec<u64>) -> Result<Self> {
        if ys.is_empty() {
            return Err(Error::InvalidParameter("dataset must be non-empty".into()));
        }
        if xs.len() != ys.len() * dim {
            return Err(Error::LengthMismatch {
                expected: ys.len() * dim,
                found: xs.len(),
            });
        }
        xs.iter_mut().for_each(|v| *v = modulus.reduce(*v));
        ys.iter_mut().for_each(|v| *v = modulus.reduce(*v));
        Ok(Self {
            modulus,
            dim,
            xs,
            ys,
        })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    #[inline]
    pub fn x(&self, i: usize) -> &[u64] {
        &self.xs[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn y(&self, i: usize) -> u64 {
        self.ys[i]
    }

    pub fn x_vector(&self, i: usize) -> FpVector {
        FpVector::from_canonical(self.modulus, self.x(i).to_vec())
    }

    pub fn y_scalar(&self, i: usize) -> FpScalar {
        self.modulus.scalar(self.ys[i])
    }

    fn insert(&self, form: &mut EchelonForm, i: usize) -> InsertOutcome {
        form.insert_raw(self.x(i), self.y(i))
    }
}

/// How the consensus gate scales the hull count before comparing with `#I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateScale {
    /// `scale = 2` when the form has one row, else `p^(L-1)`, with `L` the
    /// row count.
    RowCount,
    /// Scale driven by the codimension `j = D + 2 - L` of the hull: `2` when
    /// `j = 1` (majority vote on a full hyperplane), else `p^j`.
    #[default]
    Codimension,
}

impl GateScale {
    /// `(base, exponent)` with `scale = base^exponent`.
    fn exponent(self, p: u64, rows: usize, dim: usize) -> (u64, u64) {
        match self {
            GateScale::RowCount if rows == 1 => (2, 1),
            GateScale::RowCount => (p, rows as u64 - 1),
            GateScale::Codimension => {
                let codim = dim + 2 - rows;
                if codim == 1 {
                    (2, 1)
                } else {
                    (p, codim as u64)
                }
            }
        }
    }

    /// The gate's scale factor, clamped to `total + 1`. Clamping preserves
    /// `scale * count > total` for every `count <= total`: once the true scale
    /// exceeds `total`, the predicate reduces to `count >= 1` either way.
    pub fn clamped_scale(self, p: u64, rows: usize, dim: usize, total: usize) -> u64 {
        let (base, exp) = self.exponent(p, rows, dim);
        clamped_pow(base, exp, total as u64 + 1)
    }
}

fn clamped_pow(base: u64, exp: u64, cap: u64) -> u64 {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc >= cap {
            return cap;
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressConfig {
    /// Consecutive failed extension trials tolerated before restarting.
    pub rep: usize,
    /// Restart budget; `None` derives one from `noise_bound`.
    pub max_restarts: Option<u64>,
    pub seed: u64,
    /// Assumed noise rate, used only for the default restart budget.
    pub noise_bound: f64,
    /// Total index draws allowed per run; `None` means `10^4 * N`.
    pub max_draws: Option<u64>,
    pub gate: GateScale,
}

impl Default for RegressConfig {
    fn default() -> Self {
        Self {
            rep: 3,
            max_restarts: None,
            seed: 0,
            noise_bound: 0.05,
            max_draws: None,
            gate: GateScale::default(),
        }
    }
}

impl RegressConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// `max_restarts`, or `ceil(10 * (1 - r)^(-n))`.
    pub fn restart_budget(&self, threshold: usize) -> u64 {
        if let Some(b) = self.max_restarts {
            return b;
        }
        let r = self.noise_bound.clamp(0.0, 0.99);
        let expected = (1.0 - r).powi(-(threshold as i32));
        let budget = (10.0 * expected).ceil();
        if budget.is_finite() && budget < (u64::MAX / 2) as f64 {
            budget as u64
        } else {
            u64::MAX / 2
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rep == 0 {
            return Err(Error::InvalidParameter("rep must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Restarts of the outer loop.
    pub c0: u64,
    /// Failed extension trials past the threshold, over all restarts.
    pub c1: u64,
    /// Row count of the last candidate form.
    pub rows_reached: usize,
    /// Random index draws.
    pub draws: u64,
}

impl RunStats {
    pub fn merge(&mut self, other: &RunStats) {
        self.c0 += other.c0;
        self.c1 += other.c1;
        self.rows_reached = other.rows_reached;
        self.draws += other.draws;
    }
}

/// Number of samples lying on the hull described by `form`.
pub fn consensus_count(data: &Dataset, form: &EchelonForm) -> Result<usize> {
    let system = form.equation_system()?;
    Ok((0..data.len())
        .filter(|&i| system.contains_raw(data.x(i), data.y(i)))
        .count())
}

/// The consensus gate: is `scale * #I_W > #I`?
///
/// Counting stops as soon as the outcome is decided.
pub fn noise_free_matrix(data: &Dataset, form: &EchelonForm, gate: GateScale) -> Result<bool> {
    let system = form.equation_system()?;
    let total = data.len();
    let scale = gate.clamped_scale(data.modulus.get(), form.rank(), form.dim(), total);
    let needed = total / scale as usize + 1;
    let mut hits = 0usize;
    for i in 0..total {
        if system.contains_raw(data.x(i), data.y(i)) {
            hits += 1;
            if hits >= needed {
                return Ok(true);
            }
        } else if hits + (total - i - 1) < needed {
            return Ok(false);
        }
    }
    Ok(hits >= needed)
}

/// Builds the form of `indices` and applies the consensus gate. Contradictory
/// indices fail immediately; repeated or dependent ones add nothing.
pub fn noise_free_locus(data: &Dataset, indices: &[usize], gate: GateScale) -> Result<bool> {
    if indices.is_empty() {
        return Err(Error::InvalidParameter("index set must be non-empty".into()));
    }
    let mut form = EchelonForm::new(data.modulus, data.dim);
    for &i in indices {
        if i >= data.len() {
            return Err(Error::InvalidParameter(format!("index {i} out of range")));
        }
        if data.insert(&mut form, i) == InsertOutcome::Inconsistent {
            return Ok(false);
        }
    }
    noise_free_matrix(data, &form, gate)
}

/// Largest `k` with `p^k <= n`.
pub fn floor_log(p: u64, n: usize) -> u32 {
    let n = n as u128;
    let mut k = 0;
    let mut acc = p as u128;
    while acc <= n {
        k += 1;
        acc *= p as u128;
    }
    k
}

/// Candidate size below which the consensus gate is skipped:
/// `max(1, D + 1 - floor(log_p N))`.
pub fn threshold_n(dim: usize, p: PrimeModulus, n: usize) -> usize {
    let k = floor_log(p.get(), n.max(1)) as usize;
    (dim + 1).saturating_sub(k).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Ok,
    /// `D <= 2 floor(log_p N)`: the gate at the threshold cannot separate
    /// clean from noisy candidates and the search may never terminate.
    Warning,
}

pub fn regime_check(p: PrimeModulus, dim: usize, n: usize) -> Regime {
    if dim <= 2 * floor_log(p.get(), n.max(1)) as usize {
        Regime::Warning
    } else {
        Regime::Ok
    }
}

/// Uniform index draws over `0..len` with a global budget.
pub struct IndexSampler<'r, R: Rng> {
    rng: &'r mut R,
    len: usize,
    draws: u64,
    budget: u64,
}

impl<'r, R: Rng> IndexSampler<'r, R> {
    pub fn new(rng: &'r mut R, len: usize, budget: u64) -> Self {
        Self {
            rng,
            len,
            draws: 0,
            budget,
        }
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// `None` once the budget is spent.
    pub fn draw(&mut self) -> Option<usize> {
        if self.draws >= self.budget {
            return None;
        }
        self.draws += 1;
        Some(self.rng.random_range(0..self.len))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetSpent {
    Draws,
}

/// Grows `form` with random samples until it has `n` rows. Dependent draws are
/// resampled without counting; a contradictory draw stops early, leaving
/// fewer than `n` rows.
pub fn extend_phase1<R: Rng>(
    data: &Dataset,
    form: &mut EchelonForm,
    picked: &mut Vec<usize>,
    n: usize,
    sampler: &mut IndexSampler<'_, R>,
) -> std::result::Result<usize, BudgetSpent> {
    while form.rank() < n {
        let i = sampler.draw().ok_or(BudgetSpent::Draws)?;
        match data.insert(form, i) {
            InsertOutcome::Inserted => picked.push(i),
            InsertOutcome::Dependent => {}
            InsertOutcome::Inconsistent => break,
        }
    }
    Ok(form.rank())
}

/// Extends `form` towards `D + 1` rows, accepting a trial sample only when it
/// adds a row and the extended form passes the gate. Returns after `rep`
/// consecutive failures or on reaching `D + 1` rows.
#[allow(clippy::too_many_arguments)]
pub fn extend_phase2<R: Rng>(
    data: &Dataset,
    form: &mut EchelonForm,
    picked: &mut Vec<usize>,
    rep: usize,
    gate: GateScale,
    sampler: &mut IndexSampler<'_, R>,
    stats: &mut RunStats,
) -> std::result::Result<usize, BudgetSpent> {
    let full = data.dim + 1;
    let mut failures = 0;
    while form.rank() < full && failures < rep {
        let i = sampler.draw().ok_or(BudgetSpent::Draws)?;
        let mut trial = form.clone();
        let accepted = data.insert(&mut trial, i) == InsertOutcome::Inserted
            && noise_free_matrix(data, &trial, gate).expect("trial form is non-empty");
        if accepted {
            *form = trial;
            picked.push(i);
            failures = 0;
        } else {
            stats.c1 += 1;
            failures += 1;
        }
    }
    Ok(form.rank())
}

/// Result of a successful regression modulo p.
#[derive(Debug, Clone, PartialEq)]
pub struct ModpFit {
    pub coefficients: FpVector,
    pub stats: RunStats,
    /// Indices of the accepted candidate, in acceptance order.
    pub picked: Vec<usize>,
}

/// Estimates the coefficient vector `c` of the hyperplane `y = <c, x>` that the
/// bulk of the samples lie on.
pub fn linear_regression_mod_p(data: &Dataset, config: &RegressConfig) -> Result<ModpFit> {
    let mut rng = seeding::fit_rng(config.seed);
    regress_with_rng(data, config, &mut rng)
}

pub(crate) fn regress_with_rng<R: Rng>(
    data: &Dataset,
    config: &RegressConfig,
    rng: &mut R,
) -> Result<ModpFit> {
    config.validate()?;
    let p = data.modulus;
    if p.get() <= 3 {
        log::warn!("p = {p}: the consensus gate is prone to false positives for p in {{2, 3}}");
    }
    let n = threshold_n(data.dim, p, data.len());
    let max_restarts = config.restart_budget(n);
    let budget = config
        .max_draws
        .unwrap_or_else(|| (data.len() as u64).saturating_mul(10_000));
    let mut sampler = IndexSampler::new(rng, data.len(), budget);
    let mut stats = RunStats::default();
    let mut picked = Vec::with_capacity(data.dim + 1);

    loop {
        let mut form = EchelonForm::new(p, data.dim);
        picked.clear();
        let outcome = extend_phase1(data, &mut form, &mut picked, n, &mut sampler).and_then(|rows| {
            if rows < n || !noise_free_matrix(data, &form, config.gate).expect("non-empty form") {
                return Ok(rows);
            }
            extend_phase2(
                data,
                &mut form,
                &mut picked,
                config.rep,
                config.gate,
                &mut sampler,
                &mut stats,
            )
        });
        stats.rows_reached = form.rank();
        stats.draws = sampler.draws();
        match outcome {
            Err(BudgetSpent::Draws) => {
                return Err(Error::TrialBudgetExhausted {
                    budget: sampler.budget(),
                    stats,
                })
            }
            Ok(rows) if rows == data.dim + 1 => {
                return Ok(ModpFit {
                    coefficients: form.coefficient_vector()?,
                    stats,
                    picked,
                });
            }
            Ok(_) => {
                stats.c0 += 1;
                if stats.c0 > max_restarts {
                    return Err(Error::RestartBudgetExhausted { stats });
                }
            }
        }
    }
}
