//! Digitwise p-adic regression.
//!
//! The last digit of the coefficient vector is estimated by regression modulo
//! p on the reduced samples. Samples whose residual is not divisible by `p`
//! are then dropped, the surviving residuals divided by `p`, and the process
//! repeats one digit higher, `E` times in total.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fp::PrimeModulus;
use crate::modp::{regress_with_rng, Dataset, RegressConfig, RunStats};
use crate::seeding;
use crate::zp::{zp_affine_eval, ZpTrunc};

/// Samples over Z/p^E.
///
/// Features are always kept at the original precision `E`, since later
/// digits need their higher digits. Targets live at the current working
/// precision `E - e` after `e` peels; the original targets and the original
/// sample indices are retained alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicDataset {
    p: PrimeModulus,
    dim: usize,
    full_precision: u32,
    precision: u32,
    xs: Vec<Vec<ZpTrunc>>,
    ys: Vec<ZpTrunc>,
    origin_ys: Vec<ZpTrunc>,
    indices: Vec<usize>,
}

impl PadicDataset {
    pub fn new(
        p: PrimeModulus,
        dim: usize,
        precision: u32,
        xs: Vec<Vec<ZpTrunc>>,
        ys: Vec<ZpTrunc>,
    ) -> Result<Self> {
        if precision == 0 {
            return Err(Error::InvalidParameter("precision must be at least 1".into()));
        }
        if ys.is_empty() {
            return Err(Error::InvalidParameter("dataset must be non-empty".into()));
        }
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                expected: ys.len(),
                found: xs.len(),
            });
        }
        for value in xs.iter().flatten().chain(&ys) {
            if value.prime() != p {
                return Err(Error::ModulusMismatch {
                    left: p.get(),
                    right: value.prime().get(),
                });
            }
            if value.precision() != precision {
                return Err(Error::PrecisionMismatch {
                    left: precision,
                    right: value.precision(),
                });
            }
        }
        if let Some(x) = xs.iter().find(|x| x.len() != dim) {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: x.len(),
            });
        }
        Ok(Self {
            p,
            dim,
            full_precision: precision,
            precision,
            indices: (0..ys.len()).collect(),
            origin_ys: ys.clone(),
            xs,
            ys,
        })
    }

    pub fn prime(&self) -> PrimeModulus {
        self.p
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

    /// Current working precision `E - e`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn full_precision(&self) -> u32 {
        self.full_precision
    }

    /// Number of digits peeled so far.
    pub fn level(&self) -> u32 {
        self.full_precision - self.precision
    }

    /// Original index of each surviving sample.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Features at full precision.
    pub fn x(&self, i: usize) -> &[ZpTrunc] {
        &self.xs[i]
    }

    /// Target at the working precision.
    pub fn y(&self, i: usize) -> &ZpTrunc {
        &self.ys[i]
    }

    pub fn origin_y(&self, i: usize) -> &ZpTrunc {
        &self.origin_ys[i]
    }

    /// Features truncated to the working precision.
    pub fn working_x(&self, i: usize) -> Vec<ZpTrunc> {
        self.xs[i]
            .iter()
            .map(|v| v.truncate(self.precision).expect("working precision never exceeds E"))
            .collect()
    }

    /// Reduction of every sample modulo `p`.
    pub fn reduce_mod_p(&self) -> Dataset {
        let xs = self
            .xs
            .iter()
            .flat_map(|x| x.iter().map(ZpTrunc::residue_mod_p))
            .collect();
        let ys = self.ys.iter().map(ZpTrunc::residue_mod_p).collect();
        Dataset::from_flat(self.p, self.dim, xs, ys).expect("shape validated at construction")
    }
}

/// Last digits of the coefficient vector, as integers in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitEstimate {
    pub theta: Vec<u64>,
}

impl DigitEstimate {
    fn at_precision(&self, p: PrimeModulus, precision: u32) -> Vec<ZpTrunc> {
        self.theta
            .iter()
            .map(|&t| ZpTrunc::new(p, precision, t))
            .collect()
    }
}

pub fn last_digit_regression(data: &PadicDataset, config: &RegressConfig) -> Result<DigitEstimate> {
    let mut rng = seeding::fit_rng(config.seed);
    last_digit_with_rng(data, config, &mut rng).map(|(theta, _)| theta)
}

fn last_digit_with_rng<R: Rng>(
    data: &PadicDataset,
    config: &RegressConfig,
    rng: &mut R,
) -> Result<(DigitEstimate, RunStats)> {
    let fit = regress_with_rng(&data.reduce_mod_p(), config, rng)?;
    Ok((
        DigitEstimate {
            theta: fit.coefficients.into_inner(),
        },
        fit.stats,
    ))
}

/// Does `theta` explain sample `i` to the last digit, i.e. is
/// `y_i - <theta, x_i>` divisible by `p` at the working precision?
pub fn theta_residual_divisible(data: &PadicDataset, theta: &DigitEstimate, i: usize) -> bool {
    let p = data.p;
    let x: Vec<u64> = data.xs[i].iter().map(ZpTrunc::residue_mod_p).collect();
    p.sub(data.ys[i].residue_mod_p(), p.affine_raw(&theta.theta, &x)) == 0
}

/// One digit of peeling at level `level`.
///
/// `accumulated` must already include `p^level * theta`. Keeps the samples
/// whose original residual `y_i - <accumulated, x_i>` has valuation at least
/// `level + 1`, and replaces their targets by `(y_i - <theta, x_i>) / p`. The
/// result has working precision one lower.
pub fn peel_level(
    data: &PadicDataset,
    theta: &DigitEstimate,
    accumulated: &[ZpTrunc],
    level: u32,
) -> Result<PadicDataset> {
    if data.level() != level {
        return Err(Error::InvalidParameter(format!(
            "dataset is at level {}, not {level}",
            data.level()
        )));
    }
    if data.precision == 0 {
        return Err(Error::InvalidParameter("no digits left to peel".into()));
    }
    if theta.theta.len() != data.dim + 1 || accumulated.len() != data.dim + 1 {
        return Err(Error::LengthMismatch {
            expected: data.dim + 1,
            found: theta.theta.len().min(accumulated.len()),
        });
    }
    let theta_work = theta.at_precision(data.p, data.precision);
    let mut next = PadicDataset {
        p: data.p,
        dim: data.dim,
        full_precision: data.full_precision,
        precision: data.precision - 1,
        xs: Vec::new(),
        ys: Vec::new(),
        origin_ys: Vec::new(),
        indices: Vec::new(),
    };
    for i in 0..data.len() {
        let residual = data.origin_ys[i].sub(&zp_affine_eval(accumulated, &data.xs[i])?)?;
        let keep = residual.valuation() > level;
        if !keep {
            continue;
        }
        let local = data.ys[i].sub(&zp_affine_eval(&theta_work, &data.working_x(i))?)?;
        next.ys.push(local.exact_div_p()?);
        next.xs.push(data.xs[i].clone());
        next.origin_ys.push(data.origin_ys[i].clone());
        next.indices.push(data.indices[i]);
    }
    if next.ys.is_empty() {
        return Err(Error::EmptyLocus { level });
    }
    Ok(next)
}

/// Coefficients modulo `p^E` with the per-digit run statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitwiseFit {
    pub coefficients: Vec<ZpTrunc>,
    pub levels: Vec<RunStats>,
}

impl DigitwiseFit {
    pub fn total_stats(&self) -> RunStats {
        let mut total = RunStats::default();
        for s in &self.levels {
            total.merge(s);
        }
        total
    }
}

/// Estimates the coefficient vector modulo `p^E`, one digit per level. A
/// single random stream is threaded through all levels, so lower precisions
/// see exactly the same draws as the first levels of a higher one.
pub fn trailing_digits_regression(data: &PadicDataset, config: &RegressConfig) -> Result<DigitwiseFit> {
    if data.level() != 0 {
        return Err(Error::InvalidParameter(
            "digitwise regression starts from an unpeeled dataset".into(),
        ));
    }
    let p = data.p;
    let full = data.full_precision;
    let mut rng = seeding::fit_rng(config.seed);
    let mut coefficients = vec![ZpTrunc::zero(p, full); data.dim + 1];
    let mut levels = Vec::with_capacity(full as usize);
    let mut current = data.clone();
    for level in 0..full {
        let (theta, stats) = last_digit_with_rng(&current, config, &mut rng)?;
        levels.push(stats);
        let digit_weight = ZpTrunc::from_biguint(p, full, &ZpTrunc::modulus_big(p, level));
        for (c, &t) in coefficients.iter_mut().zip(&theta.theta) {
            *c = c.add(&ZpTrunc::new(p, full, t).mul(&digit_weight)?)?;
        }
        if level + 1 < full {
            current = peel_level(&current, &theta, &coefficients, level)?;
        }
    }
    Ok(DigitwiseFit {
        coefficients,
        levels,
    })
}
