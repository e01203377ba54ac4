//! Robust linear regression over finite fields and truncated p-adic integers.
//!
//! Given samples `(x_i, y_i)` where most satisfy `y_i = c_0 + <c', x_i>`
//! exactly and the rest are arbitrary, the solvers recover `c` by randomized
//! search: grow an echelon form from random samples, and accept a candidate
//! once the samples it explains outnumber what a random hyperplane would
//! explain. Over `Z/p^E` the same search is run one p-adic digit at a time.

pub mod cli;
pub mod echelon;
pub mod error;
pub mod fp;
pub mod instance_file;
pub mod modp;
pub mod padic;
pub mod seeding;
pub mod synth;
pub mod zp;

pub use echelon::{membership, EchelonForm, EquationSystem, InsertOutcome};
pub use error::{Error, Result};
pub use fp::{fp_affine_eval, fp_inv, FpScalar, FpVector, PrimeModulus};
pub use modp::{linear_regression_mod_p, noise_free_locus, noise_free_matrix, Dataset, GateScale, ModpFit, RegressConfig, RunStats};
pub use padic::{last_digit_regression, trailing_digits_regression, DigitwiseFit, PadicDataset};
pub use synth::{gen_modp_instance, gen_padic_instance, ModpInstance, PadicInstance};
pub use zp::{zp_affine_eval, zp_exact_div_p, zp_valuation, ZpTrunc};
