//! A finite-precision p-adic computation laboratory.

pub mod cyclotomic;
pub mod error;
pub mod function;
pub mod integral;
pub mod padic;

pub use cyclotomic::{enumerate_characters, Character, CycloElement, CycloRing};
pub use error::{Error, Result};
pub use function::{eval_fn, parse_fn, Evaluator, ParseEnv, UDFunction};
pub use integral::{
    bernoulli_exact, iq_levels, iq_limit, laplace_closed_form, measure_ball, riemann_sum,
    shift_identity_residual, ClosedForm, IntegralConfig, IntegralResult, LevelValue,
};
pub use padic::{PadicScalar, PrimeContext, QConfig, ValBound};
