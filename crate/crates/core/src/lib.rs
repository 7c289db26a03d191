//! Deciding and cross-validating the conditions for total-variation
//! convergence of finite Markov chains.
//!
//! Every checker works on a [`Kernel`] and an invariant [`Distribution`]
//! and returns a [`ConditionReport`] with a witness. The core is generic
//! over the scalar ([`f64`] or [`f32`]); the `*64` aliases are the usual
//! entry points.
//!
//! ```
//! use tvconv::{fixture, verdict, Condition};
//!
//! let fx = fixture::<f64>("peri", 2).unwrap();
//! let audit = verdict::cross_check(&fx.kernel, &fx.mu).unwrap();
//! assert_eq!(audit.holds(Condition::P3), Some(false));
//! ```

// `!(a > b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod chain;
pub mod coupling;
pub mod equivalence;
pub mod error;
pub mod graph;
pub mod harness;
mod linalg;
pub mod report;
pub mod scalar;
pub mod structure;
pub mod verdict;

pub use analysis::Analysis;
pub use chain::{Distribution, InvariantSet, Kernel, StateSpace};
pub use error::{Error, Result};
pub use harness::{fixture, random_chain, ChainSpecFile, GeneratorParams};
pub use report::{Condition, ConditionReport, Level, Method, Witness};
pub use scalar::Prob;

pub type Kernel64 = Kernel<f64>;
pub type Kernel32 = Kernel<f32>;
pub type Distribution64 = Distribution<f64>;
pub type Distribution32 = Distribution<f32>;
pub type ConditionReport64 = ConditionReport<f64>;
pub type ConditionReport32 = ConditionReport<f32>;
pub type Analysis64<'k> = Analysis<'k, f64>;
