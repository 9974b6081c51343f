//! Oscillatory singular integrals `p.v.∫ f(x - t) e^{iQ(t)} dt/t` with fewnomial phases
//! `Q(t) = Σ a_j t^{α_j}`.
//!
//! - [`fewnomial`]: the phase type and its integer scale constants.
//! - [`decomposition`]: bad/good scales, good components and partitions of unity.
//! - [`quadrature`]: the Fourier multiplier `m(ξ)`, per-scale pieces and decay fits.
//! - [`experiments`]: seeded ensembles, sweeps and the structural property suite.
//! - [`cli`]: the `oscint` command line.

// `!(x <= y)` is used on purpose so that NaN counts as failure
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decomposition;
pub mod error;
pub mod experiments;
pub mod fewnomial;
pub mod quadrature;

pub use error::{Error, Result};
pub use fewnomial::Fewnomial;
