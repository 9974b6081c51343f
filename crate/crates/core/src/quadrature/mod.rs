//! Principal-value multipliers `m(ξ) = p.v.∫ e^{i(Q(t) - tξ)} dt/t`, their per-scale pieces,
//! and a brute-force reference.
//!
//! The integral is symmetrized about 0. Near the origin the symmetric integrand is smooth and
//! handled by Kronrod quadrature; beyond, each branch `e^{iφ(t)}/t` is split at the blocks
//! `λ^l` and at the zeros of `φ'` and `φ''`, so every segment has a monotone, one-signed
//! `φ'`. Segments with little phase variation use Kronrod, the rest Levin collocation. The
//! remainder past the last block is bounded by one integration by parts.

mod engine;
mod gauss_kronrod;
mod levin;
mod multiplier;
mod oracle;
mod phase;
mod piece;

pub use multiplier::{
    multiplier_sample, multiplier_sup, normalizing_scale, pv_multiplier, working_window, GridSpec, MultiplierSample,
    SupReport, WorkingWindow,
};
pub use oracle::{pv_multiplier_oracle, OracleValue};
pub use phase::{Phase, SparseSum};
pub use piece::{
    decay_fit, piece_multiplier, piece_sample, piece_support, second_derivative_chain, stationary_xi_grid, ChainReport,
    DecayFit, PieceSample,
};
