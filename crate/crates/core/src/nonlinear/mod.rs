//! Entire nonlinearities `F(u) = Σ c_{jk} u^j ū^k` and the local Duhamel–Picard solver.

pub mod analytic;
pub mod duhamel;
pub mod solver;

pub use analytic::{algebra_constant, apply_F, AnalyticNonlinearity, Monomial, MAX_DEGREE};
pub use duhamel::{duhamel_picard, find_t0, nls_split_step, NlsSolution, MAX_DUHAMEL_ITER};
pub use solver::{LinearSolver, SplitStepPropagator};

#[cfg(test)]
mod tests;
