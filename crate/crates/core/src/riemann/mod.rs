//! Exact Riemann solver for the deposition model at fixed `eps > 0`.
//!
//! The system is of Temple class: each wave curve through a state is a
//! straight line on which one Riemann invariant is constant, so the
//! intermediate state is the intersection of two lines and needs no
//! iteration. Shocks carry `u_r < u_l`, rarefactions `u_r > u_l`.

mod solution;
mod state;

pub use solution::{
    classify, intermediate_state, lax_admissible, rankine_hugoniot_residual, shock_speed_1, shock_speed_2,
    solve_riemann, Family, RiemannSolution, Wave, WavePattern, DEGENERATE_WAVE,
};
pub use state::{eigenvalues, eigenvectors, riemann_invariants, state_from_invariants, Eps, Invariants, State};

pub(crate) use state::spectral_radius;
