//! Fixtures shared by the benchmarks.

use deltashock::nt_scheme::SimConfig;
use deltashock::{Eps, State};

pub fn compressive_pair() -> (State, State) {
    (State::new(1.0, 1.0).unwrap(), State::new(-1.0, 1.5).unwrap())
}

/// Default simulation setup with `n_cells` cells.
pub fn sim_config(eps: f64, n_cells: usize) -> SimConfig {
    let mut c = SimConfig::with_defaults(Eps::new(eps).unwrap());
    c.grid.n_cells = n_cells;
    c
}
