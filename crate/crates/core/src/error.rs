use thiserror::Error;

/// Errors produced by the solvers and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("v must be positive (got {0})")]
    NonPositiveDensity(f64),

    #[error("state components must be finite (got u={u}, v={v})")]
    NonFinite { u: f64, v: f64 },

    #[error("eps must be positive and finite (got {0})")]
    InvalidEps(f64),

    #[error("riemann invariants must satisfy w < 0 < z (got w={w}, z={z})")]
    InvariantsOutOfRange { w: f64, z: f64 },

    #[error("discontinuity is not admissible: need u_r < u_l (got u_l={u_l}, u_r={u_r})")]
    NotAdmissible { u_l: f64, u_r: f64 },

    #[error("no closed-form limit targets for mixed-regime data")]
    NotCovered,

    #[error("test function is not constant near sigma={sigma}")]
    NotFlat { sigma: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical instability at t={t}: max wave speed {speed}")]
    Unstable { t: f64, speed: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
