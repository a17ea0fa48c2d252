//! Exact Riemann solver for the limit system
//!
//! ```text
//! u_t + (u^2)_x = 0,    v_t + (u v)_x = 0
//! ```
//!
//! with characteristic speeds `u` (linearly degenerate, contacts `J`) and
//! `2u` (genuinely nonlinear, rarefactions `R` and shocks `S`). When
//! `u_+ <= 0 <= u_-` no bounded solution exists and the answer is a
//! delta-shock: `v` carries a Dirac mass of weight `w1 * t` moving with speed
//! `u_- + u_+`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::riemann::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LimitPattern {
    #[serde(rename = "CONSTANT")]
    Constant,
    /// `u_- = u_+ != 0`: a single contact.
    #[serde(rename = "J")]
    Contact,
    /// `R+J`, `u_- < u_+ < 0`.
    #[serde(rename = "R+J")]
    RarefactionContact,
    /// `J+R`, `0 < u_- < u_+`.
    #[serde(rename = "J+R")]
    ContactRarefaction,
    /// `R+R`, `u_- <= 0 <= u_+` (not both zero), with a vacuum at `xi = 0`.
    #[serde(rename = "R+R")]
    TwoRarefaction,
    /// `S+J`, `u_+ < u_- < 0`.
    #[serde(rename = "S+J")]
    ShockContact,
    /// `J+S`, `0 < u_+ < u_-`.
    #[serde(rename = "J+S")]
    ContactShock,
    /// `u_+ <= 0 <= u_-`.
    #[serde(rename = "DELTA")]
    Delta,
}

impl fmt::Display for LimitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LimitPattern::Constant => "CONSTANT",
            LimitPattern::Contact => "J",
            LimitPattern::RarefactionContact => "R+J",
            LimitPattern::ContactRarefaction => "J+R",
            LimitPattern::TwoRarefaction => "R+R",
            LimitPattern::ShockContact => "S+J",
            LimitPattern::ContactShock => "J+S",
            LimitPattern::Delta => "DELTA",
        };
        f.write_str(s)
    }
}

/// Delta-shock `x(t) = speed t` carrying weight `w1 t` and assigned velocity `u_delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaShock {
    pub speed: f64,
    pub u_delta: f64,
    pub weight_rate: f64,
}

impl DeltaShock {
    /// Solution of the generalized jump conditions under the entropy condition.
    pub fn between(left: State, right: State) -> Self {
        let sigma = left.u() + right.u();
        DeltaShock { speed: sigma, u_delta: sigma, weight_rate: left.u() * right.v() - right.u() * left.v() }
    }

    pub fn weight(&self, t: f64) -> f64 {
        self.weight_rate * t
    }

    pub fn position(&self, t: f64) -> f64 {
        self.speed * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitWave {
    Contact {
        speed: f64,
    },
    /// `xi = 2u` with `v / u` frozen at `density_ratio`.
    Fan {
        xi_start: f64,
        xi_end: f64,
        density_ratio: f64,
    },
    Shock {
        speed: f64,
    },
    Delta(DeltaShock),
}

impl LimitWave {
    pub fn start(&self) -> f64 {
        match *self {
            LimitWave::Contact { speed } | LimitWave::Shock { speed } => speed,
            LimitWave::Fan { xi_start, .. } => xi_start,
            LimitWave::Delta(d) => d.speed,
        }
    }

    pub fn end(&self) -> f64 {
        match *self {
            LimitWave::Fan { xi_end, .. } => xi_end,
            _ => self.start(),
        }
    }

    /// True for waves across which the solution jumps.
    pub fn is_discontinuity(&self) -> bool {
        !matches!(self, LimitWave::Fan { .. })
    }
}

/// Value of a limit-system solution at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureState {
    Regular(State),
    /// The degenerate joint state `u = 0, v = 0+` between two fans.
    Vacuum {
        u: f64,
    },
    /// The Dirac part on the delta-shock path.
    Atom {
        weight: f64,
        velocity: f64,
    },
}

impl MeasureState {
    /// `(u, v)` for regular and vacuum points.
    pub fn pointwise(&self) -> Option<(f64, f64)> {
        match *self {
            MeasureState::Regular(s) => Some((s.u(), s.v())),
            MeasureState::Vacuum { u } => Some((u, 0.0)),
            MeasureState::Atom { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSolution {
    pub left: State,
    pub right: State,
    pub pattern: LimitPattern,
    pub waves: Vec<LimitWave>,
    /// Constant state between the two waves of `R+J`, `J+R`, `S+J`, `J+S`.
    pub middle: Option<State>,
    /// Location of the vacuum point of `R+R`.
    pub vacuum_at: Option<f64>,
}

impl LimitSolution {
    pub fn delta(&self) -> Option<DeltaShock> {
        self.waves.iter().find_map(|w| match *w {
            LimitWave::Delta(d) => Some(d),
            _ => None,
        })
    }

    /// Locations in `xi` where the limit solution is discontinuous.
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.waves.iter().filter(|w| w.is_discontinuity()).map(|w| w.start()).collect();
        // R+R with u_- = 0 or u_+ = 0 jumps into the vacuum.
        if let Some(x) = self.vacuum_at {
            if self.left.u() == 0.0 || self.right.u() == 0.0 {
                out.push(x);
            }
        }
        out
    }
}

pub fn solve_riemann_limit(left: State, right: State) -> LimitSolution {
    let (um, vm, up, vp) = (left.u(), left.v(), right.u(), right.v());
    let mk = |pattern, waves, middle, vacuum_at| LimitSolution { left, right, pattern, waves, middle, vacuum_at };

    if left == right {
        return mk(LimitPattern::Constant, Vec::new(), None, None);
    }
    if up <= 0.0 && 0.0 <= um {
        return mk(LimitPattern::Delta, vec![LimitWave::Delta(DeltaShock::between(left, right))], None, None);
    }
    if um == up {
        return mk(LimitPattern::Contact, vec![LimitWave::Contact { speed: um }], None, None);
    }
    if um <= 0.0 && 0.0 <= up {
        let waves = vec![
            LimitWave::Fan { xi_start: 2.0 * um, xi_end: 0.0, density_ratio: vm / um },
            LimitWave::Fan { xi_start: 0.0, xi_end: 2.0 * up, density_ratio: vp / up },
        ];
        return mk(LimitPattern::TwoRarefaction, waves, None, Some(0.0));
    }
    if up < 0.0 && um < 0.0 {
        // u/v fixed across the 2-wave; the contact then jumps to v_+.
        let middle = State::new(up, vm * up / um).expect("same-sign velocities");
        let (pattern, first) = if um < up {
            (
                LimitPattern::RarefactionContact,
                LimitWave::Fan { xi_start: 2.0 * um, xi_end: 2.0 * up, density_ratio: vm / um },
            )
        } else {
            (LimitPattern::ShockContact, LimitWave::Shock { speed: um + up })
        };
        return mk(pattern, vec![first, LimitWave::Contact { speed: up }], Some(middle), None);
    }
    // 0 < u_-, 0 < u_+
    let middle = State::new(um, vp * um / up).expect("same-sign velocities");
    let (pattern, second) = if um < up {
        (
            LimitPattern::ContactRarefaction,
            LimitWave::Fan { xi_start: 2.0 * um, xi_end: 2.0 * up, density_ratio: vp / up },
        )
    } else {
        (LimitPattern::ContactShock, LimitWave::Shock { speed: um + up })
    };
    mk(pattern, vec![LimitWave::Contact { speed: um }, second], Some(middle), None)
}

/// Residuals of the generalized jump conditions, `[g] = g_- - g_+`:
/// `(dx/dt - u_delta, -u_delta [u] + [u^2], dw/dt - (-u_delta [v] + [u v]))`.
pub fn grh_residual(ds: &DeltaShock, left: State, right: State) -> (f64, f64, f64) {
    let (um, vm, up, vp) = (left.u(), left.v(), right.u(), right.v());
    let jump_u = um - up;
    let jump_v = vm - vp;
    let r1 = ds.speed - ds.u_delta;
    let r2 = -ds.u_delta * jump_u + (um * um - up * up);
    let r3 = ds.weight_rate - (-ds.u_delta * jump_v + (um * vm - up * vp));
    (r1, r2, r3)
}

/// Overcompressive entropy condition `2u_+ <= u_+ <= u_delta <= u_- <= 2u_-`.
pub fn entropy_check(ds: &DeltaShock, left: State, right: State) -> bool {
    let (um, up) = (left.u(), right.u());
    2.0 * up <= up && up <= ds.u_delta && ds.u_delta <= um && um <= 2.0 * um
}

impl LimitSolution {
    fn sample_xi(&self, xi: f64) -> MeasureState {
        let regular = |u: f64, ratio: f64| {
            State::new(u, u * ratio).map(MeasureState::Regular).unwrap_or(MeasureState::Vacuum { u })
        };
        if let Some(x) = self.vacuum_at {
            if xi == x {
                return MeasureState::Vacuum { u: 0.0 };
            }
        }
        let mut current = self.left;
        for (k, wave) in self.waves.iter().enumerate() {
            if xi <= wave.start() {
                return MeasureState::Regular(current);
            }
            if let LimitWave::Fan { xi_end, density_ratio, .. } = *wave {
                if xi <= xi_end {
                    return regular(0.5 * xi, density_ratio);
                }
            }
            current = if k + 1 == self.waves.len() { self.right } else { self.middle.unwrap_or(self.right) };
        }
        MeasureState::Regular(current)
    }
}

/// Samples the solution at `(x, t)`. On a delta-shock path the atom is returned.
pub fn evaluate_limit(sol: &LimitSolution, x: f64, t: f64) -> Result<MeasureState> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Precondition(format!("t must be positive (got {t})")));
    }
    if let Some(ds) = sol.delta() {
        let path = ds.position(t);
        return Ok(if x < path {
            MeasureState::Regular(sol.left)
        } else if x == path {
            MeasureState::Atom { weight: ds.weight(t), velocity: ds.u_delta }
        } else {
            MeasureState::Regular(sol.right)
        });
    }
    Ok(sol.sample_xi(x / t))
}

/// Self-similar sampling for classical patterns; `None` on a delta path.
pub fn evaluate_limit_xi(sol: &LimitSolution, xi: f64) -> MeasureState {
    evaluate_limit(sol, xi, 1.0).expect("t = 1 is valid")
}

/// `<w(s) delta_L, psi>` for the path `x(s) = speed s, t(s) = s`, integrated over `[0, t_max]`.
pub fn pair_with_test_function<F: Fn(f64, f64) -> f64>(ds: &DeltaShock, psi: F, t_max: f64) -> f64 {
    if ds.weight_rate == 0.0 || t_max <= 0.0 {
        return 0.0;
    }
    quadrature::integrate(|s| ds.weight_rate * s * psi(ds.speed * s, s), 0.0, t_max, 1e-12)
}
