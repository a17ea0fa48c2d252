use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(u, v)` of the upper half phase plane: velocity-like `u` and
/// strictly positive density `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct State {
    u: f64,
    v: f64,
}

#[derive(Deserialize)]
struct RawState {
    u: f64,
    v: f64,
}

impl TryFrom<RawState> for State {
    type Error = Error;

    fn try_from(raw: RawState) -> Result<Self> {
        State::new(raw.u, raw.v)
    }
}

impl State {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite { u, v });
        }
        if v <= 0.0 {
            return Err(Error::NonPositiveDensity(v));
        }
        Ok(State { u, v })
    }

    #[inline]
    pub fn u(&self) -> f64 {
        self.u
    }

    #[inline]
    pub fn v(&self) -> f64 {
        self.v
    }
}

/// The flux parameter, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Eps(f64);

impl Eps {
    pub fn new(eps: f64) -> Result<Self> {
        if eps.is_finite() && eps > 0.0 {
            Ok(Eps(eps))
        } else {
            Err(Error::InvalidEps(eps))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Eps {
    type Error = Error;

    fn try_from(eps: f64) -> Result<Self> {
        Eps::new(eps)
    }
}

impl From<Eps> for f64 {
    fn from(eps: Eps) -> f64 {
        eps.0
    }
}

/// Riemann invariants `(w, z)`: `w` is constant across 1-waves, `z` across 2-waves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub w: f64,
    pub z: f64,
}

/// Returns `((u - r)/2, (u + r)/2)` with `r = sqrt(u^2 + 4 eps v)`.
///
/// The two halves multiply to `-eps v` and sum to `u`; the one that would
/// cancel is recovered from that product. Accepts `v >= 0` so the scheme can
/// use it on clipped cells.
#[inline]
pub(crate) fn half_roots(u: f64, v: f64, eps: f64) -> (f64, f64) {
    let ev = eps * v;
    let root = (u * u + 4.0 * ev).sqrt();
    if u >= 0.0 {
        let plus = 0.5 * (u + root);
        let minus = if plus > 0.0 { -ev / plus } else { 0.0 };
        (minus, plus)
    } else {
        let minus = 0.5 * (u - root);
        (minus, -ev / minus)
    }
}

/// Characteristic speeds `(lambda_1, lambda_2)` of the deposition model.
pub fn eigenvalues(s: State, eps: Eps) -> (f64, f64) {
    let (minus, plus) = half_roots(s.u, s.v, eps.get());
    (s.u + minus, s.u + plus)
}

/// Right eigenvectors `(r_1, r_2)`, normalised with unit first component.
pub fn eigenvectors(s: State, eps: Eps) -> ([f64; 2], [f64; 2]) {
    let (minus, plus) = half_roots(s.u, s.v, eps.get());
    let e = eps.get();
    ([1.0, -plus / e], [1.0, -minus / e])
}

/// Largest characteristic speed magnitude, valid for `v >= 0`.
#[inline]
pub(crate) fn spectral_radius(u: f64, v: f64, eps: f64) -> f64 {
    let (minus, plus) = half_roots(u, v, eps);
    (u + minus).abs().max((u + plus).abs())
}

pub fn riemann_invariants(s: State, eps: Eps) -> Invariants {
    let (minus, plus) = half_roots(s.u, s.v, eps.get());
    let e = eps.get();
    Invariants { w: -plus / e, z: -minus / e }
}

pub fn state_from_invariants(inv: Invariants, eps: Eps) -> Result<State> {
    if !(inv.w < 0.0 && inv.z > 0.0) {
        return Err(Error::InvariantsOutOfRange { w: inv.w, z: inv.z });
    }
    let e = eps.get();
    State::new(-e * (inv.w + inv.z), -e * inv.w * inv.z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(u: f64, v: f64) -> State {
        State::new(u, v).unwrap()
    }

    fn eps(e: f64) -> Eps {
        Eps::new(e).unwrap()
    }

    #[test]
    fn rejects_bad_states() {
        assert_eq!(State::new(1.0, 0.0), Err(Error::NonPositiveDensity(0.0)));
        assert!(matches!(State::new(1.0, -1.0), Err(Error::NonPositiveDensity(_))));
        assert!(matches!(State::new(f64::NAN, 1.0), Err(Error::NonFinite { .. })));
        assert!(Eps::new(0.0).is_err());
        assert!(Eps::new(-1e-3).is_err());
        assert!(Eps::new(f64::INFINITY).is_err());
    }

    #[test]
    fn state_deserialization_validates() {
        let ok: State = serde_json::from_str(r#"{"u":1.0,"v":2.0}"#).unwrap();
        assert_eq!(ok, st(1.0, 2.0));
        assert!(serde_json::from_str::<State>(r#"{"u":1.0,"v":0.0}"#).is_err());
    }

    #[test]
    fn symmetric_eigenvalues() {
        let (l1, l2) = eigenvalues(st(0.0, 1.0), eps(1.0));
        assert!((l1 + 1.0).abs() < 1e-15 && (l2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_match_jacobian() {
        // Jacobian of (u^2 + eps v, u v) w.r.t. (u, v) is [[2u, eps], [v, u]].
        let (u, v, e) = (1.0f64, 1.0, 0.25);
        let (tr, det) = (3.0 * u, 2.0 * u * u - e * v);
        let disc = (tr * tr / 4.0 - det).sqrt();
        let (j1, j2) = (tr / 2.0 - disc, tr / 2.0 + disc);
        let (l1, l2) = eigenvalues(st(u, v), eps(e));
        assert!((l1 - j1).abs() < 1e-14 && (l2 - j2).abs() < 1e-14);
        let s2 = 2f64.sqrt();
        assert!((l1 - (1.0 + (1.0 - s2) / 2.0)).abs() < 1e-15);
        assert!((l2 - (1.0 + (1.0 + s2) / 2.0)).abs() < 1e-15);
        assert!((l1 - 0.792_893_218_813_452_5).abs() < 1e-12);
    }

    #[test]
    fn eigenvectors_are_right_eigenvectors() {
        let s = st(-0.7, 2.3);
        let e = eps(0.4);
        let (l1, l2) = eigenvalues(s, e);
        let (r1, r2) = eigenvectors(s, e);
        let jac = [[2.0 * s.u(), e.get()], [s.v(), s.u()]];
        for (l, r) in [(l1, r1), (l2, r2)] {
            for (row, ri) in jac.iter().zip(r) {
                let lhs = row[0] * r[0] + row[1] * r[1];
                assert!((lhs - l * ri).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn genuine_nonlinearity() {
        // grad(lambda_i) . r_i = 2 by central differences.
        let s = st(0.6, 1.7);
        let e = eps(0.3);
        let h = 1e-6;
        let (r1, r2) = eigenvectors(s, e);
        for (i, r) in [(0usize, r1), (1, r2)] {
            let lam = |u: f64, v: f64| {
                let l = eigenvalues(st(u, v), e);
                if i == 0 {
                    l.0
                } else {
                    l.1
                }
            };
            let du = (lam(s.u() + h, s.v()) - lam(s.u() - h, s.v())) / (2.0 * h);
            let dv = (lam(s.u(), s.v() + h) - lam(s.u(), s.v() - h)) / (2.0 * h);
            assert!((du * r[0] + dv * r[1] - 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn small_eps_approaches_limit_speeds() {
        let (l1, l2) = eigenvalues(st(1.0, 1.0), eps(1e-12));
        assert!((l1 - 1.0).abs() < 1e-11 && (l2 - 2.0).abs() < 1e-11);
    }

    #[test]
    fn invariants_examples() {
        let inv = riemann_invariants(st(0.0, 1.0), eps(1.0));
        assert!((inv.w + 1.0).abs() < 1e-15 && (inv.z - 1.0).abs() < 1e-15);

        let s2 = 2f64.sqrt();
        let inv = riemann_invariants(st(1.0, 1.0), eps(0.25));
        assert!((inv.w - (-1.0 - s2) / 0.5).abs() < 1e-14);
        assert!((inv.z - (-1.0 + s2) / 0.5).abs() < 1e-14);
        let back = state_from_invariants(Invariants { w: -4.82843, z: 0.82843 }, eps(0.25)).unwrap();
        assert!((back.u() - 1.0).abs() < 1e-5 && (back.v() - 1.0).abs() < 1e-5);

        let back = state_from_invariants(Invariants { w: -1.0, z: 1.0 }, eps(1.0)).unwrap();
        assert_eq!((back.u(), back.v()), (0.0, 1.0));
    }

    #[test]
    fn invariants_out_of_range() {
        for (w, z) in [(0.0, 1.0), (-1.0, 0.0), (1.0, 2.0)] {
            assert!(matches!(
                state_from_invariants(Invariants { w, z }, eps(1.0)),
                Err(Error::InvariantsOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn half_roots_avoid_cancellation() {
        // u large, eps v tiny: the minus root is -eps v / u to leading order.
        let (m, p) = half_roots(10.0, 1.0, 1e-12);
        assert!((m / (-1e-13) - 1.0).abs() < 1e-10);
        assert!((p - 10.0).abs() < 1e-12);
        let (m, p) = half_roots(-10.0, 1.0, 1e-12);
        assert!((p / 1e-13 - 1.0).abs() < 1e-10);
        assert!((m + 10.0).abs() < 1e-12);
        assert_eq!(half_roots(0.0, 0.0, 1.0), (0.0, 0.0));
    }
}
