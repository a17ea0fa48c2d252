use std::fmt;

use serde::{Deserialize, Serialize};

use super::state::{eigenvalues, half_roots, riemann_invariants, Eps, State};
use crate::error::{Error, Result};

/// Below this separation in `u` a wave is emitted as a zero-width fan.
pub const DEGENERATE_WAVE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WavePattern {
    R1R2,
    R1S2,
    S1R2,
    S1S2,
}

impl fmt::Display for WavePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WavePattern::R1R2 => "R1R2",
            WavePattern::R1S2 => "R1S2",
            WavePattern::S1R2 => "S1R2",
            WavePattern::S1S2 => "S1S2",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Wave {
    Shock {
        family: Family,
        speed: f64,
    },
    /// A centred rarefaction. `frozen` is `w` for family one and `z` for family two.
    Fan {
        family: Family,
        xi_start: f64,
        xi_end: f64,
        frozen: f64,
    },
}

impl Wave {
    pub fn family(&self) -> Family {
        match *self {
            Wave::Shock { family, .. } | Wave::Fan { family, .. } => family,
        }
    }

    pub fn start(&self) -> f64 {
        match *self {
            Wave::Shock { speed, .. } => speed,
            Wave::Fan { xi_start, .. } => xi_start,
        }
    }

    pub fn end(&self) -> f64 {
        match *self {
            Wave::Shock { speed, .. } => speed,
            Wave::Fan { xi_end, .. } => xi_end,
        }
    }
}

/// Self-similar solution of one Riemann problem at fixed `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannSolution {
    pub left: State,
    pub right: State,
    pub middle: State,
    pub eps: Eps,
    pub pattern: WavePattern,
    /// Empty for a constant solution; otherwise the 1-wave then the 2-wave.
    pub waves: Vec<Wave>,
}

/// The state reached from `left` along the 1-wave curve and from `right`
/// backwards along the 2-wave curve: `w = w(left)`, `z = z(right)`.
pub fn intermediate_state(left: State, right: State, eps: Eps) -> State {
    let e = eps.get();
    let (_, plus_l) = half_roots(left.u(), left.v(), e);
    let (minus_r, _) = half_roots(right.u(), right.v(), e);
    // plus_l > 0 > minus_r, so the product is strictly positive.
    let v = -plus_l * minus_r / e;
    // plus_l + minus_r with the root difference rationalised; the direct sum
    // cancels when the two roots nearly balance.
    let (ul, ur) = (left.u(), right.u());
    let roots = (ul * ul + 4.0 * e * left.v()).sqrt() + (ur * ur + 4.0 * e * right.v()).sqrt();
    let u = 0.5 * ((ul + ur) * (1.0 + (ul - ur) / roots) + 4.0 * e * (left.v() - right.v()) / roots);
    State::new(u, v).expect("intermediate density is positive for eps > 0")
}

pub fn classify(left: State, right: State, eps: Eps) -> WavePattern {
    let mid = intermediate_state(left, right, eps);
    pattern_of(left, mid, right)
}

fn is_rarefaction(u_l: f64, u_r: f64) -> bool {
    u_r > u_l || (u_r - u_l).abs() < DEGENERATE_WAVE
}

fn pattern_of(left: State, mid: State, right: State) -> WavePattern {
    match (is_rarefaction(left.u(), mid.u()), is_rarefaction(mid.u(), right.u())) {
        (true, true) => WavePattern::R1R2,
        (true, false) => WavePattern::R1S2,
        (false, true) => WavePattern::S1R2,
        (false, false) => WavePattern::S1S2,
    }
}

/// Speed of the 1-shock joining `left` to `middle`.
pub fn shock_speed_1(left: State, middle: State, eps: Eps) -> Result<f64> {
    if middle.u() >= left.u() {
        return Err(Error::NotAdmissible { u_l: left.u(), u_r: middle.u() });
    }
    let (minus_l, _) = half_roots(left.u(), left.v(), eps.get());
    Ok(middle.u() + minus_l)
}

/// Speed of the 2-shock joining `middle` to `right`.
pub fn shock_speed_2(middle: State, right: State, eps: Eps) -> Result<f64> {
    if right.u() >= middle.u() {
        return Err(Error::NotAdmissible { u_l: middle.u(), u_r: right.u() });
    }
    // Equals right.u() + plus(middle) on the 2-curve, without the cancellation.
    let (_, plus_r) = half_roots(right.u(), right.v(), eps.get());
    Ok(middle.u() + plus_r)
}

/// Jump residuals `-s[u] + [u^2 + eps v]` and `-s[v] + [u v]` with `[g] = g_l - g_r`.
pub fn rankine_hugoniot_residual(left: State, right: State, speed: f64, eps: Eps) -> (f64, f64) {
    let e = eps.get();
    let (ul, vl, ur, vr) = (left.u(), left.v(), right.u(), right.v());
    let r1 = -speed * (ul - ur) + (ul * ul + e * vl - ur * ur - e * vr);
    let r2 = -speed * (vl - vr) + (ul * vl - ur * vr);
    (r1, r2)
}

/// Strict Lax inequalities for a shock of the given family.
pub fn lax_admissible(left: State, right: State, speed: f64, family: Family, eps: Eps) -> bool {
    let (l1l, l2l) = eigenvalues(left, eps);
    let (l1r, l2r) = eigenvalues(right, eps);
    match family {
        Family::One => speed < l1l && l1l < l2l && l1r < speed && speed < l2r,
        Family::Two => l1l < speed && speed < l2l && l1r < l2r && l2r < speed,
    }
}

pub fn solve_riemann(left: State, right: State, eps: Eps) -> RiemannSolution {
    let middle = intermediate_state(left, right, eps);
    let pattern = pattern_of(left, middle, right);
    if left == right {
        return RiemannSolution { left, right, middle: left, eps, pattern, waves: Vec::new() };
    }
    let first = if is_rarefaction(left.u(), middle.u()) {
        Wave::Fan {
            family: Family::One,
            xi_start: eigenvalues(left, eps).0,
            xi_end: eigenvalues(middle, eps).0,
            frozen: riemann_invariants(left, eps).w,
        }
    } else {
        Wave::Shock { family: Family::One, speed: shock_speed_1(left, middle, eps).expect("classified as 1-shock") }
    };
    let second = if is_rarefaction(middle.u(), right.u()) {
        Wave::Fan {
            family: Family::Two,
            xi_start: eigenvalues(middle, eps).1,
            xi_end: eigenvalues(right, eps).1,
            frozen: riemann_invariants(right, eps).z,
        }
    } else {
        Wave::Shock { family: Family::Two, speed: shock_speed_2(middle, right, eps).expect("classified as 2-shock") }
    };
    RiemannSolution { left, right, middle, eps, pattern, waves: vec![first, second] }
}

impl RiemannSolution {
    pub fn is_constant(&self) -> bool {
        self.waves.is_empty()
    }

    /// Samples the solution at `xi = x / t`. At a shock the left limit is returned.
    pub fn evaluate(&self, xi: f64) -> State {
        let [first, second] = match self.waves.as_slice() {
            [a, b] => [a, b],
            _ => return self.left,
        };
        if xi <= first.start() {
            return self.left;
        }
        if xi <= first.end() {
            return self.fan_state(first, xi, self.left, self.middle);
        }
        if xi <= second.start() {
            return self.middle;
        }
        if xi <= second.end() {
            return self.fan_state(second, xi, self.middle, self.right);
        }
        self.right
    }

    // Inside a fan lambda_i grows with slope 2 in u, so u is linear in xi.
    // The nearer edge is used as the anchor to keep cancellation small.
    fn fan_state(&self, wave: &Wave, xi: f64, start: State, end: State) -> State {
        let Wave::Fan { family, xi_start, xi_end, frozen } = *wave else {
            return start;
        };
        let e = self.eps.get();
        let u = if xi - xi_start <= xi_end - xi {
            start.u() + 0.5 * (xi - xi_start)
        } else {
            end.u() - 0.5 * (xi_end - xi)
        };
        let v = match family {
            // w frozen: the plus half-root is -eps w, the other one is u minus it.
            Family::One => {
                let plus = -e * frozen;
                -(u - plus) * plus / e
            }
            Family::Two => {
                let minus = -e * frozen;
                -minus * (u - minus) / e
            }
        };
        State::new(u, v.max(f64::MIN_POSITIVE)).unwrap_or(start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::state::state_from_invariants;
    use crate::tolerance::Tolerance;

    fn st(u: f64, v: f64) -> State {
        State::new(u, v).unwrap()
    }

    fn eps(e: f64) -> Eps {
        Eps::new(e).unwrap()
    }

    // Intermediate density written out as the ratio of shock-curve slopes,
    // evaluated with its own cancellation-free roots.
    fn v_star_slope_formula(l: State, r: State, e: f64) -> f64 {
        let root = |u: f64, v: f64| (u * u + 4.0 * e * v).sqrt();
        let minus = |u: f64, v: f64| if u > 0.0 { -4.0 * e * v / (u + root(u, v)) } else { u - root(u, v) };
        let plus = |u: f64, v: f64| if u < 0.0 { 4.0 * e * v / (root(u, v) - u) } else { u + root(u, v) };
        let (um, vm, up, vp) = (l.u(), l.v(), r.u(), r.v());
        let slope_l = minus(um, vm) / (2.0 * vm);
        let slope_r = plus(up, vp) / (2.0 * vp);
        (up - um - slope_r * vp + slope_l * vm) / (slope_l - slope_r)
    }

    #[test]
    fn intermediate_matches_slope_formula() {
        let (l, r) = (st(1.0, 1.0), st(-1.0, 1.5));
        for e in [0.3, 0.1, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
            let m = intermediate_state(l, r, eps(e));
            let oracle = v_star_slope_formula(l, r, e);
            assert!(Tolerance(1e-12).close(m.v(), oracle), "eps={e}: {} vs {oracle}", m.v());
        }
    }

    #[test]
    fn intermediate_is_invariant_intersection() {
        let (l, r, e) = (st(1.0, 1.0), st(-1.0, 1.5), eps(0.3));
        let m = intermediate_state(l, r, e);
        let (il, ir, im) = (riemann_invariants(l, e), riemann_invariants(r, e), riemann_invariants(m, e));
        let tol = Tolerance(1e-12);
        assert!(tol.close(im.w, il.w) && tol.close(im.z, ir.z));
        let via = state_from_invariants(crate::Invariants { w: il.w, z: ir.z }, e).unwrap();
        assert!(tol.close(via.u(), m.u()) && tol.close(via.v(), m.v()));
    }

    #[test]
    fn intermediate_blows_up_for_delta_data() {
        let (l, r) = (st(1.0, 1.0), st(-1.0, 1.5));
        let mut last_v = 0.0;
        for k in 2..=10 {
            let m = intermediate_state(l, r, eps(10f64.powi(-k)));
            assert!(m.v() > last_v);
            last_v = m.v();
            if k == 10 {
                assert!(m.u().abs() < 1e-9);
                assert!(m.v() > 1e9);
            }
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(st(1.0, 1.0), st(-1.0, 1.5), eps(0.3)), WavePattern::S1S2);
        for e in [1e-6, 0.3, 5.0] {
            assert_eq!(classify(st(-1.0, 1.5), st(1.0, 1.0), eps(e)), WavePattern::R1R2);
        }
        // u* = (sqrt(6001) - sqrt(4001)) / 2 > 1 = u_+
        assert_eq!(classify(st(-1.0, 1.5), st(1.0, 1.0), eps(1e3)), WavePattern::R1S2);
        assert_eq!(classify(st(1.0, 1.0), st(1.0, 1.0), eps(0.3)), WavePattern::R1R2);
    }

    #[test]
    fn constant_solution_has_no_waves() {
        let s = st(1.0, 1.0);
        let sol = solve_riemann(s, s, eps(0.5));
        assert!(sol.is_constant());
        assert_eq!(sol.evaluate(-3.0), s);
        assert_eq!(sol.evaluate(3.0), s);
    }

    #[test]
    fn two_shock_example() {
        let (l, r, e) = (st(1.0, 1.0), st(-1.0, 1.5), eps(0.3));
        let sol = solve_riemann(l, r, e);
        assert_eq!(sol.pattern, WavePattern::S1S2);
        let (s1, s2) = (sol.waves[0].start(), sol.waves[1].start());
        assert!(s1 < s2);
        for (a, b, s, fam) in [(l, sol.middle, s1, Family::One), (sol.middle, r, s2, Family::Two)] {
            let (r1, r2) = rankine_hugoniot_residual(a, b, s, e);
            assert!(r1.abs() < 1e-10 && r2.abs() < 1e-10);
            assert!(lax_admissible(a, b, s, fam, e));
        }
        // left limit at the shock itself
        assert_eq!(sol.evaluate(s1), l);
        assert_eq!(sol.evaluate(s2), sol.middle);
        assert_eq!(sol.evaluate(0.5 * (s1 + s2)), sol.middle);
    }

    #[test]
    fn shock_speed_limits() {
        let e = eps(1e-10);
        let (l, r) = (st(1.0, 1.0), st(-1.0, 1.5));
        let m = intermediate_state(l, r, e);
        assert!(shock_speed_1(l, m, e).unwrap().abs() < 1e-6);
        assert!(shock_speed_2(m, r, e).unwrap().abs() < 1e-6);

        let (l, r) = (st(2.0, 1.0), st(1.0, 3.0));
        let m = intermediate_state(l, r, e);
        assert!((shock_speed_1(l, m, e).unwrap() - 2.0).abs() < 1e-6);
        assert!((shock_speed_2(m, r, e).unwrap() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn non_admissible_jump() {
        let e = eps(0.3);
        assert!(matches!(shock_speed_1(st(0.0, 1.0), st(0.5, 1.0), e), Err(Error::NotAdmissible { .. })));
        assert!(matches!(shock_speed_2(st(0.0, 1.0), st(0.0, 2.0), e), Err(Error::NotAdmissible { .. })));
    }

    #[test]
    fn two_rarefaction_near_vacuum() {
        let (l, r) = (st(-1.0, 1.0), st(1.0, 1.5));
        let sol = solve_riemann(l, r, eps(1e-8));
        assert_eq!(sol.pattern, WavePattern::R1R2);
        assert!(sol.middle.v() < 1e-6);
        assert!(sol.middle.u().abs() < 1e-6);
    }

    #[test]
    fn fan_is_self_consistent() {
        let (l, r, e) = (st(-1.0, 1.0), st(1.0, 1.5), eps(0.2));
        let sol = solve_riemann(l, r, e);
        let w_left = riemann_invariants(l, e).w;
        let z_right = riemann_invariants(r, e).z;
        let tol = Tolerance(1e-12);
        for wave in &sol.waves {
            let Wave::Fan { family, xi_start, xi_end, .. } = *wave else { panic!("expected fan") };
            for k in 0..=20 {
                let xi = xi_start + (xi_end - xi_start) * k as f64 / 20.0;
                let s = sol.evaluate(xi);
                let inv = riemann_invariants(s, e);
                let (l1, l2) = eigenvalues(s, e);
                match family {
                    Family::One => assert!(tol.close(inv.w, w_left) && tol.close(l1, xi)),
                    Family::Two => assert!(tol.close(inv.z, z_right) && tol.close(l2, xi)),
                }
            }
        }
        // continuity at fan edges
        let edge = sol.waves[0].end();
        let (a, b) = (sol.evaluate(edge), sol.evaluate(edge + 1e-12));
        assert!((a.u() - b.u()).abs() < 1e-10 && (a.v() - b.v()).abs() < 1e-10);
        assert_eq!(sol.evaluate(-100.0), l);
        assert_eq!(sol.evaluate(100.0), r);
    }

    #[test]
    fn degenerate_wave_is_zero_width_fan() {
        // right on the 1-curve through left: no 2-wave.
        let e = eps(0.3);
        let l = st(1.0, 1.0);
        let r = sol_on_curve(l, e, -0.4);
        let sol = solve_riemann(l, r, e);
        assert_eq!(sol.pattern, WavePattern::S1R2);
        let Wave::Fan { xi_start, xi_end, .. } = sol.waves[1] else { panic!("expected fan") };
        assert!((xi_start - xi_end).abs() < 1e-12);
    }

    fn sol_on_curve(l: State, e: Eps, du: f64) -> State {
        // move along the 1-curve (fixed plus half-root) by du in u
        let (minus, plus) = half_roots(l.u(), l.v(), e.get());
        let minus = minus + du;
        st(minus + plus, -minus * plus / e.get())
    }

    #[test]
    fn curves_are_straight_lines() {
        // Shock and rarefaction branches of the 1-curve share the slope du/dv.
        let e = eps(0.35);
        let l = st(0.8, 1.3);
        let (minus, _) = half_roots(l.u(), l.v(), e.get());
        let slope = minus / l.v();
        for du in [-0.6, -0.1, 0.05, 0.3] {
            let p = sol_on_curve(l, e, du);
            assert!(((p.u() - l.u()) - slope * (p.v() - l.v())).abs() < 1e-12);
        }
    }
}
