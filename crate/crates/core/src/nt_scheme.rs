//! Second-order staggered central (Nessyahu-Tadmor) scheme for the
//! deposition model.
//!
//! A full [`step`] is two staggered stages of length `dt`: the first maps cell
//! averages to the dual cells centred on interfaces, the second maps them back,
//! so every snapshot lives on the original grid. Slopes use the minmod-`theta`
//! limiter on both the conserved variables and the flux values; the predictor
//! therefore never needs the flux Jacobian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann::{spectral_radius, Eps, State};

/// Wave speeds above this abort the run.
pub const BLOW_UP_SPEED: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidConfig(format!("domain [{x_min}, {x_max}] is empty")));
        }
        if n_cells < 4 {
            return Err(Error::InvalidConfig(format!("need at least 4 cells (got {n_cells})")));
        }
        Ok(Grid { x_min, x_max, n_cells })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.center(j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Zero-order extrapolation.
    Outflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub eps: Eps,
    pub grid: Grid,
    pub cfl: f64,
    pub t_end: f64,
    pub limiter_theta: f64,
    pub boundary: Boundary,
    /// Extra output times; `t_end` is always included.
    pub snapshot_times: Vec<f64>,
}

impl SimConfig {
    /// 500 cells on `[-2, 2]`, CFL 0.475, `t_end = 0.4`, `theta = 1`.
    pub fn with_defaults(eps: Eps) -> Self {
        SimConfig {
            eps,
            grid: Grid { x_min: -2.0, x_max: 2.0, n_cells: 500 },
            cfl: 0.475,
            t_end: 0.4,
            limiter_theta: 1.0,
            boundary: Boundary::Outflow,
            snapshot_times: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Grid::new(self.grid.x_min, self.grid.x_max, self.grid.n_cells)?;
        if !(self.cfl > 0.0 && self.cfl < 0.5) {
            return Err(Error::InvalidConfig(format!("cfl must lie in (0, 0.5) (got {})", self.cfl)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_end must be positive (got {})", self.t_end)));
        }
        if !(1.0..=2.0).contains(&self.limiter_theta) {
            return Err(Error::InvalidConfig(format!("theta must lie in [1, 2] (got {})", self.limiter_theta)));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_end)) {
            return Err(Error::InvalidConfig(format!("snapshot time {t} outside [0, t_end]")));
        }
        Ok(())
    }
}

/// Cell averages of `u` and `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cells {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Cells {
    /// Exact cell averages of the Riemann data centred at `x = 0`.
    pub fn riemann(grid: &Grid, left: State, right: State) -> Cells {
        let dx = grid.dx();
        let (u, v) = (0..grid.n_cells)
            .map(|j| {
                let a = grid.x_min + j as f64 * dx;
                let frac = ((0.0 - a) / dx).clamp(0.0, 1.0);
                (frac * left.u() + (1.0 - frac) * right.u(), frac * left.v() + (1.0 - frac) * right.v())
            })
            .unzip();
        Cells { u, v }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn max_speed(&self, eps: f64) -> f64 {
        self.u.iter().zip(&self.v).map(|(&u, &v)| spectral_radius(u, v.max(0.0), eps)).fold(0.0, |acc, s| {
            if s.is_nan() {
                f64::NAN
            } else {
                acc.max(s)
            }
        })
    }
}

/// `(u^2 + eps v, u v)`: fluxes of the `u` and `v` equations.
#[inline]
pub fn flux(u: f64, v: f64, eps: f64) -> (f64, f64) {
    (u * u + eps * v, u * v)
}

#[inline]
fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

#[inline]
fn limited_slope(q: &[f64], k: usize, theta: f64) -> f64 {
    let last = q.len() - 1;
    let (qm, q0, qp) = (q[k.saturating_sub(1)], q[k], q[(k + 1).min(last)]);
    minmod3(theta * (q0 - qm), 0.5 * (qp - qm), theta * (qp - q0))
}

/// One staggered stage on `m` values, producing `m - 1` values at the
/// midpoints of consecutive entries. Ends use zero-order extrapolation.
fn stage(u: &[f64], v: &[f64], lambda: f64, eps: f64, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let m = u.len();
    let (fu, fv): (Vec<f64>, Vec<f64>) = u.iter().zip(v).map(|(&a, &b)| flux(a, b, eps)).unzip();
    let mut du = vec![0.0; m];
    let mut dv = vec![0.0; m];
    let mut half_fu = vec![0.0; m];
    let mut half_fv = vec![0.0; m];
    for k in 0..m {
        du[k] = limited_slope(u, k, theta);
        dv[k] = limited_slope(v, k, theta);
        let pu = u[k] - 0.5 * lambda * limited_slope(&fu, k, theta);
        let pv = v[k] - 0.5 * lambda * limited_slope(&fv, k, theta);
        (half_fu[k], half_fv[k]) = flux(pu, pv, eps);
    }
    (0..m - 1)
        .map(|k| {
            let nu = 0.5 * (u[k] + u[k + 1]) + 0.125 * (du[k] - du[k + 1]) - lambda * (half_fu[k + 1] - half_fu[k]);
            let nv = 0.5 * (v[k] + v[k + 1]) + 0.125 * (dv[k] - dv[k + 1]) - lambda * (half_fv[k + 1] - half_fv[k]);
            (nu, nv)
        })
        .unzip()
}

fn clip_negative(v: &mut [f64]) -> f64 {
    let mut clipped = 0.0;
    for x in v.iter_mut().filter(|x| **x < 0.0) {
        clipped -= *x;
        *x = 0.0;
    }
    clipped
}

/// Result of one full step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub cells: Cells,
    /// Negative density removed by clipping, times `dx`.
    pub clipped_mass: f64,
}

/// Advances by `2 dt` through two staggered stages of length `dt` each.
/// Requires `dt * max|lambda| <= cfl * dx`.
pub fn step(cells: &Cells, dt: f64, config: &SimConfig) -> Result<StepOutcome> {
    let n = cells.len();
    if n != config.grid.n_cells {
        return Err(Error::InvalidConfig(format!("expected {} cells, got {n}", config.grid.n_cells)));
    }
    let eps = config.eps.get();
    let dx = config.grid.dx();
    let lambda = dt / dx;
    let theta = config.limiter_theta;

    let mut ext_u = Vec::with_capacity(n + 2);
    let mut ext_v = Vec::with_capacity(n + 2);
    ext_u.push(cells.u[0]);
    ext_v.push(cells.v[0]);
    ext_u.extend_from_slice(&cells.u);
    ext_v.extend_from_slice(&cells.v);
    ext_u.push(cells.u[n - 1]);
    ext_v.push(cells.v[n - 1]);

    // n + 1 dual cells, then back to n primal cells.
    let (su, mut sv) = stage(&ext_u, &ext_v, lambda, eps, theta);
    let mut clipped = clip_negative(&mut sv);
    let (u, mut v) = stage(&su, &sv, lambda, eps, theta);
    clipped += clip_negative(&mut v);

    Ok(StepOutcome { cells: Cells { u, v }, clipped_mass: clipped * dx })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mass_u: f64,
    pub mass_v: f64,
    pub v_max: f64,
    /// Locations of strong local gradient maxima.
    pub shock_locs: Vec<f64>,
    /// Excess mass around `x = (u_- + u_+) t` for delta-type data.
    pub delta_weight_estimate: Option<f64>,
    pub clipped_mass: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSnapshot {
    pub t: f64,
    pub eps: Eps,
    pub grid: Grid,
    pub left: State,
    pub right: State,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl SimSnapshot {
    pub fn x(&self) -> Vec<f64> {
        self.grid.centers()
    }
}

/// Half-width of the window used for the delta weight estimate in diagnostics.
pub const DEFAULT_WEIGHT_HALFWIDTH: f64 = 0.2;

fn shock_locations(grid: &Grid, cells: &Cells) -> Vec<f64> {
    let n = cells.len();
    let range = |q: &[f64]| {
        let (lo, hi) = q.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        (hi - lo).max(f64::MIN_POSITIVE)
    };
    let (ru, rv) = (range(&cells.u), range(&cells.v));
    let g: Vec<f64> = (0..n - 1)
        .map(|j| (cells.u[j + 1] - cells.u[j]).abs() / ru + (cells.v[j + 1] - cells.v[j]).abs() / rv)
        .collect();
    let gmax = g.iter().copied().fold(0.0, f64::max);
    if gmax <= 0.0 {
        return Vec::new();
    }
    let dx = grid.dx();
    (0..g.len())
        .filter(|&j| {
            let left = if j > 0 { g[j - 1] } else { 0.0 };
            let right = if j + 1 < g.len() { g[j + 1] } else { 0.0 };
            g[j] >= 0.1 * gmax && g[j] >= left && g[j] > right
        })
        .map(|j| grid.center(j) + 0.5 * dx)
        .collect()
}

/// Window estimate of the delta weight with its sensitivity to the window size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightEstimate {
    pub value: f64,
    /// Same estimate over a window twice as wide.
    pub double_window: f64,
    /// The window extended past the domain and was clipped.
    pub clipped: bool,
}

fn window_excess(snap: &SimSnapshot, center: f64, halfwidth: f64) -> (f64, bool) {
    let g = &snap.grid;
    let dx = g.dx();
    let (a, b) = (center - halfwidth, center + halfwidth);
    let clipped = a < g.x_min || b > g.x_max;
    let (vm, vp) = (snap.left.v(), snap.right.v());
    let mut sum = 0.0;
    for j in 0..g.n_cells {
        let lo = g.x_min + j as f64 * dx;
        let hi = lo + dx;
        let left_part = (hi.min(b).min(center) - lo.max(a)).max(0.0);
        let right_part = (hi.min(b) - lo.max(a).max(center)).max(0.0);
        sum += snap.v[j] * (left_part + right_part) - vm * left_part - vp * right_part;
    }
    (sum, clipped)
}

/// `int_{sigma t - d}^{sigma t + d} (v - H(x - sigma t)) dx` with `H` the
/// initial background `v_-` / `v_+`, summed over cell overlaps.
pub fn delta_weight_estimate(snap: &SimSnapshot, sigma: f64, halfwidth: f64) -> Result<WeightEstimate> {
    if halfwidth.is_nan() || halfwidth <= 0.0 {
        return Err(Error::Precondition(format!("halfwidth must be positive (got {halfwidth})")));
    }
    let center = sigma * snap.t;
    let (value, clipped) = window_excess(snap, center, halfwidth);
    let (double_window, clipped2) = window_excess(snap, center, 2.0 * halfwidth);
    Ok(WeightEstimate { value, double_window, clipped: clipped || clipped2 })
}

/// Locations of the steepest rise and the steepest fall of `v`, refined to
/// sub-cell accuracy by a parabola through the neighbouring differences.
pub fn steepest_density_gradients(snap: &SimSnapshot) -> Option<(f64, f64)> {
    let v = &snap.v;
    if v.len() < 3 {
        return None;
    }
    let d: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let dx = snap.grid.dx();
    let refine = |j: usize, sign: f64| {
        let at = |k: usize| sign * d[k];
        let base = snap.grid.center(j) + 0.5 * dx;
        if j == 0 || j + 1 == d.len() {
            return base;
        }
        let (a, b, c) = (at(j - 1), at(j), at(j + 1));
        let denom = a - 2.0 * b + c;
        let shift = if denom < 0.0 { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) } else { 0.0 };
        base + shift * dx
    };
    let (rise, _) =
        d.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (j, &x)| if x > acc.1 { (j, x) } else { acc });
    let (fall, _) = d.iter().enumerate().fold((0, f64::INFINITY), |acc, (j, &x)| if x < acc.1 { (j, x) } else { acc });
    if d[rise] <= 0.0 || d[fall] >= 0.0 {
        return None;
    }
    Some((refine(rise, 1.0), refine(fall, -1.0)))
}

/// Shock separation speed `(x_fall - x_rise) / t` from the steepest density gradients.
pub fn measured_separation(snap: &SimSnapshot) -> Option<f64> {
    let (rise, fall) = steepest_density_gradients(snap)?;
    (snap.t > 0.0).then(|| (fall - rise) / snap.t)
}

fn snapshot(
    config: &SimConfig,
    left: State,
    right: State,
    t: f64,
    cells: &Cells,
    clipped_mass: f64,
    steps: usize,
) -> SimSnapshot {
    let dx = config.grid.dx();
    let mut snap = SimSnapshot {
        t,
        eps: config.eps,
        grid: config.grid,
        left,
        right,
        u: cells.u.clone(),
        v: cells.v.clone(),
        diagnostics: Diagnostics {
            mass_u: cells.u.iter().sum::<f64>() * dx,
            mass_v: cells.v.iter().sum::<f64>() * dx,
            v_max: cells.v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            shock_locs: shock_locations(&config.grid, cells),
            delta_weight_estimate: None,
            clipped_mass,
            steps,
        },
    };
    if right.u() <= 0.0 && 0.0 <= left.u() && t > 0.0 {
        snap.diagnostics.delta_weight_estimate =
            delta_weight_estimate(&snap, left.u() + right.u(), DEFAULT_WEIGHT_HALFWIDTH).ok().map(|w| w.value);
    }
    snap
}

/// Runs the scheme from Riemann data, returning snapshots in time order
/// (requested times, then `t_end`).
pub fn run(config: &SimConfig, left: State, right: State) -> Result<Vec<SimSnapshot>> {
    config.validate()?;
    let eps = config.eps.get();
    let dx = config.grid.dx();
    let mut outputs: Vec<f64> = config.snapshot_times.clone();
    outputs.push(config.t_end);
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();

    let mut cells = Cells::riemann(&config.grid, left, right);
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut clipped = 0.0;
    let mut snaps = Vec::with_capacity(outputs.len());

    for &target in &outputs {
        while t < target {
            let speed = cells.max_speed(eps);
            if !speed.is_finite() || speed > BLOW_UP_SPEED {
                return Err(Error::Unstable { t, speed });
            }
            let mut dt = config.cfl * dx / speed.max(f64::MIN_POSITIVE);
            let remaining = target - t;
            let last = 2.0 * dt >= remaining;
            if last {
                dt = 0.5 * remaining;
            }
            let out = step(&cells, dt, config)?;
            cells = out.cells;
            clipped += out.clipped_mass;
            steps += 1;
            t = if last { target } else { t + 2.0 * dt };
        }
        snaps.push(snapshot(config, left, right, t, &cells, clipped, steps));
    }
    Ok(snaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::solve_riemann;

    fn st(u: f64, v: f64) -> State {
        State::new(u, v).unwrap()
    }

    fn config(e: f64, n: usize) -> SimConfig {
        let mut c = SimConfig::with_defaults(Eps::new(e).unwrap());
        c.grid.n_cells = n;
        c
    }

    #[test]
    fn flux_examples() {
        assert_eq!(flux(0.0, 2.0, 0.5), (1.0, 0.0));
        let (a, b) = flux(1.0, 1.0, 0.3);
        assert!((a - 1.3).abs() < 1e-15 && b == 1.0);
        assert_eq!(flux(-2.0, 3.0, 0.0), (4.0, -6.0));
    }

    #[test]
    fn minmod_theta() {
        assert_eq!(minmod3(1.0, 2.0, 3.0), 1.0);
        assert_eq!(minmod3(-1.0, -0.5, -3.0), -0.5);
        assert_eq!(minmod3(-1.0, 2.0, 3.0), 0.0);
    }

    #[test]
    fn config_validation() {
        let mut c = config(0.3, 500);
        assert!(c.validate().is_ok());
        c.cfl = 0.6;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        let mut c = config(0.3, 500);
        c.grid.x_max = c.grid.x_min;
        assert!(c.validate().is_err());
        let mut c = config(0.3, 3);
        assert!(c.validate().is_err());
        c.grid.n_cells = 10;
        c.limiter_theta = 2.5;
        assert!(c.validate().is_err());
        let mut c = config(0.3, 10);
        c.snapshot_times = vec![1.0];
        assert!(c.validate().is_err());
        let mut c = config(0.3, 500);
        c.cfl = 0.5;
        assert!(run(&c, st(1.0, 1.0), st(1.0, 1.0)).is_err());
    }

    #[test]
    fn constant_state_is_preserved() {
        let s = st(0.7, 1.3);
        let c = config(0.2, 64);
        let mut cells = Cells::riemann(&c.grid, s, s);
        for _ in 0..50 {
            cells = step(&cells, 0.01, &c).unwrap().cells;
        }
        assert!(cells.u.iter().all(|&u| (u - 0.7).abs() < 1e-14));
        assert!(cells.v.iter().all(|&v| (v - 1.3).abs() < 1e-14));
    }

    #[test]
    fn initial_averages_split_the_straddling_cell() {
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        let c = Cells::riemann(&g, st(1.0, 1.0), st(-1.0, 3.0));
        assert!(c.u[2].abs() < 1e-15);
        assert!((c.v[2] - 2.0).abs() < 1e-15);
        assert_eq!((c.u[0], c.v[4]), (1.0, 3.0));
    }

    #[test]
    fn discrete_conservation() {
        let (l, r) = (st(1.0, 1.0), st(-1.0, 1.5));
        let c = config(0.3, 200);
        let snaps = run(&c, l, r).unwrap();
        let s = snaps.last().unwrap();
        let t = s.t;
        let (fl, fr) = (flux(l.u(), l.v(), 0.3), flux(r.u(), r.v(), 0.3));
        let mass_u0 = 2.0 * (l.u() + r.u());
        let mass_v0 = 2.0 * (l.v() + r.v());
        let want_u = mass_u0 + t * (fl.0 - fr.0);
        let want_v = mass_v0 + t * (fl.1 - fr.1);
        assert!((s.diagnostics.mass_u - want_u).abs() <= 1e-12 * want_u.abs().max(1.0));
        assert!((s.diagnostics.mass_v - want_v).abs() <= 1e-12 * want_v.abs().max(1.0));
        assert_eq!(s.diagnostics.clipped_mass, 0.0);
    }

    #[test]
    fn hits_requested_times_exactly() {
        let mut c = config(0.3, 100);
        c.snapshot_times = vec![0.1, 0.25];
        let snaps = run(&c, st(1.0, 1.0), st(-1.0, 1.5)).unwrap();
        let times: Vec<f64> = snaps.iter().map(|s| s.t).collect();
        assert_eq!(times, vec![0.1, 0.25, 0.4]);
        assert!(snaps.windows(2).all(|w| w[0].diagnostics.steps < w[1].diagnostics.steps));
    }

    #[test]
    fn converges_to_exact_solution() {
        let (l, r) = (st(1.0, 1.0), st(-1.0, 1.5));
        let exact = solve_riemann(l, r, Eps::new(0.3).unwrap());
        let l1 = |n: usize| {
            let snap = run(&config(0.3, n), l, r).unwrap().pop().unwrap();
            let dx = snap.grid.dx();
            snap.x()
                .iter()
                .zip(snap.u.iter().zip(&snap.v))
                .map(|(&x, (&u, &v))| {
                    let e = exact.evaluate(x / snap.t);
                    ((u - e.u()).abs() + (v - e.v()).abs()) * dx
                })
                .sum::<f64>()
        };
        let (a, b) = (l1(100), l1(200));
        assert!(b < a, "{a} {b}");
    }

    #[test]
    fn weight_estimate_of_constant_data_is_zero() {
        let s = st(0.0, 2.0);
        let snap = run(&config(0.1, 50), s, s).unwrap().pop().unwrap();
        let w = delta_weight_estimate(&snap, 0.0, 0.2).unwrap();
        assert_eq!(w.value, 0.0);
        assert_eq!(w.double_window, 0.0);
        assert!(!w.clipped);
        assert_eq!(snap.diagnostics.delta_weight_estimate, Some(0.0));
        assert!(snap.diagnostics.shock_locs.is_empty());
    }

    #[test]
    fn weight_window_clipping_is_reported() {
        let s = st(0.0, 2.0);
        let snap = run(&config(0.1, 50), s, s).unwrap().pop().unwrap();
        assert!(delta_weight_estimate(&snap, 0.0, 1.5).unwrap().clipped);
        assert!(delta_weight_estimate(&snap, 0.0, 0.0).is_err());
    }

    #[test]
    fn blow_up_guard() {
        let (l, r) = (st(2000.0, 1.0), st(2000.0, 1.0));
        assert!(matches!(run(&config(0.1, 20), l, r), Err(Error::Unstable { .. })));
    }
}
