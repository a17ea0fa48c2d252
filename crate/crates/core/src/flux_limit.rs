//! Behaviour of the Riemann solution as `eps -> 0`.
//!
//! For compressive data (`u_+ < u_-`, `u_+/v_+ < u_-/v_-`) the solution is two
//! shocks below a threshold `eps_0`; when additionally `u_+ <= 0 <= u_-` the
//! intermediate density blows up like `1/eps` while the shocks merge, and the
//! mass between them, `(sigma_2 - sigma_1) v_*`, tends to the delta-shock
//! weight rate `u_- v_+ - u_+ v_-`. For expansive data the solution is two
//! rarefactions and the intermediate state tends to the limit-system one.
//!
//! In a [`LimitTable`] row, `sigma1`/`sigma2` are the edges of the constant
//! intermediate region: the shock speed for a shock, the middle-side
//! characteristic speed for a fan.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::limit_system::{evaluate_limit_xi, solve_riemann_limit, LimitPattern, MeasureState};
use crate::quadrature;
use crate::riemann::{classify, eigenvalues, solve_riemann, Eps, RiemannSolution, State, Wave, WavePattern};

/// Bisection bracket for thresholds without a closed form.
pub const BISECT_LO: f64 = 1e-12;
pub const BISECT_HI: f64 = 1e6;
pub const BISECT_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Constant,
    TwoShock,
    TwoRarefaction,
    Mixed,
}

impl Regime {
    pub fn of(left: State, right: State) -> Regime {
        let (um, vm, up, vp) = (left.u(), left.v(), right.u(), right.v());
        if left == right {
            Regime::Constant
        } else if up < um && up * vm < um * vp {
            Regime::TwoShock
        } else if up > um && up * vm > um * vp {
            Regime::TwoRarefaction
        } else {
            Regime::Mixed
        }
    }

    /// Pattern that holds for all small enough `eps`, if the regime fixes one.
    pub fn small_eps_pattern(self) -> Option<WavePattern> {
        match self {
            Regime::TwoShock => Some(WavePattern::S1S2),
            Regime::TwoRarefaction => Some(WavePattern::R1R2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdValue {
    Finite(f64),
    Unbounded,
}

impl ThresholdValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            ThresholdValue::Finite(x) => Some(x),
            ThresholdValue::Unbounded => None,
        }
    }

    /// True if `eps` is at or beyond the threshold.
    pub fn exceeded_by(self, eps: f64) -> bool {
        self.finite().is_some_and(|e0| eps >= e0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub eps0: ThresholdValue,
    pub regime: Regime,
}

/// Largest `eps` below which the small-`eps` wave pattern persists.
pub fn epsilon_threshold(left: State, right: State) -> Threshold {
    let regime = Regime::of(left, right);
    let eps0 = match regime {
        Regime::Constant => ThresholdValue::Unbounded,
        Regime::TwoShock => {
            let (um, vm, up, vp) = (left.u(), left.v(), right.u(), right.v());
            if vp == vm {
                ThresholdValue::Unbounded
            } else {
                ThresholdValue::Finite((up - um) * (vm * up - vp * um) / ((vp - vm) * (vp - vm)))
            }
        }
        Regime::TwoRarefaction | Regime::Mixed => bisect_threshold(left, right),
    };
    Threshold { eps0, regime }
}

/// Locates, by bisection in `log eps` over `[BISECT_LO, BISECT_HI]`, where the
/// wave pattern stops being the one seen at `BISECT_LO`.
pub fn bisect_threshold(left: State, right: State) -> ThresholdValue {
    let at = |e: f64| classify(left, right, Eps::new(e).expect("bracket is positive"));
    let reference = at(BISECT_LO);
    if at(BISECT_HI) == reference {
        return ThresholdValue::Unbounded;
    }
    let (mut lo, mut hi) = (BISECT_LO, BISECT_HI);
    while hi / lo - 1.0 > BISECT_RTOL {
        let mid = (lo * hi).sqrt();
        if at(mid) == reference {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ThresholdValue::Finite((lo * hi).sqrt())
}

/// A limit that may be `+inf`; serialises as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitValue {
    Finite(f64),
    Infinite,
}

impl LimitValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            LimitValue::Finite(x) => Some(x),
            LimitValue::Infinite => None,
        }
    }
}

impl Serialize for LimitValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LimitValue::Finite(x) => s.serialize_f64(*x),
            LimitValue::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Closed-form `eps -> 0` limits of the intermediate state and region edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitTargets {
    pub regime: Regime,
    pub u_star: f64,
    pub v_star: LimitValue,
    pub sigma1: f64,
    pub sigma2: f64,
    pub product: f64,
}

pub fn limit_targets(left: State, right: State) -> Result<LimitTargets> {
    let (um, vm, up, vp) = (left.u(), left.v(), right.u(), right.v());
    let regime = Regime::of(left, right);
    let finite = |u_star: f64, v_star: f64, sigma1: f64, sigma2: f64| LimitTargets {
        regime,
        u_star,
        v_star: LimitValue::Finite(v_star),
        sigma1,
        sigma2,
        product: (sigma2 - sigma1) * v_star,
    };
    match regime {
        Regime::Mixed => Err(Error::NotCovered),
        Regime::Constant => Ok(finite(um, vm, um + um.min(0.0), um + um.max(0.0))),
        Regime::TwoShock => Ok(if um > up && up > 0.0 {
            finite(um, um / up * vp, um, um + up)
        } else if 0.0 > um && um > up {
            finite(up, up / um * vm, um + up, up)
        } else {
            let sigma = um + up;
            LimitTargets {
                regime,
                u_star: sigma,
                v_star: LimitValue::Infinite,
                sigma1: sigma,
                sigma2: sigma,
                product: um * vp - up * vm,
            }
        }),
        Regime::TwoRarefaction => Ok(if up > um && um > 0.0 {
            finite(um, um / up * vp, um, 2.0 * um)
        } else if 0.0 > up && up > um {
            finite(up, up / um * vm, 2.0 * up, up)
        } else {
            finite(0.0, 0.0, 0.0, 0.0)
        }),
    }
}

/// Edges `(sigma1, sigma2)` of the constant intermediate region.
pub fn intermediate_edges(sol: &RiemannSolution) -> (f64, f64) {
    match sol.waves.as_slice() {
        [first, second] => {
            let lo = match first {
                Wave::Shock { speed, .. } => *speed,
                Wave::Fan { xi_end, .. } => *xi_end,
            };
            let hi = match second {
                Wave::Shock { speed, .. } => *speed,
                Wave::Fan { xi_start, .. } => *xi_start,
            };
            (lo, hi)
        }
        _ => eigenvalues(sol.middle, sol.eps),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub pattern: WavePattern,
    pub u_star: f64,
    pub v_star: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub product: f64,
    /// `eps` is at or above the threshold (pattern differs from the small-`eps` one).
    pub above_threshold: bool,
}

impl SweepRow {
    pub fn compute(left: State, right: State, eps: Eps) -> SweepRow {
        let sol = solve_riemann(left, right, eps);
        let (sigma1, sigma2) = intermediate_edges(&sol);
        SweepRow {
            eps: eps.get(),
            pattern: sol.pattern,
            u_star: sol.middle.u(),
            v_star: sol.middle.v(),
            sigma1,
            sigma2,
            product: (sigma2 - sigma1) * sol.middle.v(),
            above_threshold: false,
        }
    }

    pub fn flags(&self) -> String {
        if self.above_threshold {
            format!("above_threshold;pattern={}", self.pattern)
        } else {
            String::from("ok")
        }
    }
}

/// Whether each column approaches its target monotonically as `eps` decreases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColumnConvergence {
    pub u_star: bool,
    pub v_star: bool,
    pub sigma1: bool,
    pub sigma2: bool,
    pub product: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitTable {
    pub left: State,
    pub right: State,
    pub threshold: Threshold,
    pub targets: Option<LimitTargets>,
    /// Sorted by decreasing `eps`.
    pub rows: Vec<SweepRow>,
    pub convergence: Option<ColumnConvergence>,
}

/// Default grid: the simulation values at the top, then decades down to 1e-10.
pub fn default_eps_grid() -> Vec<f64> {
    let mut grid = vec![3e-1, 1.5e-1, 7e-2];
    grid.extend((2..=10).map(|k| 10f64.powi(-k)));
    grid
}

fn approaches(values: &[f64], target: f64) -> bool {
    values.windows(2).all(|w| {
        let (prev, next) = ((w[0] - target).abs(), (w[1] - target).abs());
        next <= prev + 1e-14 * prev.max(target.abs()).max(1.0)
    })
}

pub fn sweep(left: State, right: State, eps_list: &[Eps]) -> LimitTable {
    let threshold = epsilon_threshold(left, right);
    let expected = threshold.regime.small_eps_pattern();
    let mut eps_sorted: Vec<Eps> = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.get().total_cmp(&a.get()));
    let rows: Vec<SweepRow> = eps_sorted
        .into_iter()
        .map(|e| {
            let mut row = SweepRow::compute(left, right, e);
            row.above_threshold = match expected {
                Some(p) => row.pattern != p,
                None => threshold.eps0.exceeded_by(row.eps),
            };
            row
        })
        .collect();

    let targets = limit_targets(left, right).ok();
    let convergence = targets.map(|t| {
        let below: Vec<&SweepRow> = rows.iter().filter(|r| !r.above_threshold).collect();
        let col = |f: fn(&SweepRow) -> f64| below.iter().map(|r| f(r)).collect::<Vec<_>>();
        let v = col(|r| r.v_star);
        ColumnConvergence {
            u_star: approaches(&col(|r| r.u_star), t.u_star),
            v_star: match t.v_star {
                LimitValue::Finite(x) => approaches(&v, x),
                LimitValue::Infinite => v.windows(2).all(|w| w[1] >= w[0]),
            },
            sigma1: approaches(&col(|r| r.sigma1), t.sigma1),
            sigma2: approaches(&col(|r| r.sigma2), t.sigma2),
            product: approaches(&col(|r| r.product), t.product),
        }
    });
    LimitTable { left, right, threshold, targets, rows, convergence }
}

/// Test function constant on a neighbourhood of the limiting discontinuity.
pub trait SlopingTestFunction {
    fn value(&self, xi: f64) -> f64;
    /// Closed interval outside which the function vanishes.
    fn support(&self) -> (f64, f64);
    /// Interval on which the function is claimed to be constant.
    fn flat_region(&self) -> (f64, f64);
}

/// `C^inf` bump: equal to `height` on `|xi - center| <= flat`, zero beyond
/// `|xi - center| >= reach`, smooth in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothBump {
    pub center: f64,
    pub flat: f64,
    pub reach: f64,
    pub height: f64,
}

impl SmoothBump {
    pub fn new(center: f64, flat: f64, reach: f64, height: f64) -> Result<Self> {
        if !(flat > 0.0 && reach > flat) {
            return Err(Error::Precondition(format!("bump needs 0 < flat < reach (got {flat}, {reach})")));
        }
        Ok(SmoothBump { center, flat, reach, height })
    }
}

fn smooth_step(t: f64) -> f64 {
    let g = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let (a, b) = (g(t), g(1.0 - t));
    a / (a + b)
}

impl SlopingTestFunction for SmoothBump {
    fn value(&self, xi: f64) -> f64 {
        let d = (xi - self.center).abs();
        if d <= self.flat {
            self.height
        } else if d >= self.reach {
            0.0
        } else {
            self.height * smooth_step((self.reach - d) / (self.reach - self.flat))
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.reach, self.center + self.reach)
    }

    fn flat_region(&self) -> (f64, f64) {
        (self.center - self.flat, self.center + self.flat)
    }
}

const FLAT_SAMPLES: usize = 33;

fn check_flat<P: SlopingTestFunction + ?Sized>(phi: &P, sigma: f64) -> Result<()> {
    let (a, b) = phi.flat_region();
    if !(a < sigma && sigma < b) {
        return Err(Error::NotFlat { sigma });
    }
    let at_sigma = phi.value(sigma);
    let flat = (0..FLAT_SAMPLES).all(|k| {
        let xi = a + (b - a) * k as f64 / (FLAT_SAMPLES - 1) as f64;
        (phi.value(xi) - at_sigma).abs() <= 1e-12 * at_sigma.abs().max(1.0)
    });
    if flat {
        Ok(())
    } else {
        Err(Error::NotFlat { sigma })
    }
}

/// `| int (v^eps(xi) - H(xi - sigma)) phi(xi) dxi - (u_- v_+ - u_+ v_-) phi(sigma) |`
/// with `H` equal to `v_-` on the left and `v_+` on the right.
pub fn weak_form_residual<P: SlopingTestFunction + ?Sized>(
    left: State,
    right: State,
    eps: Eps,
    phi: &P,
) -> Result<f64> {
    let (um, vm, up, vp) = (left.u(), left.v(), right.u(), right.v());
    if !(up <= 0.0 && 0.0 <= um) {
        return Err(Error::Precondition(format!("need u_+ <= 0 <= u_- (got u_-={um}, u_+={up})")));
    }
    let sigma = um + up;
    check_flat(phi, sigma)?;
    let sol = solve_riemann(left, right, eps);
    let (a, b) = phi.support();
    let mut breaks = vec![sigma];
    let (fa, fb) = phi.flat_region();
    breaks.extend([fa, fb]);
    for w in &sol.waves {
        breaks.extend([w.start(), w.end()]);
    }
    let integrand = |xi: f64| {
        let background = if xi < sigma { vm } else { vp };
        (sol.evaluate(xi).v() - background) * phi.value(xi)
    };
    let integral = quadrature::integrate_with_breaks(integrand, a, b, &breaks, 1e-12);
    Ok((integral - (um * vp - up * vm) * phi.value(sigma)).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionalRow {
    pub eps: f64,
    /// `max |u^eps - u^0|, |v^eps - v^0|` over the sample points.
    pub sup_error: f64,
    pub weak_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionalReport {
    pub limit_pattern: LimitPattern,
    pub sample_points: Vec<f64>,
    pub rows: Vec<DistributionalRow>,
    pub sup_error_decreasing: bool,
    pub weak_residual_decreasing: Option<bool>,
}

/// Margin kept around limit discontinuities when choosing sample points.
const SAMPLE_MARGIN: f64 = 0.05;

/// Sample points away from the limit solution's discontinuities.
pub fn default_sample_points(left: State, right: State) -> Vec<f64> {
    let lim = solve_riemann_limit(left, right);
    if let Some(ds) = lim.delta() {
        return [-1.0, -0.5, -0.25, 0.25, 0.5, 1.0].iter().map(|d| ds.speed + d).collect();
    }
    let jumps = lim.discontinuities();
    let edges = lim.waves.iter().flat_map(|w| [w.start(), w.end()]);
    let (lo, hi) = edges.fold((0.0f64, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (lo, hi) = (lo - 1.0, hi + 1.0);
    (0..=40)
        .map(|k| lo + (hi - lo) * k as f64 / 40.0)
        .filter(|xi| jumps.iter().all(|j| (xi - j).abs() > SAMPLE_MARGIN))
        .collect()
}

pub fn pointwise_error(left: State, right: State, eps: Eps, points: &[f64]) -> f64 {
    let lim = solve_riemann_limit(left, right);
    let sol = solve_riemann(left, right, eps);
    points
        .iter()
        .filter_map(|&xi| {
            let (u0, v0) = evaluate_limit_xi(&lim, xi).pointwise()?;
            let s = sol.evaluate(xi);
            Some((s.u() - u0).abs().max((s.v() - v0).abs()))
        })
        .fold(0.0, f64::max)
}

/// Absolute slack for monotonicity checks. The weak residual is exactly zero
/// once every wave sits in the flat part of the test function, so it
/// bottoms out at rounding level rather than decreasing forever.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// `xs[k+1] <= xs[k]` up to [`ROUNDOFF_FLOOR`].
pub fn non_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + ROUNDOFF_FLOOR)
}

pub fn verify_distributional_limit(left: State, right: State, eps_list: &[Eps]) -> Result<DistributionalReport> {
    verify_distributional_limit_at(left, right, eps_list, &default_sample_points(left, right))
}

pub fn verify_distributional_limit_at(
    left: State,
    right: State,
    eps_list: &[Eps],
    points: &[f64],
) -> Result<DistributionalReport> {
    let lim = solve_riemann_limit(left, right);
    let bump = lim.delta().map(|ds| SmoothBump::new(ds.speed, 0.5, 1.5, 1.0)).transpose()?;
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.get().total_cmp(&a.get()));
    let rows = eps_sorted
        .iter()
        .map(|&e| {
            let weak_residual = bump.as_ref().map(|phi| weak_form_residual(left, right, e, phi)).transpose()?;
            Ok(DistributionalRow { eps: e.get(), sup_error: pointwise_error(left, right, e, points), weak_residual })
        })
        .collect::<Result<Vec<_>>>()?;
    let sups: Vec<f64> = rows.iter().map(|r| r.sup_error).collect();
    let weak: Option<Vec<f64>> = rows.iter().map(|r| r.weak_residual).collect();
    Ok(DistributionalReport {
        limit_pattern: lim.pattern,
        sample_points: points.to_vec(),
        sup_error_decreasing: non_increasing(&sups),
        weak_residual_decreasing: weak.filter(|w| !w.is_empty()).map(|w| non_increasing(&w)),
        rows,
    })
}

/// The limit-system value at `xi` as `(u, v)`, or `None` on a delta path.
pub fn limit_pointwise(left: State, right: State, xi: f64) -> Option<(f64, f64)> {
    match evaluate_limit_xi(&solve_riemann_limit(left, right), xi) {
        MeasureState::Atom { .. } => None,
        m => m.pointwise(),
    }
}
