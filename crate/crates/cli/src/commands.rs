use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::thread;

use serde::Serialize;

use deltashock::flux_limit::{
    default_eps_grid, epsilon_threshold, intermediate_edges, limit_targets as targets_of, sweep as sweep_table,
    LimitTargets, LimitValue, Threshold, ThresholdValue,
};
use deltashock::io::{
    fmt17, profile_rows, save_json, save_snapshot, to_json, write_limit_table_csv, write_profile_csv,
    write_snapshot_csv,
};
use deltashock::limit_system::{evaluate_limit_xi, solve_riemann_limit, DeltaShock, LimitSolution};
use deltashock::nt_scheme::{
    delta_weight_estimate, measured_separation, run, Diagnostics, SimConfig, SimSnapshot, WeightEstimate,
    DEFAULT_WEIGHT_HALFWIDTH,
};
use deltashock::quadrature::integrate_with_breaks;
use deltashock::riemann::{solve_riemann, RiemannSolution};
use deltashock::{Eps, State};

use crate::args::{Format, Settings};
use crate::CliError;

fn print_json<T: Serialize + ?Sized>(value: &T) -> io::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{}", to_json(value))
}

fn create(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_csv_rows<W: Write>(mut out: W, header: &str, rows: &[Vec<String>]) -> io::Result<()> {
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

fn default_xi_range(starts_ends: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = starts_ends.fold((0.0f64, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
    (lo - 1.0, hi + 1.0)
}

fn limit_profile(sol: &LimitSolution, (a, b): (f64, f64), samples: usize) -> Vec<(f64, f64, f64)> {
    let n = samples.max(2);
    (0..n)
        .filter_map(|k| {
            let xi = a + (b - a) * k as f64 / (n - 1) as f64;
            evaluate_limit_xi(sol, xi).pointwise().map(|(u, v)| (xi, u, v))
        })
        .collect()
}

#[derive(Serialize)]
struct LimitOutput<'a> {
    #[serde(flatten)]
    solution: &'a LimitSolution,
    delta: Option<DeltaShock>,
}

pub fn solve(s: &Settings) -> Result<(), CliError> {
    let (json, rows) = match s.eps {
        Some(eps) => {
            let sol: RiemannSolution = solve_riemann(s.left, s.right, eps);
            let range = s.xi.unwrap_or_else(|| default_xi_range(sol.waves.iter().flat_map(|w| [w.start(), w.end()])));
            (serde_json::to_value(&sol), profile_rows(&sol, range.0, range.1, s.samples))
        }
        None => {
            let sol = solve_riemann_limit(s.left, s.right);
            let range = s.xi.unwrap_or_else(|| default_xi_range(sol.waves.iter().flat_map(|w| [w.start(), w.end()])));
            let out = LimitOutput { solution: &sol, delta: sol.delta() };
            (serde_json::to_value(&out), limit_profile(&sol, range, s.samples))
        }
    };
    let json = json.map_err(|e| CliError::Internal(e.into()))?;
    if let Some(dir) = &s.out {
        save_json(&dir.join("solution.json"), &json)?;
        write_profile_csv(create(dir, "profile.csv")?, &rows)?;
    }
    match s.format {
        Format::Json => print_json(&json)?,
        Format::Csv => write_profile_csv(io::stdout().lock(), &rows)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct TargetsOutput {
    threshold: Threshold,
    targets: Option<LimitTargets>,
}

fn threshold_text(t: ThresholdValue) -> String {
    t.finite().map_or_else(|| "inf".to_string(), fmt17)
}

fn limit_value_text(v: LimitValue) -> String {
    v.finite().map_or_else(|| "inf".to_string(), fmt17)
}

pub fn limit_targets(s: &Settings) -> Result<(), CliError> {
    let out =
        TargetsOutput { threshold: epsilon_threshold(s.left, s.right), targets: targets_of(s.left, s.right).ok() };
    let header = "eps0,regime,u_star,v_star,sigma1,sigma2,product";
    let row = match &out.targets {
        Some(t) => vec![
            threshold_text(out.threshold.eps0),
            serde_json::to_value(t.regime).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            fmt17(t.u_star),
            limit_value_text(t.v_star),
            fmt17(t.sigma1),
            fmt17(t.sigma2),
            fmt17(t.product),
        ],
        None => {
            let mut r = vec![threshold_text(out.threshold.eps0), "mixed".into()];
            r.extend(std::iter::repeat_n(String::new(), 5));
            r
        }
    };
    if let Some(dir) = &s.out {
        save_json(&dir.join("limit_targets.json"), &out)?;
        write_csv_rows(create(dir, "limit_targets.csv")?, header, std::slice::from_ref(&row))?;
    }
    match s.format {
        Format::Json => print_json(&out)?,
        Format::Csv => write_csv_rows(io::stdout().lock(), header, &[row])?,
    }
    Ok(())
}

fn eps_list_or(s: &Settings, default: &[f64]) -> Vec<Eps> {
    s.eps_list.clone().unwrap_or_else(|| default.iter().map(|&e| Eps::new(e).expect("positive default")).collect())
}

pub fn sweep(s: &Settings) -> Result<(), CliError> {
    let table = sweep_table(s.left, s.right, &eps_list_or(s, &default_eps_grid()));
    if let Some(dir) = &s.out {
        save_json(&dir.join("sweep.json"), &table)?;
        write_limit_table_csv(create(dir, "sweep.csv")?, &table)?;
    }
    match s.format {
        Format::Json => print_json(&table)?,
        Format::Csv => write_limit_table_csv(io::stdout().lock(), &table)?,
    }
    Ok(())
}

fn delta_data(left: State, right: State) -> bool {
    right.u() <= 0.0 && 0.0 <= left.u()
}

#[derive(Serialize)]
struct SnapshotEntry {
    t: f64,
    file: Option<String>,
    diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct SimulateOutput {
    config: SimConfig,
    left: State,
    right: State,
    /// Final-time diagnostics.
    diagnostics: Diagnostics,
    weight: Option<WeightEstimate>,
    snapshots: Vec<SnapshotEntry>,
}

fn save_snapshots(dir: Option<&Path>, snaps: &[SimSnapshot]) -> Result<Vec<SnapshotEntry>, CliError> {
    snaps
        .iter()
        .map(|snap| {
            let file = match dir {
                Some(d) => save_snapshot(d, snap)?.file_name().map(|f| f.to_string_lossy().into_owned()),
                None => None,
            };
            Ok(SnapshotEntry { t: snap.t, file, diagnostics: snap.diagnostics.clone() })
        })
        .collect()
}

pub fn simulate(s: &Settings) -> Result<(), CliError> {
    let config = s.sim_config(s.require_eps()?)?;
    let snaps = run(&config, s.left, s.right)?;
    let last = snaps.last().expect("run returns the final snapshot");
    let weight = if delta_data(s.left, s.right) {
        Some(delta_weight_estimate(last, s.left.u() + s.right.u(), DEFAULT_WEIGHT_HALFWIDTH)?)
    } else {
        None
    };
    let out = SimulateOutput {
        config: config.clone(),
        left: s.left,
        right: s.right,
        diagnostics: last.diagnostics.clone(),
        weight,
        snapshots: save_snapshots(s.out.as_deref(), &snaps)?,
    };
    if let Some(dir) = &s.out {
        save_json(&dir.join("diagnostics.json"), &out)?;
    }
    match s.format {
        Format::Json => print_json(&out)?,
        Format::Csv => write_snapshot_csv(io::stdout().lock(), last)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct WeightRow {
    halfwidth: f64,
    estimate: f64,
    double_window: f64,
    /// Excess over the background of the exact solution at the same `eps`.
    exact_excess: f64,
    /// `w1 t` of the limit delta-shock, for delta data.
    limit_weight: Option<f64>,
    clipped: bool,
}

#[derive(Serialize)]
struct CompareOutput {
    eps: f64,
    t: f64,
    cells: usize,
    l1_u: f64,
    l1_v: f64,
    weights: Vec<WeightRow>,
}

fn exact_excess(sol: &RiemannSolution, t: f64, center: f64, halfwidth: f64) -> f64 {
    let (vm, vp) = (sol.left.v(), sol.right.v());
    let breaks: Vec<f64> = sol.waves.iter().flat_map(|w| [w.start() * t, w.end() * t]).chain([center]).collect();
    let f = |x: f64| sol.evaluate(x / t).v() - if x < center { vm } else { vp };
    integrate_with_breaks(f, center - halfwidth, center + halfwidth, &breaks, 1e-12)
}

pub fn compare(s: &Settings) -> Result<(), CliError> {
    let eps = s.require_eps()?;
    let config = s.sim_config(eps)?;
    let snap = run(&config, s.left, s.right)?.pop().expect("run returns the final snapshot");
    let sol = solve_riemann(s.left, s.right, eps);
    let dx = snap.grid.dx();
    let x = snap.x();
    let exact: Vec<State> = x.iter().map(|&x| sol.evaluate(x / snap.t)).collect();
    let l1_u = snap.u.iter().zip(&exact).map(|(u, e)| (u - e.u()).abs()).sum::<f64>() * dx;
    let l1_v = snap.v.iter().zip(&exact).map(|(v, e)| (v - e.v()).abs()).sum::<f64>() * dx;

    let sigma = s.left.u() + s.right.u();
    let limit = delta_data(s.left, s.right).then(|| DeltaShock::between(s.left, s.right).weight(snap.t));
    let weights = [0.5, 1.0, 2.0]
        .iter()
        .map(|k| {
            let h = k * DEFAULT_WEIGHT_HALFWIDTH;
            let w = delta_weight_estimate(&snap, sigma, h)?;
            Ok(WeightRow {
                halfwidth: h,
                estimate: w.value,
                double_window: w.double_window,
                exact_excess: exact_excess(&sol, snap.t, sigma * snap.t, h),
                limit_weight: limit,
                clipped: w.clipped,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let out = CompareOutput { eps: eps.get(), t: snap.t, cells: snap.grid.n_cells, l1_u, l1_v, weights };

    let header = "halfwidth,estimate,double_window,exact_excess,limit_weight,clipped";
    let rows: Vec<Vec<String>> = out
        .weights
        .iter()
        .map(|w| {
            vec![
                fmt17(w.halfwidth),
                fmt17(w.estimate),
                fmt17(w.double_window),
                fmt17(w.exact_excess),
                w.limit_weight.map(fmt17).unwrap_or_default(),
                w.clipped.to_string(),
            ]
        })
        .collect();
    if let Some(dir) = &s.out {
        save_json(&dir.join("compare.json"), &out)?;
        write_csv_rows(create(dir, "compare_weights.csv")?, header, &rows)?;
        let profile: Vec<Vec<String>> = x
            .iter()
            .zip(snap.u.iter().zip(&snap.v))
            .zip(&exact)
            .map(|((&x, (&u, &v)), e)| vec![fmt17(x), fmt17(u), fmt17(v), fmt17(e.u()), fmt17(e.v())])
            .collect();
        write_csv_rows(create(dir, "compare_profile.csv")?, "x,u,v,u_exact,v_exact", &profile)?;
    }
    match s.format {
        Format::Json => print_json(&out)?,
        Format::Csv => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "# l1_u={} l1_v={}", fmt17(l1_u), fmt17(l1_v))?;
            write_csv_rows(stdout, header, &rows)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportRow {
    eps: f64,
    pattern: String,
    v_max: f64,
    v_star: f64,
    separation: Option<f64>,
    exact_separation: f64,
    weight_estimate: Option<f64>,
    clipped_mass: f64,
    file: Option<String>,
}

#[derive(Serialize)]
struct ReportOutput {
    threshold: Threshold,
    targets: Option<LimitTargets>,
    limit: LimitSolution,
    t: f64,
    cells: usize,
    runs: Vec<ReportRow>,
    sweep: deltashock::flux_limit::LimitTable,
}

fn report_row(s: &Settings, eps: Eps) -> Result<ReportRow, CliError> {
    let config = s.sim_config(eps)?;
    let snap = run(&config, s.left, s.right)?.pop().expect("run returns the final snapshot");
    let sol = solve_riemann(s.left, s.right, eps);
    let (s1, s2) = intermediate_edges(&sol);
    let file = match &s.out {
        Some(dir) => save_snapshot(dir, &snap)?.file_name().map(|f| f.to_string_lossy().into_owned()),
        None => None,
    };
    Ok(ReportRow {
        eps: eps.get(),
        pattern: sol.pattern.to_string(),
        v_max: snap.diagnostics.v_max,
        v_star: sol.middle.v(),
        separation: measured_separation(&snap),
        exact_separation: s2 - s1,
        weight_estimate: snap.diagnostics.delta_weight_estimate,
        clipped_mass: snap.diagnostics.clipped_mass,
        file,
    })
}

pub fn report(s: &Settings) -> Result<(), CliError> {
    let eps_list = eps_list_or(s, &[0.3, 0.15, 0.07, 0.001]);
    // Runs are independent; results keep the input order.
    let runs = thread::scope(|scope| {
        let handles: Vec<_> = eps_list.iter().map(|&e| scope.spawn(move || report_row(s, e))).collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect::<Result<Vec<_>, _>>()
    })?;
    let mut sweep_eps = eps_list.clone();
    sweep_eps.extend(default_eps_grid().into_iter().map(|e| Eps::new(e).expect("positive default")));
    sweep_eps.sort_by(|a, b| b.get().total_cmp(&a.get()));
    sweep_eps.dedup();
    let out = ReportOutput {
        threshold: epsilon_threshold(s.left, s.right),
        targets: targets_of(s.left, s.right).ok(),
        limit: solve_riemann_limit(s.left, s.right),
        t: s.t_end,
        cells: s.cells,
        runs,
        sweep: sweep_table(s.left, s.right, &sweep_eps),
    };
    let header = "eps,pattern,v_max,v_star,separation,exact_separation,weight_estimate,clipped_mass";
    let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
    let rows: Vec<Vec<String>> = out
        .runs
        .iter()
        .map(|r| {
            vec![
                fmt17(r.eps),
                r.pattern.clone(),
                fmt17(r.v_max),
                fmt17(r.v_star),
                opt(r.separation),
                fmt17(r.exact_separation),
                opt(r.weight_estimate),
                fmt17(r.clipped_mass),
            ]
        })
        .collect();
    if let Some(dir) = &s.out {
        save_json(&dir.join("report.json"), &out)?;
        write_csv_rows(create(dir, "report.csv")?, header, &rows)?;
        write_limit_table_csv(create(dir, "sweep.csv")?, &out.sweep)?;
        fs::write(dir.join("limit.json"), to_json(&out.limit) + "\n")?;
    }
    match s.format {
        Format::Json => print_json(&out)?,
        Format::Csv => write_csv_rows(io::stdout().lock(), header, &rows)?,
    }
    Ok(())
}
