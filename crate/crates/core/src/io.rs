//! Text formats: CSV with 17 significant digits, JSON with shortest
//! round-trip floats (serde_json's default).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::flux_limit::LimitTable;
use crate::nt_scheme::SimSnapshot;
use crate::riemann::RiemannSolution;

/// Fixed 17-significant-digit rendering used in every CSV.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows<W: Write>(mut out: W, header: &str, rows: impl Iterator<Item = Vec<String>>) -> io::Result<()> {
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

/// `xi,u,v` samples of an exact solution at `samples` points over `[xi_min, xi_max]`.
pub fn profile_rows(sol: &RiemannSolution, xi_min: f64, xi_max: f64, samples: usize) -> Vec<(f64, f64, f64)> {
    let n = samples.max(2);
    (0..n)
        .map(|k| {
            let xi = xi_min + (xi_max - xi_min) * k as f64 / (n - 1) as f64;
            let s = sol.evaluate(xi);
            (xi, s.u(), s.v())
        })
        .collect()
}

pub fn write_profile_csv<W: Write>(out: W, rows: &[(f64, f64, f64)]) -> io::Result<()> {
    write_rows(out, "xi,u,v", rows.iter().map(|&(xi, u, v)| vec![fmt17(xi), fmt17(u), fmt17(v)]))
}

pub fn write_limit_table_csv<W: Write>(out: W, table: &LimitTable) -> io::Result<()> {
    write_rows(
        out,
        "eps,u_star,v_star,sigma1,sigma2,product,flags",
        table.rows.iter().map(|r| {
            vec![
                fmt17(r.eps),
                fmt17(r.u_star),
                fmt17(r.v_star),
                fmt17(r.sigma1),
                fmt17(r.sigma2),
                fmt17(r.product),
                r.flags(),
            ]
        }),
    )
}

pub fn write_snapshot_csv<W: Write>(out: W, snap: &SimSnapshot) -> io::Result<()> {
    let x = snap.x();
    write_rows(
        out,
        "x,u,v",
        x.iter().zip(snap.u.iter().zip(&snap.v)).map(|(&x, (&u, &v))| vec![fmt17(x), fmt17(u), fmt17(v)]),
    )
}

/// Whitespace-separated two-column data for gnuplot.
pub fn write_two_column<W: Write>(mut out: W, x: &[f64], y: &[f64]) -> io::Result<()> {
    for (a, b) in x.iter().zip(y) {
        writeln!(out, "{} {}", fmt17(*a), fmt17(*b))?;
    }
    out.flush()
}

/// `sim_eps{eps}_t{t}.csv`, numbers in shortest round-trip form.
pub fn snapshot_filename(eps: f64, t: f64) -> String {
    format!("sim_eps{eps}_t{t}.csv")
}

/// Writes the snapshot CSV into `dir` and returns its path.
pub fn save_snapshot(dir: &Path, snap: &SimSnapshot) -> io::Result<PathBuf> {
    let path = dir.join(snapshot_filename(snap.eps.get(), snap.t));
    write_snapshot_csv(io::BufWriter::new(fs::File::create(&path)?), snap)?;
    Ok(path)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serialises")
}

pub fn save_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = to_json(value);
    text.push('\n');
    fs::write(path, text)
}
