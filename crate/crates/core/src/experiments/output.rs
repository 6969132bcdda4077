//! CSV and gnuplot emission.
//!
//! Satisfiability sweeps use the header
//!
//! ```text
//! alpha_nominal,alpha,m_clauses,n_instances,sat_fraction,work_mean,work_median,work_std
//! ```
//!
//! and gibbs sweeps
//!
//! ```text
//! alpha_nominal,alpha,m_clauses,n_instances,sat_fraction,
//!   p_mean_b<β>,p_std_b<β>,p_stderr_b<β>   (once per β, in config order)
//!   beta_star_mean,beta_star_std,beta_star_stderr
//! ```
//!
//! i.e. `5 + 3·|betas| + 3` columns. `<β>` is the shortest decimal form of the
//! inverse temperature (`1`, `2.5`). Floats are written in shortest round-trip
//! form, so reading a file back reproduces every value exactly. Rows are one
//! per density, UTF-8, `.` as decimal separator.

use std::fs;
use std::path::Path;

use super::{GibbsSummary, OccupancyStats, ScalingWindow, Stats, SweepMode, SweepPoint, WorkSummary};
use super::sweep::DensityTiming;
use crate::error::{Error, Result};

const COMMON: [&str; 5] = ["alpha_nominal", "alpha", "m_clauses", "n_instances", "sat_fraction"];
const WORK: [&str; 3] = ["work_mean", "work_median", "work_std"];
const BETA_STAR: [&str; 3] = ["beta_star_mean", "beta_star_std", "beta_star_stderr"];

/// Parsed contents of a sweep CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub mode: SweepMode,
    pub betas: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

fn header(mode: SweepMode, betas: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = COMMON.iter().map(|s| s.to_string()).collect();
    match mode {
        SweepMode::Satisfiability => h.extend(WORK.iter().map(|s| s.to_string())),
        SweepMode::Gibbs => {
            for b in betas {
                for stat in ["p_mean", "p_std", "p_stderr"] {
                    h.push(format!("{stat}_b{b}"));
                }
            }
            h.extend(BETA_STAR.iter().map(|s| s.to_string()));
        }
    }
    h
}

fn row(p: &SweepPoint) -> Vec<String> {
    let mut r = vec![
        p.alpha_nominal.to_string(),
        p.alpha.to_string(),
        p.m_clauses.to_string(),
        p.n_instances.to_string(),
        p.sat_fraction.to_string(),
    ];
    if let Some(w) = &p.work {
        r.extend([w.mean, w.median, w.std].iter().map(f64::to_string));
    }
    if let Some(g) = &p.gibbs {
        for o in &g.occupancy {
            r.extend([o.p.mean, o.p.std, o.p.stderr].iter().map(f64::to_string));
        }
        let s = g.beta_star;
        r.extend([s.mean, s.std, s.stderr].iter().map(f64::to_string));
    }
    r
}

/// Sweep CSV as a string.
pub fn sweep_csv(mode: SweepMode, betas: &[f64], points: &[SweepPoint]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let bad = |e: csv::Error| Error::Csv {
        path: "<memory>".into(),
        reason: e.to_string(),
    };
    w.write_record(header(mode, betas)).map_err(bad)?;
    for p in points {
        let expected = match mode {
            SweepMode::Satisfiability => p.work.is_some(),
            SweepMode::Gibbs => p.gibbs.as_ref().is_some_and(|g| g.occupancy.len() == betas.len()),
        };
        if !expected {
            return Err(Error::InvalidParameter(format!(
                "point at alpha {} does not match the {mode:?} schema",
                p.alpha
            )));
        }
        w.write_record(row(p)).map_err(bad)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Writes a sweep CSV to `path`.
pub fn emit_csv(path: &Path, mode: SweepMode, betas: &[f64], points: &[SweepPoint]) -> Result<()> {
    let text = sweep_csv(mode, betas, points)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn emit_window_csv(path: &Path, window: &ScalingWindow) -> Result<()> {
    let text = format!(
        "delta,alpha_minus,alpha_plus,width,minus_clamped,plus_clamped\n{},{},{},{},{},{}\n",
        window.delta,
        window.alpha_minus,
        window.alpha_plus,
        window.width(),
        window.minus_clamped,
        window.plus_clamped
    );
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Wall-clock companion file; not reproducible across runs.
pub fn emit_timing_csv(path: &Path, timing: &[DensityTiming]) -> Result<()> {
    let mut text = String::from("alpha_nominal,wall_time_mean_secs,wall_time_median_secs\n");
    for t in timing {
        text.push_str(&format!(
            "{},{},{}\n",
            t.alpha, t.wall_time_mean_secs, t.wall_time_median_secs
        ));
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a sweep CSV written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<SweepTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text).map_err(|reason| Error::Csv {
        path: path.to_path_buf(),
        reason,
    })
}

fn parse_csv(text: &str) -> std::result::Result<SweepTable, String> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let head: Vec<String> = rdr
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    if head.len() < COMMON.len() || head[..COMMON.len()] != COMMON {
        return Err(format!("header must start with {}", COMMON.join(",")));
    }
    let rest = &head[COMMON.len()..];
    let (mode, betas) = if rest == WORK {
        (SweepMode::Satisfiability, Vec::new())
    } else if rest.len() >= 3 && rest.len() % 3 == 0 && rest[rest.len() - 3..] == BETA_STAR {
        let mut betas = Vec::new();
        for chunk in rest[..rest.len() - 3].chunks(3) {
            let beta = chunk[0]
                .strip_prefix("p_mean_b")
                .ok_or_else(|| format!("unexpected column {}", chunk[0]))?;
            if chunk[1] != format!("p_std_b{beta}") || chunk[2] != format!("p_stderr_b{beta}") {
                return Err(format!("malformed column group for beta {beta}"));
            }
            betas.push(beta.parse::<f64>().map_err(|e| format!("beta {beta}: {e}"))?);
        }
        (SweepMode::Gibbs, betas)
    } else {
        return Err("unrecognized column layout".into());
    };

    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != head.len() {
            return Err(format!("row {} has {} fields, expected {}", line + 2, rec.len(), head.len()));
        }
        let f = |i: usize| -> std::result::Result<f64, String> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| format!("row {}, column {}: {e}", line + 2, head[i]))
        };
        let u = |i: usize| -> std::result::Result<usize, String> {
            rec[i]
                .parse::<usize>()
                .map_err(|e| format!("row {}, column {}: {e}", line + 2, head[i]))
        };
        let mut p = SweepPoint {
            alpha_nominal: f(0)?,
            alpha: f(1)?,
            m_clauses: u(2)?,
            n_instances: u(3)?,
            sat_fraction: f(4)?,
            work: None,
            gibbs: None,
        };
        match mode {
            SweepMode::Satisfiability => {
                p.work = Some(WorkSummary {
                    mean: f(5)?,
                    median: f(6)?,
                    std: f(7)?,
                })
            }
            SweepMode::Gibbs => {
                let stats = |i: usize| -> std::result::Result<Stats, String> {
                    Ok(Stats {
                        mean: f(i)?,
                        std: f(i + 1)?,
                        stderr: f(i + 2)?,
                    })
                };
                let occupancy = betas
                    .iter()
                    .enumerate()
                    .map(|(bi, &beta)| Ok(OccupancyStats { beta, p: stats(5 + 3 * bi)? }))
                    .collect::<std::result::Result<Vec<_>, String>>()?;
                p.gibbs = Some(GibbsSummary {
                    occupancy,
                    beta_star: stats(5 + 3 * betas.len())?,
                });
            }
        }
        points.push(p);
    }
    Ok(SweepTable { mode, betas, points })
}

/// Self-contained gnuplot program that renders `csv_name` (resolved relative
/// to the working directory gnuplot runs in) into `<stem>.svg`. Error bars
/// are one standard deviation.
pub fn plot_script(mode: SweepMode, betas: &[f64], csv_name: &str, stem: &str) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "# Generated by gibbssat. Usage: gnuplot {stem}.gp\n\
         set datafile separator ','\n\
         set terminal svg size 900,{} dynamic enhanced font 'sans,12'\n\
         set output '{stem}.svg'\n\
         set xlabel 'clause density {{/Symbol a}} = M/N'\n\
         set grid\n\
         set key outside right top\n",
        if mode == SweepMode::Gibbs { 900 } else { 500 }
    ));
    match mode {
        SweepMode::Satisfiability => {
            s.push_str(&format!(
                "set ylabel 'fraction satisfiable'\n\
                 set y2label 'median work (decisions + propagations)'\n\
                 set yrange [0:1.05]\n\
                 set ytics nomirror\n\
                 set y2tics\n\
                 plot '{csv_name}' skip 1 using 2:5 with linespoints pt 7 title 'P(sat)', \\\n\
                 \x20    '{csv_name}' skip 1 using 2:7 axes x1y2 with linespoints pt 5 title 'median work'\n"
            ));
        }
        SweepMode::Gibbs => {
            let star = 6 + 3 * betas.len();
            s.push_str("set multiplot layout 2,1\n");
            s.push_str("set ylabel 'ground-state occupancy p({/Symbol l}_{min}, {/Symbol b})'\n");
            s.push_str("set yrange [0:1.05]\n");
            let curves: Vec<String> = betas
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let mean = 6 + 3 * i;
                    format!(
                        "'{csv_name}' skip 1 using 2:{mean}:{} with yerrorlines title '{{/Symbol b}} = {b}'",
                        mean + 1
                    )
                })
                .collect();
            if curves.is_empty() {
                s.push_str("set label 1 'no inverse temperatures configured' at graph 0.5,0.5 center\nplot NaN notitle\nunset label 1\n");
            } else {
                s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
            }
            s.push_str("set ylabel 'minimal {/Symbol b} with p > threshold'\n");
            s.push_str("set autoscale y\n");
            s.push_str(&format!(
                "plot '{csv_name}' skip 1 using 2:{star}:{} with yerrorlines pt 7 title '{{/Symbol b}}*'\n",
                star + 1
            ));
            s.push_str("unset multiplot\n");
        }
    }
    s
}

/// Writes [`plot_script`] for the CSV at `csv_path` next to it as `path`.
pub fn emit_plot_script(path: &Path, mode: SweepMode, betas: &[f64], csv_path: &Path) -> Result<()> {
    let csv_name = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| csv_path.to_string_lossy().into_owned());
    let stem = path
        .file_stem()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "plot".into());
    fs::write(path, plot_script(mode, betas, &csv_name, &stem)).map_err(|e| Error::io(path, e))
}
