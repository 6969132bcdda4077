use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{median, GibbsSummary, OccupancyStats, Stats, SweepConfig, SweepMode, SweepPoint, WorkSummary};
use crate::cnf::{derive_seed, generate_instance, CnfFormula};
use crate::error::{Error, Result};
use crate::gibbs::{
    enumerate_spectrum_with_limit, ground_occupancy, min_beta_for_occupancy, EnergyHistogram,
    DEFAULT_BETA_TOL,
};
use crate::solver::{solve_2sat, solve_dpll};

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    /// Resume file. Completed densities are read from it and each newly
    /// finished density is flushed to it.
    pub checkpoint: Option<PathBuf>,
}

/// Informational wall-clock statistics, kept apart from the deterministic
/// [`SweepPoint`]s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityTiming {
    pub alpha: f64,
    pub wall_time_mean_secs: f64,
    pub wall_time_median_secs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRun {
    pub points: Vec<SweepPoint>,
    pub timing: Vec<DensityTiming>,
}

/// Runs whichever sweep `config.mode` names.
pub fn run_sweep(config: &SweepConfig, opts: &SweepOptions) -> Result<SweepRun> {
    config.validate()?;
    match opts.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(|| run_in_pool(config, opts))
        }
        None => run_in_pool(config, opts),
    }
}

/// Fraction satisfiable and solver work per density.
///
/// Width-3 instances are decided by DPLL. Width-2 instances are decided by
/// the implication-graph solver and also run through DPLL, whose
/// decisions + propagations are the reported work; the two verdicts must agree.
pub fn run_satisfiability_sweep(config: &SweepConfig, opts: &SweepOptions) -> Result<SweepRun> {
    if config.mode != SweepMode::Satisfiability {
        return Err(Error::Config("expected a satisfiability config".into()));
    }
    run_sweep(config, opts)
}

/// Ground-state occupancy per β and minimal β for the threshold, per density.
pub fn run_gibbs_sweep(config: &SweepConfig, opts: &SweepOptions) -> Result<SweepRun> {
    if config.mode != SweepMode::Gibbs {
        return Err(Error::Config("expected a gibbs config".into()));
    }
    run_sweep(config, opts)
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    config_hash: String,
    densities: BTreeMap<usize, DensityRecord>,
}

#[derive(Clone, Serialize, Deserialize)]
struct DensityRecord {
    point: SweepPoint,
    timing: DensityTiming,
    /// Per-instance spectra of gibbs sweeps, in instance order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    histograms: Option<Vec<EnergyHistogram>>,
}

fn load_checkpoint(path: &Path, hash: &str) -> Result<Checkpoint> {
    if !path.exists() {
        return Ok(Checkpoint {
            config_hash: hash.to_string(),
            densities: BTreeMap::new(),
        });
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cp: Checkpoint = serde_json::from_str(&text)?;
    if cp.config_hash != hash {
        return Err(Error::ResumeMismatch {
            path: path.to_path_buf(),
            expected: hash.to_string(),
            found: cp.config_hash,
        });
    }
    Ok(cp)
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec(cp)?).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn run_in_pool(config: &SweepConfig, opts: &SweepOptions) -> Result<SweepRun> {
    let alphas = config.alphas()?;
    let hash = config.hash();
    let mut checkpoint = match &opts.checkpoint {
        Some(path) => Some(load_checkpoint(path, &hash)?),
        None => None,
    };

    let mut points = Vec::with_capacity(alphas.len());
    let mut timing = Vec::with_capacity(alphas.len());
    for (di, &alpha) in alphas.iter().enumerate() {
        if let Some(rec) = checkpoint.as_ref().and_then(|cp| cp.densities.get(&di)) {
            points.push(rec.point.clone());
            timing.push(rec.timing);
            continue;
        }
        let record = match config.mode {
            SweepMode::Satisfiability => satisfiability_density(config, di, alpha)?,
            SweepMode::Gibbs => gibbs_density(config, di, alpha)?,
        };
        points.push(record.point.clone());
        timing.push(record.timing);
        if let (Some(cp), Some(path)) = (checkpoint.as_mut(), opts.checkpoint.as_deref()) {
            cp.densities.insert(di, record);
            save_checkpoint(path, cp)?;
        }
    }
    Ok(SweepRun { points, timing })
}

fn instance(config: &SweepConfig, di: usize, ii: usize, m: usize) -> Result<CnfFormula> {
    let seed = derive_seed(config.master_seed, di as u64, ii as u64);
    generate_instance(config.n_vars, m, config.k, seed)
}

fn point_header(config: &SweepConfig, alpha: f64, m: usize, n_sat: usize) -> SweepPoint {
    let n = config.instances_per_density;
    SweepPoint {
        alpha_nominal: alpha,
        alpha: m as f64 / config.n_vars as f64,
        m_clauses: m,
        n_instances: n,
        sat_fraction: n_sat as f64 / n as f64,
        work: None,
        gibbs: None,
    }
}

fn timing_of(alpha: f64, secs: &[f64]) -> DensityTiming {
    DensityTiming {
        alpha,
        wall_time_mean_secs: Stats::of(secs).mean,
        wall_time_median_secs: median(secs),
    }
}

struct SatOutcome {
    satisfiable: bool,
    work: u64,
    secs: f64,
}

fn satisfiability_density(config: &SweepConfig, di: usize, alpha: f64) -> Result<DensityRecord> {
    let m = config.clause_count(alpha);
    let outcomes: Vec<SatOutcome> = (0..config.instances_per_density)
        .into_par_iter()
        .map(|ii| {
            let f = instance(config, di, ii, m)?;
            let dpll = solve_dpll(&f);
            let satisfiable = if f.k() == 2 {
                let scc = solve_2sat(&f)?;
                if scc.satisfiable != dpll.satisfiable {
                    return Err(Error::SolverDisagreement {
                        density: di,
                        instance: ii,
                    });
                }
                scc.satisfiable
            } else {
                dpll.satisfiable
            };
            Ok(SatOutcome {
                satisfiable,
                work: dpll.work.work(),
                secs: dpll.work.wall_time.as_secs_f64(),
            })
        })
        .collect::<Result<_>>()?;

    let n_sat = outcomes.iter().filter(|o| o.satisfiable).count();
    let work: Vec<f64> = outcomes.iter().map(|o| o.work as f64).collect();
    let stats = Stats::of(&work);
    let mut point = point_header(config, alpha, m, n_sat);
    point.work = Some(WorkSummary {
        mean: stats.mean,
        median: median(&work),
        std: stats.std,
    });
    let secs: Vec<f64> = outcomes.iter().map(|o| o.secs).collect();
    Ok(DensityRecord {
        point,
        timing: timing_of(alpha, &secs),
        histograms: None,
    })
}

struct GibbsOutcome {
    histogram: EnergyHistogram,
    p: Vec<f64>,
    beta_star: f64,
    secs: f64,
}

fn gibbs_density(config: &SweepConfig, di: usize, alpha: f64) -> Result<DensityRecord> {
    let m = config.clause_count(alpha);
    let outcomes: Vec<GibbsOutcome> = (0..config.instances_per_density)
        .into_par_iter()
        .map(|ii| {
            let start = Instant::now();
            let f = instance(config, di, ii, m)?;
            let histogram = enumerate_spectrum_with_limit(&f, config.exhaustive_limit)?;
            let p = config
                .betas
                .iter()
                .map(|&b| ground_occupancy(&histogram, b))
                .collect();
            let beta_star = min_beta_for_occupancy(&histogram, config.threshold, DEFAULT_BETA_TOL)?;
            Ok(GibbsOutcome {
                histogram,
                p,
                beta_star,
                secs: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<_>>()?;

    let n_sat = outcomes
        .iter()
        .filter(|o| o.histogram.lambda_min() == 0)
        .count();
    let occupancy = config
        .betas
        .iter()
        .enumerate()
        .map(|(bi, &beta)| {
            let ps: Vec<f64> = outcomes.iter().map(|o| o.p[bi]).collect();
            OccupancyStats {
                beta,
                p: Stats::of(&ps),
            }
        })
        .collect();
    let stars: Vec<f64> = outcomes.iter().map(|o| o.beta_star).collect();
    let mut point = point_header(config, alpha, m, n_sat);
    point.gibbs = Some(GibbsSummary {
        occupancy,
        beta_star: Stats::of(&stars),
    });
    let secs: Vec<f64> = outcomes.iter().map(|o| o.secs).collect();
    Ok(DensityRecord {
        point,
        timing: timing_of(alpha, &secs),
        histograms: Some(outcomes.into_iter().map(|o| o.histogram).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Densities;

    fn gibbs_config(densities: Vec<f64>, instances: usize) -> SweepConfig {
        SweepConfig::new(SweepMode::Gibbs, 2, 10, densities, instances, 11)
    }

    #[test]
    fn zero_clause_column() {
        let run = run_sweep(&gibbs_config(vec![0.0, 1.0], 5), &SweepOptions::default()).unwrap();
        let g = run.points[0].gibbs.as_ref().unwrap();
        for o in &g.occupancy {
            assert_eq!(o.p.mean, 1.0);
            assert_eq!(o.p.std, 0.0);
        }
        assert_eq!(g.beta_star.mean, 0.0);
        assert_eq!(run.points[0].sat_fraction, 1.0);
    }

    #[test]
    fn repeat_runs_are_identical() {
        let cfg = SweepConfig::new(SweepMode::Satisfiability, 3, 40, vec![4.2], 1, 3);
        let a = run_sweep(&cfg, &SweepOptions::default()).unwrap();
        let b = run_sweep(&cfg, &SweepOptions::default()).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.points[0].m_clauses, 168);
        assert_eq!(a.points[0].alpha, 4.2);
    }

    #[test]
    fn occupancy_means_ordered_in_beta() {
        let cfg = gibbs_config(vec![0.5, 1.0, 1.5, 2.0, 3.0], 20);
        let run = run_sweep(&cfg, &SweepOptions::default()).unwrap();
        for p in &run.points {
            let g = p.gibbs.as_ref().unwrap();
            assert!(g.occupancy.windows(2).all(|w| w[0].p.mean <= w[1].p.mean));
        }
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let cfg = gibbs_config(vec![1.0], 1);
        assert!(matches!(
            run_satisfiability_sweep(&cfg, &SweepOptions::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn checkpoint_resume_and_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let mut cfg = gibbs_config(vec![0.5, 1.0, 2.0], 4);
        let opts = SweepOptions {
            threads: Some(1),
            checkpoint: Some(path.clone()),
        };
        let first = run_sweep(&cfg, &opts).unwrap();
        assert!(path.exists());
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"histograms\""));

        // Resumed run reads every density back unchanged.
        let resumed = run_sweep(&cfg, &opts).unwrap();
        assert_eq!(first.points, resumed.points);

        cfg.densities = Densities::List(vec![0.5, 1.0, 2.5]);
        assert!(matches!(run_sweep(&cfg, &opts), Err(Error::ResumeMismatch { .. })));
    }

    #[test]
    fn partial_checkpoint_completes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let cfg = SweepConfig::new(SweepMode::Satisfiability, 2, 60, vec![0.5, 1.0, 1.5], 8, 9);
        let full = run_sweep(&cfg, &SweepOptions::default()).unwrap();

        // Simulate an interruption after the first density.
        let mut cp = Checkpoint {
            config_hash: cfg.hash(),
            densities: BTreeMap::new(),
        };
        cp.densities.insert(0, satisfiability_density(&cfg, 0, 0.5).unwrap());
        save_checkpoint(&path, &cp).unwrap();

        let opts = SweepOptions {
            threads: None,
            checkpoint: Some(path.clone()),
        };
        let resumed = run_sweep(&cfg, &opts).unwrap();
        assert_eq!(resumed.points, full.points);
        let cp = load_checkpoint(&path, &cfg.hash()).unwrap();
        assert_eq!(cp.densities.len(), 3);
    }
}
