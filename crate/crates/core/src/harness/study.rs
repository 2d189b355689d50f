//! Statistical error `Sigma^2(N)` of the stochastic solvers on the
//! periodic accuracy test.
//!
//! For each solver and `eps`, `M` independent realizations at `N` particles
//! per cell are compared with a reference built by averaging several runs
//! at a much larger `N`:
//! `Sigma^2 = (1/M) sum_runs sum_cells (U - U_ref)^2`, per quantity.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{SimConfig, Solver, TestCase};
use crate::harness::{realization_seed, simulate, solvers, Problem};
use crate::state::Conserved;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRow {
    /// Particles per cell.
    pub n: usize,
    /// `Sigma^2` of `(rho, u, T)`.
    pub sigma2: [f64; 3],
}

impl ErrorRow {
    pub fn total(&self) -> f64 {
        self.sigma2.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorSeries {
    pub solver: Solver,
    pub eps: f64,
    pub rows: Vec<ErrorRow>,
    /// Fitted slope of `log Sigma` against `log N` per quantity.
    pub slopes: [f64; 3],
    /// Same fit for `Sigma^2 = Sigma^2_rho + Sigma^2_u + Sigma^2_T`.
    pub slope: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ErrorTable {
    pub series: Vec<ErrorSeries>,
}

impl ErrorTable {
    pub fn get(&self, solver: Solver, eps: f64) -> Option<&ErrorSeries> {
        self.series.iter().find(|s| s.solver == solver && s.eps == eps)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Slope of `log sqrt(s2)` against `log n`.
pub fn sigma_slope(n: &[usize], s2: &[f64]) -> f64 {
    let x: Vec<f64> = n.iter().map(|&v| (v as f64).ln()).collect();
    let y: Vec<f64> = s2.iter().map(|v| 0.5 * v.ln()).collect();
    least_squares_slope(&x, &y)
}

/// `(1/M) sum_runs sum_cells (U - U_ref)^2` for `rho`, `u` and `T`.
pub fn sigma2(runs: &[Vec<Conserved>], reference: &[Conserved]) -> [f64; 3] {
    let mut s = [0.0; 3];
    for run in runs {
        for (c, r) in run.iter().zip(reference) {
            let (a, b) = (c.observables(), r.observables());
            for k in 0..3 {
                s[k] += (a[k] - b[k]).powi(2);
            }
        }
    }
    s.map(|v| v / runs.len() as f64)
}

fn realizations(cfg: &SimConfig, problem: &Problem, solver: Solver, eps: f64, n: usize, m: usize) -> Result<Vec<Vec<Conserved>>> {
    (0..m)
        .into_par_iter()
        .map(|r| simulate(cfg, problem, solver, eps, n, realization_seed(cfg.seed, solver, eps, n, r)))
        .collect()
}

/// Error series of one stochastic solver at one `eps`.
pub fn error_series(cfg: &SimConfig, problem: &Problem, solver: Solver, eps: f64) -> Result<ErrorSeries> {
    let reference = solvers::average_conserved(&realizations(cfg, problem, solver, eps, cfg.study_ref_n, cfg.study_ref_m)?);
    let mut rows = Vec::with_capacity(cfg.study_n.len());
    for &n in &cfg.study_n {
        let runs = realizations(cfg, problem, solver, eps, n, cfg.study_m)?;
        rows.push(ErrorRow {
            n,
            sigma2: sigma2(&runs, &reference),
        });
        log::info!("{} eps = {eps} N = {n}: {:?}", solver.name(), rows.last().map(|r| r.sigma2));
    }
    let ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    let slopes = [0, 1, 2].map(|k| sigma_slope(&ns, &rows.iter().map(|r| r.sigma2[k]).collect::<Vec<_>>()));
    let slope = sigma_slope(&ns, &rows.iter().map(ErrorRow::total).collect::<Vec<_>>());
    Ok(ErrorSeries {
        solver,
        eps,
        rows,
        slopes,
        slope,
    })
}

/// Run the study for every stochastic solver and `eps` of `cfg`.
pub fn stochastic_error_study(cfg: &SimConfig) -> Result<ErrorTable> {
    let cfg = cfg.clone().resolved()?;
    if cfg.test_case != TestCase::Accuracy {
        return Err(Error::Config("the error study runs on the accuracy test".into()));
    }
    if cfg.study_m < 10 {
        log::warn!("only {} realizations per point; slopes will be noisy", cfg.study_m);
    }
    let problem = Problem::from_config(&cfg)?;
    let mut table = ErrorTable::default();
    for &eps in &cfg.eps {
        for &solver in cfg.solver.iter().filter(|s| s.is_stochastic()) {
            table.series.push(error_series(&cfg, &problem, solver, eps)?);
        }
    }
    Ok(table)
}
