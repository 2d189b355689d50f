//! Experiments: configuration, the solver loops, the statistical-error
//! study and the output files.

pub mod config;
pub mod output;
pub mod setups;
pub mod solvers;
pub mod study;

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::Grid1D;
use crate::particles::Reservoir;
use crate::reference::euler_run;
use crate::rng::derive_seed;
use crate::state::{Conserved, MacroField};

pub use config::{SimConfig, Solver, TestCase};
pub use solvers::{CollisionSource, KineticState, MgOptions, MgState};
pub use study::{stochastic_error_study, ErrorRow, ErrorSeries, ErrorTable};

/// Grid, initial data and boundary reservoir of a resolved configuration.
#[derive(Clone, Debug)]
pub struct Problem {
    pub grid: Grid1D,
    pub initial: MacroField,
    pub reservoir: Option<Reservoir>,
}

impl Problem {
    pub fn from_config(cfg: &SimConfig) -> Result<Self> {
        let (grid, initial, reservoir) = setups::build(cfg)?;
        Ok(Self {
            grid,
            initial,
            reservoir,
        })
    }
}

/// Final-time profile of one solver at one `eps`, kept in conserved form
/// so that sparsely populated particle cells survive averaging.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub solver: Solver,
    pub eps: f64,
    pub t: f64,
    pub x: Vec<f64>,
    pub cells: Vec<Conserved>,
}

impl Profile {
    /// `(rho, u, T)` per cell.
    pub fn observables(&self) -> Vec<[f64; 3]> {
        self.cells.iter().map(Conserved::observables).collect()
    }
}

/// One run of `solver` on `problem` up to the configured final time.
pub fn simulate(cfg: &SimConfig, problem: &Problem, solver: Solver, eps: f64, n_per_cell: usize, seed: u64) -> Result<Vec<Conserved>> {
    let t_final = cfg.t_final.unwrap_or(0.0);
    let Problem {
        grid,
        initial,
        reservoir,
    } = problem;
    match solver {
        Solver::Mc => {
            let mut s = KineticState::new(grid, initial, n_per_cell, eps, *reservoir, seed)?;
            Ok(solvers::run_mc(&mut s, cfg.cfl, t_final))
        }
        Solver::Mg => {
            let mut s = MgState::new(grid, initial, n_per_cell, eps, *reservoir, seed, cfg.scheme(), cfg.mg_options())?;
            Ok(solvers::run_mg(&mut s, t_final)?.conserved())
        }
        Solver::Euler => Ok(euler_run(initial, &cfg.scheme(), grid, t_final)?.conserved()),
        Solver::Dvm => Ok(solvers::run_dvm(grid, initial, reservoir.as_ref(), cfg.n_velocities, eps, cfg.cfl, t_final)?.conserved()),
    }
}

/// Seed of realization `r` of a stochastic run.
pub fn realization_seed(base: u64, solver: Solver, eps: f64, n_per_cell: usize, r: usize) -> u64 {
    derive_seed(&[base, solver as u64, eps.to_bits(), n_per_cell as u64, r as u64])
}

/// Every `(eps, solver)` pair of the configuration; stochastic solvers are
/// averaged over `n_realizations` independent runs.
pub fn run(cfg: &SimConfig) -> Result<Vec<Profile>> {
    let cfg = cfg.clone().resolved()?;
    let problem = Problem::from_config(&cfg)?;
    let mut out = Vec::new();
    for &eps in &cfg.eps {
        for &solver in &cfg.solver {
            log::info!("running {} at eps = {eps}", solver.name());
            let cells = if solver.is_stochastic() {
                let fields = (0..cfg.n_realizations)
                    .into_par_iter()
                    .map(|r| {
                        let seed = realization_seed(cfg.seed, solver, eps, cfg.n_per_cell, r);
                        simulate(&cfg, &problem, solver, eps, cfg.n_per_cell, seed)
                    })
                    .collect::<Result<Vec<_>>>()?;
                solvers::average_conserved(&fields)
            } else {
                simulate(&cfg, &problem, solver, eps, cfg.n_per_cell, cfg.seed)?
            };
            out.push(Profile {
                solver,
                eps,
                t: cfg.t_final.unwrap_or(0.0),
                x: problem.grid.centers(),
                cells,
            });
        }
    }
    Ok(out)
}
