//! Time loops of the four solvers.

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fluid::{moment_step, noneq_energy_flux, third_moment_step, KineticFluxField, SchemeConfig};
use crate::grid::Grid1D;
use crate::matching::{match_cell, MatchOutcome};
use crate::particles::{CellMoments, ParticleEnsemble, Reservoir};
use crate::reference::{DvmState, VelocityGrid};
use crate::rng::{Purpose, Streams};
use crate::state::{Conserved, MacroField};

/// Plain DSMC: free transport followed by BGK relaxation toward the
/// moments of the particles in each cell.
#[derive(Clone, Debug)]
pub struct KineticState {
    grid: Grid1D,
    ensemble: ParticleEnsemble,
    reservoir: Option<Reservoir>,
    streams: Streams,
    eps: f64,
    steps: u64,
}

impl KineticState {
    pub fn new(grid: &Grid1D, field: &MacroField, n_per_cell: usize, eps: f64, reservoir: Option<Reservoir>, seed: u64) -> Result<Self> {
        let streams = Streams::new(seed);
        let ensemble = ParticleEnsemble::init_from_field(grid, field, n_per_cell, &streams)?;
        Ok(Self {
            grid: *grid,
            ensemble,
            reservoir,
            streams,
            eps,
            steps: 0,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn ensemble(&self) -> &ParticleEnsemble {
        &self.ensemble
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn moments(&self) -> CellMoments {
        self.ensemble.cell_moments(&self.grid)
    }

    pub fn field(&self) -> Result<MacroField> {
        self.moments().to_field()
    }

    /// Cell mass, momentum and energy; defined even for empty cells.
    pub fn conserved(&self) -> Vec<Conserved> {
        let m = self.moments();
        (0..m.len()).map(|i| Conserved::new(m.mass[i], m.momentum[i], m.energy[i])).collect()
    }

    /// `cfl * dx / max(|u| + sqrt(3 T))` over the non-degenerate cells.
    pub fn stable_dt(&self, cfl: f64) -> f64 {
        let m = self.moments();
        let alpha = (0..m.len())
            .filter_map(|i| m.primitive(i).ok())
            .map(|p| p.max_wavespeed())
            .fold(0.0, f64::max);
        cfl * self.grid.dx() / alpha
    }

    /// Transport, boundary injection and relaxation. Returns the collision
    /// source of the third moment.
    fn advance(&mut self, dt: f64) -> Vec<f64> {
        self.steps += 1;
        self.ensemble.transport(dt, &self.grid);
        if let Some(res) = &self.reservoir {
            self.ensemble.inject(res, dt, &self.grid, &self.streams, self.steps);
        }
        let targets = self.ensemble.cell_moments(&self.grid).targets();
        self.ensemble.bgk_relax(&targets, dt, self.eps, &self.grid, &self.streams, self.steps)
    }

    pub fn step(&mut self, dt: f64) {
        self.advance(dt);
    }

    /// Match every cell to `target`, drawing from the stream of `step`.
    fn match_to(&mut self, target: &MacroField, step: u64) -> Vec<MatchOutcome> {
        let grid = &self.grid;
        let mp = self.ensemble.particle_mass();
        let empty = ParticleEnsemble::from_particles(grid, Vec::new(), Vec::new(), mp);
        let (mut cells, mp) = std::mem::replace(&mut self.ensemble, empty).into_cells();
        let streams = self.streams;
        let outcomes: Vec<MatchOutcome> = cells
            .par_iter_mut()
            .enumerate()
            .map(|(i, cell)| {
                let mut rng = streams.rng(step, i, Purpose::Match);
                match_cell(cell, &target[i], mp, grid.cell_left(i), grid.dx(), &mut rng)
            })
            .collect();
        self.ensemble = ParticleEnsemble::from_cells(grid, cells, mp);
        outcomes
    }
}

/// Collision term of the evolved third moment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollisionSource {
    /// `(1 - e^{-dt/eps}) (<v^3 M[U^n]> - q) / dt`, the mean of the
    /// measured variation.
    #[default]
    Expected,
    /// Change of the particle `<v^3>` during relaxation.
    Measured,
}

/// Switches of the coupling, used to check that the method degenerates to
/// its ingredients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MgOptions {
    pub matching: bool,
    /// When false the moment equations see `g = 0` and reduce to Euler.
    pub kinetic_flux: bool,
    pub source: CollisionSource,
}

impl Default for MgOptions {
    fn default() -> Self {
        Self {
            matching: true,
            kinetic_flux: true,
            source: CollisionSource::Expected,
        }
    }
}

/// Moment guided Monte Carlo state: particles, the deterministic moments
/// and the evolved third moment.
#[derive(Clone, Debug)]
pub struct MgState {
    kinetic: KineticState,
    field: MacroField,
    third: Vec<f64>,
    scheme: SchemeConfig,
    options: MgOptions,
}

impl MgState {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: &Grid1D,
        field: &MacroField,
        n_per_cell: usize,
        eps: f64,
        reservoir: Option<Reservoir>,
        seed: u64,
        scheme: SchemeConfig,
        options: MgOptions,
    ) -> Result<Self> {
        let mut kinetic = KineticState::new(grid, field, n_per_cell, eps, reservoir, seed)?;
        if options.matching {
            kinetic.match_to(field, 0);
        }
        Ok(Self {
            kinetic,
            field: field.clone(),
            third: field.cells().iter().map(|p| p.third_moment()).collect(),
            scheme,
            options,
        })
    }

    pub fn field(&self) -> &MacroField {
        &self.field
    }

    pub fn third(&self) -> &[f64] {
        &self.third
    }

    pub fn kinetic(&self) -> &KineticState {
        &self.kinetic
    }

    pub fn stable_dt(&self) -> f64 {
        self.scheme.stable_dt(&self.field, &self.kinetic.grid)
    }

    /// One step of size `dt` (halved once if the moment update turns
    /// non-physical). Returns the step actually taken.
    pub fn step(&mut self, dt: f64) -> Result<f64> {
        let grid = self.kinetic.grid;
        let moments = self.kinetic.moments();
        let mut kin = noneq_energy_flux(&moments, &self.field, &self.third);
        if !self.options.kinetic_flux {
            kin.g = KineticFluxField::zeros(grid.n_cells()).g;
        }
        let (next, dt) = match moment_step(&self.field, &kin, &self.scheme, dt, &grid) {
            Ok(next) => (next, dt),
            Err(e) => {
                warn!("{e}; retrying with half the time step");
                (moment_step(&self.field, &kin, &self.scheme, 0.5 * dt, &grid)?, 0.5 * dt)
            }
        };
        let alpha = self.field.max_wavespeed();
        let measured = self.kinetic.advance(dt);
        let source = match self.options.source {
            CollisionSource::Measured => measured,
            CollisionSource::Expected => {
                let decay = -(-dt / self.kinetic.eps).exp_m1();
                self.field
                    .cells()
                    .iter()
                    .zip(&self.third)
                    .map(|(p, q)| decay * (p.third_moment() - q) / dt)
                    .collect()
            }
        };
        self.third = third_moment_step(&self.third, &kin.fourth, &source, dt, &grid, alpha);
        self.field = next;
        if self.options.matching {
            let step = self.kinetic.steps;
            let outcomes = self.kinetic.match_to(&self.field, step);
            let skipped = outcomes.iter().filter(|o| o.skipped).count();
            if skipped > 0 {
                debug!("step {step}: velocity matching skipped in {skipped} cells");
            }
        }
        Ok(dt)
    }
}

fn unfinished(t: f64, t_final: f64) -> bool {
    t_final - t > 1e-12 * t_final.max(1.0)
}

pub fn run_mc(state: &mut KineticState, cfl: f64, t_final: f64) -> Vec<Conserved> {
    let mut t = 0.0;
    while unfinished(t, t_final) {
        let dt = state.stable_dt(cfl).min(t_final - t);
        state.step(dt);
        t += dt;
    }
    state.conserved()
}

pub fn run_mg(state: &mut MgState, t_final: f64) -> Result<MacroField> {
    let mut t = 0.0;
    while unfinished(t, t_final) {
        let dt = state.stable_dt().min(t_final - t);
        t += state.step(dt)?;
    }
    Ok(state.field().clone())
}

/// Discrete-velocity run; the velocity grid covers the initial data and the
/// boundary states.
pub fn run_dvm(
    grid: &Grid1D,
    field: &MacroField,
    reservoir: Option<&Reservoir>,
    n_velocities: usize,
    eps: f64,
    cfl: f64,
    t_final: f64,
) -> Result<MacroField> {
    let extra: Vec<_> = reservoir.map(|r| vec![r.left, r.right]).unwrap_or_default();
    let vgrid = VelocityGrid::covering(field.cells().iter().chain(&extra), n_velocities);
    let mut state = DvmState::from_field(grid, field, vgrid);
    let dt_max = state.stable_dt(cfl);
    let mut t = 0.0;
    while unfinished(t, t_final) {
        let dt = dt_max.min(t_final - t);
        state.step(dt, eps)?;
        t += dt;
    }
    state.moments()
}

/// Realization average of conserved variables.
pub fn average_conserved(runs: &[Vec<Conserved>]) -> Vec<Conserved> {
    let mut sum = vec![Conserved::ZERO; runs[0].len()];
    for run in runs {
        for (s, c) in sum.iter_mut().zip(run) {
            *s += *c;
        }
    }
    let scale = 1.0 / runs.len() as f64;
    sum.into_iter().map(|c| c * scale).collect()
}
