//! DSMC representation of the distribution function.
//!
//! `f = sum_j M_p delta(x - x_j) delta(v - v_j)` with a single particle mass
//! fixed for the whole run. Particles are kept sorted by cell so every
//! per-cell operation works on contiguous slices.

use std::ops::Range;

use log::debug;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::matching::iround;
use crate::rng::{Purpose, Streams};
use crate::state::{Conserved, MacroField, Primitive};

/// Draw one velocity from the Maxwellian with moments `p`.
pub fn sample_maxwellian<R: Rng + ?Sized>(p: &Primitive, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    p.u + p.temp.sqrt() * z
}

/// Particles of one cell, detached from the ensemble.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellParticles {
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl CellParticles {
    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }
}

/// Frozen boundary states feeding particles through outflow boundaries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reservoir {
    pub left: Primitive,
    pub right: Primitive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParticleEnsemble {
    positions: Vec<f64>,
    velocities: Vec<f64>,
    particle_mass: f64,
    /// `offsets[i]..offsets[i + 1]` are the particles of cell `i`.
    offsets: Vec<usize>,
}

impl ParticleEnsemble {
    /// Build from arbitrary particle arrays; particles are sorted by cell.
    pub fn from_particles(grid: &Grid1D, positions: Vec<f64>, velocities: Vec<f64>, particle_mass: f64) -> Self {
        assert_eq!(positions.len(), velocities.len());
        assert!(particle_mass > 0.0, "particle mass must be positive");
        let mut ens = Self {
            positions,
            velocities,
            particle_mass,
            offsets: vec![0; grid.n_cells() + 1],
        };
        ens.rebuild(grid);
        ens
    }

    /// Build from per-cell particle lists, in cell order.
    pub fn from_cells(grid: &Grid1D, cells: Vec<CellParticles>, particle_mass: f64) -> Self {
        assert_eq!(cells.len(), grid.n_cells());
        let total = cells.iter().map(CellParticles::len).sum();
        let mut positions = Vec::with_capacity(total);
        let mut velocities = Vec::with_capacity(total);
        let mut offsets = Vec::with_capacity(cells.len() + 1);
        offsets.push(0);
        for c in cells {
            positions.extend_from_slice(&c.positions);
            velocities.extend_from_slice(&c.velocities);
            offsets.push(positions.len());
        }
        Self {
            positions,
            velocities,
            particle_mass,
            offsets,
        }
    }

    /// Sample local Maxwellians cell by cell.
    ///
    /// The particle mass is `sum_i rho_i dx / (n_per_cell * n_cells)` and
    /// cell `i` receives `Iround(rho_i dx / M_p)` particles, so a uniform
    /// field gets exactly `n_per_cell` particles per cell.
    pub fn init_from_field(grid: &Grid1D, field: &MacroField, n_per_cell: usize, streams: &Streams) -> Result<Self> {
        if n_per_cell < 2 {
            return Err(Error::Config("at least 2 particles per cell are required".into()));
        }
        if field.len() != grid.n_cells() {
            return Err(Error::Config("field and grid sizes differ".into()));
        }
        let dx = grid.dx();
        let total_mass: f64 = field.cells().iter().map(|p| p.rho * dx).sum();
        let mp = total_mass / (n_per_cell * grid.n_cells()) as f64;
        let cells = (0..grid.n_cells())
            .map(|i| {
                let p = field[i];
                let mut rng = streams.rng(0, i, Purpose::Init);
                let expected = p.rho * dx / mp;
                // snap values that are integers up to rounding noise
                let count = if (expected - expected.round()).abs() < 1e-9 {
                    expected.round() as usize
                } else {
                    iround(expected, &mut rng)
                };
                let left = grid.cell_left(i);
                let mut c = CellParticles::default();
                for _ in 0..count {
                    let x = left + dx * rng.random::<f64>();
                    c.positions.push(x.min(left + dx * (1.0 - f64::EPSILON)));
                    c.velocities.push(sample_maxwellian(&p, &mut rng));
                }
                c
            })
            .collect();
        Ok(Self::from_cells(grid, cells, mp))
    }

    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }

    pub fn particle_mass(&self) -> f64 {
        self.particle_mass
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn n_cells(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn cell_range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn cell_count(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn cell_velocities(&self, i: usize) -> &[f64] {
        &self.velocities[self.cell_range(i)]
    }

    pub fn cell_positions(&self, i: usize) -> &[f64] {
        &self.positions[self.cell_range(i)]
    }

    pub fn cell(&self, i: usize) -> CellParticles {
        CellParticles {
            positions: self.cell_positions(i).to_vec(),
            velocities: self.cell_velocities(i).to_vec(),
        }
    }

    pub fn into_cells(self) -> (Vec<CellParticles>, f64) {
        let cells = (0..self.n_cells()).map(|i| self.cell(i)).collect();
        (cells, self.particle_mass)
    }

    /// Stable counting sort of the particles by cell.
    fn rebuild(&mut self, grid: &Grid1D) {
        let n = grid.n_cells();
        let idx: Vec<usize> = self.positions.iter().map(|&x| grid.cell_of(x)).collect();
        let mut offsets = vec![0usize; n + 1];
        for &k in &idx {
            offsets[k + 1] += 1;
        }
        for k in 0..n {
            offsets[k + 1] += offsets[k];
        }
        let mut next = offsets.clone();
        let mut pos = vec![0.0; self.len()];
        let mut vel = vec![0.0; self.len()];
        for (j, &k) in idx.iter().enumerate() {
            pos[next[k]] = self.positions[j];
            vel[next[k]] = self.velocities[j];
            next[k] += 1;
        }
        self.positions = pos;
        self.velocities = vel;
        self.offsets = offsets;
    }

    /// Free flight `x <- x + v dt`, then periodic wrap or removal of the
    /// particles that left through an outflow boundary.
    pub fn transport(&mut self, dt: f64, grid: &Grid1D) {
        let (x0, x1, len) = (grid.x_min(), grid.x_max(), grid.length());
        if grid.is_periodic() {
            for (x, v) in self.positions.iter_mut().zip(&self.velocities) {
                let mut y = *x + v * dt;
                if y < x0 || y >= x1 {
                    y = x0 + (y - x0).rem_euclid(len);
                    if y >= x1 {
                        y = x0;
                    }
                }
                *x = y;
            }
        } else {
            let mut j = 0;
            for k in 0..self.len() {
                let y = self.positions[k] + self.velocities[k] * dt;
                if (x0..x1).contains(&y) {
                    self.positions[j] = y;
                    self.velocities[j] = self.velocities[k];
                    j += 1;
                }
            }
            self.positions.truncate(j);
            self.velocities.truncate(j);
        }
        self.rebuild(grid);
    }

    /// Inject particles from ghost layers filled with the reservoir
    /// Maxwellians; only particles whose free flight over `dt` ends inside
    /// the domain are kept.
    pub fn inject(&mut self, reservoir: &Reservoir, dt: f64, grid: &Grid1D, streams: &Streams, step: u64) {
        let sides = [
            (reservoir.left, Purpose::InjectLeft, -1.0),
            (reservoir.right, Purpose::InjectRight, 1.0),
        ];
        for (state, purpose, side) in sides {
            let mut rng = streams.rng(step, 0, purpose);
            let width = (state.u.abs() + 6.0 * state.temp.sqrt()) * dt;
            let count = iround(state.rho * width / self.particle_mass, &mut rng);
            let edge = if side < 0.0 { grid.x_min() } else { grid.x_max() };
            for _ in 0..count {
                let x = edge + side * width * rng.random::<f64>();
                let v = sample_maxwellian(&state, &mut rng);
                let y = x + v * dt;
                if y >= grid.x_min() && y < grid.x_max() {
                    self.positions.push(y);
                    self.velocities.push(v);
                }
            }
        }
        self.rebuild(grid);
    }

    /// BGK relaxation by particle replacement.
    ///
    /// Each particle keeps its velocity with probability `exp(-dt/eps)` and
    /// is otherwise redrawn from the Maxwellian `targets[i]` of its cell.
    /// Cells without a target are left untouched. Returns the collision
    /// source of the third moment, `(<v^3 f>_after - <v^3 f>_before) / dt`
    /// per unit volume.
    pub fn bgk_relax(
        &mut self,
        targets: &[Option<Primitive>],
        dt: f64,
        eps: f64,
        grid: &Grid1D,
        streams: &Streams,
        step: u64,
    ) -> Vec<f64> {
        assert_eq!(targets.len(), self.n_cells());
        let keep = (-dt / eps).exp();
        let scale = self.particle_mass / (grid.dx() * dt);
        let mut source = vec![0.0; self.n_cells()];
        for (i, target) in targets.iter().enumerate() {
            let Some(target) = target else { continue };
            let mut rng = streams.rng(step, i, Purpose::Relax);
            let range = self.cell_range(i);
            let mut delta = 0.0;
            for v in &mut self.velocities[range] {
                if rng.random::<f64>() >= keep {
                    let old = *v;
                    *v = sample_maxwellian(target, &mut rng);
                    delta += v.powi(3) - old.powi(3);
                }
            }
            source[i] = delta * scale;
        }
        source
    }

    /// Per-cell raw moments of the particle measure.
    pub fn cell_moments(&self, grid: &Grid1D) -> CellMoments {
        let n = self.n_cells();
        let w = self.particle_mass / grid.dx();
        let mut m = CellMoments {
            count: vec![0; n],
            mass: vec![0.0; n],
            momentum: vec![0.0; n],
            energy: vec![0.0; n],
            third: vec![0.0; n],
            fourth: vec![0.0; n],
            mean_velocity: vec![0.0; n],
            temperature: vec![0.0; n],
        };
        for i in 0..n {
            let vs = self.cell_velocities(i);
            let count = vs.len();
            m.count[i] = count;
            if count == 0 {
                continue;
            }
            let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
            for &v in vs {
                let v2 = v * v;
                s1 += v;
                s2 += v2;
                s3 += v2 * v;
                s4 += v2 * v2;
            }
            m.mass[i] = w * count as f64;
            m.momentum[i] = w * s1;
            m.energy[i] = 0.5 * w * s2;
            m.third[i] = w * s3;
            m.fourth[i] = w * s4;
            // centered second pass for the derived state
            let mean = s1 / count as f64;
            let var = vs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
            m.mean_velocity[i] = mean;
            m.temperature[i] = var;
        }
        m
    }

    /// Nearest-grid-point estimate of `<v m f>` at each interior face with
    /// the kernel `B(x) = 1/h` on `|x| <= h/2`.
    ///
    /// Face `k` lies between cells `k` and `k + 1`; periodic grids have `n`
    /// faces (the last one wraps), outflow grids `n - 1`. An empty window
    /// falls back to the mean of the two adjacent cell-centred estimates.
    pub fn face_moments(&self, grid: &Grid1D, h: f64) -> Vec<Conserved> {
        assert!(h >= grid.dx() * (1.0 - 1e-12), "kernel support must cover a cell");
        let n = grid.n_cells();
        let n_faces = if grid.is_periodic() { n } else { n - 1 };
        let half = 0.5 * h;
        let reach = (half / grid.dx()).ceil() as isize + 1;
        let mp = self.particle_mass;
        let flux_of = |v: f64| Conserved::new(v, v * v, 0.5 * v * v * v);

        let centred: Vec<Conserved> = (0..n)
            .map(|i| {
                let mut s = Conserved::ZERO;
                for &v in self.cell_velocities(i) {
                    s += flux_of(v);
                }
                s * (mp / grid.dx())
            })
            .collect();

        (0..n_faces)
            .map(|k| {
                let xf = grid.face(k);
                let mut cells: Vec<usize> = (k as isize + 1 - reach..=k as isize + reach)
                    .filter_map(|c| {
                        if grid.is_periodic() {
                            Some(c.rem_euclid(n as isize) as usize)
                        } else if (0..n as isize).contains(&c) {
                            Some(c as usize)
                        } else {
                            None
                        }
                    })
                    .collect();
                cells.sort_unstable();
                cells.dedup();
                let mut s = Conserved::ZERO;
                let mut hits = 0usize;
                for c in cells {
                    for (x, &v) in self.cell_positions(c).iter().zip(self.cell_velocities(c)) {
                        let mut d = x - xf;
                        if grid.is_periodic() {
                            d -= grid.length() * (d / grid.length()).round();
                        }
                        if d.abs() <= half {
                            s += flux_of(v);
                            hits += 1;
                        }
                    }
                }
                if hits == 0 {
                    debug!("empty kernel window at face {k}; using cell-centred fallback");
                    (centred[k] + centred[(k + 1) % n]) * 0.5
                } else {
                    s * (mp / h)
                }
            })
            .collect()
    }
}

/// Raw moments `<v^n f>` per cell, per unit volume, together with the
/// centred velocity statistics used to derive `(rho, u, T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellMoments {
    pub count: Vec<usize>,
    /// `<f>`
    pub mass: Vec<f64>,
    /// `<v f>`
    pub momentum: Vec<f64>,
    /// `<v^2/2 f>`
    pub energy: Vec<f64>,
    /// `<v^3 f>`
    pub third: Vec<f64>,
    /// `<v^4 f>`
    pub fourth: Vec<f64>,
    pub mean_velocity: Vec<f64>,
    /// Velocity variance of the cell's particles.
    pub temperature: Vec<f64>,
}

impl CellMoments {
    pub fn len(&self) -> usize {
        self.count.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count.is_empty()
    }

    pub fn primitive(&self, i: usize) -> Result<Primitive> {
        let t = self.temperature[i];
        if self.count[i] < 2 || !(t > 0.0) {
            return Err(Error::DegenerateCell {
                cell: i,
                count: self.count[i],
            });
        }
        Ok(Primitive::new_unchecked(self.mass[i], self.mean_velocity[i], t))
    }

    /// Relaxation targets; degenerate cells map to `None`.
    pub fn targets(&self) -> Vec<Option<Primitive>> {
        (0..self.len()).map(|i| self.primitive(i).ok()).collect()
    }

    pub fn to_field(&self) -> Result<MacroField> {
        let cells = (0..self.len()).map(|i| self.primitive(i)).collect::<Result<Vec<_>>>()?;
        MacroField::new(cells)
    }
}
