//! Uniform one-dimensional finite-volume grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    /// Zero-gradient ghost cells for the deterministic solvers; particles
    /// leave freely and are injected from reservoirs at the frozen boundary
    /// states.
    Outflow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
    dx: f64,
    boundary: Boundary,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize, boundary: Boundary) -> Result<Self> {
        if n_cells < 3 {
            return Err(Error::Config(format!("need at least 3 cells, got {n_cells}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Config(format!("empty domain [{x_min}, {x_max}]")));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            dx: (x_max - x_min) / n_cells as f64,
            boundary,
        })
    }

    /// `[0, 1]` split into `n_cells` cells.
    pub fn unit(n_cells: usize, boundary: Boundary) -> Result<Self> {
        Self::new(0.0, 1.0, n_cells, boundary)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn cell_left(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// Position of the face between cells `i` and `i + 1`.
    pub fn face(&self, i: usize) -> f64 {
        self.x_min + (i + 1) as f64 * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.cell_center(i)).collect()
    }

    /// Cell containing `x`; positions on or past the right edge fall into
    /// the last cell.
    pub fn cell_of(&self, x: f64) -> usize {
        let k = ((x - self.x_min) / self.dx).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.n_cells - 1)
        }
    }

    /// Index of the cell at signed offset `i`, resolving ghost cells by
    /// wrapping (periodic) or clamping to the edge (outflow).
    pub fn resolve(&self, i: isize) -> usize {
        let n = self.n_cells as isize;
        match self.boundary {
            Boundary::Periodic => i.rem_euclid(n) as usize,
            Boundary::Outflow => i.clamp(0, n - 1) as usize,
        }
    }

    /// Restriction onto a grid twice as coarse (pairwise cell averages).
    pub fn coarsen(&self) -> Result<Self> {
        if !self.n_cells.is_multiple_of(2) {
            return Err(Error::Config("cannot coarsen an odd number of cells".into()));
        }
        Self::new(self.x_min, self.x_max, self.n_cells / 2, self.boundary)
    }
}
