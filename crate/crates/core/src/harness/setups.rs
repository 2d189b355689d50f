//! Initial data of the test problems on the unit domain.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid1D};
use crate::harness::config::{SimConfig, StateTriple, TestCase};
use crate::particles::Reservoir;
use crate::state::{Conserved, MacroField, Primitive};

/// Sinusoidal perturbation of `(rho, u, W)` around `(1, 1.5, 2.5)`.
pub fn setup_accuracy_test(grid: &Grid1D) -> Result<MacroField> {
    if !grid.is_periodic() {
        return Err(Error::Config("the accuracy test needs a periodic grid".into()));
    }
    let cells = grid
        .centers()
        .into_iter()
        .map(|x| {
            let s = (2.0 * PI * (x - grid.x_min()) / grid.length()).sin();
            let rho = 1.0 + 0.3 * s;
            let u = 1.5 + 0.1 * s;
            let w = 2.5 + s;
            Conserved::new(rho, rho * u, w).to_primitive()
        })
        .collect::<Result<Vec<_>>>()?;
    MacroField::new(cells)
}

fn primitive(s: StateTriple) -> Result<Primitive> {
    Primitive::new(s[0], s[1], s[2])
}

/// Two constant states separated at `x0`.
pub fn setup_riemann(grid: &Grid1D, left: StateTriple, right: StateTriple, x0: f64) -> Result<MacroField> {
    if grid.is_periodic() {
        return Err(Error::Config("Riemann problems need an outflow grid".into()));
    }
    let (l, r) = (primitive(left)?, primitive(right)?);
    let cells = grid.centers().into_iter().map(|x| if x < x0 { l } else { r }).collect();
    MacroField::new(cells)
}

/// Grid, initial field and, for outflow problems, the boundary reservoir
/// described by a resolved configuration.
pub fn build(cfg: &SimConfig) -> Result<(Grid1D, MacroField, Option<Reservoir>)> {
    if cfg.test_case == TestCase::Accuracy {
        let grid = Grid1D::unit(cfg.n_cells, Boundary::Periodic)?;
        let field = setup_accuracy_test(&grid)?;
        return Ok((grid, field, None));
    }
    let (Some(left), Some(right)) = (cfg.left, cfg.right) else {
        return Err(Error::Config("Riemann states are not resolved".into()));
    };
    let grid = Grid1D::unit(cfg.n_cells, Boundary::Outflow)?;
    let field = setup_riemann(&grid, left, right, cfg.x0.unwrap_or(0.5))?;
    let reservoir = Reservoir {
        left: primitive(left)?,
        right: primitive(right)?,
    };
    Ok((grid, field, Some(reservoir)))
}
