//! Compressible Euler solver: the moment equations with the kinetic
//! correction switched off.

use crate::error::Result;
use crate::fluid::{moment_step, KineticFluxField, SchemeConfig};
use crate::grid::Grid1D;
use crate::state::MacroField;

/// One step of size `dt`; a non-physical result is retried once with
/// `dt / 2`. Returns the new field and the step actually taken.
pub fn euler_step(field: &MacroField, cfg: &SchemeConfig, dt: f64, grid: &Grid1D) -> Result<(MacroField, f64)> {
    let zero = KineticFluxField::zeros(field.len());
    match moment_step(field, &zero, cfg, dt, grid) {
        Ok(next) => Ok((next, dt)),
        Err(e) => {
            log::warn!("{e}; retrying with half the time step");
            moment_step(field, &zero, cfg, 0.5 * dt, grid).map(|next| (next, 0.5 * dt))
        }
    }
}

/// Advance `field` to `t_final`, the last step shortened to land on it.
pub fn euler_run(field: &MacroField, cfg: &SchemeConfig, grid: &Grid1D, t_final: f64) -> Result<MacroField> {
    let mut field = field.clone();
    let mut t = 0.0;
    while t < t_final {
        let dt = cfg.stable_dt(&field, grid).min(t_final - t);
        let (next, taken) = euler_step(&field, cfg, dt, grid)?;
        field = next;
        t += taken;
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluid::Order;
    use crate::grid::Boundary;
    use crate::state::Primitive;

    #[test]
    fn sod_stays_physical_and_bounded() {
        let grid = Grid1D::unit(100, Boundary::Outflow).unwrap();
        let cells = (0..100)
            .map(|i| {
                if grid.cell_center(i) < 0.5 {
                    Primitive::new(1.0, 0.0, 1.0).unwrap()
                } else {
                    Primitive::new(0.125, 0.0, 0.8).unwrap()
                }
            })
            .collect();
        let field = MacroField::new(cells).unwrap();
        for order in [Order::First, Order::Second] {
            let out = euler_run(&field, &SchemeConfig::with_order(order), &grid, 0.05).unwrap();
            for p in out.cells() {
                assert!(p.rho > 0.1 && p.rho < 1.0 + 1e-9);
            }
            assert_eq!(out.get(0).rho, 1.0);
            assert!((out.get(99).rho - 0.125).abs() < 1e-12);
        }
    }
}
