//! Discrete velocity BGK solver.
//!
//! Upwind transport on a uniform velocity grid followed by the exact
//! relaxation `f <- e^{-dt/eps} f + (1 - e^{-dt/eps}) M`. The local
//! equilibrium is a discrete Maxwellian whose parameters are adjusted so that
//! its quadrature moments equal those of `f`, which makes the collision step
//! conservative to solver tolerance.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::state::{Conserved, MacroField, Primitive};

/// Uniform midpoint velocity grid on `[v_min, v_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityGrid {
    nodes: Vec<f64>,
    dv: f64,
}

impl VelocityGrid {
    pub fn uniform(v_min: f64, v_max: f64, n: usize) -> Self {
        assert!(n >= 3 && v_max > v_min);
        let dv = (v_max - v_min) / n as f64;
        let nodes = (0..n).map(|j| v_min + (j as f64 + 0.5) * dv).collect();
        Self { nodes, dv }
    }

    /// Symmetric grid covering `|u| + 6 sqrt(T)` for every cell of the
    /// given fields.
    pub fn covering<'a>(fields: impl IntoIterator<Item = &'a Primitive>, n: usize) -> Self {
        let bound = fields
            .into_iter()
            .map(|p| p.u.abs() + 6.0 * p.temp.sqrt())
            .fold(0.0, f64::max);
        Self::uniform(-bound, bound, n)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn dv(&self) -> f64 {
        self.dv
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn v_max(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Quadrature `sum_j v_j^k f_j dv`.
    pub fn moment(&self, f: &[f64], k: i32) -> f64 {
        self.nodes.iter().zip(f).map(|(v, f)| v.powi(k) * f).sum::<f64>() * self.dv
    }

    fn conserved(&self, f: &[f64]) -> Conserved {
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (v, f) in self.nodes.iter().zip(f) {
            m0 += f;
            m1 += v * f;
            m2 += v * v * f;
        }
        Conserved::new(m0 * self.dv, m1 * self.dv, 0.5 * m2 * self.dv)
    }
}

fn gaussian(rho: f64, u: f64, t: f64, v: f64) -> f64 {
    rho / (2.0 * std::f64::consts::PI * t).sqrt() * (-(v - u) * (v - u) / (2.0 * t)).exp()
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut x = [0.0; 3];
    for (c, xc) in x.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][c] = b[r];
        }
        *xc = det(m) / d;
    }
    Some(x)
}

/// Discrete Maxwellian on `vgrid` whose quadrature density, momentum and
/// energy equal those of `target`.
///
/// Newton iteration on `(rho, u, T)` starting from the target itself; if it
/// fails to converge the plain samples of the continuous Maxwellian are
/// returned.
pub fn discrete_maxwellian(target: &Primitive, vgrid: &VelocityGrid) -> Vec<f64> {
    let want = target.to_conserved();
    let want = [want.rho, want.mom, 2.0 * want.energy];
    let scale = target.rho * (1.0 + target.u * target.u + target.temp);
    let (mut rho, mut u, mut t) = (target.rho, target.u, target.temp);
    let eval = |rho: f64, u: f64, t: f64| -> Vec<f64> { vgrid.nodes.iter().map(|&v| gaussian(rho, u, t, v)).collect() };
    for _ in 0..50 {
        let m = eval(rho, u, t);
        let mut res = [0.0; 3];
        let mut jac = [[0.0; 3]; 3];
        for (&v, &mj) in vgrid.nodes.iter().zip(&m) {
            let w = mj * vgrid.dv;
            let c = v - u;
            let d = [w / rho, w * c / t, w * (c * c / (2.0 * t * t) - 0.5 / t)];
            let pw = [1.0, v, v * v];
            for r in 0..3 {
                res[r] += pw[r] * w;
                for k in 0..3 {
                    jac[r][k] += pw[r] * d[k];
                }
            }
        }
        let r = [res[0] - want[0], res[1] - want[1], res[2] - want[2]];
        if r.iter().all(|x| x.abs() <= 1e-13 * scale) {
            return m;
        }
        let Some(step) = solve3(jac, r) else { break };
        rho -= step[0];
        u -= step[1];
        t -= step[2];
        if !(rho > 0.0 && t > 0.0) {
            break;
        }
    }
    let m = eval(rho, u, t);
    let got = vgrid.conserved(&m);
    let err = (got.rho - want[0]).abs() + (got.mom - want[1]).abs() + (2.0 * got.energy - want[2]).abs();
    if rho > 0.0 && t > 0.0 && err <= 1e-10 * scale {
        m
    } else {
        log::warn!("discrete Maxwellian did not converge for {target:?}");
        eval(target.rho, target.u, target.temp)
    }
}

/// Distribution function on a space-velocity grid, stored cell-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DvmState {
    grid: Grid1D,
    vgrid: VelocityGrid,
    f: Vec<f64>,
}

impl DvmState {
    /// Discrete local equilibrium of `field` in every cell.
    pub fn from_field(grid: &Grid1D, field: &MacroField, vgrid: VelocityGrid) -> Self {
        assert_eq!(field.len(), grid.n_cells());
        let mut f = Vec::with_capacity(field.len() * vgrid.len());
        for p in field.cells() {
            f.extend(discrete_maxwellian(p, &vgrid));
        }
        Self { grid: *grid, vgrid, f }
    }

    /// Distribution given explicitly, `n_cells * n_v` values cell-major.
    pub fn from_values(grid: &Grid1D, vgrid: VelocityGrid, f: Vec<f64>) -> Self {
        assert_eq!(f.len(), grid.n_cells() * vgrid.len());
        Self { grid: *grid, vgrid, f }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn vgrid(&self) -> &VelocityGrid {
        &self.vgrid
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        let nv = self.vgrid.len();
        &self.f[i * nv..(i + 1) * nv]
    }

    pub fn conserved(&self, i: usize) -> Conserved {
        self.vgrid.conserved(self.cell(i))
    }

    pub fn moment(&self, i: usize, k: i32) -> f64 {
        self.vgrid.moment(self.cell(i), k)
    }

    pub fn moments(&self) -> Result<MacroField> {
        let cells = (0..self.grid.n_cells())
            .map(|i| self.conserved(i).to_primitive().map_err(|e| e.at_cell(i)))
            .collect::<Result<Vec<_>>>()?;
        MacroField::new(cells)
    }

    pub fn stable_dt(&self, cfl: f64) -> f64 {
        cfl * self.grid.dx() / self.vgrid.v_max()
    }

    fn transport(&mut self, dt: f64) {
        let n = self.grid.n_cells();
        let nv = self.vgrid.len();
        let lambda = dt / self.grid.dx();
        let old = self.f.clone();
        for i in 0..n {
            let left = self.grid.resolve(i as isize - 1);
            let right = self.grid.resolve(i as isize + 1);
            for (j, &v) in self.vgrid.nodes.iter().enumerate() {
                let c = old[i * nv + j];
                let diff = if v > 0.0 { c - old[left * nv + j] } else { old[right * nv + j] - c };
                self.f[i * nv + j] = c - lambda * v * diff;
            }
        }
    }

    fn relax(&mut self, dt: f64, eps: f64) -> Result<()> {
        let nv = self.vgrid.len();
        let keep = (-dt / eps).exp();
        for i in 0..self.grid.n_cells() {
            let p = self.conserved(i).to_primitive().map_err(|e| e.at_cell(i))?;
            let m = discrete_maxwellian(&p, &self.vgrid);
            for (f, m) in self.f[i * nv..(i + 1) * nv].iter_mut().zip(m) {
                *f = keep * *f + (1.0 - keep) * m;
            }
        }
        Ok(())
    }

    /// One transport-relaxation step. `dt` must respect [`Self::stable_dt`]
    /// with `cfl <= 1`.
    pub fn step(&mut self, dt: f64, eps: f64) -> Result<()> {
        if dt > self.stable_dt(1.0) * (1.0 + 1e-12) {
            return Err(Error::Config(format!("dvm time step {dt} exceeds the CFL bound")));
        }
        self.transport(dt);
        self.relax(dt, eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;
    use approx::assert_relative_eq;

    #[test]
    fn discrete_maxwellian_matches_moments() {
        let vg = VelocityGrid::uniform(-8.0, 8.0, 24);
        for p in [Primitive::new(1.0, 0.0, 1.0).unwrap(), Primitive::new(0.3, 1.2, 0.4).unwrap()] {
            let m = discrete_maxwellian(&p, &vg);
            let got = vg.conserved(&m);
            let want = p.to_conserved();
            assert_relative_eq!(got.rho, want.rho, max_relative = 1e-12);
            assert_relative_eq!(got.mom, want.mom, epsilon = 1e-12);
            assert_relative_eq!(got.energy, want.energy, max_relative = 1e-12);
        }
    }

    #[test]
    fn relaxation_conserves_and_contracts() {
        let grid = Grid1D::unit(4, Boundary::Periodic).unwrap();
        let vg = VelocityGrid::uniform(-6.0, 6.0, 48);
        let f: Vec<f64> = (0..4)
            .flat_map(|_| {
                vg.nodes()
                    .iter()
                    .map(|&v| gaussian(0.5, -1.0, 0.5, v) + gaussian(0.5, 1.0, 0.5, v))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut s = DvmState::from_values(&grid, vg, f);
        let before = s.conserved(0);
        let h0 = s.moment(0, 4);
        s.step(0.01, 0.1).unwrap();
        let after = s.conserved(0);
        assert_relative_eq!(before.rho, after.rho, max_relative = 1e-12);
        assert_relative_eq!(before.energy, after.energy, max_relative = 1e-12);
        assert!(after.mom.abs() < 1e-12);
        let eq = discrete_maxwellian(&after.to_primitive().unwrap(), s.vgrid());
        let h_eq = s.vgrid().moment(&eq, 4);
        let h1 = s.moment(0, 4);
        assert_relative_eq!(h1 - h_eq, (h0 - h_eq) * (-0.1f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn rejects_cfl_violation() {
        let grid = Grid1D::unit(4, Boundary::Periodic).unwrap();
        let field = MacroField::uniform(4, Primitive::new(1.0, 0.0, 1.0).unwrap()).unwrap();
        let mut s = DvmState::from_field(&grid, &field, VelocityGrid::covering(field.cells(), 16));
        assert!(s.step(1.0, 1.0).is_err());
    }
}
