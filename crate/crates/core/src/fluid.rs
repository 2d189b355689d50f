//! Deterministic moment equations.
//!
//! The Euler part is discretised with a global Lax-Friedrichs flux or its
//! MUSCL extension built on the flux splitting `w± = F(U) ± alpha U`; the
//! kinetic correction `d/dx <v m g>` is added with a first-order central
//! flux. Time stepping is forward Euler.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::Grid1D;
use crate::particles::CellMoments;
use crate::state::{Conserved, MacroField, Primitive};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    First,
    Second,
    /// Second order where the non-equilibrium energy flux is small compared
    /// with the equilibrium one, first order elsewhere.
    Switch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limiter {
    Minmod,
    Vanleer,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub order: Order,
    pub limiter: Limiter,
    pub beta_threshold: f64,
    pub cfl: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            order: Order::First,
            limiter: Limiter::Minmod,
            beta_threshold: 1e-2,
            cfl: 0.5,
        }
    }
}

impl SchemeConfig {
    pub fn with_order(order: Order) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    /// `cfl * dx / alpha` for the global wavespeed `alpha` of `field`.
    pub fn stable_dt(&self, field: &MacroField, grid: &Grid1D) -> f64 {
        self.cfl * grid.dx() / field.max_wavespeed()
    }
}

/// Slope limiter as a function of the ratio of consecutive differences.
pub fn limiter_phi(limiter: Limiter, chi: f64) -> f64 {
    if chi.is_nan() {
        return 0.0;
    }
    match limiter {
        Limiter::Minmod => chi.clamp(0.0, 1.0),
        Limiter::Vanleer => {
            if chi.is_infinite() {
                return if chi > 0.0 { 2.0 } else { 0.0 };
            }
            (chi + chi.abs()) / (1.0 + chi.abs())
        }
    }
}

/// Global Lax-Friedrichs flux `(F_l + F_r)/2 - alpha (U_r - U_l)/2`.
pub fn lf_flux(left: &Primitive, right: &Primitive, alpha: f64) -> Conserved {
    let avg = (left.euler_flux() + right.euler_flux()) * 0.5;
    avg - (right.to_conserved() - left.to_conserved()) * (0.5 * alpha)
}

/// `sigma` of one cell: limited difference of `w = F ± alpha U` built from
/// the cell and its two neighbours, component by component.
fn limited_slope(prev: &Primitive, cur: &Primitive, next: &Primitive, sign: f64, alpha: f64, limiter: Limiter) -> Conserved {
    let w = |p: &Primitive| p.euler_flux() + p.to_conserved() * (sign * alpha);
    let (w0, w1, w2) = (w(prev), w(cur), w(next));
    let upwind = w1 - w0;
    let downwind = w2 - w1;
    let comp = |d_up: f64, d_down: f64| {
        if d_down == 0.0 {
            0.0
        } else {
            d_down * limiter_phi(limiter, d_up / d_down)
        }
    };
    upwind.map2(downwind, comp)
}

/// MUSCL flux at the face between `stencil[1]` and `stencil[2]`.
pub fn muscl_flux(stencil: &[Primitive; 4], alpha: f64, limiter: Limiter) -> Conserved {
    muscl_flux_switched(stencil, alpha, limiter, true, true)
}

/// MUSCL flux with the slope of the left and/or right cell switched off;
/// with both off this is exactly [`lf_flux`].
pub fn muscl_flux_switched(
    stencil: &[Primitive; 4],
    alpha: f64,
    limiter: Limiter,
    left_second: bool,
    right_second: bool,
) -> Conserved {
    let [s0, s1, s2, s3] = stencil;
    let base = lf_flux(s1, s2, alpha);
    if !left_second && !right_second {
        return base;
    }
    let plus = if left_second {
        limited_slope(s0, s1, s2, 1.0, alpha, limiter)
    } else {
        Conserved::ZERO
    };
    let minus = if right_second {
        limited_slope(s1, s2, s3, -1.0, alpha, limiter)
    } else {
        Conserved::ZERO
    };
    base + (plus - minus) * 0.25
}

/// `|lambda| / |F3|`; infinite when the equilibrium energy flux vanishes
/// relative to a non-zero `lambda`.
pub fn beta_ratio(lambda: f64, f3: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    if !(f3.abs() > 1e-12 * lambda.abs()) {
        return f64::INFINITY;
    }
    lambda.abs() / f3.abs()
}

/// Non-equilibrium fluxes `<v m g>` per cell together with the evolved
/// third moment and the particle fourth moment that feed them.
#[derive(Clone, Debug, PartialEq)]
pub struct KineticFluxField {
    pub g: Vec<Conserved>,
    /// Evolved `<v^3 f>`.
    pub third: Vec<f64>,
    /// Particle `<v^4 f>`.
    pub fourth: Vec<f64>,
}

impl KineticFluxField {
    /// `g = 0`: the moment equations reduce to the Euler equations.
    pub fn zeros(n: usize) -> Self {
        Self {
            g: vec![Conserved::ZERO; n],
            third: vec![0.0; n],
            fourth: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

/// Non-equilibrium fluxes from particle moments and the evolved third
/// moment.
///
/// Mass and momentum components are raw particle moments minus their
/// Gaussian counterparts; the energy component is
/// `(q - rho (u^3 + 3 u T)) / 2` with `q` the evolved third moment.
pub fn noneq_energy_flux(cells: &CellMoments, field: &MacroField, third: &[f64]) -> KineticFluxField {
    let g = field
        .cells()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Conserved::new(
                cells.momentum[i] - p.rho * p.u,
                2.0 * cells.energy[i] - p.rho * (p.u * p.u + p.temp),
                0.5 * (third[i] - p.third_moment()),
            )
        })
        .collect();
    KineticFluxField {
        g,
        third: third.to_vec(),
        fourth: cells.fourth.clone(),
    }
}

/// Per-cell choice of the second-order reconstruction.
pub fn second_order_cells(field: &MacroField, kin: &KineticFluxField, cfg: &SchemeConfig) -> Vec<bool> {
    match cfg.order {
        Order::First => vec![false; field.len()],
        Order::Second => vec![true; field.len()],
        Order::Switch => field
            .cells()
            .iter()
            .zip(&kin.g)
            .map(|(p, g)| beta_ratio(g.energy, p.euler_flux().energy) < cfg.beta_threshold)
            .collect(),
    }
}

/// One forward-Euler step of the moment equations with the kinetic flux
/// correction `kin.g`.
///
/// Face `k` separates cells `k` and `k + 1`; ghost cells follow the grid's
/// boundary rule. Fails with the index of the first non-physical cell.
pub fn moment_step(field: &MacroField, kin: &KineticFluxField, cfg: &SchemeConfig, dt: f64, grid: &Grid1D) -> Result<MacroField> {
    let n = grid.n_cells();
    assert_eq!(field.len(), n);
    assert_eq!(kin.len(), n);
    let alpha = field.max_wavespeed();
    let second = second_order_cells(field, kin, cfg);
    let at = |i: isize| field[grid.resolve(i)];

    let face_flux = |k: isize| {
        let (l, r) = (grid.resolve(k), grid.resolve(k + 1));
        let hydro = if second[l] || second[r] {
            let stencil = [at(k - 1), at(k), at(k + 1), at(k + 2)];
            muscl_flux_switched(&stencil, alpha, cfg.limiter, second[l], second[r])
        } else {
            lf_flux(&at(k), &at(k + 1), alpha)
        };
        hydro + (kin.g[l] + kin.g[r]) * 0.5
    };

    // faces -1 ..= n-1
    let mut fluxes: Vec<Conserved> = (-1..n as isize).map(face_flux).collect();
    if grid.is_periodic() {
        fluxes[0] = fluxes[n];
    }
    let ratio = dt / grid.dx();
    let cons: Vec<Conserved> = field
        .conserved()
        .into_iter()
        .enumerate()
        .map(|(i, u)| u - (fluxes[i + 1] - fluxes[i]) * ratio)
        .collect();
    MacroField::from_conserved(&cons)
}

/// Transport half of the third-moment equation.
///
/// `q* = q + dt * source` (collision part measured on the particles), then
/// a Lax-Friedrichs step of `d/dt q + d/dx <v^4 f> = 0` with the flux
/// `<v^4 f>` taken from the particles.
pub fn third_moment_step(third: &[f64], fourth: &[f64], source: &[f64], dt: f64, grid: &Grid1D, alpha: f64) -> Vec<f64> {
    let n = grid.n_cells();
    let q: Vec<f64> = third.iter().zip(source).map(|(q, s)| q + dt * s).collect();
    let face = |k: isize| {
        let (l, r) = (grid.resolve(k), grid.resolve(k + 1));
        0.5 * (fourth[l] + fourth[r]) - 0.5 * alpha * (q[r] - q[l])
    };
    let mut fluxes: Vec<f64> = (-1..n as isize).map(face).collect();
    if grid.is_periodic() {
        fluxes[0] = fluxes[n];
    }
    let ratio = dt / grid.dx();
    (0..n).map(|i| q[i] - ratio * (fluxes[i + 1] - fluxes[i])).collect()
}
