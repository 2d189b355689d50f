//! Macroscopic states of a one-dimensional monatomic gas and the Gaussian
//! (Maxwellian) closure.
//!
//! With one velocity dimension the temperature is the velocity variance,
//! `W = rho u^2 / 2 + rho T / 2`, the pressure is `p = rho T`, and the
//! adiabatic exponent is 3.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Density, bulk velocity and temperature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    #[serde(rename = "T")]
    pub temp: f64,
}

/// Density, momentum and total energy densities, `<(1, v, v^2/2) f>`.
///
/// The same triple layout is used for fluxes of these quantities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Conserved {
    pub rho: f64,
    pub mom: f64,
    pub energy: f64,
}

impl Primitive {
    pub const fn new_unchecked(rho: f64, u: f64, temp: f64) -> Self {
        Self { rho, u, temp }
    }

    pub fn new(rho: f64, u: f64, temp: f64) -> Result<Self> {
        let p = Self { rho, u, temp };
        if p.is_physical() {
            Ok(p)
        } else {
            Err(Error::NonPhysicalState {
                cell: None,
                rho,
                internal_energy: 0.5 * rho * temp,
            })
        }
    }

    pub fn is_physical(&self) -> bool {
        self.rho > 0.0 && self.temp > 0.0 && self.rho.is_finite() && self.u.is_finite() && self.temp.is_finite()
    }

    pub fn pressure(&self) -> f64 {
        self.rho * self.temp
    }

    pub fn to_conserved(&self) -> Conserved {
        Conserved {
            rho: self.rho,
            mom: self.rho * self.u,
            energy: 0.5 * self.rho * (self.u * self.u + self.temp),
        }
    }

    /// Maxwellian density at velocity `v`.
    pub fn maxwellian(&self, v: f64) -> f64 {
        let c = v - self.u;
        self.rho / (2.0 * PI * self.temp).sqrt() * (-c * c / (2.0 * self.temp)).exp()
    }

    /// Euler flux `<v m M>` = `(rho u, rho u^2 + p, u (W + p))`.
    pub fn euler_flux(&self) -> Conserved {
        let p = self.pressure();
        let w = 0.5 * self.rho * (self.u * self.u + self.temp);
        Conserved {
            rho: self.rho * self.u,
            mom: self.rho * self.u * self.u + p,
            energy: self.u * (w + p),
        }
    }

    /// Raw moment `<v^n M>` of the Maxwellian for `n <= 4`.
    pub fn gaussian_raw_moment(&self, n: usize) -> Result<f64> {
        let (r, u, t) = (self.rho, self.u, self.temp);
        let m = match n {
            0 => r,
            1 => r * u,
            2 => r * (u * u + t),
            3 => r * (u * u * u + 3.0 * u * t),
            4 => r * (u.powi(4) + 6.0 * u * u * t + 3.0 * t * t),
            _ => return Err(Error::Unsupported(n)),
        };
        Ok(m)
    }

    /// `<v^3 M>`, the equilibrium third moment.
    pub fn third_moment(&self) -> f64 {
        self.rho * self.u * (self.u * self.u + 3.0 * self.temp)
    }

    /// Largest characteristic speed, `|u| + sqrt(3 T)`.
    pub fn max_wavespeed(&self) -> f64 {
        self.u.abs() + (3.0 * self.temp.max(0.0)).sqrt()
    }
}

impl Conserved {
    pub const ZERO: Conserved = Conserved {
        rho: 0.0,
        mom: 0.0,
        energy: 0.0,
    };

    pub const fn new(rho: f64, mom: f64, energy: f64) -> Self {
        Self { rho, mom, energy }
    }

    pub fn internal_energy(&self) -> f64 {
        self.energy - self.mom * self.mom / (2.0 * self.rho)
    }

    pub fn to_primitive(&self) -> Result<Primitive> {
        let e = self.internal_energy();
        if !(self.rho > 0.0) || !(e > 0.0) || !e.is_finite() || !self.mom.is_finite() {
            return Err(Error::NonPhysicalState {
                cell: None,
                rho: self.rho,
                internal_energy: e,
            });
        }
        Ok(Primitive {
            rho: self.rho,
            u: self.mom / self.rho,
            temp: 2.0 * e / self.rho,
        })
    }

    /// `(rho, u, T)` without validation: an empty cell reads as zeros and a
    /// negative temperature is clamped to zero.
    pub fn observables(&self) -> [f64; 3] {
        if !(self.rho > 0.0) {
            return [self.rho.max(0.0), 0.0, 0.0];
        }
        let u = self.mom / self.rho;
        [self.rho, u, (2.0 * self.internal_energy() / self.rho).max(0.0)]
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rho, self.mom, self.energy]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn map2(self, other: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::new(f(self.rho, other.rho), f(self.mom, other.mom), f(self.energy, other.energy))
    }
}

impl Index<usize> for Conserved {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.rho,
            1 => &self.mom,
            2 => &self.energy,
            _ => panic!("Conserved has three components, index {i}"),
        }
    }
}

impl Add for Conserved {
    type Output = Conserved;
    fn add(self, o: Conserved) -> Conserved {
        Conserved::new(self.rho + o.rho, self.mom + o.mom, self.energy + o.energy)
    }
}

impl AddAssign for Conserved {
    fn add_assign(&mut self, o: Conserved) {
        *self = *self + o;
    }
}

impl Sub for Conserved {
    type Output = Conserved;
    fn sub(self, o: Conserved) -> Conserved {
        Conserved::new(self.rho - o.rho, self.mom - o.mom, self.energy - o.energy)
    }
}

impl Neg for Conserved {
    type Output = Conserved;
    fn neg(self) -> Conserved {
        Conserved::new(-self.rho, -self.mom, -self.energy)
    }
}

impl Mul<f64> for Conserved {
    type Output = Conserved;
    fn mul(self, a: f64) -> Conserved {
        Conserved::new(self.rho * a, self.mom * a, self.energy * a)
    }
}

impl Mul<Conserved> for f64 {
    type Output = Conserved;
    fn mul(self, c: Conserved) -> Conserved {
        c * self
    }
}

/// Per-cell macroscopic state aligned with a [`crate::grid::Grid1D`].
#[derive(Clone, Debug, PartialEq)]
pub struct MacroField {
    cells: Vec<Primitive>,
}

impl MacroField {
    pub fn new(cells: Vec<Primitive>) -> Result<Self> {
        if let Some(i) = cells.iter().position(|p| !p.is_physical()) {
            let p = cells[i];
            return Err(Error::NonPhysicalState {
                cell: Some(i),
                rho: p.rho,
                internal_energy: 0.5 * p.rho * p.temp,
            });
        }
        Ok(Self { cells })
    }

    pub fn uniform(n: usize, p: Primitive) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn from_conserved(cons: &[Conserved]) -> Result<Self> {
        let cells = cons
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_primitive().map_err(|e| e.at_cell(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Primitive] {
        &self.cells
    }

    pub fn get(&self, i: usize) -> Primitive {
        self.cells[i]
    }

    pub fn conserved(&self) -> Vec<Conserved> {
        self.cells.iter().map(Primitive::to_conserved).collect()
    }

    /// Integrated mass, momentum and energy over cells of width `dx`.
    pub fn totals(&self, dx: f64) -> Conserved {
        let mut t = Conserved::ZERO;
        for c in &self.cells {
            t += c.to_conserved();
        }
        t * dx
    }

    pub fn max_wavespeed(&self) -> f64 {
        self.cells.iter().map(Primitive::max_wavespeed).fold(0.0, f64::max)
    }

    pub fn densities(&self) -> Vec<f64> {
        self.cells.iter().map(|p| p.rho).collect()
    }

    pub fn velocities(&self) -> Vec<f64> {
        self.cells.iter().map(|p| p.u).collect()
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.cells.iter().map(|p| p.temp).collect()
    }

    /// Pairwise averages of conserved variables onto a grid half as fine.
    pub fn coarsen(&self) -> Result<Self> {
        let cons: Vec<Conserved> = self
            .conserved()
            .chunks_exact(2)
            .map(|c| (c[0] + c[1]) * 0.5)
            .collect();
        Self::from_conserved(&cons)
    }
}

impl Index<usize> for MacroField {
    type Output = Primitive;
    fn index(&self, i: usize) -> &Primitive {
        &self.cells[i]
    }
}
