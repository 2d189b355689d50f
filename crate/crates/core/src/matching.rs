//! Moment matching: move per-cell particle moments onto the targets given
//! by the moment equations.
//!
//! Mass is matched by discarding or replicating particles (the particle
//! mass never changes), mean velocity and temperature by an affine map of
//! the velocities.

use log::debug;
use rand::seq::index;
use rand::Rng;

use crate::particles::CellParticles;
use crate::state::Primitive;

/// Stochastic rounding: `floor(x) + 1` with probability `x - floor(x)`,
/// `floor(x)` otherwise, so that `E[iround(x)] = x`.
pub fn iround<R: Rng + ?Sized>(x: f64, rng: &mut R) -> usize {
    debug_assert!(x >= 0.0, "iround of negative value {x}");
    let x = x.max(0.0);
    let fl = x.floor();
    let frac = x - fl;
    let up = frac > 0.0 && rng.random::<f64>() < frac;
    fl as usize + usize::from(up)
}

/// What a matching call did to one cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatchOutcome {
    pub removed: usize,
    pub added: usize,
    /// The removal request would have left fewer than two particles.
    pub clamped: bool,
    /// The velocity transform was skipped (too few particles or zero
    /// variance).
    pub skipped: bool,
}

/// The velocity transform could not be applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SkipMatch;

/// Discard or replicate particles so the cell mass `count * M_p` moves from
/// `mu0` toward `sigma0`, leaving a mismatch below one particle mass.
///
/// Survivors keep their positions; replicas copy the velocity of a
/// uniformly chosen parent and get a uniform position in `[left, left + dx)`.
pub fn density_match<R: Rng + ?Sized>(
    cell: &mut CellParticles,
    mu0: f64,
    sigma0: f64,
    particle_mass: f64,
    left: f64,
    dx: f64,
    rng: &mut R,
) -> MatchOutcome {
    let mut out = MatchOutcome::default();
    let n = cell.len();
    if mu0 > sigma0 {
        let mut k = iround((mu0 - sigma0) / particle_mass, rng);
        let max_remove = n.saturating_sub(2);
        if k > max_remove {
            debug!("MatchClamped: asked to remove {k} of {n} particles");
            out.clamped = true;
            k = max_remove;
        }
        if k == 0 {
            return out;
        }
        let mut drop = vec![false; n];
        for j in index::sample(rng, n, k) {
            drop[j] = true;
        }
        let mut j = 0;
        cell.positions.retain(|_| {
            j += 1;
            !drop[j - 1]
        });
        let mut j = 0;
        cell.velocities.retain(|_| {
            j += 1;
            !drop[j - 1]
        });
        out.removed = k;
    } else if mu0 < sigma0 {
        let k = iround((sigma0 - mu0) / particle_mass, rng);
        if k > 0 && n == 0 {
            debug!("cannot replicate into an empty cell");
            return out;
        }
        for _ in 0..k {
            let parent = rng.random_range(0..n);
            let v = cell.velocities[parent];
            let x = (left + dx * rng.random::<f64>()).min(left + dx * (1.0 - f64::EPSILON));
            cell.positions.push(x);
            cell.velocities.push(v);
        }
        out.added = k;
    }
    out
}

fn mean_and_variance(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Affine map `v* = (v - mu1) / c + mean` with `c = sqrt(var_emp / variance)`
/// so the empirical mean and variance become `mean` and `variance`.
pub fn transform_to(velocities: &mut [f64], mean: f64, variance: f64) -> Result<(), SkipMatch> {
    if velocities.len() < 2 || !(variance > 0.0) {
        return Err(SkipMatch);
    }
    let (mu1, var) = mean_and_variance(velocities);
    if !(var > 0.0) {
        return Err(SkipMatch);
    }
    let inv_c = (variance / var).sqrt();
    for v in velocities.iter_mut() {
        *v = (*v - mu1) * inv_c + mean;
    }
    Ok(())
}

/// Match the first two raw velocity moments (per unit mass) to `sigma1`
/// and `sigma2`.
pub fn velocity_transform(velocities: &mut [f64], sigma1: f64, sigma2: f64) -> Result<(), SkipMatch> {
    transform_to(velocities, sigma1, sigma2 - sigma1 * sigma1)
}

/// Full per-cell matching: mass first, then mean velocity and temperature.
pub fn match_cell<R: Rng + ?Sized>(
    cell: &mut CellParticles,
    target: &Primitive,
    particle_mass: f64,
    left: f64,
    dx: f64,
    rng: &mut R,
) -> MatchOutcome {
    let mu0 = cell.len() as f64 * particle_mass;
    let sigma0 = target.rho * dx;
    let mut out = density_match(cell, mu0, sigma0, particle_mass, left, dx, rng);
    if transform_to(&mut cell.velocities, target.u, target.temp).is_err() {
        debug!("SkipMatch: velocity transform undefined for {} particles", cell.len());
        out.skipped = true;
    }
    out
}
