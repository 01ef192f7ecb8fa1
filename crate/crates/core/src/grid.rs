//! Sample points in the open unit disk.
//!
//! Identities that must hold for every `z ∈ 𝔻` are checked on a finite grid:
//! a ring of equispaced points on `|z| = 0.7` plus a few seeded interior
//! points. Since the checked quantities are rational in `z` of degree at most
//! `2n + 1` for an `n`-dimensional operator, the ring grows with `n`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::random::rng_from_seed;

pub const DEFAULT_SIZE: usize = 24;
pub const MIN_SIZE: usize = 8;
pub const RING_RADIUS: f64 = 0.7;
pub const INTERIOR_RADIUS: f64 = 0.9;
const INTERIOR_POINTS: usize = 8;

/// Builds a grid of at least `size` points, expanded to `2n + 1` points when
/// the operator dimension `n` demands it.
pub fn disk_grid(size: usize, n: usize, seed: u64) -> Result<Vec<Complex64>> {
    if size < MIN_SIZE {
        return Err(Error::InvalidInput(format!("grid size {size} is below {MIN_SIZE}")));
    }
    let interior = INTERIOR_POINTS.min(size / 3);
    let total = size.max(2 * n + 1 + interior);
    let ring = total - interior;
    let mut points: Vec<Complex64> = (0..ring)
        .map(|k| Complex64::from_polar(RING_RADIUS, std::f64::consts::TAU * k as f64 / ring as f64))
        .collect();
    let mut rng = rng_from_seed(seed);
    for _ in 0..interior {
        // Uniform in the disk of radius INTERIOR_RADIUS.
        let r = INTERIOR_RADIUS * rng.random::<f64>().sqrt();
        let t = std::f64::consts::TAU * rng.random::<f64>();
        points.push(Complex64::from_polar(r, t));
    }
    Ok(points)
}

/// `m` equispaced points on the circle of radius `r`.
pub fn circle(r: f64, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / m as f64))
        .collect()
}

pub fn check_in_disk(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutOfDisk(format!("{} + {}i", z.re, z.im)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = disk_grid(DEFAULT_SIZE, 4, 7).unwrap();
        assert_eq!(g.len(), 24);
        assert!(g[..16].iter().all(|z| (z.norm() - 0.7).abs() < 1e-15));
        assert!(g.iter().all(|z| z.norm() < 1.0));
        assert_eq!(g, disk_grid(DEFAULT_SIZE, 4, 7).unwrap());
    }

    #[test]
    fn grid_expands_with_dimension() {
        let g = disk_grid(DEFAULT_SIZE, 20, 7).unwrap();
        assert!(g.len() >= 41 + 8);
        assert!(disk_grid(4, 1, 0).is_err());
    }
}
