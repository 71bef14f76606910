//! Deterministic Brownian paths on nested dyadic grids.
//!
//! Paths are built by bridge midpoint refinement: level 0 draws the endpoint
//! `B(T) ~ N(0, T)`, level `k` fills the midpoints of the level `k-1` grid
//! with conditional draws of variance `h/4` (for a parent spacing `h`). Every
//! draw comes from a stream keyed by `(seed, level)` and is consumed in
//! index order, so a value depends only on `(seed, level, index)`. Two
//! consequences the experiments rely on:
//!
//! * restriction: the path at level `k` is exactly the level `k+1` path
//!   sampled at the shared grid points, so resolution studies refine one
//!   path instead of comparing independent ones;
//! * determinism: regenerating with the same seed is bit-identical,
//!   regardless of thread scheduling in the caller.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::path::GridPath;

/// Hard cap on the refinement depth (2^26 + 1 values ≈ 0.5 GiB of f64s).
const MAX_LEVEL: u32 = 26;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and a tag.
pub fn stream_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ tag)
}

fn level_rng(seed: u64, level: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, level as u64))
}

/// A Brownian path realized on every dyadic grid up to `max_level`.
#[derive(Debug, Clone)]
pub struct BrownianHierarchy {
    seed: u64,
    horizon: f64,
    max_level: u32,
    fine: Vec<f64>,
}

impl BrownianHierarchy {
    /// Generates the hierarchy down to grids with `2^max_level` steps.
    pub fn generate(seed: u64, horizon: f64, max_level: u32) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain("horizon must be finite and positive"));
        }
        if max_level > MAX_LEVEL {
            return Err(Error::domain(format!(
                "refinement level {max_level} exceeds the supported maximum {MAX_LEVEL}"
            )));
        }
        let n = 1usize << max_level;
        let mut fine = vec![0.0; n + 1];

        let z: f64 = level_rng(seed, 0).sample(StandardNormal);
        fine[n] = horizon.sqrt() * z;

        for level in 1..=max_level {
            let coarse = n >> (level - 1); // parent spacing in fine indices
            let half = coarse >> 1;
            let h = horizon / (1u64 << (level - 1)) as f64;
            let sd = (h / 4.0).sqrt();
            let mut rng = level_rng(seed, level);
            for i in 0..(1usize << (level - 1)) {
                let left = i * coarse;
                let z: f64 = rng.sample(StandardNormal);
                fine[left + half] = 0.5 * (fine[left] + fine[left + coarse]) + sd * z;
            }
        }

        Ok(BrownianHierarchy {
            seed,
            horizon,
            max_level,
            fine,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// The path restricted to the level-`level` grid (2^level steps).
    pub fn level_path(&self, level: u32) -> Result<GridPath> {
        if level > self.max_level {
            return Err(Error::usage(format!(
                "level {level} deeper than the generated hierarchy ({})",
                self.max_level
            )));
        }
        let stride = (1usize << self.max_level) >> level;
        let values: Vec<f64> = self.fine.iter().step_by(stride).copied().collect();
        let grid = TimeGrid::uniform(1 << level, self.horizon)?;
        GridPath::new(grid, values)
    }

    /// Terminal value `B(horizon)`.
    pub fn terminal(&self) -> f64 {
        *self.fine.last().unwrap()
    }
}

/// `level` such that `2^level == resolution`, or a usage error.
pub fn resolution_level(resolution: usize) -> Result<u32> {
    if resolution == 0 || !resolution.is_power_of_two() {
        return Err(Error::usage(format!(
            "resolution {resolution} is not a power of two"
        )));
    }
    Ok(resolution.trailing_zeros())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_at_zero_and_is_deterministic() {
        let a = BrownianHierarchy::generate(7, 1.0, 8).unwrap();
        let b = BrownianHierarchy::generate(7, 1.0, 8).unwrap();
        assert_eq!(a.level_path(8).unwrap().value(0), 0.0);
        assert_eq!(
            a.level_path(8).unwrap().values(),
            b.level_path(8).unwrap().values()
        );
        let c = BrownianHierarchy::generate(8, 1.0, 8).unwrap();
        assert_ne!(
            a.level_path(8).unwrap().values(),
            c.level_path(8).unwrap().values()
        );
    }

    #[test]
    fn coarse_paths_are_restrictions_of_deep_hierarchies() {
        // the level-k path must not depend on how deep the hierarchy goes
        let shallow = BrownianHierarchy::generate(42, 2.0, 5).unwrap();
        let deep = BrownianHierarchy::generate(42, 2.0, 9).unwrap();
        for level in 0..=5 {
            let a = shallow.level_path(level).unwrap();
            let b = deep.level_path(level).unwrap();
            assert_eq!(a.values(), b.values(), "level {level}");
        }
    }

    #[test]
    fn terminal_variance_matches_horizon() {
        let horizon = 2.5;
        let n = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for seed in 0..n {
            let b = BrownianHierarchy::generate(seed, horizon, 0).unwrap();
            sum += b.terminal();
            sum_sq += b.terminal() * b.terminal();
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(
            (var - horizon).abs() < 0.05 * horizon,
            "empirical variance {var} vs horizon {horizon}"
        );
    }

    #[test]
    fn bridge_increments_have_the_right_scale() {
        // Var[B(T/2)] = T/2; check over many seeds at level 1.
        let n = 10_000;
        let mut sum_sq = 0.0;
        for seed in 0..n {
            let b = BrownianHierarchy::generate(seed, 1.0, 1).unwrap();
            let mid = b.level_path(1).unwrap().value(1);
            sum_sq += mid * mid;
        }
        let var = sum_sq / n as f64;
        assert!((var - 0.5).abs() < 0.05 * 0.5, "midpoint variance {var}");
    }

    #[test]
    fn non_power_of_two_resolutions_are_rejected() {
        assert!(resolution_level(1024).is_ok());
        assert!(resolution_level(1000).is_err());
        assert!(resolution_level(0).is_err());
    }
}
