//! Seeded random instances for the verification suites.
//!
//! All generators are pure functions of a seed, so suites are reproducible
//! and failures can be replayed from the seed alone. Paths are step paths
//! with standard-normal jumps on grids of 16–256 points; boundary gaps are
//! drawn from `[0.1, 2]`, wide enough to leave room and tight enough that
//! random inputs hit both boundaries.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::brownian::stream_seed;
use crate::comparison::ComparisonInstance;
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::path::{BoundaryPair, GridPath};

const INSTANCE_STREAM: u64 = 0x696e_7374;

/// Shape of the generated instances.
#[derive(Debug, Clone, Copy)]
pub struct InstanceOptions {
    pub min_points: usize,
    pub max_points: usize,
    pub gap_range: (f64, f64),
    pub horizon: f64,
    /// Place `psi(0)` inside `[lower(0), upper(0)]` (no initial jump).
    pub start_inside: bool,
    /// Occasionally drop one boundary to `±inf`.
    pub allow_one_sided: bool,
    /// Occasionally pinch `lower = upper` on a stretch.
    pub allow_pinch: bool,
    /// Quantize all values to multiples of this step. Solves are pure
    /// lattice arithmetic, so on quantized instances algebraic identities
    /// hold bit-exactly.
    pub lattice: Option<f64>,
}

impl Default for InstanceOptions {
    fn default() -> Self {
        InstanceOptions {
            min_points: 16,
            max_points: 256,
            gap_range: (0.1, 2.0),
            horizon: 1.0,
            start_inside: false,
            allow_one_sided: false,
            allow_pinch: false,
            lattice: None,
        }
    }
}

impl InstanceOptions {
    /// General two-sided instances, occasionally one-sided or pinched;
    /// used by the oracle-equivalence suite.
    pub fn general() -> Self {
        InstanceOptions {
            allow_one_sided: true,
            allow_pinch: true,
            ..InstanceOptions::default()
        }
    }

    /// Instances with `inf(upper - lower) > 0` and an admissible start;
    /// used by the condition-verifier suites.
    pub fn separated() -> Self {
        InstanceOptions {
            start_inside: true,
            ..InstanceOptions::default()
        }
    }

    /// Separated instances on the dyadic lattice `2^-20`, for exact
    /// symmetry checks.
    pub fn lattice() -> Self {
        InstanceOptions {
            start_inside: true,
            lattice: Some(2f64.powi(-20)),
            ..InstanceOptions::default()
        }
    }
}

fn quantize(x: f64, options: &InstanceOptions) -> f64 {
    match options.lattice {
        Some(q) => (x / q).round() * q,
        None => x,
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, INSTANCE_STREAM))
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// A random input path and boundary pair on a shared uniform grid.
pub fn instance(seed: u64, options: &InstanceOptions) -> Result<(GridPath, BoundaryPair)> {
    let mut rng = rng_for(seed);
    let n_points = rng.gen_range(options.min_points..=options.max_points);
    let grid = TimeGrid::uniform(n_points - 1, options.horizon)?;

    let lower_inf = options.allow_one_sided && rng.gen_ratio(1, 8);
    let upper_inf = options.allow_one_sided && rng.gen_ratio(1, 8);
    let pinch = options.allow_pinch && rng.gen_ratio(1, 8) && !lower_inf && !upper_inf;
    let (pinch_from, pinch_to) = if pinch {
        let a = rng.gen_range(0..n_points);
        let b = rng.gen_range(a..n_points);
        (a, b)
    } else {
        (usize::MAX, usize::MAX)
    };

    let mut lower = Vec::with_capacity(n_points);
    let mut upper = Vec::with_capacity(n_points);
    let mut level = quantize(normal(&mut rng), options);
    for k in 0..n_points {
        if k > 0 {
            level = quantize(level + 0.25 * normal(&mut rng), options);
        }
        let gap = if (pinch_from..=pinch_to).contains(&k) {
            0.0
        } else {
            quantize(
                rng.gen_range(options.gap_range.0..=options.gap_range.1),
                options,
            )
            .max(0.0)
        };
        lower.push(if lower_inf { f64::NEG_INFINITY } else { level });
        upper.push(if upper_inf {
            f64::INFINITY
        } else {
            level + gap
        });
    }
    // a doubly-infinite pair leaves psi unconstrained, which is fine
    let bounds = BoundaryPair::new(
        GridPath::new(std::sync::Arc::clone(&grid), lower)?,
        GridPath::new(std::sync::Arc::clone(&grid), upper)?,
    )?;

    let mut psi = Vec::with_capacity(n_points);
    let start = if options.start_inside {
        let l = bounds.lower().value(0);
        let u = bounds.upper().value(0);
        let (l, u) = (
            if l.is_finite() { l } else { u - 1.0 },
            if u.is_finite() { u } else { l + 1.0 },
        );
        if l.is_finite() && u.is_finite() {
            quantize(l + rng.gen_range(0.0..=1.0) * (u - l), options).clamp(l, u)
        } else {
            0.0
        }
    } else {
        quantize(normal(&mut rng), options)
    };
    psi.push(start);
    for _ in 1..n_points {
        let step = quantize(normal(&mut rng), options);
        psi.push(psi.last().unwrap() + step);
    }
    let psi = GridPath::new(grid, psi)?;
    Ok((psi, bounds))
}

fn random_nu(rng: &mut ChaCha8Rng, grid: &std::sync::Arc<TimeGrid>) -> Result<GridPath> {
    let kind = rng.gen_range(0..4u8);
    let n = grid.len();
    let values = match kind {
        0 => vec![0.0; n],
        1 => {
            let rate = rng.gen_range(0.1..2.0);
            grid.points().iter().map(|&t| rate * t).collect()
        }
        2 => {
            let mut v = Vec::with_capacity(n);
            let mut acc = 0.0;
            for k in 0..n {
                if k > 0 {
                    acc += 0.3 * normal(rng).abs();
                }
                v.push(acc);
            }
            v
        }
        _ => {
            let jump_at = rng.gen_range(1..n);
            let size = rng.gen_range(0.1..1.5);
            (0..n)
                .map(|k| if k >= jump_at { size } else { 0.0 })
                .collect()
        }
    };
    GridPath::new(std::sync::Arc::clone(grid), values)
}

/// Instance for the nested-domain comparison: a separated base domain and a
/// randomly widened enclosing one (each side widened by a random
/// non-negative step path, sometimes by zero).
pub fn nested_domain_instance(seed: u64) -> Result<ComparisonInstance> {
    let (psi, bounds) = instance(seed, &InstanceOptions::separated())?;
    let mut rng = rng_for(stream_seed(seed, 1));
    let grid = std::sync::Arc::clone(psi.grid());

    let widen = |rng: &mut ChaCha8Rng, grid: &std::sync::Arc<TimeGrid>| -> Result<GridPath> {
        if rng.gen_ratio(1, 4) {
            GridPath::constant(std::sync::Arc::clone(grid), 0.0)
        } else {
            let base = rng.gen_range(0.0..1.0);
            GridPath::from_fn(std::sync::Arc::clone(grid), |t| {
                base + 0.5 * (t * 13.0).sin().abs()
            })
        }
    };
    let below = widen(&mut rng, &grid)?;
    let above = widen(&mut rng, &grid)?;
    let wide = BoundaryPair::new(
        bounds.lower().zip_with(&below, |l, w| l - w)?,
        bounds.upper().zip_with(&above, |u, w| u + w)?,
    )?;
    ComparisonInstance::nested_domains(psi, bounds, wide)
}

/// Instance for the input-comparison check: `psi = psi' + nu` with random
/// offsets `c0`, `c0'`.
pub fn ordered_input_instance(seed: u64) -> Result<ComparisonInstance> {
    let (psi_prime, bounds) = instance(seed, &InstanceOptions::separated())?;
    let mut rng = rng_for(stream_seed(seed, 2));
    let nu = random_nu(&mut rng, psi_prime.grid())?;
    let (c0, c0_prime) = if rng.gen_ratio(1, 4) {
        let c = normal(&mut rng);
        (c, c)
    } else {
        (normal(&mut rng), normal(&mut rng))
    };
    ComparisonInstance::ordered_inputs(psi_prime, nu, c0, c0_prime, bounds)
}

/// Instance for the constraining-process comparison: like
/// [`ordered_input_instance`] but on a separated domain with
/// `psi(0) = psi'(0)` (guaranteed by `nu(0) = 0`).
pub fn constraining_input_instance(seed: u64) -> Result<ComparisonInstance> {
    ordered_input_instance(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible() {
        let options = InstanceOptions::general();
        let (a_psi, a_bounds) = instance(99, &options).unwrap();
        let (b_psi, b_bounds) = instance(99, &options).unwrap();
        assert_eq!(a_psi, b_psi);
        assert_eq!(a_bounds, b_bounds);
        let (c_psi, _) = instance(100, &options).unwrap();
        assert_ne!(a_psi, c_psi);
    }

    #[test]
    fn separated_instances_have_positive_gap_and_inside_start() {
        for seed in 0..50 {
            let (psi, bounds) = instance(seed, &InstanceOptions::separated()).unwrap();
            assert!(bounds.min_gap() >= 0.1 - 1e-12, "seed {seed}");
            assert!(psi.value(0) >= bounds.lower().value(0));
            assert!(psi.value(0) <= bounds.upper().value(0));
        }
    }

    #[test]
    fn lattice_instances_sit_on_the_lattice() {
        let q = 2f64.powi(-20);
        for seed in 0..20 {
            let (psi, bounds) = instance(seed, &InstanceOptions::lattice()).unwrap();
            for &v in psi
                .values()
                .iter()
                .chain(bounds.lower().values())
                .chain(bounds.upper().values())
            {
                assert_eq!(v, (v / q).round() * q, "seed {seed} value {v}");
            }
        }
    }

    #[test]
    fn general_instances_cover_one_sided_and_pinched_cases() {
        let options = InstanceOptions::general();
        let (mut one_sided, mut pinched) = (0, 0);
        for seed in 0..200 {
            let (_, bounds) = instance(seed, &options).unwrap();
            if bounds.lower().values().iter().any(|v| !v.is_finite())
                || bounds.upper().values().iter().any(|v| !v.is_finite())
            {
                one_sided += 1;
            }
            if bounds.min_gap() == 0.0 {
                pinched += 1;
            }
        }
        assert!(one_sided > 10, "one-sided count {one_sided}");
        assert!(pinched > 5, "pinched count {pinched}");
    }
}
