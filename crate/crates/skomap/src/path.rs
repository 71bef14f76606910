use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// A càdlàg step path sampled on a [`TimeGrid`].
///
/// The path takes the value `values[k]` on `[points[k], points[k+1])` and
/// `values[n]` at the horizon, i.e. evaluation returns the value at the
/// largest grid point not after `t`. Values may be `±inf` (boundaries of
/// one-sided problems) but never NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    grid: Arc<TimeGrid>,
    values: Vec<f64>,
}

impl GridPath {
    pub fn new(grid: Arc<TimeGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("path values must not be NaN"));
        }
        Ok(GridPath { grid, values })
    }

    /// Path holding the same value at every grid point.
    pub fn constant(grid: Arc<TimeGrid>, value: f64) -> Result<Self> {
        let n = grid.len();
        GridPath::new(grid, vec![value; n])
    }

    /// Path with `values[k] = f(points[k])`.
    pub fn from_fn(grid: Arc<TimeGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().iter().map(|&t| f(t)).collect();
        GridPath::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    /// Value at grid index `k`.
    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn same_grid(&self, other: &GridPath) -> bool {
        self.grid.same_as(&other.grid)
    }

    /// Evaluates the step path at time `t` in `[0, horizon]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.grid.index_at(t)?])
    }

    /// Total variation of the step path over `[t1, t2]`: the sum of
    /// `|values[k+1] - values[k]|` over grid points in the window. For grid
    /// endpoints this is the exact variation of the step path, and a lower
    /// bound for the variation of any path the grid samples.
    pub fn variation(&self, t1: f64, t2: f64) -> Result<f64> {
        if t1 > t2 {
            return Err(Error::domain(format!(
                "variation window is empty: {} > {}",
                t1, t2
            )));
        }
        let i = self.grid.index_at(t1)?;
        let j = self.grid.index_at(t2)?;
        // first grid point >= t1
        let start = if self.grid.points()[i] < t1 { i + 1 } else { i };
        let mut sum = 0.0;
        for k in start..j {
            let step = self.values[k + 1] - self.values[k];
            if !step.is_finite() {
                return Err(Error::domain(
                    "variation is undefined for paths with infinite values",
                ));
            }
            sum += step.abs();
        }
        Ok(sum)
    }

    /// Variation over the whole horizon.
    pub fn total_variation(&self) -> Result<f64> {
        self.variation(0.0, self.horizon())
    }

    /// Re-samples the path on a refined grid. Evaluation is unchanged at
    /// every time, and so is the variation.
    pub fn refine(&self, factor: usize) -> Result<GridPath> {
        if factor == 0 {
            return Err(Error::domain("refinement factor must be >= 1"));
        }
        if factor == 1 {
            return Ok(self.clone());
        }
        let grid = self.grid.refined(factor)?;
        let mut values = Vec::with_capacity(grid.len());
        for w in self.values.windows(2) {
            for _ in 0..factor {
                values.push(w[0]);
            }
        }
        values.push(*self.values.last().unwrap());
        GridPath::new(grid, values)
    }

    /// Re-samples the path on another grid by càdlàg evaluation. The target
    /// grid must not extend past this path's horizon.
    pub fn resample(&self, grid: &Arc<TimeGrid>) -> Result<GridPath> {
        if self.grid.same_as(grid) {
            return Ok(self.clone());
        }
        let mut values = Vec::with_capacity(grid.len());
        for &t in grid.points() {
            values.push(self.eval(t)?);
        }
        GridPath::new(Arc::clone(grid), values)
    }

    /// Maximum of `|self - other|` over grid points up to `t_max`. Both
    /// paths must live on the same grid (resample first if they do not).
    pub fn sup_distance(&self, other: &GridPath, t_max: f64) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::usage(
                "sup_distance needs both paths on the same grid",
            ));
        }
        let j = self.grid.index_at(t_max)?;
        let mut sup = 0.0f64;
        for k in 0..=j {
            let d = self.values[k] - other.values[k];
            if d.is_nan() {
                return Err(Error::domain(
                    "sup_distance is undefined for paths with infinite values",
                ));
            }
            sup = sup.max(d.abs());
        }
        Ok(sup)
    }

    /// New path with `f` applied to every value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridPath> {
        GridPath::new(
            Arc::clone(&self.grid),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Pointwise combination of two paths on the same grid.
    pub fn zip_with(&self, other: &GridPath, f: impl Fn(f64, f64) -> f64) -> Result<GridPath> {
        if !self.same_grid(other) {
            return Err(Error::usage("zip_with needs both paths on the same grid"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        GridPath::new(Arc::clone(&self.grid), values)
    }

    /// The path shifted by a constant.
    pub fn shifted(&self, c: f64) -> Result<GridPath> {
        self.map(|v| v + c)
    }

    /// The pointwise negation.
    pub fn negated(&self) -> Result<GridPath> {
        self.map(|v| -v)
    }
}

/// A validated pair of boundary paths `lower <= upper` on a shared grid.
///
/// `lower` may contain `-inf` and `upper` may contain `+inf`; this is how
/// one-sided and unconstrained problems are expressed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    lower: GridPath,
    upper: GridPath,
}

impl BoundaryPair {
    pub fn new(lower: GridPath, upper: GridPath) -> Result<Self> {
        if !lower.same_grid(&upper) {
            return Err(Error::usage("boundary paths must live on the same grid"));
        }
        for (k, (&l, &u)) in lower.values().iter().zip(upper.values()).enumerate() {
            if l == f64::INFINITY {
                return Err(Error::domain("lower boundary must never be +inf"));
            }
            if u == f64::NEG_INFINITY {
                return Err(Error::domain("upper boundary must never be -inf"));
            }
            if l > u {
                return Err(Error::domain(format!(
                    "lower boundary exceeds upper at t={}: {} > {}",
                    lower.grid().points()[k],
                    l,
                    u
                )));
            }
        }
        Ok(BoundaryPair { lower, upper })
    }

    /// Constant interval `[lower, upper]` on the given grid.
    pub fn constant(grid: Arc<TimeGrid>, lower: f64, upper: f64) -> Result<Self> {
        BoundaryPair::new(
            GridPath::constant(Arc::clone(&grid), lower)?,
            GridPath::constant(grid, upper)?,
        )
    }

    /// The unconstrained interval `(-inf, +inf)`.
    pub fn unconstrained(grid: Arc<TimeGrid>) -> Result<Self> {
        BoundaryPair::constant(grid, f64::NEG_INFINITY, f64::INFINITY)
    }

    /// One-sided interval `[lower, +inf)`.
    pub fn above(lower: GridPath) -> Result<Self> {
        let upper = GridPath::constant(Arc::clone(lower.grid()), f64::INFINITY)?;
        BoundaryPair::new(lower, upper)
    }

    pub fn lower(&self) -> &GridPath {
        &self.lower
    }

    pub fn upper(&self) -> &GridPath {
        &self.upper
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        self.lower.grid()
    }

    /// Smallest gap `upper - lower` over the grid.
    pub fn min_gap(&self) -> f64 {
        self.lower
            .values()
            .iter()
            .zip(self.upper.values())
            .map(|(&l, &u)| u - l)
            .fold(f64::INFINITY, f64::min)
    }

    /// Both boundaries shifted by a constant.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        BoundaryPair::new(self.lower.shifted(c)?, self.upper.shifted(c)?)
    }

    /// The mirrored pair `[-upper, -lower]`.
    pub fn negated(&self) -> Result<Self> {
        BoundaryPair::new(self.upper.negated()?, self.lower.negated()?)
    }

    /// Re-samples both boundaries on another grid.
    pub fn resample(&self, grid: &Arc<TimeGrid>) -> Result<Self> {
        BoundaryPair::new(self.lower.resample(grid)?, self.upper.resample(grid)?)
    }
}
