use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite, strictly increasing time grid on `[0, horizon]`.
///
/// Grids always start at `0`, end at the horizon and carry at least two
/// points. Paths are interpreted as right-continuous step functions over the
/// grid, so the grid fully determines evaluation semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// Builds a grid from explicit points. The points must be finite,
    /// strictly increasing, start at `0` and contain at least two entries.
    pub fn new(points: Vec<f64>) -> Result<Arc<Self>> {
        if points.len() < 2 {
            return Err(Error::domain("a time grid needs at least 2 points"));
        }
        if points[0] != 0.0 {
            return Err(Error::domain(format!(
                "a time grid must start at 0, got {}",
                points[0]
            )));
        }
        for w in points.windows(2) {
            if !w[1].is_finite() {
                return Err(Error::domain("grid points must be finite"));
            }
            if w[1] <= w[0] {
                return Err(Error::domain(format!(
                    "grid points must be strictly increasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        Ok(Arc::new(TimeGrid { points }))
    }

    /// Uniform grid with `intervals` equal steps on `[0, horizon]`.
    pub fn uniform(intervals: usize, horizon: f64) -> Result<Arc<Self>> {
        if intervals == 0 {
            return Err(Error::domain("a uniform grid needs at least 1 interval"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain("horizon must be finite and positive"));
        }
        let n = intervals;
        let mut points = Vec::with_capacity(n + 1);
        for k in 0..=n {
            points.push(k as f64 / n as f64 * horizon);
        }
        // guard against pathological rounding on huge n
        points[n] = horizon;
        TimeGrid::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of steps (intervals) in the grid.
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Index of the largest grid point `<= t`. Errors when `t` lies outside
    /// `[0, horizon]`.
    pub fn index_at(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0 && t <= self.horizon()) {
            return Err(Error::domain(format!(
                "time {} outside [0, {}]",
                t,
                self.horizon()
            )));
        }
        // partition_point returns the first index with points[i] > t
        Ok(self.points.partition_point(|&p| p <= t) - 1)
    }

    /// Whether two grids are interchangeable for path operations.
    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || self.points == other.points
    }

    /// Inserts `factor - 1` equally spaced points into every interval.
    pub fn refined(&self, factor: usize) -> Result<Arc<Self>> {
        if factor == 0 {
            return Err(Error::domain("refinement factor must be >= 1"));
        }
        let mut points = Vec::with_capacity(self.intervals() * factor + 1);
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            points.push(a);
            for j in 1..factor {
                points.push(a + (b - a) * j as f64 / factor as f64);
            }
        }
        points.push(self.horizon());
        TimeGrid::new(points)
    }

    /// Union of the two grids. Both grids must share the same horizon.
    pub fn merged(&self, other: &TimeGrid) -> Result<Arc<Self>> {
        if self.horizon() != other.horizon() {
            return Err(Error::usage(format!(
                "cannot merge grids with horizons {} and {}",
                self.horizon(),
                other.horizon()
            )));
        }
        let (a, b) = (&self.points, &other.points);
        let mut points = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) => {
                    if x < y {
                        i += 1;
                        x
                    } else if y < x {
                        j += 1;
                        y
                    } else {
                        i += 1;
                        j += 1;
                        x
                    }
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => break,
            };
            points.push(next);
        }
        TimeGrid::new(points)
    }
}
