//! The extended Skorokhod map on a time-dependent interval.
//!
//! Given an input path `psi` and boundaries `lower <= upper`, the map
//! produces the constrained path `phi = psi - xi` where
//!
//! ```text
//! xi(t) = max( (psi(0)-upper(0))^+ ∧ inf_{u<=t} (psi(u)-lower(u)),
//!              sup_{s<=t} [ (psi(s)-upper(s)) ∧ inf_{u in [s,t]} (psi(u)-lower(u)) ] )
//! ```
//!
//! On step paths `xi` also satisfies a one-step recursion
//!
//! ```text
//! xi_0 = (psi_0 - upper_0)^+ ∧ (psi_0 - lower_0)
//! xi_k = max(xi_{k-1}, psi_k - upper_k) ∧ (psi_k - lower_k)
//! ```
//!
//! which this module implements as the O(n) production solver
//! ([`xi_recursive`]); the direct double-loop evaluation ([`xi_direct`])
//! is kept as an independent O(n²) oracle. Both are pure lattice
//! expressions (min/max over the same pointwise differences), so they agree
//! bit-for-bit — the `oracle` verification suite exploits that.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::path::{BoundaryPair, GridPath};

/// Allowed mismatch between the raw `psi - xi` value and the admissible
/// interval before the solver declares its own output corrupt.
const CONSISTENCY_TOL: f64 = 1e-9;

/// Projection of `x` onto `[lower, upper]`: `(x ∧ upper) ∨ lower`.
pub fn project(x: f64, lower: f64, upper: f64) -> Result<f64> {
    if lower.is_nan() || upper.is_nan() || x.is_nan() {
        return Err(Error::domain("project does not accept NaN"));
    }
    if lower > upper {
        return Err(Error::domain(format!(
            "projection interval is empty: {lower} > {upper}"
        )));
    }
    Ok(clamp(x, lower, upper))
}

#[inline]
fn clamp(x: f64, lower: f64, upper: f64) -> f64 {
    x.min(upper).max(lower)
}

fn check_shared_grid(psi: &GridPath, bounds: &BoundaryPair) -> Result<()> {
    if !psi.grid().same_as(bounds.grid()) {
        return Err(Error::usage(
            "psi and the boundary pair must share one grid; merge and resample first",
        ));
    }
    Ok(())
}

fn check_finite_input(psi: &GridPath) -> Result<()> {
    if !psi.is_finite() {
        return Err(Error::domain("the input path must be finite"));
    }
    Ok(())
}

/// O(n) forward-pass evaluation of `xi` on the whole grid.
pub fn xi_recursive(psi: &GridPath, bounds: &BoundaryPair) -> Result<GridPath> {
    check_shared_grid(psi, bounds)?;
    check_finite_input(psi)?;
    let lower = bounds.lower().values();
    let upper = bounds.upper().values();
    let p = psi.values();

    let mut xi = Vec::with_capacity(p.len());
    let mut cur = (p[0] - upper[0]).max(0.0).min(p[0] - lower[0]);
    xi.push(cur);
    for k in 1..p.len() {
        cur = cur.max(p[k] - upper[k]).min(p[k] - lower[k]);
        xi.push(cur);
    }
    GridPath::new(Arc::clone(psi.grid()), xi)
}

/// Direct evaluation of `xi` at one time from the explicit formula, scanning
/// all grid points up to `t`. Linear per call, quadratic over a full path.
pub fn xi_direct(psi: &GridPath, bounds: &BoundaryPair, t: f64) -> Result<f64> {
    check_shared_grid(psi, bounds)?;
    check_finite_input(psi)?;
    let kt = psi.grid().index_at(t)?;
    Ok(xi_direct_at(
        psi.values(),
        bounds.lower().values(),
        bounds.upper().values(),
        kt,
    ))
}

fn xi_direct_at(p: &[f64], lower: &[f64], upper: &[f64], kt: usize) -> f64 {
    // sup over s of (psi_s - upper_s) ∧ inf_{u in [s, kt]} (psi_u - lower_u),
    // accumulating the inner inf backwards from kt.
    let mut tail_inf = f64::INFINITY;
    let mut sup_term = f64::NEG_INFINITY;
    for s in (0..=kt).rev() {
        tail_inf = tail_inf.min(p[s] - lower[s]);
        sup_term = sup_term.max((p[s] - upper[s]).min(tail_inf));
    }
    // tail_inf now holds inf over [0, kt]
    let first_term = (p[0] - upper[0]).max(0.0).min(tail_inf);
    first_term.max(sup_term)
}

/// The oracle path: [`xi_direct`] evaluated at every grid point.
pub fn xi_direct_path(psi: &GridPath, bounds: &BoundaryPair) -> Result<GridPath> {
    check_shared_grid(psi, bounds)?;
    check_finite_input(psi)?;
    let (p, lo, up) = (
        psi.values(),
        bounds.lower().values(),
        bounds.upper().values(),
    );
    let values = (0..p.len()).map(|k| xi_direct_at(p, lo, up, k)).collect();
    GridPath::new(Arc::clone(psi.grid()), values)
}

/// One-sided Skorokhod map on `[lower(·), +inf)`:
/// `phi(t) = psi(t) + sup_{s<=t} (lower(s) - psi(s))^+`.
///
/// With `lower ≡ 0` this is the classical reflection map at the origin.
pub fn gamma_lower(psi: &GridPath, lower: &GridPath) -> Result<GridPath> {
    if !psi.same_grid(lower) {
        return Err(Error::usage("psi and lower must share one grid"));
    }
    check_finite_input(psi)?;
    if lower.values().iter().any(|&l| l == f64::INFINITY) {
        return Err(Error::domain("lower boundary must never be +inf"));
    }
    let p = psi.values();
    let l = lower.values();
    let mut out = Vec::with_capacity(p.len());
    let mut running = 0.0f64;
    for k in 0..p.len() {
        running = running.max(l[k] - p[k]);
        // the raw sum can undershoot the boundary by one rounding step;
        // pin it back exactly as the two-sided solver does
        out.push((p[k] + running).max(l[k]));
    }
    GridPath::new(Arc::clone(psi.grid()), out)
}

/// Output bundle of one extended-Skorokhod solve.
///
/// `phi` is the constrained path, `eta = phi - psi` the net constraint, and
/// `eta_lower`/`eta_upper` its non-decreasing parts pushing up at the lower
/// boundary and down at the upper one (`eta = eta_lower - eta_upper`). The
/// split assigns each grid increment of `eta` to the boundary it acted at;
/// the jump at time 0 (when `psi(0)` starts outside the interval) is counted
/// with the convention `eta(0-) = 0`.
#[derive(Debug, Clone)]
pub struct EsmSolution {
    pub phi: GridPath,
    pub eta: GridPath,
    pub eta_lower: GridPath,
    pub eta_upper: GridPath,
}

impl EsmSolution {
    /// `eta_lower(T) + eta_upper(T)`: the total constraining activity,
    /// equal to `|eta(0)| + variation(eta)` up to summation rounding.
    pub fn total_pushing(&self) -> f64 {
        *self.eta_lower.values().last().unwrap() + *self.eta_upper.values().last().unwrap()
    }
}

/// Solves the extended Skorokhod problem for `psi` on `[lower(·), upper(·)]`.
pub fn esm_solve(psi: &GridPath, bounds: &BoundaryPair) -> Result<EsmSolution> {
    let xi = xi_recursive(psi, bounds)?;
    let p = psi.values();
    let lo = bounds.lower().values();
    let up = bounds.upper().values();

    let n = p.len();
    let mut phi = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    let mut eta_lower = Vec::with_capacity(n);
    let mut eta_upper = Vec::with_capacity(n);
    let (mut acc_lower, mut acc_upper) = (0.0f64, 0.0f64);

    for k in 0..n {
        let raw = p[k] - xi.value(k);
        let clamped = clamp(raw, lo[k], up[k]);
        if (raw - clamped).abs() > CONSISTENCY_TOL {
            return Err(Error::solver(format!(
                "constrained path escaped [lower, upper] at t={} by {:e}; \
                 the grid or inputs are corrupt",
                psi.grid().points()[k],
                (raw - clamped).abs()
            )));
        }
        phi.push(clamped);
        eta.push(-xi.value(k));
        let step = if k == 0 {
            eta[0] // eta(0-) = 0
        } else {
            eta[k] - eta[k - 1]
        };
        if step >= 0.0 {
            acc_lower += step;
        } else {
            acc_upper -= step;
        }
        eta_lower.push(acc_lower);
        eta_upper.push(acc_upper);
    }

    let grid = psi.grid();
    Ok(EsmSolution {
        phi: GridPath::new(Arc::clone(grid), phi)?,
        eta: GridPath::new(Arc::clone(grid), eta)?,
        eta_lower: GridPath::new(Arc::clone(grid), eta_lower)?,
        eta_upper: GridPath::new(Arc::clone(grid), eta_upper)?,
    })
}
