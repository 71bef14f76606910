//! Executable monotonicity checks for the solver.
//!
//! Solutions in nested domains, and solutions for ordered inputs, satisfy
//! pointwise inequalities between their constrained paths and constraining
//! processes. Each check here solves the instances involved and measures the
//! worst violation of the corresponding inequality system; on correct solver
//! output every check must pass at roundoff scale, so a single genuine
//! violation is a solver bug rather than noise.

use crate::error::{Error, Result};
use crate::esm::{esm_solve, EsmSolution};
use crate::path::{BoundaryPair, GridPath};
use crate::verify::{ConditionDetail, ConditionReport};

/// One comparison problem: two inputs `c0 + psi` and `c0' + psi'` with
/// `psi = psi' + nu` for a non-decreasing `nu` starting at 0, plus a base
/// domain and an enlarged domain for nested-domain comparisons.
#[derive(Debug, Clone)]
pub struct ComparisonInstance {
    pub psi: GridPath,
    pub psi_prime: GridPath,
    pub c0: f64,
    pub c0_prime: f64,
    pub nu: GridPath,
    pub bounds: BoundaryPair,
    /// Enlarged domain: `wide.lower <= bounds.lower`, `bounds.upper <= wide.upper`.
    pub bounds_wide: BoundaryPair,
}

impl ComparisonInstance {
    /// Instance for domain comparisons: one input, two nested domains.
    pub fn nested_domains(
        psi: GridPath,
        bounds: BoundaryPair,
        bounds_wide: BoundaryPair,
    ) -> Result<Self> {
        let zero = GridPath::constant(std::sync::Arc::clone(psi.grid()), 0.0)?;
        Ok(ComparisonInstance {
            psi_prime: psi.clone(),
            psi,
            c0: 0.0,
            c0_prime: 0.0,
            nu: zero,
            bounds,
            bounds_wide,
        })
    }

    /// Instance for input comparisons: `psi = psi' + nu`, one domain.
    pub fn ordered_inputs(
        psi_prime: GridPath,
        nu: GridPath,
        c0: f64,
        c0_prime: f64,
        bounds: BoundaryPair,
    ) -> Result<Self> {
        let psi = psi_prime.zip_with(&nu, |a, b| a + b)?;
        Ok(ComparisonInstance {
            psi,
            psi_prime,
            c0,
            c0_prime,
            nu,
            bounds_wide: bounds.clone(),
            bounds,
        })
    }

    fn validate_nu(&self) -> Result<()> {
        let v = self.nu.values();
        if v[0] != 0.0 {
            return Err(Error::usage("nu must start at 0"));
        }
        if v.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::usage("nu must be non-decreasing"));
        }
        Ok(())
    }

    fn validate_separated(&self) -> Result<()> {
        if self.bounds.min_gap() <= 0.0 {
            return Err(Error::usage("this check requires inf(upper - lower) > 0"));
        }
        Ok(())
    }

    fn validate_nested(&self) -> Result<()> {
        let l = self.bounds.lower().values();
        let r = self.bounds.upper().values();
        let lw = self.bounds_wide.lower().values();
        let rw = self.bounds_wide.upper().values();
        for k in 0..l.len() {
            if lw[k] > l[k] || rw[k] < r[k] {
                return Err(Error::usage(format!(
                    "domains are not nested at t={}",
                    self.bounds.grid().points()[k]
                )));
            }
        }
        Ok(())
    }

    fn solve_pair(&self) -> Result<(EsmSolution, EsmSolution)> {
        let a = esm_solve(&self.psi.shifted(self.c0)?, &self.bounds)?;
        let b = esm_solve(&self.psi_prime.shifted(self.c0_prime)?, &self.bounds)?;
        Ok((a, b))
    }
}

fn detail(name: &str, worst: Worst, tol: f64) -> ConditionDetail {
    ConditionDetail {
        name: name.to_string(),
        passed: worst.violation <= tol,
        worst_violation: worst.violation,
        location: worst.location,
    }
}

#[derive(Default)]
struct Worst {
    violation: f64,
    location: f64,
}

impl Worst {
    fn observe(&mut self, violation: f64, t: f64) {
        if violation > self.violation {
            self.violation = violation;
            self.location = t;
        }
    }
}

/// Shrinking the domain can only increase both constraining processes.
///
/// Solves `inst.psi` on `bounds` and on the enlarged `bounds_wide` and
/// checks `eta_lower >= eta_lower~` and `eta_upper >= eta_upper~`
/// pointwise. Requires nested domains separated on the narrow side.
pub fn check_domain_monotonicity(inst: &ComparisonInstance, tol: f64) -> Result<ConditionReport> {
    inst.validate_nested()?;
    inst.validate_separated()?;
    let narrow = esm_solve(&inst.psi, &inst.bounds)?;
    let wide = esm_solve(&inst.psi, &inst.bounds_wide)?;

    let times = inst.psi.grid().points();
    let mut lower = Worst::default();
    let mut upper = Worst::default();
    for k in 0..times.len() {
        lower.observe(
            wide.eta_lower.value(k) - narrow.eta_lower.value(k),
            times[k],
        );
        upper.observe(
            wide.eta_upper.value(k) - narrow.eta_upper.value(k),
            times[k],
        );
    }
    Ok(ConditionReport::from_details(vec![
        detail("eta_lower_dominates_wide", lower, tol),
        detail("eta_upper_dominates_wide", upper, tol),
    ]))
}

/// Ordered inputs give ordered outputs: with `psi = psi' + nu` the
/// differences `phi' - phi` and `eta' - eta` stay inside explicit envelopes.
///
/// Checked envelopes, for every grid time `t`:
///
/// ```text
/// max(-(c0-c0')^+ - nu(t), -(upper(t)-lower(t)))
///     <= phi'(t) - phi(t) <= min((c0'-c0)^+, upper(t)-lower(t))
/// eta(t) - (c0'-c0)^+ <= eta'(t) <= eta(t) + nu(t) + (c0-c0')^+
/// ```
pub fn check_input_monotonicity(inst: &ComparisonInstance, tol: f64) -> Result<ConditionReport> {
    inst.validate_nu()?;
    let (sol, sol_prime) = inst.solve_pair()?;

    let plus = |x: f64| x.max(0.0);
    let up_shift = plus(inst.c0_prime - inst.c0);
    let down_shift = plus(inst.c0 - inst.c0_prime);

    let times = inst.psi.grid().points();
    let lo = inst.bounds.lower().values();
    let up = inst.bounds.upper().values();
    let nu = inst.nu.values();

    let mut phi_low = Worst::default();
    let mut phi_high = Worst::default();
    let mut eta_low = Worst::default();
    let mut eta_high = Worst::default();

    for k in 0..times.len() {
        let t = times[k];
        let gap = up[k] - lo[k];
        let d_phi = sol_prime.phi.value(k) - sol.phi.value(k);
        phi_low.observe((-down_shift - nu[k]).max(-gap) - d_phi, t);
        phi_high.observe(d_phi - up_shift.min(gap), t);

        let e = sol.eta.value(k);
        let e_prime = sol_prime.eta.value(k);
        eta_low.observe((e - up_shift) - e_prime, t);
        eta_high.observe(e_prime - (e + nu[k] + down_shift), t);
    }

    Ok(ConditionReport::from_details(vec![
        detail("phi_difference_lower_envelope", phi_low, tol),
        detail("phi_difference_upper_envelope", phi_high, tol),
        detail("eta_difference_lower_envelope", eta_low, tol),
        detail("eta_difference_upper_envelope", eta_high, tol),
    ]))
}

/// The split constraining processes move inside the same kind of envelopes
/// when the input grows: for `psi = psi' + nu`,
///
/// ```text
/// eta_lower(t) - (c0'-c0)^+ <= eta_lower'(t) <= eta_lower(t) + nu(t) + (c0-c0')^+
/// eta_upper'(t) - (c0'-c0)^+ <= eta_upper(t) <= eta_upper'(t) + nu(t) + (c0-c0')^+
/// ```
///
/// Requires a separated domain (the decomposition is then the one of the
/// classical problem) and `psi(0) = psi'(0)`.
pub fn check_constraining_monotonicity(
    inst: &ComparisonInstance,
    tol: f64,
) -> Result<ConditionReport> {
    inst.validate_nu()?;
    inst.validate_separated()?;
    if inst.psi.value(0) != inst.psi_prime.value(0) {
        return Err(Error::usage("this check requires psi(0) = psi'(0)"));
    }
    let (sol, sol_prime) = inst.solve_pair()?;

    let plus = |x: f64| x.max(0.0);
    let up_shift = plus(inst.c0_prime - inst.c0);
    let down_shift = plus(inst.c0 - inst.c0_prime);

    let times = inst.psi.grid().points();
    let nu = inst.nu.values();

    let mut ll = Worst::default();
    let mut lh = Worst::default();
    let mut ul = Worst::default();
    let mut uh = Worst::default();

    for k in 0..times.len() {
        let t = times[k];
        let el = sol.eta_lower.value(k);
        let el_p = sol_prime.eta_lower.value(k);
        let er = sol.eta_upper.value(k);
        let er_p = sol_prime.eta_upper.value(k);

        ll.observe((el - up_shift) - el_p, t);
        lh.observe(el_p - (el + nu[k] + down_shift), t);
        ul.observe((er_p - up_shift) - er, t);
        uh.observe(er - (er_p + nu[k] + down_shift), t);
    }

    Ok(ConditionReport::from_details(vec![
        detail("eta_lower_prime_above", ll, tol),
        detail("eta_lower_prime_below", lh, tol),
        detail("eta_upper_above", ul, tol),
        detail("eta_upper_below", uh, tol),
    ]))
}
