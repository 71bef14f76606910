//! Geometric comparison sequences and their condition checkers.
//!
//! Two constructions bracket the variation of the constraint term near a
//! pinch. The *comb* sequence `s_{k+1} = s_k + gap(s_k)^2` makes the
//! interval width comparable to the Brownian fluctuation over each step;
//! when the condition
//!
//! ```text
//! min(upper(s_{k+1}) - lower(s_k), upper(s_k) - lower(s_{k+1}))
//!     <= c1 * sqrt(s_{k+1} - s_k)
//! ```
//!
//! holds and `sum sqrt(s_{k+1} - s_k)` diverges, the variation is infinite.
//! The *box* construction fits space-time boxes of width proportional to
//! `sqrt(s_{k+1} - s_k)` inside the open domain; summability of the square
//! roots and of the boundary distances `d_k`, `d'_k` bounds the expected
//! variation. Infinite sequences are finitized under an explicit
//! [`TruncationPolicy`], and the reports carry partial sums plus tail
//! contributions so convergence evidence stays auditable.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySpec;
use crate::error::{Error, Result};
use crate::verify::{ConditionDetail, ConditionReport};

/// Slack used when testing the strict box inequalities (ratio form).
const CHECK_TOL: f64 = 1e-12;

/// Absolute slack for the comb inequality. Near a pinch at time `tau` the
/// recursion steps fall below `ulp(tau) / min_step` relative precision, so
/// the inequality is tested in absolute gap units where the representation
/// error stays near 1e-10 for O(1) horizons.
const COMB_ABS_TOL: f64 = 1e-9;

/// Largest admissible tail contribution for the box sums to count as
/// convergent at truncation.
const CAUCHY_TOL: f64 = 1e-6;

/// When to stop generating an in-principle infinite sequence.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationPolicy {
    pub max_points: usize,
    pub min_step: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            max_points: 1_000_000,
            min_step: 2f64.powi(-40),
        }
    }
}

/// A strictly increasing sequence of times in `[0, tau]`, with a note on
/// why generation stopped early (if it did).
#[derive(Debug, Clone, Serialize)]
pub struct CombSequence {
    pub times: Vec<f64>,
    pub truncation: Option<String>,
}

impl CombSequence {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn truncated(&self) -> bool {
        self.truncation.is_some()
    }
}

/// Builds the comb sequence of a boundary family.
///
/// Families whose gap shrinks toward the pinch use the squared-gap
/// recursion, started at the first dyadic position from which the recursion
/// contracts; the opening cusp uses the dyadic block family
/// `2^-j + m * gap(2^-j)^2`. Families without a computable construction are
/// a usage error.
pub fn comb_sequence(spec: &BoundarySpec, policy: &TruncationPolicy) -> Result<CombSequence> {
    spec.validate()?;
    match spec {
        BoundarySpec::ConstantGap { gap, tau } => {
            if *gap <= 0.0 {
                return Err(Error::usage(
                    "the squared-gap recursion cannot advance on a zero gap",
                ));
            }
            squared_gap_recursion(spec, 0.0, *tau, policy)
        }
        BoundarySpec::ClosingCusp { tau, .. } => {
            let start = contracting_start(spec, 0.0, *tau, policy)?;
            squared_gap_recursion(spec, start, *tau, policy)
        }
        BoundarySpec::SymmetricCusp { tau, .. } => {
            // the gap is non-increasing on [tau/2, tau]; climb toward tau
            let start = contracting_start(spec, tau / 2.0, *tau, policy)?;
            squared_gap_recursion(spec, start, *tau, policy)
        }
        BoundarySpec::OpeningCusp { tau, .. } => opening_blocks(spec, *tau, policy),
        BoundarySpec::Custom { .. } => Err(Error::usage(
            "comb construction needs an analytic boundary family",
        )),
    }
}

/// First position `s >= preferred` (halving the distance to the pinch) from
/// which one squared-gap step covers at most half the remaining time.
fn contracting_start(
    spec: &BoundarySpec,
    preferred: f64,
    tau: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let mut remaining = tau - preferred;
    loop {
        let s = tau - remaining;
        let step = spec.gap_at(s).powi(2);
        if step < remaining / 2.0 {
            return Ok(s);
        }
        remaining /= 2.0;
        if remaining < policy.min_step {
            return Err(Error::usage(
                "the squared-gap recursion cannot advance: gap^2 exceeds the \
                 remaining time at every scale (the gap closes too slowly)",
            ));
        }
    }
}

fn squared_gap_recursion(
    spec: &BoundarySpec,
    start: f64,
    tau: f64,
    policy: &TruncationPolicy,
) -> Result<CombSequence> {
    let mut times = vec![start];
    let mut s = start;
    let truncation = loop {
        let step = spec.gap_at(s).powi(2);
        if step < policy.min_step {
            break Some(format!("step fell below the floor {:e}", policy.min_step));
        }
        let next = s + step;
        if next > tau {
            // the next point would leave [0, tau]; the sequence is complete
            break None;
        }
        times.push(next);
        s = next;
        if next == tau {
            break None;
        }
        if times.len() >= policy.max_points {
            break Some(format!("point budget {} exhausted", policy.max_points));
        }
    };
    if times.len() < 2 {
        return Err(Error::usage(
            "the squared-gap recursion produced fewer than 2 points",
        ));
    }
    Ok(CombSequence { times, truncation })
}

/// Opening-cusp block family: all points `2^-j + m * gap(2^-j)^2` with
/// `m = 0..=floor(2^-j / gap(2^-j)^2)`, for `j` deep enough that the blocks
/// sit inside `[0, tau/2]`. Shallow blocks are kept in preference to deep
/// ones when the point budget binds.
fn opening_blocks(
    spec: &BoundarySpec,
    tau: f64,
    policy: &TruncationPolicy,
) -> Result<CombSequence> {
    let tau1 = tau / 2.0;
    let j_start = (2.0 / tau1).log2().ceil() as i32;

    let mut blocks: Vec<(f64, f64, usize)> = Vec::new(); // (base, step, m_max)
    let mut count = 0usize;
    let mut j = j_start;
    let truncation = loop {
        let base = 2f64.powi(-j);
        let step = spec.gap_at(base).powi(2);
        if step <= 0.0 {
            return Err(Error::usage(
                "the opening construction cannot advance on a zero gap",
            ));
        }
        if step < policy.min_step {
            break Some(format!("step fell below the floor {:e}", policy.min_step));
        }
        let m_max = (base / step).floor() as usize;
        if count + m_max + 1 > policy.max_points {
            break Some(format!("point budget {} exhausted", policy.max_points));
        }
        count += m_max + 1;
        blocks.push((base, step, m_max));
        j += 1;
    };

    let mut times = Vec::with_capacity(count);
    for &(base, step, m_max) in blocks.iter().rev() {
        for m in 0..=m_max {
            let s = base + m as f64 * step;
            if times.last().map_or(true, |&prev| s > prev) {
                times.push(s);
            }
        }
    }
    if times.len() < 2 {
        return Err(Error::usage(
            "the opening construction produced fewer than 2 points",
        ));
    }
    Ok(CombSequence { times, truncation })
}

fn validate_sequence(spec: &BoundarySpec, seq: &CombSequence) -> Result<()> {
    let tau = spec.tau();
    if seq.times.len() < 2 {
        return Err(Error::usage("a comb sequence needs at least 2 points"));
    }
    if seq.times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::usage("comb times must be strictly increasing"));
    }
    let first = seq.times[0];
    let last = *seq.times.last().unwrap();
    if first < 0.0 || last > tau {
        return Err(Error::usage(format!(
            "comb times must stay inside [0, {tau}]"
        )));
    }
    Ok(())
}

/// Checks the comb condition against `c1` and accumulates the square-root
/// step sum whose divergence witnesses infinite variation.
///
/// Metrics: `sqrt_step_sum` (the full partial sum), `sqrt_step_sum_first_half`
/// (partial sum over the first half of the pairs, for growth comparison),
/// `smallest_admissible_c1` (the largest ratio seen), `pairs`, `truncated`.
pub fn check_comb_conditions(
    spec: &BoundarySpec,
    seq: &CombSequence,
    c1: f64,
) -> Result<ConditionReport> {
    validate_sequence(spec, seq)?;

    let pairs = seq.times.len() - 1;
    let mut sqrt_sum = 0.0;
    let mut sqrt_sum_first_half = 0.0;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    let mut worst_at = 0.0f64;

    for k in 0..pairs {
        let (s0, s1) = (seq.times[k], seq.times[k + 1]);
        let sqrt_ds = (s1 - s0).sqrt();
        sqrt_sum += sqrt_ds;
        if k < pairs / 2 {
            sqrt_sum_first_half = sqrt_sum;
        }
        let numerator =
            (spec.upper_at(s1) - spec.lower_at(s0)).min(spec.upper_at(s0) - spec.lower_at(s1));
        max_ratio = max_ratio.max(numerator / sqrt_ds);
        // tested in absolute gap units; see COMB_ABS_TOL
        let excess = numerator - c1 * sqrt_ds;
        if excess > worst {
            worst = excess;
            worst_at = s1;
        }
    }

    let detail = ConditionDetail {
        name: "gap_excess_over_c1_sqrt_step".to_string(),
        passed: worst <= COMB_ABS_TOL,
        worst_violation: worst,
        location: worst_at,
    };
    Ok(ConditionReport::from_details(vec![detail])
        .with_metric("sqrt_step_sum", sqrt_sum)
        .with_metric("sqrt_step_sum_first_half", sqrt_sum_first_half)
        .with_metric("smallest_admissible_c1", max_ratio)
        .with_metric("pairs", pairs as f64)
        .with_metric("truncated", if seq.truncated() { 1.0 } else { 0.0 }))
}

/// Builds the box sequence and the tightest admissible boxes for a family.
///
/// For the symmetric cusp this is the two-sided dyadic block family (one
/// family accumulating at 0, one at `tau`) with boxes spanning the smallest
/// half-width over each window, shrunk by a relative margin so every closed
/// box sits strictly inside the open domain. The constant-gap family gets
/// the degenerate single box over `[0, tau]`.
pub fn box_sequence(
    spec: &BoundarySpec,
    policy: &TruncationPolicy,
) -> Result<(CombSequence, Vec<(f64, f64)>)> {
    spec.validate()?;
    const MARGIN: f64 = 1e-6;
    match spec {
        BoundarySpec::ConstantGap { gap, tau } => {
            if *gap <= 0.0 {
                return Err(Error::usage("boxes need a positive gap"));
            }
            let seq = CombSequence {
                times: vec![0.0, *tau],
                truncation: None,
            };
            let half = gap / 2.0 * (1.0 - MARGIN);
            Ok((seq, vec![(-half, half)]))
        }
        BoundarySpec::SymmetricCusp { tau, .. } => {
            let j_start = (4.0 / tau).log2().floor() as i32 + 2; // one level below the coarsest block inside [0, tau/4]
            let mut points = Vec::new();
            let mut count = 0usize;
            let mut truncation = None;
            let mut active = [true, true]; // [near zero, near tau]
            let mut j = j_start;
            while active.iter().any(|&a| a) {
                for side in 0..2 {
                    if !active[side] {
                        continue;
                    }
                    let near_tau = side == 1;
                    let base = 2f64.powi(-j);
                    let anchor = if near_tau { tau - base } else { base };
                    let step = spec.gap_at(anchor).powi(2);
                    if step < policy.min_step {
                        active[side] = false;
                        truncation =
                            Some(format!("step fell below the floor {:e}", policy.min_step));
                        continue;
                    }
                    let m_max = (base / step).floor() as usize;
                    if count + m_max + 1 > policy.max_points {
                        active[side] = false;
                        truncation = Some(format!("point budget {} exhausted", policy.max_points));
                        continue;
                    }
                    count += m_max + 1;
                    for m in 0..=m_max {
                        let offset = m as f64 * step;
                        points.push(if near_tau {
                            tau - base - offset
                        } else {
                            base + offset
                        });
                    }
                }
                j += 1;
            }
            points.sort_by(|a, b| a.partial_cmp(b).unwrap());
            points.dedup();
            if points.len() < 2 {
                return Err(Error::usage(
                    "the box construction produced fewer than 2 points",
                ));
            }
            let boxes = points
                .windows(2)
                .map(|w| {
                    let half = spec.upper_at(w[0]).min(spec.upper_at(w[1])) * (1.0 - MARGIN);
                    (-half, half)
                })
                .collect();
            Ok((
                CombSequence {
                    times: points,
                    truncation,
                },
                boxes,
            ))
        }
        _ => Err(Error::usage(
            "box construction is defined for the symmetric cusp and constant gap families",
        )),
    }
}

/// Checks that each box fits strictly inside the open domain and satisfies
/// the width condition `1/c1 < (b_k - a_k)/sqrt(s_{k+1}-s_k) < c1`, and
/// accumulates the three sums whose finiteness bounds the expected
/// variation.
///
/// Metrics: `sqrt_step_sum`, `d_sum`, `d_prime_sum`, and the tail
/// contributions `tail_near_zero` / `tail_near_tau` (largest of the three
/// sums restricted to the last dyadic window at the respective end, the
/// Cauchy evidence for convergence).
pub fn check_box_conditions(
    spec: &BoundarySpec,
    seq: &CombSequence,
    boxes: &[(f64, f64)],
    c1: f64,
) -> Result<ConditionReport> {
    validate_sequence(spec, seq)?;
    if boxes.len() + 1 != seq.times.len() {
        return Err(Error::usage(format!(
            "need one box per interval: {} boxes for {} points",
            boxes.len(),
            seq.times.len()
        )));
    }
    if !(c1.is_finite() && c1 > 0.0) {
        return Err(Error::usage("c1 must be positive and finite"));
    }

    let tau = spec.tau();
    let s_min = seq.times[0];
    let s_max = *seq.times.last().unwrap();
    // tails are only meaningful where the sequence accumulates at an end
    let near_zero_cut = if s_min > 0.0 && s_min < tau / 4.0 {
        2.0 * s_min
    } else {
        f64::NEG_INFINITY
    };
    let near_tau_cut = if s_max < tau && tau - s_max < tau / 4.0 {
        tau - 2.0 * (tau - s_max)
    } else {
        f64::INFINITY
    };

    let mut sqrt_sum = 0.0;
    let mut d_sum = 0.0;
    let mut dp_sum = 0.0;
    let mut tail0: [f64; 3] = [0.0; 3];
    let mut tail1: [f64; 3] = [0.0; 3];
    let mut width = WorstAt::default();

    for (k, &(a, b)) in boxes.iter().enumerate() {
        let (s0, s1) = (seq.times[k], seq.times[k + 1]);
        if b <= a {
            return Err(Error::usage(format!("box {k} is empty: [{a}, {b}]")));
        }
        let (lower_max, upper_min) = window_extrema(spec, s0, s1);
        if lower_max >= a || b >= upper_min {
            return Err(Error::usage(format!(
                "box {k} = [{a}, {b}] over [{s0}, {s1}] is not inside the open domain \
                 (boundary range [{lower_max}, {upper_min}])"
            )));
        }

        let sqrt_ds = (s1 - s0).sqrt();
        let ratio = (b - a) / sqrt_ds;
        width.observe((1.0 / c1 - ratio).max(ratio - c1), s1);

        let m = 0.5 * (a + b);
        let d = (spec.upper_at(s0) - m).abs() + (spec.lower_at(s0) - m).abs();
        let dp = (spec.upper_at(s1) - m)
            .abs()
            .max((spec.upper_left_limit(s1) - m).abs())
            + (spec.lower_at(s1) - m)
                .abs()
                .max((spec.lower_left_limit(s1) - m).abs());
        sqrt_sum += sqrt_ds;
        d_sum += d;
        dp_sum += dp;
        if s1 <= near_zero_cut {
            tail0[0] += sqrt_ds;
            tail0[1] += d;
            tail0[2] += dp;
        }
        if s0 >= near_tau_cut {
            tail1[0] += sqrt_ds;
            tail1[1] += d;
            tail1[2] += dp;
        }
    }

    let tail0 = tail0.iter().cloned().fold(0.0, f64::max);
    let tail1 = tail1.iter().cloned().fold(0.0, f64::max);
    let width_detail = ConditionDetail {
        name: "box_width_to_sqrt_step_ratio".to_string(),
        passed: width.violation <= CHECK_TOL,
        worst_violation: width.violation.max(0.0),
        location: width.location,
    };
    // convergence evidence: the last dyadic octave at each accumulation
    // end must contribute almost nothing to each of the three sums
    let tails_detail = ConditionDetail {
        name: "sums_cauchy_at_truncation".to_string(),
        passed: tail0.max(tail1) <= CAUCHY_TOL,
        worst_violation: tail0.max(tail1),
        location: if tail0 >= tail1 { s_min } else { s_max },
    };
    Ok(
        ConditionReport::from_details(vec![width_detail, tails_detail])
            .with_metric("sqrt_step_sum", sqrt_sum)
            .with_metric("d_sum", d_sum)
            .with_metric("d_prime_sum", dp_sum)
            .with_metric("tail_near_zero", tail0)
            .with_metric("tail_near_tau", tail1)
            .with_metric("pairs", boxes.len() as f64)
            .with_metric("truncated", if seq.truncated() { 1.0 } else { 0.0 }),
    )
}

#[derive(Default)]
struct WorstAt {
    violation: f64,
    location: f64,
}

impl WorstAt {
    fn observe(&mut self, violation: f64, location: f64) {
        if violation > self.violation {
            self.violation = violation;
            self.location = location;
        }
    }
}

/// Extremes of the boundaries over a closed time window. The analytic
/// families are monotone or unimodal, so window extremes sit at the
/// endpoints; custom step boundaries are scanned at their breakpoints.
fn window_extrema(spec: &BoundarySpec, s0: f64, s1: f64) -> (f64, f64) {
    let mut lower_max = spec.lower_at(s0).max(spec.lower_at(s1));
    let mut upper_min = spec.upper_at(s0).min(spec.upper_at(s1));
    if let BoundarySpec::Custom {
        times,
        lower,
        upper,
    } = spec
    {
        for (k, &t) in times.iter().enumerate() {
            if t >= s0 && t < s1 {
                lower_max = lower_max.max(lower[k]);
                upper_min = upper_min.min(upper[k]);
            }
        }
    }
    (lower_max, upper_min)
}
