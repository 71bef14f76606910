use rayon::prelude::*;
use serde::Serialize;

use skomap::comparison::{
    check_constraining_monotonicity, check_domain_monotonicity, check_input_monotonicity,
};
use skomap::error::Result;
use skomap::esm::{esm_solve, xi_direct_path, xi_recursive};
use skomap::gen::{
    constraining_input_instance, instance, nested_domain_instance, ordered_input_instance,
    InstanceOptions,
};
use skomap::verify::{verify_esp, verify_sp_complementarity, ConditionReport};

use crate::{CliError, CliResult, Suite};

#[derive(Serialize)]
struct SuiteReport {
    suite: String,
    seed_start: u64,
    seed_end: u64,
    instances: usize,
    tol: f64,
    passed: bool,
    max_violation: f64,
    worst_seed: u64,
    /// Condition report of the worst instance (absent for the oracle
    /// suite, whose check is a plain pointwise comparison).
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_detail: Option<ConditionReport>,
}

fn parse_seed_range(s: &str) -> Result<(u64, u64)> {
    let err = || {
        skomap::error::Error::Usage(format!(
            "cannot parse seed range {s:?}; expected an inclusive range like 0..499"
        ))
    };
    let (a, b) = s.split_once("..").ok_or_else(err)?;
    let start: u64 = a.trim().parse().map_err(|_| err())?;
    let end: u64 = b.trim().parse().map_err(|_| err())?;
    if end < start {
        return Err(err());
    }
    Ok((start, end))
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Esp => "esp",
        Suite::Sp => "sp",
        Suite::Oracle => "oracle",
        Suite::MonoDomain => "mono-domain",
        Suite::MonoInput => "mono-input",
        Suite::MonoConstraint => "mono-constraint",
    }
}

/// Worst violation of one instance of a suite, with the condition report
/// where the suite produces one.
fn run_instance(
    suite: Suite,
    seed: u64,
    tol: f64,
    inject_bug: bool,
) -> Result<(f64, Option<ConditionReport>)> {
    match suite {
        Suite::Oracle => {
            let (psi, bounds) = instance(seed, &InstanceOptions::general())?;
            let fast = xi_recursive(&psi, &bounds)?;
            let oracle = xi_direct_path(&psi, &bounds)?;
            let flip = if inject_bug { -1.0 } else { 1.0 };
            let mut worst = 0.0f64;
            for k in 0..fast.len() {
                worst = worst.max((flip * fast.value(k) - oracle.value(k)).abs());
            }
            Ok((worst, None))
        }
        Suite::Esp => {
            let (psi, bounds) = instance(seed, &InstanceOptions::separated())?;
            let mut sol = esm_solve(&psi, &bounds)?;
            if inject_bug {
                // plant an interior bump in the net constraint
                let mut values = sol.eta.values().to_vec();
                let mid = values.len() / 2;
                for v in values.iter_mut().skip(mid) {
                    *v += 0.125;
                }
                sol.eta = skomap::path::GridPath::new(std::sync::Arc::clone(psi.grid()), values)?;
            }
            let report = verify_esp(&sol, &psi, &bounds, tol)?;
            Ok((report.worst_violation, Some(report)))
        }
        Suite::Sp => {
            let (psi, bounds) = instance(seed, &InstanceOptions::separated())?;
            let mut sol = esm_solve(&psi, &bounds)?;
            if inject_bug {
                std::mem::swap(&mut sol.eta_lower, &mut sol.eta_upper);
            }
            let report = verify_sp_complementarity(&sol, &bounds, tol)?;
            Ok((report.worst_violation, Some(report)))
        }
        Suite::MonoDomain => {
            let mut inst = nested_domain_instance(seed)?;
            if inject_bug {
                std::mem::swap(&mut inst.bounds, &mut inst.bounds_wide);
            }
            let report = check_domain_monotonicity(&inst, tol)?;
            Ok((report.worst_violation, Some(report)))
        }
        Suite::MonoInput => {
            let mut inst = ordered_input_instance(seed)?;
            if inject_bug {
                // break psi = psi' + nu without telling the checker
                inst.psi = inst.psi.shifted(-1.0)?;
            }
            let report = check_input_monotonicity(&inst, tol)?;
            Ok((report.worst_violation, Some(report)))
        }
        Suite::MonoConstraint => {
            let mut inst = constraining_input_instance(seed)?;
            if inject_bug {
                inst.psi = inst.psi.shifted(-1.0)?;
            }
            let report = check_constraining_monotonicity(&inst, tol)?;
            Ok((report.worst_violation, Some(report)))
        }
    }
}

pub fn run(suite: Suite, seeds: &str, tol: Option<f64>, inject_bug: bool) -> CliResult {
    let (start, end) = parse_seed_range(seeds)?;
    let tol = tol.unwrap_or(match suite {
        Suite::Oracle => 1e-12,
        _ => 1e-9,
    });

    let violations: Vec<(u64, f64)> = (start..=end)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&seed| Ok((seed, run_instance(suite, seed, tol, inject_bug)?.0)))
        .collect::<Result<_>>()?;

    let (worst_seed, max_violation) = violations.iter().fold(
        (start, 0.0f64),
        |(ws, wv), &(seed, v)| {
            if v > wv {
                (seed, v)
            } else {
                (ws, wv)
            }
        },
    );
    let passed = max_violation <= tol;
    let worst_detail = run_instance(suite, worst_seed, tol, inject_bug)?.1;

    let report = SuiteReport {
        suite: suite_name(suite).to_string(),
        seed_start: start,
        seed_end: end,
        instances: violations.len(),
        tol,
        passed,
        max_violation,
        worst_seed,
        worst_detail,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}
