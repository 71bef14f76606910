use std::path::Path;

use serde::Serialize;

use skomap::esm::esm_solve;
use skomap::io::{read_path_file, write_path_file};
use skomap::path::{BoundaryPair, GridPath};

use crate::CliResult;

#[derive(Serialize)]
struct SolveSummary {
    grid_points: usize,
    horizon: f64,
    variation: Variations,
    range_check: RangeCheck,
}

#[derive(Serialize)]
struct Variations {
    phi: f64,
    eta: f64,
    eta_l: f64,
    eta_r: f64,
}

#[derive(Serialize)]
struct RangeCheck {
    passed: bool,
    worst_violation: f64,
}

pub fn run(psi: &Path, lower: &Path, upper: &Path, out: &str) -> CliResult {
    let psi = read_path_file(psi)?;
    let lower = read_path_file(lower)?;
    let upper = read_path_file(upper)?;

    // align all three inputs on the union grid
    let grid = psi.grid().merged(lower.grid())?.merged(upper.grid())?;
    let psi = psi.resample(&grid)?;
    let bounds = BoundaryPair::new(lower.resample(&grid)?, upper.resample(&grid)?)?;

    let sol = esm_solve(&psi, &bounds)?;

    if let Some(parent) = Path::new(&format!("{out}phi.csv")).parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(skomap::error::Error::Io)?;
        }
    }
    write_path_file(&sol.phi, format!("{out}phi.csv"))?;
    write_path_file(&sol.eta, format!("{out}eta.csv"))?;
    write_path_file(&sol.eta_lower, format!("{out}eta_l.csv"))?;
    write_path_file(&sol.eta_upper, format!("{out}eta_r.csv"))?;

    let range_worst = range_violation(&sol.phi, &bounds);
    let summary = SolveSummary {
        grid_points: grid.len(),
        horizon: grid.horizon(),
        variation: Variations {
            phi: sol.phi.total_variation()?,
            eta: sol.eta.total_variation()?,
            eta_l: sol.eta_lower.total_variation()?,
            eta_r: sol.eta_upper.total_variation()?,
        },
        range_check: RangeCheck {
            passed: range_worst == 0.0,
            worst_violation: range_worst,
        },
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(format!("{out}summary.json"), json + "\n").map_err(skomap::error::Error::Io)?;
    Ok(())
}

fn range_violation(phi: &GridPath, bounds: &BoundaryPair) -> f64 {
    phi.values()
        .iter()
        .zip(bounds.lower().values().iter().zip(bounds.upper().values()))
        .map(|(&p, (&l, &u))| (l - p).max(p - u).max(0.0))
        .fold(0.0, f64::max)
}
