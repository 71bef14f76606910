use std::path::Path;

use serde::Serialize;

use skomap::comb::{box_sequence, check_box_conditions, check_comb_conditions, comb_sequence};
use skomap::error::Error;
use skomap::verify::ConditionReport;

use crate::config::{load, ConditionsConfig, ConditionsMode};
use crate::{CliError, CliResult};

#[derive(Serialize)]
struct ConditionsOutput {
    spec: skomap::boundary::BoundarySpec,
    mode: &'static str,
    c1: f64,
    points: usize,
    truncation: Option<String>,
    report: ConditionReport,
}

pub fn run(config: &Path, out: Option<&Path>) -> CliResult {
    let cfg: ConditionsConfig = load(config)?;

    let (mode, seq, report) = match cfg.mode {
        ConditionsMode::Comb => {
            let seq = comb_sequence(&cfg.spec, &cfg.truncation)?;
            let report = check_comb_conditions(&cfg.spec, &seq, cfg.c1)?;
            ("comb", seq, report)
        }
        ConditionsMode::Box => {
            let (seq, boxes) = box_sequence(&cfg.spec, &cfg.truncation)?;
            let report = check_box_conditions(&cfg.spec, &seq, &boxes, cfg.c1)?;
            ("box", seq, report)
        }
    };

    let passed = report.passed;
    let output = ConditionsOutput {
        spec: cfg.spec,
        mode,
        c1: cfg.c1,
        points: seq.len(),
        truncation: seq.truncation,
        report,
    };
    let json = serde_json::to_string_pretty(&output).expect("report serializes");
    match out {
        Some(path) => std::fs::write(path, json + "\n").map_err(Error::Io)?,
        None => println!("{json}"),
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}
