use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use skomap::error::Error;
use skomap::experiment::{variation_experiment, VariationReport, Verdict};
use skomap::io::format_value;
use skomap::thorn::{
    excursion_variation_experiment, semimartingale_experiment, ThornExperimentResult, ThornSpec,
};

use crate::config::{load, CuspConfig, ThornConfig};
use crate::CliResult;

#[derive(Serialize)]
struct TrendSummary {
    means: Vec<f64>,
    ratios: Vec<f64>,
    final_ratio: f64,
    verdict: Verdict,
    skipped_seeds: usize,
}

impl From<&VariationReport> for TrendSummary {
    fn from(r: &VariationReport) -> Self {
        TrendSummary {
            means: r.means.clone(),
            ratios: r.ratios.clone(),
            final_ratio: r.final_ratio,
            verdict: r.verdict,
            skipped_seeds: r.skipped_seeds,
        }
    }
}

fn write_output(dir: &Path, name: &str, contents: &str) -> CliResult {
    std::fs::create_dir_all(dir).map_err(Error::Io)?;
    std::fs::write(dir.join(name), contents).map_err(Error::Io)?;
    Ok(())
}

pub fn run_cusp(config: &Path, out: &Path) -> CliResult {
    let cfg: CuspConfig = load(config)?;
    let results = variation_experiment(
        &cfg.spec,
        &cfg.alphas,
        &cfg.resolutions,
        &cfg.seeds,
        &cfg.thresholds,
        cfg.x0,
    )?;

    let mut csv = String::from("alpha,seed,resolution,variation\n");
    for r in &results {
        for (si, &seed) in r.report.seeds.iter().enumerate() {
            for (li, &res) in r.report.resolutions.iter().enumerate() {
                writeln!(
                    csv,
                    "{},{},{},{}",
                    format_value(r.alpha),
                    seed,
                    res,
                    format_value(r.report.estimates[li][si])
                )
                .expect("string write");
            }
        }
    }
    write_output(out, "variation.csv", &csv)?;

    #[derive(Serialize)]
    struct AlphaSummary {
        alpha: f64,
        #[serde(flatten)]
        trend: TrendSummary,
    }
    #[derive(Serialize)]
    struct Summary {
        spec: skomap::boundary::BoundarySpec,
        resolutions: Vec<usize>,
        seeds: usize,
        thresholds: skomap::experiment::TrendThresholds,
        per_alpha: Vec<AlphaSummary>,
    }
    let summary = Summary {
        spec: cfg.spec.clone(),
        resolutions: cfg.resolutions.clone(),
        seeds: cfg.seeds.len(),
        thresholds: cfg.thresholds,
        per_alpha: results
            .iter()
            .map(|r| AlphaSummary {
                alpha: r.alpha,
                trend: (&r.report).into(),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_output(out, "summary.json", &(json + "\n"))?;

    for r in &results {
        println!("alpha {}: {}", r.alpha, r.report.verdict);
    }
    Ok(())
}

fn excursion_rows(csv: &mut String, gamma: f64, base_gap: f64, result: &ThornExperimentResult) {
    for (si, window) in result.windows.iter().enumerate() {
        for (li, &res) in result.report.resolutions.iter().enumerate() {
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                format_value(gamma),
                format_value(base_gap),
                window.seed,
                res,
                format_value(window.start),
                format_value(window.end),
                format_value(window.max_height),
                format_value(result.report.estimates[li][si])
            )
            .expect("string write");
        }
    }
}

fn horizon_rows(csv: &mut String, gamma: f64, base_gap: f64, result: &ThornExperimentResult) {
    for (si, &seed) in result.report.seeds.iter().enumerate() {
        for (li, &res) in result.report.resolutions.iter().enumerate() {
            writeln!(
                csv,
                "{},{},{},{},{}",
                format_value(gamma),
                format_value(base_gap),
                seed,
                res,
                format_value(result.report.estimates[li][si])
            )
            .expect("string write");
        }
    }
}

pub fn run_thorn(config: &Path, out: &Path) -> CliResult {
    let cfg: ThornConfig = load(config)?;

    let mut specs: Vec<ThornSpec> = cfg
        .gammas
        .iter()
        .map(|&g| ThornSpec::new(g, cfg.epsilon))
        .collect::<Result<_, _>>()?;
    if let Some(gap) = cfg.control_gap {
        specs.push(ThornSpec::new(cfg.gammas[0], cfg.epsilon)?.widened(gap)?);
    }

    let excursion = excursion_variation_experiment(
        &specs,
        &cfg.resolutions,
        &cfg.seeds,
        cfg.horizon,
        cfg.detection_factor,
        &cfg.excursion_thresholds,
    )?;
    let horizon = semimartingale_experiment(
        &specs,
        &cfg.resolutions,
        &cfg.seeds,
        cfg.horizon,
        &cfg.horizon_thresholds,
    )?;

    let mut exc_csv = String::from(
        "gamma,base_gap,seed,resolution,window_start,window_end,max_height,variation\n",
    );
    for (spec, result) in specs.iter().zip(&excursion) {
        excursion_rows(&mut exc_csv, spec.gamma, spec.base_gap, result);
    }
    write_output(out, "excursion.csv", &exc_csv)?;

    let mut hor_csv = String::from("gamma,base_gap,seed,resolution,variation\n");
    for (spec, result) in specs.iter().zip(&horizon) {
        horizon_rows(&mut hor_csv, spec.gamma, spec.base_gap, result);
    }
    write_output(out, "horizon.csv", &hor_csv)?;

    #[derive(Serialize)]
    struct SpecSummary {
        gamma: f64,
        base_gap: f64,
        lipschitz: bool,
        per_excursion: TrendSummary,
        full_horizon: TrendSummary,
    }
    #[derive(Serialize)]
    struct Summary {
        horizon: f64,
        epsilon: f64,
        detection_factor: f64,
        resolutions: Vec<usize>,
        seeds: usize,
        excursion_thresholds: skomap::experiment::TrendThresholds,
        horizon_thresholds: skomap::experiment::TrendThresholds,
        per_spec: Vec<SpecSummary>,
    }
    let summary = Summary {
        horizon: cfg.horizon,
        epsilon: cfg.epsilon,
        detection_factor: cfg.detection_factor,
        resolutions: cfg.resolutions.clone(),
        seeds: cfg.seeds.len(),
        excursion_thresholds: cfg.excursion_thresholds,
        horizon_thresholds: cfg.horizon_thresholds,
        per_spec: specs
            .iter()
            .zip(excursion.iter().zip(&horizon))
            .map(|(spec, (exc, hor))| SpecSummary {
                gamma: spec.gamma,
                base_gap: spec.base_gap,
                lipschitz: spec.lipschitz(),
                per_excursion: (&exc.report).into(),
                full_horizon: (&hor.report).into(),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_output(out, "summary.json", &(json + "\n"))?;

    for (spec, (exc, hor)) in specs.iter().zip(excursion.iter().zip(&horizon)) {
        println!(
            "gamma {} (base gap {}): per-excursion {}, full-horizon {}",
            spec.gamma, spec.base_gap, exc.report.verdict, hor.report.verdict
        );
    }
    Ok(())
}
