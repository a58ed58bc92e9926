//! Experiment harness: config parsing, Monte-Carlo execution, CSV emission
//! and SVG plotting.

pub mod config;
pub mod csv;
pub mod plot;
pub mod runner;

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use crate::baselines::BaselineKind;
use crate::error::Result;
use crate::scenario::ScenarioRealization;
use crate::scheduler::{self, SolverOptions};
use crate::seeding;

pub use config::{ConstantsSection, ExperimentConfig, SweepSection, SCHEMA_VERSION};
pub use csv::{
    emit_results_csv, emit_summary_csv, parse_results_csv, summarize, ResultRecord, SummaryRow,
};
pub use plot::{render_plot, PlotSeries};
pub use runner::run_experiment;

/// Output-control knobs of one run.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Dump solver traces of the first trial of each sweep point.
    pub trace: bool,
    /// Dump the realized gain matrices of the first trial of each sweep point.
    pub dump_channels: bool,
}

/// Paths written by [`run`].
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub results_csv: PathBuf,
    pub summary_csv: PathBuf,
    pub plots: Vec<PathBuf>,
    pub extra: Vec<PathBuf>,
    pub records: usize,
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    body(&mut out)?;
    out.flush()?;
    Ok(())
}

fn plot_series(
    rows: &[SummaryRow],
    metric: fn(&SummaryRow) -> (Option<f64>, Option<f64>),
) -> Vec<PlotSeries> {
    let mut schemes: Vec<BaselineKind> = Vec::new();
    for r in rows {
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme);
        }
    }
    schemes
        .into_iter()
        .map(|scheme| {
            let points = rows
                .iter()
                .filter(|r| r.scheme == scheme)
                .filter_map(|r| {
                    let (mean, err) = metric(r);
                    Some((r.sweep_value, mean?, err.unwrap_or(0.0)))
                })
                .collect();
            PlotSeries {
                label: scheme.label().to_string(),
                points,
            }
        })
        .filter(|s| !s.points.is_empty())
        .collect()
}

fn dump_channels(cfg: &ExperimentConfig, out_dir: &Path, extra: &mut Vec<PathBuf>) -> Result<()> {
    for sweep_idx in 0..cfg.sweep.len() {
        let (mut scenario, _, _) = cfg.at_sweep_point(sweep_idx);
        scenario.seed = seeding::trial_seed(cfg.master_seed, sweep_idx, 0);
        let real = ScenarioRealization::draw(&scenario)?;
        let lr_path = out_dir.join(format!("channels_sweep{sweep_idx}_lr.csv"));
        write_file(&lr_path, |out| {
            csv::emit_gain_matrix_csv(real.lr_gain_matrix(), out)
        })?;
        extra.push(lr_path);
        if real.has_sr_phase() {
            let sr_path = out_dir.join(format!("channels_sweep{sweep_idx}_sr.csv"));
            write_file(&sr_path, |out| {
                csv::emit_gain_matrix_csv(real.sr_worst_gain_matrix(), out)
            })?;
            extra.push(sr_path);
        }
    }
    Ok(())
}

fn dump_traces(cfg: &ExperimentConfig, out_dir: &Path, extra: &mut Vec<PathBuf>) -> Result<()> {
    let mut opts = SolverOptions {
        sr_circuit: cfg.constants.sr_circuit,
        sr_rate_policy: cfg.sr_rate_policy,
        ..SolverOptions::default()
    };
    opts.dual.record_trace = true;
    for sweep_idx in 0..cfg.sweep.len() {
        let (mut scenario, constants_section, segment) = cfg.at_sweep_point(sweep_idx);
        scenario.seed = seeding::trial_seed(cfg.master_seed, sweep_idx, 0);
        let real = ScenarioRealization::draw(&scenario)?;
        let constants = constants_section.build(scenario.num_mts, cfg.swipt_enabled)?;
        let sol = match scheduler::solve_joint_detailed(&real, &constants, &segment, &opts) {
            Ok(s) => s,
            Err(_) => continue,
        };

        // Ratio-solver iterates of the scheduled candidate, one file per link.
        let mut links = vec![("lr", &sol.selected.lr)];
        if let Some(sr) = &sol.selected.sr {
            links.push(("sr", sr));
        }
        for (tag, alloc) in links {
            let path = out_dir.join(format!("trace_ratio_sweep{sweep_idx}_{tag}.csv"));
            write_file(&path, |out| {
                writeln!(out, "iteration,q,f_value")?;
                for (idx, (q, f)) in alloc.trace.q_f_pairs().iter().enumerate() {
                    writeln!(out, "{idx},{},{}", csv::fmt_float(*q), csv::fmt_float(*f))?;
                }
                Ok(())
            })?;
            extra.push(path);
        }

        // Price-iteration trace at the converged ratio of the downlink.
        let lrp = scheduler::lr_problem(&real, &constants, &segment, sol.decision.imt);
        let inner = crate::dualalloc::solve_inner(sol.selected.lr.ratio, &lrp, &opts.dual)?;
        if let Some(rows) = inner.trace {
            let path = out_dir.join(format!("trace_prices_sweep{sweep_idx}_lr.csv"));
            write_file(&path, |out| {
                writeln!(
                    out,
                    "iteration,mu,theta,subchannel,power,rate_residual,power_residual"
                )?;
                for r in &rows {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        r.iteration,
                        csv::fmt_float(r.mu),
                        csv::fmt_float(r.theta),
                        r.subchannel,
                        csv::fmt_float(r.power),
                        csv::fmt_float(r.rate_residual),
                        csv::fmt_float(r.power_residual),
                    )?;
                }
                Ok(())
            })?;
            extra.push(path);
        }
    }
    Ok(())
}

/// Run the experiment a config describes and write every artifact:
/// `results.csv` (one row per scheme × sweep value × trial), `summary.csv`
/// (per sweep-value aggregates) and one SVG plot per consumption metric.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunArtifacts> {
    cfg.validate()?;
    std::fs::create_dir_all(&opts.out_dir)?;

    let records = run_experiment(cfg)?;
    let results_csv = opts.out_dir.join("results.csv");
    write_file(&results_csv, |out| emit_results_csv(&records, out))?;

    let rows = summarize(&records);
    let summary_csv = opts.out_dir.join("summary.csv");
    write_file(&summary_csv, |out| emit_summary_csv(&rows, out))?;

    let x_label = cfg.sweep.parameter_name();
    let mut plots = Vec::new();
    for (metric_name, metric) in [
        (
            "ec_mt",
            (|r: &SummaryRow| (r.mean_ec_mt, r.stderr_ec_mt)) as fn(&SummaryRow) -> _,
        ),
        ("ec_system", |r: &SummaryRow| {
            (r.mean_ec_system, r.stderr_ec_system)
        }),
    ] {
        let series = plot_series(&rows, metric);
        let path = opts.out_dir.join(format!("plot_{metric_name}.svg"));
        plot::write_plot(
            &series,
            x_label,
            &format!("{metric_name} (%)"),
            &format!("mean {metric_name} vs {x_label}"),
            &path,
        )?;
        plots.push(path);
    }

    let mut extra = Vec::new();
    if opts.dump_channels {
        dump_channels(cfg, &opts.out_dir, &mut extra)?;
    }
    if opts.trace {
        dump_traces(cfg, &opts.out_dir, &mut extra)?;
    }

    Ok(RunArtifacts {
        results_csv,
        summary_csv,
        plots,
        extra,
        records: records.len(),
    })
}
