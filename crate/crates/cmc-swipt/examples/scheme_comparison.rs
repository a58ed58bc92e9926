//! Compare every scheme, including the exhaustive-search reference, on a
//! small instance where the search is exact enough to act as ground truth.
//!
//! Run with: cargo run --release --example scheme_comparison

use cmc_swipt::baselines::BaselineKind;
use cmc_swipt::scenario::ScenarioConfig;
use cmc_swipt::sim::{run_experiment, summarize, ExperimentConfig, SweepSection};

fn main() -> cmc_swipt::Result<()> {
    let cfg = ExperimentConfig {
        trials: 100,
        scenario: ScenarioConfig {
            num_mts: 3,
            num_subchannels: 8,
            ..ScenarioConfig::default()
        },
        sweep: SweepSection::RateRatio(vec![5.0]),
        schemes: vec![
            BaselineKind::Es,
            BaselineKind::ProposedPs,
            BaselineKind::Max,
            BaselineKind::Rsa,
            BaselineKind::RusRsa,
            BaselineKind::Multicast,
        ],
        ..ExperimentConfig::default()
    };

    let records = run_experiment(&cfg)?;
    println!(
        "{} paired trials, every scheme sees the same channel draw per trial\n",
        cfg.trials
    );
    println!("scheme     | mean ec_mt | mean ec_system | mean net (J)");
    println!("-----------+------------+----------------+-------------");
    for row in summarize(&records) {
        println!(
            "{:10} | {:9.2}% | {:13.2}% | {:10.4}",
            row.scheme.label(),
            row.mean_ec_mt.unwrap_or(f64::NAN),
            row.mean_ec_system.unwrap_or(f64::NAN),
            row.mean_net.unwrap_or(f64::NAN),
        );
    }
    println!("\nexpected ordering: es <= ps <= rsa <= rus-rsa, and ps <= max");
    Ok(())
}
