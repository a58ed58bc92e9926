//! Measure what harvesting buys: run paired trials with the harvest path
//! enabled and disabled on identical channel draws and compare the
//! terminal-side net energy.
//!
//! Run with: cargo run --release --example swipt_effect

use cmc_swipt::sim::{run_experiment, ExperimentConfig, SweepSection};

fn mt_net(records: &[cmc_swipt::sim::ResultRecord]) -> Vec<(usize, f64)> {
    records
        .iter()
        .filter(|r| r.feasible)
        .map(|r| {
            let mt = r.e_imt_lr_rx.unwrap() + r.e_imt_sr_tx.unwrap() + r.e_emt_sr_rx_total.unwrap()
                - r.q_harvest_total.unwrap();
            (r.trial, mt)
        })
        .collect()
}

fn main() -> cmc_swipt::Result<()> {
    let base = ExperimentConfig {
        trials: 150,
        sweep: SweepSection::RateRatio(vec![5.0]),
        schemes: vec![cmc_swipt::baselines::BaselineKind::ProposedPs],
        ..ExperimentConfig::default()
    };
    let with = run_experiment(&base)?;
    let without = run_experiment(&ExperimentConfig {
        swipt_enabled: false,
        ..base.clone()
    })?;

    let on = mt_net(&with);
    let off = mt_net(&without);
    let paired: Vec<(f64, f64)> = on
        .iter()
        .filter_map(|(t, v)| off.iter().find(|(u, _)| u == t).map(|(_, w)| (*v, *w)))
        .collect();

    let improvements: Vec<f64> = paired.iter().map(|(v, w)| w - v).collect();
    let worse = paired.iter().filter(|(v, w)| v > w).count();
    let mean_on = paired.iter().map(|(v, _)| v).sum::<f64>() / paired.len() as f64;
    let mean_off = paired.iter().map(|(_, w)| w).sum::<f64>() / paired.len() as f64;
    let mean_gain = improvements.iter().sum::<f64>() / improvements.len() as f64;

    println!("paired trials:                  {}", paired.len());
    println!("terminal net energy, harvest on:  {mean_on:8.4} J");
    println!("terminal net energy, harvest off: {mean_off:8.4} J");
    println!(
        "mean improvement:                 {mean_gain:8.4} J ({:.1} % of the harvest-off cost)",
        100.0 * mean_gain / mean_off
    );
    println!("trials where harvesting hurt:     {worse}");
    Ok(())
}
