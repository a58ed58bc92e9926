//! Run the full joint solve on one drawn network: per-candidate metrics,
//! the scheduled terminal's allocation and the energy bookkeeping.
//!
//! Run with: cargo run --release --example joint_allocation

use cmc_swipt::baselines;
use cmc_swipt::energy::{self, PowerConstants, SegmentSpec};
use cmc_swipt::scenario::{ScenarioConfig, ScenarioRealization};
use cmc_swipt::scheduler::{self, SolverOptions};

fn main() -> cmc_swipt::Result<()> {
    let cfg = ScenarioConfig {
        num_mts: 10,
        num_subchannels: 64,
        seed: 2024,
        ..ScenarioConfig::default()
    };
    let real = ScenarioRealization::draw(&cfg)?;
    let constants = PowerConstants::uniform(1.0, 1.0, 5.0, 0.5, 10, 1.0)?;
    let segment = SegmentSpec::new(1.0, 1.0, 5.0, 100.0, 1000.0)?;
    let opts = SolverOptions::default();

    let sol = scheduler::solve_joint_detailed(&real, &constants, &segment, &opts)?;

    println!("candidate metrics (energy per segment if scheduled):");
    for (k, metric) in sol.metrics.iter().enumerate() {
        match metric {
            Some(m) => println!(
                "  terminal {k}: {m:9.4} J{}",
                if k == sol.decision.imt {
                    "   <- scheduled"
                } else {
                    ""
                }
            ),
            None => println!("  terminal {k}: infeasible"),
        }
    }
    for (k, reason) in &sol.excluded {
        println!("  exclusion reason for {k}: {reason}");
    }

    let d = &sol.decision;
    println!("\ndecision:");
    println!(
        "  downlink: subchannel {:2}, {:8.4} W",
        d.lr_subchannel, d.lr_power
    );
    if let Some(sr) = &d.sr {
        println!(
            "  intra-cloud: subchannel {:2}, {:8.4} W",
            sr.subchannel, sr.power
        );
    }

    let b = &sol.breakdown;
    println!("\nenergy breakdown (J per segment):");
    println!("  base-station tx      {:9.4}", b.e_bs_tx);
    println!("  scheduled rx         {:9.4}", b.e_imt_lr_rx);
    println!("  scheduled multicast  {:9.4}", b.e_imt_sr_tx);
    println!("  peers rx             {:9.4}", b.e_emt_sr_rx_total);
    println!("  harvested           -{:9.4}", b.q_harvest_total);
    println!("  net                  {:9.4}", b.net);

    let mc = baselines::multicast_baseline(&real, &constants, &segment)?;
    println!("\nversus conventional multicast:");
    println!(
        "  terminal-side consumption ratio: {:6.2} %",
        energy::ec_ratio_mt(b, mc.mt_rx_total)?
    );
    println!(
        "  system-wide consumption ratio:   {:6.2} %",
        energy::ec_ratio_system(b, mc.mt_rx_total, mc.bs_tx)?
    );
    Ok(())
}
