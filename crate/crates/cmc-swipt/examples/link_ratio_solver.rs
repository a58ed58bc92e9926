//! Solve one downlink's energy-per-segment ratio and print the solver trace.
//!
//! Run with: cargo run --release --example link_ratio_solver

use cmc_swipt::dualalloc::{DualOptions, LinkRatioProblem};
use cmc_swipt::energy::{PowerConstants, SegmentSpec};
use cmc_swipt::fracprog::{self, DinkelbachOptions};
use cmc_swipt::scenario::{ScenarioConfig, ScenarioRealization};
use cmc_swipt::scheduler;

fn main() -> cmc_swipt::Result<()> {
    let cfg = ScenarioConfig {
        num_mts: 8,
        num_subchannels: 16,
        seed: 7,
        ..ScenarioConfig::default()
    };
    let real = ScenarioRealization::draw(&cfg)?;
    let constants = PowerConstants::uniform(1.0, 1.0, 5.0, 0.5, 8, 1.0)?;
    let segment = SegmentSpec::new(1.0, 1.0, 5.0, 100.0, 1000.0)?;

    // Candidate terminal 0's downlink: it decodes, everyone else harvests.
    let link = scheduler::lr_problem(&real, &constants, &segment, 0);
    let dual = DualOptions::default();
    let problem = LinkRatioProblem {
        link: &link,
        dual: &dual,
    };

    let sol = fracprog::solve(&problem, &DinkelbachOptions::default())?;
    println!("iter |        q        |      F(q)");
    for (i, (q, f)) in sol.trace.q_f_pairs().iter().enumerate() {
        println!("{i:4} | {q:15.9} | {f:13.3e}");
    }
    println!(
        "\noptimal ratio {:.9} J/segment on subchannel {} at {:.4} W",
        sol.q_star, sol.minimizer.0, sol.minimizer.1
    );
    println!(
        "achieved downlink rate: {:.4} bps/Hz (floor {})",
        link.rate(sol.minimizer.0, sol.minimizer.1),
        segment.r_l_min
    );
    match sol.trace.monotone_direction(1e-12) {
        Some(-1) => println!("q iterates decreased monotonically"),
        Some(1) => println!("q iterates increased monotonically"),
        Some(_) => println!("q converged immediately"),
        None => println!("q iterates were not monotone"),
    }

    // The zero-subproblem test certifies optimality and rejects perturbations.
    let tol = 1e-8;
    println!(
        "optimality check at q*: {}, at q*+1e-3: {}",
        fracprog::check_optimality(&problem, sol.q_star, tol)?,
        fracprog::check_optimality(&problem, sol.q_star + 1e-3, tol)?
    );
    Ok(())
}
