//! Terminal scheduling and the full joint solution: per-candidate link
//! allocations through the ratio solver, a per-candidate energy metric, and
//! the minimum-energy selection.

use serde::{Deserialize, Serialize};

use crate::dualalloc::{DualOptions, LinkProblem, LinkRatioProblem};
use crate::energy::{self, EnergyBreakdown, PowerConstants, SegmentSpec, SrCircuitModel};
use crate::error::{Error, Link, Result};
use crate::fracprog::{self, DinkelbachOptions, DinkelbachTrace};
use crate::scenario::ScenarioRealization;

/// Short-range half of a decision. Absent for a single-terminal cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrAssignment {
    pub subchannel: usize,
    pub power: f64,
}

/// One complete allocation: the scheduled terminal, one subchannel and power
/// per link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationDecision {
    /// Index of the terminal scheduled to decode and forward.
    pub imt: usize,
    pub lr_subchannel: usize,
    pub lr_power: f64,
    pub sr: Option<SrAssignment>,
}

/// How the intra-cloud multicast rate relates to its requirement.
///
/// `TrackRequirement` runs the multicast at exactly the required rate, the
/// way a multicast transmits at its advertised code rate; the allocator then
/// only chooses the subchannel (and the power follows from it). `Optimize`
/// treats the requirement as a floor and lets the allocator raise the rate
/// whenever that lowers energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SrRatePolicy {
    #[default]
    TrackRequirement,
    Optimize,
}

/// Knobs of the joint solver.
#[derive(Debug, Clone, Default)]
pub struct SolverOptions {
    pub dinkelbach: DinkelbachOptions,
    pub dual: DualOptions,
    pub sr_circuit: SrCircuitModel,
    pub sr_rate_policy: SrRatePolicy,
}

fn validate_shapes(
    realization: &ScenarioRealization,
    constants: &PowerConstants,
    segment: &SegmentSpec,
) -> Result<()> {
    constants.validate()?;
    segment.validate()?;
    if constants.theta.len() != realization.num_mts() {
        return Err(Error::InvalidConfig(format!(
            "got {} conversion efficiencies for {} terminals",
            constants.theta.len(),
            realization.num_mts()
        )));
    }
    Ok(())
}

/// Downlink allocation problem of candidate `k`: its own gains to decode on,
/// everyone else's gains as the harvest rebate.
pub fn lr_problem(
    realization: &ScenarioRealization,
    constants: &PowerConstants,
    segment: &SegmentSpec,
    k: usize,
) -> LinkProblem {
    let n = realization.num_subchannels();
    let num_mts = realization.num_mts();
    let gains: Vec<f64> = (0..n).map(|i| realization.lr_gain(k, i)).collect();
    let harvest_factor: Vec<f64> = (0..n)
        .map(|i| {
            (0..num_mts)
                .filter(|&m| m != k)
                .map(|m| constants.effective_theta(m) * realization.harvest_gain(m, i))
                .sum()
        })
        .collect();
    LinkProblem {
        link: Link::LongRange,
        gains,
        harvest_factor,
        fixed_circuit_power: constants.lr_circuit_power(),
        score_circuit_power: constants.p_rx + constants.p_e,
        rate_min: segment.r_l_min,
        power_max: segment.p_s_max,
        noise_var: constants.noise_var,
        segment_bits: segment.s_t,
        pin_rate_to_min: false,
    }
}

/// Intra-cloud multicast problem of candidate `k`, governed by its worst
/// peer. None for a single-terminal cloud. A zero rate requirement cannot be
/// operated at, so it always falls back to the optimizing policy.
pub fn sr_problem(
    realization: &ScenarioRealization,
    constants: &PowerConstants,
    segment: &SegmentSpec,
    k: usize,
    sr_circuit: SrCircuitModel,
    sr_rate_policy: SrRatePolicy,
) -> Option<LinkProblem> {
    if !realization.has_sr_phase() {
        return None;
    }
    let n = realization.num_subchannels();
    let gains: Vec<f64> = (0..n).map(|j| realization.sr_worst_gain(k, j)).collect();
    let circuit = sr_circuit.circuit_power(realization.num_mts(), constants.p_rx, constants.p_e);
    Some(LinkProblem {
        link: Link::ShortRange,
        gains,
        harvest_factor: vec![0.0; n],
        fixed_circuit_power: circuit,
        score_circuit_power: circuit,
        rate_min: segment.r_s_min,
        power_max: segment.p_k_max,
        noise_var: constants.noise_var,
        segment_bits: segment.s_t,
        pin_rate_to_min: sr_rate_policy == SrRatePolicy::TrackRequirement && segment.r_s_min > 0.0,
    })
}

/// One solved link of one candidate.
#[derive(Debug, Clone)]
pub struct LinkAllocation {
    pub subchannel: usize,
    pub power: f64,
    /// Optimal energy-per-segment ratio of this link.
    pub ratio: f64,
    pub trace: DinkelbachTrace<(usize, f64)>,
}

/// Full allocation of one candidate plus its scheduling metric.
#[derive(Debug, Clone)]
pub struct CandidateSolution {
    pub imt: usize,
    pub lr: LinkAllocation,
    pub sr: Option<LinkAllocation>,
    /// Energy per segment if this candidate is scheduled.
    pub metric: f64,
}

fn solve_link(problem: &LinkProblem, opts: &SolverOptions) -> Result<LinkAllocation> {
    let ratio_problem = LinkRatioProblem {
        link: problem,
        dual: &opts.dual,
    };
    let sol = fracprog::solve(&ratio_problem, &opts.dinkelbach)?;
    Ok(LinkAllocation {
        subchannel: sol.minimizer.0,
        power: sol.minimizer.1,
        ratio: sol.q_star,
        trace: sol.trace,
    })
}

/// Scheduling metric of a candidate: the sum of its two link energy ratios,
/// i.e. the net energy per segment if it were scheduled. Single-terminal
/// clouds reduce to the downlink ratio alone.
pub fn candidate_metric(
    lr_problem: &LinkProblem,
    lr_choice: (usize, f64),
    sr: Option<(&LinkProblem, (usize, f64))>,
) -> f64 {
    let lr_ratio =
        lr_problem.numerator(lr_choice.0, lr_choice.1) / lr_problem.rate(lr_choice.0, lr_choice.1);
    let sr_ratio = sr
        .map(|(p, (j, pw))| p.numerator(j, pw) / p.rate(j, pw))
        .unwrap_or(0.0);
    lr_ratio + sr_ratio
}

/// Solve both links of candidate `k` and assemble its metric.
pub fn solve_candidate(
    realization: &ScenarioRealization,
    constants: &PowerConstants,
    segment: &SegmentSpec,
    k: usize,
    opts: &SolverOptions,
) -> Result<CandidateSolution> {
    validate_shapes(realization, constants, segment)?;
    let lrp = lr_problem(realization, constants, segment, k);
    let lr = solve_link(&lrp, opts)?;
    let srp = sr_problem(
        realization,
        constants,
        segment,
        k,
        opts.sr_circuit,
        opts.sr_rate_policy,
    );
    let sr = match &srp {
        Some(p) => Some(solve_link(p, opts)?),
        None => None,
    };
    let metric = candidate_metric(
        &lrp,
        (lr.subchannel, lr.power),
        srp.as_ref()
            .zip(sr.as_ref())
            .map(|(p, a)| (p, (a.subchannel, a.power))),
    );
    Ok(CandidateSolution {
        imt: k,
        lr,
        sr,
        metric,
    })
}

/// Index of the minimum metric (lowest energy); ties break to the lowest index.
pub fn select_imt(metrics: &[f64]) -> Result<usize> {
    if metrics.is_empty() {
        return Err(Error::EmptyInput("no candidate metrics to select from"));
    }
    let mut best = 0;
    for (k, &m) in metrics.iter().enumerate().skip(1) {
        if m < metrics[best] {
            best = k;
        }
    }
    Ok(best)
}

/// Joint solution with per-candidate diagnostics.
#[derive(Debug, Clone)]
pub struct JointSolution {
    pub decision: AllocationDecision,
    pub breakdown: EnergyBreakdown,
    /// Metric per candidate; None for excluded candidates.
    pub metrics: Vec<Option<f64>>,
    /// (candidate, reason) for every excluded candidate.
    pub excluded: Vec<(usize, String)>,
    /// Sweeps of the outer fixed-point loop over the scheduling variable.
    pub outer_iterations: usize,
    /// The selected candidate's solved links (for trace dumps).
    pub selected: CandidateSolution,
}

/// Full joint solve: per-candidate resource allocation, then minimum-energy
/// scheduling; candidates that cannot meet the rate floors under the caps are
/// excluded with a reason. Errors only when every candidate is excluded.
pub fn solve_joint_detailed(
    realization: &ScenarioRealization,
    constants: &PowerConstants,
    segment: &SegmentSpec,
    opts: &SolverOptions,
) -> Result<JointSolution> {
    validate_shapes(realization, constants, segment)?;
    let num_mts = realization.num_mts();
    let mut metrics = vec![None; num_mts];
    let mut solutions: Vec<Option<CandidateSolution>> = vec![None; num_mts];
    let mut excluded = Vec::new();
    for k in 0..num_mts {
        match solve_candidate(realization, constants, segment, k, opts) {
            Ok(sol) => {
                metrics[k] = Some(sol.metric);
                solutions[k] = Some(sol);
            }
            Err(e @ (Error::InfeasibleLink { .. } | Error::NonConvergence { .. })) => {
                excluded.push((k, e.to_string()));
            }
            Err(other) => return Err(other),
        }
    }

    let feasible: Vec<usize> = (0..num_mts).filter(|&k| metrics[k].is_some()).collect();
    if feasible.is_empty() {
        return Err(Error::AllCandidatesInfeasible { reasons: excluded });
    }

    // Fixed-point sweep over the scheduling variable. The per-candidate
    // subproblems do not depend on who is scheduled, so the selection must
    // reproduce itself on the second sweep; anything else is an oscillation.
    let feasible_metrics: Vec<f64> = feasible.iter().map(|&k| metrics[k].unwrap()).collect();
    let mut outer_iterations = 0;
    let mut selected_idx = None;
    for _ in 0..2 {
        outer_iterations += 1;
        let pick = feasible[select_imt(&feasible_metrics)?];
        match selected_idx {
            None => selected_idx = Some(pick),
            Some(prev) => {
                assert_eq!(prev, pick, "scheduling fixed point oscillated");
                break;
            }
        }
    }
    let imt = selected_idx.unwrap();
    let selected = solutions[imt].take().unwrap();

    let decision = AllocationDecision {
        imt,
        lr_subchannel: selected.lr.subchannel,
        lr_power: selected.lr.power,
        sr: selected.sr.as_ref().map(|a| SrAssignment {
            subchannel: a.subchannel,
            power: a.power,
        }),
    };
    let breakdown = energy::evaluate_decision(realization, constants, segment, &decision)?;
    check_constraints(realization, constants, segment, &decision)?;
    debug_assert!(
        feasible_metrics.iter().all(|&m| selected.metric <= m),
        "selected candidate is dominated"
    );
    Ok(JointSolution {
        decision,
        breakdown,
        metrics,
        excluded,
        outer_iterations,
        selected,
    })
}

/// Joint solve returning just the decision and its energy bookkeeping.
pub fn solve_joint(
    realization: &ScenarioRealization,
    constants: &PowerConstants,
    segment: &SegmentSpec,
    opts: &SolverOptions,
) -> Result<(AllocationDecision, EnergyBreakdown)> {
    let sol = solve_joint_detailed(realization, constants, segment, opts)?;
    Ok((sol.decision, sol.breakdown))
}

/// Verify every constraint of a decision: one scheduled terminal, valid
/// subchannel indices, both rate floors, both power caps, and a short-range
/// phase exactly when the cloud has peers.
pub fn check_constraints(
    realization: &ScenarioRealization,
    constants: &PowerConstants,
    segment: &SegmentSpec,
    decision: &AllocationDecision,
) -> Result<()> {
    let n = realization.num_subchannels();
    if decision.imt >= realization.num_mts() {
        return Err(Error::InvalidConfig(
            "scheduled terminal out of range".into(),
        ));
    }
    if decision.lr_subchannel >= n {
        return Err(Error::InvalidConfig(
            "downlink subchannel out of range".into(),
        ));
    }
    if decision.sr.is_some() != realization.has_sr_phase() {
        return Err(Error::InvalidConfig(
            "short-range phase must exist exactly when the cloud has peers".into(),
        ));
    }
    if !(0.0..=segment.p_s_max + 1e-12).contains(&decision.lr_power) {
        return Err(Error::InvalidConfig(format!(
            "downlink power {} violates the cap {}",
            decision.lr_power, segment.p_s_max
        )));
    }
    let r_l = energy::lr_rate(
        decision.lr_power,
        realization.lr_gain(decision.imt, decision.lr_subchannel),
        constants.noise_var,
    );
    if r_l < segment.r_l_min - 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "downlink rate {r_l} below the floor {}",
            segment.r_l_min
        )));
    }
    if let Some(sr) = &decision.sr {
        if sr.subchannel >= n {
            return Err(Error::InvalidConfig(
                "short-range subchannel out of range".into(),
            ));
        }
        if !(0.0..=segment.p_k_max + 1e-12).contains(&sr.power) {
            return Err(Error::InvalidConfig(format!(
                "short-range power {} violates the cap {}",
                sr.power, segment.p_k_max
            )));
        }
        let r_s = energy::sr_rate(
            sr.power,
            realization.sr_worst_gain(decision.imt, sr.subchannel),
            constants.noise_var,
        );
        if r_s < segment.r_s_min - 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "short-range rate {r_s} below the floor {}",
                segment.r_s_min
            )));
        }
    }
    Ok(())
}
