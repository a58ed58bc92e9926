//! Inner solver for one link's subchannel and power allocation at a fixed
//! ratio parameter q: closed-form water-filling power per subchannel,
//! derivative-based subchannel scoring, and projected subgradient updates of
//! the constraint prices.
//!
//! The per-subchannel cost is convex in the transmit power, so the water-
//! filling point projected onto [minimum-rate power, power cap] is the exact
//! per-subchannel optimum; the dual iterations settle the subchannel choice
//! and the prices.

use crate::error::{Error, Link, Result};
use crate::fracprog::FractionalProblem;

use std::f64::consts::LN_2;

/// One link of one candidate terminal, reduced to what the allocator needs:
/// per-subchannel decode gains, per-subchannel harvest rebate factors, and
/// the constant circuit-power blocks of the link's energy ratio.
#[derive(Debug, Clone)]
pub struct LinkProblem {
    /// Which radio link this is (for error messages).
    pub link: Link,
    /// Decode gain per subchannel: own gain for the downlink, worst-peer gain
    /// for the intra-cloud link.
    pub gains: Vec<f64>,
    /// Harvest rebate factor per subchannel: Σ_{n≠k} θ_n·g_n on the downlink,
    /// zeros on the intra-cloud link (nobody harvests there).
    pub harvest_factor: Vec<f64>,
    /// Constant power block of the ratio numerator (base-station plus
    /// terminal chain for the downlink; all peers' chains for the intra-cloud
    /// link).
    pub fixed_circuit_power: f64,
    /// Constant power block entering the subchannel score. Constant across
    /// subchannels, so it shifts all scores equally and never changes the
    /// selection.
    pub score_circuit_power: f64,
    pub rate_min: f64,
    pub power_max: f64,
    pub noise_var: f64,
    /// Segment size in bits.
    pub segment_bits: f64,
    /// Operate exactly at the minimum rate: the transmit power is the one
    /// meeting `rate_min`, never more. Models a multicast that runs at its
    /// advertised code rate. Subchannel selection is unaffected.
    pub pin_rate_to_min: bool,
}

impl LinkProblem {
    pub fn num_subchannels(&self) -> usize {
        self.gains.len()
    }

    /// SNR per transmitted watt on subchannel `i`.
    pub fn gamma(&self, i: usize) -> f64 {
        self.gains[i] / self.noise_var
    }

    pub fn rate(&self, i: usize, power: f64) -> f64 {
        (1.0 + power * self.gamma(i)).log2()
    }

    /// Ratio numerator at (subchannel, power): s_t·(p·(1 − A_i) + circuit).
    pub fn numerator(&self, i: usize, power: f64) -> f64 {
        self.segment_bits * (power * (1.0 - self.harvest_factor[i]) + self.fixed_circuit_power)
    }

    /// Subtractive objective U - q·R at a point.
    pub fn objective(&self, i: usize, power: f64, q: f64) -> f64 {
        self.numerator(i, power) - q * self.rate(i, power)
    }

    /// Smallest power meeting the minimum rate on subchannel `i`.
    pub fn min_feasible_power(&self, i: usize) -> f64 {
        ((2f64).powf(self.rate_min) - 1.0) / self.gamma(i)
    }

    /// Whether subchannel `i` can meet the minimum rate under the cap.
    pub fn subchannel_feasible(&self, i: usize) -> bool {
        self.min_feasible_power(i) <= self.power_max
    }

    pub fn feasible_subchannels(&self) -> Vec<usize> {
        (0..self.num_subchannels())
            .filter(|&i| self.subchannel_feasible(i))
            .collect()
    }

    /// Lagrangian of the per-subchannel problem with the minimum-rate price μ
    /// and the power-cap price θ.
    pub fn lagrangian(&self, i: usize, power: f64, q: f64, mu: f64, theta: f64) -> f64 {
        self.numerator(i, power)
            - q * self.rate(i, power)
            - mu * (self.rate(i, power) - self.rate_min)
            + theta * (power - self.power_max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gains.is_empty() {
            return Err(Error::EmptyInput("link has no subchannels"));
        }
        if self.gains.len() != self.harvest_factor.len() {
            return Err(Error::InvalidConfig(
                "gain and harvest-factor vectors must have equal length".into(),
            ));
        }
        if self.gains.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::InvalidConfig(
                "link gains must be positive and finite".into(),
            ));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.noise_var) || !positive(self.power_max) || !positive(self.segment_bits) {
            return Err(Error::InvalidConfig(
                "noise variance, power cap and segment size must be positive".into(),
            ));
        }
        Ok(())
    }

    fn infeasible_error(&self) -> Error {
        Error::InfeasibleLink {
            link: self.link,
            constraint: format!(
                "minimum rate {} bps/Hz unreachable at power cap {} W on every subchannel",
                self.rate_min, self.power_max
            ),
        }
    }
}

/// Where the water-filling power landed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerRegime {
    Interior,
    ZeroClamped,
    CapClamped,
    /// Aggregate harvest recovers more than the marginal transmit energy; the
    /// objective decreases in power, so the allocation rides the cap.
    HarvestDominant,
}

/// Water-filling minimizer of the priced per-subchannel cost over [0, cap]:
/// [(q + μ)/(ln2·(s_t(1 − A_i) + θ)) − 1/Γ_i] projected onto the box.
pub fn waterfill_power(
    q: f64,
    mu: f64,
    theta: f64,
    i: usize,
    link: &LinkProblem,
) -> (f64, PowerRegime) {
    let denom = link.segment_bits * (1.0 - link.harvest_factor[i]) + theta;
    if denom <= 0.0 {
        return (link.power_max, PowerRegime::HarvestDominant);
    }
    let raw = (q + mu) / (LN_2 * denom) - 1.0 / link.gamma(i);
    if raw <= 0.0 {
        (0.0, PowerRegime::ZeroClamped)
    } else if raw >= link.power_max {
        (link.power_max, PowerRegime::CapClamped)
    } else {
        (raw, PowerRegime::Interior)
    }
}

/// Closed-form optimal power on subchannel `i` for the given prices, then
/// projected onto [minimum-rate power, power cap]. When the minimum-rate
/// power itself exceeds the cap the cap wins; such subchannels are excluded
/// from selection upstream. Rate-pinned links transmit at the minimum-rate
/// power exactly.
pub fn optimal_power(q: f64, mu: f64, theta: f64, i: usize, link: &LinkProblem) -> f64 {
    if link.pin_rate_to_min {
        return link.min_feasible_power(i).min(link.power_max);
    }
    let (p, _) = waterfill_power(q, mu, theta, i, link);
    p.max(link.min_feasible_power(i)).min(link.power_max)
}

/// Marginal value Θ_i of assigning subchannel `i`, evaluated at the
/// subchannel's own priced power: the net transmit-side power block (with the
/// harvest rebate), the -(q + μ) term, and the rate-derivative bracket. The
/// assignment price λ would shift every score equally, so it is kept at zero.
pub fn subchannel_score(q: f64, mu: f64, power: f64, i: usize, link: &LinkProblem) -> f64 {
    let x = power * link.gamma(i);
    let power_block =
        link.segment_bits * (power * (1.0 - link.harvest_factor[i]) + link.score_circuit_power);
    let bracket = 1.0 + (1.0 + x).log2() - x / (LN_2 * (1.0 + x));
    power_block - (q + mu) + bracket
}

/// Index of the maximum score; ties break to the lowest index.
pub fn select_subchannel(scores: &[f64]) -> Result<usize> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("no subchannel scores to select from"));
    }
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Constraint prices of one link subproblem plus their update bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct DualState {
    /// Minimum-rate price (μ ≥ 0).
    pub mu: f64,
    /// Power-cap price (θ ≥ 0).
    pub theta: f64,
    /// Assignment price; never updated because exactly one subchannel is
    /// selected structurally, and a uniform score shift cannot move the argmax.
    pub lambda: f64,
    /// Base step sizes; the effective step at iteration l is ε0/√l.
    pub step_mu0: f64,
    pub step_theta0: f64,
    pub iteration: usize,
}

impl DualState {
    pub fn new(step_mu0: f64, step_theta0: f64) -> Self {
        Self {
            mu: 0.0,
            theta: 0.0,
            lambda: 0.0,
            step_mu0,
            step_theta0,
            iteration: 0,
        }
    }
}

/// Projected subgradient step on the prices:
/// μ ← [μ + ε_μ·(rate_min − rate)]⁺, θ ← [θ + ε_θ·(power − power_max)]⁺.
pub fn update_multipliers(
    state: &DualState,
    rate: f64,
    power: f64,
    rate_min: f64,
    power_max: f64,
) -> DualState {
    let l = (state.iteration + 1) as f64;
    let step_mu = state.step_mu0 / l.sqrt();
    let step_theta = state.step_theta0 / l.sqrt();
    DualState {
        mu: (state.mu + step_mu * (rate_min - rate)).max(0.0),
        theta: (state.theta + step_theta * (power - power_max)).max(0.0),
        lambda: state.lambda,
        step_mu0: state.step_mu0,
        step_theta0: state.step_theta0,
        iteration: state.iteration + 1,
    }
}

#[derive(Debug, Clone)]
pub struct DualOptions {
    pub step_mu0: f64,
    pub step_theta0: f64,
    /// Residual threshold for the price-driven stop test.
    pub residual_tol: f64,
    /// Consecutive iterations the (subchannel, projected power) pair must
    /// stand still before the loop stops.
    pub stable_iterations: usize,
    pub max_iterations: usize,
    pub record_trace: bool,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            step_mu0: 0.1,
            step_theta0: 0.1,
            residual_tol: 1e-6,
            stable_iterations: 5,
            max_iterations: 2000,
            record_trace: false,
        }
    }
}

/// One row of the dual-iteration debug trace.
#[derive(Debug, Clone, Copy)]
pub struct DualTraceRow {
    pub iteration: usize,
    pub mu: f64,
    pub theta: f64,
    pub subchannel: usize,
    pub power: f64,
    pub rate_residual: f64,
    pub power_residual: f64,
}

/// Output of the inner solver.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub subchannel: usize,
    /// Transmit power on the selected subchannel, feasible for the rate floor
    /// and the cap.
    pub power: f64,
    /// Final scores of all subchannels (infeasible ones hold -inf).
    pub scores: Vec<f64>,
    /// Subtractive objective U - q·R at the solution.
    pub objective: f64,
    pub state: DualState,
    pub iterations: usize,
    pub trace: Option<Vec<DualTraceRow>>,
}

/// Complementary-slackness warm start for the rate price: when even the most
/// attractive subchannel's unpriced water level sits below its minimum-rate
/// power, start μ at the level that lifts that water level exactly onto the
/// floor. The subgradient updates then only have to track selection changes
/// instead of climbing from zero.
fn initial_mu(q: f64, link: &LinkProblem, feasible: &[usize]) -> f64 {
    // Rank channels by gain per unit of net marginal power cost; that is the
    // ordering the water level induces, so it predicts the selection.
    let cost_ratio =
        |i: usize| link.gamma(i) / (link.segment_bits * (1.0 - link.harvest_factor[i]));
    let best = feasible
        .iter()
        .copied()
        .max_by(|&a, &b| cost_ratio(a).partial_cmp(&cost_ratio(b)).unwrap())
        .unwrap();
    let denom = link.segment_bits * (1.0 - link.harvest_factor[best]);
    if denom <= 0.0 {
        return 0.0;
    }
    let floor = link.min_feasible_power(best);
    let (wf, _) = waterfill_power(q, 0.0, 0.0, best, link);
    if wf >= floor {
        return 0.0;
    }
    (LN_2 * denom * (floor + 1.0 / link.gamma(best)) - q).max(0.0)
}

/// Solve the fixed-q subproblem of one link: pick one subchannel and its
/// transmit power subject to the minimum rate and the power cap.
///
/// Errors when no subchannel can reach the minimum rate under the cap.
pub fn solve_inner(q: f64, link: &LinkProblem, opts: &DualOptions) -> Result<InnerSolution> {
    link.validate()?;
    let feasible = link.feasible_subchannels();
    if feasible.is_empty() {
        return Err(link.infeasible_error());
    }

    let n = link.num_subchannels();
    let mut state = DualState::new(opts.step_mu0, opts.step_theta0);
    state.mu = initial_mu(q, link, &feasible);
    let mut trace = opts.record_trace.then(Vec::new);
    let mut scores = vec![f64::NEG_INFINITY; n];
    let mut streak = 0usize;
    let mut last: Option<(usize, f64)> = None;
    let mut chosen = feasible[0];
    let mut out_power = optimal_power(q, state.mu, state.theta, chosen, link);

    for iter in 1..=opts.max_iterations {
        for &i in &feasible {
            let (p, _) = waterfill_power(q, state.mu, state.theta, i, link);
            scores[i] = subchannel_score(q, state.mu, p, i, link) - state.lambda;
        }
        // Highest score wins, ties to the lowest index.
        chosen = feasible
            .iter()
            .copied()
            .max_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap().then(b.cmp(&a)))
            .unwrap();
        let (inner_p, _) = waterfill_power(q, state.mu, state.theta, chosen, link);
        let inner_rate = link.rate(chosen, inner_p);
        out_power = optimal_power(q, state.mu, state.theta, chosen, link);

        let rate_residual = link.rate_min - inner_rate;
        let power_residual = inner_p - link.power_max;
        if let Some(rows) = trace.as_mut() {
            rows.push(DualTraceRow {
                iteration: iter,
                mu: state.mu,
                theta: state.theta,
                subchannel: chosen,
                power: out_power,
                rate_residual,
                power_residual,
            });
        }

        let unchanged = matches!(
            last,
            Some((prev_sub, prev_p))
                if prev_sub == chosen
                    && (out_power - prev_p).abs() <= 1e-9 * out_power.abs().max(1.0)
        );
        streak = if unchanged { streak + 1 } else { 1 };
        last = Some((chosen, out_power));

        state = update_multipliers(&state, inner_rate, inner_p, link.rate_min, link.power_max);

        // Stop once the projected solution has stood still long enough and
        // active-price residuals have settled. While the rate floor binds,
        // the prices keep oscillating around their fixed point even though
        // the projected output is already pinned to the floor; a doubled
        // stability window ends those cases.
        let residual_ok = (state.mu <= 0.0 || rate_residual.abs() <= opts.residual_tol)
            && (state.theta <= 0.0 || power_residual.abs() <= opts.residual_tol);
        if (streak >= opts.stable_iterations && residual_ok) || streak >= 2 * opts.stable_iterations
        {
            break;
        }
    }

    let objective = link.objective(chosen, out_power, q);
    Ok(InnerSolution {
        subchannel: chosen,
        power: out_power,
        scores,
        objective,
        state,
        iterations: state.iteration,
        trace,
    })
}

/// A link wired into the ratio solver: the Dinkelbach parametric subproblem
/// is this module's inner solve.
pub struct LinkRatioProblem<'a> {
    pub link: &'a LinkProblem,
    pub dual: &'a DualOptions,
}

impl FractionalProblem for LinkRatioProblem<'_> {
    type Point = (usize, f64);

    fn numerator(&self, x: &(usize, f64)) -> f64 {
        self.link.numerator(x.0, x.1)
    }

    fn denominator(&self, x: &(usize, f64)) -> f64 {
        self.link.rate(x.0, x.1)
    }

    fn solve_parametric(&self, q: f64) -> Result<(usize, f64)> {
        let sol = solve_inner(q, self.link, self.dual)?;
        Ok((sol.subchannel, sol.power))
    }

    fn feasible_start(&self) -> Result<(usize, f64)> {
        let feasible = self.link.feasible_subchannels();
        let &i = feasible
            .first()
            .ok_or_else(|| self.link.infeasible_error())?;
        let floor = self.link.min_feasible_power(i);
        // A zero rate floor would start at zero rate; use the cap instead.
        let p = if floor > 0.0 {
            floor
        } else {
            self.link.power_max
        };
        Ok((i, p))
    }
}
