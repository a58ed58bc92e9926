//! Rate and energy formulas for one data-segment transmission, and the two
//! energy-consumption-ratio metrics used by the experiment harness.
//!
//! Unit convention: subchannel bandwidth is normalized to 1, so a spectral
//! efficiency in bps/Hz doubles as a bit rate and transmitting `s_t` bits
//! takes `s_t / rate` seconds. All powers are watts in the same normalized
//! system in which the noise variance is expressed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Link, Result};
use crate::scenario::ScenarioRealization;
use crate::scheduler::AllocationDecision;

/// How the short-range phase's circuit power is counted when the optimizer
/// forms its per-candidate cost.
///
/// `PerPeer` charges every listening peer its own receive chain plus every
/// terminal's baseband: `(K-1)·P_rx + K·P_E`. That is also what summing the
/// per-terminal energy formulas yields, so it is the default.
/// `FixedPair` is a compatibility variant charging a flat `P_rx + 2·P_E`
/// regardless of cloud size; it only affects the optimizer's metric, never
/// the bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SrCircuitModel {
    #[default]
    PerPeer,
    FixedPair,
}

impl SrCircuitModel {
    /// Constant power block of the short-range phase for a cloud of `k` terminals.
    pub fn circuit_power(self, num_mts: usize, p_rx: f64, p_e: f64) -> f64 {
        match self {
            SrCircuitModel::PerPeer => (num_mts as f64 - 1.0) * p_rx + num_mts as f64 * p_e,
            SrCircuitModel::FixedPair => p_rx + 2.0 * p_e,
        }
    }
}

/// Fixed circuit and RF constants of the terminals and the base station.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerConstants {
    /// RF receive power of a terminal, identical on both links (watts).
    pub p_rx: f64,
    /// Terminal baseband circuit power (watts).
    pub p_e: f64,
    /// Base-station baseband operating power (watts).
    pub p_b: f64,
    /// Per-terminal RF-to-DC conversion efficiency, each in (0, 1].
    pub theta: Vec<f64>,
    /// Noise variance at every receiver (watts).
    pub noise_var: f64,
    /// Master switch for the harvesting path. When false, harvested energy is
    /// zero everywhere and the optimizer ignores the harvest rebate; the
    /// `theta` values are kept so paired on/off experiments share one config.
    pub harvest_enabled: bool,
}

impl PowerConstants {
    pub fn new(p_rx: f64, p_e: f64, p_b: f64, theta: Vec<f64>, noise_var: f64) -> Result<Self> {
        let c = Self {
            p_rx,
            p_e,
            p_b,
            theta,
            noise_var,
            harvest_enabled: true,
        };
        c.validate()?;
        Ok(c)
    }

    /// Uniform conversion efficiency across `num_mts` terminals.
    pub fn uniform(
        p_rx: f64,
        p_e: f64,
        p_b: f64,
        theta: f64,
        num_mts: usize,
        noise_var: f64,
    ) -> Result<Self> {
        Self::new(p_rx, p_e, p_b, vec![theta; num_mts], noise_var)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_rx >= 0.0 && self.p_e >= 0.0 && self.p_b >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "circuit powers must be nonnegative (p_rx={}, p_e={}, p_b={})",
                self.p_rx, self.p_e, self.p_b
            )));
        }
        if !(self.noise_var > 0.0 && self.noise_var.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise variance must be positive and finite, got {}",
                self.noise_var
            )));
        }
        for (k, &t) in self.theta.iter().enumerate() {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "conversion efficiency of terminal {k} must lie in (0, 1], got {t}"
                )));
            }
        }
        Ok(())
    }

    /// Conversion efficiency seen by the energy model for terminal `n`:
    /// zero when harvesting is switched off.
    pub fn effective_theta(&self, n: usize) -> f64 {
        if self.harvest_enabled {
            self.theta[n]
        } else {
            0.0
        }
    }

    /// Copy with the harvesting path disabled.
    pub fn without_harvest(&self) -> Self {
        Self {
            harvest_enabled: false,
            ..self.clone()
        }
    }

    /// Constant power block of the long-range ratio's numerator:
    /// base-station baseband plus the receiving terminal's chain.
    pub fn lr_circuit_power(&self) -> f64 {
        self.p_b + self.p_rx + self.p_e
    }
}

impl Default for PowerConstants {
    fn default() -> Self {
        Self {
            p_rx: 0.1,
            p_e: 0.1,
            p_b: 1.0,
            theta: vec![0.5],
            noise_var: 1.0,
            harvest_enabled: true,
        }
    }
}

/// One data segment and the rate/power limits governing its delivery.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentSpec {
    /// Segment size in bits (with unit bandwidth, seconds = s_t / rate).
    pub s_t: f64,
    /// Minimum long-range rate (bps/Hz).
    pub r_l_min: f64,
    /// Minimum short-range rate (bps/Hz).
    pub r_s_min: f64,
    /// Base-station transmit power cap (watts).
    pub p_s_max: f64,
    /// Terminal transmit power cap (watts).
    pub p_k_max: f64,
}

impl SegmentSpec {
    pub fn new(s_t: f64, r_l_min: f64, r_s_min: f64, p_s_max: f64, p_k_max: f64) -> Result<Self> {
        let s = Self {
            s_t,
            r_l_min,
            r_s_min,
            p_s_max,
            p_k_max,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s_t > 0.0 && self.s_t.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "segment size must be positive, got {}",
                self.s_t
            )));
        }
        if !(self.r_l_min >= 0.0 && self.r_s_min >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "rate thresholds must be nonnegative (r_l_min={}, r_s_min={})",
                self.r_l_min, self.r_s_min
            )));
        }
        if !(self.p_s_max > 0.0 && self.p_k_max > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "power caps must be positive (p_s_max={}, p_k_max={})",
                self.p_s_max, self.p_k_max
            )));
        }
        Ok(())
    }
}

/// Per-term energies of one decision, all in joules.
///
/// `net` may be negative when the harvested energy exceeds consumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// Base-station transmit energy.
    pub e_bs_tx: f64,
    /// Scheduled terminal's long-range receive energy.
    pub e_imt_lr_rx: f64,
    /// Scheduled terminal's short-range multicast transmit energy.
    pub e_imt_sr_tx: f64,
    /// Sum of the listening peers' short-range receive energies.
    pub e_emt_sr_rx_total: f64,
    /// Total energy harvested by the non-scheduled terminals.
    pub q_harvest_total: f64,
    /// e_bs_tx + e_imt_lr_rx + e_imt_sr_tx + e_emt_sr_rx_total - q_harvest_total.
    pub net: f64,
}

impl EnergyBreakdown {
    /// Terminal-side consumption net of harvest (excludes the base station).
    pub fn mt_net(&self) -> f64 {
        self.e_imt_lr_rx + self.e_imt_sr_tx + self.e_emt_sr_rx_total - self.q_harvest_total
    }
}

/// Spectral efficiency of a point-to-point link: log2(1 + p·g/σ²).
pub fn lr_rate(p_tx: f64, gain: f64, noise_var: f64) -> f64 {
    debug_assert!(p_tx >= 0.0 && gain > 0.0 && noise_var > 0.0);
    (1.0 + p_tx * gain / noise_var).log2()
}

/// Multicast rate of the intra-cloud link, governed by the worst peer's gain.
/// Same formula as [`lr_rate`]; kept separate so call sites name their link.
pub fn sr_rate(p_tx: f64, worst_gain: f64, noise_var: f64) -> f64 {
    lr_rate(p_tx, worst_gain, noise_var)
}

/// Power recovered by a harvesting terminal: θ·p·g.
pub fn harvested_power(theta: f64, p_tx: f64, gain: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&theta) && p_tx >= 0.0 && gain > 0.0);
    theta * p_tx * gain
}

fn duration_energy(power_sum: f64, s_t: f64, rate: f64, link: Link) -> Result<f64> {
    if rate <= 0.0 {
        return Err(Error::InfeasibleLink {
            link,
            constraint: "rate is zero, reception would never finish".into(),
        });
    }
    Ok(power_sum * s_t / rate)
}

/// Energy to receive `s_t` bits: (p_rx + p_e)·s_t / rate.
pub fn receive_energy(p_rx: f64, p_e: f64, s_t: f64, rate: f64) -> Result<f64> {
    duration_energy(p_rx + p_e, s_t, rate, Link::LongRange)
}

/// Energy the scheduled terminal spends multicasting: (p_tx + p_e)·s_t / rate.
pub fn sr_tx_energy(p_s_tx: f64, p_e: f64, s_t: f64, rate: f64) -> Result<f64> {
    duration_energy(p_s_tx + p_e, s_t, rate, Link::ShortRange)
}

/// Base-station transmit energy: (p_tx + p_b)·s_t / rate.
pub fn bs_energy(p_l_tx: f64, p_b: f64, s_t: f64, rate: f64) -> Result<f64> {
    duration_energy(p_l_tx + p_b, s_t, rate, Link::LongRange)
}

/// Evaluate the full energy bookkeeping of one allocation decision.
///
/// The harvest term sums θ_n·P^L·g_n over every non-scheduled terminal `n`
/// on the downlink subchannel, times the downlink reception duration.
/// A single-terminal cloud has no short-range phase and no harvesters.
pub fn evaluate_decision(
    realization: &ScenarioRealization,
    constants: &PowerConstants,
    segment: &SegmentSpec,
    decision: &AllocationDecision,
) -> Result<EnergyBreakdown> {
    let k = decision.imt;
    let num_mts = realization.num_mts();
    if k >= num_mts {
        return Err(Error::InvalidConfig(format!(
            "scheduled terminal index {k} out of range for {num_mts} terminals"
        )));
    }
    if constants.theta.len() != num_mts {
        return Err(Error::InvalidConfig(format!(
            "got {} conversion efficiencies for {} terminals",
            constants.theta.len(),
            num_mts
        )));
    }

    let lr_gain = realization.lr_gain(k, decision.lr_subchannel);
    let r_l = lr_rate(decision.lr_power, lr_gain, constants.noise_var);
    let e_bs_tx = bs_energy(decision.lr_power, constants.p_b, segment.s_t, r_l)?;
    let e_imt_lr_rx = receive_energy(constants.p_rx, constants.p_e, segment.s_t, r_l)?;

    let lr_duration = segment.s_t / r_l;
    let mut q_harvest_total = 0.0;
    for n in (0..num_mts).filter(|&n| n != k) {
        let g = realization.harvest_gain(n, decision.lr_subchannel);
        q_harvest_total +=
            harvested_power(constants.effective_theta(n), decision.lr_power, g) * lr_duration;
    }

    let (e_imt_sr_tx, e_emt_sr_rx_total) = match &decision.sr {
        Some(sr) => {
            let worst = realization.sr_worst_gain(k, sr.subchannel);
            let r_s = sr_rate(sr.power, worst, constants.noise_var);
            let tx = sr_tx_energy(sr.power, constants.p_e, segment.s_t, r_s)?;
            let rx_each = duration_energy(
                constants.p_rx + constants.p_e,
                segment.s_t,
                r_s,
                Link::ShortRange,
            )?;
            (tx, rx_each * (num_mts as f64 - 1.0))
        }
        None => (0.0, 0.0),
    };

    let net = e_bs_tx + e_imt_lr_rx + e_imt_sr_tx + e_emt_sr_rx_total - q_harvest_total;
    Ok(EnergyBreakdown {
        e_bs_tx,
        e_imt_lr_rx,
        e_imt_sr_tx,
        e_emt_sr_rx_total,
        q_harvest_total,
        net,
    })
}

/// Terminal-side energy-consumption ratio in percent: the cloud's terminal
/// energy net of harvest over the energy all terminals would spend receiving
/// the same content from a conventional multicast.
pub fn ec_ratio_mt(breakdown: &EnergyBreakdown, baseline_mt_rx_total: f64) -> Result<f64> {
    if baseline_mt_rx_total <= 0.0 || baseline_mt_rx_total.is_nan() {
        return Err(Error::ZeroBaseline(baseline_mt_rx_total));
    }
    Ok(breakdown.mt_net() / baseline_mt_rx_total * 100.0)
}

/// System-wide energy-consumption ratio in percent: terminal and base-station
/// energy on both sides of the division.
pub fn ec_ratio_system(
    breakdown: &EnergyBreakdown,
    baseline_mt_rx_total: f64,
    baseline_bs_tx: f64,
) -> Result<f64> {
    let denom = baseline_mt_rx_total + baseline_bs_tx;
    if denom <= 0.0 || denom.is_nan() {
        return Err(Error::ZeroBaseline(denom));
    }
    Ok((breakdown.mt_net() + breakdown.e_bs_tx) / denom * 100.0)
}
