//! Reproducible network topologies and channel realizations.
//!
//! One realization fixes, for a cloud of `K` terminals and `N` subchannels
//! per band, the downlink gain of every (terminal, subchannel) pair and the
//! worst-peer gain of every candidate transmitter on every short-range
//! subchannel. Gains are linear power factors (path loss times fading) in a
//! normalized link budget where the noise variance is an O(1) number, so a
//! gain of 0.1 means an SNR of 0.1 per transmitted watt.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding;

const SALT_TOPOLOGY: u64 = 0x746f_706f;
const SALT_LR: u64 = 0x6c72_6368;
const SALT_SR: u64 = 0x7372_6368;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Scenario parameters. Distances in meters, frequencies in Hz.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    /// Number of terminals in the cloud (K ≥ 1).
    pub num_mts: usize,
    /// Subchannels per band (N ≥ 1). The downlink and intra-cloud bands are
    /// disjoint and each holds its own N subchannels.
    pub num_subchannels: usize,
    /// Distance from the base station to the center of the terminal square.
    pub bs_distance_m: f64,
    /// Side of the square the terminals are scattered over.
    pub cloud_side_m: f64,
    pub lr_center_freq_hz: f64,
    pub sr_center_freq_hz: f64,
    /// Log-distance path-loss exponents per band.
    pub lr_path_loss_exponent: f64,
    pub sr_path_loss_exponent: f64,
    /// Link-budget offsets (dB) folded into the path loss: antenna and
    /// amplifier gains plus the normalization that makes the receiver noise
    /// variance an O(1) number. The defaults put the mean downlink gain near
    /// 0.1 at 500 m and the mean intra-cloud gain near 13 at 25 m.
    pub lr_system_gain_db: f64,
    pub sr_system_gain_db: f64,
    /// Rician K-factor of the first tap, in dB.
    pub rician_k_factor_db: f64,
    /// Relative tap powers in dB; normalized so the mean fading power is 1.
    pub tap_powers_db: Vec<f64>,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_mts: 10,
            num_subchannels: 64,
            bs_distance_m: 500.0,
            cloud_side_m: 50.0,
            lr_center_freq_hz: 2.0e9,
            sr_center_freq_hz: 5.0e9,
            lr_path_loss_exponent: 3.5,
            sr_path_loss_exponent: 3.0,
            lr_system_gain_db: 122.9,
            sr_system_gain_db: 99.4,
            rician_k_factor_db: 3.0,
            tap_powers_db: vec![0.0, -5.0, -10.0],
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_mts < 1 {
            return Err(Error::InvalidConfig("need at least one terminal".into()));
        }
        if self.num_subchannels < 1 {
            return Err(Error::InvalidConfig("need at least one subchannel".into()));
        }
        for (name, v) in [
            ("bs_distance_m", self.bs_distance_m),
            ("cloud_side_m", self.cloud_side_m),
            ("lr_center_freq_hz", self.lr_center_freq_hz),
            ("sr_center_freq_hz", self.sr_center_freq_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.tap_powers_db.is_empty() {
            return Err(Error::InvalidConfig("need at least one fading tap".into()));
        }
        Ok(())
    }
}

/// Base-station and terminal coordinates, meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub bs: (f64, f64),
    pub mts: Vec<(f64, f64)>,
}

/// Place the base station `bs_distance_m` from the square's center and draw
/// the terminal positions uniformly inside the square. Deterministic per seed.
pub fn generate_topology(cfg: &ScenarioConfig) -> Result<Topology> {
    cfg.validate()?;
    let mut rng = seeding::stream(cfg.seed, SALT_TOPOLOGY);
    let center = cfg.cloud_side_m / 2.0;
    let bs = (center + cfg.bs_distance_m, center);
    let mts = (0..cfg.num_mts)
        .map(|_| {
            let x: f64 = rng.gen::<f64>() * cfg.cloud_side_m;
            let y: f64 = rng.gen::<f64>() * cfg.cloud_side_m;
            (x, y)
        })
        .collect();
    Ok(Topology { bs, mts })
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Free-space path loss at 1 m for carrier frequency `f`, in dB.
fn reference_loss_db(freq_hz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * freq_hz / SPEED_OF_LIGHT).log10()
}

/// Linear path gain of the log-distance model with the band's link-budget
/// offset applied. Distances below 1 m are clamped to the reference distance.
fn path_gain(d_m: f64, exponent: f64, freq_hz: f64, system_gain_db: f64) -> f64 {
    let d = d_m.max(1.0);
    let loss_db = reference_loss_db(freq_hz) + 10.0 * exponent * d.log10() - system_gain_db;
    10f64.powf(-loss_db / 10.0)
}

/// Multipath taps for one transmitter-receiver pair: the first tap carries a
/// Rician line-of-sight component, the rest are Rayleigh. Normalized so the
/// expected total power is 1.
struct TapSet {
    taps: Vec<(f64, f64)>,
}

fn draw_taps(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> TapSet {
    let linear: Vec<f64> = cfg
        .tap_powers_db
        .iter()
        .map(|db| 10f64.powf(db / 10.0))
        .collect();
    let total: f64 = linear.iter().sum();
    let k_lin = 10f64.powf(cfg.rician_k_factor_db / 10.0);

    let mut taps = Vec::with_capacity(linear.len());
    for (t, &p_raw) in linear.iter().enumerate() {
        let p = p_raw / total;
        if t == 0 {
            let los_amp = (p * k_lin / (1.0 + k_lin)).sqrt();
            let scatter_var = p / (1.0 + k_lin);
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            let s = (scatter_var / 2.0).sqrt();
            let re: f64 = rng.sample::<f64, _>(StandardNormal) * s;
            let im: f64 = rng.sample::<f64, _>(StandardNormal) * s;
            taps.push((los_amp * phase.cos() + re, los_amp * phase.sin() + im));
        } else {
            let s = (p / 2.0).sqrt();
            let re: f64 = rng.sample::<f64, _>(StandardNormal) * s;
            let im: f64 = rng.sample::<f64, _>(StandardNormal) * s;
            taps.push((re, im));
        }
    }
    TapSet { taps }
}

impl TapSet {
    /// Power of the frequency response on subchannel `i` of `n` subchannels:
    /// |Σ_t c_t e^{-j2πit/n}|². Unit mean by construction.
    fn subchannel_power(&self, i: usize, n: usize) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (t, c) in self.taps.iter().enumerate() {
            let phi = -std::f64::consts::TAU * (i as f64) * (t as f64) / (n as f64);
            let (s, co) = phi.sin_cos();
            re += c.0 * co - c.1 * s;
            im += c.0 * s + c.1 * co;
        }
        (re * re + im * im).max(f64::MIN_POSITIVE)
    }
}

/// Downlink gain matrix: `lr_gain[k][i]` is path loss times fading from the
/// base station to terminal `k` on subchannel `i`. Flat within one segment.
pub fn draw_lr_channel(cfg: &ScenarioConfig, topology: &Topology) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let n = cfg.num_subchannels;
    let mut rng = seeding::stream(cfg.seed, SALT_LR);
    let mut gains = Vec::with_capacity(topology.mts.len());
    for &mt in &topology.mts {
        let pl = path_gain(
            distance(topology.bs, mt),
            cfg.lr_path_loss_exponent,
            cfg.lr_center_freq_hz,
            cfg.lr_system_gain_db,
        );
        let taps = draw_taps(cfg, &mut rng);
        gains.push((0..n).map(|i| pl * taps.subchannel_power(i, n)).collect());
    }
    Ok(gains)
}

/// Full per-peer gain map: `map[k][peer_position][subchannel]`, peers in
/// ascending index with `k` itself skipped.
pub type PeerGainMap = Vec<Vec<Vec<f64>>>;

/// Worst-peer gain matrix and, for inspection, the full per-peer map.
///
/// `worst[k][j]` is the minimum over peers `n != k` of the k→n gain on
/// short-range subchannel `j`; `per_peer[k]` holds one row per peer in
/// ascending peer index. Empty for a single-terminal cloud.
pub fn draw_sr_channel_detailed(
    cfg: &ScenarioConfig,
    topology: &Topology,
) -> Result<(Vec<Vec<f64>>, PeerGainMap)> {
    cfg.validate()?;
    let k_total = topology.mts.len();
    if k_total < 2 {
        return Ok((Vec::new(), Vec::new()));
    }
    let n = cfg.num_subchannels;
    let mut rng = seeding::stream(cfg.seed, SALT_SR);
    let mut worst = Vec::with_capacity(k_total);
    let mut per_peer = Vec::with_capacity(k_total);
    for k in 0..k_total {
        let mut rows = Vec::with_capacity(k_total - 1);
        for peer in (0..k_total).filter(|&p| p != k) {
            let pl = path_gain(
                distance(topology.mts[k], topology.mts[peer]),
                cfg.sr_path_loss_exponent,
                cfg.sr_center_freq_hz,
                cfg.sr_system_gain_db,
            );
            let taps = draw_taps(cfg, &mut rng);
            rows.push(
                (0..n)
                    .map(|j| pl * taps.subchannel_power(j, n))
                    .collect::<Vec<_>>(),
            );
        }
        let worst_row = (0..n)
            .map(|j| rows.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min))
            .collect();
        worst.push(worst_row);
        per_peer.push(rows);
    }
    Ok((worst, per_peer))
}

/// Worst-peer gain matrix only. Empty when the cloud has a single terminal,
/// which downstream modules treat as "no short-range phase".
pub fn draw_sr_channel(cfg: &ScenarioConfig, topology: &Topology) -> Result<Vec<Vec<f64>>> {
    Ok(draw_sr_channel_detailed(cfg, topology)?.0)
}

/// One drawn network: downlink gains (which double as the harvest gains of
/// the non-scheduled terminals) and worst-peer intra-cloud gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRealization {
    lr_gain: Vec<Vec<f64>>,
    sr_worst_gain: Vec<Vec<f64>>,
}

impl ScenarioRealization {
    /// Draw a full realization from a config: topology, downlink and
    /// intra-cloud channels. Bit-exactly reproducible from the seed.
    pub fn draw(cfg: &ScenarioConfig) -> Result<Self> {
        let topology = generate_topology(cfg)?;
        let lr_gain = draw_lr_channel(cfg, &topology)?;
        let sr_worst_gain = draw_sr_channel(cfg, &topology)?;
        Self::from_gains(lr_gain, sr_worst_gain)
    }

    /// Build a realization from explicit gain matrices (used by tests and by
    /// hand-constructed instances). Validates shapes and positivity.
    pub fn from_gains(lr_gain: Vec<Vec<f64>>, sr_worst_gain: Vec<Vec<f64>>) -> Result<Self> {
        if lr_gain.is_empty() {
            return Err(Error::InvalidConfig("downlink gain matrix is empty".into()));
        }
        let n = lr_gain[0].len();
        if n == 0 {
            return Err(Error::InvalidConfig("no subchannels in gain matrix".into()));
        }
        let k = lr_gain.len();
        if !sr_worst_gain.is_empty() && (sr_worst_gain.len() != k || k < 2) {
            return Err(Error::InvalidConfig(
                "worst-peer matrix must have one row per terminal and needs K >= 2".into(),
            ));
        }
        for row in lr_gain.iter().chain(sr_worst_gain.iter()) {
            if row.len() != n {
                return Err(Error::InvalidConfig("ragged gain matrix".into()));
            }
            if row.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
                return Err(Error::InvalidConfig(
                    "gains must be positive and finite".into(),
                ));
            }
        }
        Ok(Self {
            lr_gain,
            sr_worst_gain,
        })
    }

    pub fn num_mts(&self) -> usize {
        self.lr_gain.len()
    }

    pub fn num_subchannels(&self) -> usize {
        self.lr_gain[0].len()
    }

    /// True when the cloud has at least one peer to forward to.
    pub fn has_sr_phase(&self) -> bool {
        !self.sr_worst_gain.is_empty()
    }

    /// Downlink gain of terminal `k` on subchannel `i`.
    pub fn lr_gain(&self, k: usize, i: usize) -> f64 {
        self.lr_gain[k][i]
    }

    /// Harvest gain of non-scheduled terminal `n` on downlink subchannel `i`.
    /// A harvester recovers energy on the same channel the scheduled terminal
    /// receives on, so this is the downlink gain itself.
    pub fn harvest_gain(&self, n: usize, i: usize) -> f64 {
        self.lr_gain[n][i]
    }

    /// Worst-peer gain of candidate transmitter `k` on short-range
    /// subchannel `j`.
    pub fn sr_worst_gain(&self, k: usize, j: usize) -> f64 {
        self.sr_worst_gain[k][j]
    }

    pub fn lr_gain_matrix(&self) -> &[Vec<f64>] {
        &self.lr_gain
    }

    pub fn sr_worst_gain_matrix(&self) -> &[Vec<f64>] {
        &self.sr_worst_gain
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_is_deterministic_per_seed() {
        let cfg = ScenarioConfig {
            num_mts: 1,
            seed: 7,
            ..ScenarioConfig::default()
        };
        let a = generate_topology(&cfg).unwrap();
        let b = generate_topology(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mts.len(), 1);
        let (x, y) = a.mts[0];
        assert!(x >= 0.0 && x <= cfg.cloud_side_m && y >= 0.0 && y <= cfg.cloud_side_m);
    }

    #[test]
    fn zero_terminals_rejected() {
        let cfg = ScenarioConfig {
            num_mts: 0,
            ..ScenarioConfig::default()
        };
        assert!(generate_topology(&cfg).is_err());
    }

    #[test]
    fn different_seeds_differ() {
        let base = ScenarioConfig {
            num_mts: 10,
            ..ScenarioConfig::default()
        };
        let a = generate_topology(&ScenarioConfig {
            seed: 1,
            ..base.clone()
        })
        .unwrap();
        let b = generate_topology(&ScenarioConfig { seed: 2, ..base }).unwrap();
        assert_ne!(a.mts, b.mts);
    }

    #[test]
    fn lr_channel_deterministic_and_positive() {
        let cfg = ScenarioConfig {
            num_mts: 4,
            num_subchannels: 8,
            seed: 11,
            ..ScenarioConfig::default()
        };
        let topo = generate_topology(&cfg).unwrap();
        let a = draw_lr_channel(&cfg, &topo).unwrap();
        let b = draw_lr_channel(&cfg, &topo).unwrap();
        assert_eq!(a, b);
        for row in &a {
            for &g in row {
                assert!(g > 0.0 && g.is_finite());
            }
        }
    }

    /// Monte-Carlo estimate of the fading distribution's mean power: the
    /// per-subchannel fading factor is normalized to unit mean.
    #[test]
    fn fading_power_is_unit_mean() {
        let cfg = ScenarioConfig::default();
        let mut rng = seeding::stream(999, 0xfade);
        let n = 8;
        let mut sum = 0.0;
        let mut count = 0usize;
        // 25_000 independent tap sets, 8 correlated subchannels each.
        for _ in 0..25_000 {
            let taps = draw_taps(&cfg, &mut rng);
            for i in 0..n {
                sum += taps.subchannel_power(i, n);
                count += 1;
            }
        }
        let mean = sum / count as f64;
        assert!(
            (mean - 1.0).abs() < 0.02,
            "fading mean power {mean} deviates more than 2% from 1"
        );
    }

    #[test]
    fn doubling_bs_distance_shrinks_every_gain() {
        let near = ScenarioConfig {
            num_mts: 5,
            num_subchannels: 4,
            seed: 3,
            ..ScenarioConfig::default()
        };
        let far = ScenarioConfig {
            bs_distance_m: near.bs_distance_m * 2.0,
            ..near.clone()
        };
        let topo_near = generate_topology(&near).unwrap();
        let topo_far = generate_topology(&far).unwrap();
        // Terminal positions only depend on the seed and square side.
        assert_eq!(topo_near.mts, topo_far.mts);
        let g_near = draw_lr_channel(&near, &topo_near).unwrap();
        let g_far = draw_lr_channel(&far, &topo_far).unwrap();
        for (rn, rf) in g_near.iter().zip(&g_far) {
            for (a, b) in rn.iter().zip(rf) {
                assert!(b < a);
            }
        }
    }

    #[test]
    fn single_terminal_has_no_sr_matrix() {
        let cfg = ScenarioConfig {
            num_mts: 1,
            num_subchannels: 4,
            ..ScenarioConfig::default()
        };
        let topo = generate_topology(&cfg).unwrap();
        assert!(draw_sr_channel(&cfg, &topo).unwrap().is_empty());
        let real = ScenarioRealization::draw(&cfg).unwrap();
        assert!(!real.has_sr_phase());
    }

    #[test]
    fn two_terminals_worst_gain_is_the_single_peer() {
        let cfg = ScenarioConfig {
            num_mts: 2,
            num_subchannels: 4,
            seed: 5,
            ..ScenarioConfig::default()
        };
        let topo = generate_topology(&cfg).unwrap();
        let (worst, per_peer) = draw_sr_channel_detailed(&cfg, &topo).unwrap();
        for k in 0..2 {
            assert_eq!(per_peer[k].len(), 1);
            assert_eq!(worst[k], per_peer[k][0]);
        }
    }

    /// Fixed positions with one far-off peer: the worst gain of every
    /// candidate matches a direct min over its peers, and the far peer
    /// drags the worst gain down for both near candidates.
    #[test]
    fn worst_peer_tracks_direct_min() {
        let cfg = ScenarioConfig {
            num_mts: 3,
            num_subchannels: 4,
            seed: 17,
            ..ScenarioConfig::default()
        };
        let topo = Topology {
            bs: (525.0, 25.0),
            mts: vec![(0.0, 0.0), (3.0, 0.0), (2000.0, 2000.0)],
        };
        let (worst, per_peer) = draw_sr_channel_detailed(&cfg, &topo).unwrap();
        for k in 0..3 {
            for j in 0..cfg.num_subchannels {
                let direct = per_peer[k]
                    .iter()
                    .map(|row| row[j])
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(worst[k][j], direct);
                for row in &per_peer[k] {
                    assert!(worst[k][j] <= row[j]);
                }
            }
        }
        // For the two clustered terminals the far peer is the bottleneck on
        // the strong majority of subchannels (fading can reorder a draw, the
        // 2000 m path loss cannot be beaten by it here).
        for k in 0..2 {
            let far_row = per_peer[k].last().unwrap();
            for j in 0..cfg.num_subchannels {
                assert_eq!(worst[k][j], far_row[j]);
            }
        }
    }

    #[test]
    fn sr_channel_deterministic() {
        let cfg = ScenarioConfig {
            num_mts: 4,
            num_subchannels: 6,
            seed: 23,
            ..ScenarioConfig::default()
        };
        let topo = generate_topology(&cfg).unwrap();
        assert_eq!(
            draw_sr_channel(&cfg, &topo).unwrap(),
            draw_sr_channel(&cfg, &topo).unwrap()
        );
    }

    #[test]
    fn full_realization_reproducible() {
        let cfg = ScenarioConfig {
            num_mts: 6,
            num_subchannels: 16,
            seed: 31,
            ..ScenarioConfig::default()
        };
        let a = ScenarioRealization::draw(&cfg).unwrap();
        let b = ScenarioRealization::draw(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_mts(), 6);
        assert_eq!(a.num_subchannels(), 16);
        // Harvest gains alias the downlink gains.
        assert_eq!(a.harvest_gain(3, 5), a.lr_gain(3, 5));
    }

    #[test]
    fn default_link_budget_lands_near_design_targets() {
        // Mean downlink gain near 0.1 at 500 m, mean intra-cloud gain near 13
        // at 25 m (fading averages to 1, so the path gain sets the scale).
        let lr = path_gain(500.0, 3.5, 2.0e9, 122.9);
        assert!((0.05..0.2).contains(&lr), "lr path gain {lr}");
        let sr = path_gain(25.0, 3.0, 5.0e9, 99.4);
        assert!((5.0..30.0).contains(&sr), "sr path gain {sr}");
    }
}
