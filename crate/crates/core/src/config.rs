//! Simulation configuration and sweep campaigns.
//!
//! A [`SimConfig`] is the single source of truth for one run. It is read from
//! a flat JSON document; absent keys take the highway defaults below. A
//! [`CampaignSpec`] wraps a base config with sweep axes and a seed list and
//! expands into an ordered list of [`RunSpec`]s.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::phy;

/// Receiver-sensitivity shifts that have a BLER table variant.
pub const ALLOWED_DELTAS_DB: [f64; 4] = [0.0, 3.0, 5.0, 7.0];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed config document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("{field} {reason}")]
    OutOfRange { field: &'static str, reason: String },
    #[error("undefined PRB entry for {bandwidth_mhz} MHz at mu={mu}")]
    UndefinedPrb { bandwidth_mhz: f64, mu: u8 },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid override `{0}`: expected key=value")]
    BadOverride(String),
    #[error("sweep list `{0}` is empty")]
    EmptySweep(&'static str),
    #[error("invalid retransmission scheme `{0}` (expected none, equal or nonequal:<n>)")]
    BadRetx(String),
}

fn out_of_range(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::OutOfRange {
        field,
        reason: reason.into(),
    }
}

/// Blind retransmission resource split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RetxScheme {
    /// Single transmission per period.
    None,
    /// Transmission and retransmission each get half of the period.
    Equal,
    /// First window spans `50 + 10n` ms, second `50 - 10n` ms of 100 ms.
    Nonequal(u8),
}

impl RetxScheme {
    /// Load multiplier applied to the per-second capacity.
    pub fn retx_factor(self) -> u32 {
        match self {
            RetxScheme::None => 1,
            RetxScheme::Equal | RetxScheme::Nonequal(_) => 2,
        }
    }

    /// Fraction of the transmission period given to each phase.
    pub fn phase_shares(self) -> Vec<f64> {
        match self {
            RetxScheme::None => vec![1.0],
            RetxScheme::Equal => vec![0.5, 0.5],
            RetxScheme::Nonequal(n) => {
                let n = f64::from(n);
                vec![(50.0 + 10.0 * n) / 100.0, (50.0 - 10.0 * n) / 100.0]
            }
        }
    }
}

impl fmt::Display for RetxScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RetxScheme::None => f.write_str("none"),
            RetxScheme::Equal => f.write_str("equal"),
            RetxScheme::Nonequal(n) => write!(f, "nonequal:{n}"),
        }
    }
}

impl FromStr for RetxScheme {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::BadRetx(s.to_string());
        match s.trim() {
            "none" => Ok(RetxScheme::None),
            "equal" => Ok(RetxScheme::Equal),
            other => {
                let n = other
                    .strip_prefix("nonequal:")
                    .or_else(|| other.strip_prefix("nonequal"))
                    .ok_or_else(bad)?;
                n.trim().parse::<u8>().map(RetxScheme::Nonequal).map_err(|_| bad())
            }
        }
    }
}

impl TryFrom<String> for RetxScheme {
    type Error = ConfigError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RetxScheme> for String {
    fn from(r: RetxScheme) -> String {
        r.to_string()
    }
}

/// How the two SINRs of an equal-split retransmission are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SinrCombining {
    /// Mean of the linear powers, converted back to dB.
    #[default]
    Linear,
    /// Arithmetic mean of the dB values.
    Db,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub highway_length_m: f64,
    pub lanes_per_direction: u32,
    pub lane_width_m: f64,
    pub isd_m: f64,
    pub num_gnb: u32,
    pub gnb_height_m: f64,
    pub ue_height_m: f64,
    pub carrier_freq_ghz: f64,
    pub bandwidth_mhz: f64,
    pub mu: u8,
    pub tf_hz: f64,
    pub packet_size_bytes: u32,
    pub ivd_m: f64,
    pub tx_power_dbm: f64,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub noise_density_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub comm_range_m: f64,
    pub shadowing_sigma_db: f64,
    pub retx_scheme: RetxScheme,
    pub l2sm_delta_db: f64,
    pub max_mcs_efficiency: f64,
    /// Pathloss distance floor.
    pub min_distance_m: f64,
    pub sinr_combining: SinrCombining,
    pub seed: u64,
    pub drops: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            highway_length_m: 5196.0,
            lanes_per_direction: 3,
            lane_width_m: 4.0,
            isd_m: 1732.0,
            num_gnb: 3,
            gnb_height_m: 35.0,
            ue_height_m: 1.5,
            carrier_freq_ghz: 5.9,
            bandwidth_mhz: 10.0,
            mu: 0,
            tf_hz: 10.0,
            packet_size_bytes: 300,
            ivd_m: 20.0,
            tx_power_dbm: 24.0,
            tx_gain_db: 0.0,
            rx_gain_db: 3.0,
            noise_density_dbm_hz: -174.0,
            noise_figure_db: 9.0,
            comm_range_m: 500.0,
            shadowing_sigma_db: 3.0,
            retx_scheme: RetxScheme::None,
            l2sm_delta_db: 0.0,
            max_mcs_efficiency: 5.5547,
            min_distance_m: 10.0,
            sinr_combining: SinrCombining::Linear,
            seed: 1,
            drops: 1,
        }
    }
}

impl SimConfig {
    /// Total lane count on both carriageways.
    pub fn lanes(&self) -> u32 {
        self.lanes_per_direction * 2
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(out_of_range(field, format!("must be positive (got {v})")))
            }
        };
        let non_negative = |field: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(out_of_range(field, format!("must be non-negative (got {v})")))
            }
        };
        let finite = |field: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(out_of_range(field, "must be finite"))
            }
        };

        positive("highway_length_m", self.highway_length_m)?;
        positive("lane_width_m", self.lane_width_m)?;
        positive("isd_m", self.isd_m)?;
        positive("ivd_m", self.ivd_m)?;
        positive("carrier_freq_ghz", self.carrier_freq_ghz)?;
        positive("bandwidth_mhz", self.bandwidth_mhz)?;
        positive("tf_hz", self.tf_hz)?;
        positive("max_mcs_efficiency", self.max_mcs_efficiency)?;
        positive("min_distance_m", self.min_distance_m)?;
        non_negative("comm_range_m", self.comm_range_m)?;
        non_negative("shadowing_sigma_db", self.shadowing_sigma_db)?;
        finite("tx_power_dbm", self.tx_power_dbm)?;
        finite("tx_gain_db", self.tx_gain_db)?;
        finite("rx_gain_db", self.rx_gain_db)?;
        finite("noise_density_dbm_hz", self.noise_density_dbm_hz)?;
        finite("noise_figure_db", self.noise_figure_db)?;

        if self.lanes_per_direction < 1 {
            return Err(out_of_range("lanes_per_direction", "must be at least 1"));
        }
        if self.num_gnb < 1 {
            return Err(out_of_range("num_gnb", "must be at least 1"));
        }
        if self.packet_size_bytes < 1 {
            return Err(out_of_range("packet_size_bytes", "must be at least 1"));
        }
        if self.drops < 1 {
            return Err(out_of_range("drops", "must be at least 1"));
        }
        for (field, h) in [("ue_height_m", self.ue_height_m), ("gnb_height_m", self.gnb_height_m)] {
            if !(h.is_finite() && h > 1.0) {
                return Err(out_of_range(field, format!("must exceed 1 m (got {h})")));
            }
        }
        if self.mu > 2 {
            return Err(out_of_range(
                "mu",
                format!("out of FR1 sidelink range (got {}, allowed 0..=2)", self.mu),
            ));
        }
        if phy::prb_count(self.bandwidth_mhz, self.mu).is_err() {
            return Err(ConfigError::UndefinedPrb {
                bandwidth_mhz: self.bandwidth_mhz,
                mu: self.mu,
            });
        }
        if !ALLOWED_DELTAS_DB.contains(&self.l2sm_delta_db) {
            return Err(out_of_range(
                "l2sm_delta_db",
                format!("must be one of 0, 3, 5, 7 (got {})", self.l2sm_delta_db),
            ));
        }
        if let RetxScheme::Nonequal(n) = self.retx_scheme {
            if !(1..=4).contains(&n) {
                return Err(out_of_range(
                    "retx_scheme",
                    format!("nonequal split n must be in 1..=4 (got {n})"),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("SimConfig serializes")
    }

    /// Applies a `key=value` override. The value is parsed as JSON when it
    /// can be, otherwise taken as a bare string (`retx_scheme=equal`).
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::BadOverride(assignment.to_string()))?;
        let key = key.trim();
        let raw = raw.trim();
        let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.into()));

        let mut doc = serde_json::to_value(&*self)?;
        let map = doc.as_object_mut().expect("SimConfig is a JSON object");
        if !map.contains_key(key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        map.insert(key.to_string(), value);
        let updated: SimConfig = serde_json::from_value(doc)?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }

    /// Stable 64-bit digest of every field except the seed.
    pub fn fingerprint(&self) -> u64 {
        let mut canonical = self.clone();
        canonical.seed = 0;
        let text = serde_json::to_string(&canonical).expect("SimConfig serializes");
        fnv1a(text.as_bytes())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}

/// Parses a JSON config document, filling absent keys with defaults.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let cfg: SimConfig = if text.trim().is_empty() {
        SimConfig::default()
    } else {
        serde_json::from_str(text)?
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Base config plus sweep axes. Absent axes default to the base value;
/// absent `seeds` defaults to the base seed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignSpec {
    pub base: SimConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_ivd_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_mu: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_tf_hz: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_retx: Option<Vec<RetxScheme>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_delta_db: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

/// One fully resolved run of a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    /// Index of the sweep point (seeds of one point share it).
    pub point: usize,
    pub cfg: SimConfig,
    pub seed: u64,
}

fn axis<T: Clone>(name: &'static str, list: &Option<Vec<T>>, base: T) -> Result<Vec<T>, ConfigError> {
    match list {
        None => Ok(vec![base]),
        Some(v) if v.is_empty() => Err(ConfigError::EmptySweep(name)),
        Some(v) => Ok(v.clone()),
    }
}

impl CampaignSpec {
    pub fn single(base: SimConfig) -> Self {
        Self {
            base,
            ..Self::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let spec: CampaignSpec = serde_json::from_str(text)?;
        spec.base.validate()?;
        Ok(spec)
    }

    /// Expands the cartesian product in the order ivd, mu, tf, retx, delta,
    /// seed (outermost first). Every expanded config is validated.
    pub fn expand(&self) -> Result<Vec<RunSpec>, ConfigError> {
        let b = &self.base;
        let ivds = axis("sweep_ivd_m", &self.sweep_ivd_m, b.ivd_m)?;
        let mus = axis("sweep_mu", &self.sweep_mu, b.mu)?;
        let tfs = axis("sweep_tf_hz", &self.sweep_tf_hz, b.tf_hz)?;
        let retxs = axis("sweep_retx", &self.sweep_retx, b.retx_scheme)?;
        let deltas = axis("sweep_delta_db", &self.sweep_delta_db, b.l2sm_delta_db)?;
        let seeds = axis("seeds", &self.seeds, b.seed)?;

        let mut runs = Vec::with_capacity(
            ivds.len() * mus.len() * tfs.len() * retxs.len() * deltas.len() * seeds.len(),
        );
        let mut point = 0;
        for &ivd in &ivds {
            for &mu in &mus {
                for &tf in &tfs {
                    for &retx in &retxs {
                        for &delta in &deltas {
                            let mut cfg = b.clone();
                            cfg.ivd_m = ivd;
                            cfg.mu = mu;
                            cfg.tf_hz = tf;
                            cfg.retx_scheme = retx;
                            cfg.l2sm_delta_db = delta;
                            cfg.validate()?;
                            for &seed in &seeds {
                                let mut run_cfg = cfg.clone();
                                run_cfg.seed = seed;
                                runs.push(RunSpec {
                                    point,
                                    cfg: run_cfg,
                                    seed,
                                });
                            }
                            point += 1;
                        }
                    }
                }
            }
        }
        Ok(runs)
    }
}

/// Free-function form of [`CampaignSpec::expand`].
pub fn expand_campaign(spec: &CampaignSpec) -> Result<Vec<RunSpec>, ConfigError> {
    spec.expand()
}
