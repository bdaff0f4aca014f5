//! Numerology and resource-capacity arithmetic.
//!
//! Everything here is a pure function of the configuration: subcarrier
//! spacing, the FR1 PRB table, per-message PRB sizing, how many messages fit
//! in a slot and per second, the resulting overload ceiling on PRR, and the
//! spectral-efficiency driven CQI choice.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::config::SimConfig;
use crate::scenario;

/// Subcarriers in one PRB, at every subcarrier spacing.
pub const SUBCARRIERS_PER_PRB: u32 = 12;
/// Symbols per slot available to PSSCH data.
pub const USABLE_SYMBOLS: u32 = 9;
/// PRBs reserved for the PSCCH control part of each message.
pub const NPRB_PSCCH: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhyError {
    #[error("undefined PRB entry for {bandwidth_mhz} MHz at mu={mu}")]
    UndefinedPrb { bandwidth_mhz: f64, mu: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Numerology {
    pub mu: u8,
    pub scs_khz: u32,
    pub slots_per_second: u32,
    pub usable_symbols: u32,
}

impl Numerology {
    pub fn new(mu: u8) -> Self {
        Self {
            mu,
            scs_khz: scs_khz(mu),
            slots_per_second: 1000 << mu,
            usable_symbols: USABLE_SYMBOLS,
        }
    }

    pub fn scs_hz(&self) -> f64 {
        f64::from(self.scs_khz) * 1e3
    }
}

/// Subcarrier spacing `15 * 2^mu` kHz.
pub fn scs_khz(mu: u8) -> u32 {
    15 << mu
}

/// Bandwidths (MHz) of the FR1 PRB table, column order.
pub const PRB_TABLE_BANDWIDTHS_MHZ: [u32; 4] = [5, 10, 15, 20];

/// Rows indexed by mu, columns by [`PRB_TABLE_BANDWIDTHS_MHZ`]. `None` marks
/// a combination with no defined carrier.
pub const PRB_TABLE: [[Option<u32>; 4]; 3] = [
    [Some(25), Some(52), Some(79), Some(106)],
    [Some(11), Some(24), Some(38), Some(51)],
    [None, Some(11), Some(18), Some(24)],
];

/// Number of PRBs in the carrier for a bandwidth and numerology.
pub fn prb_count(bandwidth_mhz: f64, mu: u8) -> Result<u32, PhyError> {
    let undefined = PhyError::UndefinedPrb { bandwidth_mhz, mu };
    let col = PRB_TABLE_BANDWIDTHS_MHZ
        .iter()
        .position(|&bw| f64::from(bw) == bandwidth_mhz)
        .ok_or(undefined.clone())?;
    PRB_TABLE
        .get(usize::from(mu))
        .and_then(|row| row[col])
        .ok_or(undefined)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
    Qam256,
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Qpsk => "QPSK",
            Modulation::Qam16 => "16QAM",
            Modulation::Qam64 => "64QAM",
            Modulation::Qam256 => "256QAM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CqiEntry {
    pub cqi_index: u8,
    pub modulation: Modulation,
    /// Code rate x 1024.
    pub code_rate_x1024: u32,
    /// Bits per resource element.
    pub efficiency: f64,
}

impl CqiEntry {
    pub fn code_rate(&self) -> f64 {
        f64::from(self.code_rate_x1024) / 1024.0
    }
}

const fn cqi(cqi_index: u8, modulation: Modulation, code_rate_x1024: u32, efficiency: f64) -> CqiEntry {
    CqiEntry {
        cqi_index,
        modulation,
        code_rate_x1024,
        efficiency,
    }
}

/// 4-bit CQI table with 256QAM (TS 38.214 table 5.2.2.1-2), CQI 1..=15.
pub const CQI_TABLE: [CqiEntry; 15] = [
    cqi(1, Modulation::Qpsk, 78, 0.1523),
    cqi(2, Modulation::Qpsk, 193, 0.3770),
    cqi(3, Modulation::Qpsk, 449, 0.8770),
    cqi(4, Modulation::Qam16, 378, 1.4766),
    cqi(5, Modulation::Qam16, 490, 1.9141),
    cqi(6, Modulation::Qam16, 616, 2.4063),
    cqi(7, Modulation::Qam64, 466, 2.7305),
    cqi(8, Modulation::Qam64, 567, 3.3223),
    cqi(9, Modulation::Qam64, 666, 3.9023),
    cqi(10, Modulation::Qam64, 772, 4.5234),
    cqi(11, Modulation::Qam64, 873, 5.1152),
    cqi(12, Modulation::Qam256, 711, 5.5547),
    cqi(13, Modulation::Qam256, 797, 6.2266),
    cqi(14, Modulation::Qam256, 885, 6.9141),
    cqi(15, Modulation::Qam256, 948, 7.4063),
];

/// Spectral efficiency (bit/s/Hz) needed to carry every UE of a cell.
pub fn required_se(packet_bytes: u32, ue_gnb: u32, tf_hz: f64, bandwidth_hz: f64) -> f64 {
    f64::from(packet_bytes) * 8.0 * f64::from(ue_gnb) * tf_hz / bandwidth_hz
}

/// Lowest CQI whose efficiency covers `se`, clamped to the top entry.
///
/// Panics on an empty table.
pub fn select_cqi(se: f64, table: &[CqiEntry]) -> CqiEntry {
    table
        .iter()
        .find(|e| e.efficiency >= se)
        .or_else(|| table.last())
        .copied()
        .expect("CQI table is non-empty")
}

/// PSSCH PRBs needed for one packet at efficiency `max_mcs` bits/RE.
pub fn nprb_pssch(packet_bytes: u32, n_sb: u32, n_us: u32, max_mcs: f64) -> u32 {
    let bits = f64::from(packet_bytes) * 8.0;
    let per_prb = f64::from(n_sb) * f64::from(n_us) * max_mcs;
    (bits / per_prb).ceil() as u32
}

/// Messages that fit side by side in one slot.
pub fn ue_per_slot(n_prb: u32, nprb_total: u32) -> u32 {
    n_prb / nprb_total
}

/// UEs that can each send `tf_hz` messages per second (times the
/// retransmission factor).
pub fn ue_supported(ue_sf: u32, slots_per_second: u32, tf_hz: f64, retx_factor: u32) -> u32 {
    let capacity = f64::from(ue_sf) * f64::from(slots_per_second);
    (capacity / (tf_hz * f64::from(retx_factor))).floor() as u32
}

/// Overload ceiling on PRR: the served fraction of a cell's UEs.
///
/// A cell with no UEs is not overloaded and returns 1.
pub fn prr_max(ue_supported: u32, ue_gnb: u32) -> f64 {
    if ue_gnb == 0 {
        return 1.0;
    }
    (f64::from(ue_supported) / f64::from(ue_gnb)).min(1.0)
}

/// Capacity picture of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourcePlan {
    pub numerology: Numerology,
    pub subcarriers_per_prb: u32,
    /// PRBs in the carrier.
    pub n_prb: u32,
    pub nprb_pscch: u32,
    pub nprb_pssch: u32,
    pub nprb_total: u32,
    pub ue_per_slot: u32,
    pub retx_factor: u32,
    /// UEs served per second after the retransmission factor.
    pub ue_supported: u32,
    /// Nominal UEs per cell.
    pub ue_gnb: u32,
    pub prr_max: f64,
    /// Spectral efficiency needed for the single-transmission load.
    pub required_se: f64,
    pub cqi: CqiEntry,
}

impl ResourcePlan {
    pub fn for_config(cfg: &SimConfig) -> Result<Self, PhyError> {
        let numerology = Numerology::new(cfg.mu);
        let n_prb = prb_count(cfg.bandwidth_mhz, cfg.mu)?;
        let pssch = nprb_pssch(
            cfg.packet_size_bytes,
            SUBCARRIERS_PER_PRB,
            numerology.usable_symbols,
            cfg.max_mcs_efficiency,
        );
        let nprb_total = pssch + NPRB_PSCCH;
        let ue_sf = ue_per_slot(n_prb, nprb_total);
        let retx_factor = cfg.retx_scheme.retx_factor();
        let supported = ue_supported(ue_sf, numerology.slots_per_second, cfg.tf_hz, retx_factor);
        let ue_gnb = scenario::ue_per_gnb(cfg.isd_m, cfg.ivd_m, cfg.lanes());
        let se = required_se(cfg.packet_size_bytes, ue_gnb, cfg.tf_hz, cfg.bandwidth_mhz * 1e6);
        Ok(Self {
            numerology,
            subcarriers_per_prb: SUBCARRIERS_PER_PRB,
            n_prb,
            nprb_pscch: NPRB_PSCCH,
            nprb_pssch: pssch,
            nprb_total,
            ue_per_slot: ue_sf,
            retx_factor,
            ue_supported: supported,
            ue_gnb,
            prr_max: prr_max(supported, ue_gnb),
            required_se: se,
            cqi: select_cqi(se, &CQI_TABLE),
        })
    }

    /// Slots in one transmission period (may be fractional).
    pub fn slots_per_period(&self, tf_hz: f64) -> f64 {
        f64::from(self.numerology.slots_per_second) / tf_hz
    }

    /// CQI used in a phase that owns `share` of the period.
    pub fn phase_cqi(&self, share: f64) -> CqiEntry {
        select_cqi(self.required_se / share, &CQI_TABLE)
    }

    /// Key/value rows for display.
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("mu", self.numerology.mu.to_string()),
            ("scs_khz", self.numerology.scs_khz.to_string()),
            ("slots_per_second", self.numerology.slots_per_second.to_string()),
            ("N_sb", self.subcarriers_per_prb.to_string()),
            ("N_us", self.numerology.usable_symbols.to_string()),
            ("N_PRB", self.n_prb.to_string()),
            ("NPRB_PSSCH", self.nprb_pssch.to_string()),
            ("NPRB_PSCCH", self.nprb_pscch.to_string()),
            ("NPRB_total", self.nprb_total.to_string()),
            ("UE_sf", self.ue_per_slot.to_string()),
            ("retx_factor", self.retx_factor.to_string()),
            ("UE_supported", self.ue_supported.to_string()),
            ("UE_gNB", self.ue_gnb.to_string()),
            ("PRR_max", format!("{:.6}", self.prr_max)),
            ("SE", format!("{:.6}", self.required_se)),
            ("CQI", self.cqi.cqi_index.to_string()),
            ("CQI_efficiency", format!("{:.4}", self.cqi.efficiency)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RetxScheme;
    use proptest::prelude::*;

    #[test]
    fn scs_for_all_numerologies() {
        let scs: Vec<u32> = (0..=4).map(scs_khz).collect();
        assert_eq!(scs, vec![15, 30, 60, 120, 240]);
        let n = Numerology::new(2);
        assert_eq!(n.slots_per_second, 4000);
        assert_eq!(n.usable_symbols, 9);
        assert_eq!(n.scs_hz(), 60_000.0);
    }

    #[test]
    fn prb_table_cells() {
        assert_eq!(prb_count(10.0, 0), Ok(52));
        assert_eq!(prb_count(10.0, 2), Ok(11));
        assert_eq!(prb_count(20.0, 1), Ok(51));
        assert_eq!(prb_count(5.0, 0), Ok(25));
        assert_eq!(prb_count(15.0, 2), Ok(18));
        assert!(prb_count(5.0, 2).is_err());
        assert!(prb_count(25.0, 0).is_err());
        assert!(prb_count(10.0, 3).is_err());
        let defined = PRB_TABLE.iter().flatten().filter(|c| c.is_some()).count();
        assert_eq!(defined, 11);
    }

    #[test]
    fn required_se_examples() {
        let se = required_se(300, 516, 10.0, 10e6);
        assert!((se - 1.2384).abs() < 1e-12);
        assert_eq!(required_se(300, 0, 10.0, 10e6), 0.0);
        let doubled = required_se(300, 516, 20.0, 10e6);
        assert!((doubled - 2.0 * se).abs() < 1e-12);
    }

    #[test]
    fn cqi_table_is_increasing() {
        for w in CQI_TABLE.windows(2) {
            assert!(w[1].efficiency > w[0].efficiency);
            assert_eq!(w[1].cqi_index, w[0].cqi_index + 1);
        }
        assert!((CQI_TABLE[11].code_rate() - 711.0 / 1024.0).abs() < 1e-12);
    }

    #[test]
    fn select_cqi_examples() {
        assert_eq!(select_cqi(0.0, &CQI_TABLE).cqi_index, 1);
        assert_eq!(select_cqi(9.0, &CQI_TABLE).cqi_index, 15);
        // linear-scan oracle
        let se = 1.2384;
        let expected = CQI_TABLE
            .iter()
            .filter(|e| e.efficiency >= se)
            .map(|e| e.cqi_index)
            .min()
            .unwrap();
        assert_eq!(select_cqi(se, &CQI_TABLE).cqi_index, expected);
        assert_eq!(expected, 4);
        assert_eq!(select_cqi(5.5547, &CQI_TABLE).cqi_index, 12);
    }

    #[test]
    fn nprb_pssch_examples() {
        assert_eq!(nprb_pssch(300, 12, 9, 5.5547), 5);
        assert_eq!(nprb_pssch(300, 12, 9, 7.4063), 4);
        // 12 * 9 * 2.0 / 8 = 27 bytes fit exactly in one PRB
        assert_eq!(nprb_pssch(27, 12, 9, 2.0), 1);
        assert_eq!(nprb_pssch(28, 12, 9, 2.0), 2);
    }

    #[test]
    fn ue_per_slot_examples() {
        assert_eq!(ue_per_slot(52, 7), 7);
        assert_eq!(ue_per_slot(24, 7), 3);
        assert_eq!(ue_per_slot(11, 12), 0);
    }

    #[test]
    fn ue_supported_examples() {
        assert_eq!(ue_supported(7, 1000, 10.0, 1), 700);
        assert_eq!(ue_supported(3, 2000, 10.0, 1), 600);
        assert_eq!(ue_supported(3, 4000, 10.0, 2), 600);
        assert_eq!(ue_supported(7, 1000, 30.0, 1), 233);
    }

    #[test]
    fn prr_max_examples() {
        assert!((prr_max(700, 1038) - 0.674_373_795_761_079).abs() < 1e-12);
        assert!((prr_max(700, 1038) - 0.6744).abs() < 5e-5);
        assert_eq!(prr_max(700, 516), 1.0);
        assert_eq!(prr_max(0, 516), 0.0);
    }

    #[test]
    fn default_plan_capacity_chain() {
        let expected = [(0u8, 52u32, 7u32, 700u32), (1, 24, 3, 600), (2, 11, 1, 400)];
        for (mu, n_prb, ue_sf, supported) in expected {
            let cfg = SimConfig {
                mu,
                ..SimConfig::default()
            };
            let plan = ResourcePlan::for_config(&cfg).unwrap();
            assert_eq!(plan.n_prb, n_prb);
            assert_eq!(plan.nprb_pssch, 5);
            assert_eq!(plan.nprb_total, 7);
            assert_eq!(plan.ue_per_slot, ue_sf);
            assert_eq!(plan.ue_supported, supported);
            assert_eq!(plan.ue_gnb, 516);
            assert_eq!(plan.cqi.cqi_index, 4);
        }
    }

    #[test]
    fn retransmission_halves_capacity() {
        let cfg = SimConfig {
            mu: 2,
            bandwidth_mhz: 20.0,
            ivd_m: 10.0,
            ..SimConfig::default()
        };
        let single = ResourcePlan::for_config(&cfg).unwrap();
        let retx = ResourcePlan::for_config(&SimConfig {
            retx_scheme: RetxScheme::Equal,
            ..cfg
        })
        .unwrap();
        assert_eq!(single.ue_supported, 1200);
        assert_eq!(retx.ue_supported, 600);
        assert_eq!(single.prr_max, 1.0);
        assert!((retx.prr_max - 600.0 / 1038.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn nprb_non_increasing_in_efficiency(bytes in 1u32..2000, a in 0.1f64..8.0, b in 0.1f64..8.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(nprb_pssch(bytes, 12, 9, hi) <= nprb_pssch(bytes, 12, 9, lo));
        }

        #[test]
        fn prr_max_is_a_ratio(s in 0u32..5000, g in 0u32..5000) {
            let p = prr_max(s, g);
            prop_assert!((0.0..=1.0).contains(&p));
        }

        #[test]
        fn retx_never_raises_capacity(sf in 0u32..20, mu in 0u8..3, tf in 1.0f64..60.0) {
            let slots = Numerology::new(mu).slots_per_second;
            let one = ue_supported(sf, slots, tf, 1);
            let two = ue_supported(sf, slots, tf, 2);
            prop_assert!(two <= one);
            if one > 0 {
                prop_assert!(two < one);
            }
        }
    }
}
