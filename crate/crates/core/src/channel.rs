//! Large-scale channel: WINNER+ B1 line-of-sight pathloss, log-normal
//! shadowing, link budget and thermal noise.
//!
//! Fast fading is not drawn here; the BLER curves are fading-channel curves.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::config::SimConfig;

const SPEED_OF_LIGHT: f64 = 3.0e8;
/// Effective environment height subtracted from both antennas.
const ENVIRONMENT_HEIGHT_M: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("effective antenna height must be positive (tx {tx_m} m, rx {rx_m} m)")]
    EffectiveHeight { tx_m: f64, rx_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// 3-D separation.
    pub distance_m: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub fc_ghz: f64,
}

impl LinkGeometry {
    /// UE-to-UE link over a horizontal separation `horizontal_m`.
    pub fn between_ues(horizontal_m: f64, ue_height_m: f64, fc_ghz: f64) -> Self {
        Self {
            distance_m: horizontal_m,
            tx_height_m: ue_height_m,
            rx_height_m: ue_height_m,
            fc_ghz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSample {
    pub pathloss_db: f64,
    pub shadowing_db: f64,
    pub rx_power_dbm: f64,
}

/// WINNER+ B1 LOS pathloss with a distance floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinnerB1Los {
    pub min_distance_m: f64,
}

impl Default for WinnerB1Los {
    fn default() -> Self {
        Self {
            min_distance_m: 10.0,
        }
    }
}

impl WinnerB1Los {
    /// Breakpoint distance `4 h'_tx h'_rx f_c / c`.
    pub fn breakpoint_m(geom: &LinkGeometry) -> Result<f64, ChannelError> {
        let (htx, hrx) = effective_heights(geom)?;
        Ok(4.0 * htx * hrx * geom.fc_ghz * 1e9 / SPEED_OF_LIGHT)
    }

    pub fn pathloss_db(&self, geom: &LinkGeometry) -> Result<f64, ChannelError> {
        let (htx, hrx) = effective_heights(geom)?;
        let d_bp = 4.0 * htx * hrx * geom.fc_ghz * 1e9 / SPEED_OF_LIGHT;
        let d = geom.distance_m.max(self.min_distance_m);
        let f = (geom.fc_ghz / 5.0).log10();
        let pl = if d < d_bp {
            22.7 * d.log10() + 41.0 + 20.0 * f
        } else {
            40.0 * d.log10() + 9.45 - 17.3 * htx.log10() - 17.3 * hrx.log10() + 2.7 * f
        };
        Ok(pl)
    }
}

fn effective_heights(geom: &LinkGeometry) -> Result<(f64, f64), ChannelError> {
    let htx = geom.tx_height_m - ENVIRONMENT_HEIGHT_M;
    let hrx = geom.rx_height_m - ENVIRONMENT_HEIGHT_M;
    if htx > 0.0 && hrx > 0.0 {
        Ok((htx, hrx))
    } else {
        Err(ChannelError::EffectiveHeight {
            tx_m: geom.tx_height_m,
            rx_m: geom.rx_height_m,
        })
    }
}

/// Pathloss with the default 10 m distance floor.
pub fn pathloss_db(geom: &LinkGeometry) -> Result<f64, ChannelError> {
    WinnerB1Los::default().pathloss_db(geom)
}

/// Zero-mean Gaussian shadowing draw in dB.
pub fn shadowing_db<R: Rng + ?Sized>(rng: &mut R, sigma_db: f64) -> f64 {
    if sigma_db == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma_db)
        .expect("shadowing sigma is finite and non-negative")
        .sample(rng)
}

pub fn rx_power_dbm(tx_power_dbm: f64, tx_gain_db: f64, rx_gain_db: f64, pl_db: f64, shadow_db: f64) -> f64 {
    tx_power_dbm + tx_gain_db + rx_gain_db - pl_db - shadow_db
}

/// Thermal noise over the PSSCH allocation `nprb_pssch x 12 x scs`.
pub fn noise_power_dbm(noise_density_dbm_hz: f64, nprb_pssch: u32, scs_hz: f64, noise_figure_db: f64) -> f64 {
    let bandwidth_hz = f64::from(nprb_pssch) * 12.0 * scs_hz;
    noise_density_dbm_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Everything needed to turn a UE-to-UE distance into received power.
#[derive(Debug, Clone, Copy)]
pub struct LinkBudget {
    model: WinnerB1Los,
    ue_height_m: f64,
    fc_ghz: f64,
    tx_power_dbm: f64,
    tx_gain_db: f64,
    rx_gain_db: f64,
    shadowing_sigma_db: f64,
}

impl LinkBudget {
    pub fn from_config(cfg: &SimConfig) -> Result<Self, ChannelError> {
        let budget = Self {
            model: WinnerB1Los {
                min_distance_m: cfg.min_distance_m,
            },
            ue_height_m: cfg.ue_height_m,
            fc_ghz: cfg.carrier_freq_ghz,
            tx_power_dbm: cfg.tx_power_dbm,
            tx_gain_db: cfg.tx_gain_db,
            rx_gain_db: cfg.rx_gain_db,
            shadowing_sigma_db: cfg.shadowing_sigma_db,
        };
        // surface height errors once, up front
        budget.pathloss_db(1.0)?;
        Ok(budget)
    }

    pub fn pathloss_db(&self, horizontal_m: f64) -> Result<f64, ChannelError> {
        self.model
            .pathloss_db(&LinkGeometry::between_ues(horizontal_m, self.ue_height_m, self.fc_ghz))
    }

    /// Received power over `horizontal_m` with a fresh shadowing draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, horizontal_m: f64) -> ChannelSample {
        let pathloss_db = self
            .pathloss_db(horizontal_m)
            .expect("heights validated at construction");
        let shadowing_db = shadowing_db(rng, self.shadowing_sigma_db);
        ChannelSample {
            pathloss_db,
            shadowing_db,
            rx_power_dbm: rx_power_dbm(
                self.tx_power_dbm,
                self.tx_gain_db,
                self.rx_gain_db,
                pathloss_db,
                shadowing_db,
            ),
        }
    }
}
