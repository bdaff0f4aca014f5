//! System-level Monte Carlo simulator for NR V2X sidelink broadcast on a
//! highway.
//!
//! Vehicles sit on a six-lane road served by a row of gNBs in sidelink
//! Mode 1: each gNB hands its vehicles orthogonal resources, and
//! neighbouring cells reuse the same resources at full load. A drop places
//! the vehicles, schedules one transmission period, evaluates every
//! in-range link through WINNER+ B1 pathloss and shadowing, maps SINR to
//! BLER and draws receptions. The packet reception ratio (PRR) of the run
//! is the runtime PRR scaled by the overload ceiling `PRR_max`.
//!
//! Modules, bottom-up:
//!
//! - [`config`]: [`SimConfig`], [`CampaignSpec`] and sweep expansion
//! - [`phy`]: numerology, PRB table, message sizing and capacity
//! - [`scenario`]: vehicle and gNB placement, range queries
//! - [`channel`]: pathloss, shadowing, link budget, noise
//! - [`l2sm`]: SINR to BLER curves and reception draws
//! - [`engine`]: scheduling and per-drop simulation, with and without
//!   blind retransmission
//! - [`metrics`]: PRR statistics and the sweep CSV
//! - [`campaign`]: parallel campaign execution
//! - [`cli`]: the `sidelink-sim` command line
//!
//! ```
//! use sidelink_sim::{phy::ResourcePlan, SimConfig};
//!
//! let plan = ResourcePlan::for_config(&SimConfig::default()).unwrap();
//! assert_eq!((plan.n_prb, plan.nprb_total, plan.ue_supported), (52, 7, 700));
//! ```

use thiserror::Error;

pub mod campaign;
pub mod channel;
pub mod cli;
pub mod config;
pub mod engine;
pub mod l2sm;
pub mod metrics;
pub mod phy;
pub mod scenario;

pub use config::{parse_config, CampaignSpec, RetxScheme, SimConfig};
pub use engine::{run_drop, run_traced};
pub use l2sm::BlerTable;
pub use metrics::{RunResult, SweepRow};
pub use phy::ResourcePlan;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Phy(#[from] phy::PhyError),
    #[error(transparent)]
    Channel(#[from] channel::ChannelError),
    #[error(transparent)]
    Table(#[from] l2sm::TableError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
