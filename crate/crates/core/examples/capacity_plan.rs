//! Resource plan for every defined (bandwidth, numerology) pair: PRBs,
//! vehicles per slot, supported vehicles and the overload ceiling.
//!
//! cargo run --example capacity_plan [ivd_m]

use sidelink_sim::phy::{self, ResourcePlan};
use sidelink_sim::SimConfig;

fn main() {
    let ivd_m: f64 = std::env::args().nth(1).map_or(10.0, |s| s.parse().expect("ivd_m"));
    println!("ivd_m = {ivd_m}");
    println!("{:>6} {:>3} {:>7} {:>5} {:>5} {:>12} {:>6} {:>8} {:>4}", "bw_mhz", "mu", "scs_khz", "N_PRB", "UE_sf", "UE_supported", "UE_gNB", "PRR_max", "CQI");
    for bw in phy::PRB_TABLE_BANDWIDTHS_MHZ {
        for mu in 0..=2u8 {
            let cfg = SimConfig {
                bandwidth_mhz: f64::from(bw),
                mu,
                ivd_m,
                ..SimConfig::default()
            };
            let Ok(plan) = ResourcePlan::for_config(&cfg) else {
                println!("{bw:>6} {mu:>3}  undefined");
                continue;
            };
            println!(
                "{bw:>6} {mu:>3} {:>7} {:>5} {:>5} {:>12} {:>6} {:>8.4} {:>4}",
                plan.numerology.scs_khz,
                plan.n_prb,
                plan.ue_per_slot,
                plan.ue_supported,
                plan.ue_gnb,
                plan.prr_max,
                plan.cqi.cqi_index
            );
        }
    }
}
