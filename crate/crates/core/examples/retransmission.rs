//! Blind retransmission against single transmission at 60 kHz, 20 MHz:
//! sparse traffic gains from the second copy, dense traffic loses to the
//! halved capacity.

use sidelink_sim::campaign::run_all;
use sidelink_sim::config::RunSpec;
use sidelink_sim::{BlerTable, RetxScheme, ResourcePlan, SimConfig};

fn main() {
    let tables = BlerTable::builtin();
    let schemes = [
        RetxScheme::None,
        RetxScheme::Equal,
        RetxScheme::Nonequal(1),
        RetxScheme::Nonequal(3),
    ];
    println!("{:>6} {:>12} {:>8} {:>9}", "ivd_m", "scheme", "PRR_max", "PRR");
    for ivd_m in [10.0, 20.0, 40.0] {
        for retx_scheme in schemes {
            let cfg = SimConfig {
                mu: 2,
                bandwidth_mhz: 20.0,
                ivd_m,
                retx_scheme,
                l2sm_delta_db: 5.0,
                ..SimConfig::default()
            };
            let plan = ResourcePlan::for_config(&cfg).unwrap();
            let runs: Vec<RunSpec> = (0..4).map(|seed| RunSpec { point: 0, cfg: cfg.clone(), seed }).collect();
            let results = run_all(&runs, &tables, 1).unwrap();
            let prr = results.iter().filter_map(|r| r.prr_effective).sum::<f64>() / results.len() as f64;
            println!("{ivd_m:>6} {:>12} {:>8.4} {prr:>9.4}", retx_scheme.to_string(), plan.prr_max);
        }
    }
}
