//! One drop of the default scenario: deployment summary, per-message PRR
//! distribution and the final effective PRR.
//!
//! cargo run --example single_drop [seed] [key=value ...]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sidelink_sim::scenario::generate_deployment;
use sidelink_sim::{run_traced, BlerTable, ResourcePlan, SimConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let mut cfg = SimConfig::default();
    for o in args {
        cfg.apply_override(&o).expect("override");
    }
    let plan = ResourcePlan::for_config(&cfg).unwrap();
    let dep = generate_deployment(&cfg, &mut ChaCha8Rng::seed_from_u64(seed));
    println!("{} vehicles, {} gNBs, {} per cell on average", dep.vehicles.len(), dep.sites.len(), dep.ue_per_gnb);
    for (i, site) in dep.sites.iter().enumerate() {
        println!("  gNB {i} at x={:.0} m serves {}", site.x_m, dep.cell_members(i).len());
    }
    println!("UE_supported {} per cell, PRR_max {:.4}, CQI {}", plan.ue_supported, plan.prr_max, plan.cqi.cqi_index);

    let trace = run_traced(&cfg, seed, &BlerTable::builtin()).unwrap();
    let mut bins = [0usize; 10];
    for s in &trace.samples {
        if s.sample.m > 0 {
            let prr = s.sample.n as f64 / s.sample.m as f64;
            bins[((prr * 10.0) as usize).min(9)] += 1;
        }
    }
    println!("per-message PRR histogram:");
    for (i, count) in bins.iter().enumerate() {
        println!("  [{:.1}, {:.1}) {count}", i as f64 / 10.0, (i + 1) as f64 / 10.0);
    }
    let r = &trace.result;
    println!(
        "runtime PRR {:.4}, effective PRR {:.4} over {} messages",
        r.prr_runtime.unwrap_or(f64::NAN),
        r.prr_effective.unwrap_or(f64::NAN),
        r.samples
    );
}
