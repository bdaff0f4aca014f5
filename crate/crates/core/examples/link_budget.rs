//! Pathloss, mean received power and SNR against distance for the default
//! link budget, plus a few shadowed draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sidelink_sim::channel::{noise_power_dbm, LinkBudget};
use sidelink_sim::{ResourcePlan, SimConfig};

fn main() {
    let cfg = SimConfig::default();
    let plan = ResourcePlan::for_config(&cfg).unwrap();
    let budget = LinkBudget::from_config(&cfg).unwrap();
    let noise = noise_power_dbm(cfg.noise_density_dbm_hz, plan.nprb_pssch, plan.numerology.scs_hz(), cfg.noise_figure_db);
    println!("noise over {} PSSCH PRBs: {noise:.2} dBm", plan.nprb_pssch);

    let unfaded = LinkBudget::from_config(&SimConfig {
        shadowing_sigma_db: 0.0,
        ..cfg.clone()
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("{:>6} {:>9} {:>9} {:>8} {:>10}", "d_m", "PL_dB", "Prx_dBm", "SNR_dB", "shadowed");
    for d in [5.0, 10.0, 25.0, 50.0, 100.0, 200.0, 300.0, 400.0, 500.0] {
        let mean = unfaded.sample(&mut rng, d);
        let faded = budget.sample(&mut rng, d);
        println!(
            "{d:>6} {:>9.2} {:>9.2} {:>8.2} {:>10.2}",
            mean.pathloss_db,
            mean.rx_power_dbm,
            mean.rx_power_dbm - noise,
            faded.rx_power_dbm - noise
        );
    }
}
