//! Builds a campaign in code: effective PRR against inter-vehicle distance
//! for each numerology, several seeds per point. Prints the sweep CSV.

use sidelink_sim::campaign::{default_jobs, run_campaign};
use sidelink_sim::metrics::write_sweep_csv;
use sidelink_sim::{BlerTable, CampaignSpec};

fn main() {
    let spec = CampaignSpec {
        sweep_ivd_m: Some(vec![10.0, 20.0, 40.0, 80.0]),
        sweep_mu: Some(vec![0, 1, 2]),
        seeds: Some((0..5).collect()),
        ..CampaignSpec::default()
    };
    let rows = run_campaign(&spec, &BlerTable::builtin(), default_jobs()).unwrap();
    write_sweep_csv(&rows, std::io::stdout()).unwrap();
}
