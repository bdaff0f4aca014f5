//! Runs one of the shipped campaign files (or any path) and writes the
//! aggregate CSV to stdout. Fewer seeds can be requested to keep it quick.
//!
//! cargo run --release --example campaign_file -- campaigns/fig5b.json [seeds]

use sidelink_sim::campaign::{default_jobs, sweep_csv};
use sidelink_sim::{BlerTable, CampaignSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/campaigns/fig5a.json").into());
    let mut spec = CampaignSpec::parse(&std::fs::read_to_string(&path).expect("campaign file")).expect("campaign");
    if let Some(n) = args.next() {
        spec.seeds = Some((0..n.parse().expect("seed count")).collect());
    }
    eprintln!("{path}: {} runs", spec.expand().unwrap().len());
    print!("{}", sweep_csv(&spec, &BlerTable::builtin(), default_jobs()).unwrap());
}
