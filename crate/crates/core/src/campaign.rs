//! Parallel execution of expanded campaigns.

use rayon::prelude::*;
use tracing::info;

use crate::config::{CampaignSpec, RunSpec};
use crate::engine::run_drop;
use crate::l2sm::BlerTable;
use crate::metrics::{aggregate, write_sweep_csv, RunResult, SweepRow};
use crate::Error;

/// Executes `runs` on `jobs` worker threads. Results come back in input
/// order whatever the completion order.
pub fn run_all(runs: &[RunSpec], tables: &BlerTable, jobs: usize) -> Result<Vec<RunResult>, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    info!(runs = runs.len(), jobs = pool.current_num_threads(), "running campaign");
    pool.install(|| {
        runs.par_iter()
            .map(|r| run_drop(&r.cfg, r.seed, tables))
            .collect()
    })
}

pub fn run_campaign(spec: &CampaignSpec, tables: &BlerTable, jobs: usize) -> Result<Vec<SweepRow>, Error> {
    let runs = spec.expand()?;
    let results = run_all(&runs, tables, jobs)?;
    Ok(aggregate(&results)?)
}

/// Runs a campaign and renders the aggregate CSV.
pub fn sweep_csv(spec: &CampaignSpec, tables: &BlerTable, jobs: usize) -> Result<String, Error> {
    let rows = run_campaign(spec, tables, jobs)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
}

/// Default worker count: available cores.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
