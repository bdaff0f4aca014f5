//! The `sidelink-sim` command line.
//!
//! ```text
//! sidelink-sim run      [--config cfg.json] [--set k=v]... [--out f.csv] [--dump-samples]
//! sidelink-sim sweep    [--config campaign.json] [--set k=v]... [--out f.csv] [--jobs N]
//! sidelink-sim capacity [--config cfg.json] [--set k=v]... [--csv]
//! sidelink-sim tables   (--prb | --dump-bler) [--bler-table t.csv]
//! ```
//!
//! All results are CSV on stdout or `--out`; logs go to stderr. Exit codes:
//! 0 on success, 1 on configuration or I/O errors, 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use tracing::{error, info};

use crate::campaign::{default_jobs, sweep_csv};
use crate::config::{parse_config, CampaignSpec, SimConfig};
use crate::engine::run_traced;
use crate::l2sm::{load_table, BlerTable};
use crate::metrics::{aggregate, write_sweep_csv};
use crate::phy::{self, ResourcePlan};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "sidelink-sim", version, about = "NR V2X sidelink highway simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one configuration and seed.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write per-message samples to `<out>.samples.csv`.
        #[arg(long)]
        dump_samples: bool,
    },
    /// Expand a campaign, run every point and seed, write the aggregate.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Worker threads (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the resource plan of a configuration.
    Capacity {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        csv: bool,
    },
    /// Dump the PRB table or the active BLER table.
    Tables {
        #[arg(long, conflicts_with = "dump_bler", required_unless_present = "dump_bler")]
        prb: bool,
        #[arg(long)]
        dump_bler: bool,
        #[arg(long, value_name = "PATH")]
        bler_table: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Override a config field, applied after the file (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// BLER table CSV replacing the built-in curves.
    #[arg(long, value_name = "PATH")]
    pub bler_table: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, Error> {
    Ok(fs::read_to_string(path)?)
}

fn load_sim_config(common: &CommonArgs) -> Result<SimConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => parse_config(&read(path)?)?,
        None => SimConfig::default(),
    };
    for o in &common.overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

fn load_campaign(common: &CommonArgs) -> Result<CampaignSpec, Error> {
    let mut spec = match &common.config {
        Some(path) => CampaignSpec::parse(&read(path)?)?,
        None => CampaignSpec::default(),
    };
    for o in &common.overrides {
        spec.base.apply_override(o)?;
    }
    Ok(spec)
}

fn load_tables(path: Option<&Path>) -> Result<BlerTable, Error> {
    match path {
        Some(p) => Ok(load_table(&read(p)?)?),
        None => Ok(BlerTable::builtin()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            info!(path = %path.display(), "wrote output");
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// The PRB table as CSV, `NA` for undefined cells.
pub fn prb_table_csv() -> String {
    let mut s = String::from("mu,scs_khz");
    for bw in phy::PRB_TABLE_BANDWIDTHS_MHZ {
        let _ = write!(s, ",{bw}");
    }
    s.push('\n');
    for (mu, row) in phy::PRB_TABLE.iter().enumerate() {
        let _ = write!(s, "{mu},{}", phy::scs_khz(mu as u8));
        for cell in row {
            match cell {
                Some(n) => {
                    let _ = write!(s, ",{n}");
                }
                None => s.push_str(",NA"),
            }
        }
        s.push('\n');
    }
    s
}

fn capacity_text(plan: &ResourcePlan, csv: bool) -> String {
    let rows = plan.rows();
    if csv {
        let keys: Vec<&str> = rows.iter().map(|(k, _)| *k).collect();
        let values: Vec<&str> = rows.iter().map(|(_, v)| v.as_str()).collect();
        format!("{}\n{}\n", keys.join(","), values.join(","))
    } else {
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}

fn samples_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".samples.csv");
    out.with_file_name(name)
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { common, dump_samples } => {
            let cfg = load_sim_config(&common)?;
            let tables = load_tables(common.bler_table.as_deref())?;
            if dump_samples && common.out.is_none() {
                return Err(Error::Io(std::io::Error::new(
                    std::io::ErrorKind::InvalidInput,
                    "--dump-samples requires --out",
                )));
            }
            let trace = run_traced(&cfg, cfg.seed, &tables)?;
            let rows = aggregate(std::slice::from_ref(&trace.result))?;
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf)?;
            emit(common.out.as_deref(), &String::from_utf8_lossy(&buf))?;
            if dump_samples {
                let mut text = String::from("drop,phase,tx,m,n\n");
                for s in &trace.samples {
                    let _ = writeln!(text, "{},{},{},{},{}", s.drop, s.phase, s.sample.tx, s.sample.m, s.sample.n);
                }
                let path = samples_path(common.out.as_deref().expect("checked above"));
                emit(Some(&path), &text)?;
            }
        }
        Command::Sweep { common, jobs } => {
            let spec = load_campaign(&common)?;
            let tables = load_tables(common.bler_table.as_deref())?;
            let text = sweep_csv(&spec, &tables, jobs.unwrap_or_else(default_jobs))?;
            emit(common.out.as_deref(), &text)?;
        }
        Command::Capacity { common, csv } => {
            let cfg = load_sim_config(&common)?;
            let plan = ResourcePlan::for_config(&cfg)?;
            emit(common.out.as_deref(), &capacity_text(&plan, csv))?;
        }
        Command::Tables {
            prb,
            dump_bler,
            bler_table,
            out,
        } => {
            if prb {
                emit(out.as_deref(), &prb_table_csv())?;
            } else if dump_bler {
                let tables = load_tables(bler_table.as_deref())?;
                let mut buf = Vec::new();
                tables.write_csv(&mut buf)?;
                emit(out.as_deref(), &String::from_utf8_lossy(&buf))?;
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_target(false)
        .try_init();

    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            1
        }
    }
}
