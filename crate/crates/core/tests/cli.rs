use std::path::PathBuf;
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sidelink-sim")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sidelink-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn capacity_prints_the_chain() {
    let out = sim(&["capacity", "--set", "bandwidth_mhz=10", "--set", "mu=0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let field = |k: &str| {
        text.lines()
            .find_map(|l| l.split_whitespace().collect::<Vec<_>>().strip_prefix(&[k]).map(|v| v[0].to_string()))
            .unwrap()
    };
    assert_eq!(field("N_PRB"), "52");
    assert_eq!(field("NPRB_total"), "7");
    assert_eq!(field("UE_sf"), "7");
    assert_eq!(field("UE_supported"), "700");
}

#[test]
fn run_writes_one_row_and_samples() {
    let dir = scratch("run");
    let out = dir.join("run.csv");
    let status = sim(&[
        "run",
        "--set",
        "highway_length_m=1732",
        "--set",
        "num_gnb=1",
        "--set",
        "ivd_m=40",
        "--out",
        out.to_str().unwrap(),
        "--dump-samples",
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(status.stdout.is_empty(), "results go to --out, logs to stderr");

    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("40,0,10,10,none,0,1,"));
    let prr: f64 = lines[1].split(',').nth(7).unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&prr));

    let samples = std::fs::read_to_string(dir.join("run.samples.csv")).unwrap();
    let mut rows = samples.lines();
    assert_eq!(rows.next(), Some("drop,phase,tx,m,n"));
    for row in rows {
        let f: Vec<u64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[4] <= f[3]);
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn dump_samples_needs_out() {
    let out = sim(&["run", "--dump-samples", "--set", "ivd_m=100"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn overrides_reach_the_sweep_rows() {
    let dir = scratch("sweep");
    let campaign = dir.join("c.json");
    std::fs::write(&campaign, r#"{"base": {"num_gnb": 1, "highway_length_m": 1732}, "sweep_ivd_m": [50, 100], "seeds": [0, 1]}"#).unwrap();
    let out = sim(&["sweep", "--config", campaign.to_str().unwrap(), "--set", "mu=1", "--jobs", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("50,1,10,10,none,0,2,"));
    assert!(rows[1].starts_with("100,1,10,10,none,0,2,"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bad_inputs_exit_nonzero() {
    assert_eq!(sim(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sim(&["run", "--jobs", "2"]).status.code(), Some(2));
    let unknown = sim(&["capacity", "--set", "warp_factor=9"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&unknown.stderr).is_empty());
}

#[test]
fn bler_dump_reloads() {
    let dir = scratch("bler");
    let path = dir.join("bler.csv");
    assert!(sim(&["tables", "--dump-bler", "--out", path.to_str().unwrap()]).status.success());
    let again = sim(&["tables", "--dump-bler", "--bler-table", path.to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(again.stdout, std::fs::read(&path).unwrap());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn shipped_campaigns_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/campaigns");
    for name in ["fig5a", "fig5b", "fig5c", "fig5d"] {
        let text = std::fs::read_to_string(format!("{dir}/{name}.json")).unwrap();
        let spec = sidelink_sim::CampaignSpec::parse(&text).unwrap();
        assert!(!spec.expand().unwrap().is_empty(), "{name}");
    }
}
