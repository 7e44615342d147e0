//! Run a JSON experiment config, as `hyperholo run` does.
//!
//! `cargo run --release --example run_config -- examples/configs/default.json out`
use std::path::PathBuf;

use hyperholo::runner::{run, ExperimentConfig, RunOptions};

fn main() -> hyperholo::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/default.json").into());
    let out = args.next().map(PathBuf::from);
    let cfg = ExperimentConfig::from_path(path.as_ref())?;
    let summary = run(&cfg, &RunOptions { out_dir: out, csv: true, parallel: true })?;
    print!("{}", summary.table());
    std::process::exit(summary.exit_code());
}
