//! Runs a named experiment from a scenario file through the library, the
//! same path the `lvs-sim` binary takes.
//!
//! cargo run --example config_experiment -- configs/kl_map.toml kl-map

use lvs_sim::cli::run_experiment;
use lvs_sim::config::{parse_config, Experiment};
use lvs_sim::{Error, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let file = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/min_antennas_grid.toml").into());
    let name = args.next().unwrap_or_else(|| "min-antennas-grid".into());
    let experiment: Experiment = name.parse()?;
    let mut cfg = parse_config(&std::fs::read_to_string(&file).map_err(Error::Io)?, &[])?;
    cfg.trials = cfg.trials.min(2_000);
    run_experiment(experiment, &cfg)?.write_csv(std::io::stdout())
}
