// Copyright 2026 The tgrb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `tgrb`: run benchmarking experiments from config files or named presets.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use tgrb_core::config::load_config;
use tgrb_core::engine::with_workers;
use tgrb_core::gates::{tables_json, GateSet};
use tgrb_core::runner::{execute, output_files, write_files};
use tgrb_core::scenario::{run_scenario, Scenario, ScenarioOptions, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "tgrb", version, about = "Clifford+T interleaved randomized benchmarking simulator")]
struct Cli {
    /// Worker threads for simulation (0 = one per core). Does not affect results.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        #[arg(long, env = "TGRB_OUT_DIR", default_value = "tgrb-out")]
        out: PathBuf,
    },
    /// Run a named preset: fig1a, fig1b, fig1c, fig2, sweep-rotation, sweep-gad, random-ensemble.
    Scenario {
        name: String,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Defaults to <TGRB_OUT_DIR>/<name>.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// Print the Clifford group tables as JSON.
    Tables,
}

fn default_out_root() -> PathBuf {
    std::env::var_os("TGRB_OUT_DIR").map_or_else(|| PathBuf::from("tgrb-out"), PathBuf::from)
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = real_main(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn real_main(cli: Cli) -> Result<()> {
    let gs = GateSet::shared();
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config).with_context(|| format!("loading {}", config.display()))?;
            let run = with_workers(cli.workers, || execute(&cfg, gs, 1.0, Vec::new()))?;
            write_files(&out, &output_files(&run))?;
            let m = &run.manifest;
            if let Some(e) = &m.analysis.estimate {
                println!(
                    "f_t = {:.6} ± {:.6} (actual {:.6}); f_clifford = {:.6} (actual {:.6})",
                    e.f_t, e.bound, m.actual.f_t, e.f_clifford, m.actual.f_clifford
                );
            }
            println!("wrote {} in {:.1}s", out.display(), m.wall_time_s);
        }
        Command::Scenario { name, scale, seed, out } => {
            let scenario: Scenario = name.parse()?;
            let out = out.unwrap_or_else(|| default_out_root().join(scenario.name()));
            let start = Instant::now();
            let opts = ScenarioOptions { scale, seed };
            let res = with_workers(cli.workers, || run_scenario(scenario, &opts, gs))?;
            write_files(&out, &res.files)?;
            println!("{}", serde_json::to_string_pretty(&res.summary)?);
            println!("wrote {} in {:.1}s", out.display(), start.elapsed().as_secs_f64());
        }
        Command::Validate { config } => {
            load_config(&config).with_context(|| format!("validating {}", config.display()))?;
            println!("{}: ok", config.display());
        }
        Command::Tables => print!("{}", tables_json(gs)),
    }
    Ok(())
}
