// Copyright 2026 The hevsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end.
//!
//! `hevsplit run` simulates one or more controllers over a scenario and
//! writes traces, a summary and plot-ready data files. `hevsplit inspect`
//! prints the arbitration and control decision at a single operating
//! point. Exit status: 0 on success, 2 for invalid input, 3 when a
//! controller fails during a run.

mod runconfig;

pub use runconfig::{
    NoiseSection, ParamsSection, RunConfig, SocSection, RUN_CONFIG_SCHEMA_VERSION,
};

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::arbitration::{compute_bounds, OperatingPoint};
use crate::config::{ControllerConfig, PenaltyKind};
use crate::control::{decide, Controller};
use crate::ecms::EcmsPenalty;
use crate::fixture;
use crate::lqt::lqt_barrier;
use crate::powertrain::Powertrain;
use crate::sim::{
    run, NoiseModel, Scenario, SimError, SimulationTrace, SummaryFile, SummaryMetrics,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Controllers run by `--all-controllers`.
pub const ALL_CONTROLLERS: [Controller; 3] = [
    Controller::Ecms(PenaltyKind::Tangent),
    Controller::Ecms(PenaltyKind::Logarithm),
    Controller::Lqt,
];

#[derive(Debug, Parser)]
#[command(
    name = "hevsplit",
    version,
    about = "Power-split control for parallel hybrid powertrains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and write traces, summary and figure data.
    Run(RunArgs),
    /// Show bounds and control decisions at one operating point.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Powertrain map file (TOML); the bundled fixture when omitted.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// SOC margin kept from the hard bounds.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Accept an SOC margin below twice the noise bound.
    #[arg(long)]
    pub allow_unsafe_epsilon: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Controller: ecms-tan, ecms-log or lqt.
    #[arg(long)]
    pub controller: Option<String>,
    /// Run ecms-tan, ecms-log and lqt.
    #[arg(long)]
    pub all_controllers: bool,
    /// Scenario file (CSV); the bundled mixed-driving scenario when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed of the measurement noise.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bound of the SOC measurement error.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Initial SOC.
    #[arg(long)]
    pub initial_soc: Option<f64>,
    /// Number of controllers simulated in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Measured SOC.
    #[arg(long)]
    pub soc: f64,
    /// Shaft speed (rad/s).
    #[arg(long)]
    pub speed: f64,
    /// Demanded torque (Nm).
    #[arg(long, allow_negative_numbers = true)]
    pub torque: f64,
    /// SOC reference; the measured SOC when omitted.
    #[arg(long)]
    pub soc_ref: Option<f64>,
}

/// CLI failure with its exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Invalid(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) => EXIT_INVALID,
            Self::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Invalid(m) | Self::Runtime(m) => m,
        }
    }
}

/// Parses `std::env::args`, runs the command and returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(&args).map(|summary| print!("{}", summary.to_toml_string())),
        Command::Inspect(args) => cmd_inspect(&args).map(|text| print!("{text}")),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path).map_err(CliError::Invalid)?,
        None => RunConfig::default(),
    };
    if let Some(map) = &common.map {
        cfg.map = Some(map.clone());
    }
    if let Some(eps) = common.epsilon {
        cfg.soc.epsilon = eps;
    }
    Ok(cfg)
}

fn load_map(path: Option<&Path>) -> Result<Powertrain, CliError> {
    match path {
        None => Ok(fixture::powertrain()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Invalid(format!("cannot read map {}: {e}", p.display())))?;
            Powertrain::from_toml_str(&text)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))
        }
    }
}

fn load_scenario(path: Option<&Path>) -> Result<Scenario, CliError> {
    match path {
        None => Ok(fixture::varying_scenario()),
        Some(p) => {
            let file = fs::File::open(p).map_err(|e| {
                CliError::Invalid(format!("cannot read scenario {}: {e}", p.display()))
            })?;
            Scenario::from_csv_reader(file)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))
        }
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Executes `run`, writes every output file and returns the summary.
pub fn cmd_run(args: &RunArgs) -> Result<SummaryFile, CliError> {
    let mut cfg = load_config(&args.common)?;
    if let Some(c) = &args.controller {
        cfg.controller = c.clone();
    }
    if let Some(s) = &args.scenario {
        cfg.scenario = Some(s.clone());
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if let Some(seed) = args.seed {
        cfg.noise.seed = seed;
    }
    if let Some(beta) = args.beta {
        cfg.noise.beta = beta;
    }
    if let Some(x0) = args.initial_soc {
        cfg.initial_soc = x0;
    }
    if args.jobs == 0 {
        return Err(CliError::Invalid("--jobs must be at least 1".into()));
    }
    let ccfg = cfg
        .validate(args.common.allow_unsafe_epsilon)
        .map_err(CliError::Invalid)?;
    let controllers: Vec<Controller> = if args.all_controllers {
        ALL_CONTROLLERS.to_vec()
    } else {
        vec![cfg
            .controller
            .parse()
            .map_err(|e: crate::Error| CliError::Invalid(e.to_string()))?]
    };
    let out = cfg
        .out
        .clone()
        .ok_or_else(|| CliError::Invalid("no output directory (use --out)".into()))?;
    let powertrain = load_map(cfg.map.as_deref())?;
    let scenario = load_scenario(cfg.scenario.as_deref())?;
    let noise = NoiseModel::new(cfg.noise.beta, cfg.noise.seed)
        .map_err(|e| CliError::Invalid(e.to_string()))?;

    let results = simulate_all(
        &controllers,
        &scenario,
        &powertrain,
        &ccfg,
        cfg.initial_soc,
        &noise,
        args.jobs,
    );

    let figures = out.join("figures");
    fs::create_dir_all(&figures)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", figures.display())))?;
    let mut runs = Vec::new();
    for (controller, result) in controllers.iter().zip(results) {
        let (trace, summary) =
            result.map_err(|e| CliError::Runtime(format!("{controller}: {e}")))?;
        let mut buf = Vec::new();
        trace
            .write_csv(&mut buf)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        write_file(&out.join(format!("trace_{controller}.csv")), &buf)?;
        write_file(
            &figures.join(format!("soc_{controller}.csv")),
            soc_figure(&trace).as_bytes(),
        )?;
        write_file(
            &figures.join(format!("undelivered_{controller}.csv")),
            undelivered_figure(&trace).as_bytes(),
        )?;
        runs.push(summary);
    }
    let x_ref = ccfg
        .soc
        .saturate(scenario.steps()[0].soc_ref, ccfg.epsilon)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    write_file(
        &figures.join("penalty_curves.csv"),
        penalty_figure(&ccfg, x_ref).as_bytes(),
    )?;
    let summary = SummaryFile::new(runs);
    write_file(
        &out.join("summary.toml"),
        summary.to_toml_string().as_bytes(),
    )?;
    write_file(&out.join("config.toml"), cfg.to_toml_string().as_bytes())?;
    Ok(summary)
}

type RunResult = Result<(SimulationTrace, SummaryMetrics), SimError>;

/// Runs each controller, up to `jobs` at a time, keeping input order.
fn simulate_all(
    controllers: &[Controller],
    scenario: &Scenario,
    powertrain: &Powertrain,
    cfg: &ControllerConfig,
    initial_soc: f64,
    noise: &NoiseModel,
    jobs: usize,
) -> Vec<RunResult> {
    let one = |c: Controller| run(scenario, c, powertrain, cfg, initial_soc, noise);
    let mut results = Vec::with_capacity(controllers.len());
    for chunk in controllers.chunks(jobs.max(1)) {
        if chunk.len() == 1 {
            results.push(one(chunk[0]));
            continue;
        }
        std::thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|&c| s.spawn(move || one(c))).collect();
            for h in handles {
                results.push(h.join().expect("simulation thread panicked"));
            }
        });
    }
    results
}

fn soc_figure(trace: &SimulationTrace) -> String {
    let mut s = String::from("time_s,true_soc,measured_soc,soc_ref,saturated_soc_ref\n");
    for r in &trace.records {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.time, r.true_soc, r.measured_soc, r.soc_ref, r.saturated_soc_ref
        );
    }
    s
}

fn undelivered_figure(trace: &SimulationTrace) -> String {
    let mut s = String::from("time_s,demand_nm,delivered_nm,undelivered_nm\n");
    for r in &trace.records {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.time,
            r.demand,
            r.demand - r.undelivered,
            r.undelivered
        );
    }
    s
}

/// Penalty curves on a 200-point SOC grid strictly inside the bounds.
fn penalty_figure(cfg: &ControllerConfig, x_ref: f64) -> String {
    let reference = cfg.ecms.reference_equivalent_factor;
    let tan = EcmsPenalty::new(PenaltyKind::Tangent, &cfg.ecms, reference, cfg.soc, x_ref);
    let log = EcmsPenalty::new(PenaltyKind::Logarithm, &cfg.ecms, reference, cfg.soc, x_ref);
    let mut s = String::from("soc,ecms_tan_g_j,ecms_log_g_j,lqt_barrier_g_s\n");
    let (Ok(tan), Ok(log)) = (tan, log) else {
        return s;
    };
    let n = 200;
    for i in 1..n {
        let x = cfg.soc.min + cfg.soc.width() * i as f64 / n as f64;
        let val = |r: crate::Result<f64>| r.map_or(String::new(), |v| v.to_string());
        let _ = writeln!(
            s,
            "{x},{},{},{}",
            val(tan.equivalent_factor(x)),
            val(log.equivalent_factor(x)),
            val(lqt_barrier(&cfg.lqt, &cfg.soc, x_ref, x)),
        );
    }
    s
}

/// Executes `inspect` and returns the report text.
pub fn cmd_inspect(args: &InspectArgs) -> Result<String, CliError> {
    let cfg = load_config(&args.common)?;
    let ccfg = cfg
        .validate(args.common.allow_unsafe_epsilon)
        .map_err(CliError::Invalid)?;
    let powertrain = load_map(cfg.map.as_deref())?;
    let invalid = |e: crate::Error| CliError::Invalid(e.to_string());
    let op = OperatingPoint::new(args.speed, args.torque, args.soc).map_err(invalid)?;
    let slice = powertrain.at(args.speed);
    let bounds =
        compute_bounds(&op, &slice, &ccfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    let soc_ref = args.soc_ref.unwrap_or(args.soc);

    let mut s = String::new();
    let _ = writeln!(s, "speed            {} rad/s", args.speed);
    let _ = writeln!(s, "demand           {} Nm", args.torque);
    let _ = writeln!(s, "measured soc     {}", args.soc);
    let _ = writeln!(
        s,
        "u_min            {:.3} W ({})",
        bounds.u_min, bounds.u_min_limit
    );
    let _ = writeln!(
        s,
        "u_max            {:.3} W ({})",
        bounds.u_max, bounds.u_max_limit
    );
    let _ = writeln!(
        s,
        "em window        [{:.3}, {:.3}] Nm",
        bounds.reflected_em_min, bounds.reflected_em_max
    );
    let _ = writeln!(s, "em equilibrium   {:.3} Nm", bounds.equilibrium_em_torque);
    let _ = writeln!(s, "em at u_max      {:.3} Nm", bounds.max_em_torque);
    let _ = writeln!(s, "deliverable      {:.3} Nm", bounds.deliverable_demand);
    for c in ALL_CONTROLLERS {
        let d = decide(c, &slice, &op, soc_ref, None, &ccfg)
            .map_err(|e| CliError::Runtime(format!("{c}: {e}")))?;
        let t = d.torques;
        let _ = write!(
            s,
            "{c:<9} u* = {:.3} W  engine {:.3}  em {:.3}  additional brake {:.3}  service brake {:.3} Nm  fuel {:.5} g/s",
            d.control + 0.0,
            t.engine,
            t.em,
            t.additional_brake + 0.0,
            t.service_brake + 0.0,
            d.fuel_rate
        );
        if let Some(f) = d.equivalent_factor {
            let _ = write!(s, "  s_B {f:e} g/J");
        }
        if let Some(g) = d.feedback_gain {
            let _ = write!(s, "  gain {g:e} W");
        }
        s.push('\n');
    }
    Ok(s)
}
