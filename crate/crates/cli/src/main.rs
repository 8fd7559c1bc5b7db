use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use superradiance::experiment::{run_scenario, Scenario, ScenarioConfig, ScenarioOutput};
use superradiance::validate::run_invariant_suite;

#[derive(Parser)]
#[command(
    name = "superradiance",
    version,
    about = "Collective spontaneous emission experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dicke-equation trajectories for partially excited ensembles.
    Dicke(RunArgs),
    /// Master-equation runs (purity, bursts, dispersions, phases).
    Lindblad(RunArgs),
    /// Delay time against initial dipole magnitude.
    Sweep(RunArgs),
    /// Linear oscillator control case.
    Oscillator(RunArgs),
    /// Run the fast invariant suite.
    Validate,
    /// Print a built-in scenario configuration as JSON.
    Preset {
        #[arg(value_parser = parse_scenario)]
        scenario: Scenario,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON scenario configuration; repeat to run several scenarios concurrently.
    #[arg(long = "config", value_name = "PATH")]
    configs: Vec<PathBuf>,
    /// Built-in scenario used when no configuration file is given.
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    /// Output directory, overriding the configuration.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (0 = available parallelism).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Record every k-th integration step, overriding the configuration.
    #[arg(long, value_name = "K")]
    stride: Option<usize>,
}

fn parse_scenario(name: &str) -> Result<Scenario, String> {
    Scenario::from_name(name).ok_or_else(|| {
        let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
        format!(
            "unknown scenario '{name}', expected one of: {}",
            names.join(", ")
        )
    })
}

#[derive(Clone, Copy)]
enum Kind {
    Dicke,
    Lindblad,
    Sweep,
    Oscillator,
}

impl Kind {
    fn default_scenario(self) -> Option<Scenario> {
        match self {
            Kind::Dicke => Some(Scenario::Fig1PartialDicke),
            Kind::Lindblad => None,
            Kind::Sweep => Some(Scenario::Fig6DipoleSweep),
            Kind::Oscillator => Some(Scenario::OscillatorNull),
        }
    }

    fn accepts(self, config: &ScenarioConfig) -> bool {
        match self {
            Kind::Dicke => config.scenario == Scenario::Fig1PartialDicke,
            Kind::Sweep => config.sweep.is_some(),
            Kind::Oscillator => config.scenario == Scenario::OscillatorNull,
            Kind::Lindblad => {
                config.sweep.is_none()
                    && !matches!(
                        config.scenario,
                        Scenario::Fig1PartialDicke | Scenario::OscillatorNull
                    )
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Dicke => "dicke",
            Kind::Lindblad => "lindblad",
            Kind::Sweep => "sweep",
            Kind::Oscillator => "oscillator",
        }
    }
}

fn load_configs(kind: Kind, args: &RunArgs) -> Result<Vec<ScenarioConfig>> {
    let mut configs = Vec::new();
    for path in &args.configs {
        let config = ScenarioConfig::from_path(path)
            .with_context(|| format!("loading configuration {}", path.display()))?;
        configs.push(config);
    }
    if configs.is_empty() {
        let Some(scenario) = args.scenario.or(kind.default_scenario()) else {
            bail!("{} needs --config or --scenario", kind.name());
        };
        configs.push(ScenarioConfig::preset(scenario));
    } else if args.scenario.is_some() {
        bail!("--scenario and --config are mutually exclusive");
    }
    for config in &mut configs {
        if let Some(out) = &args.out {
            config.output_dir = out.clone();
        }
        if let Some(stride) = args.stride {
            config.record_stride = stride;
        }
        config.validate()?;
        if !kind.accepts(config) {
            bail!(
                "scenario {} cannot be run by the {} command",
                config.scenario.name(),
                kind.name()
            );
        }
    }
    Ok(configs)
}

/// Runs independent scenarios on up to `workers` threads; a sweep inside a
/// scenario gets its own pool of the same size.
fn run_all(configs: &[ScenarioConfig], workers: usize) -> Vec<Result<ScenarioOutput>> {
    let threads = match workers {
        0 => thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(configs.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<ScenarioOutput>>>> =
        Mutex::new((0..configs.len()).map(|_| None).collect());
    thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(config) = configs.get(i) else { break };
                let outcome = run_scenario(config, workers)
                    .with_context(|| format!("running {}", config.scenario.name()));
                results.lock().expect("no poisoned workers")[i] = Some(outcome);
            });
        }
    });
    results
        .into_inner()
        .expect("no poisoned workers")
        .into_iter()
        .map(|r| r.expect("every configuration ran"))
        .collect()
}

fn run(kind: Kind, args: &RunArgs) -> Result<()> {
    let configs = load_configs(kind, args)?;
    let mut first_error = None;
    for result in run_all(&configs, args.workers) {
        match result {
            Ok(output) => {
                for file in &output.files {
                    println!("wrote {}", file.display());
                }
                for f in &output.features {
                    println!(
                        "{}: N={} t_delay={:.6} peak={:.6} fwhm={:.6}",
                        f.scenario.name(),
                        f.n_atoms,
                        f.t_delay,
                        f.peak_intensity,
                        f.fwhm
                    );
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                first_error.get_or_insert(e);
            }
        }
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn validate() -> bool {
    let outcomes = run_invariant_suite();
    for o in &outcomes {
        println!(
            "{} {}: {} ({:.2}s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail,
            o.seconds
        );
    }
    outcomes.iter().all(|o| o.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Dicke(args) => run(Kind::Dicke, args),
        Command::Lindblad(args) => run(Kind::Lindblad, args),
        Command::Sweep(args) => run(Kind::Sweep, args),
        Command::Oscillator(args) => run(Kind::Oscillator, args),
        Command::Validate => {
            return if validate() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
        Command::Preset { scenario } => {
            println!("{}", ScenarioConfig::preset(*scenario).to_json());
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
