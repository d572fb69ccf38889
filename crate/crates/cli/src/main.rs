//! `hetsim` command-line front end.
//!
//! Exit codes: 0 success, 1 run-time failure (no feasible plan, write
//! error), 2 missing file, 3 syntax error, 4 semantic error or unknown key,
//! 5 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hetsim::config::{apply_override, load_scenario, parse_file, ConfigError};
use hetsim::report::{comparison_csv, summary_kv, summary_text, trace_csv, write_atomic};
use hetsim::scenario::ScenarioConfig;
use hetsim::sim::{compare, initial_networks, make_plan, run, scenario_graph, SimError};
use hetsim::sweep::{parse_values, sweep, sweep_csv};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 5;

#[derive(Parser)]
#[command(name = "hetsim", version, about = "Vertical handoff simulator for heterogeneous wireless networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a scenario without running it.
    Validate {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compute the minimum-handover attachment plan.
    Plan {
        scenario: PathBuf,
        /// Also print the coverage graph, one edge per line.
        #[arg(long)]
        dump_graph: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate a scenario and write its trace and summary.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run once per value of a numeric field.
    Sweep {
        scenario: PathBuf,
        /// Dotted field name, e.g. `policy.hysteresis`.
        key: String,
        /// `a,b,c` or `start:stop:step`.
        values: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run several scenarios over the same route and service.
    Compare {
        #[arg(required = true, num_args = 2..)]
        scenarios: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Override a field, `key=value`; may repeat.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Override `sim.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to $HETSIM_OUT, then the working directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Summary,
    Both,
}

impl Common {
    fn all_overrides(&self) -> Vec<String> {
        let mut v = self.overrides.clone();
        if let Some(seed) = self.seed {
            v.push(format!("sim.seed={seed}"));
        }
        v
    }

    fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("HETSIM_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

enum Failure {
    Config(ConfigError),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Invalid(err) => Failure::Config(err.into()),
            other => Failure::Config(ConfigError::Usage(other.to_string())),
        }
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    write_atomic(path, bytes).map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))
}

fn tech_lookup(sc: &ScenarioConfig) -> impl Fn(&hetsim::environment::ApId) -> String + '_ {
    |id| sc.ap(id).map(|a| a.tech.name().to_owned()).unwrap_or_default()
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Validate { scenario, common } => {
            let sc = load_scenario(&scenario, &common.all_overrides())?;
            println!(
                "ok {}: {} access points, route {:.1} m, {} ticks",
                sc.name,
                sc.aps.len(),
                sc.route.length(),
                (sc.horizon() / sc.sim.tick).ceil() as u64
            );
        }
        Command::Plan {
            scenario,
            dump_graph,
            common,
        } => {
            let sc = load_scenario(&scenario, &common.all_overrides())?;
            let nets = initial_networks(&sc);
            let out = common.out_dir();
            if dump_graph {
                let graph = scenario_graph(&sc, &nets).map_err(Failure::Run)?;
                let text = graph.dump();
                print!("{text}");
                write(&out.join("graph.txt"), text.as_bytes())?;
            }
            let plan = make_plan(&sc, &nets).map_err(Failure::Run)?;
            let text = plan.render(tech_lookup(&sc));
            print!("{text}");
            write(&out.join("plan.txt"), text.as_bytes())?;
        }
        Command::Run { scenario, common } => {
            let sc = load_scenario(&scenario, &common.all_overrides())?;
            let output = run(&sc)?;
            let out = common.out_dir();
            if common.format != Format::Summary {
                write(&out.join("trace.csv"), &trace_csv(&output.trace))?;
            }
            if common.format != Format::Csv {
                let text = summary_text(&sc.name, &output);
                write(&out.join("summary.txt"), text.as_bytes())?;
                write(&out.join("summary.kv"), summary_kv(&sc.name, &output.metrics).as_bytes())?;
                print!("{text}");
            }
        }
        Command::Sweep {
            scenario,
            key,
            values,
            common,
        } => {
            let mut doc = parse_file(&scenario)?;
            for o in common.all_overrides() {
                apply_override(&mut doc, &o)?;
            }
            let values = parse_values(&values)?;
            let rows = sweep(&doc, &key, &values)?;
            let bytes = sweep_csv(&key, &rows);
            write(&common.out_dir().join("sweep.csv"), &bytes)?;
            print!("{}", String::from_utf8_lossy(&bytes));
        }
        Command::Compare { scenarios, common } => {
            let overrides = common.all_overrides();
            let configs = scenarios
                .iter()
                .map(|p| load_scenario(p, &overrides).map(|sc| (sc.name.clone(), sc)))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = compare(&configs)?;
            let bytes = comparison_csv(&rows);
            write(&common.out_dir().join("compare.csv"), &bytes)?;
            print!("{}", String::from_utf8_lossy(&bytes));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
