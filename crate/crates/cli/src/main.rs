use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use incompat::bounds::{k_profile, upper_bound_sc};
use incompat::compat::{feasibility_check, CompatibilityStatus, SolverSettings};
use incompat::io::{measurements_to_json, parse_measurements, rational_json, scan_csv};
use incompat::quantum::quantum_value;
use incompat::report::{assemble_witness_report, classical_bound, upgrade};
use incompat::seesaw::{seesaw, Constraint, SeesawSettings};
use incompat::triple::{scan_and_classify, ClassifyTolerance, TripleClass};
use incompat::{Error, MeasurementSet, Objective, Scenario, ToleranceConfig};
use serde_json::{json, Value};

mod demo;

#[derive(Parser)]
#[command(name = "incompat", version, about = "Witness measurement incompatibility with random access codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical value and upper bound of a RAC scenario.
    Bounds {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Quantum value of a measurement set.
    Qvalue {
        #[command(flatten)]
        input: MeasurementArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the quantum value of a measurement set with the classical value.
    Witness {
        #[command(flatten)]
        input: MeasurementArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for a parent POVM, falling back to the RAC witness.
    Compat {
        #[command(flatten)]
        input: MeasurementArgs,
        /// Iteration cap for the parent search.
        #[arg(long, default_value_t = 20_000)]
        max_iterations: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate and classify a grid of qubit measurement triples.
    ScanTriples {
        /// Grid points per parameter axis.
        #[arg(long, default_value_t = 41)]
        grid: usize,
        /// Print one CSV row per grid point.
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Heuristic see-saw search over states and measurements.
    Seesaw {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Avg)]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value_t = ConstraintArg::Free)]
        constraint: ConstraintArg,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recompute the reference values and print a summary table.
    Demo {
        #[arg(long)]
        seed: u64,
        /// See-saw restarts used for the worst-case compatible search.
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        /// Triple scan resolution.
        #[arg(long, default_value_t = 41)]
        grid: usize,
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Number of inputs; with a single `--outcomes` value it is repeated.
    #[arg(long)]
    n: Option<usize>,
    /// Outcome counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    outcomes: Vec<usize>,
    /// Message dimension.
    #[arg(long)]
    dim: usize,
}

#[derive(Args)]
struct MeasurementArgs {
    /// Measurement set in JSON.
    #[arg(long)]
    measurements: PathBuf,
    /// Expected number of measurements.
    #[arg(long)]
    n: Option<usize>,
    /// Expected Hilbert space dimension.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    /// Print a plain key/value table instead of JSON.
    #[arg(long)]
    table: bool,
    /// Exit with status 3 when the result is undecided.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Avg,
    Worst,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstraintArg {
    Free,
    Compatible,
}

/// Failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooLarge { .. } | Error::BoundUnavailable(_) => 3,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario, Failure> {
        let outcomes = match (self.n, self.outcomes.len()) {
            (Some(n), 1) => vec![self.outcomes[0]; n],
            (Some(n), len) if n != len => {
                return Err(invalid(format!("--n {n} but {len} outcome counts given")));
            }
            _ => self.outcomes.clone(),
        };
        Ok(Scenario::new(outcomes, self.dim)?)
    }
}

impl MeasurementArgs {
    fn load(&self) -> Result<(MeasurementSet, Scenario), Failure> {
        let text = fs::read_to_string(&self.measurements)
            .map_err(|e| invalid(format!("cannot read {}: {e}", self.measurements.display())))?;
        let ms = parse_measurements(&text, &ToleranceConfig::default())?;
        if let Some(n) = self.n.filter(|&n| n != ms.len()) {
            return Err(invalid(format!("--n {n} but the file has {} measurements", ms.len())));
        }
        if let Some(d) = self.dim.filter(|&d| d != ms.dim()) {
            return Err(invalid(format!("--dim {d} but the file has dimension {}", ms.dim())));
        }
        let sc = Scenario::new(ms.outcome_profile(), ms.dim())?;
        Ok((ms, sc))
    }
}

fn render(value: &Value, table: bool) -> String {
    if !table {
        return serde_json::to_string_pretty(value).expect("JSON values serialize");
    }
    let mut out = String::new();
    if let Value::Object(map) = value {
        let width = map.keys().map(String::len).max().unwrap_or(0);
        for (k, v) in map {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{k:<width$}  {shown}\n"));
        }
        out.pop();
    } else {
        out = value.to_string();
    }
    out
}

fn scenario_json(sc: &Scenario) -> Value {
    json!({"n": sc.n(), "outcomes": sc.outcomes(), "dim": sc.dim()})
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Bounds { scenario, output } => {
            let sc = scenario.scenario()?;
            let (value, method) = classical_bound(&sc)?;
            let report = json!({
                "scenario": scenario_json(&sc),
                "s_classical": rational_json::to_value(&value),
                "method": method,
                "s_upper": upper_bound_sc(&sc),
                "k_profile": k_profile(&sc).k,
            });
            println!("{}", render(&report, output.table));
            Ok(0)
        }
        Command::Qvalue { input, output } => {
            let (ms, sc) = input.load()?;
            let q = quantum_value(&ms, &sc)?;
            let report = json!({
                "scenario": scenario_json(&sc),
                "s_quantum": q.value,
                "norms": q.norms,
            });
            println!("{}", render(&report, output.table));
            Ok(0)
        }
        Command::Witness { input, output } => {
            let (ms, sc) = input.load()?;
            let report = assemble_witness_report(&ms, &sc)?;
            let value = serde_json::to_value(&report).expect("reports serialize");
            println!("{}", render(&value, output.table));
            Ok(0)
        }
        Command::Compat {
            input,
            max_iterations,
            output,
        } => {
            let (ms, sc) = input.load()?;
            let settings = SolverSettings {
                max_iterations,
                ..SolverSettings::default()
            };
            let mut verdict = feasibility_check(&ms, &settings)?;
            let mut note = None;
            if verdict.status != CompatibilityStatus::Compatible {
                match assemble_witness_report(&ms, &sc) {
                    Ok(report) => {
                        upgrade(&mut verdict, report);
                    }
                    Err(e @ (Error::BoundUnavailable(_) | Error::TooLarge { .. })) => {
                        note = Some(e.to_string());
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let mut value = serde_json::to_value(&verdict).expect("verdicts serialize");
            if let (Some(n), Value::Object(map)) = (note, &mut value) {
                map.insert("witness_unavailable".into(), Value::String(n));
            }
            println!("{}", render(&value, output.table));
            let undecided = verdict.status == CompatibilityStatus::Indeterminate;
            Ok(if output.strict && undecided { 3 } else { 0 })
        }
        Command::ScanTriples { grid, csv, output } => {
            let records = scan_and_classify(grid, &ClassifyTolerance::default())?;
            if csv {
                print!("{}", scan_csv(&records));
                return Ok(0);
            }
            let count = |c: TripleClass| records.iter().filter(|r| r.class == c).count();
            let min_value = records.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
            let summary = json!({
                "grid": grid,
                "points": records.len(),
                "witnessed": count(TripleClass::Witnessed),
                "compatible_boundary": count(TripleClass::CompatibleBoundary),
                "exceptional": count(TripleClass::Exceptional),
                "no_witness": count(TripleClass::NoWitness),
                "min_value": min_value,
            });
            println!("{}", render(&summary, output.table));
            Ok(0)
        }
        Command::Seesaw {
            scenario,
            objective,
            constraint,
            restarts,
            seed,
            output,
        } => {
            let sc = scenario.scenario()?;
            let objective = match objective {
                ObjectiveArg::Avg => Objective::Average,
                ObjectiveArg::Worst => Objective::Worst,
            };
            let constraint = match constraint {
                ConstraintArg::Free => Constraint::Free,
                ConstraintArg::Compatible => Constraint::Compatible,
            };
            let r = seesaw(&sc, objective, constraint, &SeesawSettings::new(restarts, seed))?;
            let mut value = serde_json::to_value(&r).expect("results serialize");
            if let Value::Object(map) = &mut value {
                map.insert("scenario".into(), scenario_json(&sc));
                let ms: Value = serde_json::from_str(&measurements_to_json(&r.measurements))
                    .expect("measurement JSON is valid");
                map.insert("measurements".into(), ms);
            }
            println!("{}", render(&value, output.table));
            Ok(0)
        }
        Command::Demo {
            seed,
            restarts,
            grid,
            strict,
        } => {
            let rows = demo::run(seed, restarts, grid)?;
            println!("{}", demo::table(&rows));
            let failed = rows.iter().any(|r| !r.ok);
            Ok(if strict && failed { 3 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
