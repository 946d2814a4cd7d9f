use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qfilter::io::{export_catalog, export_label, matrix_to_json, resolve_filter, resolve_state};
use qfilter::mcsim::{run_protocol, witness_after_protocol};
use qfilter::measure::protocol_analytic;
use qfilter::scan::{run_scan, to_csv, ScanSpec};
use qfilter::verify::{verify_all, VerifyOptions};
use qfilter::witness::{detect, PositiveMapWitness};
use qfilter::{tol, Error};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "qfilter",
    version,
    about = "Local filters and Choi-map entanglement witnesses"
)]
struct Cli {
    /// Log to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the two-parameter 3x3 family over x and emit CSV.
    Scan {
        #[arg(long, default_value_t = 0.05)]
        t: f64,
        #[arg(long, default_value_t = 0.60)]
        x_min: f64,
        #[arg(long, default_value_t = 0.66)]
        x_max: f64,
        #[arg(long, default_value_t = 61)]
        steps: usize,
        /// Witness as `<kind>:<side>`, e.g. `choi-phi:A`.
        #[arg(long, default_value = "choi-phi:A")]
        witness: String,
        /// Filter label or JSON file.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Apply a witness to a state and print the report as JSON.
    Detect {
        /// State label (`rho-xt:<x>:<t>`, `rho-upb`, `bell`, `max-mixed`) or JSON file.
        state: String,
        /// Witness as `<kind>:<side>`.
        witness: String,
        /// Filter label or JSON file applied before the witness.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Run the measurement protocol for a filter on a state.
    Simulate {
        state: String,
        filter: String,
        /// Compose the measurements exactly instead of sampling.
        #[arg(long)]
        analytic: bool,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, env = "BF_SEED", default_value_t = 0)]
        seed: u64,
        /// Also test the surviving ensemble with this witness.
        #[arg(long)]
        witness: Option<String>,
    },
    /// Run every reproduction check and print a table.
    VerifyPaper {
        #[arg(long)]
        json: bool,
        #[arg(long, hide = true, default_value_t = tol::T_NEG)]
        t_neg: f64,
    },
    /// Dump builtin states and filters as JSON.
    Export {
        /// A single label (with parameters); all builtins when omitted.
        label: Option<String>,
    },
}

enum Failure {
    Input(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("values serialize")
    );
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Scan {
            t,
            x_min,
            x_max,
            steps,
            witness,
            filter,
        } => {
            let filter = filter.map(|f| resolve_filter(&f, (3, 3))).transpose()?;
            let spec = ScanSpec {
                t,
                x_min,
                x_max,
                steps,
                witness: PositiveMapWitness::parse(&witness, (3, 3))?,
                filter,
            };
            let rows = run_scan(&spec)?;
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(to_csv(&rows).as_bytes());
        }
        Command::Detect {
            state,
            witness,
            filter,
        } => {
            let rho = resolve_state(&state)?;
            let w = PositiveMapWitness::parse(&witness, rho.dims())?;
            let rho = match &filter {
                Some(f) => resolve_filter(f, rho.dims())?.apply(&rho)?.0,
                None => rho,
            };
            let report = detect(&w, &rho, &state)?;
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["filter"] = json!(filter);
            print_json(&v);
        }
        Command::Simulate {
            state,
            filter,
            analytic,
            shots,
            seed,
            witness,
        } => {
            let rho = resolve_state(&state)?;
            let f = resolve_filter(&filter, rho.dims())?;
            let mut v = if analytic {
                let out = protocol_analytic(&f, &rho)?;
                json!({
                    "mode": "analytic",
                    "total_prob": out.total_prob,
                    "scale_a": out.scales.0,
                    "scale_b": out.scales.1,
                    "state": matrix_to_json(out.state.matrix()),
                })
            } else {
                let run = run_protocol(&f, &rho, shots, seed)?;
                let mut v = serde_json::to_value(run.summary()).expect("summary serializes");
                v["mode"] = json!("monte-carlo");
                v
            };
            if let Some(w) = witness {
                let w = PositiveMapWitness::parse(&w, rho.dims())?;
                let report = if analytic {
                    detect(&w, &protocol_analytic(&f, &rho)?.state, "protocol")?
                } else {
                    witness_after_protocol(&f, &rho, &w, shots, seed)?
                };
                v["detection"] = serde_json::to_value(&report).expect("report serializes");
            }
            print_json(&v);
        }
        Command::VerifyPaper { json, t_neg } => {
            if t_neg.is_nan() || t_neg < 0.0 {
                return Err(
                    Error::BadParam(format!("t-neg must be non-negative, got {t_neg}")).into(),
                );
            }
            let report = verify_all(VerifyOptions { t_neg });
            if json {
                print_json(&serde_json::to_value(&report).expect("report serializes"));
            } else {
                print!("{}", report.table());
                println!(
                    "{} of {} checks passed",
                    report.rows.len() - report.failures(),
                    report.rows.len()
                );
            }
            if !report.all_pass() {
                return Err(Failure::Checks);
            }
        }
        Command::Export { label } => {
            let v = match label {
                Some(l) => export_label(&l)?,
                None => export_catalog(),
            };
            print_json(&v);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(Failure::Input(e)) => {
            log::debug!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
