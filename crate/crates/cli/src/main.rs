//! `twogroup` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or parameter error, 2 numerical
//! failure, 3 verification failure.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use twogroup::analysis::{basin_probe, sweep_to_csv, threshold_sweep};
use twogroup::integrator::fmt17;
use twogroup::verify::{run_suite, FaultInjection};
use twogroup::{all_rest_points, integrate, Error, InitialState, RestPoint, TerminalReason};

use config::{Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "twogroup",
    version,
    about = "Two-group SIS model with disease-induced mortality"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the basic reproduction number and its two summands
    R0(Common),
    /// Write the rest points with their stability class
    Equilibria(Common),
    /// Integrate one trajectory
    Simulate(Common),
    /// Sweep one parameter through a list of values
    Sweep(Common),
    /// Label a grid of starting points by their limit
    Basin(Common),
    /// Run the property checks against one parameter set
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Corrupt the vector field to check that the suite notices
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<Fault>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    NegateField,
}

enum Failure {
    Config(String),
    Numerical(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::InvalidState(_) => Failure::Config(e.to_string()),
            Error::Degenerate(_) | Error::Internal(_) => Failure::Numerical(e.to_string()),
        }
    }
}

struct Output {
    body: String,
    /// Set when the body is written but the run still failed.
    failure: Option<Failure>,
}

impl Output {
    fn ok(body: String) -> Self {
        Output {
            body,
            failure: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verify) => ExitCode::from(3),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (cmd, common, fault) = match &cli.command {
        Cmd::R0(c) => (Command::R0, c, None),
        Cmd::Equilibria(c) => (Command::Equilibria, c, None),
        Cmd::Simulate(c) => (Command::Simulate, c, None),
        Cmd::Sweep(c) => (Command::Sweep, c, None),
        Cmd::Basin(c) => (Command::Basin, c, None),
        Cmd::Verify(v) => (Command::Verify, &v.common, v.inject_fault),
    };
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Failure::Config(format!("{}: {e}", common.config.display())))?;
    let cfg = RunConfig::parse(&text, cmd).map_err(Failure::Config)?;
    let format = common.format;

    let out = match cmd {
        Command::R0 => r0(&cfg, format),
        Command::Equilibria => equilibria(&cfg, format)?,
        Command::Simulate => simulate(&cfg, format)?,
        Command::Sweep => sweep(&cfg, format),
        Command::Basin => basin(&cfg, format)?,
        Command::Verify => verify(&cfg, format, fault),
    };
    emit(common.out.as_deref(), &out.body, cmd, format, &cfg)?;
    match out.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn emit(
    path: Option<&Path>,
    body: &str,
    cmd: Command,
    format: Option<Format>,
    cfg: &RunConfig,
) -> Result<(), Failure> {
    let Some(path) = path else {
        print!("{body}");
        return Ok(());
    };
    let io = |p: &Path, e: std::io::Error| Failure::Config(format!("{}: {e}", p.display()));
    std::fs::write(path, body).map_err(|e| io(path, e))?;
    let meta = json!({
        "command": cmd.as_str(),
        "format": format,
        "crate_version": twogroup_version(),
        "config": cfg,
    });
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".meta.json");
    let sidecar = PathBuf::from(sidecar);
    let mut text = serde_json::to_string_pretty(&meta).expect("config serializes");
    text.push('\n');
    std::fs::write(&sidecar, text).map_err(|e| io(&sidecar, e))
}

fn twogroup_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Fixed-point with up to 12 decimals and trailing zeros removed.
fn trimmed(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_string()
}

fn r0(cfg: &RunConfig, format: Option<Format>) -> Output {
    let m = &cfg.params;
    let (t1, t2) = m.r0_terms();
    let mut terms = Vec::new();
    if m.p() > 0.0 {
        terms.push(("R0_1", t1));
    }
    if m.q() > 0.0 {
        terms.push(("R0_2", t2));
    }
    let body = match format {
        None => {
            let mut s = format!("R0={}\n", trimmed(m.r0()));
            for (name, v) in &terms {
                let _ = writeln!(s, "{name}={}", trimmed(*v));
            }
            s
        }
        Some(Format::Csv) => {
            let mut s = format!("quantity,value\nR0,{}\n", fmt17(m.r0()));
            for (name, v) in &terms {
                let _ = writeln!(s, "{name},{}", fmt17(*v));
            }
            s
        }
        Some(Format::Json) => {
            let mut obj = serde_json::Map::new();
            obj.insert("R0".into(), json!(m.r0()));
            for (name, v) in &terms {
                obj.insert((*name).into(), json!(v));
            }
            to_json(&obj)
        }
    };
    Output::ok(body)
}

fn rest_points_csv(points: &[RestPoint]) -> String {
    let mut s = String::from("i1,i2,s,eig1_re,eig1_im,eig2_re,eig2_im,class,residual\n");
    for p in points {
        let x = p.location();
        let e = p.eigenvalues();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            fmt17(x.i1()),
            fmt17(x.i2()),
            fmt17(x.to_simplex().s()),
            fmt17(e[0].re),
            fmt17(e[0].im),
            fmt17(e[1].re),
            fmt17(e[1].im),
            p.class(),
            fmt17(p.residual()),
        );
    }
    s
}

fn equilibria(cfg: &RunConfig, format: Option<Format>) -> Result<Output, Failure> {
    let points = all_rest_points(&cfg.params).map_err(|e| Failure::Numerical(e.to_string()))?;
    Ok(Output::ok(match format {
        Some(Format::Csv) => rest_points_csv(&points),
        _ => to_json(&points),
    }))
}

fn simulate(cfg: &RunConfig, format: Option<Format>) -> Result<Output, Failure> {
    let block = cfg.simulate.as_ref().expect("checked by RunConfig::parse");
    let initial = InitialState::from_slice(block.system, &block.initial)?;
    let rest = all_rest_points(&cfg.params).map_err(|e| Failure::Numerical(e.to_string()))?;
    let tr = integrate(&cfg.params, &initial, &cfg.integrator(), &rest)?;

    let body = match format {
        Some(Format::Json) => {
            let rows: Vec<Vec<f64>> = tr
                .times()
                .iter()
                .zip(tr.states())
                .map(|(t, x)| std::iter::once(*t).chain(x.iter().copied()).collect())
                .collect();
            let limit = match tr.terminal() {
                TerminalReason::ConvergedTo(k) => Some(&rest[k]),
                _ => None,
            };
            to_json(&json!({
                "system": block.system,
                "columns": &block.system.columns()[..=block.system.dim()],
                "rows": rows,
                "terminal": tr.terminal(),
                "capture_time": tr.capture_time(),
                "limit": limit,
                "steps": tr.steps(),
                "max_projection": tr.max_projection(),
            }))
        }
        _ => tr.to_csv(),
    };
    let failure = (tr.terminal() == TerminalReason::StepSizeUnderflow)
        .then(|| Failure::Numerical(format!("step size underflow at t={}", tr.last_time())));
    Ok(Output { body, failure })
}

fn sweep(cfg: &RunConfig, format: Option<Format>) -> Output {
    let block = cfg.sweep.as_ref().expect("checked by RunConfig::parse");
    let rows = threshold_sweep(&cfg.params, block.parameter, &block.values);
    Output::ok(match format {
        Some(Format::Json) => to_json(&rows),
        _ => sweep_to_csv(&rows),
    })
}

fn basin(cfg: &RunConfig, format: Option<Format>) -> Result<Output, Failure> {
    let block = cfg.basin.as_ref().expect("checked by RunConfig::parse");
    let rep = basin_probe(&cfg.params, block.grid_n, &cfg.integrator())?;
    Ok(Output::ok(match format {
        Some(Format::Json) => to_json(&rep),
        _ => rep.to_csv(),
    }))
}

fn verify(cfg: &RunConfig, format: Option<Format>, fault: Option<Fault>) -> Output {
    let fault = match fault {
        Some(Fault::NegateField) => FaultInjection::NegateField,
        None => FaultInjection::None,
    };
    let rep = run_suite(&cfg.params, &cfg.integrator(), fault);
    let body = match format {
        None => {
            let mut s = String::new();
            for c in &rep.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "{tag} {}: {}", c.name, c.detail);
            }
            s
        }
        Some(Format::Csv) => {
            let mut s = String::from("check,passed,detail\n");
            for c in &rep.checks {
                let _ = writeln!(
                    s,
                    "{},{},\"{}\"",
                    c.name,
                    c.passed,
                    c.detail.replace('"', "\"\"")
                );
            }
            s
        }
        Some(Format::Json) => to_json(&rep),
    };
    Output {
        body,
        failure: (!rep.all_passed()).then_some(Failure::Verify),
    }
}
