//! Command-line driver.
//!
//! Subcommands:
//!   simulate --config <path> [--out-dir <dir>]
//!   verify --suite <energy|entropy|fisher|asymptotics|stability|all> [--config <path>]
//!   presets
//!   modes --domain <inline-json>
//!
//! Exit codes: 0 success; 2 usage or configuration error; 3 temperature
//! positivity lost; 4 numerical blowup; 5 i/o failure; 6 verification
//! failure. Failures print a one-line machine-readable JSON object to
//! stdout.

use std::path::PathBuf;
use std::process::ExitCode;

use thermoelastic::config::{parse_config, RunConfig};
use thermoelastic::domain::{enumerate_scalar_modes, enumerate_vector_modes, DomainSpec};
use thermoelastic::error::SimError;
use thermoelastic::presets;
use thermoelastic::runner;
use thermoelastic::verify::{run_suite, Suite};

const USAGE: &str = "usage:
  thermoelastic simulate --config <path> [--out-dir <dir>]
  thermoelastic verify --suite <energy|entropy|fisher|asymptotics|stability|all> [--config <path>]
  thermoelastic presets
  thermoelastic modes --domain <inline-json>

exit codes: 0 ok, 2 usage/config, 3 non-positive temperature, 4 numerical
blowup, 5 i/o, 6 verification failure. THERMO_THREADS caps worker
parallelism (default: all cores).";

fn exit_code_for(err: &SimError) -> u8 {
    match err {
        SimError::NonPositiveTemperature { .. } => 3,
        SimError::NumericalBlowup { .. } => 4,
        SimError::Io(_) => 5,
        _ => 2,
    }
}

fn print_error_json(err: &SimError) -> u8 {
    let code = exit_code_for(err);
    let t = match err {
        SimError::NonPositiveTemperature { t, .. } | SimError::NumericalBlowup { t } => Some(*t),
        _ => None,
    };
    let body = serde_json::json!({
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
            "t": t,
            "exit_code": code,
        }
    });
    println!("{body}");
    code
}

fn usage_error(msg: &str) -> u8 {
    eprintln!("error: {msg}\n\n{USAGE}");
    2
}

fn take_flag(args: &mut Vec<String>, flag: &str) -> Result<Option<String>, String> {
    if let Some(pos) = args.iter().position(|a| a == flag) {
        if pos + 1 >= args.len() {
            return Err(format!("{flag} needs a value"));
        }
        let value = args.remove(pos + 1);
        args.remove(pos);
        Ok(Some(value))
    } else {
        Ok(None)
    }
}

fn load_config(path: &str) -> Result<RunConfig, SimError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

fn cmd_simulate(mut args: Vec<String>) -> u8 {
    let config_path = match take_flag(&mut args, "--config") {
        Ok(Some(p)) => p,
        Ok(None) => return usage_error("simulate requires --config <path>"),
        Err(e) => return usage_error(&e),
    };
    let out_dir = match take_flag(&mut args, "--out-dir") {
        Ok(v) => v.map(PathBuf::from),
        Err(e) => return usage_error(&e),
    };
    if !args.is_empty() {
        return usage_error(&format!("unexpected arguments: {args:?}"));
    }
    let config = match load_config(&config_path) {
        Ok(c) => c,
        Err(e) => return print_error_json(&e),
    };
    if config.stepper.scheme == thermoelastic::dynamics::Scheme::Rk4Reference {
        let max_xi = config.domain.xi(config.domain.cutoff, config.domain.cutoff);
        if !config.stepper.rk4_wave_cfl_ok(max_xi, &config.params) {
            eprintln!(
                "warning: dt * sqrt(max_xi * (2 mu + lambda)) >= 2; the RK4 reference scheme may be unstable"
            );
        }
    }
    match runner::run(&config, out_dir.as_deref()) {
        Ok(artifacts) => {
            let s = &artifacts.summary;
            println!(
                "run complete: t = {}, invariants {}/{} passed",
                s.final_state.t,
                s.invariants.iter().filter(|c| c.passed).count(),
                s.invariants.len(),
            );
            println!("csv:     {}", artifacts.csv_path.display());
            println!("summary: {}", artifacts.summary_path.display());
            0
        }
        Err(e) => print_error_json(&e),
    }
}

fn cmd_verify(mut args: Vec<String>) -> u8 {
    let suite_name = match take_flag(&mut args, "--suite") {
        Ok(Some(s)) => s,
        Ok(None) => return usage_error("verify requires --suite <name>"),
        Err(e) => return usage_error(&e),
    };
    let suite = match Suite::parse(&suite_name) {
        Some(s) => s,
        None => return usage_error(&format!("unknown suite `{suite_name}`")),
    };
    let config = match take_flag(&mut args, "--config") {
        Ok(Some(p)) => match load_config(&p) {
            Ok(c) => Some(c),
            Err(e) => return print_error_json(&e),
        },
        Ok(None) => None,
        Err(e) => return usage_error(&e),
    };
    if !args.is_empty() {
        return usage_error(&format!("unexpected arguments: {args:?}"));
    }
    let results = run_suite(suite, config.as_ref());
    let mut all_passed = true;
    for r in &results {
        println!("{}", r.line());
        all_passed &= r.passed;
    }
    if all_passed {
        println!("suite {suite_name}: all {} criteria passed", results.len());
        0
    } else {
        println!("suite {suite_name}: FAILED");
        6
    }
}

fn cmd_presets() -> u8 {
    for (name, description) in presets::list_presets() {
        println!("{name:<18} {description}");
    }
    0
}

fn cmd_modes(mut args: Vec<String>) -> u8 {
    let domain_json = match take_flag(&mut args, "--domain") {
        Ok(Some(d)) => d,
        Ok(None) => return usage_error("modes requires --domain <inline-json>"),
        Err(e) => return usage_error(&e),
    };
    if !args.is_empty() {
        return usage_error(&format!("unexpected arguments: {args:?}"));
    }
    let domain: DomainSpec = match serde_json::from_str(&domain_json) {
        Ok(d) => d,
        Err(e) => return print_error_json(&SimError::Config(format!("domain json: {e}"))),
    };
    if let Err(e) = domain.validate() {
        return print_error_json(&e);
    }
    let scalar = enumerate_scalar_modes(&domain);
    let vector = enumerate_vector_modes(&domain);
    let body = serde_json::json!({
        "domain": domain,
        "scalar": scalar.modes,
        "vector": vector.modes,
    });
    println!("{}", serde_json::to_string_pretty(&body).expect("serializable"));
    0
}

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        return ExitCode::from(usage_error("missing subcommand"));
    }
    let cmd = args.remove(0);
    let code = match cmd.as_str() {
        "simulate" => cmd_simulate(args),
        "verify" => cmd_verify(args),
        "presets" => cmd_presets(),
        "modes" => cmd_modes(args),
        "--help" | "-h" | "help" => {
            println!("{USAGE}");
            0
        }
        other => usage_error(&format!("unknown subcommand `{other}`")),
    };
    ExitCode::from(code)
}
