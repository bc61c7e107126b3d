//! `casimir-sso` command-line front end.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when a result did not
//! converge or a self-check failed.

mod args;
mod commands;
mod output;
mod selfcheck;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use args::{Cli, Command, Common};
use commands::CliError;

const THREADS_ENV: &str = "CASIMIR_SSO_THREADS";

/// Turns a TOML table into `--key value` flags; booleans become bare flags.
fn config_flags(path: &str) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let table: toml::Table = text.parse().map_err(|e| format!("config {path}: {e}"))?;
    let mut flags = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => flags.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => flags.extend([flag, s]),
            toml::Value::Integer(i) => flags.extend([flag, i.to_string()]),
            toml::Value::Float(x) => flags.extend([flag, x.to_string()]),
            other => return Err(format!("config {path}: unsupported value for {key}: {other}")),
        }
    }
    Ok(flags)
}

/// Inserts config-file flags right after the subcommand, so that later
/// command-line occurrences override them.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let pos = argv.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(argv) };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => argv.get(pos + 1).cloned().ok_or("--config needs a path")?,
    };
    let mut flags = config_flags(&path)?;
    if flags.iter().any(|f| f == "--config") {
        return Err("config files cannot include other config files".into());
    }
    if argv.len() < 2 {
        return Ok(argv);
    }
    let mut out = argv[..2].to_vec();
    out.append(&mut flags);
    out.extend_from_slice(&argv[2..]);
    Ok(out)
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn emit(table: &output::Table, name: &str, common: &Common, config: Value) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Input(format!("cannot write output: {e}"));
    // a closed downstream pipe (e.g. `| head`) is not an error
    let io_ok = |r: std::io::Result<()>| match r {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(io),
    };
    match &common.output {
        Some(path) => {
            let mut f = std::fs::File::create(path).map_err(io)?;
            table.write(common.format, name, &config, &mut f).map_err(io)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            io_ok(table.write(common.format, name, &config, &mut lock))?;
            io_ok(lock.flush())?;
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<bool, CliError> {
    macro_rules! run {
        ($name:expr, $a:expr, $f:expr) => {{
            let table = $f($a)?;
            let config = serde_json::to_value($a).map_err(|e| CliError::Input(e.to_string()))?;
            emit(&table, $name, &$a.common, config)?;
            Ok(table.converged)
        }};
    }
    match &cli.command {
        Command::Plates(a) => run!("plates", a, commands::plates),
        Command::PlatesSweep(a) => run!("plates-sweep", a, commands::plates_sweep),
        Command::SphereEigs(a) => run!("sphere-eigs", a, commands::sphere_eigs),
        Command::CylinderEigs(a) => run!("cylinder-eigs", a, commands::cylinder_eigs),
        Command::CylinderTmatrix(a) => run!("cylinder-tmatrix", a, commands::cylinder_tmatrix),
        Command::CpPlate(a) => run!("cp-plate", a, commands::cp_plate),
        Command::StaticEigs(a) => run!("static-eigs", a, commands::static_eigs),
        Command::Selfcheck(a) => run!("selfcheck", a, |_| Ok::<_, CliError>(selfcheck::run())),
    }
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: result did not converge or a check failed");
            ExitCode::from(2)
        }
        Err(CliError::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
