//! Command-line front end: configuration, subcommands and output files.

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use commands::CommandError;
use config::{parse_lines, parse_override, Command, ConfigError, RunConfig};
use output::{sha256_hex, write_run, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CommandArg {
    Spectrum,
    SqlMap,
    Sweep,
    Snr,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Noise spectra, SQL maps, parameter sweeps and magnetometer SNR for a
/// cavity read out by two coupled mechanical oscillators.
#[derive(Debug, Parser)]
#[command(name = "omdp-sense", version)]
struct Cli {
    #[arg(value_enum)]
    command: CommandArg,
    /// `key = value` configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

fn execute(cli: &Cli) -> Result<bool, CommandError> {
    let command = match cli.command {
        CommandArg::Spectrum => Command::Spectrum,
        CommandArg::SqlMap => Command::SqlMap,
        CommandArg::Sweep => Command::Sweep,
        CommandArg::Snr => Command::Snr,
        CommandArg::Validate => Command::Validate,
    };
    let mut entries = Vec::new();
    let input_digest = match &cli.config {
        Some(path) => {
            let bytes = fs::read(path)
                .map_err(|e| ConfigError::general(format!("cannot read {}: {e}", path.display())))?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| ConfigError::general(format!("{} is not UTF-8", path.display())))?;
            entries.extend(parse_lines(&text)?);
            format!("sha256:{}", sha256_hex(&bytes))
        }
        None => "none".to_string(),
    };
    for s in &cli.set {
        entries.push(parse_override(s)?);
    }
    let cfg = RunConfig::resolve(command, &entries)?;
    let (out, ok) = match command {
        Command::Spectrum => (commands::spectrum(&cfg)?, true),
        Command::SqlMap => (commands::sql_map(&cfg)?, true),
        Command::Sweep => (commands::sweep(&cfg)?, true),
        Command::Snr => (commands::snr(&cfg)?, true),
        Command::Validate => validate::validate(&cfg)?,
    };
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    for path in write_run(&cli.out, &cfg, input_digest, &out, format)? {
        println!("{}", path.display());
    }
    for n in &out.notes {
        eprintln!("note: {n}");
    }
    Ok(ok)
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("error: one or more checks failed");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
