use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use cartan_cli::config::{parse_batteries, SystemSpec};
use cartan_cli::report::{EXIT_CONFIG, EXIT_INTERNAL};
use cartan_cli::{parse_config, run, RunConfig, RunError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cartan", version, about = "Exterior-calculus diagnostics for action 1-forms")]
struct Cli {
    /// Print the preset registry and exit.
    #[arg(long)]
    list_presets: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run diagnostic batteries on a configuration file or a preset.
    Run {
        /// Configuration file. Optional when --preset is given.
        config: Option<PathBuf>,
        /// Comma-separated batteries, or `all`.
        #[arg(long)]
        battery: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Zero-test threshold.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Use a named preset as the system.
        #[arg(long)]
        preset: Option<String>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the text summary on stderr (default).
        #[arg(long, overrides_with = "no_summary")]
        summary: bool,
        #[arg(long)]
        no_summary: bool,
    },
}

fn fail(code: i32, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("cartan: {msg}");
    ExitCode::from(code as u8)
}

fn list_presets() {
    for name in cartan::systems::preset_names() {
        match cartan::systems::preset(name) {
            Ok(s) => {
                println!("{name}\n    {}", s.description);
                for p in &s.parameters {
                    println!("    {} = {}  ({})", p.name, p.value, p.meaning);
                }
            }
            Err(e) => println!("{name}\n    unavailable: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_presets {
        list_presets();
        return ExitCode::SUCCESS;
    }
    let Some(Command::Run {
        config,
        battery,
        seed,
        tolerance,
        preset,
        out,
        summary: _,
        no_summary,
    }) = cli.command
    else {
        return fail(EXIT_CONFIG, "nothing to do; try `cartan run --preset em.plane_wave` or --help");
    };

    let mut cfg = match &config {
        Some(path) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", path.display())),
            };
            match parse_config(&text) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_CONFIG, format!("{}: {e}", path.display())),
            }
        }
        None if preset.is_some() => RunConfig::default(),
        None => return fail(EXIT_CONFIG, "give a configuration file or --preset"),
    };
    if let Some(name) = preset {
        if !cartan::systems::preset_names().contains(&name.as_str()) {
            return fail(EXIT_CONFIG, format!("unknown preset `{name}` (see --list-presets)"));
        }
        cfg.system = Some(SystemSpec::Preset(name));
    }
    if let Some(list) = battery {
        match parse_batteries(&list) {
            Ok(b) => cfg.run.batteries = b,
            Err(e) => return fail(EXIT_CONFIG, e),
        }
    }
    if let Some(s) = seed {
        cfg.run.seed = s;
    }
    if let Some(t) = tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return fail(EXIT_CONFIG, "tolerance must be a positive number");
        }
        cfg.run.tolerance = t;
    }
    let out = out.or_else(|| cfg.run.out.as_ref().map(PathBuf::from));

    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e @ RunError::Config(_)) => return fail(EXIT_CONFIG, e),
        Err(e @ RunError::Internal(_)) => return fail(EXIT_INTERNAL, e),
    };
    let json = report.to_json();
    match &out {
        Some(path) => {
            if let Err(e) = fs::write(path, &json) {
                return fail(EXIT_INTERNAL, format!("{}: {e}", path.display()));
            }
        }
        None => print!("{json}"),
    }
    if !no_summary {
        eprint!("{}", report.summary());
    }
    ExitCode::from(report.totals.exit_code as u8)
}
