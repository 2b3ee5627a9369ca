use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bohm_tunnel::config::ScenarioConfig;
use bohm_tunnel::experiment::{self, SimulationOptions};
use bohm_tunnel::presets::{self, PresetKind};
use bohm_tunnel::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bohm-tunnel", version, about = "Bohmian velocity inside tunnelling barriers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a config file and write frames.csv, probes.csv, summary.json.
    Run(RunArgs),
    /// List the available presets.
    List,
    /// Check a config file and report every violation.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the resolved config of a preset as JSON.
    Show { preset: String },
}

#[derive(Args)]
struct RunArgs {
    /// Preset name (see `list`).
    #[arg(required_unless_present = "config", conflicts_with = "config")]
    preset: Option<String>,
    /// JSON scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: out/<name>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Time step override, ps.
    #[arg(long = "dt")]
    dt_ps: Option<f64>,
    /// Grid size override (power of two).
    #[arg(long)]
    grid_n: Option<usize>,
    /// Steps between emitted frames.
    #[arg(long)]
    frame_stride: Option<usize>,
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::from_json(&text)
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::InvalidConfig(_) | Error::UnknownPreset(_) | Error::Json(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn run(args: RunArgs) -> Result<(), Error> {
    let mut config = match (&args.preset, &args.config) {
        (Some(name), _) => {
            let preset = presets::find(name)?;
            match preset.kind {
                PresetKind::Simulation(c) => c,
                PresetKind::WidthTable(t) => {
                    let out = args.out.unwrap_or_else(|| Path::new("out").join(&t.name));
                    experiment::write_width_table(&t, &out)?;
                    eprintln!("{}: wrote {}", t.name, out.display());
                    return Ok(());
                }
            }
        }
        (None, Some(path)) => load_config(path)?,
        (None, None) => unreachable!("clap requires a preset or --config"),
    };
    if let Some(dt) = args.dt_ps {
        config.dt_ps = dt;
    }
    if let Some(n) = args.grid_n {
        config.grid.n = n;
    }
    if let Some(k) = args.frame_stride {
        config.frame_stride = k;
    }
    config.validate().map_err(Error::InvalidConfig)?;

    let out = args
        .out
        .unwrap_or_else(|| Path::new("out").join(&config.name));
    eprintln!(
        "{}: {} steps on {} points",
        config.name,
        config.n_steps(),
        config.grid.n
    );
    let start = Instant::now();
    let result = experiment::simulate(&config, SimulationOptions { record_frames: true })?;
    experiment::write_outputs(&result, &out)?;
    eprintln!(
        "{}: wrote {} in {:.1} s",
        config.name,
        out.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn list() {
    println!(
        "{:<16} {:>14} {:>8} {:>11}  {}",
        "name", "detuning_meV", "channels", "gamma_GHz", "figure"
    );
    for p in presets::all() {
        println!(
            "{:<16} {:>14.4} {:>8} {:>11.4}  {}",
            p.name,
            if p.detuning().abs() < 1e-12 { 0.0 } else { p.detuning() },
            p.channels(),
            p.dissipation(),
            p.figure
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::List => {
            list();
            Ok(())
        }
        Command::Validate { config } => load_config(&config).and_then(|c| {
            c.validate().map_err(Error::InvalidConfig)?;
            println!("{}: valid", config.display());
            Ok(())
        }),
        Command::Show { preset } => presets::find(&preset).and_then(|p| {
            let json = match &p.kind {
                PresetKind::Simulation(c) => c.to_json(),
                PresetKind::WidthTable(t) => t.to_json(),
            };
            println!("{json}");
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
