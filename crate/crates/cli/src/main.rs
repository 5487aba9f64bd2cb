use std::path::PathBuf;
use std::process::ExitCode;

use bergman_core::experiments::{run, Experiment, ExperimentConfig, Format};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bergman-lab", version, about = "Truncated weighted estimates for Bergman projections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Human,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment; flags override fields of the JSON config.
    Run {
        #[arg(long)]
        experiment: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        depth_max: Option<u32>,
        #[arg(long)]
        depth_min: Option<u32>,
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        format: OutFormat,
    },
    /// List the experiments.
    List,
    /// Print the default config of an experiment as JSON.
    Preset { experiment: String },
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn real_main(cli: Cli) -> bergman_core::Result<u8> {
    match cli.command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<28}{}", e.name(), e.summary());
            }
            Ok(0)
        }
        Command::Preset { experiment } => {
            println!("{}", ExperimentConfig::preset(experiment.parse()?).to_json()?);
            Ok(0)
        }
        Command::Run {
            experiment,
            config,
            depth_max,
            depth_min,
            map,
            weight,
            p,
            seed,
            out,
            format,
        } => {
            let experiment: Experiment = experiment.parse()?;
            let mut cfg = match config {
                Some(path) => ExperimentConfig::load(&path)?,
                None => ExperimentConfig::preset(experiment),
            };
            cfg.experiment = experiment;
            if let Some(d) = depth_max {
                cfg.depth_max = d;
            }
            if let Some(d) = depth_min {
                cfg.depth_min = d;
            }
            if let Some(m) = map {
                cfg.map = m;
            }
            if let Some(w) = weight {
                cfg.weight = w;
            }
            if p.is_some() {
                cfg.p = p;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if out.is_some() {
                cfg.out = out;
            }
            let report = run(&cfg)?;
            match &cfg.out {
                Some(dir) => {
                    let formats: &[Format] = match format {
                        OutFormat::Csv => &[Format::Csv],
                        OutFormat::Human => &[Format::Human],
                        OutFormat::Both => &[Format::Csv, Format::Human],
                    };
                    for f in formats {
                        for path in report.emit(dir, *f)? {
                            eprintln!("wrote {}", path.display());
                        }
                    }
                }
                None => print!("{}", report.human()),
            }
            eprintln!("wall-clock {:.3} s", report.wall_clock.as_secs_f64());
            Ok(report.exit_code() as u8)
        }
    }
}
