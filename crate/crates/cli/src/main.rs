use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use dris_cli::{emit_csv, emit_plot_data, parse_config_file, preset, run_with_threads, RunManifest};

#[derive(Parser)]
#[command(name = "dris", version, about = "Monte Carlo rate sweeps for relay-aided double-RIS links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write CSV and/or plot data plus a replay manifest.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (flat `key = value`).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment: fig2, fig3 or appendix-props.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Write the CSV table (default when no format is chosen).
    #[arg(long)]
    csv: bool,
    /// Write plot-ready series blocks.
    #[arg(long)]
    plot_data: bool,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let (mut config, name) = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let stem = path
                .file_stem()
                .map_or_else(|| "run".to_string(), |s| s.to_string_lossy().into_owned());
            (parse_config_file(path)?, stem)
        }
        (None, Some(p)) => (preset(p)?, p.clone()),
        (None, None) => unreachable!("clap requires one of --config/--preset"),
    };
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    config.validate()?;

    let report = run_with_threads(&config, args.threads)?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output directory {}", args.out.display()))?;
    let mut manifest = RunManifest::new(config);
    manifest.config_path = args.config.clone();
    manifest.preset = args.preset.clone();
    manifest.wall_time = report.wall_time;

    let want_csv = args.csv || !args.plot_data;
    if want_csv {
        let path = args.out.join(format!("{name}.csv"));
        emit_csv(&report, &path)?;
        manifest.outputs.push(path);
    }
    if args.plot_data {
        let path = args.out.join(format!("{name}.dat"));
        emit_plot_data(&report, &path)?;
        manifest.outputs.push(path);
    }
    let manifest_path = args.out.join(format!("{name}.manifest.cfg"));
    manifest
        .write(&manifest_path)
        .with_context(|| format!("cannot write {}", manifest_path.display()))?;

    for curve in &report.curves {
        let rates: Vec<String> = curve
            .points
            .iter()
            .map(|p| format!("{}:{:.3}", p.axis_value, p.mean_rate))
            .collect();
        println!("{:<22} {}", curve.key.label(), rates.join(" "));
    }
    for path in &manifest.outputs {
        eprintln!("wrote {}", path.display());
    }
    eprintln!("wrote {} ({:.1} s)", manifest_path.display(), report.wall_time.as_secs_f64());
    Ok(())
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
