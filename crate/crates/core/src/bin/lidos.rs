use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lidos::harness::{
    self, emit_trajectories, read_run, render_report, summarize_bundle, write_run, write_summary,
    write_trajectories, ScenarioSpec,
};
use lidos::{synth_landscape, Error, LandscapeParams, PlannerKind, Result};

#[derive(Parser)]
#[command(name = "lidos", version, about = "Lifelong planning experiments over measured configuration spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write traces, summaries and trajectories.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Recompute summary tables from the traces in a run directory.
    Summarize {
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-emit trajectory tables from the traces in a run directory.
    Trajectories {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        stride: Option<u64>,
    },
    /// Write a synthetic two-environment landscape and a scenario over it.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = LandscapeParams::default().n_options)]
        options: usize,
        #[arg(long, default_value_t = LandscapeParams::default().domain_size)]
        domain: usize,
        #[arg(long, default_value_t = LandscapeParams::default().n_peaks)]
        peaks: usize,
        #[arg(long, default_value_t = LandscapeParams::default().peak_shift)]
        shift: usize,
        /// Landscape noise seed; also the scenario's base seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Measurement budget of each leg.
        #[arg(long, default_value_t = 150)]
        budget: u64,
        #[arg(long, default_value_t = 50)]
        repetitions: usize,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,
    /// Comma-separated planner tags.
    #[arg(long, value_delimiter = ',')]
    planners: Option<Vec<PlannerKind>>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    stride: Option<u64>,
}

impl Overrides {
    fn apply(self, spec: &mut ScenarioSpec) {
        if let Some(v) = self.seed {
            spec.base_seed = v;
        }
        if let Some(v) = self.repetitions {
            spec.repetitions = v;
        }
        if let Some(v) = self.planners {
            spec.planners = v;
        }
        if let Some(v) = self.k {
            spec.k = v;
        }
        if let Some(v) = self.stride {
            spec.trajectory_stride = v;
        }
    }
}

fn summarize_dir(bundle: &harness::ResultBundle, out: &Path) -> Result<()> {
    let summary = summarize_bundle(bundle)?;
    write_summary(bundle, &summary, out)?;
    print!("{}", render_report(bundle, &summary));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            overrides,
        } => {
            let mut spec = ScenarioSpec::load(&scenario)?;
            overrides.apply(&mut spec);
            let bundle = harness::run_scenario(&spec)?;
            write_run(&bundle, &out)?;
            write_trajectories(&emit_trajectories(&bundle, spec.trajectory_stride)?, &out)?;
            summarize_dir(&bundle, &out)
        }
        Command::Summarize { out } => summarize_dir(&read_run(&out)?, &out),
        Command::Trajectories { out, stride } => {
            let bundle = read_run(&out)?;
            let stride = stride.unwrap_or(bundle.spec.trajectory_stride);
            write_trajectories(&emit_trajectories(&bundle, stride)?, &out)
        }
        Command::Synth {
            out,
            options,
            domain,
            peaks,
            shift,
            seed,
            budget,
            repetitions,
        } => {
            let land = synth_landscape(&LandscapeParams {
                n_options: options,
                domain_size: domain,
                n_peaks: peaks,
                peak_shift: shift,
                noise_seed: seed,
            })?;
            std::fs::create_dir_all(&out).map_err(|source| Error::Io {
                path: out.clone(),
                source,
            })?;
            let spec = harness::synthetic_scenario("synthetic", budget, repetitions, seed);
            for (env, table) in spec.environments.iter().zip([&land.env_a, &land.env_b]) {
                let mut bytes = Vec::new();
                table.write_csv(&land.space, &mut bytes)?;
                harness::write_atomic(&out.join(&env.dataset), &bytes)?;
            }
            spec.validate()?;
            harness::write_atomic(&out.join(harness::SCENARIO_FILE), spec.to_toml()?.as_bytes())?;
            println!("wrote {}", out.join(harness::SCENARIO_FILE).display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lidos: {e}");
            ExitCode::FAILURE
        }
    }
}
