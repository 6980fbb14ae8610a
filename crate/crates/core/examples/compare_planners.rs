//! Compare all four planners on a synthetic two-environment scenario and
//! write the result files.
//!
//! ```text
//! cargo run --release --example compare_planners -- [OUT_DIR] [REPETITIONS]
//! ```

use std::path::PathBuf;
use std::sync::Arc;

use lidos::harness::{self, render_report, synthetic_scenario};
use lidos::{emit_trajectories, run_scenario_with_data, summarize_bundle, synth_landscape, LandscapeParams};

fn main() -> lidos::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "target/compare_planners".into()));
    let reps = args.next().and_then(|r| r.parse().ok()).unwrap_or(20);

    let data = synth_landscape(&LandscapeParams::default())?.into_twin_data()?;
    let spec = synthetic_scenario("synthetic", 150, reps, 1);
    let bundle = run_scenario_with_data(&spec, Arc::new(data))?;
    let summary = summarize_bundle(&bundle)?;
    print!("{}", render_report(&bundle, &summary));

    harness::write_run(&bundle, &out)?;
    harness::write_summary(&bundle, &summary, &out)?;
    harness::write_trajectories(&emit_trajectories(&bundle, spec.trajectory_stride)?, &out)?;
    println!("\nresults in {}", out.display());
    Ok(())
}
