//! Run the lifelong planner through an environment change and print the
//! adaptations it sends.

use std::sync::Arc;

use lidos::{synth_landscape, CyberTwin, LandscapeParams, LegStop, Lidos, Planner, PlannerParams};

fn main() -> lidos::Result<()> {
    let land = synth_landscape(&LandscapeParams::default())?;
    let (best_a, va) = land.env_a.best().map(|(p, v)| (p.clone(), v)).unwrap();
    let (best_b, vb) = land.env_b.best().map(|(p, v)| (p.clone(), v)).unwrap();
    println!("optimum in A: {best_a} ({va:.2}); in B: {best_b} ({vb:.2})");

    let mut twin = CyberTwin::new(Arc::new(land.into_twin_data()?));
    let params = PlannerParams {
        k: 50,
        ..PlannerParams::default()
    };
    let mut planner = Lidos::new(params, 11)?;

    planner.init_run(&mut twin)?;
    let leg = planner.run_scenario_leg(&mut twin, LegStop::Budget(300))?;
    println!("leg A: {} measurements in {} generations", leg.measurements, leg.generations);

    planner.on_environment_change(&mut twin, "B")?;
    let leg = planner.run_scenario_leg(&mut twin, LegStop::Budget(300))?;
    println!("leg B: {} measurements in {} generations", leg.measurements, leg.generations);

    for a in &planner.state().trace.adaptations {
        println!("  #{:<4} {}  send {}  ({:.2})", a.measurement_index, a.env, a.plan, a.ft);
    }
    if let Some(best) = planner.best_plan() {
        println!("best in B: {} ({:.2})", best.plan, best.ft);
    }
    Ok(())
}
