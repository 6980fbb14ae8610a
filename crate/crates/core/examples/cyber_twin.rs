//! Answer measurements from recorded tables, with per-environment caching.

use std::sync::Arc;

use lidos::{AdaptationPlan, CyberTwin, Direction, Environment, MeasurementTable, TwinData};

const LIGHT: &str = "threads,cache_mb,performance
1,64,410
1,128,455
2,64,780
2,128,820
4,64,1190
4,128,1105
";

const HEAVY: &str = "threads,cache_mb,performance
1,64,300
1,128,390
2,64,560
2,128,720
4,64,640
4,128,930
";

fn main() -> lidos::Result<()> {
    // throughput, higher is better
    let load = |csv: &str, id: &str| {
        MeasurementTable::from_csv_reader(csv.as_bytes(), Environment::new(id, Direction::Maximize))
    };
    let (space, light) = load(LIGHT, "light")?;
    let (_, heavy) = load(HEAVY, "heavy")?;
    let data = Arc::new(TwinData::new(space, vec![light, heavy])?);
    let mut twin = CyberTwin::new(data);

    let plan = AdaptationPlan::new(vec![4, 64]);
    for _ in 0..2 {
        let m = twin.measure(&plan)?;
        println!("{plan} under {}: {} (fresh: {}, counter {})", twin.environment().id, m.raw, m.fresh, twin.counter());
    }

    twin.set_environment("heavy")?;
    let m = twin.measure(&plan)?;
    println!("{plan} under heavy: {} (fresh: {}, counter {})", m.raw, m.fresh, twin.counter());
    println!("coverage {:.2}", twin.coverage());

    // off-table plans are repaired to the closest measured one
    let odd = AdaptationPlan::new(vec![3, 100]);
    println!("{odd} repairs to {}", twin.nearest_measured(&odd));
    Ok(())
}
