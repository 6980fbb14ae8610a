//! Score a pool with the auxiliary objective and run environmental selection.

use lidos::mmo::{crowding_distance, dominates};
use lidos::{environmental_selection, nondominated_sort, score_pool, AdaptationPlan, ConfigSpace, ScoredPlan};

fn main() -> lidos::Result<()> {
    let space = ConfigSpace::parse("x: 0,1,2,3,4,5,6,7,8,9")?;
    // two basins, around x = 2 and x = 7
    let ft = [9.0, 5.0, 3.0, 6.0, 9.5, 8.0, 4.5, 4.0, 7.0, 9.0];
    let mut pool: Vec<ScoredPlan> = (0..10)
        .map(|x| ScoredPlan::new(AdaptationPlan::new(vec![x]), ft[x as usize]))
        .collect();
    score_pool(&mut pool, &space, 1.0)?;

    println!("plan    ft    fa    g1    g2");
    for s in &pool {
        println!("{:>4} {:>5} {:>5} {:>5} {:>5}", s.plan.to_string(), s.ft, s.fa, s.g1, s.g2);
    }

    for front in nondominated_sort(&pool) {
        let cd = crowding_distance(&pool, &front);
        let members: Vec<String> = front
            .members
            .iter()
            .zip(&cd)
            .map(|(&i, d)| format!("{}({d:.2})", pool[i].plan))
            .collect();
        println!("front {}: {}", front.rank, members.join(" "));
    }

    let keep = environmental_selection(&pool, 5)?;
    let kept: Vec<String> = keep.iter().map(|&i| pool[i].plan.to_string()).collect();
    println!("selected: {}", kept.join(" "));
    println!("local optimum x=7 kept: {}", keep.contains(&7));

    // a worse target value can never dominate a better one
    println!("x=7 dominates x=2: {}", dominates(&pool[7], &pool[2]));
    Ok(())
}
