//! Parse a configuration space, draw plans, and measure distances.

use lidos::{AdaptationPlan, ConfigSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SPACE: &str = "
# stream processing knobs
spouts: 1,2,4,8
bolts: 1,2,3,4,5,6
compression: 0,1
";

fn main() -> lidos::Result<()> {
    let space = ConfigSpace::parse(SPACE)?;
    println!("{} options, {} plans", space.len(), space.size());

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = space.random_plan(&mut rng);
    let b = space.random_plan(&mut rng);
    println!("a = {a}  normalized {:?}", space.normalize(&a));
    println!("b = {b}  distance to a {:.3}", space.normalized_distance(&a, &b)?);

    let corner = AdaptationPlan::new(vec![1, 1, 0]);
    for n in space.neighbors(&corner)? {
        println!("neighbour of {corner}: {n}");
    }

    let bad = AdaptationPlan::new(vec![3, 1, 0]);
    if let Err(e) = space.check(&bad) {
        println!("rejected {bad}: {e}");
    }
    Ok(())
}
