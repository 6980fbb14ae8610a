//! Generate a two-environment landscape and write it as measurement CSVs.

use std::path::PathBuf;

use lidos::twin::is_local_optimum;
use lidos::{synth_landscape, LandscapeParams};

fn main() -> lidos::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/landscape".into()));
    let params = LandscapeParams {
        n_options: 4,
        domain_size: 8,
        n_peaks: 3,
        ..LandscapeParams::default()
    };
    let land = synth_landscape(&params)?;
    println!("{} plans, peaks at:", land.space.size());
    for p in &land.peaks {
        println!("  {p}: A {:.2}, B {:.2}", land.env_a.get(p).unwrap(), land.env_b.get(p).unwrap());
    }

    let (best_a, _) = land.env_a.best().unwrap();
    let (best_b, _) = land.env_b.best().unwrap();
    println!("optimum in A: {best_a}, in B: {best_b}");
    println!("A's optimum is a local optimum of B: {}", is_local_optimum(&land.space, &land.env_b, best_a)?);

    std::fs::create_dir_all(&out).map_err(|source| lidos::Error::Io { path: out.clone(), source })?;
    for (name, table) in [("env_a.csv", &land.env_a), ("env_b.csv", &land.env_b)] {
        let file = std::fs::File::create(out.join(name)).map_err(|source| lidos::Error::Io {
            path: out.join(name),
            source,
        })?;
        table.write_csv(&land.space, file)?;
    }
    println!("wrote {}", out.display());
    Ok(())
}
