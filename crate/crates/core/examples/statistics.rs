//! Rank-sum test, effect size, Scott-Knott ranking and the speedup metric.

use lidos::stats::{speedup, summarize};
use lidos::{a12, scott_knott, wilcoxon_rank_sum, AdaptationPlan, Direction, EffectSize, RunTrace, SampleGroup, TraceEvent};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn trace(values: &[f64]) -> RunTrace {
    let mut best = f64::INFINITY;
    let mut t = RunTrace::default();
    for (i, &v) in values.iter().enumerate() {
        best = best.min(v);
        t.events.push(TraceEvent {
            measurement_index: i as u64 + 1,
            plan: AdaptationPlan::new(vec![i as i64]),
            ft: v,
            best_ft: best,
            env: "B".into(),
            direction: Direction::Minimize,
            adaptation_sent: false,
            env_change: i == 0,
        });
    }
    t
}

fn main() -> lidos::Result<()> {
    let fast = [101.0, 98.5, 97.0, 99.2, 96.4, 98.8, 97.7, 95.9];
    let slow = [103.2, 99.9, 104.1, 101.5, 100.2, 102.7, 98.9, 103.8];
    let p = wilcoxon_rank_sum(&fast, &slow)?;
    let a = a12(&fast, &slow, Direction::Minimize);
    println!("p = {p:.4}, A12 = {a:.3} ({:?})", EffectSize::classify(a));
    let s = summarize(&fast)?;
    println!("fast: median {:.2}, IQR {:.2}", s.median, s.iqr);

    let groups = vec![
        SampleGroup::new("fast", fast.to_vec(), Direction::Minimize)?,
        SampleGroup::new("slow", slow.to_vec(), Direction::Minimize)?,
        SampleGroup::new("also_fast", fast.iter().map(|v| v + 0.1).collect(), Direction::Minimize)?,
    ];
    let table = scott_knott(&groups, &mut ChaCha8Rng::seed_from_u64(0))?;
    for e in &table.entries {
        println!("rank {} {:<10} median {:.2}", e.rank, e.label, e.median);
    }

    // the baseline reaches 90 after 10 measurements; the other trace after 2
    let mut base = vec![100.0; 9];
    base.push(90.0);
    let fast_trace = trace(&[95.0, 90.0, 85.0]);
    println!("speedup {:.1}", speedup(&trace(&base), &fast_trace, 0)?);
    Ok(())
}
