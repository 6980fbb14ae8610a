//! Statistics for comparing planners over repeated runs.
//!
//! Everything here works on minimization-form values internally. A
//! [`SampleGroup`] records the direction of its values and reports medians and
//! IQRs back in original units.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::planner::{RunTrace, TraceEvent};
use crate::twin::Direction;

/// Samples up to this combined size get an exact permutation p-value.
pub const EXACT_LIMIT: usize = 20;

/// Significance level used for pairwise comparisons.
pub const ALPHA: f64 = 0.05;

/// Bootstrap resamples used by the Scott-Knott split test.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Confidence of the Scott-Knott split test.
pub const BOOTSTRAP_CONFIDENCE: f64 = 0.99;

/// Minimum Â12 (either way round) for a Scott-Knott split.
pub const SPLIT_EFFECT: f64 = 0.6;

/// Vargha-Delaney magnitude classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectSize {
    Negligible,
    Small,
    Medium,
    Large,
}

impl EffectSize {
    /// Classifies `a12` by its distance from 0.5: 0.56 / 0.64 / 0.71 cut-offs
    /// (mirrored below 0.5).
    pub fn classify(a12: f64) -> Self {
        let a = a12.max(1.0 - a12);
        if a >= 0.71 {
            EffectSize::Large
        } else if a >= 0.64 {
            EffectSize::Medium
        } else if a >= 0.56 {
            EffectSize::Small
        } else {
            EffectSize::Negligible
        }
    }
}

/// One treatment's results, one value per repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGroup {
    pub label: String,
    pub values: Vec<f64>,
    pub direction: Direction,
}

impl SampleGroup {
    pub fn new(label: impl Into<String>, values: Vec<f64>, direction: Direction) -> Result<Self> {
        let label = label.into();
        if values.is_empty() {
            return Err(Error::InvalidParameter(format!("group `{label}` is empty")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "group `{label}` has non-finite values"
            )));
        }
        Ok(Self {
            label,
            values,
            direction,
        })
    }

    /// Values in minimization form.
    pub fn canonical(&self) -> Vec<f64> {
        self.values.iter().map(|&v| self.direction.canonical(v)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub median: f64,
    pub iqr: f64,
}

/// Percentile with linear interpolation between closest ranks; `q` in `[0, 1]`.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    percentile_sorted(&v, q)
}

fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi || sorted[lo] == sorted[hi] {
        return sorted[lo];
    }
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Median and interquartile range (75th minus 25th percentile).
pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("cannot summarize an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(Summary {
        median: percentile_sorted(&v, 0.5),
        iqr: percentile_sorted(&v, 0.75) - percentile_sorted(&v, 0.25),
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

/// Midranks (1-based) of the pooled sample, plus tie-group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Two-sided Wilcoxon rank-sum p-value.
///
/// Small samples (combined size up to [`EXACT_LIMIT`]) use the exact
/// permutation distribution of the midrank sum; larger ones use the normal
/// approximation with tie-corrected variance. A pooled sample with no spread
/// gives `p = 1`.
pub fn wilcoxon_rank_sum(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidParameter("rank-sum test needs two non-empty samples".into()));
    }
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let (n1, n2) = (xs.len(), ys.len());
    let n = n1 + n2;
    if ties.len() == 1 {
        return Ok(1.0);
    }
    let w_obs: f64 = ranks[..n1].iter().sum();
    if n <= EXACT_LIMIT {
        return Ok(exact_rank_sum_p(&ranks, n1, w_obs));
    }
    let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
    let u = w_obs - n1f * (n1f + 1.0) / 2.0;
    let mu = n1f * n2f / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (nf * (nf - 1.0));
    let var = n1f * n2f / 12.0 * ((nf + 1.0) - tie_term);
    if var <= 0.0 {
        return Ok(1.0);
    }
    let z = (u - mu) / var.sqrt();
    Ok(erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0))
}

/// Exact two-sided p: the share of all `C(n, n1)` rank subsets whose sum is at
/// least as far from its mean as the observed one. Counts subsets per
/// doubled-rank sum by dynamic programming.
fn exact_rank_sum_p(ranks: &[f64], n1: usize, w_obs: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // counts[j][s]: subsets of size j with doubled sum s
    let mut counts = vec![vec![0f64; max_sum + 1]; n1 + 1];
    counts[0][0] = 1.0;
    for &r in &doubled {
        for j in (1..=n1).rev() {
            for s in (r..=max_sum).rev() {
                let c = counts[j - 1][s - r];
                if c != 0.0 {
                    counts[j][s] += c;
                }
            }
        }
    }
    let total: f64 = counts[n1].iter().sum();
    let mean2 = n1 as f64 * (ranks.len() + 1) as f64;
    let obs_dev = (2.0 * w_obs - mean2).abs();
    let extreme: f64 = counts[n1]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as f64 - mean2).abs() >= obs_dev - 1e-9)
        .map(|(_, &c)| c)
        .sum();
    (extreme / total).min(1.0)
}

/// Vargha-Delaney Â12: probability that a value from `xs` is better than one
/// from `ys`, counting ties as half.
pub fn a12(xs: &[f64], ys: &[f64], direction: Direction) -> f64 {
    let mut score = 0.0;
    for &x in xs {
        let x = direction.canonical(x);
        for &y in ys {
            let y = direction.canonical(y);
            if x < y {
                score += 1.0;
            } else if x == y {
                score += 0.5;
            }
        }
    }
    score / (xs.len() * ys.len()) as f64
}

/// Between-group spread of splitting `l` into `l1` and `l2`:
/// `|l1|/|l| (mean(l1) - mean(l))^2 + |l2|/|l| (mean(l2) - mean(l))^2`.
pub fn split_delta(l1: &[f64], l2: &[f64]) -> f64 {
    let n1 = l1.len() as f64;
    let n2 = l2.len() as f64;
    let n = n1 + n2;
    let m1 = mean(l1);
    let m2 = mean(l2);
    let m = (m1 * n1 + m2 * n2) / n;
    n1 / n * (m1 - m).powi(2) + n2 / n * (m2 - m).powi(2)
}

fn welch_statistic(a: &[f64], b: &[f64]) -> f64 {
    let diff = (mean(a) - mean(b)).abs();
    let se = (variance(a) / a.len() as f64 + variance(b) / b.len() as f64).sqrt();
    if se == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / se
    }
}

/// Two-sample bootstrap test of equal means. Both samples are shifted onto
/// the pooled mean and resampled; the difference is significant when fewer
/// than `1 - confidence` of the resamples show a statistic above the
/// observed one.
pub fn bootstrap_differs<R: Rng + ?Sized>(
    a: &[f64],
    b: &[f64],
    resamples: usize,
    confidence: f64,
    rng: &mut R,
) -> bool {
    let observed = welch_statistic(a, b);
    let pooled_mean = (a.iter().sum::<f64>() + b.iter().sum::<f64>()) / (a.len() + b.len()) as f64;
    let shift = |v: &[f64]| -> Vec<f64> {
        let m = mean(v);
        v.iter().map(|x| x - m + pooled_mean).collect()
    };
    let (ha, hb) = (shift(a), shift(b));
    let draw = |v: &[f64], rng: &mut R| -> Vec<f64> {
        (0..v.len()).map(|_| v[rng.random_range(0..v.len())]).collect()
    };
    let mut bigger = 0usize;
    for _ in 0..resamples {
        let ra = draw(&ha, rng);
        let rb = draw(&hb, rng);
        if welch_statistic(&ra, &rb) > observed {
            bigger += 1;
        }
    }
    (bigger as f64 / resamples as f64) < 1.0 - confidence
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub label: String,
    /// 1 is best.
    pub rank: usize,
    /// Original units.
    pub median: f64,
    pub iqr: f64,
}

/// Scott-Knott result, ordered by rank, then median, then IQR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub entries: Vec<RankEntry>,
}

impl RankTable {
    pub fn rank_of(&self, label: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.rank)
    }

    pub fn distinct_ranks(&self) -> usize {
        self.entries.iter().map(|e| e.rank).max().unwrap_or(0)
    }
}

struct SkItem {
    group: usize,
    canon: Vec<f64>,
    median: f64,
    mean: f64,
    iqr: f64,
}

/// Scott-Knott ranking.
///
/// Groups are ordered by median; the list is cut where [`split_delta`] is
/// largest, and the cut is kept only if the bootstrap test rejects equality at
/// 99% confidence and Â12 between the two sides is at least 0.6. Kept cuts
/// recurse. Final clusters are ranked by mean.
pub fn scott_knott<R: Rng + ?Sized>(groups: &[SampleGroup], rng: &mut R) -> Result<RankTable> {
    if groups.len() < 2 {
        return Err(Error::InvalidParameter("Scott-Knott needs at least 2 groups".into()));
    }
    let direction = groups[0].direction;
    if groups.iter().any(|g| g.direction != direction) {
        return Err(Error::InvalidParameter("groups disagree on direction".into()));
    }
    let mut items: Vec<SkItem> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let canon = g.canonical();
            let s = summarize(&canon).expect("non-empty group");
            SkItem {
                group: i,
                mean: mean(&canon),
                median: s.median,
                iqr: s.iqr,
                canon,
            }
        })
        .collect();
    // content-only ordering keeps the result independent of input order
    items.sort_by(|a, b| {
        a.median
            .total_cmp(&b.median)
            .then(a.mean.total_cmp(&b.mean))
            .then(a.iqr.total_cmp(&b.iqr))
            .then_with(|| {
                let mut x = a.canon.clone();
                let mut y = b.canon.clone();
                x.sort_by(f64::total_cmp);
                y.sort_by(f64::total_cmp);
                x.iter()
                    .zip(&y)
                    .map(|(p, q)| p.total_cmp(q))
                    .find(|o| o.is_ne())
                    .unwrap_or(x.len().cmp(&y.len()))
            })
    });

    let mut clusters: Vec<(usize, usize)> = Vec::new();
    divide(&items, 0, items.len(), rng, &mut clusters);

    let pooled = |(lo, hi): (usize, usize)| -> Vec<f64> {
        items[lo..hi].iter().flat_map(|it| it.canon.iter().copied()).collect()
    };
    let mut ranked: Vec<(f64, (usize, usize))> =
        clusters.iter().map(|&c| (mean(&pooled(c)), c)).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1 .0.cmp(&b.1 .0)));

    let mut entries = Vec::with_capacity(items.len());
    let mut keys = Vec::with_capacity(items.len());
    for (r, (_, (lo, hi))) in ranked.iter().enumerate() {
        for it in &items[*lo..*hi] {
            let g = &groups[it.group];
            let s = summarize(&g.values).expect("non-empty group");
            entries.push(RankEntry {
                label: g.label.clone(),
                rank: r + 1,
                median: s.median,
                iqr: s.iqr,
            });
            keys.push((r + 1, it.median, it.iqr));
        }
    }
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        keys[a]
            .0
            .cmp(&keys[b].0)
            .then(keys[a].1.total_cmp(&keys[b].1))
            .then(keys[a].2.total_cmp(&keys[b].2))
            .then(entries[a].label.cmp(&entries[b].label))
    });
    Ok(RankTable {
        entries: order.into_iter().map(|i| entries[i].clone()).collect(),
    })
}

fn divide<R: Rng + ?Sized>(
    items: &[SkItem],
    lo: usize,
    hi: usize,
    rng: &mut R,
    out: &mut Vec<(usize, usize)>,
) {
    if hi - lo < 2 {
        out.push((lo, hi));
        return;
    }
    let values = |a: usize, b: usize| -> Vec<f64> {
        items[a..b].iter().flat_map(|it| it.canon.iter().copied()).collect()
    };
    let mut best: Option<(f64, usize)> = None;
    for cut in lo + 1..hi {
        let d = split_delta(&values(lo, cut), &values(cut, hi));
        if best.is_none_or(|(bd, _)| d > bd) {
            best = Some((d, cut));
        }
    }
    let (_, cut) = best.expect("at least one cut");
    let left = values(lo, cut);
    let right = values(cut, hi);
    let effect = a12(&left, &right, Direction::Minimize);
    let significant = bootstrap_differs(&left, &right, BOOTSTRAP_RESAMPLES, BOOTSTRAP_CONFIDENCE, rng)
        && effect.max(1.0 - effect) >= SPLIT_EFFECT;
    if significant {
        divide(items, lo, cut, rng, out);
        divide(items, cut, hi, rng, out);
    } else {
        out.push((lo, hi));
    }
}

fn post_change_segment(trace: &RunTrace, change: usize) -> Result<&[TraceEvent]> {
    let epochs = trace.epochs();
    let seg = epochs
        .get(change)
        .copied()
        .ok_or_else(|| Error::Trace(format!("trace has no environment change #{change}")))?;
    if change > 0 && !seg.first().is_some_and(|e| e.env_change) {
        return Err(Error::Trace(format!("trace has no environment change #{change}")));
    }
    if seg.is_empty() {
        return Err(Error::Trace("empty post-change segment".into()));
    }
    Ok(seg)
}

/// Ratio of post-change measurements the baseline needs to reach its own best
/// to the measurements the other trace needs to match it.
///
/// `change` selects the environment epoch (1 = after the first change).
/// Returns infinity when the other trace never matches the baseline.
pub fn speedup(base: &RunTrace, lidos: &RunTrace, change: usize) -> Result<f64> {
    let base_seg = post_change_segment(base, change)?;
    let lidos_seg = post_change_segment(lidos, change)?;
    let target = base_seg
        .iter()
        .map(TraceEvent::canonical_best)
        .fold(f64::INFINITY, f64::min);
    let t_base = base_seg
        .iter()
        .position(|e| e.canonical_best() <= target)
        .expect("target is attained")
        + 1;
    match lidos_seg.iter().position(|e| e.canonical_best() <= target) {
        Some(i) => Ok(t_base as f64 / (i + 1) as f64),
        None => Ok(f64::INFINITY),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::AdaptationPlan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn summary_examples() {
        assert_eq!(summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap().median, 2.5);
        assert_eq!(summarize(&[5.0]).unwrap(), Summary { median: 5.0, iqr: 0.0 });
        let s = summarize(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        assert!((s.iqr - 3.5).abs() < 1e-12);
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn a12_examples() {
        let d = Direction::Minimize;
        assert_eq!(a12(&[1.0, 2.0], &[1.0, 2.0], d), 0.5);
        assert_eq!(a12(&[1.0, 2.0], &[3.0, 4.0], d), 1.0);
        assert_eq!(a12(&[1.0, 2.0], &[1.0, 3.0], d), 0.625);
        assert_eq!(a12(&[3.0, 4.0], &[1.0, 2.0], Direction::Maximize), 1.0);
    }

    #[test]
    fn effect_classes() {
        assert_eq!(EffectSize::classify(0.5), EffectSize::Negligible);
        assert_eq!(EffectSize::classify(0.56), EffectSize::Small);
        assert_eq!(EffectSize::classify(0.64), EffectSize::Medium);
        assert_eq!(EffectSize::classify(0.75), EffectSize::Large);
        assert_eq!(EffectSize::classify(0.25), EffectSize::Large);
    }

    #[test]
    fn wilcoxon_examples() {
        assert_eq!(wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        // 2 of the C(6,3) = 20 subsets are as extreme
        let p = wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!((p - 0.1).abs() < 1e-12);
        assert_eq!(wilcoxon_rank_sum(&[2.0; 30], &[2.0; 30]).unwrap(), 1.0);
        assert!(wilcoxon_rank_sum(&[], &[1.0]).is_err());
    }

    #[test]
    fn wilcoxon_large_sample_separates() {
        let xs: Vec<f64> = (0..50).map(f64::from).collect();
        let ys: Vec<f64> = (100..150).map(f64::from).collect();
        assert!(wilcoxon_rank_sum(&xs, &ys).unwrap() < 1e-10);
    }

    #[test]
    fn wilcoxon_same_distribution_rarely_rejects() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut accepted = 0;
        for _ in 0..100 {
            let xs: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
            let ys: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
            if wilcoxon_rank_sum(&xs, &ys).unwrap() > ALPHA {
                accepted += 1;
            }
        }
        assert!(accepted >= 90, "accepted {accepted}/100");
    }

    #[test]
    fn delta_example() {
        assert_eq!(split_delta(&[1.0, 1.0], &[5.0, 5.0]), 4.0);
    }

    #[test]
    fn scott_knott_constants() {
        let g = |l: &str, v: f64| SampleGroup::new(l, vec![v; 50], Direction::Minimize).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = scott_knott(&[g("a", 0.0), g("b", 0.0), g("c", 5.0)], &mut rng).unwrap();
        assert_eq!(t.rank_of("a"), Some(1));
        assert_eq!(t.rank_of("b"), Some(1));
        assert_eq!(t.rank_of("c"), Some(2));
        assert_eq!(t.distinct_ranks(), 2);

        let gm = |l: &str, v: f64| SampleGroup::new(l, vec![v; 50], Direction::Maximize).unwrap();
        let t = scott_knott(&[gm("a", 0.0), gm("b", 0.0), gm("c", 5.0)], &mut rng).unwrap();
        assert_eq!(t.rank_of("c"), Some(1));
        assert_eq!(t.rank_of("a"), Some(2));
        assert_eq!(t.entries[0].label, "c");
        assert_eq!(t.entries[0].median, 5.0);
    }

    #[test]
    fn scott_knott_same_distribution_single_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut draw = || -> Vec<f64> { (0..50).map(|_| rng.random::<f64>()).collect() };
        let groups = vec![
            SampleGroup::new("x", draw(), Direction::Minimize).unwrap(),
            SampleGroup::new("y", draw(), Direction::Minimize).unwrap(),
        ];
        let t = scott_knott(&groups, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(t.distinct_ranks(), 1);
    }

    #[test]
    fn scott_knott_rejects_bad_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = SampleGroup::new("a", vec![1.0], Direction::Minimize).unwrap();
        assert!(scott_knott(std::slice::from_ref(&g), &mut rng).is_err());
        let h = SampleGroup::new("b", vec![1.0], Direction::Maximize).unwrap();
        assert!(scott_knott(&[g, h], &mut rng).is_err());
        assert!(SampleGroup::new("c", vec![], Direction::Minimize).is_err());
    }

    fn trace(bests: &[f64], change_at: usize) -> RunTrace {
        RunTrace {
            events: bests
                .iter()
                .enumerate()
                .map(|(i, &b)| TraceEvent {
                    measurement_index: i as u64 + 1,
                    plan: AdaptationPlan::new(vec![0]),
                    ft: b,
                    best_ft: b,
                    env: if i < change_at { "A".into() } else { "B".into() },
                    direction: Direction::Minimize,
                    adaptation_sent: false,
                    env_change: i == change_at,
                })
                .collect(),
            adaptations: Vec::new(),
        }
    }

    #[test]
    fn speedup_examples() {
        // 5 pre-change events, then 150 post-change
        let mut base = vec![50.0; 5];
        base.extend((1..=150).map(|m| if m >= 100 { 10.0 } else { 20.0 }));
        let mut lidos = vec![50.0; 5];
        lidos.extend((1..=150).map(|m| if m >= 20 { 9.0 } else { 30.0 }));
        let (b, l) = (trace(&base, 5), trace(&lidos, 5));
        assert_eq!(speedup(&b, &l, 1).unwrap(), 5.0);
        assert_eq!(speedup(&b, &b, 1).unwrap(), 1.0);

        let never: Vec<f64> = std::iter::repeat_n(50.0, 5).chain(std::iter::repeat_n(11.0, 150)).collect();
        assert!(speedup(&b, &trace(&never, 5), 1).unwrap().is_infinite());
        assert!(speedup(&b, &l, 2).is_err());
    }
}
