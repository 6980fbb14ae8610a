//! Meta multi-objectivization of the target objective.
//!
//! Each plan gets an auxiliary value `fa`: the target value of the neighbour
//! (among its nearest plans in the pool) whose target value differs most from
//! its own. Selection then happens on
//!
//! ```text
//! g1 = ft + w * fa
//! g2 = ft - w * fa
//! ```
//!
//! with Pareto dominance. A plan with strictly smaller `ft` can never be
//! dominated by one with larger `ft`, whatever their `fa` values, so the
//! target optimum always survives in the first front while plans with
//! different neighbourhoods stay mutually non-dominated.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::space::{AdaptationPlan, ConfigSpace};

/// A plan together with its objective values for one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPlan {
    pub plan: AdaptationPlan,
    /// Target objective, minimization form.
    pub ft: f64,
    /// Auxiliary objective.
    pub fa: f64,
    pub g1: f64,
    pub g2: f64,
}

impl ScoredPlan {
    /// A freshly measured plan. `fa` defaults to 0, which makes `g1 = g2 = ft`.
    pub fn new(plan: AdaptationPlan, ft: f64) -> Self {
        Self {
            plan,
            ft,
            fa: 0.0,
            g1: ft,
            g2: ft,
        }
    }

    pub fn with_aux(plan: AdaptationPlan, ft: f64, fa: f64) -> Self {
        let mut s = Self::new(plan, ft);
        s.fa = fa;
        s.transform(1.0);
        s
    }

    /// Applies `g1 = ft + w*fa`, `g2 = ft - w*fa`.
    pub fn transform(&mut self, w: f64) {
        self.g1 = self.ft + w * self.fa;
        self.g2 = self.ft - w * self.fa;
    }

    pub fn objectives(&self) -> [f64; 2] {
        [self.g1, self.g2]
    }
}

/// Sets `fa` on every member of `pool`.
///
/// For each `s`, the candidate set is every other member at the minimal
/// normalized distance to `s` (all ties kept). `fa(s)` becomes the `ft` of the
/// candidate whose `ft` differs most from `ft(s)`; equal differences go to the
/// lexicographically lowest plan.
pub fn assign_auxiliary(pool: &mut [ScoredPlan], space: &ConfigSpace) -> Result<()> {
    if pool.len() < 2 {
        return Err(Error::PoolTooSmall(pool.len()));
    }
    for s in pool.iter() {
        space.check(&s.plan)?;
    }
    let dist2 = |i: usize, j: usize| space.squared_distance(&pool[i].plan, &pool[j].plan);

    let mut aux = vec![0.0; pool.len()];
    for i in 0..pool.len() {
        let mut nearest: Vec<usize> = Vec::new();
        let mut best = f64::INFINITY;
        for j in (0..pool.len()).filter(|&j| j != i) {
            let d = dist2(i, j);
            match d.partial_cmp(&best) {
                Some(Ordering::Less) => {
                    best = d;
                    nearest.clear();
                    nearest.push(j);
                }
                Some(Ordering::Equal) => nearest.push(j),
                _ => {}
            }
        }
        let ft = pool[i].ft;
        let chosen = nearest
            .into_iter()
            .max_by(|&a, &b| {
                let da = (pool[a].ft - ft).abs();
                let db = (pool[b].ft - ft).abs();
                // larger difference wins; on ties the lower plan must compare as greater
                da.total_cmp(&db)
                    .then_with(|| pool[b].plan.cmp(&pool[a].plan))
            })
            .expect("pool has at least one other member");
        aux[i] = pool[chosen].ft;
    }
    for (s, fa) in pool.iter_mut().zip(aux) {
        s.fa = fa;
    }
    Ok(())
}

/// Assigns `fa` and applies the transform with weight `w`.
pub fn score_pool(pool: &mut [ScoredPlan], space: &ConfigSpace, w: f64) -> Result<()> {
    assign_auxiliary(pool, space)?;
    pool.iter_mut().for_each(|s| s.transform(w));
    Ok(())
}

/// Pareto dominance on `(g1, g2)`, both minimized.
pub fn dominates(a: &ScoredPlan, b: &ScoredPlan) -> bool {
    a.g1 <= b.g1 && a.g2 <= b.g2 && (a.g1 < b.g1 || a.g2 < b.g2)
}

/// One non-dominated layer, as indices into the sorted pool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Front {
    pub rank: usize,
    pub members: Vec<usize>,
}

/// Fast non-dominated sorting. Members within a front keep pool order.
pub fn nondominated_sort(pool: &[ScoredPlan]) -> Vec<Front> {
    let n = pool.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&pool[i], &pool[j]) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&pool[j], &pool[i]) {
                dominating[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(Front {
            rank: fronts.len(),
            members: current,
        });
        current = next;
    }
    fronts
}

/// NSGA-II crowding distance of each front member, aligned with
/// `front.members`. Per objective, members are ordered by value (stable on
/// ties) and the first and last get infinity.
pub fn crowding_distance(pool: &[ScoredPlan], front: &Front) -> Vec<f64> {
    let m = front.members.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    for obj in 0..2 {
        let value = |k: usize| pool[front.members[k]].objectives()[obj];
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        let lo = value(order[0]);
        let hi = value(order[m - 1]);
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range == 0.0 {
            continue;
        }
        for w in 1..m - 1 {
            let k = order[w];
            dist[k] += (value(order[w + 1]) - value(order[w - 1])) / range;
        }
    }
    dist
}

/// Front rank and crowding distance of every pool member.
pub fn rank_and_crowding(pool: &[ScoredPlan]) -> Vec<(usize, f64)> {
    let mut out = vec![(0usize, 0.0f64); pool.len()];
    for front in nondominated_sort(pool) {
        let cd = crowding_distance(pool, &front);
        for (&i, d) in front.members.iter().zip(cd) {
            out[i] = (front.rank, d);
        }
    }
    out
}

/// Picks `n` survivors: whole fronts by ascending rank, then the splitting
/// front by descending crowding distance (earlier pool position on ties).
/// Returns pool indices in selection order.
pub fn environmental_selection(pool: &[ScoredPlan], n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::InvalidParameter("population size must be positive".into()));
    }
    if pool.len() < n {
        return Err(Error::InvalidParameter(format!(
            "cannot select {n} from a pool of {}",
            pool.len()
        )));
    }
    let mut selected = Vec::with_capacity(n);
    for front in nondominated_sort(pool) {
        if selected.len() + front.members.len() <= n {
            selected.extend_from_slice(&front.members);
        } else {
            let cd = crowding_distance(pool, &front);
            let mut order: Vec<usize> = (0..front.members.len()).collect();
            order.sort_by(|&a, &b| {
                cd[b]
                    .total_cmp(&cd[a])
                    .then(front.members[a].cmp(&front.members[b]))
            });
            let room = n - selected.len();
            selected.extend(order.into_iter().take(room).map(|k| front.members[k]));
        }
        if selected.len() == n {
            break;
        }
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(g1: f64, g2: f64) -> ScoredPlan {
        ScoredPlan {
            plan: AdaptationPlan::new(vec![0]),
            ft: (g1 + g2) / 2.0,
            fa: (g1 - g2) / 2.0,
            g1,
            g2,
        }
    }

    fn line_space() -> ConfigSpace {
        ConfigSpace::parse("x: 0,1,2,3,4,5,6,7,8,9").unwrap()
    }

    fn at(x: i64, ft: f64) -> ScoredPlan {
        ScoredPlan::new(AdaptationPlan::new(vec![x]), ft)
    }

    #[test]
    fn aux_two_members() {
        let mut pool = vec![at(0, 5.0), at(3, 9.0)];
        assign_auxiliary(&mut pool, &line_space()).unwrap();
        assert_eq!(pool[0].fa, 9.0);
        assert_eq!(pool[1].fa, 5.0);
    }

    #[test]
    fn aux_prefers_largest_difference() {
        let mut pool = vec![at(4, 5.0), at(3, 4.0), at(5, 10.0)];
        assign_auxiliary(&mut pool, &line_space()).unwrap();
        assert_eq!(pool[0].fa, 10.0);
    }

    #[test]
    fn aux_difference_tie_goes_to_lowest_plan() {
        // ft 4 and ft 6 are both 1 away from 5
        let mut pool = vec![at(4, 5.0), at(5, 4.0), at(3, 6.0)];
        assign_auxiliary(&mut pool, &line_space()).unwrap();
        assert_eq!(pool[0].fa, 6.0, "plan (3) is lower than (5)");
    }

    #[test]
    fn aux_duplicate_is_sole_neighbour() {
        let mut pool = vec![at(4, 5.0), at(4, 5.0), at(5, 100.0)];
        assign_auxiliary(&mut pool, &line_space()).unwrap();
        assert_eq!(pool[0].fa, 5.0);
        assert_eq!(pool[1].fa, 5.0);
    }

    #[test]
    fn aux_needs_two() {
        assert!(matches!(
            assign_auxiliary(&mut [at(0, 1.0)], &line_space()),
            Err(Error::PoolTooSmall(1))
        ));
    }

    #[test]
    fn transform_examples() {
        let mut s = at(0, 5.0);
        s.fa = 3.0;
        s.transform(1.0);
        assert_eq!((s.g1, s.g2), (8.0, 2.0));
        s.fa = 0.0;
        s.transform(1.0);
        assert_eq!((s.g1, s.g2), (5.0, 5.0));
        let s = ScoredPlan::with_aux(AdaptationPlan::new(vec![0]), 10.0, 10.0);
        assert_eq!((s.g1, s.g2), (20.0, 0.0));
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&g(8.0, 2.0), &g(9.0, 3.0)));
        assert!(!dominates(&g(8.0, 2.0), &g(8.0, 2.0)));
        assert!(!dominates(&g(8.0, 2.0), &g(7.0, 3.0)));
        assert!(!dominates(&g(7.0, 3.0), &g(8.0, 2.0)));
    }

    #[test]
    fn sort_example() {
        let pool = vec![g(1.0, 1.0), g(2.0, 2.0), g(0.0, 3.0)];
        let fronts = nondominated_sort(&pool);
        assert_eq!(fronts.len(), 2);
        assert_eq!(fronts[0].members, vec![0, 2]);
        assert_eq!(fronts[1].members, vec![1]);
        assert_eq!(nondominated_sort(&pool[..1]).len(), 1);
        let incomparable = vec![g(0.0, 3.0), g(1.0, 2.0), g(2.0, 1.0), g(3.0, 0.0)];
        assert_eq!(nondominated_sort(&incomparable).len(), 1);
    }

    #[test]
    fn crowding_examples() {
        let pool = vec![g(0.0, 1.0), g(1.0, 0.0)];
        let f = Front { rank: 0, members: vec![0, 1] };
        assert!(crowding_distance(&pool, &f).iter().all(|d| d.is_infinite()));

        let pool = vec![g(0.0, 2.0), g(1.0, 1.0), g(2.0, 0.0)];
        let f = Front { rank: 0, members: vec![0, 1, 2] };
        let cd = crowding_distance(&pool, &f);
        assert_eq!(cd[1], 2.0);
        assert!(cd[0].is_infinite() && cd[2].is_infinite());

        let pool = vec![g(1.0, 1.0); 4];
        let f = Front { rank: 0, members: vec![0, 1, 2, 3] };
        let cd = crowding_distance(&pool, &f);
        assert!(cd[0].is_infinite() && cd[3].is_infinite());
        assert_eq!(&cd[1..3], &[0.0, 0.0]);
    }

    #[test]
    fn selection_examples() {
        let pool = vec![g(0.0, 3.0), g(1.0, 1.0), g(3.0, 0.0)];
        let mut sel = environmental_selection(&pool, 3).unwrap();
        sel.sort_unstable();
        assert_eq!(sel, vec![0, 1, 2]);

        let pool = vec![g(5.0, 5.0), g(0.0, 3.0), g(6.0, 6.0), g(3.0, 0.0)];
        let mut sel = environmental_selection(&pool, 2).unwrap();
        sel.sort_unstable();
        assert_eq!(sel, vec![1, 3]);

        // splitting front keeps both boundary members
        let pool = vec![g(0.0, 4.0), g(1.0, 3.0), g(2.0, 2.0), g(2.5, 1.5), g(4.0, 0.0)];
        let sel = environmental_selection(&pool, 3).unwrap();
        assert!(sel.contains(&0) && sel.contains(&4));

        assert!(environmental_selection(&pool, 0).is_err());
        assert!(environmental_selection(&pool, 6).is_err());
    }
}
