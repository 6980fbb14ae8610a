//! The adaptation-plan search space.
//!
//! A [`ConfigSpace`] is an ordered list of options, each with a finite,
//! strictly increasing list of integer values. Binary options use `{0, 1}`.
//! An [`AdaptationPlan`] assigns one value to every option.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One adaptation option and its ordered domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionSpec {
    name: String,
    domain: Vec<i64>,
}

impl OptionSpec {
    pub fn new(name: impl Into<String>, domain: Vec<i64>) -> Result<Self> {
        let name = name.into();
        if domain.is_empty() {
            return Err(Error::EmptyDomain(name));
        }
        if domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedDomain(name));
        }
        Ok(Self { name, domain })
    }

    /// Shorthand for a `{0, 1}` option.
    pub fn binary(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            domain: vec![0, 1],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[i64] {
        &self.domain
    }

    pub fn min(&self) -> i64 {
        self.domain[0]
    }

    pub fn max(&self) -> i64 {
        self.domain[self.domain.len() - 1]
    }

    /// Position of `value` in the ordered domain.
    pub fn position(&self, value: i64) -> Option<usize> {
        self.domain.binary_search(&value).ok()
    }

    /// Maps `value` onto `[0, 1]` by the option's range. Single-valued
    /// options map everything to 0.
    fn scale(&self, value: i64) -> f64 {
        let range = (self.max() - self.min()) as f64;
        if range == 0.0 {
            0.0
        } else {
            (value - self.min()) as f64 / range
        }
    }
}

/// A full assignment of values to every option. Orders lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdaptationPlan(Vec<i64>);

impl AdaptationPlan {
    pub fn new(values: Vec<i64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<i64>> for AdaptationPlan {
    fn from(values: Vec<i64>) -> Self {
        Self(values)
    }
}

impl fmt::Display for AdaptationPlan {
    /// Values joined by `;`, the encoding used in trace files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The Cartesian product of all option domains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSpace {
    options: Vec<OptionSpec>,
}

impl ConfigSpace {
    pub fn new(options: Vec<OptionSpec>) -> Result<Self> {
        if options.is_empty() {
            return Err(Error::NoOptions);
        }
        let mut names = std::collections::HashSet::new();
        for opt in &options {
            if !names.insert(opt.name.as_str()) {
                return Err(Error::DuplicateOption(opt.name.clone()));
            }
        }
        Ok(Self { options })
    }

    /// Parses a space document with one option per line, `name: v1,v2,...`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(document: &str) -> Result<Self> {
        let mut options = Vec::new();
        for (i, raw) in document.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |reason: &str| Error::MalformedSpace {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (name, values) = line
                .split_once(':')
                .ok_or_else(|| malformed("expected `name: v1,v2,...`"))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(malformed("empty option name"));
            }
            let domain = values
                .split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(|v| {
                    v.parse::<i64>()
                        .map_err(|_| malformed(&format!("`{v}` is not an integer")))
                })
                .collect::<Result<Vec<_>>>()?;
            options.push(OptionSpec::new(name, domain)?);
        }
        Self::new(options)
    }

    pub fn options(&self) -> &[OptionSpec] {
        &self.options
    }

    pub fn len(&self) -> usize {
        self.options.len()
    }

    pub fn is_empty(&self) -> bool {
        self.options.is_empty()
    }

    /// Number of plans in the full product, saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        self.options
            .iter()
            .fold(1u128, |acc, o| acc.saturating_mul(o.domain.len() as u128))
    }

    pub fn is_valid(&self, plan: &AdaptationPlan) -> bool {
        plan.len() == self.options.len()
            && self
                .options
                .iter()
                .zip(plan.values())
                .all(|(o, &v)| o.position(v).is_some())
    }

    pub fn check(&self, plan: &AdaptationPlan) -> Result<()> {
        if self.is_valid(plan) {
            Ok(())
        } else {
            Err(Error::InvalidPlan(plan.values().to_vec()))
        }
    }

    /// Draws each value uniformly from its option's domain.
    pub fn random_plan<R: Rng + ?Sized>(&self, rng: &mut R) -> AdaptationPlan {
        AdaptationPlan(
            self.options
                .iter()
                .map(|o| o.domain[rng.random_range(0..o.domain.len())])
                .collect(),
        )
    }

    /// The plan's coordinates scaled per option onto `[0, 1]`.
    pub fn normalize(&self, plan: &AdaptationPlan) -> Vec<f64> {
        self.options
            .iter()
            .zip(plan.values())
            .map(|(o, &v)| o.scale(v))
            .collect()
    }

    /// Euclidean distance after scaling each option onto `[0, 1]`.
    pub fn normalized_distance(&self, a: &AdaptationPlan, b: &AdaptationPlan) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.distance_unchecked(a, b))
    }

    pub(crate) fn distance_unchecked(&self, a: &AdaptationPlan, b: &AdaptationPlan) -> f64 {
        self.squared_distance(a, b).sqrt()
    }

    /// Squared normalized distance. Value differences are taken before
    /// scaling so that equal steps give bit-identical distances.
    pub(crate) fn squared_distance(&self, a: &AdaptationPlan, b: &AdaptationPlan) -> f64 {
        self.options
            .iter()
            .zip(a.values().iter().zip(b.values()))
            .map(|(o, (&x, &y))| {
                let range = (o.max() - o.min()) as f64;
                if range == 0.0 {
                    0.0
                } else {
                    let d = (x - y) as f64 / range;
                    d * d
                }
            })
            .sum()
    }

    /// All plans one domain step away from `plan` in exactly one option.
    pub fn neighbors(&self, plan: &AdaptationPlan) -> Result<Vec<AdaptationPlan>> {
        self.check(plan)?;
        let mut out = Vec::new();
        for (i, opt) in self.options.iter().enumerate() {
            let pos = opt.position(plan.0[i]).expect("checked above");
            if pos > 0 {
                let mut q = plan.clone();
                q.0[i] = opt.domain[pos - 1];
                out.push(q);
            }
            if pos + 1 < opt.domain.len() {
                let mut q = plan.clone();
                q.0[i] = opt.domain[pos + 1];
                out.push(q);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> ConfigSpace {
        ConfigSpace::parse("a: 0,1\nb: 1,2,3\n").unwrap()
    }

    #[test]
    fn parse_product_size() {
        assert_eq!(small().size(), 6);
        assert_eq!(small().options()[1].name(), "b");
    }

    #[test]
    fn parse_skips_comments_and_blanks() {
        let s = ConfigSpace::parse("# header\n\nx: 5\n").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.size(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            ConfigSpace::parse("a: 0,1\na: 2,3"),
            Err(Error::DuplicateOption(_))
        ));
        assert!(matches!(
            ConfigSpace::parse("a: 2,1"),
            Err(Error::UnsortedDomain(_))
        ));
        assert!(matches!(
            ConfigSpace::parse("a: 1,1"),
            Err(Error::UnsortedDomain(_))
        ));
        assert!(matches!(ConfigSpace::parse("a:"), Err(Error::EmptyDomain(_))));
        assert!(matches!(
            ConfigSpace::parse("a 0,1"),
            Err(Error::MalformedSpace { line: 1, .. })
        ));
        assert!(matches!(
            ConfigSpace::parse("a: 0,x"),
            Err(Error::MalformedSpace { .. })
        ));
        assert!(matches!(ConfigSpace::parse(""), Err(Error::NoOptions)));
    }

    #[test]
    fn validate() {
        let s = small();
        assert!(s.is_valid(&vec![0, 2].into()));
        assert!(!s.is_valid(&vec![2, 2].into()));
        assert!(!s.is_valid(&vec![0].into()));
        assert!(!s.is_valid(&vec![0, 2, 1].into()));
    }

    #[test]
    fn random_plan_forced_and_deterministic() {
        let single = ConfigSpace::parse("x: 5").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(single.random_plan(&mut rng).values(), &[5]);

        let s = ConfigSpace::parse("a: 0,1\nb: 0,1").unwrap();
        let p1 = s.random_plan(&mut ChaCha8Rng::seed_from_u64(42));
        let p2 = s.random_plan(&mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(p1, p2);
        assert!(s.is_valid(&p1));
    }

    #[test]
    fn random_plan_is_uniform() {
        // Binomial(10_000, 0.5) has sd 0.005 on the frequency; 0.02 is a 4-sigma bound.
        let s = ConfigSpace::parse("a: 0,1").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let ones = (0..10_000)
            .filter(|_| s.random_plan(&mut rng).values()[0] == 1)
            .count();
        let freq = ones as f64 / 10_000.0;
        assert!((freq - 0.5).abs() <= 0.02, "freq = {freq}");
    }

    #[test]
    fn distance_examples() {
        let s = small();
        let p: AdaptationPlan = vec![0, 2].into();
        assert_eq!(s.normalized_distance(&p, &p).unwrap(), 0.0);

        let bin = ConfigSpace::parse("a: 0,1\nb: 0,1").unwrap();
        let d = bin
            .normalized_distance(&vec![0, 1].into(), &vec![1, 1].into())
            .unwrap();
        assert_eq!(d, 1.0);

        let s = ConfigSpace::parse("a: 0,1\nb: 1,3,5").unwrap();
        let d = s
            .normalized_distance(&vec![0, 1].into(), &vec![1, 3].into())
            .unwrap();
        assert!((d - 1.25f64.sqrt()).abs() < 1e-12);
        assert!((d - 1.1180).abs() < 1e-4);

        assert!(s
            .normalized_distance(&vec![0, 2].into(), &vec![0, 1].into())
            .is_err());
    }

    #[test]
    fn single_valued_option_contributes_nothing() {
        let s = ConfigSpace::parse("a: 3\nb: 0,1").unwrap();
        let d = s
            .normalized_distance(&vec![3, 0].into(), &vec![3, 1].into())
            .unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn neighbor_examples() {
        let s = ConfigSpace::parse("a: 0,1").unwrap();
        assert_eq!(s.neighbors(&vec![0].into()).unwrap(), vec![vec![1].into()]);

        let s = ConfigSpace::parse("a: 0,1,2").unwrap();
        let n = s.neighbors(&vec![1].into()).unwrap();
        assert_eq!(n, vec![vec![0].into(), vec![2].into()]);

        let s = ConfigSpace::parse("a: 0,1,2\nb: 0,1,2").unwrap();
        assert_eq!(s.neighbors(&vec![1, 1].into()).unwrap().len(), 4);

        // sparse domains step by position, not by raw value
        let s = ConfigSpace::parse("a: 1,10,100").unwrap();
        let n = s.neighbors(&vec![10].into()).unwrap();
        assert_eq!(n, vec![vec![1].into(), vec![100].into()]);

        assert!(s.neighbors(&vec![5].into()).is_err());
    }

    fn space_strategy() -> impl Strategy<Value = ConfigSpace> {
        prop::collection::vec(prop::collection::btree_set(-50i64..50, 1..6), 1..5).prop_map(
            |domains| {
                let opts = domains
                    .into_iter()
                    .enumerate()
                    .map(|(i, d)| OptionSpec::new(format!("o{i}"), d.into_iter().collect()).unwrap())
                    .collect();
                ConfigSpace::new(opts).unwrap()
            },
        )
    }

    fn plans(space: &ConfigSpace, seed: u64, n: usize) -> Vec<AdaptationPlan> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| space.random_plan(&mut rng)).collect()
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(space in space_strategy(), seed in any::<u64>()) {
            let ps = plans(&space, seed, 3);
            let (a, b, c) = (&ps[0], &ps[1], &ps[2]);
            let ab = space.normalized_distance(a, b).unwrap();
            prop_assert_eq!(ab, space.normalized_distance(b, a).unwrap());
            prop_assert_eq!(space.normalized_distance(a, a).unwrap(), 0.0);
            prop_assert_eq!(ab == 0.0, a == b);
            let ac = space.normalized_distance(a, c).unwrap();
            let cb = space.normalized_distance(c, b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-12);
        }

        #[test]
        fn distance_ignores_affine_rescaling(
            space in space_strategy(),
            seed in any::<u64>(),
            scale in 1i64..7,
            shift in -100i64..100,
        ) {
            let rescaled = ConfigSpace::new(
                space.options().iter().map(|o| {
                    OptionSpec::new(o.name(), o.domain().iter().map(|v| v * scale + shift).collect()).unwrap()
                }).collect()
            ).unwrap();
            let map = |p: &AdaptationPlan| AdaptationPlan::new(p.values().iter().map(|v| v * scale + shift).collect());
            let ps = plans(&space, seed, 2);
            let d1 = space.normalized_distance(&ps[0], &ps[1]).unwrap();
            let d2 = rescaled.normalized_distance(&map(&ps[0]), &map(&ps[1])).unwrap();
            prop_assert!((d1 - d2).abs() < 1e-12);
        }

        #[test]
        fn neighborhood_is_symmetric(space in space_strategy(), seed in any::<u64>()) {
            let p = &plans(&space, seed, 1)[0];
            let ns = space.neighbors(p).unwrap();
            for q in &ns {
                prop_assert!(q != p);
                prop_assert!(space.is_valid(q));
                prop_assert!(space.neighbors(q).unwrap().contains(p));
            }
        }
    }
}
