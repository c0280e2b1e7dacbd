use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// An exact probability, `numerator / denominator` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Probability {
    pub numerator: u128,
    pub denominator: u128,
}

impl Probability {
    pub fn zero() -> Self {
        Probability {
            numerator: 0,
            denominator: 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn as_ratio(self) -> Ratio<u128> {
        Ratio::new(self.numerator, self.denominator)
    }
}

impl From<Ratio<u128>> for Probability {
    fn from(r: Ratio<u128>) -> Self {
        Probability {
            numerator: *r.numer(),
            denominator: *r.denom(),
        }
    }
}

impl std::fmt::Display for Probability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Outcome counts under a full enumeration of some randomness.
///
/// Outcomes are canonical integer encodings of a view; the `BTreeMap`
/// keying makes the table independent of the order outcomes were recorded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistributionTable {
    counts: BTreeMap<Vec<u64>, u64>,
    total: u64,
}

impl DistributionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, outcome: Vec<u64>) {
        *self.counts.entry(outcome).or_insert(0) += 1;
        self.total += 1;
    }

    /// Adds another partition's counts.
    pub fn merge(&mut self, other: DistributionTable) {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn probability(&self, outcome: &[u64]) -> Probability {
        if self.total == 0 {
            return Probability::zero();
        }
        let c = self.counts.get(outcome).copied().unwrap_or(0);
        Ratio::new(c as u128, self.total as u128).into()
    }

    /// Sum of all outcome probabilities; exactly one for a nonempty table.
    pub fn total_probability(&self) -> Probability {
        self.counts
            .values()
            .fold(Ratio::from_integer(0u128), |acc, &c| {
                acc + Ratio::new(c as u128, self.total as u128)
            })
            .into()
    }

    /// Total variation distance `½ Σ |p(x) - p'(x)|`, exact.
    pub fn distance(&self, other: &DistributionTable) -> Probability {
        let (t1, t2) = (self.total as u128, other.total as u128);
        if t1 == 0 || t2 == 0 {
            return if t1 == t2 {
                Probability::zero()
            } else {
                Ratio::from_integer(1u128).into()
            };
        }
        let mut sum: u128 = 0;
        let mut visit = |a: u64, b: u64| {
            let (x, y) = (a as u128 * t2, b as u128 * t1);
            sum += x.abs_diff(y);
        };
        for (k, &a) in &self.counts {
            visit(a, other.counts.get(k).copied().unwrap_or(0));
        }
        for (k, &b) in &other.counts {
            if !self.counts.contains_key(k) {
                visit(0, b);
            }
        }
        Ratio::new(sum, 2 * t1 * t2).into()
    }

    /// Smallest outcome (in canonical order) whose probability differs.
    pub fn first_difference(
        &self,
        other: &DistributionTable,
    ) -> Option<(Vec<u64>, Probability, Probability)> {
        let keys: std::collections::BTreeSet<&Vec<u64>> =
            self.counts.keys().chain(other.counts.keys()).collect();
        keys.into_iter().find_map(|k| {
            let (p, q) = (self.probability(k), other.probability(k));
            (p != q).then(|| (k.clone(), p, q))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(outcomes: &[u64]) -> DistributionTable {
        let mut t = DistributionTable::new();
        for &o in outcomes {
            t.record(vec![o]);
        }
        t
    }

    #[test]
    fn identical_distributions_have_zero_distance() {
        let a = table(&[0, 1, 2, 3, 4]);
        let b = table(&[4, 3, 2, 1, 0]);
        assert_eq!(a, b);
        assert!(a.distance(&b).is_zero());
        assert_eq!(a.first_difference(&b), None);
        // same distribution, different enumeration sizes
        let c = table(&[0, 0, 1, 1, 2, 2, 3, 3, 4, 4]);
        assert!(a.distance(&c).is_zero());
    }

    #[test]
    fn disjoint_supports_are_distance_one() {
        let a = table(&[0, 0]);
        let b = table(&[1]);
        assert_eq!(a.distance(&b).as_ratio(), Ratio::from_integer(1));
        let (o, p, q) = a.first_difference(&b).unwrap();
        assert_eq!(o, vec![0]);
        assert_eq!(p.as_ratio(), Ratio::from_integer(1));
        assert!(q.is_zero());
    }

    #[test]
    fn partial_overlap() {
        // {0:1/2, 1:1/2} vs {0:1/4, 1:1/4, 2:1/2} -> (1/4 + 1/4 + 1/2)/2
        let a = table(&[0, 1]);
        let b = table(&[0, 1, 2, 2]);
        assert_eq!(a.distance(&b).as_ratio(), Ratio::new(1, 2));
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one(outcomes in prop::collection::vec(0u64..20, 1..200)) {
            let t = table(&outcomes);
            prop_assert_eq!(t.total_probability().as_ratio(), Ratio::from_integer(1));
        }

        #[test]
        fn order_and_partition_independent(
            outcomes in prop::collection::vec(0u64..10, 1..100),
            split in 0usize..100,
        ) {
            let mut rev = outcomes.clone();
            rev.reverse();
            prop_assert_eq!(table(&outcomes), table(&rev));
            let split = split.min(outcomes.len());
            let mut left = table(&outcomes[..split]);
            left.merge(table(&outcomes[split..]));
            prop_assert_eq!(left, table(&outcomes));
        }

        #[test]
        fn distance_is_symmetric(
            a in prop::collection::vec(0u64..6, 1..50),
            b in prop::collection::vec(0u64..6, 1..50),
        ) {
            let (ta, tb) = (table(&a), table(&b));
            prop_assert_eq!(ta.distance(&tb), tb.distance(&ta));
            prop_assert!(ta.distance(&tb).as_ratio() <= Ratio::from_integer(1));
        }
    }
}
