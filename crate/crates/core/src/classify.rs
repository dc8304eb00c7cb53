//! Jenks natural breaks by exact dynamic programming (Fisher's optimal
//! partitioning of sorted values), and per-year classification of a series.
//!
//! Breaks are only placed between distinct values, so equal values always
//! share a class. Among partitions whose within-class squared deviation
//! (SDCM) ties the optimum, the one with the lexicographically smallest
//! sequence of break positions wins.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ingest::{FeatureSet, IndicatorSeries};

pub const DEFAULT_CLASSES: usize = 4;
pub const MIN_CLASSES: usize = 2;
pub const MAX_CLASSES: usize = 9;

/// Closed value range `[lo, hi]` of one class (class minimum and maximum).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassBound {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Breaks {
    pub k: usize,
    pub bounds: Vec<ClassBound>,
    /// Goodness of variance fit, `1 - SDCM / SDAM`; 1.0 when the data has no variance.
    pub gvf: f64,
}

impl Breaks {
    /// Class of `value`: the first class whose upper bound is not below it,
    /// so values on an internal boundary fall into the lower class.
    /// Values above the last upper bound clamp into the top class.
    pub fn class_of(&self, value: f64) -> usize {
        self.bounds
            .iter()
            .position(|b| value <= b.hi)
            .unwrap_or(self.k - 1)
    }
}

/// Sum of squared deviations from the mean, two-pass.
pub fn sum_sq_dev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean) * (v - mean)).sum()
}

/// SDCM of `sorted` split at the given ascending end indices (the last class
/// ends at `sorted.len()` implicitly).
pub fn sdcm_of_split(sorted: &[f64], ends: &[usize]) -> f64 {
    let mut start = 0;
    let mut total = 0.0;
    for &end in ends.iter().chain(std::iter::once(&sorted.len())) {
        total += sum_sq_dev(&sorted[start..end]);
        start = end;
    }
    total
}

struct Prefix {
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl Prefix {
    fn new(sorted: &[f64], shift: f64) -> Self {
        let mut sum = Vec::with_capacity(sorted.len() + 1);
        let mut sq = Vec::with_capacity(sorted.len() + 1);
        sum.push(0.0);
        sq.push(0.0);
        for v in sorted {
            let d = v - shift;
            sum.push(sum.last().unwrap() + d);
            sq.push(sq.last().unwrap() + d * d);
        }
        Self { sum, sq }
    }

    /// SDCM of `sorted[i..j]`.
    fn cost(&self, i: usize, j: usize) -> f64 {
        let n = (j - i) as f64;
        let s = self.sum[j] - self.sum[i];
        (self.sq[j] - self.sq[i] - s * s / n).max(0.0)
    }
}

/// Optimal end indices of the first `k - 1` classes of `sorted`.
fn optimal_split(sorted: &[f64], k: usize) -> Vec<usize> {
    let n = sorted.len();
    // Allowed cut positions: between two distinct values.
    let cuts: Vec<usize> = (1..n).filter(|&i| sorted[i - 1] < sorted[i]).collect();
    if k == 1 {
        return Vec::new();
    }
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let prefix = Prefix::new(sorted, mean);
    let total = prefix.cost(0, n);
    let tol = 1e-9 * total.max(f64::MIN_POSITIVE);

    // Nodes are 0 (start), the cuts, and n (end). suffix[j][p] is the best
    // cost of splitting sorted[node p..n] into j classes.
    let mut nodes = Vec::with_capacity(cuts.len() + 2);
    nodes.push(0);
    nodes.extend_from_slice(&cuts);
    nodes.push(n);
    let m = nodes.len();
    let mut suffix = vec![vec![f64::INFINITY; m]; k + 1];
    for p in 0..m - 1 {
        suffix[1][p] = prefix.cost(nodes[p], n);
    }
    for j in 2..=k {
        for p in 0..m - 1 {
            let mut best = f64::INFINITY;
            for q in p + 1..m - 1 {
                let c = prefix.cost(nodes[p], nodes[q]) + suffix[j - 1][q];
                if c < best {
                    best = c;
                }
            }
            suffix[j][p] = best;
        }
    }

    // Walk forward taking the smallest cut that stays within tolerance of
    // the optimum of what remains.
    let mut ends = Vec::with_capacity(k - 1);
    let mut p = 0;
    for j in (2..=k).rev() {
        let target = suffix[j][p];
        let q = (p + 1..m - 1)
            .find(|&q| prefix.cost(nodes[p], nodes[q]) + suffix[j - 1][q] <= target + tol)
            .expect("a feasible cut exists when k <= distinct values");
        ends.push(nodes[q]);
        p = q;
    }
    ends
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn distinct_count(values: &[f64]) -> usize {
    let v = sorted_copy(values);
    if v.is_empty() {
        return 0;
    }
    1 + v.windows(2).filter(|w| w[0] < w[1]).count()
}

/// Jenks natural breaks into exactly `k` classes.
pub fn jenks_breaks(values: &[f64], k: usize) -> Result<Breaks> {
    if values.is_empty() {
        return Err(Error::invalid("no values to classify"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }
    if k == 0 {
        return Err(Error::invalid("class count must be at least 1"));
    }
    let sorted = sorted_copy(values);
    let distinct = distinct_count(&sorted);
    if k > distinct {
        return Err(Error::invalid(format!(
            "class count {k} exceeds {distinct} distinct value(s)"
        )));
    }
    let ends = optimal_split(&sorted, k);
    Ok(breaks_from_split(&sorted, &ends))
}

fn breaks_from_split(sorted: &[f64], ends: &[usize]) -> Breaks {
    let mut bounds = Vec::with_capacity(ends.len() + 1);
    let mut start = 0;
    for &end in ends.iter().chain(std::iter::once(&sorted.len())) {
        bounds.push(ClassBound { lo: sorted[start], hi: sorted[end - 1] });
        start = end;
    }
    let sdam = sum_sq_dev(sorted);
    let gvf = if sdam == 0.0 {
        1.0
    } else {
        (1.0 - sdcm_of_split(sorted, ends) / sdam).clamp(0.0, 1.0)
    };
    Breaks { k: bounds.len(), bounds, gvf }
}

/// Equal-interval reference classification (tests and comparisons only).
pub fn equal_interval_breaks(values: &[f64], k: usize) -> Result<Breaks> {
    if values.is_empty() || k == 0 {
        return Err(Error::invalid("equal interval needs values and k >= 1"));
    }
    let sorted = sorted_copy(values);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let width = (max - min) / k as f64;
    let bounds = (0..k)
        .map(|i| ClassBound {
            lo: min + width * i as f64,
            hi: if i + 1 == k { max } else { min + width * (i + 1) as f64 },
        })
        .collect::<Vec<_>>();
    let b = Breaks { k, bounds, gvf: 0.0 };
    let mut groups = vec![Vec::new(); k];
    for v in &sorted {
        groups[b.class_of(*v)].push(*v);
    }
    let sdam = sum_sq_dev(&sorted);
    let sdcm: f64 = groups.iter().map(|g| sum_sq_dev(g)).sum();
    let gvf = if sdam == 0.0 { 1.0 } else { 1.0 - sdcm / sdam };
    Ok(Breaks { gvf, ..b })
}

/// Class assignment of a single country.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassAssignment {
    Class(usize),
    Missing,
}

impl ClassAssignment {
    pub fn index(self) -> Option<usize> {
        match self {
            ClassAssignment::Class(i) => Some(i),
            ClassAssignment::Missing => None,
        }
    }
}

impl Serialize for ClassAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ClassAssignment::Class(i) => s.serialize_u64(*i as u64),
            ClassAssignment::Missing => s.serialize_str("missing"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Classification {
    pub dataset_id: String,
    pub year: i32,
    /// Class count asked for; `breaks.k` is the effective count.
    pub requested_k: usize,
    pub breaks: Breaks,
    pub classes: BTreeMap<String, ClassAssignment>,
}

impl Classification {
    pub fn class_of(&self, country: &str) -> Option<ClassAssignment> {
        self.classes.get(country).copied()
    }

    pub fn effective_k(&self) -> usize {
        self.breaks.k
    }

    /// Countries with a class, in id order.
    pub fn classified(&self) -> impl Iterator<Item = (&str, usize)> {
        self.classes
            .iter()
            .filter_map(|(id, c)| c.index().map(|i| (id.as_str(), i)))
    }
}

/// Classify `year` over an explicit list of country ids.
pub fn classify_ids<'a>(
    ids: impl IntoIterator<Item = &'a str>,
    s: &IndicatorSeries,
    year: i32,
    k: usize,
) -> Result<Classification> {
    if k == 0 {
        return Err(Error::invalid("class count must be at least 1"));
    }
    let ids: Vec<&str> = ids.into_iter().collect();
    let present: Vec<(&str, f64)> = ids
        .iter()
        .filter_map(|id| s.value(id, year).map(|v| (*id, v)))
        .collect();
    if present.is_empty() {
        return Err(Error::EmptyYear(year));
    }
    let values: Vec<f64> = present.iter().map(|(_, v)| *v).collect();
    let effective = k.min(distinct_count(&values));
    let breaks = jenks_breaks(&values, effective)?;
    let mut classes: BTreeMap<String, ClassAssignment> = ids
        .iter()
        .map(|id| (id.to_string(), ClassAssignment::Missing))
        .collect();
    for (id, v) in present {
        classes.insert(id.to_owned(), ClassAssignment::Class(breaks.class_of(v)));
    }
    Ok(Classification { dataset_id: s.id.clone(), year, requested_k: k, breaks, classes })
}

/// Classify one year of `s` over the countries of `fs`.
///
/// Countries without a value that year are excluded from the break
/// computation and assigned [`ClassAssignment::Missing`]. With fewer distinct
/// values than `k`, the effective class count drops to the distinct count.
pub fn classify_year(fs: &FeatureSet, s: &IndicatorSeries, year: i32, k: usize) -> Result<Classification> {
    classify_ids(fs.ids(), s, year, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Every contiguous split of sorted values into k classes that never
    /// separates equal values, in lexicographic order of cut positions.
    fn all_splits(sorted: &[f64], k: usize) -> Vec<Vec<usize>> {
        fn rec(sorted: &[f64], from: usize, left: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(acc.clone());
                return;
            }
            for cut in from..sorted.len() {
                if sorted[cut - 1] < sorted[cut] {
                    acc.push(cut);
                    rec(sorted, cut + 1, left - 1, acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(sorted, 1, k - 1, &mut Vec::new(), &mut out);
        out
    }

    fn brute_force_sdcm(values: &[f64], k: usize) -> f64 {
        let sorted = sorted_copy(values);
        all_splits(&sorted, k)
            .iter()
            .map(|ends| {
                let mut start = 0;
                let mut total = 0.0;
                for &end in ends.iter().chain(std::iter::once(&sorted.len())) {
                    let g = &sorted[start..end];
                    let mean = g.iter().sum::<f64>() / g.len() as f64;
                    total += g.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
                    start = end;
                }
                total
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn split_sdcm(values: &[f64], b: &Breaks) -> f64 {
        let mut groups = vec![Vec::new(); b.k];
        for v in values {
            groups[b.class_of(*v)].push(*v);
        }
        groups.iter().map(|g| sum_sq_dev(g)).sum()
    }

    #[test]
    fn single_class() {
        let b = jenks_breaks(&[5.0, 5.0, 5.0, 5.0], 1).unwrap();
        assert_eq!(b.bounds, vec![ClassBound { lo: 5.0, hi: 5.0 }]);
        assert_eq!(b.gvf, 1.0);
    }

    #[test]
    fn two_clusters_match_brute_force() {
        let values = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0];
        // Brute force: the best 2-split is after index 3 (SDCM 4.0).
        assert_eq!(brute_force_sdcm(&values, 2), 4.0);
        let b = jenks_breaks(&values, 2).unwrap();
        assert_eq!(b.bounds, vec![ClassBound { lo: 1.0, hi: 3.0 }, ClassBound { lo: 10.0, hi: 12.0 }]);
        assert_eq!(split_sdcm(&values, &b), 4.0);
    }

    #[test]
    fn k_equals_distinct_count() {
        let b = jenks_breaks(&[1.0, 2.0, 100.0], 3).unwrap();
        assert_eq!(
            b.bounds,
            vec![
                ClassBound { lo: 1.0, hi: 1.0 },
                ClassBound { lo: 2.0, hi: 2.0 },
                ClassBound { lo: 100.0, hi: 100.0 }
            ]
        );
        assert_eq!(b.gvf, 1.0);
    }

    #[test]
    fn invalid_class_counts() {
        assert!(jenks_breaks(&[1.0, 2.0], 3).is_err());
        assert!(jenks_breaks(&[1.0, 1.0, 1.0], 2).is_err());
        assert!(jenks_breaks(&[1.0, 2.0], 0).is_err());
        assert!(jenks_breaks(&[], 1).is_err());
    }

    #[test]
    fn ties_prefer_earliest_break() {
        // {1},{2,3} and {1,2},{3} tie at SDCM 0.5.
        let b = jenks_breaks(&[1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(b.bounds[0], ClassBound { lo: 1.0, hi: 1.0 });
    }

    #[test]
    fn boundary_ties_resolve_downward() {
        let b = Breaks {
            k: 2,
            bounds: vec![ClassBound { lo: 0.0, hi: 5.0 }, ClassBound { lo: 5.0, hi: 9.0 }],
            gvf: 0.0,
        };
        assert_eq!(b.class_of(5.0), 0);
        assert_eq!(b.class_of(5.5), 1);
    }

    #[test]
    fn equal_interval_reference() {
        let b = equal_interval_breaks(&[0.0, 1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(b.bounds[0].hi, 2.0);
        assert_eq!(b.class_of(2.0), 0);
        // Jenks never does worse than equal interval.
        let values = [1.0, 1.5, 2.0, 8.0, 9.0, 30.0];
        let j = jenks_breaks(&values, 3).unwrap();
        let e = equal_interval_breaks(&values, 3).unwrap();
        assert!(j.gvf >= e.gvf);
    }

    fn toy_series(values: &[(&str, f64)]) -> IndicatorSeries {
        IndicatorSeries {
            id: "t".into(),
            goal: 3,
            indicator: "i".into(),
            unit: "u".into(),
            values: values
                .iter()
                .map(|(c, v)| (c.to_string(), BTreeMap::from([(2005, Some(*v))])))
                .collect(),
        }
    }

    #[test]
    fn classify_small_year() {
        let s = toy_series(&[("DEU", 10.0), ("FRA", 10.0), ("FIN", 20.0)]);
        let c = classify_ids(["DEU", "FRA", "FIN"], &s, 2005, 2).unwrap();
        assert_eq!(c.class_of("DEU"), Some(ClassAssignment::Class(0)));
        assert_eq!(c.class_of("FRA"), Some(ClassAssignment::Class(0)));
        assert_eq!(c.class_of("FIN"), Some(ClassAssignment::Class(1)));
    }

    #[test]
    fn degenerate_year_falls_back() {
        let s = toy_series(&[("DEU", 10.0)]);
        let c = classify_ids(["DEU", "FRA", "SWE"], &s, 2005, 4).unwrap();
        assert_eq!(c.effective_k(), 1);
        assert_eq!(c.requested_k, 4);
        assert_eq!(c.class_of("DEU"), Some(ClassAssignment::Class(0)));
        assert_eq!(c.class_of("SWE"), Some(ClassAssignment::Missing));
        assert_eq!(c.classes.len(), 3);
    }

    #[test]
    fn empty_year_errors() {
        let s = toy_series(&[("DEU", 10.0)]);
        assert!(matches!(classify_ids(["DEU"], &s, 1890, 4), Err(Error::EmptyYear(1890))));
    }

    #[test]
    fn classification_json_shape() {
        let s = toy_series(&[("DEU", 10.0), ("FIN", 20.0)]);
        let c = classify_ids(["DEU", "FIN", "SWE"], &s, 2005, 2).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["classes"]["SWE"], "missing");
        assert_eq!(v["classes"]["FIN"], 1);
        assert_eq!(v["breaks"]["k"], 2);
        assert_eq!(v["datasetId"], "t");
    }

    fn small_dataset() -> impl Strategy<Value = (Vec<f64>, usize)> {
        prop::collection::vec(prop_oneof![(-50i32..50).prop_map(f64::from), -50.0f64..50.0], 1..=12)
            .prop_flat_map(|v| {
                let d = distinct_count(&v).min(4);
                (Just(v), 1..=d)
            })
    }

    proptest! {
        #[test]
        fn matches_exhaustive_optimum((values, k) in small_dataset()) {
            let b = jenks_breaks(&values, k).unwrap();
            let oracle = brute_force_sdcm(&values, k);
            let got = split_sdcm(&values, &b);
            prop_assert!((got - oracle).abs() <= 1e-9 * oracle.max(1.0), "got {got}, oracle {oracle}");
        }

        #[test]
        fn class_index_monotone_in_value((values, k) in small_dataset()) {
            let b = jenks_breaks(&values, k).unwrap();
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let classes: Vec<usize> = sorted.iter().map(|v| b.class_of(*v)).collect();
            prop_assert!(classes.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(b.bounds[0].lo, sorted[0]);
            prop_assert_eq!(b.bounds[b.k - 1].hi, sorted[sorted.len() - 1]);
        }

        #[test]
        fn permutation_invariant((values, k) in small_dataset(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = values.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(jenks_breaks(&values, k).unwrap(), jenks_breaks(&shuffled, k).unwrap());
        }

        #[test]
        fn affine_maps_preserve_classes((values, k) in small_dataset(), a in 0.01f64..100.0, c in -1000.0f64..1000.0) {
            let mapped: Vec<f64> = values.iter().map(|v| a * v + c).collect();
            prop_assume!(distinct_count(&mapped) == distinct_count(&values));
            let b1 = jenks_breaks(&values, k).unwrap();
            let b2 = jenks_breaks(&mapped, k).unwrap();
            for (v, m) in values.iter().zip(&mapped) {
                prop_assert_eq!(b1.class_of(*v), b2.class_of(*m));
            }
        }
    }
}
