//! Comparison queries over classified indicator data.
//!
//! Four task families: clusters (which countries share or exceed a
//! reference's class), frequency (how many), trends (how one country moved
//! between two years) and distribution (in which years two countries agree).
//! Answers default to class granularity. [`Granularity::Raw`] compares the
//! underlying values instead.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::classify::{classify_ids, ClassAssignment, Classification, DEFAULT_CLASSES};
use crate::error::{Error, Result};
use crate::ingest::IndicatorSeries;
use crate::workspace::Workspace;

macro_rules! keyword_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(Error::invalid(format!(
                        concat!("unknown ", stringify!($name), " '{}'"), s
                    ))),
                }
            }
        }
    };
}

keyword_enum!(
    /// Relation of a country's class to the reference country's class.
    ClusterRelation { Same => "same", Higher => "higher", Lower => "lower" }
);
keyword_enum!(FrequencyRelation { Fewer => "fewer", Same => "same", Higher => "higher" });
keyword_enum!(DistributionMode { Same => "same", Differ => "differ" });
keyword_enum!(Direction { Increase => "increase", Decrease => "decrease", Stable => "stable" });
keyword_enum!(QueryKind { Clusters => "clusters", Frequency => "frequency", Trend => "trend", Distribution => "distribution" });
keyword_enum!(Granularity { Class => "class", Raw => "raw" });

impl From<FrequencyRelation> for ClusterRelation {
    fn from(r: FrequencyRelation) -> Self {
        match r {
            FrequencyRelation::Fewer => ClusterRelation::Lower,
            FrequencyRelation::Same => ClusterRelation::Same,
            FrequencyRelation::Higher => ClusterRelation::Higher,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Trend {
    pub direction: Direction,
    pub delta: f64,
    pub class_delta: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Ids(Vec<String>),
    Count(usize),
    Trend(Trend),
    Years(Vec<i32>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryResult {
    pub kind: QueryKind,
    pub payload: Payload,
    pub excluded_years: Vec<i32>,
}

impl QueryResult {
    pub fn ids(&self) -> Option<&[String]> {
        match &self.payload {
            Payload::Ids(v) => Some(v),
            _ => None,
        }
    }

    pub fn count(&self) -> Option<usize> {
        match self.payload {
            Payload::Count(n) => Some(n),
            _ => None,
        }
    }

    pub fn trend(&self) -> Option<Trend> {
        match self.payload {
            Payload::Trend(t) => Some(t),
            _ => None,
        }
    }

    pub fn years(&self) -> Option<&[i32]> {
        match &self.payload {
            Payload::Years(v) => Some(v),
            _ => None,
        }
    }
}

fn reference_class(c: &Classification, reference: &str) -> Result<usize> {
    match c.class_of(reference) {
        Some(ClassAssignment::Class(i)) => Ok(i),
        Some(ClassAssignment::Missing) => Err(Error::ReferenceHasNoData(reference.to_owned())),
        None => Err(Error::NotFound { kind: "country", id: reference.to_owned() }),
    }
}

fn related<T: PartialOrd>(x: T, reference: T, relation: ClusterRelation) -> bool {
    match relation {
        ClusterRelation::Same => x == reference,
        ClusterRelation::Higher => x > reference,
        ClusterRelation::Lower => x < reference,
    }
}

/// Other countries whose class relates to the reference's class as asked.
pub fn clusters_query(c: &Classification, reference: &str, relation: ClusterRelation) -> Result<BTreeSet<String>> {
    let rc = reference_class(c, reference)?;
    Ok(c.classified()
        .filter(|&(id, i)| id != reference && related(i, rc, relation))
        .map(|(id, _)| id.to_owned())
        .collect())
}

pub fn frequency_query(c: &Classification, reference: &str, relation: FrequencyRelation) -> Result<usize> {
    clusters_query(c, reference, relation.into()).map(|s| s.len())
}

/// Query evaluator over one series and a fixed country universe.
#[derive(Debug, Clone)]
pub struct QueryEngine<'a> {
    series: &'a IndicatorSeries,
    ids: Vec<String>,
    pub classes: usize,
    pub granularity: Granularity,
    /// Dead band for trend direction; |delta| ≤ epsilon is stable.
    pub epsilon: f64,
}

impl<'a> QueryEngine<'a> {
    pub fn new(series: &'a IndicatorSeries, ids: impl IntoIterator<Item = impl Into<String>>) -> Self {
        let mut ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        ids.sort();
        ids.dedup();
        Self { series, ids, classes: DEFAULT_CLASSES, granularity: Granularity::Class, epsilon: 0.0 }
    }

    /// Engine over a workspace dataset, with the workspace's features as
    /// the universe.
    pub fn for_workspace(ws: &'a Workspace, dataset: &str) -> Result<Self> {
        Ok(Self::new(ws.dataset(dataset)?, ws.features().ids()))
    }

    pub fn with_classes(mut self, k: usize) -> Self {
        self.classes = k;
        self
    }

    pub fn with_granularity(mut self, g: Granularity) -> Self {
        self.granularity = g;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn classify(&self, year: i32) -> Result<Classification> {
        classify_ids(self.ids.iter().map(String::as_str), self.series, year, self.classes)
    }

    fn check_country(&self, id: &str) -> Result<()> {
        if self.ids.binary_search_by(|x| x.as_str().cmp(id)).is_ok() {
            Ok(())
        } else {
            Err(Error::NotFound { kind: "country", id: id.to_owned() })
        }
    }

    fn cluster_set(&self, year: i32, reference: &str, relation: ClusterRelation) -> Result<BTreeSet<String>> {
        self.check_country(reference)?;
        match self.granularity {
            Granularity::Class => clusters_query(&self.classify(year)?, reference, relation),
            Granularity::Raw => {
                let rv = self
                    .series
                    .value(reference, year)
                    .ok_or_else(|| Error::ReferenceHasNoData(reference.to_owned()))?;
                Ok(self
                    .ids
                    .iter()
                    .filter(|id| id.as_str() != reference)
                    .filter(|id| self.series.value(id, year).is_some_and(|v| related(v, rv, relation)))
                    .cloned()
                    .collect())
            }
        }
    }

    pub fn clusters(&self, year: i32, reference: &str, relation: ClusterRelation) -> Result<QueryResult> {
        let set = self.cluster_set(year, reference, relation)?;
        Ok(QueryResult { kind: QueryKind::Clusters, payload: Payload::Ids(set.into_iter().collect()), excluded_years: vec![] })
    }

    pub fn frequency(&self, year: i32, reference: &str, relation: FrequencyRelation) -> Result<QueryResult> {
        let n = self.cluster_set(year, reference, relation.into())?.len();
        Ok(QueryResult { kind: QueryKind::Frequency, payload: Payload::Count(n), excluded_years: vec![] })
    }

    pub fn trend(&self, country: &str, y0: i32, y1: i32) -> Result<QueryResult> {
        if y0 >= y1 {
            return Err(Error::invalid(format!("trend needs from < to, got {y0}..{y1}")));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::invalid("epsilon must be non-negative"));
        }
        self.check_country(country)?;
        let (v0, v1) = (self.series.value(country, y0), self.series.value(country, y1));
        let (v0, v1) = match (v0, v1) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                let years = [(y0, v0), (y1, v1)]
                    .iter()
                    .filter(|(_, v)| v.is_none())
                    .map(|(y, _)| *y)
                    .collect();
                return Err(Error::MissingEndpoint { country: country.to_owned(), years });
            }
        };
        let delta = v1 - v0;
        let direction = if delta > self.epsilon {
            Direction::Increase
        } else if delta < -self.epsilon {
            Direction::Decrease
        } else {
            Direction::Stable
        };
        let class_at = |y| -> Result<i64> {
            let c = self.classify(y)?;
            Ok(reference_class(&c, country)? as i64)
        };
        let class_delta = class_at(y1)? - class_at(y0)?;
        Ok(QueryResult {
            kind: QueryKind::Trend,
            payload: Payload::Trend(Trend { direction, delta, class_delta }),
            excluded_years: vec![],
        })
    }

    pub fn distribution(&self, a: &str, b: &str, from: i32, to: i32, mode: DistributionMode) -> Result<QueryResult> {
        let (first, last) = self.series.year_span();
        if from > to || from < first || to > last {
            return Err(Error::invalid(format!(
                "year range {from}..{to} is not within the dataset span {first}..{last}"
            )));
        }
        self.check_country(a)?;
        self.check_country(b)?;
        let mut years = Vec::new();
        let mut excluded = Vec::new();
        for y in from..=to {
            let (Some(va), Some(vb)) = (self.series.value(a, y), self.series.value(b, y)) else {
                excluded.push(y);
                continue;
            };
            let same = match self.granularity {
                Granularity::Raw => va == vb,
                Granularity::Class => {
                    let c = self.classify(y)?;
                    c.class_of(a) == c.class_of(b)
                }
            };
            if same == (mode == DistributionMode::Same) {
                years.push(y);
            }
        }
        Ok(QueryResult { kind: QueryKind::Distribution, payload: Payload::Years(years), excluded_years: excluded })
    }
}
