use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::release::PressRelease;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Yearly,
    Daily,
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "yearly" | "annual" => Ok(Granularity::Yearly),
            "daily" => Ok(Granularity::Daily),
            other => Err(format!(
                "unknown granularity {other:?} (expected yearly or daily)"
            )),
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Yearly => "yearly",
            Granularity::Daily => "daily",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bucket {
    Year(i32),
    Day(NaiveDate),
}

impl Bucket {
    pub fn of(date: NaiveDate, granularity: Granularity) -> Bucket {
        match granularity {
            Granularity::Yearly => Bucket::Year(date.year()),
            Granularity::Daily => Bucket::Day(date),
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bucket::Year(y) => write!(f, "{y}"),
            Bucket::Day(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

/// Counts per bucket, ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Series {
    pub points: Vec<(Bucket, u64)>,
}

impl Series {
    pub fn from_dates(dates: impl IntoIterator<Item = NaiveDate>, granularity: Granularity) -> Series {
        let mut counts: BTreeMap<Bucket, u64> = BTreeMap::new();
        for d in dates {
            *counts.entry(Bucket::of(d, granularity)).or_default() += 1;
        }
        Series {
            points: counts.into_iter().collect(),
        }
    }

    pub fn get(&self, bucket: Bucket) -> u64 {
        self.points
            .binary_search_by(|(b, _)| b.cmp(&bucket))
            .map(|i| self.points[i].1)
            .unwrap_or(0)
    }

    /// Busiest bucket; the earliest one on ties.
    pub fn max_bucket(&self) -> Option<(Bucket, u64)> {
        self.points.iter().copied().fold(None, |best, (b, c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((b, c)),
        })
    }

    pub fn total(&self) -> u64 {
        self.points.iter().map(|(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Releases per year or day. Releases with anomalous dates are left out.
pub fn output_series<'a>(
    corpus: impl IntoIterator<Item = &'a PressRelease>,
    granularity: Granularity,
) -> Series {
    Series::from_dates(
        corpus
            .into_iter()
            .filter(|r| !r.date_anomaly)
            .map(|r| r.metadata.date),
        granularity,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn yearly_and_daily() {
        let dates = [d(2019, 3, 1), d(2020, 1, 2), d(2020, 1, 2), d(2020, 5, 5)];
        let y = Series::from_dates(dates, Granularity::Yearly);
        assert_eq!(y.points, vec![(Bucket::Year(2019), 1), (Bucket::Year(2020), 3)]);
        let daily = Series::from_dates(dates, Granularity::Daily);
        assert_eq!(daily.max_bucket(), Some((Bucket::Day(d(2020, 1, 2)), 2)));
        assert_eq!(daily.get(Bucket::Day(d(2020, 5, 5))), 1);
        assert_eq!(Bucket::Day(d(2020, 1, 2)).to_string(), "2020-01-02");
    }

    #[test]
    fn empty() {
        let s = output_series(&[], Granularity::Yearly);
        assert!(s.is_empty());
        assert_eq!(s.max_bucket(), None);
    }

    #[test]
    fn ties_pick_earliest() {
        let s = Series::from_dates([d(2018, 1, 1), d(2017, 1, 1)], Granularity::Yearly);
        assert_eq!(s.max_bucket(), Some((Bucket::Year(2017), 1)));
    }
}
