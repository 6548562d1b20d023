mod support;

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use prmetrics::analytics::{keyword_frequency, output_series, type_distribution, Distribution, Granularity};
use prmetrics::backlink::{merge_protocol_variants, remerge, RawLinkRecord};
use prmetrics::mention::{resolve_chain, TableOracle, Termination};
use prmetrics::{CanonicalUrl, Fixed, MetadataRecord, PressRelease, PressType, Region};
use proptest::prelude::*;
use support::{pct_oracle, ratio_oracle};

fn release(n: usize, year: i32, kind: PressType, keywords: Vec<String>) -> PressRelease {
    let url = CanonicalUrl::parse(&format!("www.eurekalert.org/pub_releases/{year}-01/r-{n}.php")).unwrap();
    PressRelease::new(
        url,
        MetadataRecord {
            keywords,
            description: String::new(),
            date: NaiveDate::from_ymd_opt(year, 1, 1).unwrap(),
            funder: String::new(),
            journal: Vec::new(),
            press_type: kind,
            institution: String::new(),
            meeting: String::new(),
            region: Region::Unknown,
        },
        Vec::new(),
    )
}

fn corpus_strategy() -> impl Strategy<Value = Vec<PressRelease>> {
    prop::collection::vec(
        (
            prop_oneof![Just(1970), 1996..=2020i32],
            prop::sample::select(PressType::ALL.to_vec()),
            prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e", "f"]), 0..6),
        ),
        0..60,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (y, t, kws))| release(i, y, t, kws.into_iter().map(str::to_string).collect()))
            .collect()
    })
}

proptest! {
    #[test]
    fn percent_matches_integer_rounding(part in 0u64..1_000_000, extra in 0u64..1_000_000, places in 0u8..4) {
        let whole = part + extra + 1;
        let got = Fixed::percent(part, whole, places).unwrap();
        prop_assert_eq!(got.to_string(), pct_oracle(part, whole, places as u32));
        prop_assert!(Fixed::percent(part, 0, places).is_none());
    }

    #[test]
    fn ratio_matches_integer_rounding(num in 0u64..10_000_000, den in 1u64..100_000) {
        prop_assert_eq!(Fixed::ratio(num, den, 2).unwrap().to_string(), ratio_oracle(num, den, 2));
    }

    #[test]
    fn canonical_form_is_a_fixed_point(
        scheme in prop_oneof![Just(""), Just("http://"), Just("https://")],
        host in "[a-zA-Z]{1,8}\\.(org|com)",
        segs in prop::collection::vec("[a-zA-Z0-9_-]{1,6}", 0..4),
        trailing in any::<bool>(),
        query in prop_oneof![Just(""), Just("?x=1"), Just("#frag")],
    ) {
        let raw = format!("{scheme}{host}/{}{}{query}", segs.join("//"), if trailing { "/" } else { "" });
        let once = CanonicalUrl::parse(&raw).unwrap();
        let twice = CanonicalUrl::parse(once.as_str()).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(!once.as_str().contains("://"));
        prop_assert!(!once.as_str().contains('?') && !once.as_str().contains('#'));
        prop_assert_eq!(once.host(), host.to_lowercase());
    }

    #[test]
    fn resolution_terminates_on_a_fixed_point(
        edges in prop::collection::vec((0usize..8, prop::option::of(0usize..8)), 0..12),
        start in 0usize..8,
        depth in 1usize..6,
    ) {
        let name = |i: usize| format!("s{i}.ly/x");
        let mut seen = BTreeSet::new();
        let pairs: Vec<(String, String)> = edges
            .into_iter()
            .filter(|(from, _)| seen.insert(*from))
            .map(|(from, to)| (format!("https://{}", name(from)), to.map(|t| format!("https://{}", name(t))).unwrap_or_default()))
            .collect();
        let oracle = TableOracle::from_pairs(pairs).unwrap();
        let r = resolve_chain(&CanonicalUrl::parse(&name(start)).unwrap(), &oracle, depth);
        prop_assert!(r.depth <= depth);
        prop_assert_eq!(r.chain.len(), r.depth + 1);
        prop_assert_eq!(r.chain.last(), Some(&r.final_url));
        let distinct: BTreeSet<_> = r.chain.iter().collect();
        prop_assert_eq!(distinct.len(), r.chain.len());
        if r.terminated_by == Termination::FinalTarget {
            let again = resolve_chain(&r.final_url, &oracle, depth);
            prop_assert_eq!(again.final_url, r.final_url);
            prop_assert_eq!(again.depth, 0);
        }
    }

    #[test]
    fn merge_of_parts_equals_merge_of_whole(
        rows in prop::collection::vec((0usize..4, any::<bool>(), 0u64..500, 0i64..=100), 0..30),
        split in 0usize..30,
    ) {
        let records: Vec<RawLinkRecord> = rows
            .iter()
            .map(|&(t, https, pages, flow)| RawLinkRecord {
                target_url: format!("{}://example.org/n/{t}", if https { "https" } else { "http" }),
                mentioning_webpages: pages,
                mentioning_websites: pages / 2,
                citation_flow: flow,
                trust_flow: 100 - flow,
                window_start: None,
                window_end: None,
            })
            .collect();
        let cut = split.min(records.len());
        let whole = merge_protocol_variants(&records).unwrap();
        let mut parts = merge_protocol_variants(&records[..cut]).unwrap();
        parts.extend(merge_protocol_variants(&records[cut..]).unwrap());
        prop_assert_eq!(remerge(parts), whole.clone());
        for a in &whole {
            prop_assert!(a.mentioning_websites <= a.mentioning_webpages);
            prop_assert_eq!(a.websites_is_upper_bound, a.sources.len() > 1);
        }
    }

    #[test]
    fn distributions_cover_their_population(corpus in corpus_strategy()) {
        let d = type_distribution(&corpus);
        prop_assert_eq!(d.population, corpus.len() as u64);
        prop_assert_eq!(d.rows.iter().map(|s| s.count).sum::<u64>(), d.population);
        if d.population > 0 {
            // each share is off by at most half a tenth
            let tenths: i64 = d.rows.iter().map(|s| s.pct.units() as i64).sum();
            prop_assert!((tenths - 1000).abs() * 2 <= d.rows.len() as i64);
        }
        for w in d.rows.windows(2) {
            prop_assert!(w[0].count >= w[1].count);
        }
    }

    #[test]
    fn keyword_counts_are_per_release(corpus in corpus_strategy()) {
        let freq: BTreeMap<String, u64> = keyword_frequency(&corpus).into_iter().collect();
        for (k, n) in &freq {
            let holders = corpus.iter().filter(|r| r.metadata.keywords.contains(k)).count() as u64;
            prop_assert_eq!(*n, holders);
        }
        let distinct: u64 = corpus
            .iter()
            .map(|r| r.metadata.keywords.iter().collect::<BTreeSet<_>>().len() as u64)
            .sum();
        prop_assert_eq!(freq.values().sum::<u64>(), distinct);
    }

    #[test]
    fn series_skips_only_anomalous_dates(corpus in corpus_strategy()) {
        let s = output_series(&corpus, Granularity::Yearly);
        let valid = corpus.iter().filter(|r| !r.date_anomaly).count() as u64;
        prop_assert_eq!(s.total(), valid);
    }
}

#[test]
fn shares_of_an_empty_population_are_empty() {
    let d: Distribution<String> = Distribution::from_counts(BTreeMap::new());
    assert!(d.rows.is_empty());
    assert_eq!(d.population, 0);
}
