//! Seeded synthetic inputs for the benchmarks.

use chrono::NaiveDate;
use prmetrics::backlink::RawLinkRecord;
use prmetrics::{CanonicalUrl, MetadataRecord, PressRelease, PressType, Region};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VOCABULARY: usize = 60;

/// `n` releases with up to ten keywords each drawn from a fixed vocabulary.
pub fn corpus(n: usize, seed: u64) -> Vec<PressRelease> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<String> = (0..VOCABULARY).map(|i| format!("keyword {i}")).collect();
    (0..n)
        .map(|i| {
            let year = rng.gen_range(1996..=2020);
            let k = rng.gen_range(1..=10);
            let url =
                CanonicalUrl::parse(&format!("www.eurekalert.org/pub_releases/{year}-01/r-{i}.php")).unwrap();
            let metadata = MetadataRecord {
                keywords: vocab.choose_multiple(&mut rng, k).cloned().collect(),
                description: String::new(),
                date: NaiveDate::from_ymd_opt(year, rng.gen_range(1..=12), 1).unwrap(),
                funder: String::new(),
                journal: Vec::new(),
                press_type: *PressType::ALL.choose(&mut rng).unwrap(),
                institution: format!("institution {}", rng.gen_range(0..200)),
                meeting: String::new(),
                region: Region::Unknown,
            };
            PressRelease::new(url, metadata, Vec::new())
        })
        .collect()
}

/// A release page of roughly `paragraphs` paragraphs carrying DOIs in
/// several presentations.
pub fn release_page(paragraphs: usize) -> Vec<u8> {
    let mut body = String::from("<html><head><meta name=\"release.type\" content=\"Research\"></head><body>");
    for i in 0..paragraphs {
        match i % 4 {
            0 => body.push_str(&format!(
                "<p><a href=\"https://doi.org/10.1000/x.{i}\">paper</a></p>"
            )),
            1 => body.push_str(&format!("<p>Published (doi:10.1000/y.{i}).</p>")),
            2 => body.push_str(&format!("<p>See https://doi.org/10.1000/ z.{i} for details.</p>")),
            _ => body.push_str("<p>Lorem ipsum dolor sit amet, consectetur adipiscing elit.</p>"),
        }
    }
    body.push_str("</body></html>");
    body.into_bytes()
}

/// Backlink rows over `targets` releases, each seen under both schemes.
pub fn link_records(targets: usize, seed: u64) -> Vec<RawLinkRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..targets * 2)
        .map(|i| {
            let pages = rng.gen_range(0..5_000);
            RawLinkRecord {
                target_url: format!(
                    "{}://www.eurekalert.org/pub_releases/2019-01/r-{}.php",
                    if i % 2 == 0 { "http" } else { "https" },
                    i / 2
                ),
                mentioning_webpages: pages,
                mentioning_websites: pages / 3,
                citation_flow: rng.gen_range(0..=100),
                trust_flow: rng.gen_range(0..=100),
                window_start: None,
                window_end: None,
            }
        })
        .collect()
}
