use std::collections::{HashSet, VecDeque};
use std::sync::{Condvar, Mutex};

use super::classify::{classify_page, PageClass};
use super::clock::Clock;
use super::fetch::{fetch_page, CrawlScope, FetchError, FetchRecord, Fetcher};
use super::frontier::expand_frontier;
use super::limiter::{HostLimiter, TraceEntry};
use crate::canon::CanonicalUrl;

#[derive(Debug, Clone)]
pub struct CrawledPage {
    pub record: FetchRecord,
    pub class: PageClass,
}

#[derive(Debug, Default)]
pub struct CrawlOutcome {
    /// One entry per fetched URL, sorted by URL. Requests that never
    /// completed appear with status 0.
    pub pages: Vec<CrawledPage>,
    pub malformed_links: usize,
    pub failures: Vec<String>,
    pub trace: Vec<TraceEntry>,
}

impl CrawlOutcome {
    pub fn press_release_count(&self) -> usize {
        self.pages.iter().filter(|p| p.class.is_press_release()).count()
    }
}

struct Frontier {
    queue: VecDeque<CanonicalUrl>,
    seen: HashSet<CanonicalUrl>,
    in_flight: usize,
}

pub struct Crawler<'a> {
    pub scope: &'a CrawlScope,
    pub fetcher: &'a dyn Fetcher,
    pub clock: &'a dyn Clock,
    pub workers: usize,
}

impl Crawler<'_> {
    /// Breadth-first crawl of the scope from `seeds`; every URL is fetched
    /// at most once.
    pub fn run(&self, seeds: &[CanonicalUrl]) -> CrawlOutcome {
        let limiter = HostLimiter::new(self.scope.rate_limit());
        let mut frontier = Frontier {
            queue: VecDeque::new(),
            seen: HashSet::new(),
            in_flight: 0,
        };
        for seed in seeds {
            if self.scope.contains(seed) && frontier.seen.insert(seed.clone()) {
                frontier.queue.push_back(seed.clone());
            }
        }
        let frontier = Mutex::new(frontier);
        let wake = Condvar::new();
        let results: Mutex<CrawlOutcome> = Mutex::new(CrawlOutcome::default());

        std::thread::scope(|s| {
            for _ in 0..self.workers.max(1) {
                s.spawn(|| loop {
                    let next = {
                        let mut f = frontier.lock().unwrap();
                        loop {
                            if let Some(url) = f.queue.pop_front() {
                                f.in_flight += 1;
                                break Some(url);
                            }
                            if f.in_flight == 0 {
                                break None;
                            }
                            f = wake.wait(f).unwrap();
                        }
                    };
                    let Some(url) = next else {
                        wake.notify_all();
                        return;
                    };

                    let record = match fetch_page(&url, self.scope, self.fetcher, &limiter, self.clock) {
                        Ok(record) => record,
                        Err(e) => {
                            log::warn!("{e}");
                            let failed = matches!(e, FetchError::Retryable { .. });
                            let mut r = results.lock().unwrap();
                            r.failures.push(e.to_string());
                            drop(r);
                            if failed {
                                FetchRecord::failed(url.clone())
                            } else {
                                let mut f = frontier.lock().unwrap();
                                f.in_flight -= 1;
                                wake.notify_all();
                                continue;
                            }
                        }
                    };
                    let class = classify_page(&record.body);

                    {
                        let mut f = frontier.lock().unwrap();
                        let expansion = expand_frontier(&record, self.scope, &f.seen);
                        for u in expansion.urls {
                            f.seen.insert(u.clone());
                            f.queue.push_back(u);
                        }
                        f.in_flight -= 1;
                        results.lock().unwrap().malformed_links += expansion.malformed;
                        wake.notify_all();
                    }
                    results.lock().unwrap().pages.push(CrawledPage { record, class });
                });
            }
        });

        let mut outcome = results.into_inner().unwrap();
        outcome.pages.sort_by(|a, b| a.record.url.cmp(&b.record.url));
        outcome.failures.sort();
        outcome.trace = limiter.trace();
        outcome
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harvester::clock::VirtualClock;
    use crate::harvester::fetch::{Response, TransportError};
    use crate::harvester::limiter::min_spacing;
    use chrono::Utc;
    use std::collections::HashMap;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::time::Duration;

    struct MapSite {
        pages: HashMap<String, String>,
        hits: Mutex<HashMap<String, usize>>,
        total: AtomicUsize,
    }

    impl Fetcher for MapSite {
        fn get(&self, url: &CanonicalUrl) -> Result<Response, TransportError> {
            self.total.fetch_add(1, Ordering::SeqCst);
            *self.hits.lock().unwrap().entry(url.to_string()).or_default() += 1;
            Ok(match self.pages.get(url.as_str()) {
                Some(body) => Response {
                    status: 200,
                    body: body.clone().into_bytes(),
                    location: None,
                },
                None => Response {
                    status: 404,
                    body: Vec::new(),
                    location: None,
                },
            })
        }
    }

    fn site() -> MapSite {
        let release = |n: u32| {
            format!(
                r#"<html><head><meta name="release.date" content="2020-01-0{n}"><meta name="release.type" content="research"></head>
                <body><a href="/pr/index.html">home</a><a href="r{}.html">next</a></body></html>"#,
                n % 4 + 1
            )
        };
        let mut pages = HashMap::new();
        pages.insert(
            "h.org/pr/index.html".to_string(),
            r#"<a href="r1.html">1</a><a href="r2.html">2</a><a href="gone.html">x</a><a href="http://elsewhere.org/">e</a>"#.to_string(),
        );
        for n in 1..=4 {
            pages.insert(format!("h.org/pr/r{n}.html"), release(n));
        }
        MapSite {
            pages,
            hits: Mutex::new(HashMap::new()),
            total: AtomicUsize::new(0),
        }
    }

    #[test]
    fn finite_site_terminates_and_fetches_each_url_once() {
        let fetcher = site();
        let scope = CrawlScope::new("h.org/pr", Vec::new(), 1.0).unwrap();
        let clock = VirtualClock::new(Utc::now());
        for workers in [1, 3] {
            fetcher.hits.lock().unwrap().clear();
            let outcome = Crawler {
                scope: &scope,
                fetcher: &fetcher,
                clock: &clock,
                workers,
            }
            .run(&[CanonicalUrl::parse("h.org/pr/index.html").unwrap()]);
            assert_eq!(outcome.pages.len(), 6);
            assert!(fetcher.hits.lock().unwrap().values().all(|&n| n == 1));
            assert_eq!(outcome.press_release_count(), 4);
            let non_content = outcome
                .pages
                .iter()
                .filter(|p| !p.class.is_press_release())
                .count();
            assert_eq!(outcome.press_release_count() + non_content, outcome.pages.len());
            assert!(outcome
                .pages
                .iter()
                .all(|p| p.record.url.is_under(scope.seed_path())));
            assert!(min_spacing(&outcome.trace).unwrap() >= Duration::from_secs(1));
        }
    }
}
