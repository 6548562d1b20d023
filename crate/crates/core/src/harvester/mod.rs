//! Polite crawling of a scoped URL fold and classification of fetched pages.

mod classify;
mod clock;
mod crawl;
mod fetch;
mod frontier;
mod limiter;

pub use classify::{classify_page, NonContentReason, PageClass};
pub use clock::{Clock, SystemClock, VirtualClock};
pub use crawl::{CrawlOutcome, CrawledPage, Crawler};
pub use fetch::{
    body_digest, fetch_page, fixture_path, CrawlScope, FetchError, FetchRecord, Fetcher, FixtureFetcher,
    HttpFetcher, Response, ScopeError, TransportError, MAX_ATTEMPTS,
};
pub use frontier::{expand_frontier, Expansion};
pub use limiter::{min_spacing, HostLimiter, Permit, TraceEntry};
