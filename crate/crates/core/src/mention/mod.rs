//! Tweet mentions: archive query, short-URL unshortening, matching of final
//! targets against the corpus.

mod ingest;
mod resolve;

pub use ingest::{
    build_archive_query, ingest_tweets, match_to_release, IngestOutcome, IngestStats, MatchResult,
    QueryError, RawTweet, TweetMention,
};
pub use resolve::{
    resolve_chain, CachedResolver, Hop, HttpOracle, RedirectOracle, TableOracle, Termination, UrlResolution,
    DEFAULT_MAX_DEPTH,
};
