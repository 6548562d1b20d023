use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};

/// Monotonic time source used by the rate limiter and for stamping fetches.
pub trait Clock: Send + Sync {
    /// Time elapsed since the clock's origin.
    fn now(&self) -> Duration;
    fn sleep(&self, duration: Duration);
    /// Wall-clock time corresponding to [`Clock::now`].
    fn utc(&self) -> DateTime<Utc>;
}

pub struct SystemClock {
    origin: Instant,
    utc_origin: DateTime<Utc>,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock {
            origin: Instant::now(),
            utc_origin: Utc::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }

    fn utc(&self) -> DateTime<Utc> {
        self.utc_origin + chrono::Duration::from_std(self.now()).unwrap_or_default()
    }
}

/// Clock whose `sleep` advances time instantly. Used for offline fixture
/// crawls, where it keeps timestamps reproducible across runs.
pub struct VirtualClock {
    epoch: DateTime<Utc>,
    elapsed_nanos: AtomicU64,
}

impl VirtualClock {
    pub fn new(epoch: DateTime<Utc>) -> Self {
        VirtualClock {
            epoch,
            elapsed_nanos: AtomicU64::new(0),
        }
    }

    pub fn advance(&self, duration: Duration) {
        self.elapsed_nanos
            .fetch_add(duration.as_nanos() as u64, Ordering::SeqCst);
    }
}

impl Clock for VirtualClock {
    fn now(&self) -> Duration {
        Duration::from_nanos(self.elapsed_nanos.load(Ordering::SeqCst))
    }

    fn sleep(&self, duration: Duration) {
        let target = self.now() + duration;
        self.elapsed_nanos
            .fetch_max(target.as_nanos() as u64, Ordering::SeqCst);
    }

    fn utc(&self) -> DateTime<Utc> {
        self.epoch + chrono::Duration::from_std(self.now()).unwrap_or_default()
    }
}
