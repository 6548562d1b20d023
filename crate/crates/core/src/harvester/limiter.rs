use std::collections::HashMap;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use super::clock::Clock;

/// One request release recorded by the limiter.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub host: String,
    pub started_at: Duration,
}

#[derive(Default)]
struct HostSlot {
    busy: bool,
    last_done: Option<Duration>,
}

/// Shared per-host limiter: at most one request in flight per host, and a
/// new request starts no earlier than `interval` after the previous one on
/// that host completed.
pub struct HostLimiter {
    interval: Duration,
    slots: Mutex<HashMap<String, HostSlot>>,
    freed: Condvar,
    trace: Mutex<Vec<TraceEntry>>,
}

impl HostLimiter {
    pub fn new(interval: Duration) -> Self {
        HostLimiter {
            interval,
            slots: Mutex::new(HashMap::new()),
            freed: Condvar::new(),
            trace: Mutex::new(Vec::new()),
        }
    }

    pub fn interval(&self) -> Duration {
        self.interval
    }

    /// Blocks until `host` may be requested, then holds it until the
    /// returned permit is dropped.
    pub fn acquire<'a>(&'a self, host: &str, clock: &'a dyn Clock) -> Permit<'a> {
        let ready_at = {
            let mut slots = self.slots.lock().unwrap();
            loop {
                let slot = slots.entry(host.to_string()).or_default();
                if !slot.busy {
                    slot.busy = true;
                    break slot.last_done.map(|t| t + self.interval);
                }
                slots = self.freed.wait(slots).unwrap();
            }
        };
        if let Some(ready_at) = ready_at {
            let now = clock.now();
            if ready_at > now {
                clock.sleep(ready_at - now);
            }
        }
        let started_at = clock.now();
        self.trace.lock().unwrap().push(TraceEntry {
            host: host.to_string(),
            started_at,
        });
        Permit {
            limiter: self,
            clock,
            host: host.to_string(),
            started_at,
        }
    }

    pub fn trace(&self) -> Vec<TraceEntry> {
        self.trace.lock().unwrap().clone()
    }

    fn release(&self, host: &str, at: Duration) {
        let mut slots = self.slots.lock().unwrap();
        let slot = slots.entry(host.to_string()).or_default();
        slot.busy = false;
        slot.last_done = Some(at);
        self.freed.notify_all();
    }
}

pub struct Permit<'a> {
    limiter: &'a HostLimiter,
    clock: &'a dyn Clock,
    host: String,
    started_at: Duration,
}

impl Permit<'_> {
    pub fn started_at(&self) -> Duration {
        self.started_at
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        self.limiter.release(&self.host, self.clock.now());
    }
}

/// Smallest gap between consecutive request starts on any single host, or
/// `None` when no host saw two requests.
pub fn min_spacing(trace: &[TraceEntry]) -> Option<Duration> {
    let mut by_host: HashMap<&str, Vec<Duration>> = HashMap::new();
    for entry in trace {
        by_host.entry(&entry.host).or_default().push(entry.started_at);
    }
    by_host
        .values_mut()
        .filter_map(|times| {
            times.sort();
            times.windows(2).map(|w| w[1] - w[0]).min()
        })
        .min()
}
