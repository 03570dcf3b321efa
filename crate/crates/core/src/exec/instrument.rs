use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::{host_of, Dereferencer, ExecConfig, FetchResult};

#[derive(Debug, Clone)]
pub struct FetchRecord {
    pub iri: String,
    pub host: String,
    pub start: Instant,
    pub end: Instant,
}

/// Wraps a dereferencer and records every call: timing, host and the peak
/// number of calls in flight.
pub struct RecordingDereferencer<D> {
    inner: D,
    in_flight: AtomicUsize,
    peak: AtomicUsize,
    log: Mutex<Vec<FetchRecord>>,
}

impl<D: Dereferencer> RecordingDereferencer<D> {
    pub fn new(inner: D) -> Self {
        RecordingDereferencer {
            inner,
            in_flight: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn max_in_flight(&self) -> usize {
        self.peak.load(Ordering::SeqCst)
    }

    pub fn records(&self) -> Vec<FetchRecord> {
        self.log.lock().unwrap().clone()
    }

    pub fn calls_for(&self, iri: &str) -> usize {
        self.log.lock().unwrap().iter().filter(|r| r.iri == iri).count()
    }

    /// Smallest gap between consecutive request starts on one host.
    pub fn min_host_gap(&self) -> Option<Duration> {
        let mut by_host: HashMap<String, Vec<Instant>> = HashMap::new();
        for r in self.log.lock().unwrap().iter() {
            by_host.entry(r.host.clone()).or_default().push(r.start);
        }
        by_host
            .values_mut()
            .flat_map(|starts| {
                starts.sort();
                starts.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>()
            })
            .min()
    }
}

impl<D: Dereferencer> Dereferencer for RecordingDereferencer<D> {
    fn fetch(&self, iri: &str, cfg: &ExecConfig) -> FetchResult {
        let start = Instant::now();
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        let result = self.inner.fetch(iri, cfg);
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        self.log.lock().unwrap().push(FetchRecord {
            iri: iri.to_owned(),
            host: host_of(iri),
            start,
            end: Instant::now(),
        });
        result
    }

    fn crawl_delay(&self, host: &str) -> Option<Duration> {
        self.inner.crawl_delay(host)
    }
}
