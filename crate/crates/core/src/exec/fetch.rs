use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use super::{Dereferencer, ExecConfig, FetchResult};

/// Host (with port, if any) used as the politeness key.
pub fn host_of(iri: &str) -> String {
    match url::Url::parse(iri) {
        Ok(u) => match (u.host_str(), u.port()) {
            (Some(h), Some(p)) => format!("{h}:{p}"),
            (Some(h), None) => h.to_owned(),
            _ => iri.to_owned(),
        },
        Err(_) => iri.to_owned(),
    }
}

// Start-time measurement happens just before the fetch call; the margin
// absorbs the instant between that measurement and the actual call.
const GAP_MARGIN: Duration = Duration::from_millis(1);

struct Schedule {
    queue: VecDeque<(String, String)>,
    next_allowed: HashMap<String, Instant>,
    /// Hosts with a request picked but not yet started.
    waiting: HashSet<String>,
}

/// Fetches every IRI with at most `max_parallel` requests in flight and,
/// per host, request starts at least the per-host delay apart. Failures
/// stay in the map; the triple cap is applied here.
pub fn fetch_all(iris: &[String], deref: &dyn Dereferencer, cfg: &ExecConfig) -> BTreeMap<String, FetchResult> {
    let mut seen = HashSet::new();
    let queue: VecDeque<(String, String)> =
        iris.iter().filter(|i| seen.insert(i.as_str())).map(|i| (i.clone(), host_of(i))).collect();
    if queue.is_empty() {
        return BTreeMap::new();
    }
    let base = Duration::from_millis(cfg.per_host_delay_ms);
    let mut delays: HashMap<String, Duration> = HashMap::new();
    for (_, host) in &queue {
        if delays.contains_key(host) {
            continue;
        }
        let robots = if cfg.honor_robots_crawl_delay { deref.crawl_delay(host) } else { None };
        let d = robots.map_or(base, |r| r.max(base));
        delays.insert(host.clone(), if d.is_zero() { d } else { d + GAP_MARGIN });
    }
    let workers = cfg.max_parallel.max(1).min(queue.len());
    let state = Mutex::new(Schedule { queue, next_allowed: HashMap::new(), waiting: HashSet::new() });
    let wake = Condvar::new();
    let results = Mutex::new(BTreeMap::new());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let (iri, host, slot) = {
                    let mut st = state.lock().unwrap();
                    loop {
                        if st.queue.is_empty() {
                            return;
                        }
                        let now = Instant::now();
                        let pick = st
                            .queue
                            .iter()
                            .enumerate()
                            .filter(|(_, (_, h))| !st.waiting.contains(h))
                            .min_by_key(|(_, (_, h))| st.next_allowed.get(h).copied().unwrap_or(now).max(now))
                            .map(|(i, _)| i);
                        match pick {
                            Some(i) => {
                                let (iri, host) = st.queue.remove(i).unwrap();
                                let slot = st.next_allowed.get(&host).copied();
                                st.waiting.insert(host.clone());
                                break (iri, host, slot);
                            }
                            None => st = wake.wait_timeout(st, Duration::from_millis(20)).unwrap().0,
                        }
                    }
                };
                if let Some(slot) = slot {
                    let now = Instant::now();
                    if slot > now {
                        thread::sleep(slot - now);
                    }
                }
                {
                    let mut st = state.lock().unwrap();
                    st.next_allowed.insert(host.clone(), Instant::now() + delays[&host]);
                    st.waiting.remove(&host);
                    wake.notify_all();
                }
                let mut result = deref.fetch(&iri, cfg);
                if let Ok(f) = &mut result {
                    if f.graph.len() > cfg.max_triples_per_resource {
                        f.graph = f.graph.truncated(cfg.max_triples_per_resource);
                        f.truncated = true;
                    }
                }
                results.lock().unwrap().insert(iri, result);
            });
        }
    });
    results.into_inner().unwrap()
}
