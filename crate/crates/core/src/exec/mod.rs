//! Link-traversal execution: dereference anchors, match clause bodies on
//! the fetched documents, join clause by clause.

mod fetch;
mod filter;
mod fixture;
mod http;
mod instrument;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::rdf::{match_bgp, BindingTable, Graph, Literal, Solution, Term};
use crate::transform::{TraversalElement, TraversalQuery};

pub use fetch::{fetch_all, host_of};
pub use filter::{eval_filter, EvalError};
pub use fixture::{validate_fixture_r2, Document, FixtureError, FixtureWeb, R2Violation};
pub use http::{HttpDereferencer, ACCEPT};
pub use instrument::{FetchRecord, RecordingDereferencer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecConfig {
    pub max_parallel: usize,
    pub per_host_delay_ms: u64,
    pub timeout_ms: u64,
    pub max_redirects: u32,
    pub max_triples_per_resource: usize,
    pub strict: bool,
    pub honor_robots_crawl_delay: bool,
}

impl Default for ExecConfig {
    /// Settings for the live web.
    fn default() -> Self {
        ExecConfig {
            max_parallel: 10,
            per_host_delay_ms: 500,
            timeout_ms: 10_000,
            max_redirects: 5,
            max_triples_per_resource: 1_000_000,
            strict: false,
            honor_robots_crawl_delay: false,
        }
    }
}

impl ExecConfig {
    /// Settings for local fixture webs: no per-host delay.
    pub fn fixtures() -> Self {
        ExecConfig { per_host_delay_ms: 0, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FetchKind {
    #[serde(rename = "network")]
    Network,
    #[serde(rename = "timeout")]
    Timeout,
    #[serde(rename = "non-RDF")]
    NonRdf,
    #[serde(rename = "not-found")]
    NotFound,
    #[serde(rename = "truncated")]
    Truncated,
}

impl fmt::Display for FetchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FetchKind::Network => "network",
            FetchKind::Timeout => "timeout",
            FetchKind::NonRdf => "non-RDF",
            FetchKind::NotFound => "not-found",
            FetchKind::Truncated => "truncated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: {detail}")]
pub struct FetchFailure {
    pub kind: FetchKind,
    pub detail: String,
}

impl FetchFailure {
    pub fn new(kind: FetchKind, detail: impl Into<String>) -> Self {
        FetchFailure { kind, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fetched {
    pub graph: Graph,
    pub bytes: u64,
    /// Set when the document held more than the configured triple cap.
    pub truncated: bool,
}

pub type FetchResult = Result<Fetched, FetchFailure>;

/// Turns an IRI into the RDF document it names.
pub trait Dereferencer: Send + Sync {
    fn fetch(&self, iri: &str, cfg: &ExecConfig) -> FetchResult;

    /// Crawl-delay requested by the host, if known.
    fn crawl_delay(&self, _host: &str) -> Option<Duration> {
        None
    }
}

impl<D: Dereferencer + ?Sized> Dereferencer for &D {
    fn fetch(&self, iri: &str, cfg: &ExecConfig) -> FetchResult {
        (**self).fetch(iri, cfg)
    }

    fn crawl_delay(&self, host: &str) -> Option<Duration> {
        (**self).crawl_delay(host)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailedFetch {
    pub iri: String,
    pub kind: FetchKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExecStats {
    pub fetch_count: usize,
    pub cache_hits: usize,
    pub failed_fetches: Vec<FailedFetch>,
    pub wall_time_ms: u64,
    pub bytes_fetched: u64,
}

#[derive(Debug, Error)]
pub enum ExecError {
    #[error("fetching <{iri}> failed: {failure}")]
    Fetch { iri: String, failure: FetchFailure },
}

/// Evaluates the plan element by element. In non-strict mode failed
/// fetches count as empty documents and are listed in the stats.
pub fn execute(
    q: &TraversalQuery,
    deref: &dyn Dereferencer,
    cfg: &ExecConfig,
) -> Result<(BindingTable, ExecStats), ExecError> {
    let started = Instant::now();
    let mut ex = Executor { deref, cfg, cache: HashMap::new(), stats: ExecStats::default(), tags: 0 };
    let table = ex.eval(&q.elements, BindingTable::unit())?;
    ex.stats.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok((table, ex.stats))
}

struct Executor<'a> {
    deref: &'a dyn Dereferencer,
    cfg: &'a ExecConfig,
    cache: HashMap<String, Arc<Graph>>,
    stats: ExecStats,
    tags: usize,
}

impl Executor<'_> {
    /// Makes sure every IRI is in the cache, fetching the missing ones in
    /// one parallel wave.
    fn ensure(&mut self, iris: &[String]) -> Result<(), ExecError> {
        let mut missing = Vec::new();
        for iri in iris {
            if self.cache.contains_key(iri) || missing.contains(iri) {
                self.stats.cache_hits += 1;
            } else {
                missing.push(iri.clone());
            }
        }
        if missing.is_empty() {
            return Ok(());
        }
        let results = fetch_all(&missing, self.deref, self.cfg);
        for iri in missing {
            self.stats.fetch_count += 1;
            let graph = match results.get(&iri).cloned().expect("fetch_all returns every IRI") {
                Ok(f) => {
                    self.stats.bytes_fetched += f.bytes;
                    if f.truncated {
                        let failure = FetchFailure::new(
                            FetchKind::Truncated,
                            format!("kept {} triples", self.cfg.max_triples_per_resource),
                        );
                        self.fail(&iri, failure)?;
                    }
                    f.graph
                }
                Err(failure) => {
                    self.fail(&iri, failure)?;
                    Graph::default()
                }
            };
            self.cache.insert(iri, Arc::new(graph));
        }
        Ok(())
    }

    fn fail(&mut self, iri: &str, failure: FetchFailure) -> Result<(), ExecError> {
        log::warn!("<{iri}>: {failure}");
        if self.cfg.strict {
            return Err(ExecError::Fetch { iri: iri.to_owned(), failure });
        }
        self.stats.failed_fetches.push(FailedFetch { iri: iri.to_owned(), kind: failure.kind });
        Ok(())
    }

    fn eval(&mut self, elements: &[TraversalElement], mut table: BindingTable) -> Result<BindingTable, ExecError> {
        for e in elements {
            table = match e {
                TraversalElement::Service(c) => match &c.anchor {
                    Term::Iri(iri) => {
                        self.ensure(std::slice::from_ref(iri))?;
                        let g = Arc::clone(&self.cache[iri]);
                        match_bgp(&g, &c.body, &table)
                    }
                    anchor => {
                        let key = anchor.binding_key().unwrap_or_default();
                        self.variable_clause(&key, &c.body, table)?
                    }
                },
                TraversalElement::Union(branches) => {
                    let mut out = BindingTable::empty(table.variables().to_vec());
                    for b in branches {
                        let part = self.eval(b, table.clone())?;
                        for v in part.variables() {
                            out.add_variable(v);
                        }
                        for row in part.into_rows() {
                            out.push(row);
                        }
                    }
                    out
                }
                TraversalElement::Optional(body) => self.left_join(body, table)?,
                TraversalElement::Filter(f) => {
                    let mut out = BindingTable::empty(table.variables().to_vec());
                    for row in table.into_rows() {
                        if eval_filter(f, &row).unwrap_or(false) {
                            out.push(row);
                        }
                    }
                    out
                }
            };
        }
        Ok(table)
    }

    fn variable_clause(
        &mut self,
        key: &str,
        body: &[crate::sparql::TriplePattern],
        table: BindingTable,
    ) -> Result<BindingTable, ExecError> {
        let mut iris: Vec<String> = Vec::new();
        for row in table.rows() {
            match row.get(key) {
                Some(Term::Iri(i)) => {
                    if !iris.contains(i) {
                        iris.push(i.clone());
                    }
                }
                Some(other) => log::warn!("?{key} is bound to {other}, which cannot be dereferenced"),
                None => log::warn!("?{key} is unbound in a row; skipping it"),
            }
        }
        self.ensure(&iris)?;
        let mut out = BindingTable::empty(table.variables().to_vec());
        for k in body.iter().flat_map(|t| t.open_keys()) {
            out.add_variable(&k);
        }
        for row in table.into_rows() {
            let Some(Term::Iri(iri)) = row.get(key) else { continue };
            let g = Arc::clone(&self.cache[iri]);
            let seed = BindingTable::new(Vec::new(), vec![row]);
            for r in match_bgp(&g, body, &seed).into_rows() {
                out.push(r);
            }
        }
        Ok(out)
    }

    /// Rows are tagged with a hidden index so the optional body can run
    /// once over the whole table and be regrouped afterwards.
    fn left_join(&mut self, body: &[TraversalElement], table: BindingTable) -> Result<BindingTable, ExecError> {
        let tag = format!("_:#row{}", self.tags);
        self.tags += 1;
        let vars = table.variables().to_vec();
        let rows = table.into_rows();
        let tagged = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut r = r.clone();
                r.insert(tag.clone(), Term::Literal(Literal::plain(i.to_string())));
                r
            })
            .collect();
        let inner = self.eval(body, BindingTable::new(vars.clone(), tagged))?;
        let mut matched: BTreeMap<usize, Vec<Solution>> = BTreeMap::new();
        let mut out = BindingTable::empty(vars);
        for v in inner.variables() {
            out.add_variable(v);
        }
        for mut r in inner.into_rows() {
            let idx = match r.remove(&tag) {
                Some(Term::Literal(l)) => l.lexical().parse().unwrap_or(usize::MAX),
                _ => usize::MAX,
            };
            matched.entry(idx).or_default().push(r);
        }
        for (i, row) in rows.into_iter().enumerate() {
            match matched.remove(&i) {
                Some(ext) => ext.into_iter().for_each(|r| out.push(r)),
                None => out.push(row),
            }
        }
        Ok(out)
    }
}
