use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::thread;
use std::time::Duration;

use thiserror::Error;

use super::{host_of, Dereferencer, ExecConfig, FetchFailure, FetchKind, FetchResult, Fetched};
use crate::rdf::{parse_rdf, serialize_ntriples, Graph, RdfSyntax, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub syntax: RdfSyntax,
    pub text: String,
}

/// An in-memory web: IRI to document, plus optional per-host latency.
#[derive(Debug, Clone, Default)]
pub struct FixtureWeb {
    docs: BTreeMap<String, Document>,
    latency_ms: HashMap<String, u64>,
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad {path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: unknown RDF syntax (expected .nt or .ttl)")]
    Syntax { path: String },
}

impl FixtureWeb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, iri: impl Into<String>, syntax: RdfSyntax, text: impl Into<String>) {
        self.docs.insert(iri.into(), Document { syntax, text: text.into() });
    }

    pub fn insert_graph(&mut self, iri: impl Into<String>, g: &Graph) {
        self.insert(iri, RdfSyntax::NTriples, serialize_ntriples(g));
    }

    pub fn set_latency(&mut self, host: impl Into<String>, ms: u64) {
        self.latency_ms.insert(host.into(), ms);
    }

    pub fn iris(&self) -> impl Iterator<Item = &str> {
        self.docs.keys().map(String::as_str)
    }

    pub fn document(&self, iri: &str) -> Option<&Document> {
        self.docs.get(iri).or_else(|| self.docs.get(iri.split('#').next().unwrap_or(iri)))
    }

    /// Parsed document of `iri`; unparseable documents read as empty.
    pub fn graph(&self, iri: &str) -> Graph {
        self.document(iri).and_then(|d| parse_rdf(&d.text, d.syntax, Some(iri)).ok()).unwrap_or_default()
    }

    /// Union of every document.
    pub fn union_graph(&self) -> Graph {
        let graphs: Vec<Graph> = self.docs.keys().map(|i| self.graph(i)).collect();
        Graph::merge(&graphs)
    }

    /// Reads `mapping.json` (IRI to relative file path) and the optional
    /// `latency.json` (host to milliseconds) from `dir`.
    pub fn load(dir: &Path) -> Result<Self, FixtureError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| FixtureError::Io { path: p.display().to_string(), source })
        };
        let mapping_path = dir.join("mapping.json");
        let mapping: BTreeMap<String, String> = serde_json::from_str(&read(&mapping_path)?)
            .map_err(|source| FixtureError::Json { path: mapping_path.display().to_string(), source })?;
        let mut web = FixtureWeb::new();
        for (iri, rel) in mapping {
            let path = dir.join(&rel);
            let syntax = path
                .extension()
                .and_then(|e| e.to_str())
                .and_then(RdfSyntax::from_extension)
                .ok_or_else(|| FixtureError::Syntax { path: path.display().to_string() })?;
            web.insert(iri, syntax, read(&path)?);
        }
        let latency_path = dir.join("latency.json");
        if latency_path.exists() {
            web.latency_ms = serde_json::from_str(&read(&latency_path)?)
                .map_err(|source| FixtureError::Json { path: latency_path.display().to_string(), source })?;
        }
        Ok(web)
    }
}

impl Dereferencer for FixtureWeb {
    fn fetch(&self, iri: &str, _cfg: &ExecConfig) -> FetchResult {
        if let Some(ms) = self.latency_ms.get(&host_of(iri)) {
            thread::sleep(Duration::from_millis(*ms));
        }
        let doc = self.document(iri).ok_or_else(|| FetchFailure::new(FetchKind::NotFound, "no such document"))?;
        let graph = parse_rdf(&doc.text, doc.syntax, Some(iri))
            .map_err(|e| FetchFailure::new(FetchKind::NonRdf, e.to_string()))?
            .with_origin(iri);
        Ok(Fetched { graph, bytes: doc.text.len() as u64, truncated: false })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct R2Violation {
    pub iri: String,
    pub missing: Triple,
}

/// Triples that mention a mapped IRI as subject or object somewhere in the
/// web but are absent from that IRI's own document.
pub fn validate_fixture_r2(web: &FixtureWeb) -> Vec<R2Violation> {
    let docs: BTreeMap<&str, Graph> = web.iris().map(|i| (i, web.graph(i))).collect();
    let all = Graph::merge(docs.values());
    let mut out = Vec::new();
    for (iri, own) in &docs {
        let node = Term::iri(*iri);
        let mentions = all.candidates(Some(&node), None, None).chain(all.candidates(None, None, Some(&node)));
        for t in mentions {
            if !own.contains(t) && !out.iter().any(|v: &R2Violation| v.iri == *iri && &v.missing == t) {
                out.push(R2Violation { iri: iri.to_string(), missing: t.clone() });
            }
        }
    }
    out
}
