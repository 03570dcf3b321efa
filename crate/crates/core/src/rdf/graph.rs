use std::collections::HashMap;
use std::fmt;

use super::term::Term;

/// A ground RDF triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        debug_assert!(subject.is_iri() || subject.is_blank());
        debug_assert!(predicate.is_iri());
        debug_assert!(!object.is_variable());
        Triple { subject, predicate, object }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// An immutable set of triples, indexed by subject, predicate and object.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    triples: Vec<Triple>,
    origin: Option<String>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Term, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
}

impl Graph {
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut triples: Vec<Triple> = triples.into_iter().collect();
        triples.sort();
        triples.dedup();
        let mut graph = Graph { triples, ..Graph::default() };
        for (i, t) in graph.triples.iter().enumerate() {
            graph.by_subject.entry(t.subject.clone()).or_default().push(i);
            graph.by_predicate.entry(t.predicate.clone()).or_default().push(i);
            graph.by_object.entry(t.object.clone()).or_default().push(i);
        }
        graph
    }

    pub fn with_origin(mut self, origin: impl Into<String>) -> Self {
        self.origin = Some(origin.into());
        self
    }

    pub fn origin(&self) -> Option<&str> {
        self.origin.as_deref()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.binary_search(triple).is_ok()
    }

    /// Candidate triples for a lookup where some positions are fixed. Uses
    /// the most selective index available.
    pub fn candidates<'a>(
        &'a self,
        subject: Option<&'a Term>,
        predicate: Option<&'a Term>,
        object: Option<&'a Term>,
    ) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
        let lists = [
            subject.map(|s| self.by_subject.get(s)),
            object.map(|o| self.by_object.get(o)),
            predicate.map(|p| self.by_predicate.get(p)),
        ];
        let mut best: Option<&Vec<usize>> = None;
        for entry in lists.into_iter().flatten() {
            match entry {
                None => return Box::new(std::iter::empty()),
                Some(list) => {
                    if best.is_none_or(|b| list.len() < b.len()) {
                        best = Some(list);
                    }
                }
            }
        }
        let matches = move |t: &&Triple| {
            subject.is_none_or(|s| &t.subject == s)
                && predicate.is_none_or(|p| &t.predicate == p)
                && object.is_none_or(|o| &t.object == o)
        };
        match best {
            Some(list) => Box::new(list.iter().map(|&i| &self.triples[i]).filter(matches)),
            None => Box::new(self.triples.iter()),
        }
    }

    /// Union of several graphs (origin dropped).
    pub fn merge<'a>(graphs: impl IntoIterator<Item = &'a Graph>) -> Graph {
        Graph::new(graphs.into_iter().flat_map(|g| g.triples.iter().cloned()))
    }

    /// Keeps the first `max` triples in sorted order.
    pub fn truncated(&self, max: usize) -> Graph {
        let mut g = Graph::new(self.triples.iter().take(max).cloned());
        g.origin = self.origin.clone();
        g
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph::new(iter)
    }
}
