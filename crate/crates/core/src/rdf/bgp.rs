use std::collections::BTreeMap;

use super::{Graph, Term, Triple};
use crate::sparql::TriplePattern;

/// One solution mapping, keyed by variable name. Blank nodes of a pattern
/// bind under `_:label` keys, which take part in joins but are not listed
/// among the table's variables.
pub type Solution = BTreeMap<String, Term>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BindingTable {
    variables: Vec<String>,
    rows: Vec<Solution>,
}

impl BindingTable {
    pub fn new(variables: Vec<String>, rows: Vec<Solution>) -> Self {
        BindingTable { variables, rows }
    }

    /// The join identity: a single empty row.
    pub fn unit() -> Self {
        BindingTable { variables: Vec::new(), rows: vec![Solution::new()] }
    }

    pub fn empty(variables: Vec<String>) -> Self {
        BindingTable { variables, rows: Vec::new() }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn rows(&self) -> &[Solution] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Solution> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn add_variable(&mut self, name: &str) {
        if !name.starts_with("_:") && !self.variables.iter().any(|v| v == name) {
            self.variables.push(name.to_owned());
        }
    }

    pub fn push(&mut self, row: Solution) {
        self.rows.push(row);
    }

    /// Rows restricted to `vars`; unbound cells are dropped from the row.
    pub fn project(&self, vars: &[String]) -> BindingTable {
        let rows = self
            .rows
            .iter()
            .map(|r| vars.iter().filter_map(|v| r.get(v).map(|t| (v.clone(), t.clone()))).collect())
            .collect();
        BindingTable { variables: vars.to_vec(), rows }
    }

    /// Rows as sorted lists of (variable, rendered term) pairs, for
    /// order-insensitive comparison.
    pub fn canonical_rows(&self) -> Vec<Vec<(String, String)>> {
        let mut rows: Vec<Vec<(String, String)>> = self
            .rows
            .iter()
            .map(|r| r.iter().filter(|(k, _)| !k.starts_with("_:")).map(|(k, v)| (k.clone(), v.to_string())).collect())
            .collect();
        rows.sort();
        rows
    }

    /// Tab-separated rendering with a `?var` header line.
    pub fn to_tsv(&self) -> String {
        let mut out = self.variables.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> =
                self.variables.iter().map(|v| row.get(v).map(|t| t.to_string()).unwrap_or_default()).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// All extensions of the seed rows under which every pattern is a triple
/// of `g`.
pub fn match_bgp(g: &Graph, patterns: &[TriplePattern], seed: &BindingTable) -> BindingTable {
    let mut out = BindingTable { variables: seed.variables.clone(), rows: Vec::new() };
    for p in patterns {
        for key in p.open_keys() {
            out.add_variable(&key);
        }
    }
    if patterns.is_empty() {
        out.rows = seed.rows.clone();
        return out;
    }
    let mut done = vec![false; patterns.len()];
    for row in &seed.rows {
        let mut row = row.clone();
        extend(g, patterns, &mut done, &mut row, &mut out.rows);
    }
    out
}

fn resolve<'a>(term: &'a Term, row: &'a Solution) -> Option<&'a Term> {
    match term.binding_key() {
        Some(k) => row.get(&k),
        None => Some(term),
    }
}

fn extend(g: &Graph, patterns: &[TriplePattern], done: &mut [bool], row: &mut Solution, out: &mut Vec<Solution>) {
    // most constrained pattern next
    let next = (0..patterns.len()).filter(|&i| !done[i]).max_by_key(|&i| {
        let p = &patterns[i];
        let bound = p.terms().iter().filter(|t| resolve(t, row).is_some()).count();
        (bound, std::cmp::Reverse(i))
    });
    let Some(i) = next else {
        out.push(row.clone());
        return;
    };
    let p = &patterns[i];
    let (s, pr, o) =
        (resolve(&p.subject, row).cloned(), resolve(&p.predicate, row).cloned(), resolve(&p.object, row).cloned());
    let matches: Vec<&Triple> = g.candidates(s.as_ref(), pr.as_ref(), o.as_ref()).collect();
    done[i] = true;
    for t in matches {
        let mut added = Vec::new();
        let ok = [(&p.subject, &t.subject), (&p.predicate, &t.predicate), (&p.object, &t.object)].into_iter().all(
            |(pt, val)| match pt.binding_key() {
                None => pt == val,
                Some(k) => match row.get(&k) {
                    Some(bound) => bound == val,
                    None => {
                        row.insert(k.clone(), val.clone());
                        added.push(k);
                        true
                    }
                },
            },
        );
        if ok {
            extend(g, patterns, done, row, out);
        }
        for k in added {
            row.remove(&k);
        }
    }
    done[i] = false;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(s: Term, p: Term, o: Term) -> TriplePattern {
        TriplePattern::new(s, p, o, 0)
    }

    fn t(s: &str, p: &str, o: Term) -> Triple {
        Triple::new(Term::iri(s), Term::iri(p), o)
    }

    #[test]
    fn single_match() {
        let g = Graph::new([t("http://a", "http://p", Term::iri("http://b"))]);
        let r = match_bgp(&g, &[tp(Term::var("x"), Term::iri("http://p"), Term::var("y"))], &BindingTable::unit());
        assert_eq!(r.len(), 1);
        assert_eq!(r.rows()[0]["x"], Term::iri("http://a"));
        assert_eq!(r.variables(), ["x", "y"]);
        let r = match_bgp(&g, &[tp(Term::var("x"), Term::iri("http://q"), Term::var("y"))], &BindingTable::unit());
        assert!(r.is_empty());
    }

    #[test]
    fn players_join() {
        let ty = super::super::RDF_TYPE;
        let mut triples = Vec::new();
        for (i, d) in ["1990-01-01", "1985-02-02", "1979-03-03"].iter().enumerate() {
            let pl = format!("http://ex.org/p{i}");
            triples.push(t(&pl, ty, Term::iri("http://ex.org/BP")));
            triples.push(t(&pl, "http://ex.org/birthDate", Term::literal(*d)));
        }
        let g = Graph::new(triples);
        let pats = [
            tp(Term::var("pl"), Term::iri(ty), Term::iri("http://ex.org/BP")),
            tp(Term::var("pl"), Term::iri("http://ex.org/birthDate"), Term::var("d")),
        ];
        let r = match_bgp(&g, &pats, &BindingTable::unit());
        assert_eq!(r.len(), 3);
        let rev = [pats[1].clone(), pats[0].clone()];
        assert_eq!(match_bgp(&g, &rev, &BindingTable::unit()).canonical_rows(), r.canonical_rows());
    }

    #[test]
    fn empty_pattern_returns_seed() {
        let g = Graph::default();
        let mut seed = BindingTable::empty(vec!["x".into()]);
        seed.push([("x".to_string(), Term::iri("http://a"))].into());
        seed.push([("x".to_string(), Term::iri("http://a"))].into());
        assert_eq!(match_bgp(&g, &[], &seed), seed);
    }

    #[test]
    fn repeated_variable_and_seed_restriction() {
        let g = Graph::new([
            t("http://a", "http://p", Term::iri("http://a")),
            t("http://a", "http://p", Term::iri("http://b")),
        ]);
        let r = match_bgp(&g, &[tp(Term::var("x"), Term::iri("http://p"), Term::var("x"))], &BindingTable::unit());
        assert_eq!(r.len(), 1);
        let mut seed = BindingTable::empty(vec!["y".into()]);
        seed.push([("y".to_string(), Term::iri("http://b"))].into());
        let r = match_bgp(&g, &[tp(Term::var("x"), Term::iri("http://p"), Term::var("y"))], &seed);
        assert_eq!(r.len(), 1);
        assert_eq!(r.variables(), ["y", "x"]);
    }
}
