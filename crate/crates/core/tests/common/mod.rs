#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ldtraverse::exec::FixtureWeb;
use ldtraverse::rdf::{match_bgp, BindingTable, Graph, Solution, Term, Triple};
use ldtraverse::sparql::{Element, GroupPattern, TriplePattern};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VOCAB: &str = "http://vocab.example/";

pub fn iri(local: &str) -> Term {
    Term::iri(format!("http://ex.org/{local}"))
}

/// Random triples-only pattern over a small pool of variables, IRIs,
/// literals and blank nodes, so that joins and repeats are common.
pub fn random_bgp<R: Rng>(rng: &mut R, max_triples: usize) -> Vec<TriplePattern> {
    let n = rng.gen_range(1..=max_triples);
    let vars = ["a", "b", "c", "d", "e"];
    let node = |rng: &mut R, allow_literal: bool| -> Term {
        let roll = rng.gen_range(0..100);
        match roll {
            0..=59 => Term::var(*vars.choose(rng).unwrap()),
            60..=79 => iri(&format!("n{}", rng.gen_range(0..4))),
            80..=89 if allow_literal => Term::literal(format!("l{}", rng.gen_range(0..2))),
            80..=89 => Term::var(*vars.choose(rng).unwrap()),
            _ => Term::blank(format!("b{}", rng.gen_range(0..2))),
        }
    };
    (0..n)
        .map(|i| {
            let s = node(rng, false);
            let p = if rng.gen_bool(0.25) {
                Term::var(*vars.choose(rng).unwrap())
            } else {
                Term::iri(format!("{VOCAB}p{}", rng.gen_range(0..3)))
            };
            let o = node(rng, true);
            TriplePattern::new(s, p, o, i)
        })
        .collect()
}

pub fn random_bound<R: Rng>(rng: &mut R) -> BTreeSet<String> {
    ["a", "b", "c", "d", "e"].iter().filter(|_| rng.gen_bool(0.15)).map(|v| v.to_string()).collect()
}

/// A web in which every node IRI has a document holding all triples that
/// mention it as subject or object. Nodes spread over a few hosts.
pub struct RandomWeb {
    pub web: FixtureWeb,
    pub nodes: Vec<String>,
    pub triples: Vec<Triple>,
}

pub fn random_web<R: Rng>(rng: &mut R) -> RandomWeb {
    let n = rng.gen_range(6..=14);
    let nodes: Vec<String> = (0..n).map(|i| format!("http://h{}.example/n{i}", i % 3)).collect();
    let mut set = BTreeSet::new();
    for _ in 0..rng.gen_range(n..=3 * n) {
        let s = nodes.choose(rng).unwrap();
        let p = format!("{VOCAB}p{}", rng.gen_range(0..3));
        let o = nodes.choose(rng).unwrap();
        set.insert(Triple::new(Term::iri(s.clone()), Term::iri(p), Term::iri(o.clone())));
    }
    for s in &nodes {
        if rng.gen_bool(0.6) {
            let o = Term::literal(format!("v{}", rng.gen_range(0..4)));
            set.insert(Triple::new(Term::iri(s.clone()), Term::iri(format!("{VOCAB}label")), o));
        }
    }
    let triples: Vec<Triple> = set.into_iter().collect();
    let mut web = FixtureWeb::new();
    for node in &nodes {
        let t = Term::iri(node.clone());
        let own = triples.iter().filter(|x| x.subject == t || x.object == t).cloned();
        web.insert_graph(node.clone(), &Graph::new(own));
    }
    RandomWeb { web, nodes, triples }
}

/// Builds an answerable query by walking the web from one node and turning
/// some of the visited terms into variables. About a third of the queries
/// end in a two-branch UNION.
pub fn random_query<R: Rng>(rng: &mut R, w: &RandomWeb) -> GroupPattern {
    let start = w.nodes.choose(rng).unwrap().clone();
    let mut names: BTreeMap<Term, Term> = BTreeMap::new();
    let mut fresh = 0;
    let mut abstract_term = |rng: &mut R, t: &Term, keep: bool| -> Term {
        if keep {
            return t.clone();
        }
        if let Some(v) = names.get(t) {
            return v.clone();
        }
        if rng.gen_bool(0.7) {
            fresh += 1;
            let v = Term::var(format!("v{fresh}"));
            names.insert(t.clone(), v.clone());
            v
        } else {
            names.insert(t.clone(), t.clone());
            t.clone()
        }
    };
    let mut group = 0;
    let mut walk = |rng: &mut R, len: usize, abstract_term: &mut dyn FnMut(&mut R, &Term, bool) -> Term| {
        let mut at = Term::iri(start.clone());
        let mut out = Vec::new();
        for _ in 0..len {
            let edges: Vec<&Triple> = w.triples.iter().filter(|t| t.subject == at || t.object == at).collect();
            let Some(t) = edges.choose(rng) else { break };
            let root = Term::iri(start.clone());
            let s = abstract_term(rng, &t.subject, t.subject == root);
            let o = abstract_term(rng, &t.object, t.object == root);
            let p = if rng.gen_bool(0.15) {
                group += 1;
                Term::var(format!("p{group}"))
            } else {
                t.predicate.clone()
            };
            group += 1;
            out.push(TriplePattern::new(s, p, o, group));
            let next = if t.subject == at { &t.object } else { &t.subject };
            if next.is_iri() {
                at = next.clone();
            }
        }
        out
    };
    let len = rng.gen_range(1..=3);
    let common = walk(rng, len, &mut abstract_term);
    let mut elements: Vec<Element> = common.into_iter().map(Element::Triple).collect();
    if rng.gen_bool(0.35) {
        let (la, lb) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let a = walk(rng, la, &mut abstract_term);
        let b = walk(rng, lb, &mut abstract_term);
        if !a.is_empty() && !b.is_empty() {
            elements.push(Element::Union(vec![GroupPattern::from_triples(a), GroupPattern::from_triples(b)]));
        }
    }
    GroupPattern::new(elements)
}

/// The triple lists a pattern of triples plus at most one level of UNION
/// expands to; the answer is the bag union of their matches.
pub fn alternatives(p: &GroupPattern) -> Vec<Vec<TriplePattern>> {
    let mut alts: Vec<Vec<TriplePattern>> = vec![Vec::new()];
    for e in &p.elements {
        match e {
            Element::Triple(t) => alts.iter_mut().for_each(|a| a.push(t.clone())),
            Element::Union(branches) => {
                alts = alts
                    .iter()
                    .flat_map(|a| {
                        branches.iter().flat_map(move |b| {
                            alternatives(b).into_iter().map(move |bt| {
                                let mut x = a.clone();
                                x.extend(bt);
                                x
                            })
                        })
                    })
                    .collect();
            }
            Element::Filter(_) => {}
            other => panic!("oracle does not expand {other:?}"),
        }
    }
    alts
}

fn substitute(t: &Term, mu: &Solution) -> Term {
    match t.binding_key() {
        Some(k) => mu.get(&k).cloned().unwrap_or_else(|| t.clone()),
        None => t.clone(),
    }
}

/// Whether a solution can be assembled by dereferencing only IRIs reached
/// from the query's own IRIs: a pattern instance is found once a reached
/// IRI at its subject or object has a document containing it, and finding
/// it reaches the IRIs at both of its ends.
pub fn reachable(web: &FixtureWeb, triples: &[TriplePattern], mu: &Solution) -> bool {
    let has_doc = |i: &str| web.document(i).is_some();
    let mut reached: BTreeSet<String> = triples
        .iter()
        .flat_map(|t| [&t.subject, &t.object])
        .filter_map(|x| x.as_iri())
        .filter(|i| has_doc(i))
        .map(str::to_owned)
        .collect();
    let images: Vec<Triple> = triples
        .iter()
        .map(|t| Triple::new(substitute(&t.subject, mu), substitute(&t.predicate, mu), substitute(&t.object, mu)))
        .collect();
    let mut found = vec![false; images.len()];
    loop {
        let mut progress = false;
        for (i, img) in images.iter().enumerate() {
            if found[i] {
                continue;
            }
            let located = [&img.subject, &img.object]
                .into_iter()
                .filter_map(|x| x.as_iri())
                .any(|a| reached.contains(a) && web.graph(a).contains(img));
            if located {
                found[i] = true;
                progress = true;
                for end in [&img.subject, &img.object].into_iter().filter_map(|x| x.as_iri()) {
                    if has_doc(end) {
                        reached.insert(end.to_owned());
                    }
                }
            }
        }
        if !progress {
            break;
        }
    }
    found.into_iter().all(|f| f)
}

/// Endpoint answer over the union of all documents, keeping only the
/// solutions that are reachable by traversal.
pub fn endpoint_oracle(web: &FixtureWeb, pattern: &GroupPattern) -> Vec<Vec<(String, String)>> {
    let g = web.union_graph();
    let mut rows = Vec::new();
    for alt in alternatives(pattern) {
        let table = match_bgp(&g, &alt, &BindingTable::unit());
        for mu in table.rows() {
            if reachable(web, &alt, mu) {
                rows.push(canonical_row(mu));
            }
        }
    }
    rows.sort();
    rows
}

pub fn canonical_row(mu: &Solution) -> Vec<(String, String)> {
    mu.iter().filter(|(k, _)| !k.starts_with("_:")).map(|(k, v)| (k.clone(), v.to_string())).collect()
}

/// Test-side SPARQL tokenizer for comparing query texts: splits on
/// whitespace and punctuation, drops PREFIX declarations and expands
/// prefixed names with the given table.
pub fn query_tokens(text: &str, prefixes: &[(&str, &str)]) -> Vec<String> {
    let mut declared: BTreeMap<String, String> = prefixes.iter().map(|(p, i)| (p.to_string(), i.to_string())).collect();
    let mut raw = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '<' && chars[i + 1..].iter().take_while(|x| **x != '>').all(|x| !x.is_whitespace()) {
            let end = i + chars[i..].iter().position(|x| *x == '>').unwrap();
            raw.push(chars[i..=end].iter().collect::<String>());
            i = end + 1;
        } else if c == '"' {
            let mut end = i + 1;
            while chars[end] != '"' {
                end += if chars[end] == '\\' { 2 } else { 1 };
            }
            raw.push(chars[i..=end].iter().collect());
            i = end + 1;
        } else if "{}().;,*".contains(c) {
            raw.push(c.to_string());
            i += 1;
        } else {
            let end = (i..chars.len())
                .find(|&j| {
                    chars[j].is_whitespace()
                        || "{}();,<\"".contains(chars[j])
                        || (chars[j] == '.' && !chars.get(j + 1).is_some_and(|n| n.is_alphanumeric()))
                })
                .unwrap_or(chars.len());
            raw.push(chars[i..end].iter().collect());
            i = end;
        }
    }
    let mut out = Vec::new();
    let mut k = 0;
    while k < raw.len() {
        if raw[k].eq_ignore_ascii_case("PREFIX") {
            let p = raw[k + 1].trim_end_matches(':').to_string();
            declared.insert(p, raw[k + 2].trim_matches(|c| c == '<' || c == '>').to_string());
            k += 3;
            continue;
        }
        let tok = &raw[k];
        let expanded = match tok.split_once(':') {
            Some((p, local)) if !tok.starts_with('<') && !tok.starts_with('"') && !tok.starts_with('?') => {
                match declared.get(p) {
                    Some(base) => format!("<{base}{local}>"),
                    None => tok.clone(),
                }
            }
            _ if tok == "a" => "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type>".to_string(),
            _ if tok.chars().all(|c| c.is_ascii_alphabetic()) => tok.to_ascii_uppercase(),
            _ => tok.clone(),
        };
        out.push(expanded);
        k += 1;
    }
    out
}

pub const PREFIXES: &[(&str, &str)] = &[
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("foaf", "http://xmlns.com/foaf/0.1/"),
    ("dbo", "http://dbpedia.org/ontology/"),
    ("dbr", "http://dbpedia.org/resource/"),
];
