//! Rewriting answerable queries into SERVICE-anchored traversal plans.
//!
//! Every triple is placed in a clause anchored on a term to dereference:
//! an IRI of the triple (subject first) or a variable bound earlier (again
//! subject first). Triples with the same anchor share a clause.

use std::fmt::Write;

use thiserror::Error;

use crate::answerability::{check_element, BoundVarSet};
use crate::rdf::Term;
use crate::sparql::{Element, Expr, GroupPattern, ParsedQuery, Projection, TriplePattern};

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceClause {
    pub anchor: Term,
    pub body: Vec<TriplePattern>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraversalElement {
    Service(ServiceClause),
    Union(Vec<Vec<TraversalElement>>),
    Optional(Vec<TraversalElement>),
    Filter(Expr),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraversalQuery {
    pub elements: Vec<TraversalElement>,
}

impl TraversalQuery {
    /// All triples in clause bodies, depth-first.
    pub fn triples(&self) -> Vec<&TriplePattern> {
        fn walk<'a>(elems: &'a [TraversalElement], out: &mut Vec<&'a TriplePattern>) {
            for e in elems {
                match e {
                    TraversalElement::Service(c) => out.extend(c.body.iter()),
                    TraversalElement::Union(bs) => bs.iter().for_each(|b| walk(b, out)),
                    TraversalElement::Optional(b) => walk(b, out),
                    TraversalElement::Filter(_) => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.elements, &mut out);
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("pattern is not Linked Data-answerable: ?{variable} can never be bound")]
pub struct NotAnswerableError {
    pub variable: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraversalFormError {
    #[error("triple outside of any SERVICE block: {0}")]
    BareTriple(String),
    #[error("SERVICE anchor must be an IRI or variable")]
    BadAnchor,
    #[error("SERVICE body may only contain triples")]
    NestedService,
}

/// Dereference anchor for a single triple under `bound`, if there is one.
pub fn anchor_for(t: &TriplePattern, bound: &BoundVarSet) -> Option<Term> {
    if t.subject.is_iri() {
        return Some(t.subject.clone());
    }
    if t.object.is_iri() {
        return Some(t.object.clone());
    }
    [&t.subject, &t.object].into_iter().find(|x| x.binding_key().is_some_and(|k| bound.contains(&k))).cloned()
}

pub fn transform_bgp(bgp: &[TriplePattern], bound: &BoundVarSet) -> Result<Vec<ServiceClause>, NotAnswerableError> {
    let elements: Vec<Element> = bgp.iter().cloned().map(Element::Triple).collect();
    let (out, _) = transform_elements(&elements, bound.clone())?;
    Ok(out
        .into_iter()
        .map(|e| match e {
            TraversalElement::Service(c) => c,
            _ => unreachable!("a BGP yields clauses only"),
        })
        .collect())
}

pub fn transform_query(pattern: &GroupPattern) -> Result<TraversalQuery, NotAnswerableError> {
    let (elements, _) = transform_elements(&pattern.elements, BoundVarSet::new())?;
    Ok(TraversalQuery { elements })
}

fn transform_elements(
    elements: &[Element],
    mut bound: BoundVarSet,
) -> Result<(Vec<TraversalElement>, BoundVarSet), NotAnswerableError> {
    let mut out = Vec::new();
    let mut filters: Vec<&Expr> = Vec::new();
    let mut pending: Vec<&Element> = Vec::new();
    for e in elements {
        match e {
            Element::Filter(f) => filters.push(f),
            _ => {
                if !try_include(e, &mut bound, &mut out)? {
                    pending.push(e);
                }
            }
        }
        flush_filters(&mut filters, &bound, &mut out);
    }
    while !pending.is_empty() {
        let before = pending.len();
        let mut still = Vec::new();
        for e in pending {
            if try_include(e, &mut bound, &mut out)? {
                flush_filters(&mut filters, &bound, &mut out);
            } else {
                still.push(e);
            }
        }
        if still.len() == before {
            let variable = match check_element(still[0], &bound) {
                Some(Err(v)) => v,
                _ => String::new(),
            };
            return Err(NotAnswerableError { variable });
        }
        pending = still;
    }
    out.extend(filters.into_iter().cloned().map(TraversalElement::Filter));
    Ok((out, bound))
}

fn flush_filters(filters: &mut Vec<&Expr>, bound: &BoundVarSet, out: &mut Vec<TraversalElement>) {
    filters.retain(|f| {
        if f.variables().iter().all(|v| bound.contains(v)) {
            out.push(TraversalElement::Filter((*f).clone()));
            false
        } else {
            true
        }
    });
}

/// Adds `e` to the plan if it is answerable under `bound`.
fn try_include(
    e: &Element,
    bound: &mut BoundVarSet,
    out: &mut Vec<TraversalElement>,
) -> Result<bool, NotAnswerableError> {
    let grown = match check_element(e, bound) {
        Some(Ok(b)) => b,
        Some(Err(_)) => return Ok(false),
        None => return Ok(true),
    };
    match e {
        Element::Triple(t) => {
            let anchor = anchor_for(t, bound).expect("answerable triple has an anchor");
            include_triple(anchor, t.clone(), out);
        }
        Element::Union(branches) => {
            let mut wrapped = Vec::new();
            for b in branches {
                wrapped.push(transform_elements(&b.elements, bound.clone())?.0);
            }
            out.push(TraversalElement::Union(wrapped));
        }
        Element::Optional(body) => {
            out.push(TraversalElement::Optional(transform_elements(&body.elements, bound.clone())?.0));
        }
        Element::Service(s) => {
            out.push(TraversalElement::Service(ServiceClause {
                anchor: s.anchor.clone(),
                body: s.body.triples().into_iter().cloned().collect(),
            }));
        }
        Element::Filter(_) => unreachable!(),
    }
    *bound = grown;
    Ok(true)
}

/// Appends to the latest clause with the same anchor, unless an OPTIONAL
/// sits in between (joining across it would change the left join).
fn include_triple(anchor: Term, t: TriplePattern, out: &mut Vec<TraversalElement>) {
    for e in out.iter_mut().rev() {
        match e {
            TraversalElement::Service(c) if c.anchor == anchor => {
                c.body.push(t);
                return;
            }
            TraversalElement::Optional(_) => break,
            _ => {}
        }
    }
    out.push(TraversalElement::Service(ServiceClause { anchor, body: vec![t] }));
}

/// Reads the plan back from a pattern written with SERVICE blocks. Union,
/// OPTIONAL and FILTER structure is kept.
pub fn traversal_from_pattern(pattern: &GroupPattern) -> Result<TraversalQuery, TraversalFormError> {
    fn convert(elements: &[Element]) -> Result<Vec<TraversalElement>, TraversalFormError> {
        elements
            .iter()
            .map(|e| {
                Ok(match e {
                    Element::Service(s) => {
                        if !(s.anchor.is_iri() || s.anchor.is_variable()) {
                            return Err(TraversalFormError::BadAnchor);
                        }
                        let mut body = Vec::new();
                        for be in &s.body.elements {
                            match be {
                                Element::Triple(t) => body.push(t.clone()),
                                _ => return Err(TraversalFormError::NestedService),
                            }
                        }
                        TraversalElement::Service(ServiceClause { anchor: s.anchor.clone(), body })
                    }
                    Element::Union(bs) => {
                        TraversalElement::Union(bs.iter().map(|b| convert(&b.elements)).collect::<Result<_, _>>()?)
                    }
                    Element::Optional(b) => TraversalElement::Optional(convert(&b.elements)?),
                    Element::Filter(f) => TraversalElement::Filter(f.clone()),
                    Element::Triple(t) => {
                        return Err(TraversalFormError::BareTriple(format!(
                            "{} {} {}",
                            t.subject, t.predicate, t.object
                        )))
                    }
                })
            })
            .collect()
    }
    Ok(TraversalQuery { elements: convert(&pattern.elements)? })
}

fn term_text(t: &Term) -> String {
    match t {
        // blank nodes must join across clauses, so they travel as variables
        Term::BlankNode(label) => format!("?_bnode_{label}"),
        other => other.to_string(),
    }
}

fn write_elements(elements: &[TraversalElement], out: &mut String) {
    for e in elements {
        match e {
            TraversalElement::Service(c) => {
                let body: Vec<String> = c
                    .body
                    .iter()
                    .map(|t| format!("{} {} {}", term_text(&t.subject), term_text(&t.predicate), term_text(&t.object)))
                    .collect();
                let _ = write!(out, "SERVICE {} {{ {} }} ", term_text(&c.anchor), body.join(" . "));
            }
            TraversalElement::Union(branches) => {
                for (i, b) in branches.iter().enumerate() {
                    if i > 0 {
                        out.push_str("UNION ");
                    }
                    out.push_str("{ ");
                    write_elements(b, out);
                    out.push_str("} ");
                }
            }
            TraversalElement::Optional(b) => {
                out.push_str("OPTIONAL { ");
                write_elements(b, out);
                out.push_str("} ");
            }
            TraversalElement::Filter(f) => {
                let _ = write!(out, "FILTER ( {f} ) ");
            }
        }
    }
}

/// `SELECT <projection> WHERE { SERVICE ... }`.
pub fn serialize_traversal(q: &TraversalQuery, projection: &Projection) -> String {
    format!("SELECT {projection} WHERE {}", braced_body(q))
}

fn braced_body(q: &TraversalQuery) -> String {
    let mut body = String::new();
    write_elements(&q.elements, &mut body);
    format!("{{ {body}}}")
}

/// Traversal form of a whole query: its own form, projection, DISTINCT
/// and trailing modifiers around the SERVICE body.
pub fn to_sparql_ld(query: &ParsedQuery, q: &TraversalQuery) -> String {
    let mut out = format!("{} WHERE {}", query.header(), braced_body(q));
    if !query.modifiers.is_empty() {
        out.push(' ');
        out.push_str(&query.modifiers);
    }
    out
}
