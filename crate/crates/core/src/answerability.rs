//! Linked Data-answerability of BGPs and whole query patterns.
//!
//! A BGP is answerable when its triples can be ordered so that each one
//! holds an IRI or an already-bound variable in subject or object position.
//! Such a triple can be evaluated by dereferencing that IRI (or the value of
//! that variable).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::rdf::Term;
use crate::sparql::{Element, GroupPattern, TriplePattern};

pub type BoundVarSet = BTreeSet<String>;

/// For each variable, the variables whose binding can bind it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BindabilityMap {
    edges: BTreeMap<String, BTreeSet<String>>,
}

impl BindabilityMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: &str, helper: &str) {
        if v != helper {
            self.edges.entry(v.to_owned()).or_default().insert(helper.to_owned());
        }
    }

    pub fn helpers(&self, v: &str) -> impl Iterator<Item = &String> {
        self.edges.get(v).into_iter().flatten()
    }
}

/// True iff a helper of `v` is locally bound or itself bindable. Variables
/// already on the recursion path (`visited`) contribute nothing.
pub fn is_bindable(v: &str, m: &BindabilityMap, lb: &BoundVarSet, visited: &mut BTreeSet<String>) -> bool {
    if !visited.insert(v.to_owned()) {
        return false;
    }
    let found = m.helpers(v).any(|h| lb.contains(h) || is_bindable(h, m, lb, visited));
    visited.remove(v);
    found
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BgpVerdict {
    pub answerable: bool,
    pub bound: BoundVarSet,
    /// First variable, in order of appearance, that cannot be bound.
    pub witness: Option<String>,
}

/// Answerability of a triples-only pattern given the variables already
/// bound. On success outside a union branch the returned set adds every
/// variable of the pattern to `bound`; inside a union branch, and on
/// failure, `bound` comes back unchanged.
pub fn is_lda_bgp(bgp: &[TriplePattern], in_union: bool, bound: &BoundVarSet) -> BgpVerdict {
    let mut lb = bound.clone();
    let mut m = BindabilityMap::new();
    for t in bgp {
        let s = t.subject.binding_key();
        let p = t.predicate.binding_key();
        let o = t.object.binding_key();
        let bind_rest = |lb: &mut BoundVarSet, other: &Option<String>| {
            if let Some(v) = other {
                lb.insert(v.clone());
            }
            if let Some(v) = &p {
                lb.insert(v.clone());
            }
        };
        if t.subject.is_iri() {
            bind_rest(&mut lb, &o);
        } else if t.object.is_iri() {
            bind_rest(&mut lb, &s);
        } else if s.as_ref().is_some_and(|v| lb.contains(v)) {
            bind_rest(&mut lb, &o);
        } else if o.as_ref().is_some_and(|v| lb.contains(v)) {
            bind_rest(&mut lb, &s);
        } else {
            if let (Some(s), Some(o)) = (&s, &o) {
                m.add(s, o);
                m.add(o, s);
            }
            if let Some(p) = &p {
                for end in [&s, &o].into_iter().flatten() {
                    m.add(p, end);
                }
            }
        }
    }
    let vars = bgp_variables(bgp);
    let witness = vars.iter().find(|v| !lb.contains(*v) && !is_bindable(v, &m, &lb, &mut BTreeSet::new())).cloned();
    let answerable = witness.is_none();
    let bound = if answerable && !in_union {
        let mut b = lb;
        b.extend(vars);
        b
    } else {
        bound.clone()
    };
    BgpVerdict { answerable, bound, witness }
}

fn bgp_variables(bgp: &[TriplePattern]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for key in bgp.iter().flat_map(|t| t.open_keys()) {
        if !out.contains(&key) {
            out.push(key);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub variable: String,
    /// Index of the offending top-level element.
    pub element: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerabilityVerdict {
    pub answerable: bool,
    pub bound_after: BoundVarSet,
    pub witness: Option<Witness>,
    /// Top-level element indices in the order they were discharged.
    pub element_order: Vec<usize>,
}

/// Answerability of a whole group pattern: triples, UNION and OPTIONAL
/// groups are discharged as they become answerable; FILTERs are ignored.
pub fn is_ldaq(pattern: &GroupPattern) -> AnswerabilityVerdict {
    match discharge(&pattern.elements, BoundVarSet::new()) {
        Ok((bound_after, element_order)) => {
            AnswerabilityVerdict { answerable: true, bound_after, witness: None, element_order }
        }
        Err(Stuck { bound, order, witness }) => {
            AnswerabilityVerdict { answerable: false, bound_after: bound, witness: Some(witness), element_order: order }
        }
    }
}

struct Stuck {
    bound: BoundVarSet,
    order: Vec<usize>,
    witness: Witness,
}

/// Outcome of one element check: the grown bound set, or the variable that
/// blocks it. `None` for elements that take no part (FILTER).
pub(crate) fn check_element(e: &Element, bound: &BoundVarSet) -> Option<Result<BoundVarSet, String>> {
    let grown = |vars: Vec<String>| {
        let mut out = bound.clone();
        out.extend(vars);
        out
    };
    Some(match e {
        Element::Triple(t) => {
            let v = is_lda_bgp(std::slice::from_ref(t), false, bound);
            if v.answerable {
                Ok(v.bound)
            } else {
                Err(v.witness.unwrap_or_default())
            }
        }
        Element::Union(branches) => match branches.iter().find_map(|b| check_group(b, bound).err()) {
            Some(w) => Err(w),
            None => Ok(grown(branches.iter().flat_map(|b| b.variables()).collect())),
        },
        Element::Optional(body) => check_group(body, bound).map(|()| grown(body.variables())),
        Element::Service(s) => {
            let anchored = match s.anchor.binding_key() {
                Some(k) => bound.contains(&k),
                None => s.anchor.is_iri(),
            };
            if anchored {
                Ok(grown(s.body.variables()))
            } else {
                Err(s.anchor.binding_key().unwrap_or_default())
            }
        }
        Element::Filter(_) => return None,
    })
}

/// Whether a nested group is answerable under `bound`, without letting its
/// bindings escape.
fn check_group(g: &GroupPattern, bound: &BoundVarSet) -> Result<(), String> {
    if g.is_flat() {
        let triples: Vec<TriplePattern> = g.triples().into_iter().cloned().collect();
        let v = is_lda_bgp(&triples, true, bound);
        return if v.answerable { Ok(()) } else { Err(v.witness.unwrap_or_default()) };
    }
    discharge(&g.elements, bound.clone()).map(|_| ()).map_err(|s| s.witness.variable)
}

/// First pass in syntactic order, then sweeps over the pending elements
/// until none are left or a sweep makes no progress.
fn discharge(elements: &[Element], mut bound: BoundVarSet) -> Result<(BoundVarSet, Vec<usize>), Stuck> {
    let mut order = Vec::new();
    let mut pending = Vec::new();
    for (i, e) in elements.iter().enumerate() {
        match check_element(e, &bound) {
            None => {}
            Some(Ok(b)) => {
                bound = b;
                order.push(i);
            }
            Some(Err(_)) => pending.push(i),
        }
    }
    while !pending.is_empty() {
        let mut found_new = false;
        let mut still = Vec::new();
        let mut first_block = None;
        for &i in &pending {
            match check_element(&elements[i], &bound) {
                Some(Ok(b)) => {
                    bound = b;
                    order.push(i);
                    found_new = true;
                }
                Some(Err(w)) => {
                    first_block.get_or_insert(Witness { variable: w, element: i });
                    still.push(i);
                }
                None => unreachable!("filters are never pending"),
            }
        }
        if !found_new {
            return Err(Stuck { bound, order, witness: first_block.expect("pending is non-empty") });
        }
        pending = still;
    }
    Ok((bound, order))
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("exhaustive check is limited to {max} triples, got {got}")]
pub struct SizeError {
    pub max: usize,
    pub got: usize,
}

pub const ORACLE_MAX_TRIPLES: usize = 8;

/// Exhaustive reference check: some ordering of the triples gives each one
/// an IRI or a bound variable (or blank node) as subject or object, where
/// evaluating a triple binds all of its variables.
pub fn oracle_is_lda_bgp(bgp: &[TriplePattern], bound: &BoundVarSet) -> Result<bool, SizeError> {
    if bgp.len() > ORACLE_MAX_TRIPLES {
        return Err(SizeError { max: ORACLE_MAX_TRIPLES, got: bgp.len() });
    }
    fn anchored(t: &TriplePattern, bound: &BoundVarSet) -> bool {
        [&t.subject, &t.object].into_iter().any(|x| match x {
            Term::Iri(_) => true,
            other => other.binding_key().is_some_and(|k| bound.contains(&k)),
        })
    }
    fn search(rest: &mut Vec<&TriplePattern>, bound: &BoundVarSet) -> bool {
        if rest.is_empty() {
            return true;
        }
        for i in 0..rest.len() {
            if !anchored(rest[i], bound) {
                continue;
            }
            let t = rest.remove(i);
            let mut next = bound.clone();
            next.extend(t.open_keys());
            let ok = search(rest, &next);
            rest.insert(i, t);
            if ok {
                return true;
            }
        }
        false
    }
    Ok(search(&mut bgp.iter().collect(), bound))
}
