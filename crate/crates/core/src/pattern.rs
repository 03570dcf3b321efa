//! Query templates: the graph pattern with FILTERs removed and every term
//! replaced by its kind, `[V]`, `[U]`, `[L]` or `[B]`.

use std::fmt;

use thiserror::Error;

use crate::rdf::Term;
use crate::sparql::{Element, GroupPattern, TriplePattern};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternTemplate {
    pub text: String,
    /// Top-level elements, FILTERs excluded.
    pub element_count: usize,
}

impl fmt::Display for PatternTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

pub fn extract_template(pattern: &GroupPattern) -> PatternTemplate {
    let mut out = Vec::new();
    write_group(pattern, &mut out);
    PatternTemplate {
        text: out.join(" "),
        element_count: pattern.elements.iter().filter(|e| !matches!(e, Element::Filter(_))).count(),
    }
}

fn kind(t: &Term) -> &'static str {
    match t {
        Term::Variable(_) => "[V]",
        Term::Iri(_) => "[U]",
        Term::Literal(_) => "[L]",
        Term::BlankNode(_) => "[B]",
    }
}

fn write_group(g: &GroupPattern, out: &mut Vec<&'static str>) {
    let mut prev: Option<&TriplePattern> = None;
    for e in &g.elements {
        match e {
            Element::Triple(t) => {
                match prev {
                    Some(p) if p.subject_group == t.subject_group && t.shares_predicate => {
                        out.extend([",", kind(&t.object)]);
                    }
                    Some(p) if p.subject_group == t.subject_group => {
                        out.extend([";", kind(&t.predicate), kind(&t.object)]);
                    }
                    Some(_) => out.extend([".", kind(&t.subject), kind(&t.predicate), kind(&t.object)]),
                    None => out.extend([kind(&t.subject), kind(&t.predicate), kind(&t.object)]),
                }
                prev = Some(t);
            }
            // dropped entirely, so the triples around it still read as adjacent
            Element::Filter(_) => {}
            Element::Union(branches) => {
                for (i, b) in branches.iter().enumerate() {
                    if i > 0 {
                        out.push("UNION");
                    }
                    out.push("{");
                    write_group(b, out);
                    out.push("}");
                }
                prev = None;
            }
            Element::Optional(body) => {
                out.extend(["OPTIONAL", "{"]);
                write_group(body, out);
                out.push("}");
                prev = None;
            }
            Element::Service(s) => {
                out.extend(["SERVICE", kind(&s.anchor), "{"]);
                write_group(&s.body, out);
                out.push("}");
                prev = None;
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed template at token {position}: {message}")]
pub struct TemplateSyntaxError {
    pub position: usize,
    pub message: String,
}

fn lex(text: &str) -> Vec<String> {
    let spaced = text.replace('{', " { ").replace('}', " } ").replace(';', " ; ").replace(',', " , ");
    spaced
        .split_whitespace()
        .map(|t| match t {
            "UN" => "UNION".to_owned(),
            "OPT" => "OPTIONAL".to_owned(),
            other => other.to_owned(),
        })
        .collect()
}

/// Canonical spelling of a template written in either the long
/// (`UNION`/`OPTIONAL`) or the short (`UN`/`OPT`) form, with any spacing.
pub fn normalize_template(text: &str) -> String {
    lex(text).join(" ")
}

/// Short display form: `UN` and `OPT` instead of the full keywords.
pub fn display_template(text: &str) -> String {
    lex(text)
        .into_iter()
        .map(|t| match t.as_str() {
            "UNION" => "UN".to_owned(),
            "OPTIONAL" => "OPT".to_owned(),
            _ => t,
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Builds a concrete pattern with the given template: fresh variables,
/// IRIs under `http://example.org/`, plain literals and blank nodes. Terms
/// after `;` reuse the subject, after `,` the subject and predicate.
pub fn instantiate_template(text: &str, seed: u64) -> Result<GroupPattern, TemplateSyntaxError> {
    let mut b = Builder { tokens: lex(text), pos: 0, seed, fresh: 0, group: 0 };
    let g = b.group()?;
    if b.pos < b.tokens.len() {
        return b.err("unexpected trailing tokens");
    }
    Ok(g)
}

struct Builder {
    tokens: Vec<String>,
    pos: usize,
    seed: u64,
    fresh: usize,
    group: usize,
}

impl Builder {
    fn err<T>(&self, message: &str) -> Result<T, TemplateSyntaxError> {
        Err(TemplateSyntaxError { position: self.pos, message: message.to_owned() })
    }

    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn expect(&mut self, tok: &str) -> Result<(), TemplateSyntaxError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{tok}'"))
        }
    }

    fn term(&mut self, position: &str) -> Result<Term, TemplateSyntaxError> {
        let Some(tok) = self.peek() else { return self.err("unexpected end of template") };
        let n = self.fresh;
        let term = match (tok, position) {
            ("[V]", _) => Term::var(format!("v{n}")),
            ("[U]", _) => Term::iri(format!("http://example.org/s{}/u{n}", self.seed)),
            ("[L]", "object") => Term::literal(format!("l{n}")),
            ("[B]", "subject" | "object") => Term::blank(format!("b{n}")),
            ("[L]" | "[B]", _) => return self.err(&format!("{tok} cannot be a {position}")),
            _ => return self.err(&format!("expected a term, found '{tok}'")),
        };
        self.fresh += 1;
        self.pos += 1;
        Ok(term)
    }

    fn group(&mut self) -> Result<GroupPattern, TemplateSyntaxError> {
        let mut elements = Vec::new();
        loop {
            match self.peek() {
                None | Some("}") => return Ok(GroupPattern::new(elements)),
                Some("{") => {
                    let mut branches = vec![self.braced()?];
                    while self.peek() == Some("UNION") {
                        self.pos += 1;
                        branches.push(self.braced()?);
                    }
                    if branches.len() < 2 {
                        return self.err("a braced group must be part of a UNION");
                    }
                    elements.push(Element::Union(branches));
                }
                Some("OPTIONAL") => {
                    self.pos += 1;
                    elements.push(Element::Optional(self.braced()?));
                }
                Some(".") => {
                    if !matches!(elements.last(), Some(Element::Triple(_))) {
                        return self.err("'.' must follow a triple");
                    }
                    self.pos += 1;
                    if !self.peek().is_some_and(|t| t.starts_with('[')) {
                        return self.err("'.' must be followed by a triple");
                    }
                }
                Some(t) if t.starts_with('[') => {
                    if matches!(elements.last(), Some(Element::Triple(_))) && self.tokens[self.pos - 1] != "." {
                        return self.err("triples must be separated by '.', ';' or ','");
                    }
                    self.triples(&mut elements)?
                }
                Some(t) => return self.err(&format!("unexpected '{t}'")),
            }
        }
    }

    fn braced(&mut self) -> Result<GroupPattern, TemplateSyntaxError> {
        self.expect("{")?;
        let g = self.group()?;
        self.expect("}")?;
        Ok(g)
    }

    fn triples(&mut self, elements: &mut Vec<Element>) -> Result<(), TemplateSyntaxError> {
        let group = self.group;
        self.group += 1;
        let subject = self.term("subject")?;
        let mut predicate = self.term("predicate")?;
        let object = self.term("object")?;
        elements.push(Element::Triple(TriplePattern::new(subject.clone(), predicate.clone(), object, group)));
        loop {
            match self.peek() {
                Some(";") => {
                    self.pos += 1;
                    predicate = self.term("predicate")?;
                    let object = self.term("object")?;
                    elements.push(Element::Triple(TriplePattern::new(
                        subject.clone(),
                        predicate.clone(),
                        object,
                        group,
                    )));
                }
                Some(",") => {
                    self.pos += 1;
                    let object = self.term("object")?;
                    let mut t = TriplePattern::new(subject.clone(), predicate.clone(), object, group);
                    t.shares_predicate = true;
                    elements.push(Element::Triple(t));
                }
                _ => return Ok(()),
            }
        }
    }
}
