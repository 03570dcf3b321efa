use std::fmt;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

/// A literal value. Equality is lexical: two literals are equal iff their
/// lexical forms, datatypes and language tags are equal as strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Option<String>,
    language: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, language: None }
    }

    /// `xsd:string` is folded into the plain form, so `"a"` and
    /// `"a"^^xsd:string` compare equal.
    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        let datatype = datatype.into();
        let datatype = if datatype == XSD_STRING { None } else { Some(datatype) };
        Literal { lexical: lexical.into(), datatype, language: None }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, language: Some(language.into().to_ascii_lowercase()) }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&str> {
        self.datatype.as_deref()
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// Numeric value for the xsd numeric types, if the lexical form parses.
    pub fn as_f64(&self) -> Option<f64> {
        match self.datatype.as_deref()? {
            XSD_INTEGER | XSD_DECIMAL | XSD_DOUBLE => self.lexical.trim().parse().ok(),
            dt if dt.starts_with(XSD) => {
                let local = &dt[XSD.len()..];
                let numeric = matches!(
                    local,
                    "float"
                        | "int"
                        | "long"
                        | "short"
                        | "byte"
                        | "nonNegativeInteger"
                        | "positiveInteger"
                        | "negativeInteger"
                        | "nonPositiveInteger"
                        | "unsignedInt"
                        | "unsignedLong"
                        | "unsignedShort"
                        | "unsignedByte"
                );
                if numeric {
                    self.lexical.trim().parse().ok()
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

/// An RDF term or a query variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal(Literal),
    BlankNode(String),
    /// Variable name without the leading `?` / `$`.
    Variable(String),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::BlankNode(label.into())
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::plain(lexical))
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    /// Key under which this term is bound in a solution when it occurs in a
    /// pattern. Variables bind under their name; query blank nodes behave as
    /// non-distinguished variables and bind under `_:label`.
    pub fn binding_key(&self) -> Option<String> {
        match self {
            Term::Variable(name) => Some(name.clone()),
            Term::BlankNode(label) => Some(format!("_:{label}")),
            _ => None,
        }
    }

    /// True for variables and query blank nodes.
    pub fn is_open(&self) -> bool {
        matches!(self, Term::Variable(_) | Term::BlankNode(_))
    }
}

/// Whether `iri` carries a scheme, i.e. is absolute.
pub fn is_absolute_iri(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else { return false };
    let scheme = &iri[..colon];
    !scheme.is_empty()
        && scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && scheme.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

pub(crate) fn escape_string(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
}

fn escape_iri(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => out.push_str(&format!("\\u{:04X}", c as u32)),
            c if (c as u32) <= 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::with_capacity(self.lexical.len() + 2);
        out.push('"');
        escape_string(&self.lexical, &mut out);
        out.push('"');
        if let Some(lang) = &self.language {
            out.push('@');
            out.push_str(lang);
        } else if let Some(dt) = &self.datatype {
            out.push_str("^^<");
            escape_iri(dt, &mut out);
            out.push('>');
        }
        f.write_str(&out)
    }
}

/// N-Triples rendering (variables as `?name`).
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => {
                let mut out = String::with_capacity(iri.len() + 2);
                out.push('<');
                escape_iri(iri, &mut out);
                out.push('>');
                f.write_str(&out)
            }
            Term::Literal(lit) => lit.fmt(f),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Variable(name) => write!(f, "?{name}"),
        }
    }
}
