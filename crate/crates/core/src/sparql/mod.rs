//! SPARQL subset: lexer, parser, prefix repair, triage and canonical keys.

mod ast;
pub mod lexer;
mod parser;
mod repair;
mod triage;

use std::fmt;

use thiserror::Error;

pub use ast::{
    ArithOp, CompareOp, Element, Expr, GroupPattern, ParsedQuery, Projection, ProjectionItem, QueryForm, ServiceBlock,
    TriplePattern,
};
pub use parser::{parse, parse_sparql_ld};
pub use repair::{builtin_prefix, repair, BUILTIN_PREFIXES};
pub use triage::{triage, Triage, TriageStatus};

/// Query features that place a query outside the analyzed subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    Describe,
    Construct,
    From,
    Graph,
    Service,
    Minus,
    Exists,
    NotExists,
    Bind,
    Values,
    SubSelect,
    PropertyPath,
}

impl Feature {
    pub fn name(self) -> &'static str {
        match self {
            Feature::Describe => "DESCRIBE",
            Feature::Construct => "CONSTRUCT",
            Feature::From => "FROM",
            Feature::Graph => "GRAPH",
            Feature::Service => "SERVICE",
            Feature::Minus => "MINUS",
            Feature::Exists => "EXISTS",
            Feature::NotExists => "NOT-EXISTS",
            Feature::Bind => "BIND",
            Feature::Values => "VALUES",
            Feature::SubSelect => "SUBSELECT",
            Feature::PropertyPath => "PROPERTY-PATH",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("parse error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported feature {feature} at {line}:{column}")]
    Unsupported { feature: Feature, line: usize, column: usize },
}

/// Canonical graph-pattern key used to detect duplicate queries. It ignores
/// the query form, projection, prefix declarations and solution modifiers.
pub fn dedup_key(query: &ParsedQuery) -> String {
    query.pattern.canonical()
}
