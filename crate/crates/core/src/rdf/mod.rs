//! RDF terms, graphs, Turtle / N-Triples parsing and BGP matching.

mod bgp;
mod graph;
mod term;
mod turtle;

pub use bgp::{match_bgp, BindingTable, Solution};
pub use graph::{Graph, Triple};
#[allow(unused_imports)]
pub(crate) use term::escape_string;
pub use term::{
    is_absolute_iri, Literal, Term, RDF_TYPE, XSD, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING,
};
pub use turtle::{parse_rdf, RdfSyntax, SyntaxError};

/// N-Triples rendering, one statement per line, lines sorted.
pub fn serialize_ntriples(g: &Graph) -> String {
    let mut lines: Vec<String> = g.iter().map(|t| t.to_string()).collect();
    lines.sort();
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}
