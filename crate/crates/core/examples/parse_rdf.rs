//! Parse a Turtle document, print it as N-Triples and match a basic graph pattern.

use ldtraverse::rdf::{match_bgp, parse_rdf, serialize_ntriples, BindingTable, RdfSyntax};
use ldtraverse::sparql::parse;

const DOC: &str = r#"
@prefix ex: <http://example.org/> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .

ex:alice a foaf:Person ; foaf:name "Alice"@en ; foaf:knows ex:bob, ex:carol .
ex:bob foaf:name "Bob" ; foaf:age 42 .
ex:carol foaf:name "Carol" .
"#;

fn main() {
    let g = parse_rdf(DOC, RdfSyntax::Turtle, None).expect("valid Turtle");
    println!("{} triples:\n{}", g.len(), serialize_ntriples(&g));

    let q = parse(
        "SELECT * WHERE { <http://example.org/alice> <http://xmlns.com/foaf/0.1/knows> ?friend . \
         ?friend <http://xmlns.com/foaf/0.1/name> ?name }",
    )
    .unwrap();
    let patterns: Vec<_> = q.pattern.triples().into_iter().cloned().collect();
    print!("{}", match_bgp(&g, &patterns, &BindingTable::unit()).to_tsv());
}
