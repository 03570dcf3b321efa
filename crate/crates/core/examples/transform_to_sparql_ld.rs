//! Rewrite answerable queries into SERVICE-anchored form, one SERVICE per
//! dereferenced resource.

use ldtraverse::sparql::{parse, repair};
use ldtraverse::transform::{to_sparql_ld, transform_query};

fn main() {
    let queries = [
        "SELECT ?birthDate WHERE { dbr:Barack_Obama dbo:birthDate ?birthDate }",
        "SELECT ?player ?birthDate WHERE { ?player rdf:type dbo:BasketballPlayer ; dbo:birthDate ?birthDate }",
        "SELECT * WHERE { dbr:Michael_Jordan dbo:birthPlace ?place . OPTIONAL { ?place rdfs:label ?label } \
         FILTER ( lang ( ?label ) = \"en\" ) } LIMIT 5",
        "SELECT ?e WHERE { ?e foaf:name \"Michael Jordan\" }",
    ];
    for text in queries {
        let q = parse(&repair(text)).unwrap();
        match transform_query(&q.pattern) {
            Ok(plan) => println!("{text}\n=> {}\n", to_sparql_ld(&q, &plan)),
            Err(e) => println!("{text}\n=> {e}\n"),
        }
    }
}
