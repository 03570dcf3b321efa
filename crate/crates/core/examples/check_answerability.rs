//! Decide which queries can be answered by following links from their IRIs.

use ldtraverse::answerability::is_ldaq;
use ldtraverse::sparql::{parse, repair, triage, TriageStatus};

fn main() {
    let queries = [
        "SELECT ?d WHERE { dbr:Barack_Obama dbo:birthDate ?d }",
        "SELECT * WHERE { ?p a dbo:BasketballPlayer ; dbo:birthDate ?d }",
        "SELECT * WHERE { { ?p a dbo:BasketballPlayer } UNION { ?p a dbo:FootballPlayer } ?p dbo:birthPlace ?place }",
        "SELECT ?e WHERE { ?e foaf:name \"Michael Jordan\" }",
        "SELECT (COUNT(*) AS ?n) WHERE { ?s ?p ?o }",
        "SELECT ?x WHERE { ?x foaf:knows+ ?y }",
    ];
    for text in queries {
        let t = triage(text);
        if t.status != TriageStatus::Considered {
            println!("{:<15} {text}  [{}]", t.status.name(), t.reasons.join(", "));
            continue;
        }
        // Common prefixes such as dbr: and foaf: are filled in when undeclared.
        let q = parse(&repair(text)).unwrap();
        let v = is_ldaq(&q.pattern);
        match &v.witness {
            None => println!("{:<15} {text}", "answerable"),
            Some(w) => println!("{:<15} {text}  [?{} cannot be bound]", "not answerable", w.variable),
        }
    }
}
