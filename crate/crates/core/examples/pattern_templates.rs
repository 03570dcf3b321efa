//! Reduce queries to structural templates and build queries back from templates.

use ldtraverse::answerability::is_ldaq;
use ldtraverse::pattern::{display_template, extract_template, instantiate_template, normalize_template};
use ldtraverse::sparql::{parse, repair};

fn main() {
    let q = parse(&repair(
        "SELECT * WHERE { { ?p a dbo:BasketballPlayer } UNION { ?p a dbo:FootballPlayer } \
         ?p dbo:birthDate ?d ; dbo:birthPlace ?place . FILTER ( ?d > \"1960\" ) \
         { ?place foaf:name ?n } UNION { ?place rdfs:label ?n } }",
    ))
    .unwrap();
    let t = extract_template(&q.pattern);
    println!("template: {}\nshort:    {}\n", t.text, display_template(&t.text));

    for short in ["[U] [V] [V]", "[V] [U] [U] ; [V] [V]", "OPT { [U] [U] [V] }", "[V] [U] [L]", "[V] [V] [V]"] {
        let text = normalize_template(short);
        let p = instantiate_template(&text, 1).unwrap();
        let verdict = if is_ldaq(&p).answerable { "answerable" } else { "not answerable" };
        println!("{short:<24} -> {:<60} {verdict}", p.canonical());
    }
}
