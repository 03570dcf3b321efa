//! Triage and summarize a query log: invalid, unconsidered and unique
//! queries, split by answerability, with the most frequent templates.
//!
//! `cargo run --example analyze_log [log.txt]` (one query per line)

use std::path::Path;

use ldtraverse::analyzer::{analyze, ingest, InputFormat};

fn sample() -> Vec<String> {
    let mut log = Vec::new();
    for i in 0..40 {
        log.push(format!("SELECT * WHERE {{ <http://dbpedia.org/resource/R{i}> ?p ?o }}"));
        if i % 4 == 0 {
            log.push(format!("SELECT DISTINCT * WHERE {{ dbr:R{i} ?p ?o }} LIMIT 10"));
        }
        if i % 3 == 0 {
            log.push(format!("SELECT ?s WHERE {{ ?s dbo:genre dbr:G{i} ; rdfs:label ?l }}"));
        }
        if i % 5 == 0 {
            log.push(format!("SELECT ?s WHERE {{ ?s rdfs:label \"Label {i}\"@en }}"));
        }
    }
    log.push("DESCRIBE <http://dbpedia.org/resource/R1>".into());
    log.push("SELECT * WHERE { ?s ?p ?o . BIND(1 AS ?one) }".into());
    log.push("SELECT ?x WHERE { ?x ".into());
    log
}

fn main() {
    let log = match std::env::args().nth(1) {
        Some(path) => ingest(Path::new(&path), InputFormat::Lines).expect("readable log"),
        None => sample(),
    };
    let report = analyze(&log, 5);
    println!(
        "total {}  invalid {}  unconsidered {}  unique {}  answerable share {:.1}%",
        report.total,
        report.invalid,
        report.unconsidered,
        report.unique,
        100.0 * report.ldaq_share()
    );
    for (name, class) in [("answerable", &report.ldaq), ("not answerable", &report.non_ldaq)] {
        println!("\ntop {name} templates:");
        for t in &class.top {
            println!("{:>6}  {}", t.count, t.template);
        }
    }
}
