//! Evaluate a query by link traversal over the bundled basketball fixture web.
//!
//! `cargo run --example fixture_traversal [query.rq] [fixture-dir]`

use std::path::PathBuf;

use ldtraverse::exec::{execute, validate_fixture_r2, ExecConfig, FixtureWeb};
use ldtraverse::sparql::{parse, repair};
use ldtraverse::transform::{to_sparql_ld, transform_query};

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut args = std::env::args().skip(1);
    let query = args.next().map(PathBuf::from).unwrap_or(root.join("queries/players_birthdate.rq"));
    let dir = args.next().map(PathBuf::from).unwrap_or(root.join("basketball"));

    let web = FixtureWeb::load(&dir).expect("fixture directory with mapping.json");
    for v in validate_fixture_r2(&web) {
        eprintln!("warning: <{}> lacks {}", v.iri, v.missing);
    }
    let q = parse(&repair(&std::fs::read_to_string(&query).unwrap())).unwrap();
    let plan = transform_query(&q.pattern).expect("answerable query");
    println!("{}\n", to_sparql_ld(&q, &plan));

    let (table, stats) = execute(&plan, &web, &ExecConfig::fixtures()).unwrap();
    print!("{}", table.to_tsv());
    println!("\n{}", serde_json::to_string_pretty(&stats).unwrap());
}
