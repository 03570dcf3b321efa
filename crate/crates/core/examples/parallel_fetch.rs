//! Sequential versus parallel dereferencing on a simulated web where every
//! response takes 50 ms, with per-host politeness checked on the side.

use std::time::Instant;

use ldtraverse::exec::{execute, ExecConfig, FixtureWeb, RecordingDereferencer};
use ldtraverse::rdf::RdfSyntax;
use ldtraverse::sparql::parse;
use ldtraverse::transform::transform_query;

fn web(hosts: usize, per_host: usize, latency_ms: u64) -> FixtureWeb {
    let mut web = FixtureWeb::new();
    let mut index = String::new();
    for h in 0..hosts {
        web.set_latency(format!("site{h}.example"), latency_ms);
        for r in 0..per_host {
            let iri = format!("http://site{h}.example/r{r}");
            let member = format!("<http://index.example/all> <http://ex.org/member> <{iri}> .\n");
            index.push_str(&member);
            web.insert(iri.clone(), RdfSyntax::NTriples, format!("{member}<{iri}> <http://ex.org/n> \"{r}\" .\n"));
        }
    }
    web.insert("http://index.example/all", RdfSyntax::NTriples, index);
    web
}

fn main() {
    let q = parse("SELECT * WHERE { <http://index.example/all> <http://ex.org/member> ?r . ?r <http://ex.org/n> ?n }")
        .unwrap();
    let plan = transform_query(&q.pattern).unwrap();

    let w = web(100, 1, 50);
    for max_parallel in [1, 10] {
        let rec = RecordingDereferencer::new(&w);
        let cfg = ExecConfig { max_parallel, ..ExecConfig::default() };
        let started = Instant::now();
        let (rows, stats) = execute(&plan, &rec, &cfg).unwrap();
        println!(
            "maxParallel={max_parallel:>2}: {} rows, {} fetches, {:>5} ms, peak in flight {}",
            rows.len(),
            stats.fetch_count,
            started.elapsed().as_millis(),
            rec.max_in_flight()
        );
    }

    let w = web(5, 6, 5);
    let rec = RecordingDereferencer::new(&w);
    let cfg = ExecConfig { max_parallel: 10, per_host_delay_ms: 200, ..ExecConfig::default() };
    execute(&plan, &rec, &cfg).unwrap();
    println!("5 hosts x 6 resources, 200 ms host delay: smallest gap {:?}", rec.min_host_gap().unwrap());
}
