//! Acceptance checks. One PASS/FAIL line per criterion; exits nonzero if any fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::*;
use ldtraverse::analyzer::analyze;
use ldtraverse::answerability::{is_lda_bgp, is_ldaq, oracle_is_lda_bgp, BoundVarSet};
use ldtraverse::cli::{dispatch, ExitStatus};
use ldtraverse::exec::{execute, validate_fixture_r2, ExecConfig, FixtureWeb, RecordingDereferencer};
use ldtraverse::pattern::{extract_template, instantiate_template, normalize_template};
use ldtraverse::rdf::{Graph, Term, Triple, RDF_TYPE};
use ldtraverse::sparql::{parse, repair, Projection, TriplePattern};
use ldtraverse::transform::{serialize_traversal, to_sparql_ld, transform_query};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Log, expected class counts, expected template counts (answerable, not).
type Corpus = (Vec<String>, [usize; 6], BTreeMap<String, usize>, BTreeMap<String, usize>);

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn query_path(name: &str) -> PathBuf {
    fixtures().join("queries").join(name)
}

fn load(name: &str) -> ldtraverse::sparql::ParsedQuery {
    let text = std::fs::read_to_string(query_path(name)).unwrap();
    parse(&repair(&text)).unwrap()
}

fn within(started: Instant, budget: Duration, detail: String) -> Outcome {
    let took = started.elapsed();
    if took <= budget {
        Ok(format!("{detail} ({} ms)", took.as_millis()))
    } else {
        Err(format!("{detail}, but took {} ms (budget {} ms)", took.as_millis(), budget.as_millis()))
    }
}

fn check_verdicts() -> Outcome {
    let started = Instant::now();
    let cases = [
        ("obama_birthdate.rq", true),
        ("players_birthdate.rq", true),
        ("players_union.rq", true),
        ("name_lookup.rq", false),
        ("count_triples.rq", false),
    ];
    let mut right = 0;
    let mut wrong = Vec::new();
    for (file, answerable) in cases {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let path = query_path(file);
        let code = dispatch(["ldtraverse", "check", path.to_str().unwrap()], &mut out, &mut err);
        let text = String::from_utf8(out).unwrap();
        let ok = if answerable {
            code == ExitStatus::SUCCESS && text == "answerable\n"
        } else {
            code == ExitStatus::FAILURE && text.starts_with("non-answerable")
        };
        if ok {
            right += 1;
        } else {
            wrong.push(format!("{file}: {code:?} {}", text.trim()));
        }
    }
    if right == cases.len() {
        within(started, Duration::from_secs(1), format!("{right}/{} verdicts", cases.len()))
    } else {
        Err(format!("{right}/{} verdicts; wrong: {}", cases.len(), wrong.join("; ")))
    }
}

fn transform_goldens() -> Outcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    // The single-resource golden is written with `SELECT *`.
    let obama = load("obama_birthdate.rq");
    let got = serialize_traversal(&transform_query(&obama.pattern).unwrap(), &Projection::All);
    let players = load("players_birthdate.rq");
    let got_players = to_sparql_ld(&players, &transform_query(&players.pattern).unwrap());
    for (got, golden) in [(got, "obama_birthdate_ld.rq"), (got_players, "players_birthdate_ld.rq")] {
        let want = std::fs::read_to_string(query_path(golden)).unwrap();
        let (g, w) = (query_tokens(&got, PREFIXES), query_tokens(&want, PREFIXES));
        if g != w {
            failures.push(format!("{golden}: got `{}`", g.join(" ")));
        }
    }
    if failures.is_empty() {
        within(started, Duration::from_secs(1), "2/2 token-equal".into())
    } else {
        Err(failures.join("; "))
    }
}

fn union_template() -> Outcome {
    const LISTING: &str =
        "{ [V] [U] [U] } UNION { [V] [U] [U] } [V] [U] [V] ; [U] [V] { [V] [U] [V] } UNION { [V] [U] [V] }";
    let got = extract_template(&load("players_union.rq").pattern).text;
    if got == LISTING {
        Ok("exact match".into())
    } else {
        Err(format!("got `{got}`"))
    }
}

const TOP_LDAQ: &[&str] = &[
    "[U] [V] [V]",
    "[V] [V] [U]",
    "OPT { [U] [U] [V] }",
    "[V] [U] [U] ; [V] [V]",
    "[V] [U] [U]",
    "[U] [U] [V]",
    "[V] [U] [U]",
    "[U] [V] [V]",
    "{ [U] [V] [V] } UN { [V] [V] [U] }",
    "[U] [V] [V] OPT { [U] [U] [V] }",
];

const TOP_NON_LDAQ: &[&str] = &[
    "[V] [U] [V]",
    "[V] [U] [V] . [V] [U] [V]",
    "[V] [U] [L]",
    "[V] [U] [L] OPT {[V] [U] [V]} OPT {[V] [U] [V]}",
    "[V] [V] [V]",
    "[V] [U] [L]",
    "[V] [U] [V]",
    "[V] [U] [L] ; [U] [V] . [V] [U] [V]",
    "OPT { [V] [U] [V] }",
    "[V] [U] [V] ; [U] [V]",
];

fn top_templates() -> Outcome {
    let mut right = 0;
    let mut wrong = Vec::new();
    for (list, expect) in [(TOP_LDAQ, true), (TOP_NON_LDAQ, false)] {
        for (i, t) in list.iter().enumerate() {
            let text = normalize_template(t);
            match instantiate_template(&text, i as u64) {
                Ok(p) if is_ldaq(&p).answerable == expect => right += 1,
                Ok(_) => wrong.push(format!("`{t}`")),
                Err(e) => wrong.push(format!("`{t}`: {e}")),
            }
        }
    }
    if wrong.is_empty() {
        Ok(format!("{right}/20 classified"))
    } else {
        Err(format!("{right}/20; wrong: {}", wrong.join(", ")))
    }
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let cases = 2000;
    let mut disagreements = Vec::new();
    let mut answerable = 0;
    for _ in 0..cases {
        let bgp = random_bgp(&mut rng, 6);
        let bound = if rng.gen_bool(0.3) { random_bound(&mut rng) } else { BoundVarSet::new() };
        let fast = is_lda_bgp(&bgp, false, &bound).answerable;
        let slow = oracle_is_lda_bgp(&bgp, &bound).unwrap();
        answerable += fast as usize;
        if fast != slow && disagreements.len() < 3 {
            disagreements.push(format!("{bgp:?} bound={bound:?}: fast={fast} oracle={slow}"));
        }
    }
    let mut unstable = 0;
    for _ in 0..100 {
        let bgp = random_bgp(&mut rng, 6);
        let first = is_lda_bgp(&bgp, false, &BoundVarSet::new()).answerable;
        for _ in 0..10 {
            let mut shuffled: Vec<TriplePattern> = bgp.clone();
            shuffled.shuffle(&mut rng);
            if is_lda_bgp(&shuffled, false, &BoundVarSet::new()).answerable != first {
                unstable += 1;
            }
        }
    }
    if disagreements.is_empty() && unstable == 0 {
        within(
            started,
            Duration::from_secs(30),
            format!("{cases}/{cases} agree ({answerable} answerable), 1000 permutations stable"),
        )
    } else {
        Err(format!(
            "{} disagreements, {unstable} unstable permutations; {}",
            disagreements.len(),
            disagreements.join(" | ")
        ))
    }
}

fn fixture_soundness() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut checked = 0;
    let mut nonempty = 0;
    let mut failures = Vec::new();
    while checked < 200 {
        let w = random_web(&mut rng);
        let violations = validate_fixture_r2(&w.web);
        if !violations.is_empty() {
            return Err(format!("generated web has a document missing a triple about its own IRI: {:?}", violations[0]));
        }
        for _ in 0..4 {
            let q = random_query(&mut rng, &w);
            if q.triples().is_empty() {
                continue;
            }
            if !is_ldaq(&q).answerable {
                return Err(format!("generator produced a non-answerable query: {}", q.canonical()));
            }
            let plan = transform_query(&q).map_err(|e| e.to_string())?;
            let (table, _) = execute(&plan, &w.web, &ExecConfig::fixtures()).map_err(|e| e.to_string())?;
            let got = table.canonical_rows();
            let want = endpoint_oracle(&w.web, &q);
            checked += 1;
            nonempty += !want.is_empty() as usize;
            if got != want && failures.len() < 3 {
                failures.push(format!("{}: got {} rows, oracle {}", q.canonical(), got.len(), want.len()));
            }
        }
    }
    if failures.is_empty() {
        within(started, Duration::from_secs(60), format!("{checked}/{checked} equal ({nonempty} non-empty)"))
    } else {
        Err(failures.join("; "))
    }
}

fn instance_web(class: &str, instances: &[String], latency_ms: u64) -> FixtureWeb {
    let ty = Term::iri(RDF_TYPE);
    let class_term = Term::iri(class);
    let mut web = FixtureWeb::new();
    let members: Vec<Triple> =
        instances.iter().map(|i| Triple::new(Term::iri(i.clone()), ty.clone(), class_term.clone())).collect();
    web.insert_graph(class, &Graph::new(members.clone()));
    for (i, m) in instances.iter().zip(members) {
        let value = Triple::new(Term::iri(i.clone()), Term::iri(format!("{VOCAB}value")), Term::literal(i.clone()));
        web.insert_graph(i.clone(), &Graph::new([m, value]));
        web.set_latency(ldtraverse::exec::host_of(i), latency_ms);
    }
    web.set_latency(ldtraverse::exec::host_of(class), latency_ms);
    web
}

fn instance_query(class: &str) -> ldtraverse::transform::TraversalQuery {
    let text = format!("SELECT * WHERE {{ ?x a <{class}> . ?x <{VOCAB}value> ?v }}");
    transform_query(&parse(&text).unwrap().pattern).unwrap()
}

fn concurrency_politeness() -> Outcome {
    let started = Instant::now();
    let class = "http://classes.example/Thing";
    let instances: Vec<String> = (0..100).map(|i| format!("http://h{i}.example/r")).collect();
    let web = instance_web(class, &instances, 50);
    let plan = instance_query(class);
    let mut times = Vec::new();
    let mut peak = 0;
    for max_parallel in [1, 10] {
        let rec = RecordingDereferencer::new(&web);
        let cfg = ExecConfig { max_parallel, ..ExecConfig::default() };
        let t0 = Instant::now();
        let (table, stats) = execute(&plan, &rec, &cfg).map_err(|e| e.to_string())?;
        times.push(t0.elapsed());
        if table.len() != 100 || stats.fetch_count != 101 {
            return Err(format!("maxParallel={max_parallel}: {} rows, {} fetches", table.len(), stats.fetch_count));
        }
        if rec.max_in_flight() > max_parallel {
            return Err(format!("maxParallel={max_parallel}: {} fetches in flight", rec.max_in_flight()));
        }
        peak = rec.max_in_flight();
    }
    let speedup = times[0].as_secs_f64() / times[1].as_secs_f64();

    // Ten hosts with ten resources each: requests to one host must be spaced.
    let delay = 100;
    let instances: Vec<String> = (0..100).map(|i| format!("http://s{}.example/r{i}", i % 10)).collect();
    let web = instance_web(class, &instances, 5);
    let rec = RecordingDereferencer::new(&web);
    let cfg = ExecConfig { max_parallel: 10, per_host_delay_ms: delay, ..ExecConfig::default() };
    execute(&instance_query(class), &rec, &cfg).map_err(|e| e.to_string())?;
    let gap = rec.min_host_gap().unwrap_or(Duration::MAX);
    let detail = format!(
        "speedup {speedup:.1}x ({} ms vs {} ms), peak in flight {peak} (second run {}), min host gap {} ms",
        times[0].as_millis(),
        times[1].as_millis(),
        rec.max_in_flight(),
        gap.as_millis()
    );
    if speedup >= 3.0 && rec.max_in_flight() <= 10 && gap >= Duration::from_millis(delay) {
        within(started, Duration::from_secs(30), detail)
    } else {
        Err(detail)
    }
}

/// Synthetic log with known composition. Returns the queries and the
/// expected (invalid, unconsidered, remaining, unique, ldaq, non-ldaq)
/// counts along with the expected per-template counts of unique queries.
fn synthetic_corpus(rng: &mut ChaCha8Rng) -> Corpus {
    let mut log = Vec::new();
    let mut considered = Vec::new();
    let mut ldaq_templates = BTreeMap::new();
    let mut non_templates = BTreeMap::new();
    for i in 0..600 {
        let (q, t) = match i % 4 {
            0 => (format!("SELECT * WHERE {{ <http://ex.org/r{i}> ?p ?o }}"), "[U] [V] [V]"),
            1 => (format!("SELECT ?s WHERE {{ ?s <http://ex.org/p> <http://ex.org/r{i}> }}"), "[V] [U] [U]"),
            2 => (
                format!("SELECT ?s ?n WHERE {{ ?s <http://ex.org/p> <http://ex.org/r{i}> ; <http://ex.org/name> ?n }}"),
                "[V] [U] [U] ; [U] [V]",
            ),
            _ => (
                format!(
                    "SELECT ?o WHERE {{ {{ <http://ex.org/r{i}> ?p ?o }} UNION {{ ?o ?p <http://ex.org/r{i}> }} }}"
                ),
                "{ [U] [V] [V] } UNION { [V] [V] [U] }",
            ),
        };
        *ldaq_templates.entry(t.to_string()).or_insert(0) += 1;
        considered.push(q);
    }
    for i in 0..100 {
        let (q, t) = if i % 2 == 0 {
            (format!("SELECT ?s WHERE {{ ?s <http://ex.org/p{i}> ?o }}"), "[V] [U] [V]")
        } else {
            (format!("SELECT ?s WHERE {{ ?s <http://ex.org/label> \"name {i}\" }}"), "[V] [U] [L]")
        };
        *non_templates.entry(t.to_string()).or_insert(0) += 1;
        considered.push(q);
    }
    log.extend(considered.iter().cloned());
    // Same graph patterns, written differently.
    for i in 0..150 {
        let q = &considered[rng.gen_range(0..considered.len())];
        let variant = match i % 3 {
            0 => q.replace("{ ", "{\n    ").replace(" }", "\n}"),
            1 => format!("{q} LIMIT {}", i + 1),
            _ => q
                .replacen("SELECT", "PREFIX ex: <http://ex.org/>\nSELECT DISTINCT", 1)
                .replace("<http://ex.org/p>", "ex:p"),
        };
        log.push(variant);
    }
    for i in 0..50 {
        log.push(match i % 3 {
            0 => format!("SELECT ?x WHERE {{ ?x <http://ex.org/p{i}> ?y"),
            1 => format!("SELECT ?x WHERE {{ ?x <http://ex.org/p{i}> }}"),
            _ => format!("SELEKT ?x WHERE {{ ?x <http://ex.org/p{i}> ?y }}"),
        });
    }
    for i in 0..100 {
        log.push(match i % 5 {
            0 => format!("DESCRIBE <http://ex.org/r{i}>"),
            1 => format!("CONSTRUCT {{ ?s ?p ?o }} WHERE {{ ?s ?p <http://ex.org/r{i}> }}"),
            2 => format!("SELECT ?x WHERE {{ ?x <http://ex.org/p> ?y . BIND(?y AS ?z{i}) }}"),
            3 => format!("SELECT ?x WHERE {{ ?x <http://ex.org/p>/<http://ex.org/q{i}> ?y }}"),
            _ => format!("SELECT ?x WHERE {{ VALUES ?x {{ <http://ex.org/r{i}> }} ?x ?p ?o }}"),
        });
    }
    log.shuffle(rng);
    (log, [50, 100, 850, 700, 600, 100], ldaq_templates, non_templates)
}

fn analyzer_partition() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let (log, expected, ldaq_templates, non_templates) = synthetic_corpus(&mut rng);
    let r = analyze(&log, 10);
    let got = [r.invalid, r.unconsidered, r.remaining, r.unique, r.ldaq.count, r.non_ldaq.count];
    let counts = |c: &ldtraverse::analyzer::ClassReport| -> BTreeMap<String, usize> {
        c.templates.iter().map(|t| (t.template.clone(), t.count)).collect()
    };
    let identities = r.total == 1000
        && r.total == r.invalid + r.unconsidered + r.remaining
        && r.unique == r.ldaq.count + r.non_ldaq.count
        && r.unique <= r.remaining;
    let detail = format!(
        "total {} invalid {} unconsidered {} remaining {} unique {} ldaq {} nonLdaq {}",
        r.total, got[0], got[1], got[2], got[3], got[4], got[5]
    );
    if got == expected && identities && counts(&r.ldaq) == ldaq_templates && counts(&r.non_ldaq) == non_templates {
        within(started, Duration::from_secs(30), detail)
    } else {
        Err(format!("{detail}; expected {expected:?}, identities hold: {identities}"))
    }
}

fn fetch_accounting() -> Outcome {
    let web = FixtureWeb::load(&fixtures().join("basketball")).map_err(|e| e.to_string())?;
    let q = load("players_birthdate.rq");
    let rec = RecordingDereferencer::new(&web);
    let (table, stats) =
        execute(&transform_query(&q.pattern).unwrap(), &rec, &ExecConfig::fixtures()).map_err(|e| e.to_string())?;
    let duplicates: usize = web.iris().map(|i| rec.calls_for(i).saturating_sub(1)).sum();
    let detail = format!(
        "{} rows, fetchCount {}, {} duplicate fetches, {} failed",
        table.len(),
        stats.fetch_count,
        duplicates,
        stats.failed_fetches.len()
    );
    if table.len() == 3 && stats.fetch_count == 4 && duplicates == 0 && rec.records().len() == 4 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("answerability verdicts on the example queries", check_verdicts),
        ("SERVICE-form rewriting matches the golden queries", transform_goldens),
        ("template of the union example query", union_template),
        ("top templates classified", top_templates),
        ("BGP answerability agrees with exhaustive oracle", oracle_equivalence),
        ("traversal results equal the endpoint oracle", fixture_soundness),
        ("parallel fetching and per-host politeness", concurrency_politeness),
        ("query log partition counts", analyzer_partition),
        ("fetch accounting on the basketball fixture", fetch_accounting),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(format!(
                "panicked: {}",
                p.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ))
        });
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
