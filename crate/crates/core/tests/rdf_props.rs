mod common;

use ldtraverse::rdf::{
    match_bgp, parse_rdf, serialize_ntriples, BindingTable, Graph, Literal, RdfSyntax, Term, Triple, XSD_INTEGER,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_term<R: Rng>(rng: &mut R, position: usize) -> Term {
    let iri = |rng: &mut R| Term::iri(format!("http://ex.org/n{}", rng.gen_range(0..4)));
    match (position, rng.gen_range(0..6)) {
        (1, _) => Term::iri(format!("http://ex.org/p{}", rng.gen_range(0..3))),
        (_, 0) => Term::blank(format!("b{}", rng.gen_range(0..2))),
        (2, 1) => Term::Literal(Literal::lang(format!("t\"{}\\\n", rng.gen_range(0..3)), "en")),
        (2, 2) => Term::Literal(Literal::typed(rng.gen_range(-5..5).to_string(), XSD_INTEGER)),
        (2, 3) => Term::literal(format!("caf\u{e9} {}", rng.gen_range(0..3))),
        _ => iri(rng),
    }
}

fn random_graph(seed: u64, blanks: bool) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..20);
    Graph::new((0..n).map(|_| {
        let mut t = [0, 1, 2].map(|i| random_term(&mut rng, i));
        if !blanks {
            for x in t.iter_mut().filter(|x| x.is_blank()) {
                *x = Term::iri("http://ex.org/nb");
            }
        }
        let [s, p, o] = t;
        Triple::new(s, p, o)
    }))
}

fn triples(g: &Graph) -> Vec<Triple> {
    g.iter().cloned().collect()
}

proptest! {
    #[test]
    fn ntriples_round_trip(seed in any::<u64>()) {
        let g = random_graph(seed, false);
        let back = parse_rdf(&serialize_ntriples(&g), RdfSyntax::NTriples, None).unwrap();
        prop_assert_eq!(triples(&back), triples(&g));
    }

    #[test]
    fn ntriples_round_trip_keeps_blank_structure(seed in any::<u64>()) {
        let g = random_graph(seed, true);
        let back = parse_rdf(&serialize_ntriples(&g), RdfSyntax::NTriples, None).unwrap();
        prop_assert_eq!(back.len(), g.len());
        // Same graph once blank labels are replaced by one placeholder.
        let flatten = |g: &Graph| {
            let mut v: Vec<String> = g.iter().map(|t| {
                [&t.subject, &t.predicate, &t.object]
                    .map(|x| if x.is_blank() { "_".to_string() } else { x.to_string() })
                    .join(" ")
            }).collect();
            v.sort();
            v
        };
        prop_assert_eq!(flatten(&back), flatten(&g));
    }

    #[test]
    fn turtle_reads_ntriples(seed in any::<u64>()) {
        let g = random_graph(seed, false);
        let back = parse_rdf(&serialize_ntriples(&g), RdfSyntax::Turtle, None).unwrap();
        prop_assert_eq!(triples(&back), triples(&g));
    }

    #[test]
    fn bgp_matching_ignores_pattern_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(seed ^ 0xabc, false);
        let mut bgp = common::random_bgp(&mut rng, 4);
        for t in &mut bgp {
            t.predicate = if rng.gen_bool(0.3) { Term::var("p") } else { Term::iri(format!("http://ex.org/p{}", rng.gen_range(0..3))) };
        }
        let want = match_bgp(&g, &bgp, &BindingTable::unit()).canonical_rows();
        bgp.shuffle(&mut rng);
        prop_assert_eq!(match_bgp(&g, &bgp, &BindingTable::unit()).canonical_rows(), want);
    }
}

#[test]
fn empty_pattern_returns_seed() {
    let g = random_graph(7, false);
    let mut seed = BindingTable::new(vec!["x".into()], Vec::new());
    seed.push([("x".to_string(), Term::iri("http://ex.org/n1"))].into());
    let out = match_bgp(&g, &[], &seed);
    assert_eq!(out.canonical_rows(), seed.canonical_rows());
}

#[test]
fn match_against_brute_force() {
    // Every assignment of graph terms to the pattern's variables, checked triple by triple.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..200 {
        let g = random_graph(round, false);
        let bgp: Vec<_> = common::random_bgp(&mut rng, 3)
            .into_iter()
            .filter(|t| !t.subject.is_blank() && !t.object.is_blank())
            .collect();
        let vars: Vec<String> = {
            let mut v: Vec<String> = bgp.iter().flat_map(|t| t.open_keys()).collect();
            v.sort();
            v.dedup();
            v
        };
        let mut domain: Vec<Term> =
            g.iter().flat_map(|t| [t.subject.clone(), t.predicate.clone(), t.object.clone()]).collect();
        domain.sort();
        domain.dedup();
        let mut want = Vec::new();
        let mut idx = vec![0usize; vars.len()];
        if domain.is_empty() && !vars.is_empty() {
            assert!(match_bgp(&g, &bgp, &BindingTable::unit()).is_empty());
            continue;
        }
        loop {
            let mu: std::collections::BTreeMap<String, Term> =
                vars.iter().cloned().zip(idx.iter().map(|i| domain[*i].clone())).collect();
            let sub = |t: &Term| t.binding_key().and_then(|k| mu.get(&k).cloned()).unwrap_or_else(|| t.clone());
            let holds = |t: &ldtraverse::sparql::TriplePattern| {
                let (s, p, o) = (sub(&t.subject), sub(&t.predicate), sub(&t.object));
                !s.is_literal() && p.is_iri() && g.contains(&Triple::new(s, p, o))
            };
            if bgp.iter().all(holds) {
                want.push(common::canonical_row(&mu));
            }
            let mut k = 0;
            while k < idx.len() && idx[k] + 1 == domain.len() {
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
            idx[k] += 1;
        }
        want.sort();
        assert_eq!(match_bgp(&g, &bgp, &BindingTable::unit()).canonical_rows(), want, "{bgp:?}");
    }
}
