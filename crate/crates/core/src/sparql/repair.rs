use super::lexer::{tokenize, Tok};

/// Prefixes injected by [`repair`] when a query uses them without a
/// declaration.
pub const BUILTIN_PREFIXES: &[(&str, &str)] = &[
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("owl", "http://www.w3.org/2002/07/owl#"),
    ("xsd", "http://www.w3.org/2001/XMLSchema#"),
    ("foaf", "http://xmlns.com/foaf/0.1/"),
    ("dc", "http://purl.org/dc/elements/1.1/"),
    ("dcterms", "http://purl.org/dc/terms/"),
    ("skos", "http://www.w3.org/2004/02/skos/core#"),
    ("dbo", "http://dbpedia.org/ontology/"),
    ("dbr", "http://dbpedia.org/resource/"),
    ("dbp", "http://dbpedia.org/property/"),
    ("geo", "http://www.w3.org/2003/01/geo/wgs84_pos#"),
];

pub fn builtin_prefix(prefix: &str) -> Option<&'static str> {
    BUILTIN_PREFIXES.iter().find(|(p, _)| *p == prefix).map(|(_, iri)| *iri)
}

/// Prepends `PREFIX` lines for well-known prefixes that are used but never
/// declared. Text that does not tokenize, or needs nothing, comes back
/// unchanged.
pub fn repair(text: &str) -> String {
    let Ok(tokens) = tokenize(text) else { return text.to_owned() };
    let mut declared = Vec::new();
    let mut missing: Vec<&str> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        let Tok::PName { prefix, .. } = &t.tok else { continue };
        if i > 0 && tokens[i - 1].tok.is_word("PREFIX") {
            declared.push(prefix.as_str());
        } else if !declared.contains(&prefix.as_str()) && !missing.contains(&prefix.as_str()) {
            missing.push(prefix);
        }
    }
    let mut header = String::new();
    for p in missing {
        if declared.contains(&p) {
            continue;
        }
        if let Some(iri) = builtin_prefix(p) {
            header.push_str(&format!("PREFIX {p}: <{iri}>\n"));
        }
    }
    header + text
}
