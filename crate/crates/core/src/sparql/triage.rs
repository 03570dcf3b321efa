use super::lexer::{tokenize, Tok};
use super::{parse, repair, Feature, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriageStatus {
    Considered,
    Unconsidered,
    Invalid,
}

impl TriageStatus {
    pub fn name(self) -> &'static str {
        match self {
            TriageStatus::Considered => "considered",
            TriageStatus::Unconsidered => "unconsidered",
            TriageStatus::Invalid => "invalid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triage {
    pub status: TriageStatus,
    /// Excluded feature names for unconsidered queries, the parse error for
    /// invalid ones, empty otherwise.
    pub reasons: Vec<String>,
}

/// Sorts a raw query into considered / unconsidered / invalid. The text is
/// repaired first.
pub fn triage(text: &str) -> Triage {
    let text = repair(text);
    let tokens = match tokenize(&text) {
        Ok(t) => t,
        Err(e) => return invalid(e),
    };
    let features = scan_features(&tokens);
    if !features.is_empty() {
        if structurally_sound(&tokens) {
            return Triage {
                status: TriageStatus::Unconsidered,
                reasons: features.iter().map(|f| f.name().to_owned()).collect(),
            };
        }
        return Triage { status: TriageStatus::Invalid, reasons: vec!["unbalanced brackets".into()] };
    }
    match parse(&text) {
        Ok(_) => Triage { status: TriageStatus::Considered, reasons: Vec::new() },
        Err(ParseError::Unsupported { feature, .. }) => {
            Triage { status: TriageStatus::Unconsidered, reasons: vec![feature.name().to_owned()] }
        }
        Err(e) => invalid(e),
    }
}

fn invalid(e: ParseError) -> Triage {
    Triage { status: TriageStatus::Invalid, reasons: vec![e.to_string()] }
}

/// Keyword-level scan for excluded features. Property paths are left to the
/// parser, which knows where predicates sit.
fn scan_features(tokens: &[crate::sparql::lexer::Token]) -> Vec<Feature> {
    let mut found = Vec::new();
    let mut push = |f: Feature| {
        if !found.contains(&f) {
            found.push(f);
        }
    };
    let mut depth = 0usize;
    for (i, t) in tokens.iter().enumerate() {
        let Tok::Word(w) = &t.tok else {
            if t.tok.is_punct("{") {
                depth += 1;
            } else if t.tok.is_punct("}") {
                depth = depth.saturating_sub(1);
            }
            continue;
        };
        match w.to_ascii_uppercase().as_str() {
            "DESCRIBE" => push(Feature::Describe),
            "CONSTRUCT" => push(Feature::Construct),
            "FROM" => push(Feature::From),
            "GRAPH" => push(Feature::Graph),
            "SERVICE" => push(Feature::Service),
            "MINUS" => push(Feature::Minus),
            "BIND" => push(Feature::Bind),
            "VALUES" => push(Feature::Values),
            "EXISTS" => {
                if i > 0 && tokens[i - 1].tok.is_word("NOT") {
                    push(Feature::NotExists)
                } else {
                    push(Feature::Exists)
                }
            }
            "SELECT" if depth > 0 => push(Feature::SubSelect),
            _ => {}
        }
    }
    found
}

/// Brackets balance and a query form keyword is present.
fn structurally_sound(tokens: &[crate::sparql::lexer::Token]) -> bool {
    let mut stack = Vec::new();
    for t in tokens {
        match t.tok {
            Tok::Punct(p @ ("{" | "(" | "[")) => stack.push(p),
            Tok::Punct(p @ ("}" | ")" | "]")) => {
                let open = match p {
                    "}" => "{",
                    ")" => "(",
                    _ => "[",
                };
                if stack.pop() != Some(open) {
                    return false;
                }
            }
            _ => {}
        }
    }
    stack.is_empty()
        && tokens.iter().any(|t| ["SELECT", "ASK", "DESCRIBE", "CONSTRUCT"].iter().any(|k| t.tok.is_word(k)))
}
