//! Turtle and N-Triples reader.
//!
//! Supports directives (`@prefix`, `@base` and their SPARQL-style forms),
//! prefixed names, `;` and `,` lists, the `a` keyword, plain, typed and
//! language-tagged literals, numeric and boolean shorthand, blank node labels
//! and `[ ... ]` property lists. Collections and quoted triples are rejected.

use std::collections::HashMap;

use thiserror::Error;

use super::graph::{Graph, Triple};
use super::term::{is_absolute_iri, Literal, Term, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdfSyntax {
    NTriples,
    Turtle,
}

impl RdfSyntax {
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "nt" => Some(RdfSyntax::NTriples),
            "ttl" => Some(RdfSyntax::Turtle),
            _ => None,
        }
    }

    /// Maps a `Content-Type` value (parameters ignored) to a syntax.
    pub fn from_media_type(media_type: &str) -> Option<Self> {
        let essence = media_type.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
        match essence.as_str() {
            "application/n-triples" => Some(RdfSyntax::NTriples),
            "text/turtle" | "application/x-turtle" => Some(RdfSyntax::Turtle),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses an RDF document. Relative IRIs resolve against `base` (or an
/// `@base` directive); an IRI that stays relative is an error.
pub fn parse_rdf(text: &str, syntax: RdfSyntax, base: Option<&str>) -> Result<Graph, SyntaxError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        syntax,
        base: base.map(str::to_owned),
        prefixes: HashMap::new(),
        triples: Vec::new(),
        anon_counter: 0,
    };
    parser.document()?;
    Ok(Graph::new(parser.triples))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    syntax: RdfSyntax,
    base: Option<String>,
    prefixes: HashMap<String, String>,
    triples: Vec<Triple>,
    anon_counter: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(SyntaxError { line: self.line, column: self.column, message: message.into() })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        self.skip_ws();
        match self.peek() {
            Some(found) if found == c => {
                self.bump();
                Ok(())
            }
            Some(found) => self.err(format!("expected '{c}', found '{found}'")),
            None => self.err(format!("expected '{c}', found end of input")),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn starts_with_keyword(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        let word: String = self.chars[self.pos..].iter().take(n).collect();
        word.eq_ignore_ascii_case(kw) && self.peek_at(n).is_none_or(|c| c.is_whitespace() || c == '<' || c == '#')
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else { return Ok(()) };
            if self.syntax == RdfSyntax::Turtle {
                if c == '@' {
                    self.at_directive()?;
                    continue;
                }
                if self.starts_with_keyword("PREFIX") {
                    self.skip_chars(6);
                    self.prefix_body()?;
                    continue;
                }
                if self.starts_with_keyword("BASE") {
                    self.skip_chars(4);
                    self.base_body()?;
                    continue;
                }
            }
            self.triples_statement()?;
            self.expect('.')?;
        }
    }

    fn skip_chars(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn at_directive(&mut self) -> PResult<()> {
        self.bump();
        let word = self.read_while(|c| c.is_ascii_alphabetic());
        match word.as_str() {
            "prefix" => {
                self.prefix_body()?;
                self.expect('.')
            }
            "base" => {
                self.base_body()?;
                self.expect('.')
            }
            other => self.err(format!("unknown directive @{other}")),
        }
    }

    fn prefix_body(&mut self) -> PResult<()> {
        self.skip_ws();
        let prefix = self.read_while(is_pn_chars);
        if self.peek() != Some(':') {
            return self.err("expected ':' after prefix name");
        }
        self.bump();
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.prefixes.insert(prefix, iri);
        Ok(())
    }

    fn base_body(&mut self) -> PResult<()> {
        self.skip_ws();
        let iri = self.iri_ref()?;
        self.base = Some(iri);
        Ok(())
    }

    fn read_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn triples_statement(&mut self) -> PResult<()> {
        self.skip_ws();
        if self.peek() == Some('[') && self.syntax == RdfSyntax::Turtle {
            let subject = self.blank_property_list()?;
            self.skip_ws();
            if self.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = self.subject()?;
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> PResult<Term> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_label(),
            Some('(') => self.err("collections are not supported"),
            Some('[') if self.syntax == RdfSyntax::Turtle => self.blank_property_list(),
            Some(c) if self.syntax == RdfSyntax::Turtle && (is_pn_chars_base(c) || c == ':') => {
                Ok(Term::Iri(self.prefixed_name()?))
            }
            Some(c) => self.err(format!("unexpected '{c}' in subject position")),
            None => self.err("unexpected end of input"),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> PResult<()> {
        loop {
            let predicate = self.predicate()?;
            loop {
                let object = self.object()?;
                self.triples.push(Triple::new(subject.clone(), predicate.clone(), object));
                self.skip_ws();
                if self.peek() == Some(',') && self.syntax == RdfSyntax::Turtle {
                    self.bump();
                } else {
                    break;
                }
            }
            self.skip_ws();
            if self.peek() == Some(';') && self.syntax == RdfSyntax::Turtle {
                while self.peek() == Some(';') {
                    self.bump();
                    self.skip_ws();
                }
                if matches!(self.peek(), Some('.') | Some(']')) {
                    return Ok(());
                }
            } else {
                return Ok(());
            }
        }
    }

    fn predicate(&mut self) -> PResult<Term> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('a')
                if self.syntax == RdfSyntax::Turtle
                    && self.peek_at(1).is_none_or(|c| c.is_whitespace() || c == '<' || c == '"') =>
            {
                self.bump();
                Ok(Term::iri(RDF_TYPE))
            }
            Some(c) if self.syntax == RdfSyntax::Turtle && (is_pn_chars_base(c) || c == ':') => {
                Ok(Term::Iri(self.prefixed_name()?))
            }
            Some(c) => self.err(format!("unexpected '{c}' in predicate position")),
            None => self.err("unexpected end of input"),
        }
    }

    fn object(&mut self) -> PResult<Term> {
        self.skip_ws();
        let turtle = self.syntax == RdfSyntax::Turtle;
        match self.peek() {
            Some('<') => {
                if self.peek_at(1) == Some('<') {
                    return self.err("quoted triples are not supported");
                }
                Ok(Term::Iri(self.iri_ref()?))
            }
            Some('_') if self.peek_at(1) == Some(':') => self.blank_label(),
            Some('"') => self.literal(),
            Some('\'') if turtle => self.literal(),
            Some('(') => self.err("collections are not supported"),
            Some('[') if turtle => self.blank_property_list(),
            Some(c) if turtle && (c.is_ascii_digit() || matches!(c, '+' | '-' | '.')) => self.numeric(),
            Some(_) if turtle && (self.starts_with_bool("true") || self.starts_with_bool("false")) => {
                let word = self.read_while(|c| c.is_ascii_alphabetic());
                Ok(Term::Literal(Literal::typed(word, XSD_BOOLEAN)))
            }
            Some(c) if turtle && (is_pn_chars_base(c) || c == ':') => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => self.err(format!("unexpected '{c}' in object position")),
            None => self.err("unexpected end of input"),
        }
    }

    fn starts_with_bool(&self, word: &str) -> bool {
        let n = word.len();
        let s: String = self.chars[self.pos..].iter().take(n).collect();
        s == word && !self.peek_at(n).is_some_and(|c| is_pn_chars(c) || c == ':')
    }

    fn blank_property_list(&mut self) -> PResult<Term> {
        self.bump(); // '['
        self.anon_counter += 1;
        let node = Term::blank(format!("anon{}", self.anon_counter));
        self.skip_ws();
        if self.peek() == Some(']') {
            self.bump();
            return Ok(node);
        }
        self.predicate_object_list(&node)?;
        self.expect(']')?;
        Ok(node)
    }

    fn blank_label(&mut self) -> PResult<Term> {
        self.bump();
        self.bump();
        let mut label = self.read_while(|c| is_pn_chars(c) || c == '.');
        while label.ends_with('.') {
            label.pop();
            self.pos -= 1;
            self.column -= 1;
        }
        if label.is_empty() {
            return self.err("empty blank node label");
        }
        Ok(Term::BlankNode(label))
    }

    fn iri_ref(&mut self) -> PResult<String> {
        if self.peek() != Some('<') {
            return self.err("expected IRI");
        }
        self.bump();
        let mut raw = String::new();
        loop {
            match self.bump() {
                None => return self.err("unterminated IRI"),
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => raw.push(self.hex_escape(4)?),
                    Some('U') => raw.push(self.hex_escape(8)?),
                    _ => return self.err("invalid escape in IRI"),
                },
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return self.err(format!("invalid character '{}' in IRI", c.escape_debug()))
                }
                Some(c) => raw.push(c),
            }
        }
        self.resolve(&raw)
    }

    fn resolve(&self, raw: &str) -> PResult<String> {
        if is_absolute_iri(raw) {
            return Ok(raw.to_owned());
        }
        let Some(base) = &self.base else {
            return self.err(format!("relative IRI <{raw}> without a base"));
        };
        match url::Url::parse(base).and_then(|b| b.join(raw)) {
            Ok(u) => Ok(u.to_string()),
            Err(e) => self.err(format!("cannot resolve <{raw}> against <{base}>: {e}")),
        }
    }

    fn hex_escape(&mut self, n: usize) -> PResult<char> {
        let mut code = 0u32;
        for _ in 0..n {
            let Some(d) = self.bump().and_then(|c| c.to_digit(16)) else {
                return self.err("invalid hex escape");
            };
            code = code * 16 + d;
        }
        match char::from_u32(code) {
            Some(c) => Ok(c),
            None => self.err("escape is not a valid code point"),
        }
    }

    fn prefixed_name(&mut self) -> PResult<String> {
        let prefix = self.read_while(is_pn_chars);
        if self.peek() != Some(':') {
            return self.err(format!("expected ':' after '{prefix}'"));
        }
        self.bump();
        let mut local = String::new();
        loop {
            match self.peek() {
                Some('\\') => {
                    self.bump();
                    match self.bump() {
                        Some(c) if "_~.-!$&'()*+,;=/?#@%".contains(c) => local.push(c),
                        _ => return self.err("invalid local name escape"),
                    }
                }
                Some('%') => {
                    self.bump();
                    local.push('%');
                    for _ in 0..2 {
                        match self.bump() {
                            Some(c) if c.is_ascii_hexdigit() => local.push(c),
                            _ => return self.err("invalid percent escape"),
                        }
                    }
                }
                Some(c) if is_pn_chars(c) || c == ':' => {
                    local.push(c);
                    self.bump();
                }
                Some('.') if self.peek_at(1).is_some_and(|c| is_pn_chars(c) || c == ':' || c == '%') => {
                    local.push('.');
                    self.bump();
                }
                _ => break,
            }
        }
        match self.prefixes.get(&prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => self.err(format!("undeclared prefix '{prefix}:'")),
        }
    }

    fn literal(&mut self) -> PResult<Term> {
        let quote = self.bump().expect("caller checked a quote");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        }
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return self.err("unterminated string"),
                Some(c) if c == quote => {
                    if !long {
                        break;
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        self.bump();
                        self.bump();
                        // """a"""" ends with a quote inside the literal
                        while self.peek() == Some(quote) {
                            lexical.push(quote);
                            self.bump();
                        }
                        break;
                    }
                    lexical.push(c);
                }
                Some('\\') => lexical.push(self.string_escape()?),
                Some('\n') | Some('\r') if !long => return self.err("newline in short string"),
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let tag = self.read_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if tag.is_empty() {
                    return self.err("empty language tag");
                }
                Ok(Term::Literal(Literal::lang(lexical, tag)))
            }
            Some('^') if self.peek_at(1) == Some('^') => {
                self.bump();
                self.bump();
                let dt = if self.peek() == Some('<') {
                    self.iri_ref()?
                } else if self.syntax == RdfSyntax::Turtle {
                    self.prefixed_name()?
                } else {
                    return self.err("expected datatype IRI");
                };
                Ok(Term::Literal(Literal::typed(lexical, dt)))
            }
            _ => Ok(Term::Literal(Literal::plain(lexical))),
        }
    }

    fn string_escape(&mut self) -> PResult<char> {
        match self.bump() {
            Some('t') => Ok('\t'),
            Some('b') => Ok('\u{8}'),
            Some('n') => Ok('\n'),
            Some('r') => Ok('\r'),
            Some('f') => Ok('\u{c}'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some('\\') => Ok('\\'),
            Some('u') => self.hex_escape(4),
            Some('U') => self.hex_escape(8),
            _ => self.err("invalid string escape"),
        }
    }

    fn numeric(&mut self) -> PResult<Term> {
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.bump();
        }
        text.push_str(&self.read_while(|c| c.is_ascii_digit()));
        let mut datatype = XSD_INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            text.push('.');
            text.push_str(&self.read_while(|c| c.is_ascii_digit()));
            datatype = XSD_DECIMAL;
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            self.bump();
            text.push(e);
            if let Some(c @ ('+' | '-')) = self.peek() {
                text.push(c);
                self.bump();
            }
            let exp = self.read_while(|c| c.is_ascii_digit());
            if exp.is_empty() {
                return self.err("malformed exponent");
            }
            text.push_str(&exp);
            datatype = XSD_DOUBLE;
        }
        if !text.chars().any(|c| c.is_ascii_digit()) {
            return self.err("malformed number");
        }
        Ok(Term::Literal(Literal::typed(text, datatype)))
    }
}

fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

fn is_pn_chars(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{B7}'
}
