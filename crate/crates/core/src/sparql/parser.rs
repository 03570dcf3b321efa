use std::collections::HashMap;

use crate::rdf::{is_absolute_iri, Literal, Term, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{Feature, ParseError};

/// Parses a SELECT or ASK query of the supported subset. Prefixed names are
/// expanded, so the returned AST holds absolute IRIs only.
pub fn parse(text: &str) -> Result<ParsedQuery, ParseError> {
    Parser::new(text, false)?.query()
}

/// Like [`parse`], but also accepts `SERVICE <iri> { ... }` and
/// `SERVICE ?var { ... }` blocks (SERVICE-anchored traversal queries).
pub fn parse_sparql_ld(text: &str) -> Result<ParsedQuery, ParseError> {
    Parser::new(text, true)?.query()
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    prefixes: HashMap<String, String>,
    base: Option<String>,
    next_group: usize,
    next_anon: usize,
    allow_service: bool,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(src: &'a str, allow_service: bool) -> PResult<Self> {
        Ok(Parser {
            src,
            tokens: tokenize(src)?,
            pos: 0,
            prefixes: HashMap::new(),
            base: None,
            next_group: 0,
            next_anon: 0,
            allow_service,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn position(&self) -> (usize, usize) {
        match self.tokens.get(self.pos).or_else(|| self.tokens.last()) {
            Some(t) => (t.line, t.column),
            None => (1, 1),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, column) = self.position();
        Err(ParseError::Syntax { line, column, message: message.into() })
    }

    fn unsupported<T>(&self, feature: Feature) -> PResult<T> {
        let (line, column) = self.position();
        Err(ParseError::Unsupported { feature, line, column })
    }

    fn at_word(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_word(kw))
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.at_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            match self.peek() {
                Some(t) => self.err(format!("expected '{p}', found {t:?}")),
                None => self.err(format!("expected '{p}', found end of input")),
            }
        }
    }

    fn query(mut self) -> PResult<ParsedQuery> {
        self.prologue()?;
        let query = match self.peek() {
            Some(t) if t.is_word("SELECT") => self.select()?,
            Some(t) if t.is_word("ASK") => {
                self.pos += 1;
                self.dataset_clause()?;
                if self.at_word("WHERE") {
                    self.pos += 1;
                }
                let pattern = self.group()?;
                ParsedQuery {
                    form: QueryForm::Ask,
                    projection: Projection::All,
                    distinct: false,
                    pattern,
                    modifiers: String::new(),
                }
            }
            Some(t) if t.is_word("DESCRIBE") => return self.unsupported(Feature::Describe),
            Some(t) if t.is_word("CONSTRUCT") => return self.unsupported(Feature::Construct),
            Some(t) => return self.err(format!("expected SELECT or ASK, found {t:?}")),
            None => return self.err("empty query"),
        };
        let modifiers = self.modifiers()?;
        let query = ParsedQuery { modifiers, ..query };
        if let Projection::Items(items) = &query.projection {
            let vars = query.pattern.variables();
            for item in items {
                if let ProjectionItem::Variable(v) = item {
                    if !vars.contains(v) {
                        log::warn!("projected variable ?{v} does not occur in the pattern");
                    }
                }
            }
        }
        Ok(query)
    }

    fn prologue(&mut self) -> PResult<()> {
        loop {
            if self.at_word("PREFIX") {
                self.pos += 1;
                let prefix = match self.next() {
                    Some(Tok::PName { prefix, local }) if local.is_empty() => prefix,
                    _ => return self.err("expected prefix name after PREFIX"),
                };
                let iri = match self.next() {
                    Some(Tok::Iri(raw)) => self.resolve(&raw)?,
                    _ => return self.err("expected IRI in PREFIX declaration"),
                };
                self.prefixes.insert(prefix, iri);
            } else if self.at_word("BASE") {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Iri(raw)) => self.base = Some(self.resolve(&raw)?),
                    _ => return self.err("expected IRI after BASE"),
                }
            } else {
                return Ok(());
            }
        }
    }

    fn dataset_clause(&mut self) -> PResult<()> {
        if self.at_word("FROM") {
            return self.unsupported(Feature::From);
        }
        Ok(())
    }

    fn select(&mut self) -> PResult<ParsedQuery> {
        self.pos += 1;
        let mut distinct = false;
        if self.at_word("DISTINCT") {
            distinct = true;
            self.pos += 1;
        } else if self.at_word("REDUCED") {
            self.pos += 1;
        }
        let projection = if self.at_punct("*") {
            self.pos += 1;
            Projection::All
        } else {
            let mut items = Vec::new();
            loop {
                match self.peek() {
                    Some(Tok::Var(v)) => {
                        items.push(ProjectionItem::Variable(v.clone()));
                        self.pos += 1;
                    }
                    Some(Tok::Punct("(")) => items.push(self.projection_expression()?),
                    Some(Tok::Word(w))
                        if !w.eq_ignore_ascii_case("WHERE")
                            && !w.eq_ignore_ascii_case("FROM")
                            && self.peek_at(1).is_some_and(|t| t.is_punct("(")) =>
                    {
                        items.push(self.projection_expression()?)
                    }
                    _ => break,
                }
            }
            if items.is_empty() {
                return self.err("empty projection");
            }
            Projection::Items(items)
        };
        self.dataset_clause()?;
        if self.at_word("WHERE") {
            self.pos += 1;
        }
        let pattern = self.group()?;
        Ok(ParsedQuery { form: QueryForm::Select, projection, distinct, pattern, modifiers: String::new() })
    }

    /// An unevaluated projection expression such as `COUNT(*)` or
    /// `(COUNT(?x) AS ?n)`, captured as source text.
    fn projection_expression(&mut self) -> PResult<ProjectionItem> {
        let start = self.pos;
        if matches!(self.peek(), Some(Tok::Word(_))) {
            self.pos += 1;
        }
        let mut depth = 0usize;
        loop {
            match self.next() {
                Some(Tok::Punct("(")) => depth += 1,
                Some(Tok::Punct(")")) => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Some(Tok::Punct("{")) | Some(Tok::Punct("}")) | None => {
                    return self.err("unbalanced projection expression")
                }
                Some(_) => {}
            }
        }
        let toks = &self.tokens[start..self.pos];
        let text = self.src[toks[0].start..toks[toks.len() - 1].end].to_owned();
        let n = toks.len();
        let alias = match (n >= 3).then(|| (&toks[n - 3].tok, &toks[n - 2].tok)) {
            Some((as_kw, Tok::Var(v))) if as_kw.is_word("AS") => Some(v.clone()),
            _ => None,
        };
        Ok(ProjectionItem::Expression { text, alias })
    }

    fn modifiers(&mut self) -> PResult<String> {
        let Some(first) = self.tokens.get(self.pos) else { return Ok(String::new()) };
        let start = first.start;
        while let Some(tok) = self.peek().cloned() {
            match tok {
                Tok::Word(w) => match w.to_ascii_uppercase().as_str() {
                    "VALUES" => return self.unsupported(Feature::Values),
                    "LIMIT" | "OFFSET" => {
                        self.pos += 1;
                        match self.next() {
                            Some(Tok::Integer(_)) => {}
                            _ => return self.err(format!("expected integer after {w}")),
                        }
                    }
                    "ORDER" | "GROUP" => {
                        self.pos += 1;
                        if !self.at_word("BY") {
                            return self.err(format!("expected BY after {w}"));
                        }
                        self.pos += 1;
                        self.condition_list()?;
                    }
                    "HAVING" => {
                        self.pos += 1;
                        self.condition_list()?;
                    }
                    _ => return self.err(format!("unexpected '{w}' after the query pattern")),
                },
                other => return self.err(format!("unexpected {other:?} after the query pattern")),
            }
        }
        Ok(self.src[start..].trim().to_owned())
    }

    /// Skims the conditions of ORDER BY / GROUP BY / HAVING without
    /// interpreting them.
    fn condition_list(&mut self) -> PResult<()> {
        let mut seen = false;
        loop {
            match self.peek() {
                Some(Tok::Var(_)) => self.pos += 1,
                Some(Tok::Word(w))
                    if matches!(
                        w.to_ascii_uppercase().as_str(),
                        "LIMIT" | "OFFSET" | "ORDER" | "GROUP" | "HAVING" | "VALUES"
                    ) =>
                {
                    break
                }
                Some(Tok::Word(_)) | Some(Tok::Iri(_)) | Some(Tok::PName { .. })
                    if self.peek_at(1).is_some_and(|t| t.is_punct("(")) =>
                {
                    self.pos += 1;
                    self.skip_balanced()?;
                }
                Some(Tok::Punct("(")) => self.skip_balanced()?,
                _ => break,
            }
            seen = true;
        }
        if !seen {
            return self.err("expected a condition");
        }
        Ok(())
    }

    fn skip_balanced(&mut self) -> PResult<()> {
        self.expect_punct("(")?;
        let mut depth = 1;
        while depth > 0 {
            match self.next() {
                Some(Tok::Punct("(")) => depth += 1,
                Some(Tok::Punct(")")) => depth -= 1,
                Some(Tok::Word(w)) if w.eq_ignore_ascii_case("EXISTS") => return self.unsupported(Feature::Exists),
                Some(_) => {}
                None => return self.err("unbalanced parentheses"),
            }
        }
        Ok(())
    }

    fn group(&mut self) -> PResult<GroupPattern> {
        self.expect_punct("{")?;
        let mut elements = Vec::new();
        loop {
            match self.peek() {
                None => return self.err("unclosed group"),
                Some(Tok::Punct("}")) => {
                    self.pos += 1;
                    return Ok(GroupPattern::new(elements));
                }
                Some(Tok::Punct(".")) => self.pos += 1,
                Some(Tok::Punct("{")) => {
                    let mut branches = vec![self.group()?];
                    while self.at_word("UNION") {
                        self.pos += 1;
                        branches.push(self.group()?);
                    }
                    if branches.len() >= 2 {
                        elements.push(Element::Union(branches));
                    } else {
                        // a plain nested group joins with its parent
                        elements.extend(branches.pop().unwrap().elements);
                    }
                }
                Some(Tok::Word(w)) => {
                    let w = w.to_ascii_uppercase();
                    match w.as_str() {
                        "OPTIONAL" => {
                            self.pos += 1;
                            elements.push(Element::Optional(self.group()?));
                        }
                        "FILTER" => {
                            self.pos += 1;
                            elements.push(Element::Filter(self.constraint()?));
                        }
                        "SERVICE" if self.allow_service => {
                            self.pos += 1;
                            elements.push(Element::Service(self.service()?));
                        }
                        "SERVICE" => return self.unsupported(Feature::Service),
                        "MINUS" => return self.unsupported(Feature::Minus),
                        "BIND" => return self.unsupported(Feature::Bind),
                        "VALUES" => return self.unsupported(Feature::Values),
                        "GRAPH" => return self.unsupported(Feature::Graph),
                        "SELECT" => return self.unsupported(Feature::SubSelect),
                        "UNION" => return self.err("UNION without a preceding group"),
                        "A" => return self.err("'a' in subject position"),
                        _ => self.triples_block(&mut elements)?,
                    }
                }
                Some(_) => self.triples_block(&mut elements)?,
            }
        }
    }

    fn service(&mut self) -> PResult<ServiceBlock> {
        if self.at_word("SILENT") {
            self.pos += 1;
        }
        let anchor = match self.next() {
            Some(Tok::Var(v)) => Term::Variable(v),
            Some(Tok::Iri(raw)) => Term::Iri(self.resolve(&raw)?),
            Some(Tok::PName { prefix, local }) => Term::Iri(self.expand(&prefix, &local)?),
            _ => return self.err("expected IRI or variable after SERVICE"),
        };
        let body = self.group()?;
        Ok(ServiceBlock { anchor, body })
    }

    fn triples_block(&mut self, elements: &mut Vec<Element>) -> PResult<()> {
        let mut nested = Vec::new();
        let group = self.new_group();
        let subject = if self.at_punct("[") {
            let node = self.blank_property_list(&mut nested)?;
            if self.at_punct(".") || self.at_punct("}") {
                elements.extend(nested.into_iter().map(Element::Triple));
                return Ok(());
            }
            node
        } else {
            self.subject_term()?
        };
        let mut block = Vec::new();
        self.property_list(&subject, group, &mut block, &mut nested)?;
        elements.extend(block.into_iter().chain(nested).map(Element::Triple));
        if self.at_punct(".") {
            self.pos += 1;
        }
        Ok(())
    }

    fn new_group(&mut self) -> usize {
        self.next_group += 1;
        self.next_group - 1
    }

    fn blank_property_list(&mut self, out: &mut Vec<TriplePattern>) -> PResult<Term> {
        self.expect_punct("[")?;
        self.next_anon += 1;
        let node = Term::blank(format!("anon{}", self.next_anon));
        if self.at_punct("]") {
            self.pos += 1;
            return Ok(node);
        }
        let group = self.new_group();
        let mut block = Vec::new();
        let mut nested = Vec::new();
        self.property_list(&node, group, &mut block, &mut nested)?;
        self.expect_punct("]")?;
        out.extend(block);
        out.extend(nested);
        Ok(node)
    }

    fn property_list(
        &mut self,
        subject: &Term,
        group: usize,
        block: &mut Vec<TriplePattern>,
        nested: &mut Vec<TriplePattern>,
    ) -> PResult<()> {
        loop {
            let predicate = self.verb()?;
            let mut first = true;
            loop {
                let object = self.object_term(nested)?;
                block.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                    subject_group: group,
                    shares_predicate: !first,
                });
                first = false;
                if self.at_punct(",") {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if !self.at_punct(";") {
                return Ok(());
            }
            while self.at_punct(";") {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(Tok::Punct(".")) | Some(Tok::Punct("}")) | Some(Tok::Punct("]")) | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<Term> {
        let term = match self.peek() {
            Some(Tok::Punct("^")) | Some(Tok::Punct("!")) | Some(Tok::Punct("(")) => {
                return self.unsupported(Feature::PropertyPath)
            }
            Some(t) if t.is_word("a") => {
                self.pos += 1;
                Term::iri(RDF_TYPE)
            }
            Some(Tok::Var(v)) => {
                let v = v.clone();
                self.pos += 1;
                Term::Variable(v)
            }
            Some(Tok::Iri(_)) | Some(Tok::PName { .. }) => self.iri_term()?,
            Some(t) => return self.err(format!("expected a predicate, found {t:?}")),
            None => return self.err("expected a predicate, found end of input"),
        };
        let verb_end = self.tokens[self.pos - 1].end;
        if let Some(next) = self.tokens.get(self.pos) {
            let path = match &next.tok {
                Tok::Punct("/") | Tok::Punct("|") => true,
                Tok::Punct("*") | Tok::Punct("+") | Tok::Punct("?") => next.start == verb_end,
                _ => false,
            };
            if path {
                return self.unsupported(Feature::PropertyPath);
            }
        }
        Ok(term)
    }

    fn subject_term(&mut self) -> PResult<Term> {
        match self.peek() {
            Some(Tok::Var(v)) => {
                let t = Term::Variable(v.clone());
                self.pos += 1;
                Ok(t)
            }
            Some(Tok::BlankLabel(l)) => {
                let t = Term::BlankNode(l.clone());
                self.pos += 1;
                Ok(t)
            }
            Some(Tok::Iri(_)) | Some(Tok::PName { .. }) => self.iri_term(),
            Some(Tok::Punct("(")) => self.err("collections are not supported"),
            Some(Tok::Str(_)) | Some(Tok::Integer(_)) | Some(Tok::Decimal(_)) | Some(Tok::Double(_)) => {
                self.err("literal in subject position")
            }
            Some(t) => self.err(format!("unexpected {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }

    fn object_term(&mut self, nested: &mut Vec<TriplePattern>) -> PResult<Term> {
        match self.peek() {
            Some(Tok::Var(v)) => {
                let t = Term::Variable(v.clone());
                self.pos += 1;
                Ok(t)
            }
            Some(Tok::BlankLabel(l)) => {
                let t = Term::BlankNode(l.clone());
                self.pos += 1;
                Ok(t)
            }
            Some(Tok::Punct("[")) => self.blank_property_list(nested),
            Some(Tok::Punct("(")) => self.err("collections are not supported"),
            Some(Tok::Iri(_)) | Some(Tok::PName { .. }) => self.iri_term(),
            Some(_) => match self.literal()? {
                Some(lit) => Ok(lit),
                None => self.err(format!("expected an object, found {:?}", self.peek())),
            },
            None => self.err("unexpected end of input"),
        }
    }

    /// Literal at the cursor, or `None` (nothing consumed) if there is none.
    fn literal(&mut self) -> PResult<Option<Term>> {
        let lit = match self.peek().cloned() {
            Some(Tok::Str(s)) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::LangTag(tag)) => {
                        self.pos += 1;
                        Literal::lang(s, tag)
                    }
                    Some(Tok::Punct("^^")) => {
                        self.pos += 1;
                        match self.iri_term()? {
                            Term::Iri(dt) => Literal::typed(s, dt),
                            _ => unreachable!(),
                        }
                    }
                    _ => Literal::plain(s),
                }
            }
            Some(Tok::Integer(n)) => {
                self.pos += 1;
                Literal::typed(n, XSD_INTEGER)
            }
            Some(Tok::Decimal(n)) => {
                self.pos += 1;
                Literal::typed(n, XSD_DECIMAL)
            }
            Some(Tok::Double(n)) => {
                self.pos += 1;
                Literal::typed(n, XSD_DOUBLE)
            }
            Some(Tok::Punct(sign @ ("+" | "-"))) => {
                let (n, dt) = match self.peek_at(1) {
                    Some(Tok::Integer(n)) => (n.clone(), XSD_INTEGER),
                    Some(Tok::Decimal(n)) => (n.clone(), XSD_DECIMAL),
                    Some(Tok::Double(n)) => (n.clone(), XSD_DOUBLE),
                    _ => return Ok(None),
                };
                self.pos += 2;
                Literal::typed(format!("{sign}{n}"), dt)
            }
            Some(Tok::Word(w)) if w == "true" || w == "false" => {
                self.pos += 1;
                Literal::typed(w, XSD_BOOLEAN)
            }
            _ => return Ok(None),
        };
        Ok(Some(Term::Literal(lit)))
    }

    fn iri_term(&mut self) -> PResult<Term> {
        match self.next() {
            Some(Tok::Iri(raw)) => Ok(Term::Iri(self.resolve(&raw)?)),
            Some(Tok::PName { prefix, local }) => Ok(Term::Iri(self.expand(&prefix, &local)?)),
            _ => {
                self.pos -= 1;
                self.err("expected an IRI")
            }
        }
    }

    fn expand(&self, prefix: &str, local: &str) -> PResult<String> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => self.err(format!("undeclared prefix '{prefix}:'")),
        }
    }

    fn resolve(&self, raw: &str) -> PResult<String> {
        if is_absolute_iri(raw) {
            return Ok(raw.to_owned());
        }
        let Some(base) = &self.base else {
            return self.err(format!("relative IRI <{raw}> without BASE"));
        };
        match url::Url::parse(base).and_then(|b| b.join(raw)) {
            Ok(u) => Ok(u.to_string()),
            Err(e) => self.err(format!("cannot resolve <{raw}>: {e}")),
        }
    }

    fn constraint(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(Tok::Punct("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Some(t) if t.is_word("NOT") || t.is_word("EXISTS") => self.primary(),
            Some(Tok::Word(_)) | Some(Tok::Iri(_)) | Some(Tok::PName { .. })
                if self.peek_at(1).is_some_and(|t| t.is_punct("(")) =>
            {
                self.primary()
            }
            _ => self.err("expected a FILTER constraint"),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.at_punct("||") {
            self.pos += 1;
            lhs = Expr::Or(Box::new(lhs), Box::new(self.and_expr()?));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.relational()?;
        while self.at_punct("&&") {
            self.pos += 1;
            lhs = Expr::And(Box::new(lhs), Box::new(self.relational()?));
        }
        Ok(lhs)
    }

    fn relational(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Some(Tok::Punct("=")) => CompareOp::Eq,
            Some(Tok::Punct("!=")) => CompareOp::Ne,
            Some(Tok::Punct("<")) => CompareOp::Lt,
            Some(Tok::Punct(">")) => CompareOp::Gt,
            Some(Tok::Punct("<=")) => CompareOp::Le,
            Some(Tok::Punct(">=")) => CompareOp::Ge,
            Some(t) if t.is_word("IN") => {
                self.pos += 1;
                let list = self.arg_list()?;
                return Ok(Expr::In { expr: Box::new(lhs), list, negated: false });
            }
            Some(t) if t.is_word("NOT") && self.peek_at(1).is_some_and(|t| t.is_word("IN")) => {
                self.pos += 2;
                let list = self.arg_list()?;
                return Ok(Expr::In { expr: Box::new(lhs), list, negated: true });
            }
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.additive()?;
        Ok(Expr::Compare(op, Box::new(lhs), Box::new(rhs)))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Punct("+")) => ArithOp::Add,
                Some(Tok::Punct("-")) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(self.multiplicative()?));
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Punct("*")) => ArithOp::Mul,
                Some(Tok::Punct("/")) => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek() {
            Some(Tok::Punct("!")) => {
                self.pos += 1;
                Ok(Expr::Not(Box::new(self.unary()?)))
            }
            Some(Tok::Punct("-")) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Punct("+")) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().cloned() {
            Some(Tok::Punct("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Expr::Term(Term::Variable(v)))
            }
            Some(Tok::Iri(_)) | Some(Tok::PName { .. }) => {
                let iri = self.iri_term()?;
                if self.at_punct("(") {
                    let Term::Iri(function) = iri else { unreachable!() };
                    let args = self.arg_list()?;
                    Ok(Expr::Call { function, args })
                } else {
                    Ok(Expr::Term(iri))
                }
            }
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("EXISTS") => self.unsupported(Feature::Exists),
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("NOT") => {
                if self.peek_at(1).is_some_and(|t| t.is_word("EXISTS")) {
                    self.unsupported(Feature::NotExists)
                } else {
                    self.err("unexpected NOT")
                }
            }
            Some(Tok::Word(w)) if w == "true" || w == "false" => {
                self.pos += 1;
                Ok(Expr::Term(Term::Literal(Literal::typed(w, XSD_BOOLEAN))))
            }
            Some(Tok::Word(w)) if self.peek_at(1).is_some_and(|t| t.is_punct("(")) => {
                self.pos += 1;
                let args = self.arg_list()?;
                Ok(Expr::Call { function: w.to_ascii_lowercase(), args })
            }
            Some(_) => match self.literal()? {
                Some(lit) => Ok(Expr::Term(lit)),
                None => self.err(format!("unexpected {:?} in expression", self.peek())),
            },
            None => self.err("unexpected end of input in expression"),
        }
    }

    fn arg_list(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.at_punct(")") {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.at_punct(",") {
                self.pos += 1;
            } else {
                self.expect_punct(")")?;
                return Ok(args);
            }
        }
    }
}
