use std::collections::BTreeSet;
use std::fmt;

use crate::rdf::Term;

/// A triple pattern as written in a query.
///
/// `subject_group` is shared by consecutive patterns written with `;` or `,`
/// after one subject and is unique otherwise. `shares_predicate` marks a
/// pattern written after `,` (same subject and predicate as the previous one).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
    pub subject_group: usize,
    pub shares_predicate: bool,
}

impl TriplePattern {
    pub fn new(subject: Term, predicate: Term, object: Term, subject_group: usize) -> Self {
        TriplePattern { subject, predicate, object, subject_group, shares_predicate: false }
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    /// Binding keys of open terms (variables and blank nodes) in s, p, o order.
    pub fn open_keys(&self) -> impl Iterator<Item = String> + '_ {
        self.terms().into_iter().filter_map(Term::binding_key)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

/// FILTER expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Term(Term),
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    In {
        expr: Box<Expr>,
        list: Vec<Expr>,
        negated: bool,
    },
    /// Built-in call (lower-cased name) or an IRI function.
    Call {
        function: String,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Term(t) => {
                if let Some(k) = t.binding_key() {
                    out.insert(k);
                }
            }
            Expr::Or(a, b) | Expr::And(a, b) | Expr::Compare(_, a, b) | Expr::Arith(_, a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            Expr::Not(a) | Expr::Neg(a) => a.collect_variables(out),
            Expr::In { expr, list, .. } => {
                expr.collect_variables(out);
                list.iter().for_each(|e| e.collect_variables(out));
            }
            Expr::Call { args, .. } => args.iter().for_each(|e| e.collect_variables(out)),
        }
    }
}

/// Canonical, fully parenthesized rendering with single-space separation.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Term(t) => write!(f, "{t}"),
            Expr::Or(a, b) => write!(f, "( {a} || {b} )"),
            Expr::And(a, b) => write!(f, "( {a} && {b} )"),
            Expr::Not(a) => write!(f, "! {a}"),
            Expr::Neg(a) => write!(f, "- {a}"),
            Expr::Compare(op, a, b) => write!(f, "( {a} {} {b} )", op.symbol()),
            Expr::Arith(op, a, b) => write!(f, "( {a} {} {b} )", op.symbol()),
            Expr::In { expr, list, negated } => {
                write!(f, "( {expr} {}IN (", if *negated { "NOT " } else { "" })?;
                write_args(f, list)?;
                write!(f, ") )")
            }
            Expr::Call { function, args } => {
                if function.contains(':') {
                    write!(f, "<{function}> (")?;
                } else {
                    write!(f, "{function} (")?;
                }
                write_args(f, args)?;
                write!(f, ")")
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Expr]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, " ,")?;
        }
        write!(f, " {a}")?;
    }
    write!(f, " ")
}

/// `SERVICE <iri> { ... }` or `SERVICE ?var { ... }`, only produced when
/// parsing SERVICE-anchored (SPARQL-LD) queries.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceBlock {
    pub anchor: Term,
    pub body: GroupPattern,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Triple(TriplePattern),
    /// Two or more alternative branches.
    Union(Vec<GroupPattern>),
    Optional(GroupPattern),
    Filter(Expr),
    Service(ServiceBlock),
}

/// Elements of a `{ ... }` group in syntactic order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupPattern {
    pub elements: Vec<Element>,
}

impl GroupPattern {
    pub fn new(elements: Vec<Element>) -> Self {
        GroupPattern { elements }
    }

    pub fn from_triples(triples: impl IntoIterator<Item = TriplePattern>) -> Self {
        GroupPattern { elements: triples.into_iter().map(Element::Triple).collect() }
    }

    /// All triple patterns, depth first in syntactic order.
    pub fn triples(&self) -> Vec<&TriplePattern> {
        let mut out = Vec::new();
        self.walk_triples(&mut |t| out.push(t));
        out
    }

    fn walk_triples<'a>(&'a self, f: &mut impl FnMut(&'a TriplePattern)) {
        for e in &self.elements {
            match e {
                Element::Triple(t) => f(t),
                Element::Union(branches) => branches.iter().for_each(|b| b.walk_triples(f)),
                Element::Optional(body) => body.walk_triples(f),
                Element::Service(s) => s.body.walk_triples(f),
                Element::Filter(_) => {}
            }
        }
    }

    /// Only top-level triples (no UNION, OPTIONAL or SERVICE), filters allowed.
    pub fn is_flat(&self) -> bool {
        self.elements.iter().all(|e| matches!(e, Element::Triple(_) | Element::Filter(_)))
    }

    /// Binding keys of every open term, in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for t in self.triples() {
            for k in t.open_keys() {
                if !seen.contains(&k) {
                    seen.push(k);
                }
            }
        }
        seen
    }

    /// Canonical text: full IRIs, single-space separation, `;`/`,` grouping
    /// preserved, FILTERs included.
    pub fn canonical(&self) -> String {
        let mut tokens = Vec::new();
        self.write_canonical(&mut tokens);
        tokens.join(" ")
    }

    fn write_canonical(&self, out: &mut Vec<String>) {
        let mut prev: Option<&TriplePattern> = None;
        for e in &self.elements {
            match e {
                Element::Triple(t) => {
                    match prev {
                        Some(p) if p.subject_group == t.subject_group => {
                            if t.shares_predicate {
                                out.push(",".into());
                            } else {
                                out.push(";".into());
                                out.push(t.predicate.to_string());
                            }
                            out.push(t.object.to_string());
                        }
                        Some(_) => {
                            out.push(".".into());
                            out.extend(t.terms().iter().map(|x| x.to_string()));
                        }
                        None => out.extend(t.terms().iter().map(|x| x.to_string())),
                    }
                    prev = Some(t);
                    continue;
                }
                Element::Union(branches) => {
                    for (i, b) in branches.iter().enumerate() {
                        if i > 0 {
                            out.push("UNION".into());
                        }
                        out.push("{".into());
                        b.write_canonical(out);
                        out.push("}".into());
                    }
                }
                Element::Optional(body) => {
                    out.push("OPTIONAL".into());
                    out.push("{".into());
                    body.write_canonical(out);
                    out.push("}".into());
                }
                Element::Filter(expr) => {
                    out.push("FILTER".into());
                    out.push(format!("( {expr} )"));
                }
                Element::Service(s) => {
                    out.push("SERVICE".into());
                    out.push(s.anchor.to_string());
                    out.push("{".into());
                    s.body.write_canonical(out);
                    out.push("}".into());
                }
            }
            prev = None;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryForm {
    Select,
    Ask,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectionItem {
    Variable(String),
    /// Unevaluated expression (aggregates and the like), kept as written.
    Expression {
        text: String,
        alias: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    All,
    Items(Vec<ProjectionItem>),
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::All => f.write_str("*"),
            Projection::Items(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match item {
                        ProjectionItem::Variable(v) => write!(f, "?{v}")?,
                        ProjectionItem::Expression { text, .. } => f.write_str(text)?,
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedQuery {
    pub form: QueryForm,
    pub projection: Projection,
    pub distinct: bool,
    pub pattern: GroupPattern,
    /// Trailing solution modifiers (ORDER BY, LIMIT, ...), as written.
    pub modifiers: String,
}

impl ParsedQuery {
    /// The query header: `SELECT [DISTINCT] <projection>` or `ASK`.
    pub fn header(&self) -> String {
        match self.form {
            QueryForm::Ask => "ASK".to_owned(),
            QueryForm::Select => format!("SELECT {}{}", if self.distinct { "DISTINCT " } else { "" }, self.projection),
        }
    }

    /// Prefix-free SPARQL text equivalent to this query.
    pub fn to_sparql(&self) -> String {
        let body = self.pattern.canonical();
        let mut out = if body.is_empty() {
            format!("{} WHERE {{ }}", self.header())
        } else {
            format!("{} WHERE {{ {} }}", self.header(), body)
        };
        if !self.modifiers.is_empty() {
            out.push(' ');
            out.push_str(&self.modifiers);
        }
        out
    }
}
