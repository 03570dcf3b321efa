use std::cmp::Ordering;

use thiserror::Error;

use crate::rdf::{Literal, Solution, Term, XSD_BOOLEAN, XSD_DOUBLE, XSD_INTEGER, XSD_STRING};
use crate::sparql::{ArithOp, CompareOp, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable ?{0}")]
    Unbound(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("unknown function {0}")]
    UnknownFunction(String),
}

type EResult<T> = Result<T, EvalError>;

fn type_err<T>(msg: impl Into<String>) -> EResult<T> {
    Err(EvalError::Type(msg.into()))
}

/// Effective boolean value of a FILTER expression on one row. Callers
/// treat an error like `false`.
pub fn eval_filter(expr: &Expr, row: &Solution) -> EResult<bool> {
    ebv(&eval(expr, row)?)
}

fn boolean(b: bool) -> Term {
    Term::Literal(Literal::typed(b.to_string(), XSD_BOOLEAN))
}

fn number(n: f64, integral: bool) -> Term {
    if integral && n.fract() == 0.0 && n.abs() < 1e15 {
        Term::Literal(Literal::typed(format!("{}", n as i64), XSD_INTEGER))
    } else {
        Term::Literal(Literal::typed(n.to_string(), XSD_DOUBLE))
    }
}

fn numeric(t: &Term) -> Option<f64> {
    match t {
        Term::Literal(l) => l.as_f64(),
        _ => None,
    }
}

fn is_string(l: &Literal) -> bool {
    l.datatype().is_none_or(|d| d == XSD_STRING)
}

fn ebv(t: &Term) -> EResult<bool> {
    match t {
        Term::Literal(l) => {
            if l.datatype() == Some(XSD_BOOLEAN) {
                return Ok(l.lexical() == "true" || l.lexical() == "1");
            }
            if let Some(n) = l.as_f64() {
                return Ok(n != 0.0 && !n.is_nan());
            }
            if is_string(l) {
                return Ok(!l.lexical().is_empty());
            }
            type_err(format!("no boolean value for {t}"))
        }
        _ => type_err(format!("no boolean value for {t}")),
    }
}

fn eval(expr: &Expr, row: &Solution) -> EResult<Term> {
    match expr {
        Expr::Term(t) => match t.binding_key() {
            Some(k) => row.get(&k).cloned().ok_or(EvalError::Unbound(k)),
            None => Ok(t.clone()),
        },
        Expr::Or(a, b) => {
            let l = eval(a, row).and_then(|t| ebv(&t));
            let r = eval(b, row).and_then(|t| ebv(&t));
            match (l, r) {
                (Ok(true), _) | (_, Ok(true)) => Ok(boolean(true)),
                (Ok(false), Ok(false)) => Ok(boolean(false)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
        Expr::And(a, b) => {
            let l = eval(a, row).and_then(|t| ebv(&t));
            let r = eval(b, row).and_then(|t| ebv(&t));
            match (l, r) {
                (Ok(false), _) | (_, Ok(false)) => Ok(boolean(false)),
                (Ok(true), Ok(true)) => Ok(boolean(true)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        }
        Expr::Not(a) => Ok(boolean(!ebv(&eval(a, row)?)?)),
        Expr::Neg(a) => {
            let t = eval(a, row)?;
            match numeric(&t) {
                Some(n) => Ok(number(-n, is_integral(&t))),
                None => type_err(format!("cannot negate {t}")),
            }
        }
        Expr::Compare(op, a, b) => {
            let (l, r) = (eval(a, row)?, eval(b, row)?);
            let ord = compare(&l, &r, matches!(op, CompareOp::Eq | CompareOp::Ne))?;
            Ok(boolean(match op {
                CompareOp::Eq => ord == Ordering::Equal,
                CompareOp::Ne => ord != Ordering::Equal,
                CompareOp::Lt => ord == Ordering::Less,
                CompareOp::Gt => ord == Ordering::Greater,
                CompareOp::Le => ord != Ordering::Greater,
                CompareOp::Ge => ord != Ordering::Less,
            }))
        }
        Expr::Arith(op, a, b) => {
            let (l, r) = (eval(a, row)?, eval(b, row)?);
            let (Some(x), Some(y)) = (numeric(&l), numeric(&r)) else {
                return type_err(format!("arithmetic on {l} and {r}"));
            };
            let integral = is_integral(&l) && is_integral(&r);
            Ok(match op {
                ArithOp::Add => number(x + y, integral),
                ArithOp::Sub => number(x - y, integral),
                ArithOp::Mul => number(x * y, integral),
                ArithOp::Div => {
                    if y == 0.0 {
                        return type_err("division by zero");
                    }
                    number(x / y, false)
                }
            })
        }
        Expr::In { expr, list, negated } => {
            let v = eval(expr, row)?;
            let mut found = false;
            let mut err = None;
            for e in list {
                match eval(e, row).and_then(|t| compare(&v, &t, true)) {
                    Ok(Ordering::Equal) => {
                        found = true;
                        break;
                    }
                    Ok(_) => {}
                    Err(e) => err = Some(e),
                }
            }
            match (found, err) {
                (false, Some(e)) => Err(e),
                _ => Ok(boolean(found != *negated)),
            }
        }
        Expr::Call { function, args } => call(function, args, row),
    }
}

fn is_integral(t: &Term) -> bool {
    matches!(t, Term::Literal(l) if l.datatype() == Some(XSD_INTEGER))
}

/// Ordering used by the comparison operators. Equality tests fall back to
/// term identity; ordering needs comparable values.
fn compare(l: &Term, r: &Term, equality: bool) -> EResult<Ordering> {
    if let (Some(x), Some(y)) = (numeric(l), numeric(r)) {
        return x.partial_cmp(&y).ok_or_else(|| EvalError::Type("NaN".into()));
    }
    match (l, r) {
        (Term::Literal(a), Term::Literal(b)) if a.datatype() == b.datatype() && a.language() == b.language() => {
            Ok(a.lexical().cmp(b.lexical()))
        }
        _ if equality => Ok(if l == r { Ordering::Equal } else { Ordering::Less }),
        _ => type_err(format!("cannot order {l} and {r}")),
    }
}

fn string_arg(t: &Term) -> EResult<&Literal> {
    match t {
        Term::Literal(l) if l.datatype().is_none() || is_string(l) => Ok(l),
        _ => type_err(format!("{t} is not a string")),
    }
}

fn plain(s: impl Into<String>) -> Term {
    Term::Literal(Literal::plain(s))
}

fn call(function: &str, args: &[Expr], row: &Solution) -> EResult<Term> {
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            type_err(format!("{function} takes {n} arguments"))
        }
    };
    match function {
        "bound" => {
            arity(1)?;
            match &args[0] {
                Expr::Term(t) if t.is_variable() => Ok(boolean(row.contains_key(&t.binding_key().unwrap()))),
                _ => type_err("bound needs a variable"),
            }
        }
        "coalesce" => args.iter().find_map(|a| eval(a, row).ok()).ok_or_else(|| EvalError::Type("no value".into())),
        "if" => {
            arity(3)?;
            if ebv(&eval(&args[0], row)?)? {
                eval(&args[1], row)
            } else {
                eval(&args[2], row)
            }
        }
        _ => {
            let vals = args.iter().map(|a| eval(a, row)).collect::<EResult<Vec<_>>>()?;
            builtin(function, &vals, arity)
        }
    }
}

fn builtin(function: &str, v: &[Term], arity: impl Fn(usize) -> EResult<()>) -> EResult<Term> {
    match function {
        "str" => {
            arity(1)?;
            match &v[0] {
                Term::Iri(i) => Ok(plain(i.clone())),
                Term::Literal(l) => Ok(plain(l.lexical())),
                t => type_err(format!("str of {t}")),
            }
        }
        "lang" => {
            arity(1)?;
            match &v[0] {
                Term::Literal(l) => Ok(plain(l.language().unwrap_or(""))),
                t => type_err(format!("lang of {t}")),
            }
        }
        "datatype" => {
            arity(1)?;
            match &v[0] {
                Term::Literal(l) if l.language().is_some() => {
                    Ok(Term::iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"))
                }
                Term::Literal(l) => Ok(Term::iri(l.datatype().unwrap_or(XSD_STRING))),
                t => type_err(format!("datatype of {t}")),
            }
        }
        "isiri" | "isuri" => {
            arity(1)?;
            Ok(boolean(v[0].is_iri()))
        }
        "isliteral" => {
            arity(1)?;
            Ok(boolean(v[0].is_literal()))
        }
        "isblank" => {
            arity(1)?;
            Ok(boolean(v[0].is_blank()))
        }
        "isnumeric" => {
            arity(1)?;
            Ok(boolean(numeric(&v[0]).is_some()))
        }
        "sameterm" => {
            arity(2)?;
            Ok(boolean(v[0] == v[1]))
        }
        "langmatches" => {
            arity(2)?;
            let tag = string_arg(&v[0])?.lexical().to_ascii_lowercase();
            let range = string_arg(&v[1])?.lexical().to_ascii_lowercase();
            let ok = if range == "*" { !tag.is_empty() } else { tag == range || tag.starts_with(&format!("{range}-")) };
            Ok(boolean(ok))
        }
        "regex" => {
            if !(2..=3).contains(&v.len()) {
                return type_err("regex takes 2 or 3 arguments");
            }
            let text = lexical_of(&v[0])?;
            let pattern = string_arg(&v[1])?.lexical();
            let flags = if v.len() == 3 { string_arg(&v[2])?.lexical().to_owned() } else { String::new() };
            let inline: String = flags.chars().filter(|c| "imsx".contains(*c)).collect();
            let full = if inline.is_empty() { pattern.to_owned() } else { format!("(?{inline}){pattern}") };
            let re = regex::Regex::new(&full).map_err(|e| EvalError::Type(e.to_string()))?;
            Ok(boolean(re.is_match(text)))
        }
        "contains" | "strstarts" | "strends" => {
            arity(2)?;
            let (a, b) = (lexical_of(&v[0])?, lexical_of(&v[1])?);
            Ok(boolean(match function {
                "contains" => a.contains(b),
                "strstarts" => a.starts_with(b),
                _ => a.ends_with(b),
            }))
        }
        "strlen" => {
            arity(1)?;
            Ok(number(lexical_of(&v[0])?.chars().count() as f64, true))
        }
        "lcase" | "ucase" => {
            arity(1)?;
            let s = lexical_of(&v[0])?;
            Ok(plain(if function == "lcase" { s.to_lowercase() } else { s.to_uppercase() }))
        }
        "abs" | "ceil" | "floor" | "round" => {
            arity(1)?;
            let n = numeric(&v[0]).ok_or_else(|| EvalError::Type(format!("{function} of {}", v[0])))?;
            let r = match function {
                "abs" => n.abs(),
                "ceil" => n.ceil(),
                "floor" => n.floor(),
                _ => n.round(),
            };
            Ok(number(r, is_integral(&v[0]) || function != "abs"))
        }
        other => Err(EvalError::UnknownFunction(other.to_owned())),
    }
}

fn lexical_of(t: &Term) -> EResult<&str> {
    match t {
        Term::Literal(l) => Ok(l.lexical()),
        _ => type_err(format!("{t} is not a literal")),
    }
}
