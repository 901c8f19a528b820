//! Canonical text form. Same grammar as the parser; no spaces.

use std::fmt;

use num_traits::{One, Signed};

use super::expr::{scalar_is_negative, Expr, Node};
use crate::algebra::{Scalar, Q};

fn is_simple_scalar(c: &Scalar) -> bool {
    // plain integers and lone symbols print without parentheses
    c.as_integer().is_some_and(|n| !n.is_negative()) || *c == Scalar::i()
}

fn scalar_atom(c: &Scalar) -> String {
    if is_simple_scalar(c) {
        c.to_string()
    } else {
        format!("({c})")
    }
}

fn exponent_text(e: &Scalar) -> String {
    scalar_atom(e)
}

/// A factor inside a product or a power base.
fn atom(e: &Expr) -> String {
    match e.node() {
        Node::Const(c) => scalar_atom(c),
        Node::Var(_) | Node::Func(..) | Node::Integral { .. } => e.to_string(),
        Node::Pow(..) => e.to_string(),
        _ => format!("({e})"),
    }
}

fn power_text(base: &Expr, e: &Scalar) -> String {
    let b = match base.node() {
        Node::Var(_) | Node::Func(..) | Node::Integral { .. } => base.to_string(),
        Node::Const(c) if is_simple_scalar(c) => c.to_string(),
        _ => format!("({base})"),
    };
    if e.is_one() {
        b
    } else {
        format!("{b}^{}", exponent_text(e))
    }
}

/// Negative real rational exponents go to the denominator.
fn neg_rational(e: &Scalar) -> Option<Scalar> {
    e.as_rational().filter(|x| x.is_negative()).map(|_| -e)
}

fn product_text(coeff: &Scalar, factors: &[Expr]) -> String {
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    let (mut cnum, mut cden) = (None, None);
    if let Some(r) = coeff.as_rational() {
        if !r.numer().is_one() || factors.is_empty() {
            cnum = Some(r.numer().to_string());
        }
        if !r.denom().is_one() {
            cden = Some(r.denom().to_string());
        }
    } else if !coeff.is_one() {
        cnum = Some(scalar_atom(coeff));
    }
    if let Some(c) = cnum {
        num.push(c);
    }
    if let Some(c) = cden {
        den.push(c);
    }
    for f in factors {
        match f.node() {
            Node::Pow(b, e) => match neg_rational(e) {
                Some(pe) => den.push(power_text(b, &pe)),
                None => num.push(atom(f)),
            },
            _ => num.push(atom(f)),
        }
    }
    let n = if num.is_empty() { "1".to_string() } else { num.join("*") };
    match den.len() {
        0 => n,
        1 => format!("{n}/{}", den[0]),
        _ => format!("{n}/({})", den.join("*")),
    }
}

fn term_text(e: &Expr) -> String {
    let (c, rest) = e.split_coeff();
    let factors: Vec<Expr> = match rest.node() {
        Node::Mul(fs) => fs.clone(),
        _ if rest.is_one() => vec![],
        _ => vec![rest.clone()],
    };
    if factors.is_empty() {
        return c.to_string();
    }
    if scalar_is_negative(&c) && c.as_rational().is_some() {
        return format!("-{}", product_text(&-&c, &factors));
    }
    if factors.len() == 1 && c.is_one() {
        if let Node::Pow(b, e) = factors[0].node() {
            if neg_rational(e).is_none() {
                return power_text(b, e);
            }
        }
    }
    product_text(&c, &factors)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(s) => write!(f, "{s}"),
            Node::Add(ts) => {
                let mut out = String::new();
                for (k, t) in ts.iter().enumerate() {
                    let s = term_text(t);
                    if k > 0 && !s.starts_with('-') {
                        out.push('+');
                    }
                    out.push_str(&s);
                }
                write!(f, "{out}")
            }
            Node::Mul(_) | Node::Pow(..) => write!(f, "{}", term_text(self)),
            Node::Func(g, a) => write!(f, "{}({a})", g.name()),
            Node::Integral { integrand, var, lower, upper } => {
                write!(f, "integral({integrand},{var},{},{upper})", q_text(lower))
            }
        }
    }
}

fn q_text(x: &Q) -> String {
    if x.is_negative() {
        format!("({x})")
    } else {
        x.to_string()
    }
}
