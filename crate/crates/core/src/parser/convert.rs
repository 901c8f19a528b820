use std::collections::BTreeMap;

use super::ast::{Ast, AstKind, BinOp, SourceSpan};
use crate::algebra::{sym, Q};
use crate::liouville::{Expr, Func};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConvertError {
    #[error("unknown function '{name}' at offset {}", span.start)]
    UnknownFunction { name: String, span: SourceSpan },
    #[error("'{name}' takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize, span: SourceSpan },
    #[error("exponent at offset {} is not a constant", span.start)]
    NonConstantExponent { span: SourceSpan },
    #[error("division by zero at offset {}", span.start)]
    DivisionByZero { span: SourceSpan },
    #[error("bad integral at offset {}: {reason}", span.start)]
    BadIntegral { reason: String, span: SourceSpan },
}

/// Build a canonical expression. Identifiers bound in `params` become constants.
pub fn to_expr(a: &Ast, params: &BTreeMap<String, Q>) -> Result<Expr, ConvertError> {
    Ok(match &a.kind {
        AstKind::Num(x) => Expr::rational(x.clone()),
        AstKind::Imag => Expr::i(),
        AstKind::Var(s) => match params.get(s) {
            Some(v) => Expr::rational(v.clone()),
            None => Expr::var(s),
        },
        AstKind::Neg(x) => -to_expr(x, params)?,
        AstKind::Bin(op, l, r) => {
            let lhs = to_expr(l, params)?;
            let rhs = to_expr(r, params)?;
            match op {
                BinOp::Add => lhs + rhs,
                BinOp::Sub => lhs - rhs,
                BinOp::Mul => lhs * rhs,
                BinOp::Div => {
                    if rhs.is_zero() {
                        return Err(ConvertError::DivisionByZero { span: r.span });
                    }
                    lhs * rhs.recip()
                }
                BinOp::Pow => match rhs.as_const() {
                    Some(c) => {
                        if lhs.is_zero() && c.as_rational().is_some_and(|q| q <= &Q::from_integer(0.into())) {
                            return Err(ConvertError::DivisionByZero { span: a.span });
                        }
                        Expr::pow(&lhs, c.clone())
                    }
                    None => return Err(ConvertError::NonConstantExponent { span: r.span }),
                },
            }
        }
        AstKind::Call(name, args) => call(name, args, a.span, params)?,
    })
}

fn call(name: &str, args: &[Ast], span: SourceSpan, params: &BTreeMap<String, Q>) -> Result<Expr, ConvertError> {
    let arity = |n: usize| -> Result<(), ConvertError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(ConvertError::Arity { name: name.to_string(), expected: n, got: args.len(), span })
        }
    };
    if name == "sqrt" {
        arity(1)?;
        return Ok(to_expr(&args[0], params)?.sqrt());
    }
    if name == "integral" {
        arity(4)?;
        let integrand = to_expr(&args[0], params)?;
        let var = match &args[1].kind {
            AstKind::Var(v) if !params.contains_key(v) => sym(v),
            _ => return Err(ConvertError::BadIntegral { reason: "second argument must be a variable".into(), span }),
        };
        let lower = to_expr(&args[2], params)?;
        let lower = lower
            .as_const()
            .and_then(|c| c.as_rational().cloned())
            .ok_or_else(|| ConvertError::BadIntegral { reason: "lower bound must be a rational constant".into(), span })?;
        let upper = to_expr(&args[3], params)?;
        return Ok(Expr::integral_to(integrand, &var, lower, upper));
    }
    let f = Func::from_name(name).ok_or_else(|| ConvertError::UnknownFunction { name: name.to_string(), span })?;
    arity(1)?;
    Ok(Expr::func(f, to_expr(&args[0], params)?))
}

/// Identifiers used as variables (not functions, not `i`).
pub fn identifiers(a: &Ast) -> Vec<(String, SourceSpan)> {
    let mut out = Vec::new();
    walk(a, &mut out);
    out
}

fn walk(a: &Ast, out: &mut Vec<(String, SourceSpan)>) {
    match &a.kind {
        AstKind::Var(s) => out.push((s.clone(), a.span)),
        AstKind::Neg(x) => walk(x, out),
        AstKind::Bin(_, l, r) => {
            walk(l, out);
            walk(r, out);
        }
        AstKind::Call(name, xs) => {
            for (k, x) in xs.iter().enumerate() {
                // the bound variable of integral(...) is not a free identifier
                if name == "integral" && k == 1 {
                    continue;
                }
                walk(x, out);
            }
        }
        _ => {}
    }
}

/// Parse and convert in one step with no parameters.
pub fn parse_expr(text: &str) -> Result<Expr, Box<dyn std::error::Error + Send + Sync>> {
    let a = super::parse::parse_expression(text)?;
    Ok(to_expr(&a, &BTreeMap::new())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Scalar;
    use crate::parser::parse_expression;

    #[test]
    fn sqrt_is_half_power() {
        let e = parse_expr("sqrt(1+t^2)").unwrap();
        let t = Expr::var("t");
        assert_eq!(e, (Expr::one() + t.powi(2)).sqrt());
    }

    #[test]
    fn parameters_substituted() {
        let mut p = BTreeMap::new();
        p.insert("l".to_string(), crate::algebra::q(2));
        let a = parse_expression("tan(l*t)").unwrap();
        let e = to_expr(&a, &p).unwrap();
        assert_eq!(e, Expr::tan(Expr::var("t").scale(&Scalar::int(2))));
    }

    #[test]
    fn symbolic_exponent_rejected() {
        let a = parse_expression("t^t").unwrap();
        assert!(matches!(to_expr(&a, &BTreeMap::new()), Err(ConvertError::NonConstantExponent { .. })));
    }

    #[test]
    fn printed_expressions_reparse() {
        for s in ["(2*t^2+4)/(1+t^2)^2", "exp(arctan(tau))*(tau+1)*(1+tau^2)^(1/2)", "(1+i)/2*t", "integral(cos(s),s,0,t)"] {
            let e = parse_expr(s).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            assert_eq!(e, again, "{s} -> {e}");
        }
    }
}
