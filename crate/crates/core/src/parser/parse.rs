//! Recursive descent over
//!   expr  := term (('+'|'-') term)*
//!   term  := unary (('*'|'/') unary)*
//!   unary := '-' unary | power
//!   power := primary ('^' unary)?

use num_bigint::BigInt;

use super::ast::{Ast, AstKind, BinOp, SourceSpan};
use crate::algebra::Q;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("syntax error at {}:{} (offset {}): {message}; expected one of: {}", span.line, span.column, span.start, expected.join(", "))]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Sym(char),
    End,
}

struct Lexed {
    tok: Tok,
    span: SourceSpan,
}

fn span_at(text: &str, start: usize, end: usize) -> SourceSpan {
    let before = &text[..start];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(start, |k| start - k - 1) + 1;
    SourceSpan { start, end, line, column }
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut k = 0;
    while k < bytes.len() {
        let c = text[k..].chars().next().unwrap();
        if c.is_whitespace() {
            k += c.len_utf8();
            continue;
        }
        let start = k;
        if c.is_ascii_digit() || (c == '.' && bytes.get(k + 1).is_some_and(|b| b.is_ascii_digit())) {
            while k < bytes.len() && bytes[k].is_ascii_digit() {
                k += 1;
            }
            let int_part = &text[start..k];
            let mut frac_part = "";
            if k < bytes.len() && bytes[k] == b'.' {
                let fs = k + 1;
                k += 1;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                frac_part = &text[fs..k];
            }
            let digits = format!("{int_part}{frac_part}");
            let n: BigInt = digits.parse().unwrap_or_default();
            let d = BigInt::from(10).pow(frac_part.len() as u32);
            out.push(Lexed { tok: Tok::Num(Q::new(n, d)), span: span_at(text, start, k) });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            while k < bytes.len() {
                let ch = text[k..].chars().next().unwrap();
                if ch.is_alphanumeric() || ch == '_' {
                    k += ch.len_utf8();
                } else {
                    break;
                }
            }
            out.push(Lexed { tok: Tok::Ident(text[start..k].to_string()), span: span_at(text, start, k) });
            continue;
        }
        if "+-*/^(),".contains(c) {
            k += 1;
            out.push(Lexed { tok: Tok::Sym(c), span: span_at(text, start, k) });
            continue;
        }
        return Err(ParseError {
            message: format!("unexpected character '{c}'"),
            span: span_at(text, start, start + c.len_utf8()),
            expected: operand_expected(),
        });
    }
    out.push(Lexed { tok: Tok::End, span: span_at(text, text.len(), text.len()) });
    Ok(out)
}

fn operand_expected() -> Vec<String> {
    ["number", "identifier", "'('", "'-'"].iter().map(|s| s.to_string()).collect()
}

struct Parser<'a> {
    toks: Vec<Lexed>,
    pos: usize,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }
    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }
    fn join(&self, a: SourceSpan, b: SourceSpan) -> SourceSpan {
        span_at(self.text, a.start, b.end)
    }
    fn error(&self, expected: Vec<String>) -> ParseError {
        let what = match self.peek() {
            Tok::End => "unexpected end of input".to_string(),
            Tok::Num(_) => "unexpected number".to_string(),
            Tok::Ident(s) => format!("unexpected identifier '{s}'"),
            Tok::Sym(c) => format!("unexpected '{c}'"),
        };
        ParseError { message: what, span: self.span(), expected }
    }
    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            let span = self.join(lhs.span, rhs.span);
            lhs = Ast { kind: AstKind::Bin(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                Tok::Num(_) | Tok::Ident(_) | Tok::Sym('(') => {
                    return Err(ParseError {
                        message: "implicit multiplication is not allowed".into(),
                        span: self.span(),
                        expected: ["'*'", "'/'", "'+'", "'-'", "')'", "end of input"].iter().map(|s| s.to_string()).collect(),
                    })
                }
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            let span = self.join(lhs.span, rhs.span);
            lhs = Ast { kind: AstKind::Bin(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        let start = self.span();
        if self.eat('-') {
            let inner = self.unary()?;
            let span = self.join(start, inner.span);
            return Ok(Ast { kind: AstKind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let e = self.unary()?;
            let span = self.join(base.span, e.span);
            return Ok(Ast { kind: AstKind::Bin(BinOp::Pow, Box::new(base), Box::new(e)), span });
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.pos += 1;
                Ok(Ast { kind: AstKind::Num(x), span })
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    let close = self.span();
                    if !self.eat(')') {
                        return Err(self.error(vec!["','".into(), "')'".into()]));
                    }
                    return Ok(Ast { kind: AstKind::Call(name, args), span: self.join(span, close) });
                }
                if name == "i" {
                    return Ok(Ast { kind: AstKind::Imag, span });
                }
                Ok(Ast { kind: AstKind::Var(name), span })
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let mut inner = self.expr()?;
                let close = self.span();
                if !self.eat(')') {
                    return Err(self.error(vec!["')'".into(), "operator".into()]));
                }
                inner.span = self.join(span, close);
                Ok(inner)
            }
            _ => Err(self.error(operand_expected())),
        }
    }
}

pub fn parse_expression(text: &str) -> Result<Ast, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, text };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(vec!["operator".into(), "end of input".into()]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qf};

    #[test]
    fn precedence() {
        let a = parse_expression("-x^2*3+1").unwrap();
        let expect = Ast::bin(
            BinOp::Add,
            Ast::bin(BinOp::Mul, Ast::neg(Ast::bin(BinOp::Pow, Ast::var("x"), Ast::num(q(2)))), Ast::num(q(3))),
            Ast::num(q(1)),
        );
        assert_eq!(a, expect);
    }

    #[test]
    fn power_is_right_associative() {
        let a = parse_expression("a^b^c").unwrap();
        let expect = Ast::bin(BinOp::Pow, Ast::var("a"), Ast::bin(BinOp::Pow, Ast::var("b"), Ast::var("c")));
        assert_eq!(a, expect);
    }

    #[test]
    fn trailing_operator_error() {
        let e = parse_expression("1+").unwrap_err();
        assert_eq!(e.span.start, 2);
        assert!(!e.expected.is_empty());
    }

    #[test]
    fn implicit_multiplication_rejected() {
        let e = parse_expression("2t").unwrap_err();
        assert_eq!(e.span.start, 1);
    }

    #[test]
    fn decimal_and_call() {
        let a = parse_expression("tan(l*t)+0.25").unwrap();
        match &a.kind {
            AstKind::Bin(BinOp::Add, f, n) => {
                assert!(matches!(&f.kind, AstKind::Call(g, _) if g == "tan"));
                assert_eq!(**n, Ast::num(qf(1, 4)));
            }
            _ => panic!("{a:?}"),
        }
    }

    #[test]
    fn spans_point_into_source() {
        let a = parse_expression("(2*t^2+4)/(1+t^2)^2").unwrap();
        assert_eq!(a.span.start, 0);
        assert_eq!(a.span.end, 19);
        match &a.kind {
            AstKind::Bin(BinOp::Div, n, d) => {
                assert_eq!((n.span.start, n.span.end), (0, 9));
                assert_eq!((d.span.start, d.span.end), (10, 19));
            }
            _ => panic!(),
        }
    }
}
