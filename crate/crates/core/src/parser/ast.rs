use std::fmt;

use num_traits::One;

use crate::algebra::Q;

/// Byte offsets plus 1-based line and column of `start`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Clone, Debug)]
pub enum AstKind {
    /// Nonnegative literal; decimals are stored exactly.
    Num(Q),
    Imag,
    Var(String),
    Neg(Box<Ast>),
    Bin(BinOp, Box<Ast>, Box<Ast>),
    Call(String, Vec<Ast>),
}

#[derive(Clone, Debug)]
pub struct Ast {
    pub kind: AstKind,
    pub span: SourceSpan,
}

/// Spans are ignored.
impl PartialEq for Ast {
    fn eq(&self, o: &Self) -> bool {
        match (&self.kind, &o.kind) {
            (AstKind::Num(a), AstKind::Num(b)) => a == b,
            (AstKind::Imag, AstKind::Imag) => true,
            (AstKind::Var(a), AstKind::Var(b)) => a == b,
            (AstKind::Neg(a), AstKind::Neg(b)) => a == b,
            (AstKind::Bin(p, a, b), AstKind::Bin(q, c, d)) => p == q && a == c && b == d,
            (AstKind::Call(f, a), AstKind::Call(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Ast {
    pub fn new(kind: AstKind) -> Ast {
        Ast { kind, span: SourceSpan::default() }
    }
    pub fn num(x: Q) -> Ast {
        Ast::new(AstKind::Num(x))
    }
    pub fn var(s: &str) -> Ast {
        Ast::new(AstKind::Var(s.to_string()))
    }
    pub fn neg(a: Ast) -> Ast {
        Ast::new(AstKind::Neg(Box::new(a)))
    }
    pub fn bin(op: BinOp, a: Ast, b: Ast) -> Ast {
        Ast::new(AstKind::Bin(op, Box::new(a), Box::new(b)))
    }
    pub fn call(f: &str, args: Vec<Ast>) -> Ast {
        Ast::new(AstKind::Call(f.to_string(), args))
    }

    fn prec(&self) -> u8 {
        match &self.kind {
            AstKind::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            AstKind::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            AstKind::Neg(_) => 3,
            AstKind::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    pub fn depth(&self) -> usize {
        match &self.kind {
            AstKind::Neg(a) => 1 + a.depth(),
            AstKind::Bin(_, a, b) => 1 + a.depth().max(b.depth()),
            AstKind::Call(_, xs) => 1 + xs.iter().map(|x| x.depth()).max().unwrap_or(0),
            _ => 1,
        }
    }
}

/// Exact decimal text of a rational whose denominator is 2^a·5^b.
pub fn decimal_text(x: &Q) -> Option<String> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    if x.is_integer() {
        return Some(x.numer().to_string());
    }
    let mut d = x.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut digits = 0usize;
    let mut scale = BigInt::one();
    while !d.is_one() {
        if d.is_multiple_of(&two) {
            d /= &two;
        } else if d.is_multiple_of(&five) {
            d /= &five;
        } else {
            return None;
        }
        digits += 1;
        scale *= 10;
    }
    // enough digits for both factors
    let scaled = (x * Q::from_integer(scale.clone())).to_integer();
    let s = scaled.to_string();
    let s = format!("{:0>width$}", s, width = digits + 1);
    let (ip, fp) = s.split_at(s.len() - digits);
    let fp = fp.trim_end_matches('0');
    Some(if fp.is_empty() { ip.to_string() } else { format!("{ip}.{fp}") })
}

fn fmt_num(x: &Q) -> String {
    match decimal_text(x) {
        Some(s) => s,
        // not producible by the parser; printed as a quotient
        None => format!("({}/{})", x.numer(), x.denom()),
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |a: &Ast, min: u8| -> String {
            if a.prec() < min {
                format!("({a})")
            } else {
                a.to_string()
            }
        };
        match &self.kind {
            AstKind::Num(x) => write!(f, "{}", fmt_num(x)),
            AstKind::Imag => write!(f, "i"),
            AstKind::Var(s) => write!(f, "{s}"),
            AstKind::Neg(a) => write!(f, "-{}", wrap(a, 3)),
            AstKind::Bin(op, a, b) => match op {
                BinOp::Add | BinOp::Sub => write!(f, "{}{}{}", wrap(a, 1), op.symbol(), wrap(b, 2)),
                BinOp::Mul | BinOp::Div => write!(f, "{}{}{}", wrap(a, 2), op.symbol(), wrap(b, 3)),
                BinOp::Pow => write!(f, "{}^{}", wrap(a, 5), wrap(b, 3)),
            },
            AstKind::Call(g, xs) => {
                let args: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "{g}({})", args.join(","))
            }
        }
    }
}

pub fn pretty_print(a: &Ast) -> String {
    a.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qf;

    #[test]
    fn decimals() {
        assert_eq!(decimal_text(&qf(1, 2)).unwrap(), "0.5");
        assert_eq!(decimal_text(&qf(3, 40)).unwrap(), "0.075");
        assert_eq!(decimal_text(&qf(7, 1)).unwrap(), "7");
        assert!(decimal_text(&qf(1, 3)).is_none());
    }
}
