use std::collections::BTreeMap;
use std::ops;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::algebra::{sym, Scalar, Symbol, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Log,
    Arctan,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Arctan => "arctan",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }
    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "arctan" | "atan" => Func::Arctan,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }
    fn parity(self) -> Option<bool> {
        match self {
            Func::Sin | Func::Tan | Func::Sinh | Func::Arctan => Some(true),
            Func::Cos | Func::Cosh => Some(false),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Const(Scalar),
    Var(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Scalar),
    Func(Func, Expr),
    /// ∫_lower^upper integrand d(var); `var` is bound.
    Integral { integrand: Expr, var: Symbol, lower: Q, upper: Expr },
}

/// Immutable, canonical expression. All constructors normalize.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Node>);

pub type LiouvilleExpr = Expr;

/// Sign of the first nonzero rational component.
pub(crate) fn scalar_is_negative(c: &Scalar) -> bool {
    let parts = [&c.base().re, &c.base().im, &c.surd_coeff().re, &c.surd_coeff().im];
    parts.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative())
}

impl Expr {
    fn raw(n: Node) -> Expr {
        Expr(Arc::new(n))
    }
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: Scalar) -> Expr {
        Self::raw(Node::Const(c))
    }
    pub fn int(n: i64) -> Expr {
        Self::constant(Scalar::int(n))
    }
    pub fn frac(n: i64, d: i64) -> Expr {
        Self::constant(Scalar::frac(n, d))
    }
    pub fn rational(x: Q) -> Expr {
        Self::constant(Scalar::from_q(x))
    }
    pub fn zero() -> Expr {
        Self::int(0)
    }
    pub fn one() -> Expr {
        Self::int(1)
    }
    pub fn i() -> Expr {
        Self::constant(Scalar::i())
    }
    pub fn var(name: &str) -> Expr {
        Self::raw(Node::Var(sym(name)))
    }
    pub fn var_sym(s: &Symbol) -> Expr {
        Self::raw(Node::Var(s.clone()))
    }

    pub fn as_const(&self) -> Option<&Scalar> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }
    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }
    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }
    pub fn as_var(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Var(s) => Some(s),
            _ => None,
        }
    }

    /// Split into numeric coefficient and the remaining product.
    pub fn split_coeff(&self) -> (Scalar, Expr) {
        match self.node() {
            Node::Const(c) => (c.clone(), Expr::one()),
            Node::Mul(fs) => {
                if let Some(c) = fs[0].as_const() {
                    let rest = &fs[1..];
                    let r = if rest.len() == 1 { rest[0].clone() } else { Self::raw(Node::Mul(rest.to_vec())) };
                    (c.clone(), r)
                } else {
                    (Scalar::one(), self.clone())
                }
            }
            _ => (Scalar::one(), self.clone()),
        }
    }

    /// Canonical coefficient·rest, with rest already canonical and coefficient-free.
    fn with_coeff(c: Scalar, rest: Expr) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        if rest.is_one() {
            return Expr::constant(c);
        }
        if c.is_one() {
            return rest;
        }
        match rest.node() {
            Node::Mul(fs) => {
                let mut v = Vec::with_capacity(fs.len() + 1);
                v.push(Expr::constant(c));
                v.extend(fs.iter().cloned());
                Self::raw(Node::Mul(v))
            }
            _ => Self::raw(Node::Mul(vec![Expr::constant(c), rest])),
        }
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t.node() {
                Node::Add(ts) => flat.extend(ts.iter().cloned()),
                _ => flat.push(t),
            }
        }
        let mut acc: BTreeMap<Expr, Vec<Scalar>> = BTreeMap::new();
        for t in flat {
            let (c, r) = t.split_coeff();
            if c.is_zero() {
                continue;
            }
            let slot = acc.entry(r).or_default();
            let mut merged = false;
            for s in slot.iter_mut() {
                if let Ok(v) = s.try_add(&c) {
                    *s = v;
                    merged = true;
                    break;
                }
            }
            if !merged {
                slot.push(c);
            }
        }
        let mut out: Vec<Expr> = Vec::new();
        for (r, cs) in acc {
            for c in cs {
                if !c.is_zero() {
                    out.push(Self::with_coeff(c, r.clone()));
                }
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Self::raw(Node::Add(out))
            }
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut work = factors;
        for _ in 0..4 {
            let mut consts: Vec<Scalar> = vec![Scalar::one()];
            let mut exp_args: Vec<Expr> = Vec::new();
            let mut pows: BTreeMap<Expr, Scalar> = BTreeMap::new();
            let mut stack = work;
            while let Some(f) = stack.pop() {
                match f.node() {
                    Node::Const(c) => {
                        if c.is_zero() {
                            return Expr::zero();
                        }
                        match consts.iter_mut().find_map(|s| s.try_mul(c).ok().map(|v| (s, v))) {
                            Some((s, v)) => *s = v,
                            None => consts.push(c.clone()),
                        }
                    }
                    Node::Mul(fs) => stack.extend(fs.iter().cloned()),
                    Node::Func(Func::Exp, a) => exp_args.push(a.clone()),
                    Node::Pow(b, e) => merge_pow(&mut pows, b.clone(), e.clone()),
                    _ => merge_pow(&mut pows, f.clone(), Scalar::one()),
                }
            }
            let mut built: Vec<Expr> = Vec::new();
            let mut again = false;
            for (b, e) in pows {
                let p = Expr::pow(&b, e);
                if matches!(p.node(), Node::Const(_) | Node::Mul(_)) || matches!(p.node(), Node::Func(Func::Exp, _)) {
                    again = true;
                }
                if !p.is_one() {
                    built.push(p);
                }
            }
            if !exp_args.is_empty() {
                let e = Expr::func(Func::Exp, Expr::add(exp_args));
                if !matches!(e.node(), Node::Func(Func::Exp, _)) {
                    again = true;
                }
                if !e.is_one() {
                    built.push(e);
                }
            }
            let nontrivial: Vec<Scalar> = consts.into_iter().filter(|c| !c.is_one()).collect();
            if again {
                work = built;
                work.extend(nontrivial.into_iter().map(Expr::constant));
                continue;
            }
            built.sort();
            if nontrivial.len() == 1 && built.len() == 1 {
                if let Node::Add(ts) = built[0].node() {
                    return Expr::add(ts.iter().map(|t| t.scale(&nontrivial[0])).collect());
                }
            }
            let mut all: Vec<Expr> = nontrivial.into_iter().map(Expr::constant).collect();
            all.sort();
            all.extend(built);
            return match all.len() {
                0 => Expr::one(),
                1 => all.pop().unwrap(),
                _ => Self::raw(Node::Mul(all)),
            };
        }
        Self::raw(Node::Mul(work))
    }

    pub fn pow(base: &Expr, e: Scalar) -> Expr {
        if e.is_zero() || base.is_one() {
            return Expr::one();
        }
        if e.is_one() {
            return base.clone();
        }
        let int_e = e.as_i64();
        match base.node() {
            Node::Const(c) => {
                if let Some(n) = int_e {
                    if let Ok(v) = c.powi(n) {
                        return Expr::constant(v);
                    }
                } else if let Some(n2) = e.try_mul(&Scalar::int(2)).ok().and_then(|x| x.as_i64()) {
                    if let Ok(s) = c.sqrt() {
                        if let Ok(v) = s.powi(n2) {
                            return Expr::constant(v);
                        }
                    }
                }
                Self::raw(Node::Pow(base.clone(), e))
            }
            Node::Pow(b, e2) => {
                if int_e.is_some() {
                    if let Ok(p) = e2.try_mul(&e) {
                        return Expr::pow(b, p);
                    }
                }
                Self::raw(Node::Pow(base.clone(), e))
            }
            Node::Mul(fs) => {
                if int_e.is_some() {
                    return Expr::mul(fs.iter().map(|f| Expr::pow(f, e.clone())).collect());
                }
                // pull out positive rational constants and exponentials
                let mut out = Vec::new();
                let mut keep = Vec::new();
                for f in fs {
                    match f.node() {
                        Node::Const(c) if c.as_rational().is_some_and(|x| x.is_positive()) => {
                            out.push(Expr::pow(f, e.clone()))
                        }
                        Node::Func(Func::Exp, _) => out.push(Expr::pow(f, e.clone())),
                        _ => keep.push(f.clone()),
                    }
                }
                if out.is_empty() {
                    return Self::raw(Node::Pow(base.clone(), e));
                }
                let rest = Expr::mul(keep);
                out.push(Expr::pow(&rest, e));
                Expr::mul(out)
            }
            Node::Func(Func::Exp, a) => Expr::func(Func::Exp, Expr::mul(vec![Expr::constant(e), a.clone()])),
            Node::Add(ts) => {
                if int_e.is_none() && e.as_rational().is_some() {
                    if let Some(g) = rational_content(ts) {
                        if !num_traits::One::is_one(&g) {
                            let inner = Expr::mul(vec![Expr::rational(Q::from_integer(1.into()) / &g), base.clone()]);
                            return Expr::mul(vec![
                                Expr::pow(&Expr::rational(g), e.clone()),
                                Self::raw(Node::Pow(inner, e)),
                            ]);
                        }
                    }
                }
                Self::raw(Node::Pow(base.clone(), e))
            }
            _ => Self::raw(Node::Pow(base.clone(), e)),
        }
    }
    pub fn powi(&self, n: i64) -> Expr {
        Expr::pow(self, Scalar::int(n))
    }
    pub fn sqrt(&self) -> Expr {
        Expr::pow(self, Scalar::frac(1, 2))
    }
    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            if c.is_zero() {
                match f {
                    Func::Exp | Func::Cos | Func::Cosh => return Expr::one(),
                    Func::Sin | Func::Tan | Func::Sinh | Func::Arctan => return Expr::zero(),
                    Func::Log => {}
                }
            }
            if c.is_one() && f == Func::Log {
                return Expr::zero();
            }
        }
        match f {
            Func::Exp => {
                if let Node::Func(Func::Log, x) = arg.node() {
                    return x.clone();
                }
                // exp(k·log x + rest) = x^k·exp(rest)
                let terms: Vec<Expr> = match arg.node() {
                    Node::Add(ts) => ts.clone(),
                    _ => vec![arg.clone()],
                };
                let mut powers = Vec::new();
                let mut rest = Vec::new();
                for t in terms {
                    let (k, r) = t.split_coeff();
                    match r.node() {
                        Node::Func(Func::Log, x) => powers.push(Expr::pow(x, k)),
                        _ => rest.push(t),
                    }
                }
                if !powers.is_empty() {
                    powers.push(Expr::func(Func::Exp, Expr::add(rest)));
                    return Expr::mul(powers);
                }
            }
            Func::Log => {
                if let Node::Func(Func::Exp, x) = arg.node() {
                    return x.clone();
                }
            }
            _ => {}
        }
        // purely imaginary arguments move between circular and hyperbolic
        let (k, _) = arg.split_coeff();
        if k.as_gaussian().is_some_and(|g| g.re.is_zero() && !g.im.is_zero()) {
            let inner = Expr::mul(vec![Expr::constant(-Scalar::i()), arg.clone()]);
            match f {
                Func::Cosh => return Expr::func(Func::Cos, inner),
                Func::Cos => return Expr::func(Func::Cosh, inner),
                Func::Sinh => return Expr::mul(vec![Expr::i(), Expr::func(Func::Sin, inner)]),
                Func::Sin => return Expr::mul(vec![Expr::i(), Expr::func(Func::Sinh, inner)]),
                _ => {}
            }
        }
        if let Some(odd) = f.parity() {
            if arg.leading_negative() {
                let neg = -&arg;
                let v = Self::raw(Node::Func(f, neg));
                return if odd { -&v } else { v };
            }
        }
        Self::raw(Node::Func(f, arg))
    }

    /// True when the canonical leading coefficient is negative.
    pub fn leading_negative(&self) -> bool {
        let lead = match self.node() {
            Node::Add(ts) => ts.iter().map(|t| t.split_coeff()).min_by(|a, b| a.1.cmp(&b.1)).unwrap(),
            _ => self.split_coeff(),
        };
        scalar_is_negative(&lead.0)
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::func(Func::Exp, a)
    }
    pub fn log(a: Expr) -> Expr {
        Expr::func(Func::Log, a)
    }
    pub fn sin(a: Expr) -> Expr {
        Expr::func(Func::Sin, a)
    }
    pub fn cos(a: Expr) -> Expr {
        Expr::func(Func::Cos, a)
    }
    pub fn tan(a: Expr) -> Expr {
        Expr::func(Func::Tan, a)
    }
    pub fn sinh(a: Expr) -> Expr {
        Expr::func(Func::Sinh, a)
    }
    pub fn cosh(a: Expr) -> Expr {
        Expr::func(Func::Cosh, a)
    }
    pub fn arctan(a: Expr) -> Expr {
        Expr::func(Func::Arctan, a)
    }

    /// ∫_lower^var integrand, as a function of `var`.
    pub fn integral(integrand: Expr, var: &Symbol, lower: Q) -> Expr {
        Expr::integral_to(integrand, var, lower, Expr::var_sym(var))
    }
    pub fn integral_to(integrand: Expr, var: &Symbol, lower: Q, upper: Expr) -> Expr {
        if integrand.is_zero() {
            return Expr::zero();
        }
        if upper.as_const().and_then(|c| c.as_rational()) == Some(&lower) {
            return Expr::zero();
        }
        Self::raw(Node::Integral { integrand, var: var.clone(), lower, upper })
    }

    pub fn scale(&self, c: &Scalar) -> Expr {
        Expr::mul(vec![Expr::constant(c.clone()), self.clone()])
    }

    pub fn children(&self) -> Vec<Expr> {
        match self.node() {
            Node::Const(_) | Node::Var(_) => vec![],
            Node::Add(v) | Node::Mul(v) => v.clone(),
            Node::Pow(b, _) => vec![b.clone()],
            Node::Func(_, a) => vec![a.clone()],
            Node::Integral { integrand, upper, .. } => vec![integrand.clone(), upper.clone()],
        }
    }

    /// Rebuild with mapped children through the canonical constructors.
    pub fn map_children(&self, f: &mut dyn FnMut(&Expr) -> Expr) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Var(_) => self.clone(),
            Node::Add(v) => Expr::add(v.iter().map(|c| f(c)).collect()),
            Node::Mul(v) => Expr::mul(v.iter().map(|c| f(c)).collect()),
            Node::Pow(b, e) => Expr::pow(&f(b), e.clone()),
            Node::Func(g, a) => Expr::func(*g, f(a)),
            Node::Integral { integrand, var, lower, upper } => {
                Expr::integral_to(f(integrand), var, lower.clone(), f(upper))
            }
        }
    }

    /// Bottom-up rewrite.
    pub fn transform(&self, f: &mut dyn FnMut(Expr) -> Expr) -> Expr {
        let inner = self.map_children(&mut |c| c.transform(f));
        f(inner)
    }

    pub fn contains_var(&self, v: &Symbol) -> bool {
        match self.node() {
            Node::Var(s) => s == v,
            Node::Integral { integrand, var, upper, .. } => {
                upper.contains_var(v) || (var != v && integrand.contains_var(v))
            }
            _ => self.children().iter().any(|c| c.contains_var(v)),
        }
    }
    pub fn free_vars(&self) -> std::collections::BTreeSet<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
    fn collect_vars(&self, out: &mut std::collections::BTreeSet<Symbol>) {
        match self.node() {
            Node::Var(s) => {
                out.insert(s.clone());
            }
            Node::Integral { integrand, var, upper, .. } => {
                let mut inner = std::collections::BTreeSet::new();
                integrand.collect_vars(&mut inner);
                inner.remove(var);
                out.extend(inner);
                upper.collect_vars(out);
            }
            _ => self.children().iter().for_each(|c| c.collect_vars(out)),
        }
    }
    pub fn contains_func(&self, f: Func) -> bool {
        match self.node() {
            Node::Func(g, a) => *g == f || a.contains_func(f),
            _ => self.children().iter().any(|c| c.contains_func(f)),
        }
    }
    pub fn contains_integral(&self) -> bool {
        matches!(self.node(), Node::Integral { .. }) || self.children().iter().any(|c| c.contains_integral())
    }

    /// Replace every free occurrence of variable `v` by `with`.
    pub fn subs(&self, v: &Symbol, with: &Expr) -> Expr {
        match self.node() {
            Node::Var(s) if s == v => with.clone(),
            Node::Integral { integrand, var, lower, upper } if var == v => {
                Expr::integral_to(integrand.clone(), var, lower.clone(), upper.subs(v, with))
            }
            _ => self.map_children(&mut |c| c.subs(v, with)),
        }
    }

    /// Count of nodes, used to pick the smaller of equivalent forms.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

fn merge_pow(pows: &mut BTreeMap<Expr, Scalar>, base: Expr, e: Scalar) {
    use std::collections::btree_map::Entry;
    match pows.entry(base.clone()) {
        Entry::Vacant(v) => {
            v.insert(e);
        }
        Entry::Occupied(mut o) => match o.get().try_add(&e) {
            Ok(s) => {
                *o.get_mut() = s;
            }
            Err(_) => {
                // keep it separate under an equivalent key
                let k = Expr::raw(Node::Pow(base, e));
                *pows.entry(k).or_insert_with(Scalar::zero) = Scalar::one();
            }
        },
    }
}

/// Positive rational g with all coefficients of the sum divided by g integer
/// and coprime; None when some coefficient is not rational.
fn rational_content(ts: &[Expr]) -> Option<Q> {
    use num_integer::Integer;
    let mut num = num_bigint::BigInt::zero();
    let mut den = num_bigint::BigInt::from(1);
    for t in ts {
        let (c, _) = t.split_coeff();
        let r = c.as_rational()?;
        num = num.gcd(r.numer());
        den = den.lcm(r.denom());
    }
    if num.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

impl ops::Add for &Expr {
    type Output = Expr;
    fn add(self, o: &Expr) -> Expr {
        Expr::add(vec![self.clone(), o.clone()])
    }
}
impl ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, o: &Expr) -> Expr {
        Expr::add(vec![self.clone(), -o])
    }
}
impl ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, o: &Expr) -> Expr {
        Expr::mul(vec![self.clone(), o.clone()])
    }
}
impl ops::Div for &Expr {
    type Output = Expr;
    fn div(self, o: &Expr) -> Expr {
        Expr::mul(vec![self.clone(), o.recip()])
    }
}
impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&Scalar::int(-1))
    }
}
macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                ops::$tr::$m(&self, &o)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                ops::$tr::$m(&self, o)
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                ops::$tr::$m(self, &o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);
impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}
impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}
impl From<Scalar> for Expr {
    fn from(c: Scalar) -> Expr {
        Expr::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Expr {
        Expr::var("t")
    }

    #[test]
    fn like_terms_and_powers() {
        let e = &(&t() + &t()) - &t().scale(&Scalar::int(2));
        assert!(e.is_zero());
        let p = &t() * &t();
        assert_eq!(p, t().powi(2));
        assert_eq!(&p / &t(), t());
    }

    #[test]
    fn exp_merges() {
        let e = Expr::exp(t()) * Expr::exp(-t());
        assert!(e.is_one());
        let l = Expr::exp(Expr::log(t()).scale(&Scalar::frac(1, 2)));
        assert_eq!(l, t().sqrt());
    }

    #[test]
    fn parity() {
        assert_eq!(Expr::sin(-t()), -Expr::sin(t()));
        assert_eq!(Expr::cos(-t()), Expr::cos(t()));
        assert_eq!(Expr::cosh(Expr::i() * t()), Expr::cos(t()));
    }

    #[test]
    fn constant_roots() {
        assert_eq!(Expr::int(4).sqrt(), Expr::int(2));
        let s = Expr::int(-3).sqrt();
        assert_eq!(s.as_const().unwrap(), &Scalar::int(-3).sqrt().unwrap());
    }

    #[test]
    fn content_extracted_from_fractional_power() {
        // (2t²−8)^(1/2) = √2·(t²−4)^(1/2)
        let b = &t().powi(2).scale(&Scalar::int(2)) - &Expr::int(8);
        let p = b.sqrt();
        let expect = Expr::int(2).sqrt() * (&t().powi(2) - &Expr::int(4)).sqrt();
        assert_eq!(p, expect);
    }
}
