//! Rational functions inside expressions and an exact zero test for
//! hyperexponential sums Σ R(τ)·monomial.

use std::collections::BTreeMap;

use super::expr::{Expr, Func, Node};
use crate::algebra::{AlgebraError, Polynomial, RationalFunction, Scalar, Symbol};

/// The expression as an element of ℚ(i,√d)(v), if it is one.
pub fn to_rational(e: &Expr, v: &Symbol) -> Option<RationalFunction> {
    to_rational_res(e, v).ok().flatten()
}

fn to_rational_res(e: &Expr, v: &Symbol) -> Result<Option<RationalFunction>, AlgebraError> {
    Ok(Some(match e.node() {
        Node::Const(c) => RationalFunction::constant(v.clone(), c.clone()),
        Node::Var(s) if s == v => RationalFunction::x(v.clone()),
        Node::Add(ts) => {
            let mut acc = RationalFunction::zero(v.clone());
            for t in ts {
                match to_rational_res(t, v)? {
                    Some(r) => acc = acc.try_add(&r)?,
                    None => return Ok(None),
                }
            }
            acc
        }
        Node::Mul(fs) => {
            let mut acc = RationalFunction::one(v.clone());
            for f in fs {
                match to_rational_res(f, v)? {
                    Some(r) => acc = acc.try_mul(&r)?,
                    None => return Ok(None),
                }
            }
            acc
        }
        Node::Pow(b, p) => match (p.as_i64(), to_rational_res(b, v)?) {
            (Some(n), Some(r)) => r.powi(n)?,
            _ => return Ok(None),
        },
        _ => return Ok(None),
    }))
}

pub fn poly_to_expr(p: &Polynomial) -> Expr {
    let x = Expr::var_sym(p.var());
    Expr::add(
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| Expr::constant(c.clone()) * x.powi(k as i64))
            .collect(),
    )
}

pub fn rational_to_expr(r: &RationalFunction) -> Expr {
    let n = poly_to_expr(r.num());
    if r.den().is_constant() {
        return n;
    }
    n * poly_to_expr(r.den()).recip()
}

/// Monomial key: fractional powers of rational bases, one exponential and
/// integer powers of anything else.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    pows: BTreeMap<RationalFunction, Scalar>,
    exp_arg: Expr,
    others: BTreeMap<Expr, i64>,
}

impl Key {
    fn unit() -> Key {
        Key { pows: BTreeMap::new(), exp_arg: Expr::zero(), others: BTreeMap::new() }
    }
}

type HyperSum = BTreeMap<Key, RationalFunction>;

/// Integer part of the real rational component of the exponent.
fn integer_part(e: &Scalar) -> i64 {
    use num_traits::ToPrimitive;
    e.base().re.floor().to_integer().to_i64().unwrap_or(0)
}

fn key_mul(a: &Key, b: &Key, v: &Symbol) -> Result<(Key, RationalFunction), AlgebraError> {
    let mut coeff = RationalFunction::one(v.clone());
    let mut pows = a.pows.clone();
    for (base, e) in &b.pows {
        let s = match pows.get(base) {
            Some(x) => x.try_add(e)?,
            None => e.clone(),
        };
        pows.insert(base.clone(), s);
    }
    let mut out_pows = BTreeMap::new();
    for (base, e) in pows {
        let n = integer_part(&e);
        let frac = e.try_sub(&Scalar::int(n))?;
        if n != 0 {
            coeff = coeff.try_mul(&base.powi(n)?)?;
        }
        if !frac.is_zero() {
            out_pows.insert(base, frac);
        }
    }
    let mut others = a.others.clone();
    for (x, n) in &b.others {
        *others.entry(x.clone()).or_insert(0) += n;
    }
    others.retain(|_, n| *n != 0);
    let exp_arg = &a.exp_arg + &b.exp_arg;
    Ok((Key { pows: out_pows, exp_arg, others }, coeff))
}

fn single(k: Key, c: RationalFunction) -> HyperSum {
    let mut m = HyperSum::new();
    if !c.is_zero() {
        m.insert(k, c);
    }
    m
}

fn sum_into(acc: &mut HyperSum, k: Key, c: RationalFunction) -> Result<(), AlgebraError> {
    let nv = match acc.get(&k) {
        Some(x) => x.try_add(&c)?,
        None => c,
    };
    if nv.is_zero() {
        acc.remove(&k);
    } else {
        acc.insert(k, nv);
    }
    Ok(())
}

fn hyper_mul(a: &HyperSum, b: &HyperSum, v: &Symbol) -> Result<HyperSum, AlgebraError> {
    let mut out = HyperSum::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            let (k, c) = key_mul(ka, kb, v)?;
            sum_into(&mut out, k, c.try_mul(ca)?.try_mul(cb)?)?;
        }
    }
    Ok(out)
}

fn atom(e: &Expr, v: &Symbol) -> HyperSum {
    let mut k = Key::unit();
    k.others.insert(e.clone(), 1);
    single(k, RationalFunction::one(v.clone()))
}

fn decompose(e: &Expr, v: &Symbol) -> Result<HyperSum, AlgebraError> {
    if let Some(r) = to_rational_res(e, v)? {
        return Ok(single(Key::unit(), r));
    }
    match e.node() {
        Node::Add(ts) => {
            let mut acc = HyperSum::new();
            for t in ts {
                for (k, c) in decompose(t, v)? {
                    sum_into(&mut acc, k, c)?;
                }
            }
            Ok(acc)
        }
        Node::Mul(fs) => {
            let mut acc = single(Key::unit(), RationalFunction::one(v.clone()));
            for f in fs {
                acc = hyper_mul(&acc, &decompose(f, v)?, v)?;
            }
            Ok(acc)
        }
        Node::Pow(b, p) => {
            if let Some(n) = p.as_i64() {
                let hb = decompose(b, v)?;
                if n > 0 {
                    let mut acc = single(Key::unit(), RationalFunction::one(v.clone()));
                    for _ in 0..n {
                        acc = hyper_mul(&acc, &hb, v)?;
                    }
                    return Ok(acc);
                }
                if hb.len() == 1 {
                    let (k, c) = hb.into_iter().next().unwrap();
                    let mut inv = Key::unit();
                    for (base, e) in &k.pows {
                        inv.pows.insert(base.clone(), -e);
                    }
                    inv.exp_arg = -&k.exp_arg;
                    for (x, m) in &k.others {
                        inv.others.insert(x.clone(), -m);
                    }
                    let (kk, cc) = key_mul(&Key::unit(), &inv, v)?;
                    let coeff = cc.try_mul(&c.powi(-1)?)?;
                    let mut acc = single(kk, coeff);
                    let base = acc.clone();
                    for _ in 1..(-n) {
                        acc = hyper_mul(&acc, &base, v)?;
                    }
                    return Ok(acc);
                }
                return Ok(atom(e, v));
            }
            match to_rational_res(b, v)? {
                Some(r) => {
                    let mut k = Key::unit();
                    k.pows.insert(r, p.clone());
                    let (kk, c) = key_mul(&Key::unit(), &k, v)?;
                    Ok(single(kk, c))
                }
                None => Ok(atom(e, v)),
            }
        }
        Node::Func(Func::Exp, a) => {
            let mut k = Key::unit();
            k.exp_arg = a.clone();
            Ok(single(k, RationalFunction::one(v.clone())))
        }
        _ => Ok(atom(e, v)),
    }
}

/// Some(true) when the expression is identically zero as a function of `v`,
/// Some(false) when the decomposition has a nonzero coefficient (which, for
/// independent monomials, means it is not zero), None when the arithmetic
/// left the supported field.
pub fn is_zero_exact(e: &Expr, v: &Symbol) -> Option<bool> {
    decompose(e, v).ok().map(|m| m.values().all(|c| c.is_zero()))
}

/// Number of distinct monomials, for diagnostics.
pub fn monomial_count(e: &Expr, v: &Symbol) -> Option<usize> {
    decompose(e, v).ok().map(|m| m.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sym;

    #[test]
    fn kovacic_style_residual_vanishes() {
        // y = e^{arctan τ}(τ+1)(1+τ²)^{1/2} solves y'' = r·y with
        // r = (2τ²+4)/(1+τ²)²
        let v = sym("tau");
        let t = Expr::var("tau");
        let q = &Expr::one() + &t.powi(2);
        let y = Expr::exp(Expr::arctan(t.clone())) * (&t + &Expr::one()) * q.sqrt();
        let r = (t.powi(2).scale(&Scalar::int(2)) + Expr::int(4)) * q.powi(-2);
        let res = y.diff(&v).diff(&v) - r * y;
        assert_eq!(is_zero_exact(&res, &v), Some(true));
    }

    #[test]
    fn nonzero_detected() {
        let v = sym("tau");
        let t = Expr::var("tau");
        let e = Expr::exp(t.clone()) - Expr::exp(t.scale(&Scalar::int(2)));
        assert_eq!(is_zero_exact(&e, &v), Some(false));
    }

    #[test]
    fn rational_round_trip() {
        let v = sym("tau");
        let t = Expr::var("tau");
        let e = t.scale(&Scalar::int(4)) * (Expr::one() + t.powi(2)).recip();
        let r = to_rational(&e, &v).unwrap();
        assert_eq!(rational_to_expr(&r), e);
    }
}
