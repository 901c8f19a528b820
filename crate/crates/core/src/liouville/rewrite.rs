//! Rewriting time-domain expressions into ℚ(τ)(s), s² = S(τ), for the
//! substitutions τ = tan νt, e^{νt}, cos νt, sin νt and τ = t.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::expr::{Expr, Func, Node};
use super::hyper::rational_to_expr;
use crate::algebra::{AlgebraError, RationalFunction, Scalar, Symbol, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Tangent,
    Exponential,
    Cosine,
    Sine,
    Identity,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RewriteError {
    #[error("no rewrite rule for subterm {0}")]
    RewriteIncomplete(String),
    #[error("result has odd parity in the radical")]
    OddParity,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// r0 + r1·s
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub r0: RationalFunction,
    pub r1: RationalFunction,
}

#[derive(Clone, Debug)]
pub struct TrigRewrite {
    pub family: Family,
    pub nu: Q,
    pub t: Symbol,
    pub tau: Symbol,
}

impl TrigRewrite {
    pub fn new(family: Family, nu: Q, t: &Symbol, tau: &Symbol) -> Self {
        Self { family, nu, t: t.clone(), tau: tau.clone() }
    }

    fn x(&self) -> RationalFunction {
        RationalFunction::x(self.tau.clone())
    }
    fn c(&self, s: Scalar) -> RationalFunction {
        RationalFunction::constant(self.tau.clone(), s)
    }
    fn nu_expr(&self) -> Expr {
        Expr::rational(self.nu.clone())
    }
    fn t_expr(&self) -> Expr {
        Expr::var_sym(&self.t)
    }

    /// S(τ) = s²
    pub fn s_square(&self) -> RationalFunction {
        let one = self.c(Scalar::one());
        match self.family {
            Family::Tangent => one.div(&one.add(&self.x().mul(&self.x()))),
            Family::Cosine | Family::Sine => one.sub(&self.x().mul(&self.x())),
            Family::Exponential | Family::Identity => one,
        }
    }

    /// τ as a function of t.
    pub fn forward(&self) -> Expr {
        let arg = self.nu_expr() * self.t_expr();
        match self.family {
            Family::Tangent => Expr::tan(arg),
            Family::Exponential => Expr::exp(arg),
            Family::Cosine => Expr::cos(arg),
            Family::Sine => Expr::sin(arg),
            Family::Identity => self.t_expr(),
        }
    }

    /// ∂_t τ written in τ and s.
    pub fn dtau(&self) -> Pair {
        let nu = self.c(Scalar::from_q(self.nu.clone()));
        let zero = self.c(Scalar::zero());
        match self.family {
            Family::Tangent => Pair { r0: nu.mul(&self.c(Scalar::one()).add(&self.x().mul(&self.x()))), r1: zero },
            Family::Exponential => Pair { r0: nu.mul(&self.x()), r1: zero },
            Family::Cosine => Pair { r0: zero, r1: nu.neg() },
            Family::Sine => Pair { r0: zero, r1: nu },
            Family::Identity => Pair { r0: self.c(Scalar::one()), r1: zero },
        }
    }

    /// Principal-branch window of the back substitution.
    pub fn window(&self) -> (f64, f64) {
        let nu = crate::algebra::q_to_f64(&self.nu).abs();
        let pi = std::f64::consts::PI;
        match self.family {
            Family::Tangent | Family::Sine => (-pi / (2.0 * nu), pi / (2.0 * nu)),
            Family::Cosine => (0.0, pi / nu),
            Family::Exponential | Family::Identity => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn pconst(&self, r: RationalFunction) -> Pair {
        Pair { r1: RationalFunction::zero(self.tau.clone()), r0: r }
    }
    pub fn add(&self, a: &Pair, b: &Pair) -> Result<Pair, AlgebraError> {
        Ok(Pair { r0: a.r0.try_add(&b.r0)?, r1: a.r1.try_add(&b.r1)? })
    }
    pub fn mul(&self, a: &Pair, b: &Pair) -> Result<Pair, AlgebraError> {
        let s2 = self.s_square();
        Ok(Pair {
            r0: a.r0.try_mul(&b.r0)?.try_add(&a.r1.try_mul(&b.r1)?.try_mul(&s2)?)?,
            r1: a.r0.try_mul(&b.r1)?.try_add(&a.r1.try_mul(&b.r0)?)?,
        })
    }
    pub fn inv(&self, a: &Pair) -> Result<Pair, AlgebraError> {
        let s2 = self.s_square();
        let norm = a.r0.try_mul(&a.r0)?.try_sub(&a.r1.try_mul(&a.r1)?.try_mul(&s2)?)?;
        Ok(Pair { r0: a.r0.try_div(&norm)?, r1: a.r1.neg().try_div(&norm)? })
    }
    pub fn div(&self, a: &Pair, b: &Pair) -> Result<Pair, AlgebraError> {
        self.mul(a, &self.inv(b)?)
    }
    fn powi(&self, a: &Pair, n: i64) -> Result<Pair, AlgebraError> {
        if n < 0 {
            return self.inv(&self.powi(a, -n)?);
        }
        let mut acc = self.pconst(self.c(Scalar::one()));
        for _ in 0..n {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }
    fn real_part(&self, a: &Pair) -> Result<Pair, AlgebraError> {
        let h = Scalar::frac(1, 2);
        Ok(Pair { r0: a.r0.try_add(&a.r0.conj())?.try_scale(&h)?, r1: a.r1.try_add(&a.r1.conj())?.try_scale(&h)? })
    }
    fn imag_part(&self, a: &Pair) -> Result<Pair, AlgebraError> {
        let h = Scalar::complex(Q::zero(), crate::algebra::qf(-1, 2));
        Ok(Pair { r0: a.r0.try_sub(&a.r0.conj())?.try_scale(&h)?, r1: a.r1.try_sub(&a.r1.conj())?.try_scale(&h)? })
    }

    /// Multiple of ν in a linear argument m·ν·t; None when not an integer multiple.
    fn multiple(&self, arg: &Expr) -> Option<i64> {
        let (k, rest) = arg.split_coeff();
        if rest.as_var() != Some(&self.t) {
            return None;
        }
        let k = k.as_rational()?.clone();
        let m = k / &self.nu;
        m.is_integer().then(|| num_traits::ToPrimitive::to_i64(&m.to_integer())).flatten()
    }

    /// (cos mνt, sin mνt)
    fn circular(&self, m: i64) -> Result<(Pair, Pair), AlgebraError> {
        let zero = RationalFunction::zero(self.tau.clone());
        let one = self.c(Scalar::one());
        let s = Pair { r0: zero.clone(), r1: one.clone() };
        let (c1, s1) = match self.family {
            Family::Tangent => (s.clone(), Pair { r0: zero.clone(), r1: self.x() }),
            Family::Cosine => (self.pconst(self.x()), s.clone()),
            Family::Sine => (s.clone(), self.pconst(self.x())),
            _ => unreachable!(),
        };
        let i = self.pconst(self.c(Scalar::i()));
        let z = self.add(&c1, &self.mul(&i, &s1)?)?;
        let zm = self.powi(&z, m)?;
        Ok((self.real_part(&zm)?, self.imag_part(&zm)?))
    }

    pub fn rewrite(&self, e: &Expr) -> Result<Pair, RewriteError> {
        let bad = || RewriteError::RewriteIncomplete(e.to_string());
        Ok(match e.node() {
            Node::Const(c) => self.pconst(self.c(c.clone())),
            Node::Var(v) if *v == self.t && self.family == Family::Identity => self.pconst(self.x()),
            Node::Var(_) => return Err(bad()),
            Node::Add(ts) => {
                let mut acc = self.pconst(RationalFunction::zero(self.tau.clone()));
                for t in ts {
                    acc = self.add(&acc, &self.rewrite(t)?)?;
                }
                acc
            }
            Node::Mul(fs) => {
                let mut acc = self.pconst(self.c(Scalar::one()));
                for f in fs {
                    acc = self.mul(&acc, &self.rewrite(f)?)?;
                }
                acc
            }
            Node::Pow(b, p) => match p.as_i64() {
                Some(n) => self.powi(&self.rewrite(b)?, n)?,
                None => return Err(bad()),
            },
            Node::Func(f, a) => {
                if let Some(c) = a.as_const() {
                    // constant argument: only exact values are representable
                    let _ = c;
                    return Err(bad());
                }
                let m = self.multiple(a).ok_or_else(bad)?;
                match (self.family, f) {
                    (Family::Exponential, Func::Exp) => self.pconst(self.x().powi(m)?),
                    (Family::Exponential, Func::Cosh | Func::Sinh) => {
                        let p = self.x().powi(m)?;
                        let q = self.x().powi(-m)?;
                        let h = Scalar::frac(1, 2);
                        let v = if *f == Func::Cosh { p.try_add(&q)? } else { p.try_sub(&q)? };
                        self.pconst(v.try_scale(&h)?)
                    }
                    (Family::Tangent | Family::Cosine | Family::Sine, Func::Sin | Func::Cos | Func::Tan) => {
                        let (c, s) = self.circular(m)?;
                        match f {
                            Func::Cos => c,
                            Func::Sin => s,
                            _ => self.div(&s, &c)?,
                        }
                    }
                    _ => return Err(bad()),
                }
            }
            Node::Integral { .. } => return Err(bad()),
        })
    }

    /// Rewrite and insist on a rational result.
    pub fn rewrite_rational(&self, e: &Expr) -> Result<RationalFunction, RewriteError> {
        let p = self.rewrite(e)?;
        if !p.r1.is_zero() {
            return Err(RewriteError::OddParity);
        }
        Ok(p.r0)
    }

    /// Map an expression in τ back to t: special patterns first, then τ ↦ forward.
    pub fn back_substitute(&self, e: &Expr) -> Expr {
        let tau = self.tau.clone();
        let arg = self.nu_expr() * self.t_expr();
        let one_plus = Expr::one() + Expr::var_sym(&tau).powi(2);
        let one_minus = Expr::one() - Expr::var_sym(&tau).powi(2);
        let tau_e = Expr::var_sym(&tau);
        let fam = self.family;
        let patterned = e.transform(&mut |x: Expr| match (fam, x.node()) {
            (Family::Tangent, Node::Func(Func::Arctan, a)) if *a == tau_e => arg.clone(),
            (Family::Tangent, Node::Pow(b, p)) if *b == one_plus => {
                Expr::pow(&Expr::cos(arg.clone()), -&(p * &Scalar::int(2)))
            }
            (Family::Tangent | Family::Sine | Family::Cosine, Node::Pow(b, p)) if is_trig_power(b, &arg) => {
                let Node::Pow(base, k) = b.node() else { unreachable!() };
                Expr::pow(base, k * p)
            }
            (Family::Exponential, Node::Pow(b, p)) if *b == tau_e => Expr::exp(Expr::constant(p.clone()) * arg.clone()),
            (Family::Exponential, Node::Func(Func::Log, a)) if *a == tau_e => arg.clone(),
            (Family::Cosine, Node::Pow(b, p)) if *b == one_minus => {
                Expr::pow(&Expr::sin(arg.clone()), p * &Scalar::int(2))
            }
            (Family::Sine, Node::Pow(b, p)) if *b == one_minus => {
                Expr::pow(&Expr::cos(arg.clone()), p * &Scalar::int(2))
            }
            _ => x,
        });
        let fwd = match fam {
            Family::Tangent => Expr::sin(arg.clone()) / Expr::cos(arg.clone()),
            _ => self.forward(),
        };
        patterned.subs(&tau, &fwd)
    }
}

/// cos(arg)^k or sin(arg)^k: positive on the principal window, so powers combine.
fn is_trig_power(b: &Expr, arg: &Expr) -> bool {
    match b.node() {
        Node::Pow(base, _) => matches!(base.node(), Node::Func(Func::Cos | Func::Sin, a) if a == arg),
        _ => false,
    }
}

/// Rational coefficients k of every k·t appearing as a function argument;
/// None if some argument is not of that shape.
pub fn linear_arguments(e: &Expr, t: &Symbol) -> Option<BTreeSet<Q>> {
    let mut out = BTreeSet::new();
    let mut ok = true;
    collect_args(e, t, &mut out, &mut ok);
    ok.then_some(out)
}

fn collect_args(e: &Expr, t: &Symbol, out: &mut BTreeSet<Q>, ok: &mut bool) {
    if let Node::Func(_, a) = e.node() {
        if a.contains_var(t) {
            let (k, rest) = a.split_coeff();
            match (k.as_rational(), rest.as_var()) {
                (Some(k), Some(v)) if v == t => {
                    out.insert(k.abs());
                }
                _ => *ok = false,
            }
            return;
        }
    }
    for c in e.children() {
        collect_args(&c, t, out, ok);
    }
}

/// Rational gcd of a set of positive rationals.
pub fn rational_gcd(xs: &BTreeSet<Q>) -> Option<Q> {
    use num_integer::Integer;
    let mut it = xs.iter().filter(|x| !x.is_zero());
    let first = it.next()?.clone();
    let mut n = first.numer().clone();
    let mut d = first.denom().clone();
    for x in it {
        n = n.gcd(x.numer());
        d = d.lcm(x.denom());
    }
    Some(Q::new(n, d))
}

/// Pair → expression in τ and the radical √S(τ).
pub fn pair_to_expr(rw: &TrigRewrite, p: &Pair) -> Expr {
    let s = rational_to_expr(&rw.s_square()).sqrt();
    rational_to_expr(&p.r0) + rational_to_expr(&p.r1) * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, sym};

    fn tan_rw() -> TrigRewrite {
        TrigRewrite::new(Family::Tangent, q(1), &sym("t"), &sym("tau"))
    }

    #[test]
    fn double_angle() {
        let rw = tan_rw();
        let t = Expr::var("t");
        let c2 = rw.rewrite_rational(&Expr::cos(t.scale(&Scalar::int(2)))).unwrap();
        let tau = RationalFunction::x(sym("tau"));
        let one = RationalFunction::one(sym("tau"));
        assert_eq!(c2, one.sub(&tau.mul(&tau)).div(&one.add(&tau.mul(&tau))));
        let s2 = rw.rewrite_rational(&Expr::sin(t.scale(&Scalar::int(2)))).unwrap();
        assert_eq!(s2, tau.scale(&Scalar::int(2)).div(&one.add(&tau.mul(&tau))));
    }

    #[test]
    fn tan_is_tau() {
        let rw = tan_rw();
        let r = rw.rewrite_rational(&Expr::tan(Expr::var("t"))).unwrap();
        assert_eq!(r, RationalFunction::x(sym("tau")));
    }

    #[test]
    fn odd_parity_detected() {
        let rw = tan_rw();
        assert!(matches!(rw.rewrite_rational(&Expr::cos(Expr::var("t"))), Err(RewriteError::OddParity)));
    }

    #[test]
    fn back_substitution_of_arctan() {
        let rw = tan_rw();
        let tau = Expr::var("tau");
        let e = Expr::exp(Expr::arctan(tau.clone())) * (&tau + &Expr::one()) * (Expr::one() + tau.powi(2)).powi(-1).sqrt();
        let b = rw.back_substitute(&e);
        let b = super::super::simplify::simplify(&b);
        let t = Expr::var("t");
        let expect = Expr::exp(t.clone()) * Expr::sin(t.clone()) + Expr::exp(t.clone()) * Expr::cos(t.clone());
        assert_eq!(b, expect);
    }
}
