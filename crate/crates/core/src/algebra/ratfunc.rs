use std::fmt;

use super::poly::{poly_gcd, Polynomial, Symbol};
use super::scalar::Scalar;
use super::AlgebraError;

/// num/den with gcd 1 and a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(num.var().clone()));
        }
        let g = poly_gcd(&num, &den)?;
        let mut n = num.exact_div(&g)?;
        let mut d = den.exact_div(&g)?;
        let lc = d.lc();
        if !lc.is_one() {
            let inv = lc.inv()?;
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Ok(Self { num: n, den: d })
    }
    pub fn from_poly(p: Polynomial) -> Self {
        let v = p.var().clone();
        Self { num: p, den: Polynomial::one(v) }
    }
    pub fn zero(var: Symbol) -> Self {
        Self { num: Polynomial::zero(var.clone()), den: Polynomial::one(var) }
    }
    pub fn one(var: Symbol) -> Self {
        Self::constant(var, Scalar::one())
    }
    pub fn constant(var: Symbol, c: Scalar) -> Self {
        Self::from_poly(Polynomial::constant(var, c))
    }
    pub fn x(var: Symbol) -> Self {
        Self::from_poly(Polynomial::x(var))
    }
    /// c/(τ − p)^k
    pub fn simple_pole(var: Symbol, p: &Scalar, k: u32, c: Scalar) -> Self {
        let den = Polynomial::linear_root(var.clone(), p).pow(k);
        Self::new(Polynomial::constant(var, c), den).expect("nonzero denominator")
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }
    pub fn den(&self) -> &Polynomial {
        &self.den
    }
    pub fn var(&self) -> &Symbol {
        self.num.var()
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }
    pub fn as_constant(&self) -> Option<Scalar> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.coeff(0))
    }
    /// deg den − deg num: the order of ∞ as a zero.
    pub fn order_at_infinity(&self) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        self.den.deg_i() - self.num.deg_i()
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, AlgebraError> {
        let n = self.num.try_mul(&o.den)?.try_add(&o.num.try_mul(&self.den)?)?;
        Self::new(n, self.den.try_mul(&o.den)?)
    }
    pub fn try_sub(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_add(&o.neg())
    }
    pub fn try_mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        Self::new(self.num.try_mul(&o.num)?, self.den.try_mul(&o.den)?)
    }
    pub fn try_div(&self, o: &Self) -> Result<Self, AlgebraError> {
        if o.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::new(self.num.try_mul(&o.den)?, self.den.try_mul(&o.num)?)
    }
    pub fn try_scale(&self, k: &Scalar) -> Result<Self, AlgebraError> {
        let mut cs = Vec::new();
        for c in self.num.coeffs() {
            cs.push(c.try_mul(k)?);
        }
        Self::new(Polynomial::new(self.var().clone(), cs), self.den.clone())
    }
    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("incompatible surds")
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("incompatible surds")
    }
    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("incompatible surds")
    }
    pub fn div(&self, o: &Self) -> Self {
        self.try_div(o).expect("division failed")
    }
    pub fn scale(&self, k: &Scalar) -> Self {
        self.try_scale(k).expect("incompatible surds")
    }
    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }
    pub fn powi(&self, n: i64) -> Result<Self, AlgebraError> {
        if n < 0 {
            return Self::one(self.var().clone()).try_div(&self.powi(-n)?);
        }
        let mut acc = Self::one(self.var().clone());
        for _ in 0..n {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }
    pub fn derivative(&self) -> Result<Self, AlgebraError> {
        let n = self
            .num
            .derivative()
            .try_mul(&self.den)?
            .try_add(&self.num.try_mul(&self.den.derivative())?.neg())?;
        Self::new(n, self.den.try_mul(&self.den)?)
    }
    pub fn eval(&self, x: &Scalar) -> Result<Scalar, AlgebraError> {
        let d = self.den.try_eval(x)?;
        self.num.try_eval(x)?.try_div(&d)
    }
    pub fn eval_complex(&self, x: num_complex::Complex64) -> num_complex::Complex64 {
        self.num.eval_complex(x) / self.den.eval_complex(x)
    }
    pub fn conj(&self) -> Self {
        Self { num: self.num.conj(), den: self.den.conj() }
    }
    /// Composition self(g).
    pub fn compose(&self, g: &Self) -> Result<Self, AlgebraError> {
        let horner = |p: &Polynomial| -> Result<Self, AlgebraError> {
            let mut acc = Self::zero(g.var().clone());
            for c in p.coeffs().iter().rev() {
                acc = acc.try_mul(g)?.try_add(&Self::constant(g.var().clone(), c.clone()))?;
            }
            Ok(acc)
        };
        horner(&self.num)?.try_div(&horner(&self.den)?)
    }
    /// Re-running normalization is a no-op on any value built here.
    pub fn is_normalized(&self) -> bool {
        Self::new(self.num.clone(), self.den.clone()).map(|r| &r == self).unwrap_or(false)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return write!(f, "{}", self.num);
        }
        let n = if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        write!(f, "{n}/({})", self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::super::poly::sym;
    use super::*;

    #[test]
    fn normalizes() {
        let t = sym("t");
        let n = Polynomial::from_ints(t.clone(), &[-2, 0, 2]);
        let d = Polynomial::from_ints(t.clone(), &[2, -2]);
        let r = RationalFunction::new(n, d).unwrap();
        assert_eq!(r.num(), &Polynomial::from_ints(t.clone(), &[-1, -1]));
        assert!(r.den().is_monic());
        assert!(r.is_polynomial());
    }

    #[test]
    fn derivative_of_inverse() {
        let t = sym("t");
        let x = RationalFunction::x(t.clone());
        let inv = RationalFunction::one(t.clone()).div(&x);
        let d = inv.derivative().unwrap();
        assert_eq!(d, RationalFunction::constant(t, Scalar::int(-1)).div(&x.mul(&x)));
    }
}
