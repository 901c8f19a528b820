//! Gaussian rationals and their quadratic extensions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // very large numerators: fall back on a ratio of floats
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// re + im·i with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: Q,
    pub im: Q,
}

impl GaussianRational {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }
    pub fn zero() -> Self {
        Self::new(Q::zero(), Q::zero())
    }
    pub fn one() -> Self {
        Self::new(Q::one(), Q::zero())
    }
    pub fn i() -> Self {
        Self::new(Q::zero(), Q::one())
    }
    pub fn from_q(re: Q) -> Self {
        Self::new(re, Q::zero())
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }
    pub fn norm(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }
    pub fn scale(&self, k: &Q) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}
impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}
impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}
impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

/// Square-free decomposition n = s²·d of a positive integer.
fn square_free_split(n: &BigUint) -> (BigUint, BigUint) {
    let mut rest = n.clone();
    let mut s = BigUint::one();
    let mut d = BigUint::one();
    let mut p = BigUint::from(2u32);
    let limit = BigUint::from(1_000_000u32);
    while &p * &p <= rest && p <= limit {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        if e % 2 == 1 {
            d *= &p;
        }
        p += 1u32;
    }
    if rest > BigUint::one() {
        let r = rest.sqrt();
        if &r * &r == rest {
            s *= r;
        } else {
            d *= rest;
        }
    }
    (s, d)
}

/// √x for x ≥ 0 rational, as (coefficient, square-free radicand).
fn sqrt_nonneg_q(x: &Q) -> (Q, BigInt) {
    if x.is_zero() {
        return (Q::zero(), BigInt::one());
    }
    let n = x.numer().magnitude() * x.denom().magnitude();
    let (s, d) = square_free_split(&n);
    let coeff = Q::new(BigInt::from(s), x.denom().clone());
    (coeff, BigInt::from(d))
}

/// base + surd·√radicand; radicand is a square-free integer ≥ 2, or 1 when
/// the surd part is absent.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    base: GaussianRational,
    surd: GaussianRational,
    radicand: BigInt,
}

pub type AlgebraicScalar = Scalar;

impl Scalar {
    fn make(base: GaussianRational, surd: GaussianRational, radicand: BigInt) -> Self {
        if surd.is_zero() || radicand.is_one() {
            let b = if radicand.is_one() { &base + &surd } else { base };
            return Self { base: b, surd: GaussianRational::zero(), radicand: BigInt::one() };
        }
        Self { base, surd, radicand }
    }
    pub fn from_gaussian(g: GaussianRational) -> Self {
        Self::make(g, GaussianRational::zero(), BigInt::one())
    }
    pub fn from_q(x: Q) -> Self {
        Self::from_gaussian(GaussianRational::from_q(x))
    }
    pub fn int(n: i64) -> Self {
        Self::from_q(q(n))
    }
    pub fn frac(n: i64, d: i64) -> Self {
        Self::from_q(qf(n, d))
    }
    pub fn zero() -> Self {
        Self::int(0)
    }
    pub fn one() -> Self {
        Self::int(1)
    }
    pub fn i() -> Self {
        Self::from_gaussian(GaussianRational::i())
    }
    pub fn complex(re: Q, im: Q) -> Self {
        Self::from_gaussian(GaussianRational::new(re, im))
    }
    /// coeff·√d; d must be a positive integer (it is reduced to square-free form).
    pub fn surd(coeff: GaussianRational, d: u64) -> Self {
        let (s, dd) = square_free_split(&BigUint::from(d));
        let c = coeff.scale(&Q::from_integer(BigInt::from(s)));
        Self::make(GaussianRational::zero(), c, BigInt::from(dd))
    }

    pub fn base(&self) -> &GaussianRational {
        &self.base
    }
    pub fn surd_coeff(&self) -> &GaussianRational {
        &self.surd
    }
    /// The radicand when a surd part is present.
    pub fn radicand(&self) -> Option<&BigInt> {
        if self.surd.is_zero() {
            None
        } else {
            Some(&self.radicand)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.surd.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.surd.is_zero() && self.base == GaussianRational::one()
    }
    pub fn as_gaussian(&self) -> Option<&GaussianRational> {
        if self.surd.is_zero() {
            Some(&self.base)
        } else {
            None
        }
    }
    pub fn as_rational(&self) -> Option<&Q> {
        self.as_gaussian().filter(|g| g.is_real()).map(|g| &g.re)
    }
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|x| x.is_integer()).map(|x| x.to_integer())
    }
    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }
    /// Real in the sense of the embedding √d > 0.
    pub fn is_real(&self) -> bool {
        self.base.is_real() && self.surd.is_real()
    }
    /// Real and negative (used for sign normalization when printing).
    pub fn is_negative_real(&self) -> bool {
        self.is_real() && self.to_complex().re < 0.0
    }

    pub fn compatible(&self, o: &Scalar) -> bool {
        match (self.radicand(), o.radicand()) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
    fn common_radicand(&self, o: &Scalar) -> Result<BigInt, AlgebraError> {
        match (self.radicand(), o.radicand()) {
            (Some(a), Some(b)) if a != b => Err(AlgebraError::IncompatibleSurds(a.clone(), b.clone())),
            (Some(a), _) => Ok(a.clone()),
            (_, Some(b)) => Ok(b.clone()),
            _ => Ok(BigInt::one()),
        }
    }

    pub fn try_add(&self, o: &Scalar) -> Result<Scalar, AlgebraError> {
        let d = self.common_radicand(o)?;
        Ok(Self::make(&self.base + &o.base, &self.surd + &o.surd, d))
    }
    pub fn try_sub(&self, o: &Scalar) -> Result<Scalar, AlgebraError> {
        self.try_add(&-o)
    }
    pub fn try_mul(&self, o: &Scalar) -> Result<Scalar, AlgebraError> {
        let d = self.common_radicand(o)?;
        let dq = GaussianRational::from_q(Q::from_integer(d.clone()));
        let base = &(&self.base * &o.base) + &(&(&self.surd * &o.surd) * &dq);
        let surd = &(&self.base * &o.surd) + &(&self.surd * &o.base);
        Ok(Self::make(base, surd, d))
    }
    pub fn inv(&self) -> Result<Scalar, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        // (a + b√d)⁻¹ = (a − b√d)/(a² − b²d)
        let dq = GaussianRational::from_q(Q::from_integer(self.radicand.clone()));
        let den = &(&self.base * &self.base) - &(&(&self.surd * &self.surd) * &dq);
        let di = den.inv().ok_or(AlgebraError::DivisionByZero)?;
        Ok(Self::make(&self.base * &di, &(-&self.surd) * &di, self.radicand.clone()))
    }
    pub fn try_div(&self, o: &Scalar) -> Result<Scalar, AlgebraError> {
        self.try_mul(&o.inv()?)
    }
    pub fn conj(&self) -> Scalar {
        Self::make(self.base.conj(), self.surd.conj(), self.radicand.clone())
    }
    pub fn real_part(&self) -> Scalar {
        Self::make(
            GaussianRational::from_q(self.base.re.clone()),
            GaussianRational::from_q(self.surd.re.clone()),
            self.radicand.clone(),
        )
    }
    pub fn imag_part(&self) -> Scalar {
        Self::make(
            GaussianRational::from_q(self.base.im.clone()),
            GaussianRational::from_q(self.surd.im.clone()),
            self.radicand.clone(),
        )
    }
    pub fn powi(&self, n: i64) -> Result<Scalar, AlgebraError> {
        if n < 0 {
            return self.inv()?.powi(-n);
        }
        let mut acc = Scalar::one();
        let mut b = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&b)?;
            }
            b = b.try_mul(&b)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Principal square root: positive real part, ties toward non-negative
    /// imaginary part.
    pub fn sqrt(&self) -> Result<Scalar, AlgebraError> {
        let g = self
            .as_gaussian()
            .ok_or_else(|| AlgebraError::UnsupportedFactorization(format!("nested radical √({self})")))?;
        if g.is_zero() {
            return Ok(Scalar::zero());
        }
        if g.im.is_zero() {
            let (c, d) = sqrt_nonneg_q(&g.re.abs());
            let coeff = if g.re.is_negative() {
                GaussianRational::new(Q::zero(), c)
            } else {
                GaussianRational::from_q(c)
            };
            return Ok(Self::make(GaussianRational::zero(), coeff, d));
        }
        let n = g.norm();
        let (m, dm) = sqrt_nonneg_q(&n);
        if !dm.is_one() {
            return Err(AlgebraError::UnsupportedFactorization(format!(
                "√({self}) needs a nested radical"
            )));
        }
        let two = q(2);
        let (u, du) = sqrt_nonneg_q(&((&m + &g.re) / &two));
        let (v, dv) = sqrt_nonneg_q(&((&m - &g.re) / &two));
        let v = if g.im.is_negative() { -v } else { v };
        debug_assert!(u.is_zero() || v.is_zero() || du == dv);
        let d = if u.is_zero() { dv } else { du };
        Ok(Self::make(GaussianRational::zero(), GaussianRational::new(u, v), d))
    }

    pub fn to_complex(&self) -> Complex64 {
        let r = q_to_f64(&Q::from_integer(self.radicand.clone())).sqrt();
        self.base.to_complex() + self.surd.to_complex() * r
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Scalar {
    fn cmp(&self, o: &Self) -> Ordering {
        (&self.base.re, &self.base.im, &self.radicand, &self.surd.re, &self.surd.im).cmp(&(
            &o.base.re,
            &o.base.im,
            &o.radicand,
            &o.surd.re,
            &o.surd.im,
        ))
    }
}

// The std operators panic on incompatible surds; callers that may mix
// radicands use the try_ variants.
impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.try_add(o).expect("incompatible surds")
    }
}
impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.try_sub(o).expect("incompatible surds")
    }
}
impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.try_mul(o).expect("incompatible surds")
    }
}
impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        self.try_div(o).expect("division failed")
    }
}
impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::make(-&self.base, -&self.surd, self.radicand.clone())
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                (&self).$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}
impl From<Q> for Scalar {
    fn from(x: Q) -> Self {
        Scalar::from_q(x)
    }
}

fn lcm_denoms(parts: &[&Q]) -> BigInt {
    parts.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()))
}

fn push_term(out: &mut String, coeff: &BigInt, unit: &str) {
    if coeff.is_zero() {
        return;
    }
    let neg = coeff.is_negative();
    let mag = coeff.abs();
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push(if neg { '-' } else { '+' });
    }
    if unit.is_empty() {
        out.push_str(&mag.to_string());
    } else if mag.is_one() {
        out.push_str(unit);
    } else {
        out.push_str(&format!("{mag}*{unit}"));
    }
}

impl Scalar {
    /// Number of additive terms in the printed numerator (1 for monomials).
    pub fn term_count(&self) -> usize {
        [&self.base.re, &self.base.im, &self.surd.re, &self.surd.im]
            .iter()
            .filter(|x| !x.is_zero())
            .count()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = [&self.base.re, &self.base.im, &self.surd.re, &self.surd.im];
        let den = lcm_denoms(&parts);
        let scaled: Vec<BigInt> = parts
            .iter()
            .map(|p| (*p * Q::from_integer(den.clone())).to_integer())
            .collect();
        let sq = format!("sqrt({})", self.radicand);
        let isq = format!("i*sqrt({})", self.radicand);
        let mut s = String::new();
        push_term(&mut s, &scaled[0], "");
        push_term(&mut s, &scaled[1], "i");
        push_term(&mut s, &scaled[2], &sq);
        push_term(&mut s, &scaled[3], &isq);
        if s.is_empty() {
            s.push('0');
        }
        if den.is_one() {
            write!(f, "{s}")
        } else if self.term_count() > 1 {
            write!(f, "({s})/{den}")
        } else {
            write!(f, "{s}/{den}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_negative_rational_is_imaginary() {
        let s = Scalar::int(-3).sqrt().unwrap();
        assert_eq!(s.to_string(), "i*sqrt(3)");
        assert_eq!(&s * &s, Scalar::int(-3));
        assert_eq!(Scalar::int(-1).sqrt().unwrap(), Scalar::i());
        assert_eq!(Scalar::int(9).sqrt().unwrap(), Scalar::int(3));
    }

    #[test]
    fn sqrt_of_gaussian() {
        let i = Scalar::i();
        let r = i.sqrt().unwrap();
        assert_eq!(&r * &r, i);
        assert!(r.to_complex().re > 0.0);
        let z = Scalar::complex(q(3), q(4));
        assert_eq!(z.sqrt().unwrap(), Scalar::complex(q(2), q(1)));
    }

    #[test]
    fn surd_inverse() {
        let x = &Scalar::int(1) + &Scalar::surd(GaussianRational::i(), 3);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn incompatible_surds_error() {
        let a = Scalar::surd(GaussianRational::one(), 2);
        let b = Scalar::surd(GaussianRational::one(), 3);
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn display() {
        let h = Scalar::complex(qf(1, 2), qf(1, 2));
        assert_eq!(h.to_string(), "(1+i)/2");
        assert_eq!(Scalar::frac(-3, 4).to_string(), "-3/4");
        assert_eq!(Scalar::complex(q(0), q(-1)).to_string(), "-i");
    }
}
