use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::scalar::Scalar;
use super::AlgebraError;

pub type Symbol = Arc<str>;

pub fn sym(s: &str) -> Symbol {
    Arc::from(s)
}

/// Dense univariate polynomial, coefficients low to high.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    var: Symbol,
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn new(var: Symbol, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { var, coeffs }
    }
    pub fn zero(var: Symbol) -> Self {
        Self::new(var, vec![])
    }
    pub fn constant(var: Symbol, c: Scalar) -> Self {
        Self::new(var, vec![c])
    }
    pub fn one(var: Symbol) -> Self {
        Self::constant(var, Scalar::one())
    }
    /// The indeterminate itself.
    pub fn x(var: Symbol) -> Self {
        Self::new(var, vec![Scalar::zero(), Scalar::one()])
    }
    /// τ − c
    pub fn linear_root(var: Symbol, c: &Scalar) -> Self {
        Self::new(var, vec![-c, Scalar::one()])
    }
    pub fn from_ints(var: Symbol, cs: &[i64]) -> Self {
        Self::new(var, cs.iter().map(|&c| Scalar::int(c)).collect())
    }

    pub fn var(&self) -> &Symbol {
        &self.var
    }
    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }
    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    /// Degree with deg 0 = −∞ mapped to −1.
    pub fn deg_i(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }
    pub fn lc(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(Scalar::zero)
    }
    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    /// Radicands appearing in the coefficients (at most one when well formed).
    pub fn radicands(&self) -> Vec<num_bigint::BigInt> {
        let mut v: Vec<_> = self.coeffs.iter().filter_map(|c| c.radicand().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }
    pub fn has_rational_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_rational().is_some())
    }
    pub fn has_gaussian_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_gaussian().is_some())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, AlgebraError> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).try_add(&o.coeff(k))?);
        }
        Ok(Self::new(self.var.clone(), out))
    }
    pub fn try_mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(self.var.clone()));
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].try_add(&a.try_mul(b)?)?;
            }
        }
        Ok(Self::new(self.var.clone(), out))
    }
    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("incompatible surds")
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("incompatible surds")
    }
    pub fn neg(&self) -> Self {
        Self::new(self.var.clone(), self.coeffs.iter().map(|c| -c).collect())
    }
    pub fn scale(&self, k: &Scalar) -> Self {
        Self::new(self.var.clone(), self.coeffs.iter().map(|c| c * k).collect())
    }
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.var.clone());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().inv().expect("nonzero lc");
        self.scale(&inv)
    }
    pub fn derivative(&self) -> Self {
        let cs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &Scalar::int(k as i64))
            .collect();
        Self::new(self.var.clone(), cs)
    }
    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }
    pub fn try_eval(&self, x: &Scalar) -> Result<Scalar, AlgebraError> {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(x)?.try_add(c)?;
        }
        Ok(acc)
    }
    pub fn eval_complex(&self, x: num_complex::Complex64) -> num_complex::Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| acc * x + c.to_complex())
    }
    /// p(τ + c) as a polynomial in the same variable.
    pub fn shift(&self, c: &Scalar) -> Self {
        let lin = Self::new(self.var.clone(), vec![c.clone(), Scalar::one()]);
        let mut acc = Self::zero(self.var.clone());
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(self.var.clone(), a.clone()));
        }
        acc
    }
    pub fn conj(&self) -> Self {
        Self::new(self.var.clone(), self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), AlgebraError> {
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let dl = d.lc().inv()?;
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(self.var.clone()), self.clone()));
        }
        let mut quo = vec![Scalar::zero(); r.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = r[k + dd].try_mul(&dl)?;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].try_sub(&c.try_mul(dc)?)?;
                }
            }
            quo[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(self.var.clone(), quo), Self::new(self.var.clone(), r)))
    }
    /// Exact quotient; errors when the remainder is nonzero.
    pub fn exact_div(&self, d: &Self) -> Result<Self, AlgebraError> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(AlgebraError::NotDivisible);
        }
        Ok(q)
    }
    pub fn divides(&self, p: &Self) -> bool {
        p.div_rem(self).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    /// Yun's square-free decomposition: returns (f_k, k) with p = lc·Π f_k^k.
    pub fn square_free(&self) -> Result<Vec<(Self, usize)>, AlgebraError> {
        let mut out = Vec::new();
        if self.is_constant() {
            return Ok(out);
        }
        let p = self.monic();
        let dp = p.derivative();
        let mut a = poly_gcd(&p, &dp)?;
        let mut b = p.exact_div(&a)?;
        let mut c = dp.exact_div(&a)?;
        let mut d = c.try_add(&b.derivative().neg())?;
        let mut k = 1;
        while !b.is_constant() {
            a = poly_gcd(&b, &d)?;
            if !a.is_constant() {
                out.push((a.clone(), k));
            }
            b = b.exact_div(&a)?;
            c = d.exact_div(&a)?;
            d = c.try_add(&b.derivative().neg())?;
            k += 1;
        }
        Ok(out)
    }
}

/// Monic gcd; gcd(p, 0) = monic(p).
pub fn poly_gcd(p: &Polynomial, q: &Polynomial) -> Result<Polynomial, AlgebraError> {
    let mut a = p.clone();
    let mut b = q.clone();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b)?;
        a = b;
        b = r;
    }
    Ok(a.monic())
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Polynomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&o.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(o.coeffs.iter().rev()))
            .then_with(|| self.var.cmp(&o.var))
    }
}

fn needs_parens(c: &Scalar) -> bool {
    c.term_count() > 1 || c.to_string().contains('/')
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => self.var.to_string(),
                _ => format!("{}^{}", self.var, k),
            };
            let (neg, mag) = if c.is_negative_real() { (true, -c) } else { (false, c.clone()) };
            let body = if mono.is_empty() {
                if needs_parens(&mag) && !out.is_empty() {
                    format!("({mag})")
                } else {
                    mag.to_string()
                }
            } else if mag.is_one() {
                mono
            } else if needs_parens(&mag) {
                format!("({mag})*{mono}")
            } else {
                format!("{mag}*{mono}")
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            out.push_str(&body);
        }
        write!(f, "{out}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Symbol {
        sym("t")
    }

    #[test]
    fn gcd_examples() {
        let p = Polynomial::from_ints(t(), &[1, 0, 1]);
        let g = poly_gcd(&p.mul(&p), &p).unwrap();
        assert_eq!(g, p);
        let g = poly_gcd(&p, &Polynomial::from_ints(t(), &[-1, 1])).unwrap();
        assert_eq!(g, Polynomial::one(t()));
        let cubic = Polynomial::from_ints(t(), &[-1, 1, -1, 1]);
        assert_eq!(poly_gcd(&cubic, &p).unwrap(), p);
    }

    #[test]
    fn square_free_of_square() {
        let p = Polynomial::from_ints(t(), &[1, 0, 1]);
        let sf = p.mul(&p).mul(&Polynomial::x(t())).square_free().unwrap();
        assert_eq!(sf, vec![(Polynomial::x(t()), 1), (p, 2)]);
    }

    #[test]
    fn shift_matches_eval() {
        let p = Polynomial::from_ints(t(), &[3, -2, 0, 5]);
        let c = Scalar::complex(super::super::scalar::q(1), super::super::scalar::q(2));
        let s = p.shift(&c);
        let x = Scalar::int(7);
        assert_eq!(s.eval(&x), p.eval(&(&x + &c)));
    }

    #[test]
    fn display() {
        let p = Polynomial::from_ints(t(), &[4, 0, 2]);
        assert_eq!(p.to_string(), "2*t^2+4");
    }
}
