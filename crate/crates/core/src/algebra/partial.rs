use super::poly::Polynomial;
use super::ratfunc::RationalFunction;
use super::roots::find_roots;
use super::scalar::Scalar;
use super::AlgebraError;

/// coefficient/(τ − root)^order
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfTerm {
    pub root: Scalar,
    pub order: usize,
    pub coefficient: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub polynomial_part: Polynomial,
    pub terms: Vec<PfTerm>,
}

impl PartialFractions {
    /// Sum everything back into a single rational function.
    pub fn resum(&self) -> Result<RationalFunction, AlgebraError> {
        let v = self.polynomial_part.var().clone();
        let mut acc = RationalFunction::from_poly(self.polynomial_part.clone());
        for t in &self.terms {
            let term = RationalFunction::new(
                Polynomial::constant(v.clone(), t.coefficient.clone()),
                Polynomial::linear_root(v.clone(), &t.root).pow(t.order as u32),
            )?;
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }

    /// Coefficient of (τ − c)^{−k}, zero when absent.
    pub fn coefficient(&self, root: &Scalar, order: usize) -> Scalar {
        self.terms
            .iter()
            .find(|t| &t.root == root && t.order == order)
            .map(|t| t.coefficient.clone())
            .unwrap_or_else(Scalar::zero)
    }
}

/// Full decomposition over the roots of the denominator, via a Taylor shift
/// of num/h at each pole where den = (τ − c)^m·h.
pub fn partial_fractions(f: &RationalFunction) -> Result<PartialFractions, AlgebraError> {
    let v = f.var().clone();
    let (poly, rem) = f.num().div_rem(f.den())?;
    let mut terms = Vec::new();
    if !rem.is_zero() {
        for (c, m) in find_roots(f.den())? {
            let lin = Polynomial::linear_root(v.clone(), &c);
            let h = f.den().exact_div(&lin.pow(m as u32))?;
            let ns = rem.shift(&c);
            let hs = h.shift(&c);
            // series of ns/hs at 0, first m coefficients
            let h0inv = hs.coeff(0).inv()?;
            let mut g: Vec<Scalar> = Vec::with_capacity(m);
            for k in 0..m {
                let mut s = ns.coeff(k);
                for (j, gj) in g.iter().enumerate() {
                    s = s.try_sub(&gj.try_mul(&hs.coeff(k - j))?)?;
                }
                g.push(s.try_mul(&h0inv)?);
            }
            for (k, gk) in g.into_iter().enumerate() {
                if !gk.is_zero() {
                    terms.push(PfTerm { root: c.clone(), order: m - k, coefficient: gk });
                }
            }
        }
    }
    terms.sort_by(|a, b| a.root.cmp(&b.root).then(a.order.cmp(&b.order)));
    Ok(PartialFractions { polynomial_part: poly, terms })
}

#[cfg(test)]
mod tests {
    use super::super::poly::sym;
    use super::*;

    #[test]
    fn ince_reduced_form() {
        let t = sym("t");
        let num = Polynomial::from_ints(t.clone(), &[4, 0, 2]);
        let d = Polynomial::from_ints(t.clone(), &[1, 0, 1]);
        let r = RationalFunction::new(num, d.mul(&d)).unwrap();
        let pf = partial_fractions(&r).unwrap();
        assert!(pf.polynomial_part.is_zero());
        assert_eq!(pf.coefficient(&Scalar::i(), 2), Scalar::frac(-1, 2));
        assert_eq!(pf.coefficient(&-Scalar::i(), 2), Scalar::frac(-1, 2));
        assert_eq!(pf.resum().unwrap(), r);
    }

    #[test]
    fn simple_log() {
        let t = sym("t");
        let r = RationalFunction::one(t.clone()).div(&RationalFunction::x(t));
        let pf = partial_fractions(&r).unwrap();
        assert_eq!(pf.terms, vec![PfTerm { root: Scalar::zero(), order: 1, coefficient: Scalar::one() }]);
    }

    #[test]
    fn mixed_real_and_gaussian() {
        let t = sym("t");
        let r = RationalFunction::new(
            Polynomial::from_ints(t.clone(), &[2, 2, 2]),
            Polynomial::from_ints(t.clone(), &[1, 1, 1, 1]),
        )
        .unwrap();
        let pf = partial_fractions(&r).unwrap();
        assert_eq!(pf.coefficient(&Scalar::int(-1), 1), Scalar::one());
        assert_eq!(pf.resum().unwrap(), r);
    }
}
