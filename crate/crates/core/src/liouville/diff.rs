use super::expr::{Expr, Func, Node};
use crate::algebra::{Scalar, Symbol};

/// Exact derivative with respect to `v`, canonical on output.
pub fn differentiate(e: &Expr, v: &Symbol) -> Expr {
    if !e.contains_var(v) {
        return Expr::zero();
    }
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(s) => {
            if s == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(ts) => Expr::add(ts.iter().map(|t| differentiate(t, v)).collect()),
        Node::Mul(fs) => {
            let mut terms = Vec::with_capacity(fs.len());
            for k in 0..fs.len() {
                let d = differentiate(&fs[k], v);
                if d.is_zero() {
                    continue;
                }
                let mut prod: Vec<Expr> = fs.clone();
                prod[k] = d;
                terms.push(Expr::mul(prod));
            }
            Expr::add(terms)
        }
        Node::Pow(b, p) => {
            let db = differentiate(b, v);
            let em1 = p - &Scalar::one();
            Expr::mul(vec![Expr::constant(p.clone()), Expr::pow(b, em1), db])
        }
        Node::Func(f, a) => {
            let da = differentiate(a, v);
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Log => a.recip(),
                Func::Arctan => (Expr::one() + a.powi(2)).recip(),
                Func::Sin => Expr::cos(a.clone()),
                Func::Cos => -Expr::sin(a.clone()),
                Func::Tan => Expr::one() + Expr::tan(a.clone()).powi(2),
                Func::Sinh => Expr::cosh(a.clone()),
                Func::Cosh => Expr::sinh(a.clone()),
            };
            outer * da
        }
        Node::Integral { integrand, var, lower, upper } => {
            // Leibniz: f(upper)·upper' + ∫ ∂f/∂v
            let at_upper = integrand.subs(var, upper) * differentiate(upper, v);
            let inner = if var != v && integrand.contains_var(v) {
                Expr::integral_to(differentiate(integrand, v), var, lower.clone(), upper.clone())
            } else {
                Expr::zero()
            };
            at_upper + inner
        }
    }
}

impl Expr {
    pub fn diff(&self, v: &Symbol) -> Expr {
        differentiate(self, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sym;

    #[test]
    fn arctan_derivative() {
        let t = Expr::var("t");
        let d = differentiate(&Expr::arctan(t.clone()), &sym("t"));
        assert_eq!(d, (Expr::one() + t.powi(2)).recip());
    }

    #[test]
    fn product_and_chain() {
        let t = Expr::var("t");
        let e = Expr::sin(t.clone()) * Expr::exp(t.scale(&Scalar::int(2)));
        let d = differentiate(&e, &sym("t"));
        let expect = Expr::cos(t.clone()) * Expr::exp(t.scale(&Scalar::int(2)))
            + Expr::sin(t.clone()) * Expr::exp(t.scale(&Scalar::int(2))).scale(&Scalar::int(2));
        assert_eq!(d, expect);
    }
}
