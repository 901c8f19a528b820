use std::collections::BTreeMap;

use num_complex::Complex64;

use super::expr::{Expr, Func, Node};
use crate::algebra::{q_to_f64, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("singularity while evaluating {0}")]
    EvaluationSingularity(String),
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("quadrature did not converge for {0}")]
    Quadrature(String),
}

pub type Bindings = BTreeMap<Symbol, Complex64>;

pub fn bind(pairs: &[(&Symbol, f64)]) -> Bindings {
    pairs.iter().map(|(s, v)| ((*s).clone(), Complex64::new(*v, 0.0))).collect()
}

const TINY: f64 = 1e-12;

/// Principal-branch evaluation in complex doubles.
pub fn eval_complex(e: &Expr, env: &Bindings) -> Result<Complex64, EvalError> {
    match e.node() {
        Node::Const(c) => Ok(c.to_complex()),
        Node::Var(s) => env.get(s).copied().ok_or_else(|| EvalError::Unbound(s.to_string())),
        Node::Add(ts) => ts.iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| Ok(acc + eval_complex(t, env)?)),
        Node::Mul(fs) => fs.iter().try_fold(Complex64::new(1.0, 0.0), |acc, f| Ok(acc * eval_complex(f, env)?)),
        Node::Pow(b, p) => {
            let bv = eval_complex(b, env)?;
            if let Some(n) = p.as_i64() {
                if n < 0 && bv.norm() < TINY {
                    return Err(EvalError::EvaluationSingularity(e.to_string()));
                }
                return Ok(if n >= 0 { bv.powi(n as i32) } else { bv.inv().powi((-n) as i32) });
            }
            if bv.norm() < TINY {
                if p.as_rational().is_some_and(|x| num_traits::Signed::is_positive(x)) {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                return Err(EvalError::EvaluationSingularity(e.to_string()));
            }
            if let Some(r) = p.as_rational() {
                if *r.denom() == 2.into() {
                    let s = bv.sqrt();
                    let k = q_to_f64(&(r * crate::algebra::q(2))) as i32;
                    return Ok(s.powi(k));
                }
            }
            Ok((p.to_complex() * bv.ln()).exp())
        }
        Node::Func(f, a) => {
            let x = eval_complex(a, env)?;
            let sing = || EvalError::EvaluationSingularity(e.to_string());
            Ok(match f {
                Func::Exp => x.exp(),
                Func::Log => {
                    if x.norm() < TINY {
                        return Err(sing());
                    }
                    x.ln()
                }
                Func::Arctan => {
                    if (x * x + 1.0).norm() < TINY {
                        return Err(sing());
                    }
                    x.atan()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => {
                    if x.cos().norm() < TINY {
                        return Err(sing());
                    }
                    x.tan()
                }
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
            })
        }
        Node::Integral { integrand, var, lower, upper } => {
            let hi = eval_complex(upper, env)?;
            let lo = Complex64::new(q_to_f64(lower), 0.0);
            quadrature(integrand, var, lo, hi, env)
        }
    }
}

/// Composite 10-point Gauss–Legendre on the straight segment lo→hi, with
/// panel doubling until two successive estimates agree.
fn quadrature(f: &Expr, var: &Symbol, lo: Complex64, hi: Complex64, env: &Bindings) -> Result<Complex64, EvalError> {
    const X: [f64; 5] = [0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845, 0.9739065285171717];
    const W: [f64; 5] = [0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806, 0.0666713443086881];
    let mut local = env.clone();
    let mut estimate = |panels: usize| -> Result<Complex64, EvalError> {
        let h = (hi - lo) / panels as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = lo + h * (p as f64 + 0.5);
            for k in 0..5 {
                for s in [-1.0, 1.0] {
                    local.insert(var.clone(), mid + h * 0.5 * s * X[k]);
                    sum += eval_complex(f, &local)? * W[k];
                }
            }
        }
        Ok(sum * h * 0.5)
    };
    let mut prev = estimate(4)?;
    let mut panels = 8;
    while panels <= 4096 {
        let cur = estimate(panels)?;
        if (cur - prev).norm() <= 1e-13 * (1.0 + cur.norm()) {
            return Ok(cur);
        }
        prev = cur;
        panels *= 2;
    }
    if prev.is_finite() {
        Ok(prev)
    } else {
        Err(EvalError::Quadrature(f.to_string()))
    }
}

impl Expr {
    pub fn eval_at(&self, v: &Symbol, x: f64) -> Result<Complex64, EvalError> {
        let mut env = Bindings::new();
        env.insert(v.clone(), Complex64::new(x, 0.0));
        eval_complex(self, &env)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sym;

    #[test]
    fn ince_mu0_value() {
        let t = Expr::var("t");
        let mu = Expr::sinh(t.clone()) * Expr::cos(t.clone()) + Expr::cosh(t.clone()) * Expr::sin(t.clone());
        let v = mu.eval_at(&sym("t"), std::f64::consts::FRAC_PI_4).unwrap();
        let expect = (std::f64::consts::FRAC_PI_4.sinh() + std::f64::consts::FRAC_PI_4.cosh()) / 2f64.sqrt();
        assert!((v.re - expect).abs() < 1e-14 && v.im.abs() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        let t = Expr::var("t");
        let e = Expr::sin(t).recip();
        assert!(matches!(e.eval_at(&sym("t"), 0.0), Err(EvalError::EvaluationSingularity(_))));
    }

    #[test]
    fn integral_node() {
        let t = Expr::var("t");
        let e = Expr::integral(Expr::cos(t), &sym("t"), crate::algebra::q(0));
        let v = e.eval_at(&sym("t"), 1.0).unwrap();
        assert!((v.re - 1f64.sin()).abs() < 1e-13);
    }
}
