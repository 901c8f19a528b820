//! Antiderivatives: rational functions exactly, exponentials of rational
//! integrals in closed form, and a few substitutions in the time variable.

use std::collections::BTreeMap;

use super::eval::{bind, eval_complex};
use super::expr::{Expr, Func, Node};
use super::hyper::{poly_to_expr, rational_to_expr, to_rational};
use super::rewrite::{Family, TrigRewrite};
use crate::algebra::{partial_fractions, AlgebraError, Polynomial, RationalFunction, Scalar, Symbol, Q};

/// Pieces of ∫R: a rational part, logarithms and arctangents.
#[derive(Clone, Debug)]
struct RationalIntegral {
    rational: RationalFunction,
    /// c·log(L), L a polynomial with a real-looking leading shape
    logs: Vec<(Scalar, Polynomial)>,
    /// w·arctan((τ − a)/b)
    arctans: Vec<(Scalar, Scalar, Scalar)>,
}

fn decompose_integral(f: &RationalFunction) -> Result<RationalIntegral, AlgebraError> {
    let v = f.var().clone();
    let pf = partial_fractions(f)?;
    // polynomial part
    let mut cs = vec![Scalar::zero()];
    for (k, c) in pf.polynomial_part.coeffs().iter().enumerate() {
        cs.push(c.try_div(&Scalar::int(k as i64 + 1))?);
    }
    let mut rational = RationalFunction::from_poly(Polynomial::new(v.clone(), cs));
    let mut residues: Vec<(Scalar, Scalar)> = Vec::new();
    for t in &pf.terms {
        if t.order == 1 {
            residues.push((t.root.clone(), t.coefficient.clone()));
        } else {
            let m = t.order as i64;
            let c = t.coefficient.try_div(&Scalar::int(1 - m))?;
            let term = RationalFunction::new(
                Polynomial::constant(v.clone(), c),
                Polynomial::linear_root(v.clone(), &t.root).pow((m - 1) as u32),
            )?;
            rational = rational.try_add(&term)?;
        }
    }
    let mut logs = Vec::new();
    let mut arctans = Vec::new();
    let mut used = vec![false; residues.len()];
    for i in 0..residues.len() {
        if used[i] {
            continue;
        }
        let (p, c1) = residues[i].clone();
        let a = p.real_part();
        let b = p.imag_part();
        if !b.is_zero() {
            let pc = p.conj();
            if let Some(j) = (0..residues.len()).find(|&j| !used[j] && j != i && residues[j].0 == pc) {
                used[i] = true;
                used[j] = true;
                let c2 = residues[j].1.clone();
                // orient so that b > 0
                let (b, c1, c2) = if b_positive(&b) { (b, c1, c2) } else { (-&b, c2, c1) };
                let u = c1.try_add(&c2)?.try_div(&Scalar::int(2))?;
                let w = Scalar::i().try_mul(&c1.try_sub(&c2)?)?;
                // (τ − a)² + b²
                let lin = Polynomial::linear_root(v.clone(), &a);
                let quad = lin.mul(&lin).add(&Polynomial::constant(v.clone(), b.try_mul(&b)?));
                if !u.is_zero() {
                    logs.push((u, quad));
                }
                if !w.is_zero() {
                    arctans.push((w, a, b));
                }
                continue;
            }
        }
        used[i] = true;
        logs.push((c1, Polynomial::linear_root(v.clone(), &p)));
    }
    Ok(RationalIntegral { rational, logs, arctans })
}

fn b_positive(b: &Scalar) -> bool {
    b.to_complex().re > 0.0
}

fn arctan_expr(v: &Symbol, a: &Scalar, b: &Scalar) -> Result<Expr, AlgebraError> {
    let binv = b.inv()?;
    Ok(Expr::arctan((Expr::var_sym(v) - Expr::constant(a.clone())).scale(&binv)))
}

/// ∫f dτ for f ∈ K(τ), complex-conjugate logarithm pairs merged into
/// log((τ−a)²+b²) and arctan((τ−a)/b).
pub fn integrate_rational(f: &RationalFunction) -> Result<Expr, AlgebraError> {
    let v = f.var().clone();
    let ri = decompose_integral(f)?;
    let mut terms = vec![rational_to_expr(&ri.rational)];
    for (c, l) in &ri.logs {
        terms.push(Expr::log(poly_to_expr(l)).scale(c));
    }
    for (w, a, b) in &ri.arctans {
        terms.push(arctan_expr(&v, a, b)?.scale(w));
    }
    Ok(Expr::add(terms))
}

/// exp(∫f dτ) with logarithms turned into powers. Real linear factors that
/// share a non-integer exponent are grouped into one polynomial power.
pub fn exp_integral(f: &RationalFunction) -> Result<Expr, AlgebraError> {
    let v = f.var().clone();
    let ri = decompose_integral(f)?;
    let mut factors = vec![Expr::exp(rational_to_expr(&ri.rational))];
    let mut grouped: BTreeMap<Scalar, Polynomial> = BTreeMap::new();
    for (c, l) in ri.logs {
        let linear_real = l.degree() == Some(1) && l.coeff(0).is_real();
        if linear_real && c.as_i64().is_none() {
            let e = grouped.entry(c).or_insert_with(|| Polynomial::one(v.clone()));
            *e = e.try_mul(&l)?;
        } else {
            factors.push(Expr::pow(&poly_to_expr(&l), c));
        }
    }
    for (c, l) in grouped {
        factors.push(Expr::pow(&poly_to_expr(&l), c));
    }
    for (w, a, b) in &ri.arctans {
        factors.push(Expr::exp(arctan_expr(&v, a, b)?.scale(w)));
    }
    Ok(Expr::mul(factors))
}

/// Q with Q' + kQ = P, by undetermined coefficients (k ≠ 0).
fn poly_exp_antiderivative(p: &Polynomial, k: &Scalar) -> Result<Polynomial, AlgebraError> {
    let kinv = k.inv()?;
    let mut out = Polynomial::zero(p.var().clone());
    let mut d = p.clone();
    let mut sign = Scalar::one();
    let mut kp = kinv.clone();
    while !d.is_zero() {
        out = out.add(&d.scale(&sign.try_mul(&kp)?));
        d = d.derivative();
        sign = -&sign;
        kp = kp.try_mul(&kinv)?;
    }
    Ok(out)
}

/// A term P(t)·e^{kt} with constant k, when it has that shape.
fn poly_times_exp(term: &Expr, t: &Symbol) -> Option<(Polynomial, Scalar)> {
    let (c, r) = term.split_coeff();
    let factors: Vec<Expr> = match r.node() {
        Node::Mul(fs) => fs.clone(),
        _ if r.is_one() => vec![],
        _ => vec![r.clone()],
    };
    let mut k = Scalar::zero();
    let mut rest = Vec::new();
    for f in factors {
        match f.node() {
            Node::Func(Func::Exp, a) => {
                let (kk, ra) = a.split_coeff();
                if ra.as_var() != Some(t) {
                    return None;
                }
                k = k.try_add(&kk).ok()?;
            }
            _ => rest.push(f),
        }
    }
    if k.is_zero() {
        return None;
    }
    let poly = to_rational(&Expr::mul(rest).scale(&c), t)?;
    if !poly.is_polynomial() {
        return None;
    }
    let inv = poly.den().coeff(0).inv().ok()?;
    Some((poly.num().scale(&inv), k))
}

fn integrate_term(term: &Expr, t: &Symbol) -> Option<Expr> {
    if !term.contains_var(t) {
        return Some(term * &Expr::var_sym(t));
    }
    if let Some(r) = to_rational(term, t) {
        return integrate_rational(&r).ok();
    }
    if let Some((p, k)) = poly_times_exp(term, t) {
        let q = poly_exp_antiderivative(&p, &k).ok()?;
        return Some(poly_to_expr(&q) * Expr::exp(Expr::var_sym(t).scale(&k)));
    }
    None
}

/// ∫f dt by substitution u = sin(kt), cos(kt) or e^{kt}: f/(du/dt) must be
/// rational in u.
fn integrate_by_substitution(f: &Expr, t: &Symbol) -> Option<Expr> {
    let ks = super::rewrite::linear_arguments(f, t)?;
    let u = crate::algebra::sym("u_");
    for k in ks.iter() {
        for fam in [Family::Sine, Family::Cosine, Family::Exponential, Family::Tangent] {
            let rw = TrigRewrite::new(fam, k.clone(), t, &u);
            let Ok(fr) = rw.rewrite(f) else { continue };
            let Ok(g) = rw.div(&fr, &rw.dtau()) else { continue };
            if !g.r1.is_zero() {
                continue;
            }
            let Ok(anti) = integrate_rational(&g.r0) else { continue };
            let back = rw.back_substitute(&anti);
            if back.contains_var(&u) {
                continue;
            }
            return Some(back);
        }
    }
    None
}

/// Replace log(L) by log(−L) where L is negative at the sample point; the two
/// differ by a constant and the result stays real there.
fn realify_logs(e: &Expr, t: &Symbol, sample: f64) -> Expr {
    e.transform(&mut |x| match x.node() {
        Node::Func(Func::Log, a) => {
            let b = bind(&[(t, sample)]);
            match eval_complex(a, &b) {
                Ok(z) if z.re < 0.0 && z.im.abs() < 1e-12 * z.re.abs().max(1.0) => Expr::log(-a),
                _ => x,
            }
        }
        _ => x,
    })
}

/// ∫f dt: rational, polynomial·exponential (termwise), substitution, and
/// finally an unevaluated integral from `lower`.
pub fn integrate_time(f: &Expr, t: &Symbol, lower: Q, sample: f64) -> Expr {
    let f = super::simplify::expand(f);
    if let Some(r) = to_rational(&f, t) {
        if let Ok(e) = integrate_rational(&r) {
            return realify_logs(&e, t, sample);
        }
    }
    let terms: Vec<Expr> = match f.node() {
        Node::Add(ts) => ts.clone(),
        _ => vec![f.clone()],
    };
    let termwise: Option<Vec<Expr>> = terms.iter().map(|x| integrate_term(x, t)).collect();
    if let Some(parts) = termwise {
        return realify_logs(&Expr::add(parts), t, sample);
    }
    if let Some(e) = integrate_by_substitution(&f, t) {
        return realify_logs(&e, t, sample);
    }
    Expr::integral(f, t, lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, sym};
    use crate::liouville::hyper::is_zero_exact;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        let v = sym("tau");
        RationalFunction::new(Polynomial::from_ints(v.clone(), num), Polynomial::from_ints(v, den)).unwrap()
    }

    #[test]
    fn log_of_quadratic() {
        let f = rf(&[0, 2], &[1, 0, 1]);
        let e = integrate_rational(&f).unwrap();
        let tau = Expr::var("tau");
        assert_eq!(e, Expr::log(Expr::one() + tau.powi(2)));
    }

    #[test]
    fn arctan_appears() {
        let f = rf(&[1], &[1, 0, 1]);
        let e = integrate_rational(&f).unwrap();
        assert_eq!(e, Expr::arctan(Expr::var("tau")));
    }

    #[test]
    fn derivative_recovers_integrand() {
        let v = sym("tau");
        let f = rf(&[3, -1, 4, 0, 2], &[0, 1, 0, 2, 0, 1]);
        let e = integrate_rational(&f).unwrap();
        let back = e.diff(&v) - rational_to_expr(&f);
        assert_eq!(is_zero_exact(&back, &v), Some(true));
    }

    #[test]
    fn exp_integral_groups_surd_roots() {
        let v = sym("tau");
        // τ/(τ²−4) → (τ²−4)^{1/2}
        let f = rf(&[0, 1], &[-4, 0, 1]);
        let e = exp_integral(&f).unwrap();
        let tau = Expr::var("tau");
        assert_eq!(e, (tau.powi(2) - Expr::int(4)).sqrt());
        let _ = v;
    }

    #[test]
    fn time_integrals() {
        let t = sym("t");
        let tt = Expr::var("t");
        // t·e^{2t}
        let f = &tt * &Expr::exp(tt.scale(&Scalar::int(2)));
        let g = integrate_time(&f, &t, q(1), 0.5);
        assert!(!g.contains_integral());
        let d = g.diff(&t) - f;
        assert_eq!(is_zero_exact(&d, &t), Some(true));
        // −1/(cos t sin² t) by u = sin t
        let f = -(Expr::cos(tt.clone()) * Expr::sin(tt.clone()).powi(2)).recip();
        let g = integrate_time(&f, &t, q(1), 0.5);
        assert!(!g.contains_integral(), "{g}");
        for x in [0.3, 0.7, 1.1] {
            let h = 1e-5;
            let num = (g.eval_at(&t, x + h).unwrap() - g.eval_at(&t, x - h).unwrap()) / (2.0 * h);
            let want = f.eval_at(&t, x).unwrap();
            assert!((num - want).norm() < 1e-5, "{x}: {num} vs {want}");
            assert!(g.eval_at(&t, x).unwrap().im.abs() < 1e-12);
        }
    }
}
