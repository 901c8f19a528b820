use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::poles::PoleAnalysis;
use super::{residual_is_zero, KovacicError, Witness};
use crate::algebra::{poly_gcd, solve_linear, AlgebraError, GaussianRational, LinearSolution, Polynomial, RationalFunction, Scalar, Symbol, Q};
use crate::liouville::{exp_integral, integrate_time, poly_to_expr, rational_to_expr, Expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Clone, Debug)]
pub struct Case1Attempt {
    pub n: usize,
    /// one sign per pole, in the order of the pole analysis
    pub signs: Vec<Sign>,
    pub sign_infinity: Sign,
    pub omega: Option<RationalFunction>,
    pub p: Option<Polynomial>,
    /// set when the attempt could not be carried out exactly
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Case1Data {
    /// (α_c^+, α_c^−) per pole
    pub alphas: Vec<(Scalar, Scalar)>,
    pub alpha_infinity: (Scalar, Scalar),
    /// every assignment with n ∈ ℤ≥0, ascending in n
    pub attempts: Vec<Case1Attempt>,
}

#[derive(Clone, Debug)]
pub struct Case2Attempt {
    pub n: usize,
    pub e: Vec<i64>,
    pub e_infinity: i64,
    pub theta: RationalFunction,
    pub p: Option<Polynomial>,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Case2Data {
    pub e_sets: Vec<Vec<i64>>,
    pub e_infinity: Vec<i64>,
    pub attempts: Vec<Case2Attempt>,
}

type Found = Option<(Witness, Expr, Expr)>;

fn signs(k: usize) -> Vec<Vec<Sign>> {
    (0..1usize << k)
        .map(|mask| (0..k).map(|j| if mask >> j & 1 == 0 { Sign::Plus } else { Sign::Minus }).collect())
        .collect()
}

fn pick(pair: &(Scalar, Scalar), s: Sign) -> &Scalar {
    match s {
        Sign::Plus => &pair.0,
        Sign::Minus => &pair.1,
    }
}

/// (1 ± √(1+4b))/2
fn alpha_pair(b: &Scalar) -> Result<(Scalar, Scalar), AlgebraError> {
    let s = (&Scalar::one() + &(&Scalar::int(4) * b)).sqrt()?;
    let half = Scalar::frac(1, 2);
    Ok((&half * &(&Scalar::one() + &s), &half * &(&Scalar::one() - &s)))
}

/// Σ sign·x as a natural number, if it is one. Surd parts are collected per
/// radicand, so cancellation between poles is seen even across radicands.
fn natural_sum(terms: &[(&Scalar, bool)]) -> Option<usize> {
    let mut base = GaussianRational::zero();
    let mut surds: BTreeMap<BigInt, GaussianRational> = BTreeMap::new();
    for (x, positive) in terms {
        let (b, s) = if *positive { (x.base().clone(), x.surd_coeff().clone()) } else { (-x.base(), -x.surd_coeff()) };
        base = &base + &b;
        if let Some(d) = x.radicand() {
            let e = surds.entry(d.clone()).or_insert_with(GaussianRational::zero);
            *e = &*e + &s;
        }
    }
    if surds.values().any(|g| !g.is_zero()) || !base.im.is_zero() || !base.re.is_integer() || base.re.is_negative() {
        return None;
    }
    base.re.to_integer().try_into().ok()
}

fn monomial(v: &Symbol, k: usize) -> Polynomial {
    Polynomial::x(v.clone()).pow(k as u32)
}

/// A monic P of degree n with Σ_j coeffs[j]·∂^jP = 0, from the linear system
/// on its n lower coefficients. The returned P is checked by substitution.
pub fn monic_solution(coeffs: &[RationalFunction], n: usize) -> Result<Option<Polynomial>, AlgebraError> {
    let v = coeffs[0].var().clone();
    let apply = |p: &Polynomial| -> Result<RationalFunction, AlgebraError> {
        let mut acc = RationalFunction::zero(v.clone());
        let mut d = p.clone();
        for c in coeffs {
            acc = acc.try_add(&c.try_mul(&RationalFunction::from_poly(d.clone()))?)?;
            d = d.derivative();
        }
        Ok(acc)
    };
    let images = (0..=n).map(|k| apply(&monomial(&v, k))).collect::<Result<Vec<_>, _>>()?;
    let mut common = Polynomial::one(v.clone());
    for im in &images {
        let g = poly_gcd(&common, im.den())?;
        common = common.try_mul(&im.den().exact_div(&g)?)?;
    }
    let nums = images
        .iter()
        .map(|im| im.num().try_mul(&common.exact_div(im.den())?))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = nums.iter().filter_map(|p| p.degree()).max().map_or(0, |d| d + 1);
    let candidate = if n == 0 || rows == 0 {
        monomial(&v, n)
    } else {
        let a: Vec<Vec<Scalar>> = (0..rows).map(|i| (0..n).map(|k| nums[k].coeff(i)).collect()).collect();
        let rhs: Vec<Scalar> = (0..rows).map(|i| -nums[n].coeff(i)).collect();
        match solve_linear(&a, &rhs)? {
            LinearSolution::Unique(mut c) | LinearSolution::Parametric { particular: mut c, .. } => {
                c.push(Scalar::one());
                Polynomial::new(v.clone(), c)
            }
            LinearSolution::Inconsistent => return Ok(None),
        }
    };
    Ok(apply(&candidate)?.is_zero().then_some(candidate))
}

pub fn run_case1(pa: &PoleAnalysis, r: &RationalFunction) -> Result<Case1Data, KovacicError> {
    let v = r.var().clone();
    if let Some(c) = &pa.constant {
        // [√r]_∞ = √c, n = 0
        let s = c.sqrt()?;
        let attempts = [(Sign::Plus, s.clone()), (Sign::Minus, -&s)]
            .into_iter()
            .map(|(sg, w)| {
                let omega = RationalFunction::constant(v.clone(), w);
                let p = case1_polynomial(&omega, r, 0);
                let (p, note) = split(p);
                Case1Attempt { n: 0, signs: vec![], sign_infinity: sg, omega: Some(omega), p, note }
            })
            .collect();
        return Ok(Case1Data { alphas: vec![], alpha_infinity: (s.clone(), -&s), attempts });
    }
    let alphas = pa
        .poles
        .iter()
        .map(|p| if p.order == 1 { Ok((Scalar::one(), Scalar::zero())) } else { alpha_pair(&p.b) })
        .collect::<Result<Vec<_>, _>>()?;
    let alpha_infinity = alpha_pair(&pa.b_infinity)?;
    let mut plans = Vec::new();
    for sg_inf in [Sign::Plus, Sign::Minus] {
        for sg in signs(pa.poles.len()) {
            let mut terms = vec![(pick(&alpha_infinity, sg_inf), true)];
            terms.extend(alphas.iter().zip(&sg).map(|(a, s)| (pick(a, *s), false)));
            if let Some(n) = natural_sum(&terms) {
                plans.push((n, sg, sg_inf));
            }
        }
    }
    plans.sort_by_key(|p| p.0);
    let attempts = plans
        .into_par_iter()
        .map(|(n, sg, sg_inf)| {
            let omega = pa.poles.iter().zip(&alphas).zip(&sg).try_fold(RationalFunction::zero(v.clone()), |acc, ((pole, a), s)| {
                acc.try_add(&RationalFunction::simple_pole(v.clone(), &pole.location, 1, pick(a, *s).clone()))
            });
            match omega {
                Ok(omega) => {
                    let (p, note) = split(case1_polynomial(&omega, r, n));
                    Case1Attempt { n, signs: sg, sign_infinity: sg_inf, omega: Some(omega), p, note }
                }
                Err(e) => Case1Attempt { n, signs: sg, sign_infinity: sg_inf, omega: None, p: None, note: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(Case1Data { alphas, alpha_infinity, attempts })
}

fn split(p: Result<Option<Polynomial>, AlgebraError>) -> (Option<Polynomial>, Option<String>) {
    match p {
        Ok(p) => (p, None),
        Err(e) => (None, Some(e.to_string())),
    }
}

/// ∂²P + 2ω∂P + (∂ω + ω² − r)P = 0
fn case1_polynomial(omega: &RationalFunction, r: &RationalFunction, n: usize) -> Result<Option<Polynomial>, AlgebraError> {
    let c0 = omega.derivative()?.try_add(&omega.try_mul(omega)?)?.try_sub(r)?;
    let c1 = omega.try_scale(&Scalar::int(2))?;
    monic_solution(&[c0, c1, RationalFunction::one(r.var().clone())], n)
}

/// The derivative of log(P e^{∫ω}).
fn log_derivative(omega: &RationalFunction, p: &Polynomial) -> Result<RationalFunction, AlgebraError> {
    omega.try_add(&RationalFunction::new(p.derivative(), p.clone())?)
}

impl Case1Data {
    pub fn d(&self) -> BTreeSet<usize> {
        self.attempts.iter().map(|a| a.n).collect()
    }
    pub fn omega_candidates(&self) -> Vec<RationalFunction> {
        self.attempts.iter().filter_map(|a| a.omega.clone()).collect()
    }
    pub fn succeeded(&self) -> bool {
        self.attempts.iter().any(|a| a.p.is_some())
    }

    /// First success in ascending n, and a second solution: another success
    /// with a different logarithmic derivative, or reduction of order.
    pub fn solution(&self, r: &RationalFunction) -> Result<Found, KovacicError> {
        let mut found: Vec<(&RationalFunction, &Polynomial, RationalFunction, Expr)> = Vec::new();
        for a in &self.attempts {
            let (Some(omega), Some(p)) = (&a.omega, &a.p) else { continue };
            let ld = log_derivative(omega, p)?;
            if found.iter().any(|f| f.2 == ld) {
                continue;
            }
            let y = poly_to_expr(p) * exp_integral(omega)?;
            if residual_is_zero(&y, r) == Some(false) {
                continue;
            }
            found.push((omega, p, ld, y));
            if found.len() == 2 {
                break;
            }
        }
        let Some(first) = found.first() else { return Ok(None) };
        let witness = Witness::Case1 { omega: first.0.clone(), p: first.1.clone() };
        let y1 = first.3.clone();
        let y2 = match found.get(1) {
            Some(f) => f.3.clone(),
            None => reduction_of_order(&y1, r),
        };
        Ok(Some((witness, y1, y2)))
    }
}

/// A rational point away from the poles of r where y does not vanish.
fn regular_point(y: &Expr, r: &RationalFunction) -> Q {
    let v = r.var();
    (1..40)
        .map(|k| Q::from_integer(k.into()))
        .find(|x| {
            let xf = crate::algebra::q_to_f64(x);
            !r.den().eval(&Scalar::from_q(x.clone())).is_zero() && y.eval_at(v, xf).is_ok_and(|z| z.norm() > 1e-8)
        })
        .unwrap_or_else(|| Q::from_integer(1.into()))
}

/// y₁∫y₁^{−2}
fn reduction_of_order(y1: &Expr, r: &RationalFunction) -> Expr {
    let v = r.var();
    let x0 = regular_point(y1, r);
    let sample = crate::algebra::q_to_f64(&x0) + 0.5;
    y1.clone() * integrate_time(&y1.powi(-2), v, x0, sample)
}

/// √f when f is a square in K(τ).
pub(crate) fn sqrt_rational(f: &RationalFunction) -> Result<Option<RationalFunction>, AlgebraError> {
    let (Some(n), Some(d)) = (sqrt_poly(f.num())?, sqrt_poly(f.den())?) else { return Ok(None) };
    Ok(Some(RationalFunction::new(n, d)?))
}

fn sqrt_poly(p: &Polynomial) -> Result<Option<Polynomial>, AlgebraError> {
    let v = p.var().clone();
    if p.is_zero() {
        return Ok(Some(p.clone()));
    }
    let mut s = Polynomial::one(v);
    for (f, k) in p.square_free()? {
        if k % 2 == 1 {
            return Ok(None);
        }
        s = s.try_mul(&f.pow((k / 2) as u32))?;
    }
    let c = p.lc().sqrt()?;
    Ok(Some(s.scale(&c)))
}

pub fn run_case2(pa: &PoleAnalysis, r: &RationalFunction) -> Result<Case2Data, KovacicError> {
    let v = r.var().clone();
    if pa.constant.is_some() {
        return Ok(Case2Data { e_sets: vec![], e_infinity: vec![], attempts: vec![] });
    }
    let e_set = |b: &Scalar| -> Result<Vec<i64>, AlgebraError> {
        let s = (&Scalar::one() + &(&Scalar::int(4) * b)).sqrt()?;
        let mut out: Vec<i64> = [0, 2, -2]
            .iter()
            .filter_map(|k| (&Scalar::int(2) + &(&Scalar::int(*k) * &s)).as_i64())
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    };
    let e_sets = pa
        .poles
        .iter()
        .map(|p| if p.order == 1 { Ok(vec![4]) } else { e_set(&p.b) })
        .collect::<Result<Vec<_>, _>>()?;
    let e_infinity = e_set(&pa.b_infinity)?;
    let mut plans = Vec::new();
    for &ei in &e_infinity {
        let mut choices: Vec<Vec<i64>> = vec![vec![]];
        for set in &e_sets {
            choices = choices.into_iter().flat_map(|c| set.iter().map(move |e| [c.clone(), vec![*e]].concat())).collect();
        }
        for e in choices {
            let twice = ei - e.iter().sum::<i64>();
            if twice >= 0 && twice % 2 == 0 {
                plans.push(((twice / 2) as usize, e, ei));
            }
        }
    }
    plans.sort_by_key(|p| p.0);
    let attempts = plans
        .into_par_iter()
        .map(|(n, e, ei)| {
            let theta = pa.poles.iter().zip(&e).fold(RationalFunction::zero(v.clone()), |acc, (pole, ec)| {
                acc.add(&RationalFunction::simple_pole(v.clone(), &pole.location, 1, Scalar::frac(*ec, 2)))
            });
            let (p, note) = split(case2_polynomial(&theta, r, n));
            Case2Attempt { n, e, e_infinity: ei, theta, p, note }
        })
        .collect();
    Ok(Case2Data { e_sets, e_infinity, attempts })
}

/// ∂³P + 3θ∂²P + (3∂θ + 3θ² − 4r)∂P + (∂²θ + 3θ∂θ + θ³ − 4rθ − 2∂r)P = 0
fn case2_polynomial(theta: &RationalFunction, r: &RationalFunction, n: usize) -> Result<Option<Polynomial>, AlgebraError> {
    let k = |n: i64| Scalar::int(n);
    let dt = theta.derivative()?;
    let t2 = theta.try_mul(theta)?;
    let c2 = theta.try_scale(&k(3))?;
    let c1 = dt.try_scale(&k(3))?.try_add(&t2.try_scale(&k(3))?)?.try_sub(&r.try_scale(&k(4))?)?;
    let c0 = dt
        .derivative()?
        .try_add(&theta.try_mul(&dt)?.try_scale(&k(3))?)?
        .try_add(&t2.try_mul(theta)?)?
        .try_sub(&r.try_mul(theta)?.try_scale(&k(4))?)?
        .try_sub(&r.derivative()?.try_scale(&k(2))?)?;
    monic_solution(&[c0, c1, c2, RationalFunction::one(r.var().clone())], n)
}

impl Case2Data {
    pub fn d(&self) -> BTreeSet<usize> {
        self.attempts.iter().map(|a| a.n).collect()
    }
    pub fn succeeded(&self) -> bool {
        self.attempts.iter().any(|a| a.p.is_some())
    }

    /// φ = θ + P'/P, the discriminant Δ = 4r − φ² − 2φ' and, when Δ is a
    /// square, ω± = (φ ± √Δ)/2, the roots of ω² − φω + ½(φ' + φ² − 2r) = 0.
    pub fn phi_and_omegas(&self, r: &RationalFunction) -> Result<Option<(RationalFunction, RationalFunction, Option<(RationalFunction, RationalFunction)>)>, KovacicError> {
        let Some(a) = self.attempts.iter().find(|a| a.p.is_some()) else { return Ok(None) };
        let p = a.p.as_ref().expect("checked");
        let phi = a.theta.try_add(&RationalFunction::new(p.derivative(), p.clone())?)?;
        let disc = r
            .try_scale(&Scalar::int(4))?
            .try_sub(&phi.try_mul(&phi)?)?
            .try_sub(&phi.derivative()?.try_scale(&Scalar::int(2))?)?;
        let half = Scalar::frac(1, 2);
        let roots = match sqrt_rational(&disc)? {
            Some(s) => Some((
                phi.try_add(&s)?.try_scale(&half)?,
                phi.try_sub(&s)?.try_scale(&half)?,
            )),
            None => None,
        };
        Ok(Some((phi, disc, roots)))
    }

    pub fn solution(&self, r: &RationalFunction) -> Result<Found, KovacicError> {
        let Some((phi, disc, roots)) = self.phi_and_omegas(r)? else { return Ok(None) };
        let a = self.attempts.iter().find(|a| a.p.is_some()).expect("phi exists");
        let p = a.p.clone().expect("checked");
        let v = r.var();
        match roots {
            Some((wp, wm)) => {
                let y1 = exp_integral(&wp)?;
                let y2 = if wp == wm { reduction_of_order(&y1, r) } else { exp_integral(&wm)? };
                let witness = Witness::Case2 { theta: a.theta.clone(), p, phi, omegas: vec![wp, wm] };
                Ok(Some((witness, y1, y2)))
            }
            None => {
                // ω algebraic of degree two: e^{∫ω} = e^{½∫φ}·e^{±½∫√Δ}
                let base = exp_integral(&phi.try_scale(&Scalar::frac(1, 2))?)?;
                let root = rational_to_expr(&disc).sqrt();
                let x0 = regular_point(&Expr::one(), r);
                let half = Scalar::frac(1, 2);
                let y = |s: Scalar| base.clone() * Expr::exp(Expr::integral(root.scale(&(&s * &half)), v, x0.clone()));
                let witness = Witness::Case2 { theta: a.theta.clone(), p, phi, omegas: vec![] };
                Ok(Some((witness, y(Scalar::one()), y(-Scalar::one()))))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sym;
    use crate::kovacic::analyze_poles;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        let v = sym("tau");
        RationalFunction::new(Polynomial::from_ints(v.clone(), num), Polynomial::from_ints(v, den)).unwrap()
    }

    #[test]
    fn natural_sums() {
        let s = Scalar::surd(GaussianRational::from_q(crate::algebra::qf(1, 2)), 3);
        let a = &Scalar::frac(1, 2) + &s;
        assert_eq!(natural_sum(&[(&a, true), (&a, false)]), Some(0));
        assert_eq!(natural_sum(&[(&a, true)]), None);
        assert_eq!(natural_sum(&[(&Scalar::int(3), true), (&Scalar::int(1), false)]), Some(2));
        assert_eq!(natural_sum(&[(&Scalar::int(1), true), (&Scalar::int(3), false)]), None);
    }

    #[test]
    fn d_set_soundness() {
        for r in [rf(&[2], &[0, 0, 1]), rf(&[-1], &[0, 0, 1]), rf(&[4, 0, 2], &[1, 0, 2, 0, 1])] {
            let pa = analyze_poles(&r).unwrap();
            let c1 = run_case1(&pa, &r).unwrap();
            for a in &c1.attempts {
                let mut terms = vec![(pick(&c1.alpha_infinity, a.sign_infinity), true)];
                terms.extend(c1.alphas.iter().zip(&a.signs).map(|(x, s)| (pick(x, *s), false)));
                assert_eq!(natural_sum(&terms), Some(a.n));
            }
        }
    }

    #[test]
    fn euler_minus_one() {
        let r = rf(&[-1], &[0, 0, 1]);
        let pa = analyze_poles(&r).unwrap();
        let c1 = run_case1(&pa, &r).unwrap();
        assert_eq!(c1.d(), BTreeSet::from([0]));
        let (w, y1, y2) = c1.solution(&r).unwrap().unwrap();
        let Witness::Case1 { omega, p } = w else { panic!() };
        assert!(p.is_constant());
        // ω = s/τ with s² − s + 1 = 0
        let s = omega.num().lc().try_div(&omega.den().lc()).unwrap();
        assert!((&(&s * &s) - &s + Scalar::one()).is_zero());
        assert_eq!(residual_is_zero(&y1, &r), Some(true));
        assert_eq!(residual_is_zero(&y2, &r), Some(true));
    }

    #[test]
    fn e_sets_filter_integers() {
        let r = rf(&[4, 0, 2], &[1, 0, 2, 0, 1]);
        let pa = analyze_poles(&r).unwrap();
        let c2 = run_case2(&pa, &r).unwrap();
        assert_eq!(c2.e_sets, vec![vec![2], vec![2]]);
        assert_eq!(c2.e_infinity, vec![-4, 2, 8]);
        assert_eq!(c2.d(), BTreeSet::from([2]));
        // b = 3/16: √(1+4b) = √7/2 gives no integers besides 2
        let r = RationalFunction::new(
            Polynomial::constant(sym("tau"), Scalar::frac(3, 16)),
            Polynomial::from_ints(sym("tau"), &[0, 0, 1]),
        )
        .unwrap();
        let pa = analyze_poles(&r).unwrap();
        assert_eq!(run_case2(&pa, &r).unwrap().e_sets, vec![vec![2]]);
    }

    #[test]
    fn squares() {
        let p = Polynomial::from_ints(sym("tau"), &[1, 0, 1]);
        let sq = RationalFunction::new(p.mul(&p).scale(&Scalar::int(4)), Polynomial::from_ints(sym("tau"), &[0, 0, 1])).unwrap();
        let s = sqrt_rational(&sq).unwrap().unwrap();
        assert_eq!(s.try_mul(&s).unwrap(), sq);
        assert!(sqrt_rational(&rf(&[0, 1], &[1])).unwrap().is_none());
    }
}
