//! Riccati triple and Green function of H = a p² + b x² + c(px + xp) from
//! two solutions of the characteristic equation, or directly from a known
//! solution α of the Riccati equation.
//!
//! Conventions (ψ = A·exp(i(αx² + βxy + γy²)) in i∂_tψ = −a∂²ψ + bx²ψ − icψ − 2icx∂ψ):
//!   α' + b + 4cα + 4aα² = 0,  β' + (2c + 4aα)β = 0,  γ' + aβ² = 0,
//!   α₀ = μ₀'/(4aμ₀) − c/(2a),  β₀ = −1/μ₀,  γ₀ = μ₁/(2μ₁(0)μ₀) + c(0)/(2a(0)).

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{solve_linear, LinearSolution, Scalar, Symbol, Q};
use crate::liouville::{integrate_time, simplify, Expr};
use crate::transforms::{characteristic_from_hamiltonian, CharacteristicEq, RiccatiGeneral};
use crate::verify::{linspace, ResidualReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PropagatorError {
    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),
    #[error("{what} has no exact value at t = 0: {expr}")]
    NotExactAtZero { what: String, expr: String },
    #[error("a(0) = 0, the small-t normalization needs a(0) ≠ 0")]
    VanishingA0,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticHamiltonian {
    pub t: Symbol,
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    /// gauge term; never enters a residual
    pub d: Option<Expr>,
}

impl QuadraticHamiltonian {
    pub fn new(t: &Symbol, a: Expr, b: Expr, c: Expr) -> Self {
        QuadraticHamiltonian { t: t.clone(), a, b, c, d: None }
    }

    /// α' = a₀ + a₁α + a₂α² read as α' = −b − 4cα − 4aα².
    pub fn from_riccati(ric: &RiccatiGeneral) -> Self {
        let q = Scalar::frac(-1, 4);
        QuadraticHamiltonian::new(&ric.var, simplify(&ric.a2.scale(&q)), simplify(&-&ric.a0), simplify(&ric.a1.scale(&q)))
    }

    pub fn characteristic(&self) -> CharacteristicEq {
        let mut ch = characteristic_from_hamiltonian(&self.a, &self.b, &self.c, &self.t);
        ch.tau_t = simplify(&ch.tau_t);
        ch.sigma_t = simplify(&ch.sigma_t);
        ch
    }

    pub fn coeffs_at(&self, t: f64) -> Option<[f64; 3]> {
        let f = |e: &Expr| e.eval_at(&self.t, t).ok().map(|z| z.re);
        Some([f(&self.a)?, f(&self.b)?, f(&self.c)?])
    }

    pub fn a0(&self) -> Result<Expr, PropagatorError> {
        let a0 = value_at_zero(&self.a, &self.t, "a")?;
        if a0.is_zero() {
            return Err(PropagatorError::VanishingA0);
        }
        Ok(a0)
    }
}

/// Exact value at t = 0 by substitution, when it is finite and free of t.
pub fn value_at_zero(e: &Expr, t: &Symbol, what: &str) -> Result<Expr, PropagatorError> {
    let v = simplify(&e.subs(t, &Expr::zero()));
    let finite = v.eval_at(t, 0.0).is_ok_and(|z| z.re.is_finite() && z.im.is_finite());
    if v.contains_var(t) || !finite {
        return Err(PropagatorError::NotExactAtZero { what: what.into(), expr: e.to_string() });
    }
    Ok(v)
}

fn scalar_at_zero(e: &Expr, t: &Symbol, what: &str) -> Result<Scalar, PropagatorError> {
    let v = value_at_zero(e, t, what)?;
    v.as_const().cloned().ok_or_else(|| PropagatorError::NotExactAtZero { what: what.into(), expr: v.to_string() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacteristicSolutions {
    #[serde(serialize_with = "as_text")]
    pub mu0: Expr,
    #[serde(serialize_with = "as_text")]
    pub mu1: Expr,
    /// μ₁(0)
    #[serde(serialize_with = "as_text")]
    pub mu1_at_zero: Expr,
    pub window: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiccatiTriple {
    #[serde(serialize_with = "as_text")]
    pub alpha0: Expr,
    #[serde(serialize_with = "as_text")]
    pub beta0: Expr,
    #[serde(serialize_with = "as_text")]
    pub gamma0: Expr,
}

fn as_text<S: serde::Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

/// μ₀ = C₁f + C₂g with μ₀(0) = 0, μ₀'(0) = 2a(0); μ₁ with μ₁(0) = m, μ₁'(0) = 0.
pub fn normalize_solutions(
    general: (&Expr, &Expr),
    h: &QuadraticHamiltonian,
    mu1_at_zero: Scalar,
    window: (f64, f64),
) -> Result<CharacteristicSolutions, PropagatorError> {
    let t = &h.t;
    let (f, g) = general;
    let f0 = scalar_at_zero(f, t, "first solution")?;
    let f1 = scalar_at_zero(&f.diff(t), t, "first solution's derivative")?;
    let g0 = scalar_at_zero(g, t, "second solution")?;
    let g1 = scalar_at_zero(&g.diff(t), t, "second solution's derivative")?;
    let two_a0 = scalar_at_zero(&h.a, t, "a")?.try_mul(&Scalar::int(2)).map_err(|e| PropagatorError::DegenerateBasis(e.to_string()))?;
    if two_a0.is_zero() {
        return Err(PropagatorError::VanishingA0);
    }
    let m = vec![vec![f0, g0], vec![f1, g1]];
    let combine = |rhs: Vec<Scalar>| -> Result<Expr, PropagatorError> {
        match solve_linear(&m, &rhs) {
            Ok(LinearSolution::Unique(c)) => Ok(simplify(&(f.scale(&c[0]) + g.scale(&c[1])))),
            Ok(_) => Err(PropagatorError::DegenerateBasis("the values and slopes at t = 0 are linearly dependent".into())),
            Err(e) => Err(PropagatorError::DegenerateBasis(e.to_string())),
        }
    };
    let mu0 = combine(vec![Scalar::zero(), two_a0])?;
    let mu1 = combine(vec![mu1_at_zero.clone(), Scalar::zero()])?;
    Ok(CharacteristicSolutions { mu0, mu1, mu1_at_zero: Expr::constant(mu1_at_zero), window })
}

pub fn build_triple(cs: &CharacteristicSolutions, h: &QuadraticHamiltonian) -> Result<RiccatiTriple, PropagatorError> {
    let t = &h.t;
    let half = Scalar::frac(1, 2);
    let alpha0 = simplify(
        &(cs.mu0.diff(t) * (h.a.clone() * cs.mu0.clone()).scale(&Scalar::int(4)).recip() - (h.c.clone() * h.a.recip()).scale(&half)),
    );
    let beta0 = simplify(&-cs.mu0.recip());
    let c0 = value_at_zero(&h.c, t, "c")?;
    let a0 = h.a0()?;
    let gamma0 = simplify(&((cs.mu1.clone() * (cs.mu1_at_zero.clone() * cs.mu0.clone()).recip()).scale(&half) + (c0 * a0.recip()).scale(&half)));
    Ok(RiccatiTriple { alpha0, beta0, gamma0 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreenFunction {
    pub triple: RiccatiTriple,
    #[serde(serialize_with = "as_text")]
    pub mu0: Expr,
    #[serde(skip)]
    pub t: Symbol,
}

impl GreenFunction {
    pub fn x() -> Symbol {
        crate::algebra::sym("x")
    }
    pub fn y() -> Symbol {
        crate::algebra::sym("y")
    }

    /// (2πiμ₀)^{−1/2}·exp(i(α₀x² + β₀xy + γ₀y²)), with `pi` as a symbol.
    pub fn expr(&self) -> Expr {
        let (x, y) = (Expr::var("x"), Expr::var("y"));
        let phase = self.triple.alpha0.clone() * x.powi(2) + self.triple.beta0.clone() * x.clone() * y.clone() + self.triple.gamma0.clone() * y.powi(2);
        let pre = (Expr::var("pi") * self.mu0.clone()).scale(&(&Scalar::int(2) * &Scalar::i()));
        Expr::pow(&pre, Scalar::frac(-1, 2)) * Expr::exp(phase.scale(&Scalar::i()))
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> Option<Complex64> {
        let v = |e: &Expr| e.eval_at(&self.t, t).ok();
        let (al, be, ga, mu) = (v(&self.triple.alpha0)?, v(&self.triple.beta0)?, v(&self.triple.gamma0)?, v(&self.mu0)?);
        let pre = (Complex64::i() * 2.0 * std::f64::consts::PI * mu).powf(-0.5);
        Some(pre * (Complex64::i() * (al * x * x + be * x * y + ga * y * y)).exp())
    }
}

pub fn build_green(triple: &RiccatiTriple, mu0: &Expr, t: &Symbol) -> GreenFunction {
    GreenFunction { triple: triple.clone(), mu0: mu0.clone(), t: t.clone() }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub quantity: String,
    /// the stated constant term
    pub predicted: f64,
    /// (t, observed constant) for t = 1e−2, 1e−3, 1e−4
    pub observed: Vec<(f64, f64)>,
    pub deviation: f64,
    /// log₁₀ of the deviation ratio between the last two t
    pub order: f64,
}

/// Constant terms of α₀ − 1/(4a₀t), β₀ + 1/(2a₀t), γ₀ − 1/(4a₀t) as t → 0
/// against −c₀/(2a₀) − a₀'/(8a₀²), a₀'/(4a₀²), c₀/(2a₀) − a₀'/(8a₀²).
pub fn asymptotic_check(triple: &RiccatiTriple, h: &QuadraticHamiltonian) -> Vec<AsymptoticRow> {
    let t = &h.t;
    let at0 = |e: &Expr| e.eval_at(t, 0.0).map(|z| z.re).unwrap_or(f64::NAN);
    let (a0, da0, c0) = (at0(&h.a), at0(&h.a.diff(t)), at0(&h.c));
    let rows = [
        ("alpha0", &triple.alpha0, 1.0 / (4.0 * a0), -c0 / (2.0 * a0) - da0 / (8.0 * a0 * a0)),
        ("beta0", &triple.beta0, -1.0 / (2.0 * a0), da0 / (4.0 * a0 * a0)),
        ("gamma0", &triple.gamma0, 1.0 / (4.0 * a0), c0 / (2.0 * a0) - da0 / (8.0 * a0 * a0)),
    ];
    rows.iter()
        .map(|(name, e, lead, konst)| {
            let observed: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&s| (s, e.eval_at(t, s).map(|z| z.re - lead / s).unwrap_or(f64::NAN)))
                .collect();
            let dev: Vec<f64> = observed.iter().map(|(_, o)| (o - konst).abs()).collect();
            let order = if dev[2] > 0.0 && dev[1] > 0.0 { (dev[1] / dev[2]).log10() } else { f64::INFINITY };
            AsymptoticRow { quantity: name.to_string(), predicted: *konst, observed, deviation: dev[2], order }
        })
        .collect()
}

/// From a solution α of the Riccati equation: μ = K·exp(∫(4aα + 2c)) with
/// K fixing μ'(0) = `slope` (2a(0) by default), β = −1/μ, γ = −∫aβ².
pub fn riccati_direct(alpha: &Expr, h: &QuadraticHamiltonian, slope: Option<Expr>) -> Result<(RiccatiTriple, Expr), PropagatorError> {
    let t = &h.t;
    let mu_tilde = mu_from_alpha(alpha, h);
    let d0 = value_at_zero(&mu_tilde.diff(t), t, "μ'")?;
    let slope = match slope {
        Some(s) => s,
        None => h.a0()?.scale(&Scalar::int(2)),
    };
    let mu = simplify(&(slope * d0.recip() * mu_tilde));
    Ok((triple_from_mu(alpha, &mu, h), mu))
}

/// `riccati_direct` without the t = 0 normalization (K = 1), for α whose μ
/// has no finite slope at 0.
pub fn riccati_direct_unnormalized(alpha: &Expr, h: &QuadraticHamiltonian) -> (RiccatiTriple, Expr) {
    let mu = mu_from_alpha(alpha, h);
    (triple_from_mu(alpha, &mu, h), mu)
}

fn mu_from_alpha(alpha: &Expr, h: &QuadraticHamiltonian) -> Expr {
    let integrand = simplify(&((h.a.clone() * alpha.clone()).scale(&Scalar::int(4)) + h.c.scale(&Scalar::int(2))));
    simplify(&Expr::exp(integrate_time(&integrand, &h.t, Q::from_integer(1.into()), 0.5)))
}

fn triple_from_mu(alpha: &Expr, mu: &Expr, h: &QuadraticHamiltonian) -> RiccatiTriple {
    let beta = simplify(&-mu.recip());
    let gamma = simplify(&-integrate_time(&simplify(&(h.a.clone() * beta.powi(2))), &h.t, Q::from_integer(1.into()), 0.5));
    RiccatiTriple { alpha0: simplify(alpha), beta0: beta, gamma0: gamma }
}

/// Points of `window` (50 of them) where |μ₀| ≥ 0.05.
pub fn sample_points(window: (f64, f64), mu0: &Expr, t: &Symbol) -> Vec<f64> {
    let (lo, hi) = window;
    linspace(lo, hi, 50)
        .into_iter()
        .filter(|&s| mu0.eval_at(t, s).is_ok_and(|z| z.norm() >= 0.05))
        .collect()
}

/// Residuals of the three Riccati-type equations for a triple, with exact
/// derivatives and relative normalization.
pub fn triple_residuals(triple: &RiccatiTriple, h: &QuadraticHamiltonian, points: &[f64], tolerance: f64) -> Vec<ResidualReport> {
    let t = &h.t;
    let da = triple.alpha0.diff(t);
    let db = triple.beta0.diff(t);
    let dg = triple.gamma0.diff(t);
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut gamma = Vec::new();
    let mut skipped = 0;
    for &s in points {
        let ev = |e: &Expr| e.eval_at(t, s).ok();
        let vals = (|| Some((ev(&h.a)?, ev(&h.b)?, ev(&h.c)?, ev(&triple.alpha0)?, ev(&triple.beta0)?, ev(&da)?, ev(&db)?, ev(&dg)?)))();
        let Some((a, b, c, al, be, dal, dbe, dga)) = vals else {
            skipped += 1;
            continue;
        };
        let r7 = [dal, b, 4.0 * c * al, 4.0 * a * al * al];
        let r8 = [dbe, (2.0 * c + 4.0 * a * al) * be];
        let r9 = [dga, a * be * be];
        let rel = |parts: &[Complex64]| {
            let sum: Complex64 = parts.iter().sum();
            sum.norm() / (1.0 + parts.iter().map(|p| p.norm()).sum::<f64>())
        };
        alpha.push(rel(&r7));
        beta.push(rel(&r8));
        gamma.push(rel(&r9));
    }
    let desc = format!("{} points, {} singular", points.len(), skipped);
    vec![
        ResidualReport::new("riccati_alpha", alpha, tolerance, desc.clone(), skipped),
        ResidualReport::new("riccati_beta", beta, tolerance, desc.clone(), skipped),
        ResidualReport::new("riccati_gamma", gamma, tolerance, desc, skipped),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sym;
    use crate::parser::parse_expr;

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn ince() -> QuadraticHamiltonian {
        QuadraticHamiltonian::new(&sym("t"), p("(1+cos(2*t))/2"), p("(1-cos(2*t))/2"), p("sin(2*t)/2"))
    }

    #[test]
    fn ince_normalization() {
        let h = ince();
        let f = p("exp(-t)*(sin(t)-cos(t))");
        let g = p("exp(t)*(sin(t)+cos(t))");
        let cs = normalize_solutions((&f, &g), &h, Scalar::one(), (0.0, 1.5)).unwrap();
        assert_eq!(cs.mu0, simplify(&p("sinh(t)*cos(t)+cosh(t)*sin(t)")));
        assert_eq!(cs.mu1, simplify(&p("sinh(t)*sin(t)+cosh(t)*cos(t)")));
    }

    #[test]
    fn harmonic_normalization() {
        let t = sym("t");
        let h = QuadraticHamiltonian::new(&t, p("1/4"), p("1"), Expr::zero());
        let cs = normalize_solutions((&p("sin(t)"), &p("cos(t)")), &h, Scalar::one(), (0.0, 3.0)).unwrap();
        assert_eq!(cs.mu0, p("sin(t)/2"));
        assert_eq!(cs.mu1, p("cos(t)"));
        let tr = build_triple(&cs, &h).unwrap();
        let b = tr.beta0.eval_at(&t, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((b.re + 2.0).abs() < 1e-12);
        assert!(simplify(&(tr.beta0.clone() * cs.mu0.clone())).is_one() || simplify(&(tr.beta0 * cs.mu0)) == Expr::int(-1));
    }

    #[test]
    fn degenerate_basis() {
        let h = QuadraticHamiltonian::new(&sym("t"), p("1/4"), p("1"), Expr::zero());
        let e = normalize_solutions((&p("sin(t)"), &p("2*sin(t)")), &h, Scalar::one(), (0.0, 3.0)).unwrap_err();
        assert!(matches!(e, PropagatorError::DegenerateBasis(_)));
    }

    #[test]
    fn ince_triple_passes_riccati_and_asymptotics() {
        let h = ince();
        let cs = CharacteristicSolutions {
            mu0: p("sinh(t)*cos(t)+cosh(t)*sin(t)"),
            mu1: p("sinh(t)*sin(t)+cosh(t)*cos(t)"),
            mu1_at_zero: Expr::one(),
            window: (0.05, 1.5),
        };
        let tr = build_triple(&cs, &h).unwrap();
        let pts = sample_points(cs.window, &cs.mu0, &h.t);
        for r in triple_residuals(&tr, &h, &pts, 1e-8) {
            assert!(r.pass, "{} {}", r.name, r.max);
        }
        for row in asymptotic_check(&tr, &h) {
            assert!(row.deviation < 1e-3, "{row:?}");
            assert!(row.order >= 0.9, "{row:?}");
        }
        let g = build_green(&tr, &cs.mu0, &h.t);
        assert!(g.eval(0.3, -0.2, 0.7).unwrap().norm() > 0.0);
    }

    #[test]
    fn toy_one_direct() {
        let t = sym("t");
        let h = QuadraticHamiltonian::new(&t, p("cos(t)/4"), Expr::zero(), Expr::zero());
        let (tr, mu) = riccati_direct(&p("1/sin(t)"), &h, Some(Expr::int(2))).unwrap();
        assert_eq!(mu, simplify(&p("2*sin(t)")));
        assert_eq!(tr.beta0, simplify(&p("-1/(2*sin(t))")));
        assert_eq!(tr.gamma0, simplify(&p("1/(16*sin(t))")));
    }

    #[test]
    fn decoupled_system() {
        let t = sym("t");
        let h = QuadraticHamiltonian::new(&t, p("1/4"), Expr::zero(), Expr::zero());
        let (tr, _) = riccati_direct(&Expr::zero(), &h, Some(Expr::one())).unwrap();
        assert!(tr.beta0.as_const().is_some());
        assert!(!tr.gamma0.diff(&t).contains_var(&t));
    }
}
