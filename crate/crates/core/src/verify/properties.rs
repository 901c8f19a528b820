//! Seeded property suites, shared by the test targets and the `proptest`
//! subcommand.

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use serde::Serialize;

use super::{fd_first2, fd_second, rk4_riccati_system};
use crate::algebra::{qf, sym, GaussianRational, Polynomial, RationalFunction, Scalar, Q};
use crate::liouville::{exp_integral, integrate_rational, is_zero_exact, rational_to_expr, simplify, to_rational, Expr};
use crate::parser::{parse_expression, pretty_print, Ast, AstKind, BinOp};

#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub cases: u32,
    pub passed: bool,
    pub detail: String,
}

fn runner(seed: u64, cases: u32) -> TestRunner {
    let mut bytes = [0u8; 32];
    for (k, b) in bytes.iter_mut().enumerate() {
        *b = (seed.rotate_left(8 * k as u32) & 0xff) as u8 ^ k as u8;
    }
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

fn outcome<T: std::fmt::Debug>(name: &str, cases: u32, r: Result<(), proptest::test_runner::TestError<T>>) -> PropertyOutcome {
    PropertyOutcome {
        name: name.into(),
        cases,
        passed: r.is_ok(),
        detail: match r {
            Ok(()) => format!("{cases} cases"),
            Err(e) => e.to_string(),
        },
    }
}

fn rational() -> impl Strategy<Value = Q> {
    (-60i64..=60, 1i64..=12).prop_map(|(n, d)| qf(n, d))
}

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (rational(), rational()).prop_map(|(a, b)| GaussianRational::new(a, b))
}

/// Associativity, commutativity, distributivity and a·a⁻¹ = 1 on Gaussian
/// rationals.
pub fn field_axioms(seed: u64, cases: u32) -> PropertyOutcome {
    let r = runner(seed, cases).run(&(gaussian(), gaussian(), gaussian()), |(a, b, c)| {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            let inv = a.inv().ok_or_else(|| TestCaseError::fail("nonzero without inverse"))?;
            prop_assert_eq!(&a * &inv, GaussianRational::one());
        }
        Ok(())
    });
    outcome("field_axioms", cases, r)
}

fn decimal() -> impl Strategy<Value = Q> {
    // terminating decimals only: other rationals have no literal form
    (0i64..=2000, 0u32..=3).prop_map(|(n, k)| qf(n, 10i64.pow(k)))
}

const FUNCS: [&str; 9] = ["sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "arctan"];

fn ast_tree() -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![
        decimal().prop_map(Ast::num),
        prop_oneof![Just("t"), Just("x"), Just("tau"), Just("a0")].prop_map(Ast::var),
        Just(Ast::new(AstKind::Imag)),
    ];
    // depth ≤ 6 counting the leaves
    leaf.prop_recursive(5, 48, 2, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
        prop_oneof![
            inner.clone().prop_map(Ast::neg),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Ast::bin(o, a, b)),
            (0..FUNCS.len(), inner).prop_map(|(k, a)| Ast::call(FUNCS[k], vec![a])),
        ]
    })
}

/// parse(pretty_print(t)) = t on random trees of depth ≤ 6.
pub fn parser_round_trip(seed: u64, cases: u32) -> PropertyOutcome {
    let r = runner(seed, cases).run(&ast_tree(), |a| {
        prop_assert!(a.depth() <= 6);
        let text = pretty_print(&a);
        let back = parse_expression(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, a, "{}", text);
        Ok(())
    });
    outcome("parser_round_trip", cases, r)
}

fn expr_tree() -> impl Strategy<Value = Expr> {
    let t = || Expr::var("t");
    let leaf = prop_oneof![
        3 => Just(t()),
        2 => (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Expr::frac(n, d)),
    ];
    leaf.prop_recursive(4, 32, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), -2i64..=3).prop_map(|(a, n)| a.powi(n)),
            (0usize..5, inner).prop_map(|(k, a)| match k {
                0 => Expr::sin(a),
                1 => Expr::cos(a),
                2 => Expr::exp(a),
                3 => Expr::sinh(a),
                _ => Expr::cosh(a),
            }),
        ]
    })
}

/// simplify∘simplify = simplify, and simplify keeps values to 1e−12
/// relative at 20 points of (0.1, 2).
pub fn simplify_idempotent(seed: u64, cases: u32) -> PropertyOutcome {
    let t = sym("t");
    let r = runner(seed, cases).run(&expr_tree(), |e| {
        let s = simplify(&e);
        prop_assert_eq!(simplify(&s), s.clone(), "{}", e);
        for k in 0..20 {
            let x = 0.1 + 1.9 * (k as f64 + 0.5) / 20.0;
            let (Ok(a), Ok(b)) = (e.eval_at(&t, x), s.eval_at(&t, x)) else { continue };
            if !(a.norm().is_finite() && a.norm() < 1e8) {
                continue;
            }
            let d = (a - b).norm() / a.norm().max(1.0);
            prop_assert!(d <= 1e-12, "{} vs {} at {}: {:e}", e, s, x, d);
        }
        Ok(())
    });
    outcome("simplify_idempotent", cases, r)
}

/// Random integrands with rational linear factors and irreducible quadratic
/// factors (τ−b)² + c² in the denominator.
fn integrand() -> impl Strategy<Value = RationalFunction> {
    let v = sym("tau");
    let lin = prop::collection::vec((-4i64..=4, 1u32..=2), 0..3);
    let quad = prop::option::of((-3i64..=3, 1i64..=3));
    let num = prop::collection::vec(-6i64..=6, 1..5);
    (lin, quad, num).prop_filter_map("zero integrand", move |(lin, quad, num)| {
        let mut den = Polynomial::one(v.clone());
        for (a, k) in lin {
            den = den.mul(&Polynomial::linear_root(v.clone(), &Scalar::int(a)).pow(k));
        }
        if let Some((b, c)) = quad {
            den = den.mul(&Polynomial::from_ints(v.clone(), &[b * b + c * c, -2 * b, 1]));
        }
        let n = Polynomial::from_ints(v.clone(), &num);
        let f = RationalFunction::new(n, den).ok()?;
        (!f.is_zero()).then_some(f)
    })
}

/// Integrands that occur in the built-in runs.
pub fn integration_corpus() -> Vec<RationalFunction> {
    let v = sym("tau");
    let rf = |n: &[i64], d: &[i64]| RationalFunction::new(Polynomial::from_ints(v.clone(), n), Polynomial::from_ints(v.clone(), d)).unwrap();
    vec![
        rf(&[4, 0, 2], &[1, 0, 2, 0, 1]),
        rf(&[0, 4], &[1, 0, 1]),
        rf(&[0, 2], &[1, 0, 1]),
        rf(&[2, -2, 2], &[-1, 1, -1, 1]),
        rf(&[2, 2, 2], &[1, 1, 1, 1]),
        rf(&[0, -18, 0, 2], &[-4, 0, -3, 0, 1]),
        rf(&[0, -38, 0, 2], &[-9, 0, -8, 0, 1]),
        rf(&[2], &[0, 0, 1]),
        rf(&[1], &[0, 1]),
        rf(&[1, 0, 1], &[1]),
    ]
}

fn derivative_matches(f: &RationalFunction) -> Result<(), String> {
    let v = f.var().clone();
    let big_f = integrate_rational(f).map_err(|e| e.to_string())?;
    let res = big_f.diff(&v) - rational_to_expr(f);
    match is_zero_exact(&res, &v) {
        Some(true) => Ok(()),
        other => Err(format!("∂∫({f}) − f = {} ({other:?})", simplify(&res))),
    }
}

/// ∂(∫f) = f exactly, on the built-in corpus and on random integrands; and
/// ∂y/y = ω for y = exp(∫ω) on the corpus.
pub fn differentiate_integrate(seed: u64, cases: u32) -> PropertyOutcome {
    for f in integration_corpus() {
        if let Err(e) = derivative_matches(&f) {
            return PropertyOutcome { name: "differentiate_integrate".into(), cases, passed: false, detail: e };
        }
        let v = f.var().clone();
        let y = match exp_integral(&f) {
            Ok(y) => y,
            Err(e) => return PropertyOutcome { name: "differentiate_integrate".into(), cases, passed: false, detail: e.to_string() },
        };
        let ratio = simplify(&(y.diff(&v) * y.recip()));
        if to_rational(&ratio, &v).as_ref() != Some(&f) {
            return PropertyOutcome {
                name: "differentiate_integrate".into(),
                cases,
                passed: false,
                detail: format!("∂y/y = {ratio} for ω = {f}"),
            };
        }
    }
    let r = runner(seed, cases).run(&integrand(), |f| derivative_matches(&f).map_err(TestCaseError::fail));
    outcome("differentiate_integrate", cases, r)
}

/// Normalizing a rational function again changes nothing: monic
/// denominator, coprime parts.
pub fn normalization_idempotent(seed: u64, cases: u32) -> PropertyOutcome {
    let v = sym("tau");
    let poly = prop::collection::vec(-5i64..=5, 1..5);
    let r = runner(seed, cases).run(&(poly.clone(), poly), |(n, d)| {
        let den = Polynomial::from_ints(v.clone(), &d);
        if den.is_zero() {
            return Ok(());
        }
        let f = RationalFunction::new(Polynomial::from_ints(v.clone(), &n), den).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(f.den().is_monic());
        let again = RationalFunction::new(f.num().clone(), f.den().clone()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(again, f);
        Ok(())
    });
    outcome("normalization_idempotent", cases, r)
}

/// Halving h shrinks the five-point second-derivative error ≥ 8× and the
/// central first-derivative error ≥ 3×, on G-like smooth functions.
pub fn fd_convergence() -> PropertyOutcome {
    let x = sym("x");
    let samples = ["exp(i*x^2/2)*sin(x)", "exp(i*(x^2 - 2*x)/(3))/sqrt(2)", "cos(x)*exp(x/3)"];
    let mut worst: (f64, f64) = (f64::INFINITY, f64::INFINITY);
    for s in samples {
        let e = crate::parser::parse_expr(s).expect("sample parses");
        let f = |p: f64| e.eval_at(&x, p).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let d1 = e.diff(&x);
        let d2 = d1.diff(&x);
        for p in [-0.8, -0.1, 0.4, 0.9] {
            let exact2 = d2.eval_at(&x, p).unwrap();
            let e2 = |h: f64| (fd_second(&f, p, h) - exact2).norm();
            worst.0 = worst.0.min(e2(0.1) / e2(0.05));
            let exact1 = d1.eval_at(&x, p).unwrap();
            let e1 = |h: f64| (fd_first2(&f, p, h) - exact1).norm();
            worst.1 = worst.1.min(e1(0.02) / e1(0.01));
        }
    }
    PropertyOutcome {
        name: "fd_convergence".into(),
        cases: 12,
        passed: worst.0 >= 8.0 && worst.1 >= 3.0,
        detail: format!("smallest error ratio on halving h: ∂² {:.2}, ∂ {:.2}", worst.0, worst.1),
    }
}

/// RK4 on the Riccati system with a known solution: halving the step cuts
/// the error by 12–20× (fourth order).
pub fn rk4_convergence() -> PropertyOutcome {
    let mut ratios = Vec::new();
    for a0 in [1.0, 2.0, 0.5] {
        let coeffs = move |t: f64| Some([(t + a0) / 2.0, 0.0, 0.0]);
        let exact = move |t: f64| 1.0 / (t * t + 2.0 * a0 * t);
        let err = |h: f64| {
            rk4_riccati_system(&coeffs, 0.5, [exact(0.5), -exact(0.5), exact(0.5) / 4.0], h, &[1.5])
                .map(|s| (s[0].alpha - exact(1.5)).abs())
                .unwrap_or(f64::NAN)
        };
        ratios.push(err(0.05) / err(0.025));
    }
    PropertyOutcome {
        name: "rk4_convergence".into(),
        cases: ratios.len() as u32,
        passed: ratios.iter().all(|r| (12.0..=20.0).contains(r)),
        detail: format!("error ratios on halving the step: {ratios:.2?}"),
    }
}

/// Every suite at its standard size.
pub fn run_all(seed: u64) -> Vec<PropertyOutcome> {
    vec![
        field_axioms(seed, 1000),
        parser_round_trip(seed, 1000),
        simplify_idempotent(seed, 500),
        differentiate_integrate(seed, 200),
        normalization_idempotent(seed, 500),
        fd_convergence(),
        rk4_convergence(),
    ]
}
