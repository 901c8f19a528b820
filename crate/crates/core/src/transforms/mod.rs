//! Moves between Riccati, general and reduced second-order forms, derives the
//! characteristic equation of a quadratic Hamiltonian, and algebrizes
//! trigonometric coefficients through a change of the independent variable.

mod catalog;

pub use catalog::{split_key, Catalog, CatalogEntry};

use crate::algebra::{AlgebraError, RationalFunction, Symbol, Q};
use crate::liouville::{exp_integral, linear_arguments, rational_gcd, simplify, to_rational, Expr, Family, RewriteError, TrigRewrite};
use crate::parser::parse_rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("result is not rational in {var}: {expr}")]
    NonRationalResult { var: String, expr: String },
    #[error("unknown change-of-variable key '{0}'")]
    UnknownCatalogKey(String),
    #[error("cannot choose a frequency for '{0}': no trigonometric argument is linear in t")]
    NoFrequency(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// ∂²y + b₁∂y + b₀y = 0
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralOde2 {
    pub var: Symbol,
    pub b1: Expr,
    pub b0: Expr,
}

/// ∂²ξ = rξ
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedOde {
    pub r: RationalFunction,
}

/// ∂v = a₀ + a₁v + a₂v²
#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiGeneral {
    pub var: Symbol,
    pub a0: Expr,
    pub a1: Expr,
    pub a2: Expr,
}

/// ∂²μ − τ(t)∂μ + 4σ(t)μ = 0
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicEq {
    pub var: Symbol,
    pub tau_t: Expr,
    pub sigma_t: Expr,
}

impl CharacteristicEq {
    pub fn as_general(&self) -> GeneralOde2 {
        GeneralOde2 { var: self.var.clone(), b1: -&self.tau_t, b0: self.sigma_t.scale(&crate::algebra::Scalar::int(4)) }
    }
}

impl GeneralOde2 {
    /// Both coefficients as rational functions, when they are.
    pub fn rational(&self) -> Option<(RationalFunction, RationalFunction)> {
        Some((to_rational(&self.b1, &self.var)?, to_rational(&self.b0, &self.var)?))
    }
}

fn need_rational(e: &Expr, v: &Symbol) -> Result<RationalFunction, TransformError> {
    to_rational(e, v).ok_or_else(|| TransformError::NonRationalResult { var: v.to_string(), expr: e.to_string() })
}

/// ρ = b₁²/4 + ∂b₁/2 − b₀ as an expression, any coefficient class.
pub fn reduced_coefficient(g: &GeneralOde2) -> Expr {
    let v = &g.var;
    let quarter = crate::algebra::Scalar::frac(1, 4);
    let half = crate::algebra::Scalar::frac(1, 2);
    g.b1.powi(2).scale(&quarter) + g.b1.diff(v).scale(&half) - g.b0.clone()
}

/// y = ξ·e^{−½∫b₁}, ρ = b₁²/4 + ∂b₁/2 − b₀. Requires rational b₁, b₀.
pub fn reduce_general(g: &GeneralOde2) -> Result<(ReducedOde, Expr), TransformError> {
    let b1 = need_rational(&g.b1, &g.var)?;
    let b0 = need_rational(&g.b0, &g.var)?;
    let r = reduce_rational(&b1, &b0)?;
    let multiplier = exp_integral(&b1.try_scale(&crate::algebra::Scalar::frac(-1, 2))?)?;
    Ok((ReducedOde { r }, multiplier))
}

pub fn reduce_rational(b1: &RationalFunction, b0: &RationalFunction) -> Result<RationalFunction, TransformError> {
    let quarter = crate::algebra::Scalar::frac(1, 4);
    let half = crate::algebra::Scalar::frac(1, 2);
    Ok(b1.try_mul(b1)?.try_scale(&quarter)?.try_add(&b1.derivative()?.try_scale(&half)?)?.try_sub(b0)?)
}

/// Affine data v = α_shift + β_scale·w that carries ∂v = a₀ + a₁v + a₂v²
/// to ∂w = r − w².
#[derive(Clone, Debug)]
pub struct RiccatiReduction {
    pub r: Expr,
    pub alpha_shift: Expr,
    pub beta_scale: Expr,
}

/// Through v = −∂y/(a₂y) and the reduction of the resulting linear equation.
pub fn riccati_to_reduced(ric: &RiccatiGeneral) -> RiccatiReduction {
    let v = &ric.var;
    let half = crate::algebra::Scalar::frac(1, 2);
    let a2inv = ric.a2.recip();
    // ∂²y − (a₁ + ∂a₂/a₂)∂y + a₀a₂y = 0
    let b1 = -(ric.a1.clone() + ric.a2.diff(v) * a2inv.clone());
    let b0 = ric.a0.clone() * ric.a2.clone();
    let g = GeneralOde2 { var: v.clone(), b1: b1.clone(), b0 };
    let r = simplify(&reduced_coefficient(&g));
    let alpha_shift = simplify(&(b1.scale(&half) * a2inv.clone()));
    RiccatiReduction { r, alpha_shift, beta_scale: -a2inv }
}

pub fn riccati_to_reduced_rational(ric: &RiccatiGeneral) -> Result<(ReducedOde, Expr, Expr), TransformError> {
    let red = riccati_to_reduced(ric);
    let r = need_rational(&red.r, &ric.var)?;
    Ok((ReducedOde { r }, red.alpha_shift, red.beta_scale))
}

/// v = ∂y/y for a general equation, w = ∂ξ/ξ for a reduced one.
pub fn ode_to_riccati(g: &GeneralOde2) -> RiccatiGeneral {
    RiccatiGeneral { var: g.var.clone(), a0: -&g.b0, a1: -&g.b1, a2: Expr::int(-1) }
}

pub fn reduced_to_riccati(r: &ReducedOde) -> RiccatiGeneral {
    RiccatiGeneral {
        var: r.r.var().clone(),
        a0: crate::liouville::rational_to_expr(&r.r),
        a1: Expr::zero(),
        a2: Expr::int(-1),
    }
}

/// H = a p² + b x² + c(px + xp) gives τ = ∂a/a and
/// 4σ = 4ab − 4c² + 2c·∂a/a − 2∂c.
pub fn characteristic_from_hamiltonian(a: &Expr, b: &Expr, c: &Expr, t: &Symbol) -> CharacteristicEq {
    use crate::algebra::Scalar;
    let da_a = a.diff(t) * a.recip();
    let four_sigma = (a.clone() * b.clone()).scale(&Scalar::int(4)) - c.powi(2).scale(&Scalar::int(4))
        + (c.clone() * da_a.clone()).scale(&Scalar::int(2))
        - c.diff(t).scale(&Scalar::int(2));
    CharacteristicEq {
        var: t.clone(),
        tau_t: da_a,
        sigma_t: four_sigma.scale(&Scalar::frac(1, 4)),
    }
}

/// A concrete change of variable: catalog entry plus frequency.
#[derive(Clone, Debug)]
pub struct ChangeOfVariable {
    pub key: String,
    pub entry: CatalogEntry,
    pub rewrite: TrigRewrite,
}

impl ChangeOfVariable {
    pub fn new(entry: &CatalogEntry, nu: Q, t: &Symbol, tau: &Symbol) -> Self {
        ChangeOfVariable {
            key: format!("{}:{}", entry.key, crate::parser::rational_text(&nu)),
            entry: entry.clone(),
            rewrite: entry.rewrite(nu, t, tau),
        }
    }
    pub fn forward(&self) -> Expr {
        self.rewrite.forward()
    }
    pub fn window(&self) -> (f64, f64) {
        self.rewrite.window()
    }
    pub fn nu(&self) -> &Q {
        &self.rewrite.nu
    }
    pub fn back_substitute(&self, e: &Expr) -> Expr {
        simplify(&self.rewrite.back_substitute(e))
    }
    /// α = (∂_t τ)² in τ.
    pub fn alpha(&self) -> Result<RationalFunction, TransformError> {
        let d = self.rewrite.dtau();
        let sq = self.rewrite.mul(&d, &d)?;
        if !sq.r1.is_zero() {
            return Err(TransformError::Rewrite(RewriteError::OddParity));
        }
        Ok(sq.r0)
    }
}

/// Resolve `key` or `key:ν`. Without ν the frequency is chosen from the
/// trigonometric arguments of `coeffs`: g then g/2, g the rational gcd,
/// keeping the first that rewrites every coefficient rationally.
pub fn resolve_change_of_variable(
    catalog: &Catalog,
    spec: &str,
    coeffs: &[&Expr],
    t: &Symbol,
    tau: &Symbol,
) -> Result<ChangeOfVariable, TransformError> {
    let (key, nu) = split_key(spec).ok_or_else(|| TransformError::UnknownCatalogKey(spec.into()))?;
    let entry = catalog.entry(key).ok_or_else(|| TransformError::UnknownCatalogKey(spec.into()))?;
    if let Some(nu) = nu {
        let nu = parse_rational(nu).ok_or_else(|| TransformError::UnknownCatalogKey(spec.into()))?;
        return Ok(ChangeOfVariable::new(entry, nu, t, tau));
    }
    if entry.family == Family::Identity {
        return Ok(ChangeOfVariable::new(entry, Q::from_integer(1.into()), t, tau));
    }
    let mut args = std::collections::BTreeSet::new();
    for c in coeffs {
        args.extend(linear_arguments(c, t).ok_or_else(|| TransformError::NoFrequency(spec.into()))?);
    }
    let g = rational_gcd(&args).ok_or_else(|| TransformError::NoFrequency(spec.into()))?;
    let mut last = None;
    for nu in [g.clone(), g / Q::from_integer(2.into())] {
        let cov = ChangeOfVariable::new(entry, nu, t, tau);
        let ok = coeffs.iter().all(|c| cov.rewrite.rewrite_rational(c).is_ok());
        if ok {
            return Ok(cov);
        }
        last = Some(cov);
    }
    Ok(last.expect("two candidates tried"))
}

/// ∂_t²μ + p∂_tμ + qμ = 0 in τ:
/// ∂_τ²μ̂ + (∂_τα/(2α) + p/∂_tτ)∂_τμ̂ + (q/α)μ̂ = 0.
pub fn algebrize(g: &GeneralOde2, cov: &ChangeOfVariable) -> Result<GeneralOde2, TransformError> {
    let rw = &cov.rewrite;
    let p = rw.rewrite(&g.b1)?;
    let q = rw.rewrite_rational(&g.b0)?;
    let dtau = rw.dtau();
    let p_over = rw.div(&p, &dtau)?;
    if !p_over.r1.is_zero() {
        return Err(TransformError::Rewrite(RewriteError::OddParity));
    }
    let alpha = cov.alpha()?;
    let half = crate::algebra::Scalar::frac(1, 2);
    let b1 = alpha.derivative()?.try_div(&alpha)?.try_scale(&half)?.try_add(&p_over.r0)?;
    let b0 = q.try_div(&alpha)?;
    Ok(GeneralOde2 {
        var: rw.tau.clone(),
        b1: crate::liouville::rational_to_expr(&b1),
        b0: crate::liouville::rational_to_expr(&b0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, sym, Polynomial, Scalar};
    use crate::parser::parse_expr;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        let v = sym("tau");
        RationalFunction::new(Polynomial::from_ints(v.clone(), num), Polynomial::from_ints(v, den)).unwrap()
    }

    fn ince_unit() -> GeneralOde2 {
        let t = sym("t");
        let a = parse_expr("(1+cos(2*t))/2").unwrap();
        let b = parse_expr("(1-cos(2*t))/2").unwrap();
        let c = parse_expr("sin(2*t)/2").unwrap();
        characteristic_from_hamiltonian(&a, &b, &c, &t).as_general()
    }

    #[test]
    fn ince_algebraic_form() {
        let g = ince_unit();
        let cov = resolve_change_of_variable(&Catalog::builtin(), "tan", &[&g.b1, &g.b0], &sym("t"), &sym("tau")).unwrap();
        assert_eq!(cov.nu(), &q(1));
        let alg = algebrize(&g, &cov).unwrap();
        let (b1, b0) = alg.rational().unwrap();
        assert_eq!(b1, rf(&[0, 4], &[1, 0, 1]));
        assert_eq!(b0, rf(&[-2], &[1, 0, 2, 0, 1]));
        let (red, mult) = reduce_general(&alg).unwrap();
        assert_eq!(red.r, rf(&[4, 0, 2], &[1, 0, 2, 0, 1]));
        assert_eq!(mult, (Expr::one() + Expr::var("tau").powi(2)).recip());
    }

    #[test]
    fn zero_friction_reduces_to_minus_b0() {
        let v = sym("tau");
        let g = GeneralOde2 { var: v.clone(), b1: Expr::zero(), b0: parse_expr("3/tau^2").unwrap() };
        let (red, m) = reduce_general(&g).unwrap();
        assert_eq!(red.r, rf(&[-3], &[0, 0, 1]));
        assert!(m.is_one());
    }

    #[test]
    fn riccati_examples() {
        let v = sym("t");
        let ric = RiccatiGeneral { var: v.clone(), a0: Expr::zero(), a1: Expr::zero(), a2: Expr::int(-1) };
        assert!(riccati_to_reduced(&ric).r.is_zero());
        // α' = −b − 4cα − 4aα², a = 1/4, b = 1, c = 0
        let ric = RiccatiGeneral { var: v.clone(), a0: Expr::int(-1), a1: Expr::zero(), a2: Expr::int(-1) };
        assert_eq!(riccati_to_reduced(&ric).r, Expr::int(-1));
    }

    #[test]
    fn composition_recovers_r() {
        let v = sym("tau");
        let g = GeneralOde2 { var: v.clone(), b1: parse_expr("4*tau/(1+tau^2)").unwrap(), b0: parse_expr("-2/(1+tau^2)^2").unwrap() };
        let (red, _) = reduce_general(&g).unwrap();
        let ric = ode_to_riccati(&g);
        let (red2, _, _) = riccati_to_reduced_rational(&ric).unwrap();
        assert_eq!(red, red2);
    }

    #[test]
    fn characteristic_examples() {
        let t = sym("t");
        let ch = characteristic_from_hamiltonian(&Expr::frac(1, 4), &Expr::one(), &Expr::zero(), &t);
        assert!(ch.tau_t.is_zero());
        assert_eq!(ch.sigma_t.scale(&Scalar::int(4)), Expr::one());
        let a = parse_expr("cos(t)/4").unwrap();
        let ch = characteristic_from_hamiltonian(&a, &Expr::zero(), &Expr::zero(), &t);
        assert_eq!(simplify(&ch.tau_t), simplify(&-Expr::tan(Expr::var("t"))));
        assert!(ch.sigma_t.is_zero());
    }

    #[test]
    fn back_substitution_of_tau() {
        let g = ince_unit();
        let cov = resolve_change_of_variable(&Catalog::builtin(), "tan", &[&g.b1, &g.b0], &sym("t"), &sym("tau")).unwrap();
        assert_eq!(cov.back_substitute(&Expr::var("tau")), simplify(&Expr::tan(Expr::var("t"))));
    }
}
