//! Kovacic's algorithm, cases 1 and 2, for ∂²y = ry with rational r.
//!
//! Poles of order 1 and 2 and infinity orders ≥ 2 are handled (plus nonzero
//! constant r); anything else is reported as unsupported structure.

mod cases;
mod poles;

pub use cases::{monic_solution, run_case1, run_case2, Case1Attempt, Case1Data, Case2Attempt, Case2Data, Sign};
pub use poles::{analyze_poles, Pole, PoleAnalysis};

use serde::Serialize;

use crate::algebra::{AlgebraError, Polynomial, RationalFunction};
use crate::liouville::{is_zero_exact, Expr};
use crate::transforms::ReducedOde;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KovacicError {
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    Case1,
    Case2,
    UnresolvedCases12,
    UnsupportedStructure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GaloisClass {
    Triangularizable,
    InfiniteDihedral,
    Indeterminate,
}

impl CaseLabel {
    pub fn galois(self) -> GaloisClass {
        match self {
            CaseLabel::Case1 => GaloisClass::Triangularizable,
            CaseLabel::Case2 => GaloisClass::InfiniteDihedral,
            _ => GaloisClass::Indeterminate,
        }
    }
}

/// Witness data behind a solution.
#[derive(Clone, Debug)]
pub enum Witness {
    /// y = P e^{∫ω}
    Case1 { omega: RationalFunction, p: Polynomial },
    /// φ = θ + P'/P, ω± roots of ω² − φω + ½(φ' + φ² − 2r) = 0
    Case2 { theta: RationalFunction, p: Polynomial, phi: RationalFunction, omegas: Vec<RationalFunction> },
}

#[derive(Clone, Debug)]
pub struct KovacicOutcome {
    pub case_label: CaseLabel,
    pub galois_class: GaloisClass,
    pub witness: Option<Witness>,
    /// Two independent solutions, when found.
    pub solutions: Option<(Expr, Expr)>,
    pub poles: Option<PoleAnalysis>,
    pub case1: Option<Case1Data>,
    pub case2: Option<Case2Data>,
    /// Why the run stopped, for unsupported or unresolved outcomes.
    pub detail: Option<String>,
}

impl KovacicOutcome {
    fn new(label: CaseLabel) -> Self {
        KovacicOutcome {
            case_label: label,
            galois_class: label.galois(),
            witness: None,
            solutions: None,
            poles: None,
            case1: None,
            case2: None,
            detail: None,
        }
    }
    pub fn is_solved(&self) -> bool {
        matches!(self.case_label, CaseLabel::Case1 | CaseLabel::Case2)
    }
}

/// analyze → case 1 → case 2.
pub fn solve(reduced: &ReducedOde) -> Result<KovacicOutcome, KovacicError> {
    let r = &reduced.r;
    let pa = match analyze_poles(r) {
        Ok(pa) => pa,
        Err(KovacicError::UnsupportedStructure(why)) => {
            let mut out = KovacicOutcome::new(CaseLabel::UnsupportedStructure);
            out.detail = Some(why);
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let c1 = run_case1(&pa, r)?;
    if let Some((w, y1, y2)) = c1.solution(r)? {
        let mut out = KovacicOutcome::new(CaseLabel::Case1);
        out.witness = Some(w);
        out.solutions = Some((y1, y2));
        out.poles = Some(pa);
        out.case1 = Some(c1);
        return Ok(out);
    }
    let c2 = run_case2(&pa, r)?;
    if let Some((w, y1, y2)) = c2.solution(r)? {
        let mut out = KovacicOutcome::new(CaseLabel::Case2);
        out.witness = Some(w);
        out.solutions = Some((y1, y2));
        out.poles = Some(pa);
        out.case1 = Some(c1);
        out.case2 = Some(c2);
        return Ok(out);
    }
    let mut out = KovacicOutcome::new(CaseLabel::UnresolvedCases12);
    out.detail = Some("neither case 1 nor case 2 produced a polynomial P_n; case 3 is not implemented".into());
    out.poles = Some(pa);
    out.case1 = Some(c1);
    out.case2 = Some(c2);
    Ok(out)
}

/// Exact test of ∂²y − r·y = 0.
pub fn residual_is_zero(y: &Expr, r: &RationalFunction) -> Option<bool> {
    let v = r.var();
    let res = y.diff(v).diff(v) - crate::liouville::rational_to_expr(r) * y.clone();
    is_zero_exact(&res, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{sym, Polynomial};

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        let v = sym("tau");
        RationalFunction::new(Polynomial::from_ints(v.clone(), num), Polynomial::from_ints(v, den)).unwrap()
    }

    #[test]
    fn euler_two_over_tau_squared() {
        let out = solve(&ReducedOde { r: rf(&[2], &[0, 0, 1]) }).unwrap();
        assert_eq!(out.case_label, CaseLabel::Case1);
        assert_eq!(out.galois_class, GaloisClass::Triangularizable);
        let (y1, y2) = out.solutions.unwrap();
        assert_eq!(y1, Expr::var("tau").powi(2));
        assert_eq!(residual_is_zero(&y2, &rf(&[2], &[0, 0, 1])), Some(true));
    }

    #[test]
    fn quartic_pole_is_out_of_scope() {
        let out = solve(&ReducedOde { r: rf(&[-1], &[0, 0, 0, 0, 1]) }).unwrap();
        assert_eq!(out.case_label, CaseLabel::UnsupportedStructure);
        assert_eq!(out.galois_class, GaloisClass::Indeterminate);
        assert!(out.detail.unwrap().contains("order 4"));
    }

    #[test]
    fn constant_r() {
        let r = rf(&[-1], &[1]);
        let out = solve(&ReducedOde { r: r.clone() }).unwrap();
        assert_eq!(out.case_label, CaseLabel::Case1);
        let (y1, y2) = out.solutions.unwrap();
        assert_eq!(residual_is_zero(&y1, &r), Some(true));
        assert_eq!(residual_is_zero(&y2, &r), Some(true));
        assert_ne!(y1, y2);
    }

    fn ince_r() -> RationalFunction {
        rf(&[4, 0, 2], &[1, 0, 2, 0, 1])
    }

    #[test]
    fn ince_case1_finds_linear_polynomials() {
        let r = ince_r();
        let pa = analyze_poles(&r).unwrap();
        let c1 = run_case1(&pa, &r).unwrap();
        assert_eq!(c1.d(), std::collections::BTreeSet::from([1]));
        assert_eq!(c1.attempts.len(), 2);
        let ps: Vec<String> = c1.attempts.iter().map(|a| a.p.as_ref().unwrap().to_string()).collect();
        assert_eq!(ps, ["tau-1", "tau+1"]);
        let out = solve(&ReducedOde { r: r.clone() }).unwrap();
        assert_eq!(out.case_label, CaseLabel::Case1);
        let (y1, y2) = out.solutions.unwrap();
        assert_eq!(residual_is_zero(&y1, &r), Some(true));
        assert_eq!(residual_is_zero(&y2, &r), Some(true));
    }

    #[test]
    fn ince_case2_data() {
        let r = ince_r();
        let pa = analyze_poles(&r).unwrap();
        let c2 = run_case2(&pa, &r).unwrap();
        let a = c2.attempts.iter().find(|a| a.p.is_some()).unwrap();
        assert_eq!(a.e_infinity, 8);
        assert_eq!(a.theta, rf(&[0, 2], &[1, 0, 1]));
        assert_eq!(a.p.as_ref().unwrap(), &Polynomial::from_ints(sym("tau"), &[-1, 0, 1]));
        let (_, _, roots) = c2.phi_and_omegas(&r).unwrap().unwrap();
        let (wp, wm) = roots.unwrap();
        let minus = rf(&[2, -2, 2], &[-1, 1, -1, 1]);
        let plus = rf(&[2, 2, 2], &[1, 1, 1, 1]);
        assert!((wp == minus && wm == plus) || (wp == plus && wm == minus));
        let (w, y1, y2) = c2.solution(&r).unwrap().unwrap();
        assert!(matches!(w, Witness::Case2 { .. }));
        assert_eq!(residual_is_zero(&y1, &r), Some(true));
        assert_eq!(residual_is_zero(&y2, &r), Some(true));
    }

    #[test]
    fn airy_like_has_no_case12_solution() {
        // r = τ has infinity order −1
        let out = solve(&ReducedOde { r: rf(&[0, 1], &[1]) }).unwrap();
        assert_eq!(out.case_label, CaseLabel::UnsupportedStructure);
    }
}
