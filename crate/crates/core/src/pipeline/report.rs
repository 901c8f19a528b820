//! Machine-readable run reports and their re-verification.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{exact_checks, ode_from_spec, propagator_checks, residual_points, PipelineError, PropagatorRun, Solved};
use crate::kovacic::{KovacicOutcome, Witness};
use crate::liouville::{rational_to_expr, simplify, to_rational, Expr};
use crate::parser::{parse_expr, parse_problem, ProblemSpec};
use crate::algebra::Symbol;
use crate::propagator::{triple_residuals, QuadraticHamiltonian, RiccatiTriple};
use crate::transforms::GeneralOde2;
use crate::verify::{ode_residual, wronskian, Check, ResidualReport, TOL_SYMBOLIC};

/// A printed formula set against the computed one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub quantity: String,
    pub printed: String,
    pub computed: String,
    /// simplify(printed) == simplify(computed)
    pub structural: bool,
    /// largest relative difference on the sample points, when both evaluate
    pub max_difference: Option<f64>,
    /// residual of the printed formula in its own defining equation
    pub printed_residual: Option<f64>,
    pub verdict: String,
}

impl Comparison {
    /// Verdict from structural identity, then numeric agreement (1e−8).
    pub fn new(quantity: &str, printed: &str, computed: &str, max_difference: Option<f64>, printed_residual: Option<f64>) -> Comparison {
        let structural = structurally_equal(printed, computed);
        let verdict = if structural {
            "agrees".to_string()
        } else if max_difference.is_some_and(|d| d <= 1e-8) {
            "agrees numerically".to_string()
        } else {
            "discrepant".to_string()
        };
        Comparison {
            quantity: quantity.into(),
            printed: printed.into(),
            computed: computed.into(),
            structural,
            max_difference,
            printed_residual,
            verdict,
        }
    }
}

/// Equality after simplification. `;` separates items compared as an
/// unordered list; items that are not expressions compare as text.
pub fn structurally_equal(a: &str, b: &str) -> bool {
    enum Item {
        E(Expr),
        S(String),
    }
    let items = |s: &str| -> Vec<Item> {
        s.split(';')
            .map(|x| match parse_expr(x.trim()) {
                Ok(e) => Item::E(canonical(&e)),
                Err(_) => Item::S(x.split_whitespace().collect()),
            })
            .collect()
    };
    let (xs, mut ys) = (items(a), items(b));
    if xs.len() != ys.len() {
        return false;
    }
    for x in xs {
        let hit = ys.iter().position(|y| match (&x, y) {
            (Item::E(p), Item::E(q)) => p == q,
            (Item::S(p), Item::S(q)) => p == q,
            _ => false,
        });
        match hit {
            Some(k) => {
                ys.remove(k);
            }
            None => return false,
        }
    }
    true
}

/// simplify, then the rational normal form when the result is a rational
/// function of its single free variable.
pub fn canonical(e: &Expr) -> Expr {
    let s = simplify(e);
    let vars = s.free_vars();
    if vars.len() == 1 {
        let v = vars.into_iter().next().expect("one variable");
        if let Some(r) = to_rational(&s, &v) {
            return rational_to_expr(&r);
        }
    }
    s
}

/// Largest |p − c|/(1 + |c|) over the points; None when either side fails
/// to evaluate somewhere.
pub fn max_difference(printed: &Expr, computed: &Expr, var: &Symbol, points: &[f64]) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for &x in points {
        let p = printed.eval_at(var, x).ok()?;
        let c = computed.eval_at(var, x).ok()?;
        let d = (p - c).norm() / (1.0 + c.norm());
        if !d.is_finite() {
            return None;
        }
        worst = worst.max(d);
    }
    (!points.is_empty()).then_some(worst)
}

/// Residual of a printed α, β or γ in its own equation, the other two slots
/// taken from `triple`. Free symbols other than t are read as t.
pub fn printed_triple_residual(quantity: &str, printed: &Expr, h: &QuadraticHamiltonian, triple: &RiccatiTriple, points: &[f64]) -> Option<f64> {
    let slot = match quantity {
        "alpha" => 0,
        "beta" => 1,
        "gamma" => 2,
        _ => return None,
    };
    let mut e = printed.clone();
    for v in printed.free_vars() {
        if v != h.t && &*v != "pi" {
            e = e.subs(&v, &Expr::var_sym(&h.t));
        }
    }
    let mut t2 = triple.clone();
    match slot {
        0 => t2.alpha0 = e,
        1 => t2.beta0 = e,
        _ => t2.gamma0 = e,
    }
    Some(triple_residuals(&t2, h, points, 1e-8)[slot].check().max_residual)
}

/// s with y = t^s, when t·y'/y is constant.
pub fn euler_exponent(y: &Expr, t: &Symbol) -> Option<Expr> {
    let s = simplify(&(Expr::var_sym(t) * y.diff(t) * y.recip()));
    (!s.contains_var(t)).then_some(s)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PoleRow {
    pub location: String,
    pub order: usize,
    pub b: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Case1Row {
    pub n: usize,
    pub omega: String,
    pub p: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Case2Summary {
    /// E_c per finite pole, in pole order
    pub e_sets: Vec<Vec<i64>>,
    pub e_infinity: Vec<i64>,
    pub d: Vec<usize>,
    pub theta: Vec<String>,
    pub p: Option<String>,
    pub phi: Option<String>,
    pub discriminant: Option<String>,
    pub omegas: Vec<String>,
    pub solutions: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KovacicSummary {
    pub case_label: String,
    pub galois_class: String,
    pub detail: Option<String>,
    pub r: String,
    pub poles: Vec<PoleRow>,
    pub infinity_order: Option<i64>,
    pub b_infinity: Option<String>,
    pub case1_d: Vec<usize>,
    pub case1: Vec<Case1Row>,
    pub case2: Option<Case2Summary>,
}

impl KovacicSummary {
    pub fn new(out: &KovacicOutcome, r: &crate::algebra::RationalFunction) -> Self {
        let mut s = KovacicSummary {
            case_label: format!("{:?}", out.case_label),
            galois_class: format!("{:?}", out.galois_class),
            detail: out.detail.clone(),
            r: r.to_string(),
            ..Default::default()
        };
        if let Some(pa) = &out.poles {
            s.poles = pa
                .poles
                .iter()
                .map(|p| PoleRow { location: p.location.to_string(), order: p.order, b: p.b.to_string() })
                .collect();
            s.infinity_order = (pa.infinity_order != i64::MAX).then_some(pa.infinity_order);
            s.b_infinity = Some(pa.b_infinity.to_string());
        }
        if let Some(c1) = &out.case1 {
            s.case1_d = c1.d().into_iter().collect();
            s.case1 = c1
                .attempts
                .iter()
                .filter_map(|a| {
                    a.omega.as_ref().map(|w| Case1Row { n: a.n, omega: w.to_string(), p: a.p.as_ref().map(|p| p.to_string()) })
                })
                .collect();
        }
        if let Some(c2) = &out.case2 {
            s.case2 = Some(case2_summary(c2, r, None));
        }
        s
    }
}

pub fn case2_summary(c2: &crate::kovacic::Case2Data, r: &crate::algebra::RationalFunction, solutions: Option<(&Expr, &Expr)>) -> Case2Summary {
    let mut s = Case2Summary {
        e_sets: c2.e_sets.clone(),
        e_infinity: c2.e_infinity.clone(),
        d: c2.d().into_iter().collect(),
        theta: c2.attempts.iter().map(|a| a.theta.to_string()).collect(),
        ..Default::default()
    };
    s.theta.dedup();
    if let Some(a) = c2.attempts.iter().find(|a| a.p.is_some()) {
        s.p = a.p.as_ref().map(|p| p.to_string());
        s.theta = vec![a.theta.to_string()];
    }
    if let Ok(Some((phi, disc, roots))) = c2.phi_and_omegas(r) {
        s.phi = Some(phi.to_string());
        s.discriminant = Some(disc.to_string());
        if let Some((wp, wm)) = roots {
            s.omegas = vec![wp.to_string(), wm.to_string()];
        }
    }
    if let Some((y1, y2)) = solutions {
        s.solutions = vec![y1.to_string(), y2.to_string()];
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Solve,
    Propagator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub target: String,
    pub kind: ReportKind,
    /// problem file the run started from; `verify` rebuilds everything from it
    pub problem: String,
    pub mu0: Option<String>,
    pub mu1: Option<String>,
    pub alpha0: Option<String>,
    pub beta0: Option<String>,
    pub gamma0: Option<String>,
    pub green: Option<String>,
    pub window: [f64; 2],
    /// time step of the Schrödinger residual
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pde_h_t: Option<f64>,
    pub checks: Vec<Check>,
    /// b1, b0 of the rational form handed to the reduction
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebraic_form: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change_of_variable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kovacic: Option<KovacicSummary>,
    /// solutions of the algebraic form, then of the original equation
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub algebraic_solutions: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solutions: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<Comparison>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<String>,
}

impl Report {
    fn empty(target: &str, kind: ReportKind, problem: &ProblemSpec, window: (f64, f64)) -> Report {
        Report {
            target: target.into(),
            kind,
            problem: problem.to_string(),
            mu0: None,
            mu1: None,
            alpha0: None,
            beta0: None,
            gamma0: None,
            green: None,
            window: [window.0, window.1],
            pde_h_t: None,
            checks: vec![],
            algebraic_form: None,
            change_of_variable: None,
            kovacic: None,
            algebraic_solutions: vec![],
            solutions: vec![],
            comparisons: vec![],
            values: BTreeMap::new(),
            annotations: vec![],
        }
    }

    pub fn from_solved(target: &str, problem: &ProblemSpec, s: &Solved) -> Report {
        let mut rep = Report::empty(target, ReportKind::Solve, problem, s.window);
        rep.fill_solved(s);
        rep.checks = s.checks.iter().map(|c| c.check()).collect();
        rep
    }

    fn fill_solved(&mut self, s: &Solved) {
        self.algebraic_form = Some([s.algebraic.b1.to_string(), s.algebraic.b0.to_string()]);
        self.change_of_variable = s.change.as_ref().map(|c| c.key.clone());
        self.kovacic = Some(KovacicSummary::new(&s.kovacic, &s.reduced.r));
        if let Some((f, g)) = &s.hat {
            self.algebraic_solutions = vec![f.to_string(), g.to_string()];
        }
        if let Some((f, g)) = &s.solutions {
            self.solutions = vec![f.to_string(), g.to_string()];
        }
        if let Some(Witness::Case1 { omega, .. }) = &s.kovacic.witness {
            self.values.insert("omega_witness".into(), omega.to_string());
        }
    }

    pub fn from_run(target: &str, problem: &ProblemSpec, run: &PropagatorRun) -> Report {
        let mut rep = Report::empty(target, ReportKind::Propagator, problem, run.window);
        if let Some(s) = &run.solved {
            rep.fill_solved(s);
        }
        rep.mu0 = Some(run.mu0.to_string());
        rep.mu1 = run.mu1.as_ref().map(|m| m.to_string());
        rep.alpha0 = Some(run.triple.alpha0.to_string());
        rep.beta0 = Some(run.triple.beta0.to_string());
        rep.gamma0 = Some(run.triple.gamma0.to_string());
        rep.green = Some(run.green.expr().to_string());
        rep.pde_h_t = Some(run.pde_h_t);
        rep.checks = run.checks.clone();
        rep.annotations = run.annotations.clone();
        rep
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Text of a named quantity, as compared against printed formulas.
    /// Lists are joined with `;`.
    pub fn field(&self, quantity: &str) -> Option<String> {
        let join = |v: &[String]| (!v.is_empty()).then(|| v.join("; "));
        let k = self.kovacic.as_ref();
        let c2 = k.and_then(|k| k.case2.as_ref());
        match quantity {
            "alpha" => self.alpha0.clone(),
            "beta" => self.beta0.clone(),
            "gamma" => self.gamma0.clone(),
            "mu0" => self.mu0.clone(),
            "mu1" => self.mu1.clone(),
            "algebraic_b1" => self.algebraic_form.as_ref().map(|f| f[0].clone()),
            "algebraic_b0" => self.algebraic_form.as_ref().map(|f| f[1].clone()),
            "r" => k.map(|k| k.r.clone()),
            "case_label" => k.map(|k| k.case_label.clone()),
            "galois_class" => k.map(|k| k.galois_class.clone()),
            "algebraic_solutions" => join(&self.algebraic_solutions),
            "solutions" => join(&self.solutions),
            "case2_e_sets" => c2.map(|c| format!("{:?}", c.e_sets)),
            "case2_e_infinity" => c2.map(|c| format!("{:?}", c.e_infinity)),
            "case2_d" => c2.map(|c| format!("{:?}", c.d)),
            "case2_theta" => c2.and_then(|c| join(&c.theta)),
            "case2_p" => c2.and_then(|c| c.p.clone()),
            "case2_omegas" => c2.and_then(|c| join(&c.omegas)),
            "case2_solutions" => c2.and_then(|c| join(&c.solutions)),
            "case2_back_substituted" => {
                let v: Vec<String> = ["case2_solution_1", "case2_solution_2"].iter().filter_map(|k| self.values.get(*k).cloned()).collect();
                join(&v)
            }
            other => self.values.get(other).cloned(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Replace a check's tolerance and recompute its pass flag.
    pub fn override_tolerance(&mut self, name: &str, tolerance: f64) -> bool {
        let mut hit = false;
        for c in self.checks.iter_mut().filter(|c| c.name == name) {
            c.tolerance = tolerance;
            c.pass = c.max_residual.is_finite() && c.max_residual <= tolerance;
            hit = true;
        }
        hit
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "target: {}", self.target);
        if let Some(k) = &self.kovacic {
            let _ = writeln!(s, "r = {}", k.r);
            let _ = writeln!(s, "case: {}  galois: {}", k.case_label, k.galois_class);
            if let Some(d) = &k.detail {
                let _ = writeln!(s, "  {d}");
            }
        }
        if let Some([b1, b0]) = &self.algebraic_form {
            let _ = writeln!(s, "algebraic form: b1 = {b1}, b0 = {b0}");
        }
        for (i, y) in self.solutions.iter().enumerate() {
            let _ = writeln!(s, "solution {}: {y}", i + 1);
        }
        for (k, v) in [("mu0", &self.mu0), ("mu1", &self.mu1), ("alpha0", &self.alpha0), ("beta0", &self.beta0), ("gamma0", &self.gamma0)] {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {v}");
            }
        }
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k} = {v}");
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{}] {} max {:.3e} (tol {:.0e})",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.max_residual,
                c.tolerance
            );
        }
        for c in &self.comparisons {
            let _ = writeln!(s, "compare {}: {} (printed {})", c.quantity, c.verdict, c.printed);
        }
        for a in &self.annotations {
            let _ = writeln!(s, "note: {a}");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOutcome {
    /// (recorded, recomputed)
    pub rows: Vec<(Check, Option<Check>)>,
    pub warnings: Vec<String>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|(_, now)| now.as_ref().is_some_and(|c| c.pass))
    }
}

fn parse_opt(field: &str, text: &Option<String>) -> Result<Option<Expr>, PipelineError> {
    text.as_ref()
        .map(|s| parse_expr(s).map_err(|e| PipelineError::Input(format!("report field {field}: {e}"))))
        .transpose()
}

/// Recompute every check named in the report from the report's own
/// expressions. Tolerances are taken from the report.
pub fn verify_report(rep: &Report) -> Result<VerifyOutcome, PipelineError> {
    let spec = parse_problem(&rep.problem)?;
    let window = (rep.window[0], rep.window[1]);
    let mut fresh: Vec<Check> = Vec::new();
    let mut warnings = Vec::new();
    if rep.checks.is_empty() {
        warnings.push("report records no checks".to_string());
    }
    let eq = ode_from_spec(&spec)?;
    let pts = residual_points(window);
    for (i, y) in rep.solutions.iter().enumerate() {
        let y = parse_expr(y).map_err(|e| PipelineError::Input(format!("report solution {}: {e}", i + 1)))?;
        fresh.push(ode_residual(&format!("solution_{}_ode", i + 1), &y, &eq, &pts, TOL_SYMBOLIC).check());
    }
    fresh.extend(derived_checks(rep, &eq)?);
    let mut hamiltonian = None;
    if rep.kind == ReportKind::Propagator {
        let (Some(mu0), Some(alpha0), Some(beta0), Some(gamma0)) = (
            parse_opt("mu0", &rep.mu0)?,
            parse_opt("alpha0", &rep.alpha0)?,
            parse_opt("beta0", &rep.beta0)?,
            parse_opt("gamma0", &rep.gamma0)?,
        ) else {
            return Err(PipelineError::Input("propagator report lacks mu0/alpha0/beta0/gamma0".into()));
        };
        let mu1 = parse_opt("mu1", &rep.mu1)?;
        let h = super::hamiltonian_from_spec(&spec)?;
        let triple = RiccatiTriple { alpha0, beta0, gamma0 };
        fresh.extend(propagator_checks(&h, &mu0, mu1.as_ref(), &triple, window, rep.pde_h_t.unwrap_or(super::PDE_H_T)).iter().map(|r| r.check()));
        fresh.extend(exact_checks(&h, &mu0, mu1.as_ref(), &triple));
        if mu1.is_some() {
            fresh.push(super::asymptotics_check(&triple, &h));
        }
        hamiltonian = Some((h, triple, mu0));
    }
    let mut rows: Vec<(Check, Option<Check>)> = rep
        .checks
        .iter()
        .map(|c| {
            let now = fresh.iter().find(|f| f.name == c.name).cloned().map(|mut f| {
                f.tolerance = c.tolerance;
                f.pass = f.max_residual.is_finite() && f.max_residual <= c.tolerance;
                if c.tolerance == 0.0 {
                    // boolean identities carry residual 0 or 1
                    f.pass = f.max_residual == 0.0;
                }
                f
            });
            if now.is_none() {
                warnings.push(format!("check '{}' cannot be recomputed", c.name));
            }
            (c.clone(), now)
        })
        .collect();
    for c in &rep.comparisons {
        let computed = rep.field(&c.quantity).unwrap_or_else(|| c.computed.clone());
        let mut same = structurally_equal(&c.printed, &computed) == c.structural;
        if let (Some((h, triple, mu0)), Some(old)) = (&hamiltonian, c.printed_residual) {
            let printed = parse_expr(&c.printed).map_err(|e| PipelineError::Input(format!("printed {}: {e}", c.quantity)))?;
            let pts = super::check_points(window, mu0, &h.t);
            if let Some(now) = printed_triple_residual(&c.quantity, &printed, h, triple, &pts) {
                same &= (now <= 1e-8) == (old <= 1e-8);
            }
        }
        if !same {
            warnings.push(format!("comparison '{}' no longer reproduces its recorded verdict", c.quantity));
        }
        rows.push((Check::boolean(&format!("comparison_{}", c.quantity), true), Some(Check::boolean(&format!("comparison_{}", c.quantity), same))));
    }
    Ok(VerifyOutcome { rows, warnings })
}

/// Checks computable from report fields alone: extra solutions stored under
/// `*_solution_N` values, μ₀/μ₁ of a solve report, |W(μ₀, μ₁)| = 1 when the
/// equation has no first-order term, and the Euler exponents when recorded.
pub fn derived_checks(rep: &Report, eq: &GeneralOde2) -> Result<Vec<Check>, PipelineError> {
    let pts = residual_points((rep.window[0], rep.window[1]));
    let t = &eq.var;
    let parse = |what: &str, s: &str| parse_expr(s).map_err(|e| PipelineError::Input(format!("report {what}: {e}")));
    let mut out = Vec::new();
    for (k, v) in &rep.values {
        if k.contains("_solution_") {
            out.push(ode_residual(&format!("{k}_ode"), &parse(k, v)?, eq, &pts, TOL_SYMBOLIC).check());
        }
    }
    let mu0 = rep.mu0.as_deref().map(|s| parse("mu0", s)).transpose()?;
    let mu1 = rep.mu1.as_deref().map(|s| parse("mu1", s)).transpose()?;
    if rep.kind == ReportKind::Solve {
        if let Some(m) = &mu0 {
            out.push(ode_residual("mu0_ode", m, eq, &pts, TOL_SYMBOLIC).check());
        }
        if let Some(m) = &mu1 {
            out.push(ode_residual("mu1_ode", m, eq, &pts, TOL_SYMBOLIC).check());
        }
    }
    if let (Some(f), Some(g)) = (&mu0, &mu1) {
        if simplify(&eq.b1).is_zero() {
            let res: Vec<f64> = pts.iter().map(|&x| wronskian(f, g, t, x).map(|w| (w.norm() - 1.0).abs()).unwrap_or(f64::NAN)).collect();
            out.push(ResidualReport::new("wronskian_unit", res, TOL_SYMBOLIC, String::new(), 0).check());
        }
    }
    if rep.values.contains_key("exponent_1") {
        let mut ok = !rep.solutions.is_empty();
        for (i, y) in rep.solutions.iter().enumerate() {
            let s = euler_exponent(&parse(&format!("solution {}", i + 1), y)?, t);
            ok &= s.is_some_and(|s| simplify(&(s.clone() * s.clone() - s + Expr::one())).is_zero());
        }
        out.push(Check::boolean("exponents_s2_minus_s_plus_1", ok));
    }
    Ok(out)
}
