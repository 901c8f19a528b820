//! End-to-end runs: problem → algebraic form → reduced form → Kovacic →
//! back-substitution → normalized μ₀, μ₁ → Riccati triple → Green function,
//! with every numeric check attached.

pub mod report;
pub mod targets;

use crate::algebra::{sym, Scalar};
use crate::kovacic::{self, CaseLabel, KovacicError, KovacicOutcome};
use crate::liouville::{simplify, to_rational, Expr};
use crate::parser::{ProblemError, ProblemKind, ProblemSpec};
use crate::propagator::{
    asymptotic_check, build_green, build_triple, normalize_solutions, sample_points, triple_residuals, value_at_zero,
    GreenFunction, PropagatorError, QuadraticHamiltonian, RiccatiTriple,
};
use crate::transforms::{
    algebrize, reduce_general, resolve_change_of_variable, Catalog, ChangeOfVariable, CharacteristicEq, GeneralOde2,
    ReducedOde, RiccatiGeneral, TransformError,
};
use crate::verify::{
    linspace, ode_residual, pde_residual, rk4_riccati_log, Check, PdeGrid, ResidualReport, TOL_PDE, TOL_RK4, TOL_SYMBOLIC,
};

pub use report::{verify_report, Report, VerifyOutcome};
pub use targets::{run_propagator, run_propagator_with, run_solve, Target};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Kovacic(#[from] KovacicError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error("unsupported structure: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Input(String),
}

impl PipelineError {
    /// 3 for structure outside the algorithm's scope, 4 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Unsupported(_) | PipelineError::Kovacic(KovacicError::UnsupportedStructure(_)) => 3,
            PipelineError::Transform(TransformError::NonRationalResult { .. } | TransformError::NoFrequency(_)) => 3,
            PipelineError::Propagator(PropagatorError::DegenerateBasis(_)) => 3,
            _ => 4,
        }
    }
}

pub const TAU: &str = "tau";

/// The second-order linear equation a problem describes, in its time variable.
pub fn ode_from_spec(spec: &ProblemSpec) -> Result<GeneralOde2, PipelineError> {
    let t = sym(&spec.var);
    Ok(match spec.kind {
        ProblemKind::ReducedOde => GeneralOde2 { var: t, b1: Expr::zero(), b0: simplify(&-spec.require("r")?) },
        ProblemKind::GeneralOde => GeneralOde2 { var: t, b1: spec.require("b1")?, b0: spec.require("b0")? },
        ProblemKind::Characteristic => {
            let tau_t = spec.require("b1")?;
            let sigma_t = spec.require("b0")?.scale(&Scalar::frac(1, 4));
            CharacteristicEq { var: t, tau_t, sigma_t }.as_general()
        }
        ProblemKind::Hamiltonian | ProblemKind::RiccatiGeneral => hamiltonian_from_spec(spec)?.characteristic().as_general(),
    })
}

pub fn hamiltonian_from_spec(spec: &ProblemSpec) -> Result<QuadraticHamiltonian, PipelineError> {
    let t = sym(&spec.var);
    match spec.kind {
        ProblemKind::Hamiltonian => Ok(QuadraticHamiltonian::new(&t, spec.require("a")?, spec.require("b")?, spec.require("c")?)),
        ProblemKind::RiccatiGeneral => {
            let ric = RiccatiGeneral { var: t, a0: spec.require("a0")?, a1: spec.require("a1")?, a2: spec.require("a2")? };
            if simplify(&ric.a2).is_zero() {
                return Err(PipelineError::Input("riccati-general needs a2 ≠ 0".into()));
            }
            Ok(QuadraticHamiltonian::from_riccati(&ric))
        }
        ProblemKind::Characteristic => {
            let a = spec.expr("a")?.ok_or_else(|| PipelineError::Input("a characteristic problem needs `a:` to normalize μ₀".into()))?;
            // only a enters the normalization; the residuals use the equation itself
            Ok(QuadraticHamiltonian::new(&t, a, Expr::zero(), Expr::zero()))
        }
        _ => Err(PipelineError::Input(format!("kind '{}' does not describe a Hamiltonian", spec.kind.name()))),
    }
}

/// Result of running Kovacic on an ODE, with the solutions carried back to
/// the original variable.
#[derive(Clone, Debug)]
pub struct Solved {
    pub original: GeneralOde2,
    pub change: Option<ChangeOfVariable>,
    /// rational form fed to the reduction (in τ when a change of variable is used)
    pub algebraic: GeneralOde2,
    pub reduced: ReducedOde,
    /// μ̂ = multiplier · y
    pub multiplier: Expr,
    pub kovacic: KovacicOutcome,
    /// solutions of the algebraic form
    pub hat: Option<(Expr, Expr)>,
    /// solutions of the original equation
    pub solutions: Option<(Expr, Expr)>,
    pub window: (f64, f64),
    pub checks: Vec<ResidualReport>,
}

/// 50 points inside the positive part of a window, clear of its ends.
pub fn residual_points(window: (f64, f64)) -> Vec<f64> {
    let lo = window.0.max(0.0);
    let hi = window.1.min(lo + 1.5);
    let m = 0.07 * (hi - lo);
    linspace(lo + m, hi - m, 50)
}

pub fn solve_ode(original: &GeneralOde2, change: Option<&str>) -> Result<Solved, PipelineError> {
    let t = original.var.clone();
    let tau = sym(TAU);
    let cov = match change {
        Some(key) => Some(resolve_change_of_variable(&Catalog::builtin(), key, &[&original.b1, &original.b0], &t, &tau)?),
        None => None,
    };
    let (algebraic, window) = match &cov {
        Some(c) => (algebrize(original, c)?, c.window()),
        None => (original.clone(), (0.0, 1.5)),
    };
    for (name, e) in [("b1", &algebraic.b1), ("b0", &algebraic.b0)] {
        if to_rational(e, &algebraic.var).is_none() {
            return Err(PipelineError::Unsupported(format!(
                "{name} = {e} is not rational in {}; choose a change_of_variable",
                algebraic.var
            )));
        }
    }
    let (reduced, multiplier) = reduce_general(&algebraic)?;
    let outcome = kovacic::solve(&reduced)?;
    let hat = outcome
        .solutions
        .as_ref()
        .map(|(y1, y2)| (simplify(&(multiplier.clone() * y1.clone())), simplify(&(multiplier.clone() * y2.clone()))));
    let solutions = hat.as_ref().map(|(f, g)| match &cov {
        Some(c) => (c.back_substitute(f), c.back_substitute(g)),
        None => (f.clone(), g.clone()),
    });
    let mut checks = Vec::new();
    if let Some((f, g)) = &solutions {
        let pts = residual_points(window);
        checks.push(ode_residual("solution_1_ode", f, original, &pts, TOL_SYMBOLIC));
        checks.push(ode_residual("solution_2_ode", g, original, &pts, TOL_SYMBOLIC));
    }
    Ok(Solved { original: original.clone(), change: cov, algebraic, reduced, multiplier, kovacic: outcome, hat, solutions, window, checks })
}

pub fn solve_spec(spec: &ProblemSpec) -> Result<Solved, PipelineError> {
    solve_ode(&ode_from_spec(spec)?, spec.change_of_variable.as_deref())
}

/// Everything produced for one propagator.
#[derive(Clone, Debug)]
pub struct PropagatorRun {
    pub hamiltonian: QuadraticHamiltonian,
    pub solved: Option<Solved>,
    pub mu0: Expr,
    pub mu1: Option<Expr>,
    pub triple: RiccatiTriple,
    pub green: GreenFunction,
    pub window: (f64, f64),
    /// time step of the Schrödinger residual
    pub pde_h_t: f64,
    pub checks: Vec<Check>,
    pub reports: Vec<ResidualReport>,
    pub annotations: Vec<String>,
}

impl PropagatorRun {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Hamiltonian → characteristic equation → Kovacic → normalized pair → G.
pub fn propagator_from_hamiltonian(
    h: &QuadraticHamiltonian,
    change: Option<&str>,
    mu1_at_zero: Scalar,
    pde_h_t: f64,
) -> Result<PropagatorRun, PipelineError> {
    h.a0()?;
    let eq = h.characteristic().as_general();
    let solved = solve_ode(&eq, change)?;
    let Some((f, g)) = solved.solutions.clone() else {
        return Err(match solved.kovacic.case_label {
            CaseLabel::UnsupportedStructure => PipelineError::Unsupported(solved.kovacic.detail.clone().unwrap_or_default()),
            _ => PipelineError::Unsupported(format!(
                "no Liouvillian solution found ({:?}): {}",
                solved.kovacic.case_label,
                solved.kovacic.detail.clone().unwrap_or_default()
            )),
        });
    };
    let cs = normalize_solutions((&f, &g), h, mu1_at_zero, solved.window)?;
    let triple = build_triple(&cs, h)?;
    let mut run = assemble(h, cs.mu0.clone(), Some(cs.mu1.clone()), triple, cs.window, pde_h_t);
    run.reports.splice(0..0, solved.checks.iter().cloned());
    run.checks.splice(0..0, solved.checks.iter().map(|r| r.check()));
    run.solved = Some(solved);
    Ok(run)
}

/// Propagator from a known solution α of the Riccati equation.
pub fn propagator_direct(
    h: &QuadraticHamiltonian,
    alpha: &Expr,
    slope: Option<Expr>,
    window: (f64, f64),
    pde_h_t: f64,
) -> Result<PropagatorRun, PipelineError> {
    match crate::propagator::riccati_direct(alpha, h, slope) {
        Ok((triple, mu)) => Ok(assemble(h, mu, None, triple, window, pde_h_t)),
        Err(e @ PropagatorError::NotExactAtZero { .. }) => {
            let (triple, mu) = crate::propagator::riccati_direct_unnormalized(alpha, h);
            let mut run = assemble(h, mu, None, triple, window, pde_h_t);
            run.annotations.push(format!("no propagator normalization: {e}; checks use μ with K = 1"));
            Ok(run)
        }
        Err(e) => Err(e.into()),
    }
}

/// Builds G and runs the propagator checks.
pub fn assemble(
    h: &QuadraticHamiltonian,
    mu0: Expr,
    mu1: Option<Expr>,
    triple: RiccatiTriple,
    window: (f64, f64),
    pde_h_t: f64,
) -> PropagatorRun {
    let green = build_green(&triple, &mu0, &h.t);
    let reports = propagator_checks(h, &mu0, mu1.as_ref(), &triple, window, pde_h_t);
    let mut checks: Vec<Check> = reports.iter().map(|r| r.check()).collect();
    checks.extend(exact_checks(h, &mu0, mu1.as_ref(), &triple));
    if mu1.is_some() {
        checks.push(asymptotics_check(&triple, h));
    }
    PropagatorRun { hamiltonian: h.clone(), solved: None, mu0, mu1, triple, green, window, pde_h_t, checks, reports, annotations: vec![] }
}

/// Exact identities: β₀μ₀ = −1, then the μ₀ and μ₁ initial conditions, or
/// without μ₁ just an exact μ₀'(0).
pub fn exact_checks(h: &QuadraticHamiltonian, mu0: &Expr, mu1: Option<&Expr>, triple: &RiccatiTriple) -> Vec<Check> {
    let t = &h.t;
    let at0 = |e: &Expr| value_at_zero(e, t, "").ok();
    let mut out = vec![Check::boolean("beta0_mu0_product", simplify(&(triple.beta0.clone() * mu0.clone())) == Expr::int(-1))];
    if let Some(mu1) = mu1 {
        let two_a0 = at0(&h.a).map(|a| simplify(&a.scale(&Scalar::int(2))));
        let ok0 = at0(mu0).is_some_and(|v| v.is_zero()) && at0(&mu0.diff(t)).is_some() && at0(&mu0.diff(t)) == two_a0;
        out.push(Check::boolean("mu0_initial_conditions", ok0));
        let ok1 = at0(mu1).is_some_and(|v| !v.is_zero()) && at0(&mu1.diff(t)).is_some_and(|v| v.is_zero());
        out.push(Check::boolean("mu1_initial_conditions", ok1));
    } else {
        out.push(Check::boolean("mu0_slope_at_zero", at0(&mu0.diff(t)).is_some()));
    }
    out
}

/// Numeric checks of a triple and its Green function: the three Riccati-type
/// residuals, the characteristic residuals of μ₀ and μ₁ (when μ₁ is known),
/// the Schrödinger residual of G, and the RK4 oracle from the small-t seed.
pub fn propagator_checks(
    h: &QuadraticHamiltonian,
    mu0: &Expr,
    mu1: Option<&Expr>,
    triple: &RiccatiTriple,
    window: (f64, f64),
    pde_h_t: f64,
) -> Vec<ResidualReport> {
    let t = &h.t;
    let mut out = Vec::new();
    let pts = check_points(window, mu0, t);
    if let Some(mu1) = mu1 {
        let eq = h.characteristic().as_general();
        out.push(ode_residual("mu0_characteristic_ode", mu0, &eq, &pts, TOL_SYMBOLIC));
        out.push(ode_residual("mu1_characteristic_ode", mu1, &eq, &pts, TOL_SYMBOLIC));
    }
    out.extend(triple_residuals(triple, h, &pts, 1e-8));
    out.push(schrodinger_check(h, mu0, triple, pde_h_t));
    if let Some(rk) = rk4_oracle(h, triple, &[0.3, 0.5, 1.0], mu1.is_some()) {
        out.extend(rk);
    }
    out
}

/// Sample points for propagator checks: the positive part of the window
/// with 3% margins, where |μ₀| ≥ 0.05.
pub fn check_points(window: (f64, f64), mu0: &Expr, t: &crate::algebra::Symbol) -> Vec<f64> {
    sample_points(clip_window(window), mu0, t)
}

fn clip_window(w: (f64, f64)) -> (f64, f64) {
    let lo = w.0.max(0.0);
    let hi = w.1.min(lo + 1.5);
    let m = 0.03 * (hi - lo);
    (lo + m, hi - m)
}

/// Time step of the standard Schrödinger grid.
pub const PDE_H_T: f64 = 1e-4;
/// Time step for kernels whose phase is steep at the grid's first time.
pub const FINE_PDE_H_T: f64 = 1e-5;

/// Schrödinger residual of G on the standard grid with time step `h_t`.
pub fn schrodinger_check(h: &QuadraticHamiltonian, mu0: &Expr, triple: &RiccatiTriple, h_t: f64) -> ResidualReport {
    let green = build_green(triple, mu0, &h.t);
    let g = |x: f64, y: f64, t: f64| green.eval(x, y, t);
    let coeffs = |t: f64| h.coeffs_at(t);
    let keep = |t: f64| mu0.eval_at(&h.t, t).is_ok_and(|z| z.norm() >= 0.05);
    let grid = PdeGrid { ht: h_t, ..PdeGrid::standard() };
    pde_residual("schrodinger_pde", &g, &coeffs, &grid, &keep, TOL_PDE)
}

/// α₀, β₀, γ₀ against RK4 (log-time, seeded from the t → 0 expansion at
/// t = 1e−7). The β and γ expansions assume μ₀'(0) = 2a(0), so without
/// `normalized` only α is compared. None when a(0), a'(0) or c(0) cannot be
/// evaluated.
pub fn rk4_oracle(h: &QuadraticHamiltonian, triple: &RiccatiTriple, at: &[f64], normalized: bool) -> Option<Vec<ResidualReport>> {
    let t = &h.t;
    let num = |e: &Expr| e.eval_at(t, 0.0).ok().map(|z| z.re).filter(|v| v.is_finite());
    let (a0, da0, c0) = (num(&h.a)?, num(&h.a.diff(t))?, num(&h.c)?);
    if a0 == 0.0 {
        return None;
    }
    let ts = 1e-7;
    let seed = [
        1.0 / (4.0 * a0 * ts) - c0 / (2.0 * a0) - da0 / (8.0 * a0 * a0),
        -1.0 / (2.0 * a0 * ts) + da0 / (4.0 * a0 * a0),
        1.0 / (4.0 * a0 * ts) + c0 / (2.0 * a0) - da0 / (8.0 * a0 * a0),
    ];
    let coeffs = |s: f64| h.coeffs_at(s);
    let desc = format!("t = {at:?}, RK4 in ln t from t = {ts:e}, ds = 1e-3");
    let path = match rk4_riccati_log(&coeffs, ts, seed, 1e-3, at) {
        Ok(p) => p,
        Err(e) => {
            return Some(vec![ResidualReport::new("rk4_oracle", vec![f64::INFINITY], TOL_RK4, format!("{desc}: {e}"), at.len())])
        }
    };
    let rel = |e: &Expr, s: f64, v: f64| {
        e.eval_at(t, s).map(|z| (z.re - v).abs() / z.re.abs().max(1.0)).unwrap_or(f64::INFINITY)
    };
    let col = |e: &Expr, pick: fn(&crate::verify::RiccatiSample) -> f64| path.iter().map(|p| rel(e, p.t, pick(p))).collect::<Vec<_>>();
    let mut out = vec![ResidualReport::new("rk4_alpha", col(&triple.alpha0, |p| p.alpha), TOL_RK4, desc.clone(), 0)];
    if normalized {
        out.push(ResidualReport::new("rk4_beta", col(&triple.beta0, |p| p.beta), TOL_RK4, desc.clone(), 0));
        out.push(ResidualReport::new("rk4_gamma", col(&triple.gamma0, |p| p.gamma), TOL_RK4, desc, 0));
    }
    Some(out)
}

/// Constant terms of the t → 0 expansions at t = 1e−4 within 1e−3, with
/// observed order ≥ 1 (0.9 allowing for rounding).
pub fn asymptotics_check(triple: &RiccatiTriple, h: &QuadraticHamiltonian) -> Check {
    let rows = asymptotic_check(triple, h);
    let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let ok = rows.iter().all(|r| r.deviation <= 1e-3 && (r.order >= 0.9 || r.deviation <= 1e-9));
    Check { name: "asymptotics".into(), max_residual: worst, tolerance: 1e-3, pass: ok }
}
