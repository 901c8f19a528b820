//! Numeric oracles: ODE residuals with exact derivatives, finite-difference
//! PDE residuals, classical RK4 for the Riccati-type system, Wronskians.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Symbol;
use crate::liouville::{EvalError, Expr};
use crate::transforms::GeneralOde2;

pub mod properties;

pub const TOL_SYMBOLIC: f64 = 1e-10;
pub const TOL_RK4: f64 = 1e-6;
pub const TOL_PDE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("step size underflow near t = {t}: the solution left the finite range")]
    StepSizeUnderflow { t: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub residuals: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub grid: String,
    /// points dropped because the expression was singular there
    pub excluded: usize,
}

/// The summary that goes into JSON reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(name: &str, residuals: Vec<f64>, tolerance: f64, grid: String, excluded: usize) -> Self {
        let max = residuals.iter().cloned().fold(0.0, f64::max);
        let mean = if residuals.is_empty() { 0.0 } else { residuals.iter().sum::<f64>() / residuals.len() as f64 };
        // NaN never passes, and neither does an empty sample
        let pass = !residuals.is_empty() && residuals.iter().all(|r| r.is_finite()) && max <= tolerance;
        ResidualReport { name: name.into(), residuals, max, mean, tolerance, pass, grid, excluded }
    }
    /// Non-finite maxima are stored as f64::MAX so the JSON stays numeric.
    pub fn check(&self) -> Check {
        let worst = self.residuals.iter().any(|r| !r.is_finite());
        let max = if worst || !self.max.is_finite() { f64::MAX } else { self.max };
        Check { name: self.name.clone(), max_residual: max, tolerance: self.tolerance, pass: self.pass }
    }
}

impl Check {
    /// A pass/fail fact that has no numeric residual of its own.
    pub fn boolean(name: &str, ok: bool) -> Check {
        Check { name: name.into(), max_residual: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, pass: ok }
    }
    pub fn renamed(mut self, name: &str) -> Check {
        self.name = name.into();
        self
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn describe(points: &[f64]) -> String {
    match (points.first(), points.last()) {
        (Some(a), Some(b)) => format!("{} points in [{a}, {b}]", points.len()),
        _ => "empty".into(),
    }
}

/// |∂²μ + b₁∂μ + b₀μ| / (1 + |μ| + |∂μ| + |∂²μ|) with exact derivatives.
pub fn ode_residual(name: &str, mu: &Expr, eq: &GeneralOde2, points: &[f64], tolerance: f64) -> ResidualReport {
    let v = &eq.var;
    let d1 = mu.diff(v);
    let d2 = d1.diff(v);
    let vals: Vec<Option<f64>> = points
        .par_iter()
        .map(|&t| {
            let m = mu.eval_at(v, t).ok()?;
            let m1 = d1.eval_at(v, t).ok()?;
            let m2 = d2.eval_at(v, t).ok()?;
            let b1 = eq.b1.eval_at(v, t).ok()?;
            let b0 = eq.b0.eval_at(v, t).ok()?;
            Some((m2 + b1 * m1 + b0 * m).norm() / (1.0 + m.norm() + m1.norm() + m2.norm()))
        })
        .collect();
    let excluded = vals.iter().filter(|x| x.is_none()).count();
    ResidualReport::new(name, vals.into_iter().flatten().collect(), tolerance, describe(points), excluded)
}

/// ∂²f by the five-point stencil (fourth order).
pub fn fd_second(f: &dyn Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    (-f(x + 2.0 * h) + f(x + h) * 16.0 - f(x) * 30.0 + f(x - h) * 16.0 - f(x - 2.0 * h)) / (12.0 * h * h)
}

/// ∂f by the five-point stencil (fourth order).
pub fn fd_first4(f: &dyn Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    (-f(x + 2.0 * h) + f(x + h) * 8.0 - f(x - h) * 8.0 + f(x - 2.0 * h)) / (12.0 * h)
}

/// ∂f by the central difference (second order).
pub fn fd_first2(f: &dyn Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Coefficients a, b, c of H = a p² + b x² + c(px + xp) at time t.
pub type CoefficientFn<'a> = &'a (dyn Fn(f64) -> Option<[f64; 3]> + Sync);
/// G(x, y, t)
pub type KernelFn<'a> = &'a (dyn Fn(f64, f64, f64) -> Option<Complex64> + Sync);

#[derive(Clone, Debug)]
pub struct PdeGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub ts: Vec<f64>,
    pub hx: f64,
    pub ht: f64,
}

impl PdeGrid {
    /// x, y ∈ [−1, 1], t ∈ [0.2, 1.2], 5 points each, h_x = 1e−3, h_t = 1e−4.
    pub fn standard() -> Self {
        PdeGrid { xs: linspace(-1.0, 1.0, 5), ys: linspace(-1.0, 1.0, 5), ts: linspace(0.2, 1.2, 5), hx: 1e-3, ht: 1e-4 }
    }
}

/// Relative residual |i∂_tG − (−a∂²_xG + bx²G − icG − 2icx∂_xG)| / |G| on
/// the grid, skipping times where `keep_t` is false.
pub fn pde_residual(
    name: &str,
    green: KernelFn,
    coeffs: CoefficientFn,
    grid: &PdeGrid,
    keep_t: &(dyn Fn(f64) -> bool + Sync),
    tolerance: f64,
) -> ResidualReport {
    let i = Complex64::i();
    let mut pts = Vec::new();
    let mut dropped = 0;
    for &t in &grid.ts {
        if !keep_t(t) {
            dropped += grid.xs.len() * grid.ys.len();
            continue;
        }
        for &x in &grid.xs {
            for &y in &grid.ys {
                pts.push((x, y, t));
            }
        }
    }
    let vals: Vec<Option<f64>> = pts
        .par_iter()
        .map(|&(x, y, t)| {
            let [a, b, c] = coeffs(t)?;
            let g = green(x, y, t)?;
            let ok = std::cell::Cell::new(true);
            let gx = |xx: f64| {
                green(xx, y, t).unwrap_or_else(|| {
                    ok.set(false);
                    Complex64::new(f64::NAN, 0.0)
                })
            };
            let gt = |tt: f64| {
                green(x, y, tt).unwrap_or_else(|| {
                    ok.set(false);
                    Complex64::new(f64::NAN, 0.0)
                })
            };
            let g_xx = fd_second(&gx, x, grid.hx);
            let g_x = fd_first4(&gx, x, grid.hx);
            let g_t = fd_first2(&gt, t, grid.ht);
            if !ok.get() {
                return None;
            }
            let rhs = -g_xx * a + g * (b * x * x) - i * c * g - i * (2.0 * c * x) * g_x;
            Some((i * g_t - rhs).norm() / g.norm())
        })
        .collect();
    let excluded = dropped + vals.iter().filter(|v| v.is_none()).count();
    let desc = format!(
        "{}x{}x{} (x,y,t) grid, h_x = {}, h_t = {}, {} points excluded",
        grid.xs.len(),
        grid.ys.len(),
        grid.ts.len(),
        grid.hx,
        grid.ht,
        excluded
    );
    ResidualReport::new(name, vals.into_iter().flatten().collect(), tolerance, desc, excluded)
}

/// One (t, α, β, γ) sample of an RK4 path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiccatiSample {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Classical RK4 for y' = f(t, y), reporting the state at each requested time
/// (ascending, ≥ t0). Each segment is split into equal steps no larger than
/// `step`.
pub fn rk4<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> Option<[f64; N]>,
    t0: f64,
    y0: [f64; N],
    step: f64,
    at: &[f64],
) -> Result<Vec<[f64; N]>, VerifyError> {
    let mut t = t0;
    let mut y = y0;
    let mut out = Vec::with_capacity(at.len());
    let axpy = |y: &[f64; N], k: &[f64; N], h: f64| -> [f64; N] { std::array::from_fn(|j| y[j] + h * k[j]) };
    for &target in at {
        let span = target - t;
        let n = (span / step).ceil().max(0.0) as usize;
        if n > 0 {
            let h = span / n as f64;
            for _ in 0..n {
                let bad = || VerifyError::StepSizeUnderflow { t };
                let k1 = f(t, &y).ok_or_else(bad)?;
                let k2 = f(t + h / 2.0, &axpy(&y, &k1, h / 2.0)).ok_or_else(bad)?;
                let k3 = f(t + h / 2.0, &axpy(&y, &k2, h / 2.0)).ok_or_else(bad)?;
                let k4 = f(t + h, &axpy(&y, &k3, h)).ok_or_else(bad)?;
                y = std::array::from_fn(|j| y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
                t += h;
                if y.iter().any(|v| !v.is_finite() || v.abs() > 1e12) {
                    return Err(VerifyError::StepSizeUnderflow { t });
                }
            }
        }
        t = target;
        out.push(y);
    }
    Ok(out)
}

/// α' = −b − 4cα − 4aα², β' = −(2c + 4aα)β, γ' = −aβ², from `seed` at
/// `t_start`.
pub fn rk4_riccati_system(
    coeffs: CoefficientFn,
    t_start: f64,
    seed: [f64; 3],
    step: f64,
    at: &[f64],
) -> Result<Vec<RiccatiSample>, VerifyError> {
    let f = |t: f64, y: &[f64; 3]| -> Option<[f64; 3]> {
        let [a, b, c] = coeffs(t)?;
        let [al, be, _] = *y;
        Some([-b - 4.0 * c * al - 4.0 * a * al * al, -(2.0 * c + 4.0 * a * al) * be, -a * be * be])
    };
    let path = rk4(&f, t_start, seed, step, at)?;
    Ok(at
        .iter()
        .zip(path)
        .map(|(&t, [alpha, beta, gamma])| RiccatiSample { t, alpha, beta, gamma })
        .collect())
}

/// The same system stepped in s = ln t with step `ds`, so that a seed taken
/// very close to the t = 0 singularity costs a logarithmic number of steps.
pub fn rk4_riccati_log(
    coeffs: CoefficientFn,
    t_start: f64,
    seed: [f64; 3],
    ds: f64,
    at: &[f64],
) -> Result<Vec<RiccatiSample>, VerifyError> {
    let f = |s: f64, y: &[f64; 3]| -> Option<[f64; 3]> {
        let t = s.exp();
        let [a, b, c] = coeffs(t)?;
        let [al, be, _] = *y;
        Some([
            t * (-b - 4.0 * c * al - 4.0 * a * al * al),
            -t * (2.0 * c + 4.0 * a * al) * be,
            -t * a * be * be,
        ])
    };
    let logs: Vec<f64> = at.iter().map(|t| t.ln()).collect();
    let path = rk4(&f, t_start.ln(), seed, ds, &logs).map_err(|e| match e {
        VerifyError::StepSizeUnderflow { t } => VerifyError::StepSizeUnderflow { t: t.exp() },
        other => other,
    })?;
    Ok(at
        .iter()
        .zip(path)
        .map(|(&t, [alpha, beta, gamma])| RiccatiSample { t, alpha, beta, gamma })
        .collect())
}

/// W = f∂g − g∂f at t.
pub fn wronskian(f: &Expr, g: &Expr, v: &Symbol, t: f64) -> Result<Complex64, EvalError> {
    Ok(f.eval_at(v, t)? * g.diff(v).eval_at(v, t)? - g.eval_at(v, t)? * f.diff(v).eval_at(v, t)?)
}

/// Composite Simpson on [a, b] with 2m panels.
pub fn simpson(f: &dyn Fn(f64) -> Option<f64>, a: f64, b: f64, m: usize) -> Option<f64> {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a)? + f(b)?;
    for k in 1..n {
        s += f(a + k as f64 * h)? * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    Some(s * h / 3.0)
}

/// Abel's identity W(t) = W(t₀)·exp(−∫b₁) at each point; returns the report
/// and the signed W(t₀).
pub fn wronskian_check(name: &str, f: &Expr, g: &Expr, eq: &GeneralOde2, t0: f64, points: &[f64], tolerance: f64) -> (ResidualReport, Complex64) {
    let v = &eq.var;
    let w0 = match wronskian(f, g, v, t0) {
        Ok(w) => w,
        Err(_) => return (ResidualReport::new(name, vec![f64::NAN], tolerance, describe(points), points.len()), Complex64::new(f64::NAN, 0.0)),
    };
    let b1 = |t: f64| eq.b1.eval_at(v, t).ok().map(|z| z.re);
    let vals: Vec<Option<f64>> = points
        .par_iter()
        .map(|&t| {
            let w = wronskian(f, g, v, t).ok()?;
            let integral = simpson(&b1, t0, t, 200)?;
            Some((w - w0 * (-integral).exp()).norm() / (1.0 + w.norm()))
        })
        .collect();
    let excluded = vals.iter().filter(|v| v.is_none()).count();
    (ResidualReport::new(name, vals.into_iter().flatten().collect(), tolerance, describe(points), excluded), w0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sym;
    use crate::parser::parse_expr;

    fn ode(b1: &str, b0: &str) -> GeneralOde2 {
        GeneralOde2 { var: sym("t"), b1: parse_expr(b1).unwrap(), b0: parse_expr(b0).unwrap() }
    }

    #[test]
    fn ode_residual_examples() {
        let pts = linspace(0.1, 1.4, 50);
        let r = ode_residual("line", &parse_expr("t").unwrap(), &ode("0", "0"), &pts, TOL_SYMBOLIC);
        assert!(r.pass && r.max == 0.0);
        // y'' − y = 0 with y = sin t: deliberate failure
        let r = ode_residual("wrong sign", &parse_expr("sin(t)").unwrap(), &ode("0", "-1"), &pts, TOL_SYMBOLIC);
        assert!(!r.pass);
        // Ince characteristic equation at λ = ω = 1: μ'' + 2tan(t)μ' − 2μ = 0
        let eq = ode("2*tan(t)", "-2");
        let mu = parse_expr("sinh(t)*cos(t)+cosh(t)*sin(t)").unwrap();
        let r = ode_residual("mu0", &mu, &eq, &pts, TOL_SYMBOLIC);
        assert!(r.pass, "{}", r.max);
    }

    #[test]
    fn free_particle_kernel() {
        // a = 1/4: G = (πi t)^{−1/2} exp(i (x−y)²/t)
        let g = |x: f64, y: f64, t: f64| {
            let mu0 = t / 2.0;
            let pre = (Complex64::new(0.0, 2.0 * std::f64::consts::PI * mu0)).powf(-0.5);
            Some(pre * (Complex64::i() * (x - y) * (x - y) / (2.0 * mu0)).exp())
        };
        let coeffs = |_: f64| Some([0.25, 0.0, 0.0]);
        // the free phase is four times steeper than Ince's near t = 0.2
        let grid = PdeGrid { ts: linspace(0.6, 1.6, 5), ..PdeGrid::standard() };
        let r = pde_residual("free", &g, &coeffs, &grid, &|_| true, 1e-5);
        assert!(r.pass, "{}", r.max);
        let g2 = |x: f64, y: f64, t: f64| g(x, y, t).map(|z| z * 2.0);
        let r2 = pde_residual("free x2", &g2, &coeffs, &grid, &|_| true, 1e-5);
        assert!((r.max - r2.max).abs() <= 1e-9 * r.max.max(1e-12));
    }

    #[test]
    fn rk4_equilibrium() {
        let coeffs = |_: f64| Some([1.0, 0.0, 0.0]);
        let path = rk4_riccati_system(&coeffs, 0.0, [0.0, 1.0, 0.0], 1e-2, &[0.5, 1.0]).unwrap();
        assert!(path.iter().all(|s| s.alpha == 0.0 && s.beta == 1.0));
        assert!((path[1].gamma + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rk4_blow_up_is_reported() {
        // α' = −4α², α(0) = −1 blows up at t = 1/4
        let coeffs = |_: f64| Some([1.0, 0.0, 0.0]);
        let e = rk4_riccati_system(&coeffs, 0.0, [-1.0, 1.0, 0.0], 1e-3, &[0.5]).unwrap_err();
        assert!(matches!(e, VerifyError::StepSizeUnderflow { .. }));
    }

    #[test]
    fn log_time_free_particle() {
        // a = 1/4: α = 1/t, β = −2/t, γ = 1/t exactly
        let coeffs = |_: f64| Some([0.25, 0.0, 0.0]);
        let t0 = 1e-7;
        let path = rk4_riccati_log(&coeffs, t0, [1.0 / t0, -2.0 / t0, 1.0 / t0], 1e-3, &[0.3, 1.0]).unwrap();
        for s in path {
            assert!((s.alpha * s.t - 1.0).abs() < 1e-9);
            assert!((s.beta * s.t + 2.0).abs() < 1e-9);
            assert!((s.gamma * s.t - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rk4_fourth_order_on_linear_kernel() {
        // a = (t+1)/2: α = 1/(t²+2t)
        let coeffs = |t: f64| Some([(t + 1.0) / 2.0, 0.0, 0.0]);
        let exact = |t: f64| 1.0 / (t * t + 2.0 * t);
        let err = |h: f64| {
            let s = rk4_riccati_system(&coeffs, 0.5, [exact(0.5), -exact(0.5), exact(0.5) / 4.0], h, &[1.5]).unwrap();
            (s[0].alpha - exact(1.5)).abs()
        };
        let ratio = err(0.05) / err(0.025);
        assert!((12.0..=20.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn wronskian_examples() {
        let t = sym("t");
        let f = parse_expr("sin(t)/2").unwrap();
        let g = parse_expr("2*cos(t)").unwrap();
        let (r, w0) = wronskian_check("W", &f, &g, &ode("0", "1"), 0.3, &linspace(0.1, 1.5, 10), 1e-8);
        assert!(r.pass);
        assert!((w0.re + 1.0).abs() < 1e-12);
        assert_eq!(wronskian(&f, &f, &t, 0.7).unwrap().norm(), 0.0);
        let eq = ode("2*tan(t)", "-2");
        let m0 = parse_expr("sinh(t)*cos(t)+cosh(t)*sin(t)").unwrap();
        let m1 = parse_expr("sinh(t)*sin(t)+cosh(t)*cos(t)").unwrap();
        let (r, _) = wronskian_check("W ince", &m0, &m1, &eq, 0.0, &linspace(0.1, 1.2, 12), 1e-8);
        assert!(r.pass, "{}", r.max);
    }
}
