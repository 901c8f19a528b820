//! `liouvillian`: Kovacic solutions, propagators and report verification from
//! the command line.
//!
//! Exit codes: 0 pass, 2 a check failed, 3 structure outside the algorithm's
//! scope, 4 bad input.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liouvillian::algebra::Q;
use liouvillian::kovacic::CaseLabel;
use liouvillian::parser::{parse_problem, parse_rational};
use liouvillian::pipeline::{run_propagator_with, run_solve, verify_report, PipelineError, Report, Target};
use liouvillian::verify::properties;

#[derive(Parser, Debug)]
#[command(name = "liouvillian", version, about = "Liouvillian solutions and propagators via Kovacic's algorithm")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Replace a check's tolerance, e.g. schrodinger_pde=1e-3
    #[arg(long = "tolerance", value_name = "NAME=VALUE", global = true)]
    tolerances: Vec<String>,
    /// Time step of the Schrödinger residual (1e-4 for Ince, 1e-5 otherwise)
    #[arg(long = "pde-h-t", value_name = "STEP", global = true)]
    pde_h_t: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run Kovacic on a reduced, general or characteristic equation
    Solve(Input),
    /// Build the propagator of a quadratic Hamiltonian and check it
    Propagator(Input),
    /// Same as `propagator ince`
    IncePropagator(InceArgs),
    /// Re-run every check recorded in a JSON report
    Verify { report: PathBuf },
    /// Run the property suites with a seed
    Proptest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scale factor on the number of random cases
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct Input {
    /// Problem file
    file: Option<PathBuf>,
    /// Reduced equation ∂²y = r·y given inline
    #[arg(long)]
    r: Option<String>,
    /// Variable of --r
    #[arg(long, default_value = "tau")]
    var: String,
    /// Override a parameter of the problem, name=rational
    #[arg(long = "param", value_name = "NAME=RATIONAL")]
    params: Vec<String>,
    #[command(subcommand)]
    target: Option<Builtin>,
}

#[derive(Subcommand, Debug)]
enum Builtin {
    /// Ince's equation / degenerate parametric oscillator (m = 1)
    Ince(InceArgs),
    /// Toy propagators 1..5
    Toy {
        #[arg(long)]
        id: u8,
        /// Toy parameter, name=rational
        #[arg(long = "set", value_name = "NAME=RATIONAL")]
        set: Vec<String>,
        #[arg(long)]
        a0: Option<String>,
        #[arg(long = "A")]
        big_a: Option<String>,
        #[arg(long)]
        l: Option<String>,
    },
    /// ∂²μ + tⁿμ = 0
    Tn {
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// A problem file
    File { path: PathBuf },
}

#[derive(Args, Debug)]
struct InceArgs {
    #[arg(long, default_value = "1")]
    lambda: String,
    #[arg(long, default_value = "1")]
    omega: String,
    /// λ = κω; overrides --lambda
    #[arg(long)]
    kappa: Option<String>,
}

enum Failure {
    Input(String),
    Pipeline(PipelineError),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 4,
            Failure::Pipeline(e) => e.exit_code() as u8,
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Pipeline(e)
    }
}

fn rational(what: &str, s: &str) -> Result<Q, Failure> {
    parse_rational(s.trim()).ok_or_else(|| Failure::Input(format!("{what}: '{s}' is not a rational number")))
}

fn assignments(items: &[String]) -> Result<BTreeMap<String, Q>, Failure> {
    let mut out = BTreeMap::new();
    for it in items {
        let (k, v) = it.split_once('=').ok_or_else(|| Failure::Input(format!("expected name=value, got '{it}'")))?;
        out.insert(k.trim().to_string(), rational(k.trim(), v)?);
    }
    Ok(out)
}

fn ince_target(a: &InceArgs) -> Result<Target, Failure> {
    let omega = rational("omega", &a.omega)?;
    let lambda = match &a.kappa {
        Some(k) => rational("kappa", k)? * omega.clone(),
        None => rational("lambda", &a.lambda)?,
    };
    Ok(Target::ince(lambda, omega))
}

fn load_file(path: &PathBuf) -> Result<Target, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let spec = parse_problem(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Target::File { spec, name: path.display().to_string() })
}

fn target(input: &Input) -> Result<Target, Failure> {
    let params = assignments(&input.params)?;
    let t = match (&input.target, &input.file, &input.r) {
        (Some(Builtin::Ince(a)), None, None) => ince_target(a)?,
        (Some(Builtin::Toy { id, set, a0, big_a, l }), None, None) => {
            let mut over = assignments(set)?;
            for (k, v) in [("a0", a0), ("A", big_a), ("l", l)] {
                if let Some(v) = v {
                    over.insert(k.to_string(), rational(k, v)?);
                }
            }
            over.extend(params.clone());
            return Target::toy(*id, &over).map_err(Failure::from);
        }
        (Some(Builtin::Tn { n }), None, None) => Target::Tn { n: *n },
        (Some(Builtin::File { path }), None, None) | (None, Some(path), None) => load_file(path)?,
        (None, None, Some(r)) => Target::Reduced { r: r.clone(), var: input.var.clone() },
        (None, None, None) => return Err(Failure::Input("give a problem file, --r, or a built-in target".into())),
        _ => return Err(Failure::Input("give exactly one of: problem file, --r, built-in target".into())),
    };
    if params.is_empty() {
        return Ok(t);
    }
    match t {
        Target::File { mut spec, name } => {
            for (k, v) in params {
                if !spec.parameters.contains_key(&k) {
                    return Err(Failure::Input(format!("problem has no parameter '{k}'")));
                }
                spec.parameters.insert(k, v);
            }
            Ok(Target::File { spec, name })
        }
        _ => Err(Failure::Input("--param applies to problem files and toys".into())),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish_report(cli: &Cli, mut rep: Report) -> Result<u8, Failure> {
    for (k, v) in assignments_f64(&cli.tolerances)? {
        if !rep.override_tolerance(&k, v) {
            return Err(Failure::Input(format!("report has no check named '{k}'")));
        }
    }
    let body = match cli.format {
        Format::Json => rep.to_json() + "\n",
        Format::Text => rep.to_text(),
    };
    emit(cli, &body)?;
    let unsupported = rep
        .kovacic
        .as_ref()
        .is_some_and(|k| k.case_label == format!("{:?}", CaseLabel::UnsupportedStructure) || k.case_label == format!("{:?}", CaseLabel::UnresolvedCases12));
    Ok(if !rep.passed() {
        2
    } else if unsupported {
        3
    } else {
        0
    })
}

fn assignments_f64(items: &[String]) -> Result<Vec<(String, f64)>, Failure> {
    items
        .iter()
        .map(|it| {
            let (k, v) = it.split_once('=').ok_or_else(|| Failure::Input(format!("expected name=value, got '{it}'")))?;
            let x: f64 = v.trim().parse().map_err(|_| Failure::Input(format!("tolerance '{v}' is not a number")))?;
            if !(x.is_finite() && x >= 0.0) {
                return Err(Failure::Input(format!("tolerance '{v}' must be finite and nonnegative")));
            }
            Ok((k.trim().to_string(), x))
        })
        .collect()
}

fn verify(cli: &Cli, path: &PathBuf) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let rep = Report::from_json(&text).map_err(|e| Failure::Input(format!("{}: report schema: {e}", path.display())))?;
    let out = verify_report(&rep)?;
    let mut s = String::new();
    match cli.format {
        Format::Json => {
            let rows: Vec<_> = out
                .rows
                .iter()
                .map(|(was, now)| serde_json::json!({ "recorded": was, "recomputed": now }))
                .collect();
            let v = serde_json::json!({ "target": rep.target, "passed": out.passed(), "rows": rows, "warnings": out.warnings });
            s = serde_json::to_string_pretty(&v).expect("json") + "\n";
        }
        Format::Text => {
            for (was, now) in &out.rows {
                match now {
                    Some(c) => s += &format!(
                        "[{}] {} recorded {:.3e}, now {:.3e} (tol {:.0e})\n",
                        if c.pass { "pass" } else { "FAIL" },
                        was.name,
                        was.max_residual,
                        c.max_residual,
                        c.tolerance
                    ),
                    None => s += &format!("[FAIL] {} not recomputable\n", was.name),
                }
            }
            for w in &out.warnings {
                s += &format!("warning: {w}\n");
            }
            s += if out.passed() { "verified\n" } else { "verification failed\n" };
        }
    }
    emit(cli, &s)?;
    Ok(if out.passed() { 0 } else { 2 })
}

fn proptest(cli: &Cli, seed: u64, scale: f64) -> Result<u8, Failure> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Failure::Input("--scale must be positive".into()));
    }
    let n = |k: f64| ((k * scale).round() as u32).max(1);
    let outs = vec![
        properties::field_axioms(seed, n(1000.0)),
        properties::parser_round_trip(seed, n(1000.0)),
        properties::simplify_idempotent(seed, n(500.0)),
        properties::differentiate_integrate(seed, n(200.0)),
        properties::normalization_idempotent(seed, n(500.0)),
        properties::fd_convergence(),
        properties::rk4_convergence(),
    ];
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&outs).expect("json") + "\n",
        Format::Text => outs
            .iter()
            .map(|o| format!("[{}] {}: {}\n", if o.passed { "pass" } else { "FAIL" }, o.name, o.detail))
            .collect(),
    };
    emit(cli, &body)?;
    Ok(if outs.iter().all(|o| o.passed) { 0 } else { 2 })
}

fn propagator(cli: &Cli, target: Target) -> Result<u8, Failure> {
    if let Some(h) = cli.pde_h_t {
        if !(h.is_finite() && h > 0.0) {
            return Err(Failure::Input("--pde-h-t must be positive".into()));
        }
    }
    finish_report(cli, run_propagator_with(&target, cli.pde_h_t)?)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Solve(input) => finish_report(cli, run_solve(&target(input)?)?),
        Command::Propagator(input) => propagator(cli, target(input)?),
        Command::IncePropagator(a) => propagator(cli, ince_target(a)?),
        Command::Verify { report } => verify(cli, report),
        Command::Proptest { seed, scale } => proptest(cli, *seed, *scale),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match &f {
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Pipeline(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(f.code())
        }
    }
}
