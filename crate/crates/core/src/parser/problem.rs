//! Line-oriented problem files:
//!
//! ```text
//! # Ince equation at λ = ω = 1
//! kind: characteristic
//! b1: -2*l*tan(l*t)
//! b0: -2*l^2
//! param: l = 1
//! change_of_variable: tan
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{decimal_text, Ast};
use super::convert::{identifiers, to_expr, ConvertError};
use super::parse::{parse_expression, ParseError};
use crate::algebra::Q;
use crate::liouville::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    ReducedOde,
    GeneralOde,
    RiccatiGeneral,
    Hamiltonian,
    Characteristic,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::ReducedOde => "reduced-ode",
            ProblemKind::GeneralOde => "general-ode",
            ProblemKind::RiccatiGeneral => "riccati-general",
            ProblemKind::Hamiltonian => "hamiltonian",
            ProblemKind::Characteristic => "characteristic",
        }
    }
    pub fn from_name(s: &str) -> Option<Self> {
        [
            ProblemKind::ReducedOde,
            ProblemKind::GeneralOde,
            ProblemKind::RiccatiGeneral,
            ProblemKind::Hamiltonian,
            ProblemKind::Characteristic,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
    pub fn required_roles(self) -> &'static [&'static str] {
        match self {
            ProblemKind::ReducedOde => &["r"],
            ProblemKind::GeneralOde | ProblemKind::Characteristic => &["b1", "b0"],
            ProblemKind::RiccatiGeneral => &["a0", "a1", "a2"],
            ProblemKind::Hamiltonian => &["a", "b", "c"],
        }
    }
    /// `a` on a characteristic problem supplies a(t) for the μ₀ normalization.
    pub fn optional_roles(self) -> &'static [&'static str] {
        match self {
            ProblemKind::Characteristic => &["a"],
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub var: String,
    pub coefficients: BTreeMap<String, String>,
    pub parameters: BTreeMap<String, Q>,
    pub change_of_variable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("line {line}: expected `key: value`, got {text:?}")]
    BadLine { line: usize, text: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key '{key}'")]
    Duplicate { line: usize, key: String },
    #[error("missing `kind:` header")]
    MissingKind,
    #[error("unknown kind '{0}'")]
    UnknownKind(String),
    #[error("missing role '{0}'")]
    MissingRole(String),
    #[error("line {line}: bad parameter: {reason}")]
    BadParameter { line: usize, reason: String },
    #[error("role '{role}': unbound parameter '{name}'")]
    UnboundParameter { role: String, name: String },
    #[error("unknown change-of-variable key '{0}'")]
    UnknownCatalogKey(String),
    #[error("role '{role}': {source}")]
    Syntax { role: String, source: ParseError },
    #[error("role '{role}': {source}")]
    Convert { role: String, source: ConvertError },
}

const RESERVED: [&str; 3] = ["i", "x", "y"];

/// `5/3`, `-1`, `0.25`
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b.trim()),
        None => (false, s),
    };
    let v = if let Some((n, d)) = body.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().ok()?;
        let d: num_bigint::BigInt = d.trim().parse().ok()?;
        if d == 0.into() {
            return None;
        }
        Q::new(n, d)
    } else {
        let ast = parse_expression(body).ok()?;
        match ast.kind {
            super::ast::AstKind::Num(x) => x,
            _ => return None,
        }
    };
    Some(if neg { -v } else { v })
}

pub fn rational_text(x: &Q) -> String {
    if x.is_integer() {
        return x.to_string();
    }
    match decimal_text(&num_traits::Signed::abs(x)) {
        Some(d) if x.denom() <= &num_bigint::BigInt::from(100) && d.len() <= 6 => {
            if num_traits::Signed::is_negative(x) {
                format!("-{d}")
            } else {
                d
            }
        }
        _ => format!("{}/{}", x.numer(), x.denom()),
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemSpec, ProblemError> {
    let mut kind = None;
    let mut var = None;
    let mut coefficients = BTreeMap::new();
    let mut parameters = BTreeMap::new();
    let mut cov = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once(':')
            .map(|(a, b)| (a.trim(), b.trim()))
            .ok_or_else(|| ProblemError::BadLine { line, text: raw.to_string() })?;
        match key {
            "kind" => {
                if kind.is_some() {
                    return Err(ProblemError::Duplicate { line, key: key.into() });
                }
                kind = Some(ProblemKind::from_name(value).ok_or_else(|| ProblemError::UnknownKind(value.into()))?);
            }
            "var" => var = Some(value.to_string()),
            "change_of_variable" => cov = Some(value.to_string()),
            "param" => {
                let (name, v) = value
                    .split_once('=')
                    .ok_or_else(|| ProblemError::BadParameter { line, reason: "expected `name = value`".into() })?;
                let name = name.trim().to_string();
                if RESERVED.contains(&name.as_str()) || name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(ProblemError::BadParameter { line, reason: format!("'{name}' is not a valid parameter name") });
                }
                let val = parse_rational(v)
                    .ok_or_else(|| ProblemError::BadParameter { line, reason: format!("'{}' is not a rational", v.trim()) })?;
                if parameters.insert(name.clone(), val).is_some() {
                    return Err(ProblemError::Duplicate { line, key: name });
                }
            }
            role => {
                if coefficients.insert(role.to_string(), value.to_string()).is_some() {
                    return Err(ProblemError::Duplicate { line, key: role.into() });
                }
            }
        }
    }
    let kind = kind.ok_or(ProblemError::MissingKind)?;
    let spec = ProblemSpec { kind, var: var.unwrap_or_else(|| "t".into()), coefficients, parameters, change_of_variable: cov };
    spec.validate()?;
    Ok(spec)
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind) -> Self {
        ProblemSpec {
            kind,
            var: "t".into(),
            coefficients: BTreeMap::new(),
            parameters: BTreeMap::new(),
            change_of_variable: None,
        }
    }
    pub fn with(mut self, role: &str, text: &str) -> Self {
        self.coefficients.insert(role.into(), text.into());
        self
    }
    pub fn param(mut self, name: &str, v: Q) -> Self {
        self.parameters.insert(name.into(), v);
        self
    }
    pub fn cov(mut self, key: &str) -> Self {
        self.change_of_variable = Some(key.into());
        self
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let req = self.kind.required_roles();
        let opt = self.kind.optional_roles();
        for r in req {
            if !self.coefficients.contains_key(*r) {
                return Err(ProblemError::MissingRole(r.to_string()));
            }
        }
        for role in self.coefficients.keys() {
            if !req.contains(&role.as_str()) && !opt.contains(&role.as_str()) {
                return Err(ProblemError::UnknownKey { line: 0, key: role.clone() });
            }
        }
        for (role, text) in &self.coefficients {
            let ast = self.ast(role, text)?;
            for (name, _) in identifiers(&ast) {
                if name != self.var && !self.parameters.contains_key(&name) {
                    return Err(ProblemError::UnboundParameter { role: role.clone(), name });
                }
            }
            to_expr(&ast, &self.parameters).map_err(|source| ProblemError::Convert { role: role.clone(), source })?;
        }
        if let Some(k) = &self.change_of_variable {
            if !crate::transforms::Catalog::builtin().accepts(k) {
                return Err(ProblemError::UnknownCatalogKey(k.clone()));
            }
        }
        Ok(())
    }

    fn ast(&self, role: &str, text: &str) -> Result<Ast, ProblemError> {
        parse_expression(text).map_err(|source| ProblemError::Syntax { role: role.into(), source })
    }

    /// Coefficient with parameters substituted; zero when an optional role is absent.
    pub fn expr(&self, role: &str) -> Result<Option<Expr>, ProblemError> {
        let Some(text) = self.coefficients.get(role) else { return Ok(None) };
        let ast = self.ast(role, text)?;
        to_expr(&ast, &self.parameters).map(Some).map_err(|source| ProblemError::Convert { role: role.into(), source })
    }

    pub fn require(&self, role: &str) -> Result<Expr, ProblemError> {
        self.expr(role)?.ok_or_else(|| ProblemError::MissingRole(role.into()))
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: {}", self.kind.name())?;
        if self.var != "t" {
            writeln!(f, "var: {}", self.var)?;
        }
        for (name, v) in &self.parameters {
            writeln!(f, "param: {name} = {}", rational_text(v))?;
        }
        for (role, text) in &self.coefficients {
            // canonical text of the expression tree
            let shown = parse_expression(text).map(|a| a.to_string()).unwrap_or_else(|_| text.clone());
            writeln!(f, "{role}: {shown}")?;
        }
        if let Some(c) = &self.change_of_variable {
            writeln!(f, "change_of_variable: {c}")?;
        }
        Ok(())
    }
}

pub fn pretty_print_problem(p: &ProblemSpec) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qf};

    const SESU2: &str = "\
# quadratic Hamiltonian
kind: hamiltonian
param: l = 1
param: w = 1
param: m = 1
a: (1 + (l/w)*cos(2*w*t))/(2*m)
b: (m*w^2/2)*(1 - (l/w)*cos(2*w*t))
c: (l/2)*sin(2*w*t)
";

    #[test]
    fn hamiltonian_file() {
        let p = parse_problem(SESU2).unwrap();
        assert_eq!(p.kind, ProblemKind::Hamiltonian);
        assert_eq!(p.parameters["l"], q(1));
        let a = p.require("a").unwrap();
        assert_eq!(a.eval_at(&crate::algebra::sym("t"), 0.0).unwrap().re, 1.0);
    }

    #[test]
    fn reduced_zero_is_valid() {
        let p = parse_problem("kind: reduced-ode\nr: 0\n").unwrap();
        assert!(p.require("r").unwrap().is_zero());
    }

    #[test]
    fn missing_role() {
        let text = SESU2.replace("c: (l/2)*sin(2*w*t)\n", "");
        assert_eq!(parse_problem(&text).unwrap_err(), ProblemError::MissingRole("c".into()));
    }

    #[test]
    fn unbound_parameter() {
        let e = parse_problem("kind: reduced-ode\nr: k/t^2\n").unwrap_err();
        assert!(matches!(e, ProblemError::UnboundParameter { .. }));
    }

    #[test]
    fn unknown_catalog_key() {
        let e = parse_problem("kind: reduced-ode\nr: 0\nchange_of_variable: sec\n").unwrap_err();
        assert_eq!(e, ProblemError::UnknownCatalogKey("sec".into()));
    }

    #[test]
    fn round_trip() {
        let p = parse_problem(SESU2).unwrap().param("kappa", qf(5, 3)).cov("tan");
        let again = parse_problem(&p.to_string()).unwrap();
        assert_eq!(p.kind, again.kind);
        assert_eq!(p.parameters, again.parameters);
        for (k, v) in &p.coefficients {
            assert_eq!(parse_expression(v).unwrap(), parse_expression(&again.coefficients[k]).unwrap());
        }
        assert_eq!(again.to_string(), p.to_string());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("5/3"), Some(qf(5, 3)));
        assert_eq!(parse_rational("-0.25"), Some(qf(-1, 4)));
        assert_eq!(parse_rational("x"), None);
    }
}
