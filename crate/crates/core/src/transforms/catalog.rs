//! Change-of-variable catalog. Entries are plain data; new ones can be
//! loaded from JSON with [`Catalog::from_json`] without touching code.

use serde::{Deserialize, Serialize};

use crate::algebra::{sym, Symbol, Q};
use crate::liouville::{Expr, Family, TrigRewrite};
use crate::parser::{parse_expr, parse_rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub key: String,
    pub family: Family,
    /// τ as a function of t, written with the frequency `nu`
    pub forward: String,
    /// α = (∂_t τ)² as a function of τ
    pub alpha: String,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

const BUILTIN: &str = r#"{
  "entries": [
    {"key": "tan", "family": "tangent", "forward": "tan(nu*t)", "alpha": "nu^2*(1+tau^2)^2",
     "description": "tau = tan(nu t); cos 2nu t = (1-tau^2)/(1+tau^2), sin 2nu t = 2tau/(1+tau^2)"},
    {"key": "exp", "family": "exponential", "forward": "exp(nu*t)", "alpha": "nu^2*tau^2",
     "description": "tau = exp(nu t)"},
    {"key": "cos", "family": "cosine", "forward": "cos(nu*t)", "alpha": "nu^2*(1-tau^2)",
     "description": "tau = cos(nu t), sin(nu t) = sqrt(1-tau^2) on (0, pi/nu)"},
    {"key": "sin", "family": "sine", "forward": "sin(nu*t)", "alpha": "nu^2*(1-tau^2)",
     "description": "tau = sin(nu t), cos(nu t) = sqrt(1-tau^2) on (-pi/(2nu), pi/(2nu))"},
    {"key": "identity", "family": "identity", "forward": "t", "alpha": "1",
     "description": "tau = t"}
  ]
}"#;

impl Catalog {
    pub fn builtin() -> Catalog {
        Catalog::from_json(BUILTIN).expect("builtin catalog is valid")
    }
    pub fn from_json(text: &str) -> Result<Catalog, serde_json::Error> {
        serde_json::from_str(text)
    }
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
    pub fn entry(&self, key: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.key == key)
    }
    /// `key` or `key:ν` with ν rational.
    pub fn accepts(&self, spec: &str) -> bool {
        split_key(spec).is_some_and(|(k, nu)| self.entry(k).is_some() && nu.is_none_or(|s| parse_rational(s).is_some()))
    }
}

pub fn split_key(spec: &str) -> Option<(&str, Option<&str>)> {
    let spec = spec.trim();
    if spec.is_empty() {
        return None;
    }
    Some(match spec.split_once(':') {
        Some((k, v)) => (k.trim(), Some(v.trim())),
        None => (spec, None),
    })
}

impl CatalogEntry {
    pub fn rewrite(&self, nu: Q, t: &Symbol, tau: &Symbol) -> TrigRewrite {
        TrigRewrite::new(self.family, nu, t, tau)
    }

    /// |α(τ(t)) − (∂_t τ)²| at a few points inside the window, for frequency ν.
    pub fn check_alpha(&self, nu: &Q) -> f64 {
        let t = sym("t");
        let tau = sym("tau");
        let nu_e = Expr::rational(nu.clone());
        let fwd = parse_expr(&self.forward).expect("catalog forward").subs(&sym("nu"), &nu_e);
        let alpha = parse_expr(&self.alpha).expect("catalog alpha").subs(&sym("nu"), &nu_e);
        let rw = self.rewrite(nu.clone(), &t, &tau);
        let (lo, hi) = rw.window();
        let (lo, hi) = (lo.max(-1.0), hi.min(1.0));
        let mut worst: f64 = 0.0;
        for k in 1..8 {
            let x = lo + (hi - lo) * (k as f64) / 8.0;
            let d = fwd.diff(&t).eval_at(&t, x).unwrap();
            let tv = fwd.eval_at(&t, x).unwrap();
            let a = alpha.eval_at(&tau, tv.re).unwrap();
            worst = worst.max((a - d * d).norm() / (1.0 + a.norm()));
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qf};

    #[test]
    fn alpha_matches_forward_map() {
        let cat = Catalog::builtin();
        for e in &cat.entries {
            for nu in [q(1), qf(1, 2), q(3)] {
                assert!(e.check_alpha(&nu) < 1e-10, "{} at ν={nu}", e.key);
            }
        }
    }

    #[test]
    fn keys() {
        let cat = Catalog::builtin();
        assert!(cat.accepts("tan"));
        assert!(cat.accepts("tan:1/2"));
        assert!(!cat.accepts("sec"));
        assert!(!cat.accepts("tan:w"));
    }

    #[test]
    fn json_round_trip() {
        let cat = Catalog::builtin();
        assert_eq!(Catalog::from_json(&cat.to_json()).unwrap(), cat);
    }
}
