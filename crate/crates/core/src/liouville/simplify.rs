//! Normal form used for structural comparison of solutions.
//!
//! Each pass: tan → sin/cos, hyperbolics → exponentials, full expansion,
//! log pairs → arctan, power pairs → exp(arctan), trig∘arctan → algebraic,
//! then exponential pairs back to cosh/sinh. Passes repeat to a fixpoint.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::expr::{Expr, Func, Node};
use crate::algebra::{Scalar, Q};

const MAX_PASSES: usize = 12;

pub fn simplify(e: &Expr) -> Expr {
    let mut cur = e.clone();
    for _ in 0..MAX_PASSES {
        let next = pass(&cur);
        if next == cur {
            return next;
        }
        cur = next;
    }
    cur
}

fn pass(e: &Expr) -> Expr {
    let e = e.transform(&mut |x| match x.node() {
        Node::Func(Func::Tan, a) => Expr::sin(a.clone()) / Expr::cos(a.clone()),
        Node::Func(Func::Cosh, a) => (Expr::exp(a.clone()) + Expr::exp(-a)).scale(&Scalar::frac(1, 2)),
        Node::Func(Func::Sinh, a) => (Expr::exp(a.clone()) - Expr::exp(-a)).scale(&Scalar::frac(1, 2)),
        _ => x,
    });
    let e = expand(&e);
    let e = e.transform(&mut |x| match x.node() {
        Node::Add(ts) => log_pairs(ts),
        Node::Mul(fs) => power_pairs(fs),
        Node::Func(Func::Cos, a) => match a.node() {
            Node::Func(Func::Arctan, z) => (Expr::one() + z.powi(2)).powi(-1).sqrt(),
            _ => x,
        },
        Node::Func(Func::Sin, a) => match a.node() {
            Node::Func(Func::Arctan, z) => z * &(Expr::one() + z.powi(2)).powi(-1).sqrt(),
            _ => x,
        },
        _ => x,
    });
    let e = expand(&e);
    e.transform(&mut |x| match x.node() {
        Node::Add(ts) => exp_pairs(ts),
        _ => x,
    })
}

/// Distribute products over sums and expand positive integer powers of sums.
pub fn expand(e: &Expr) -> Expr {
    e.transform(&mut |x| match x.node() {
        Node::Mul(fs) => {
            let mut acc: Vec<Expr> = vec![Expr::one()];
            for f in fs {
                let terms: Vec<Expr> = match f.node() {
                    Node::Add(ts) => ts.clone(),
                    _ => vec![f.clone()],
                };
                let mut next = Vec::with_capacity(acc.len() * terms.len());
                for a in &acc {
                    for t in &terms {
                        next.push(a * t);
                    }
                }
                acc = next;
            }
            Expr::add(acc)
        }
        Node::Pow(b, p) => match (b.node(), p.as_i64()) {
            (Node::Add(ts), Some(n)) if n > 1 => {
                let mut acc: Vec<Expr> = ts.clone();
                for _ in 1..n {
                    let mut next = Vec::with_capacity(acc.len() * ts.len());
                    for a in &acc {
                        for t in ts {
                            next.push(expand(&(a * t)));
                        }
                    }
                    let sum = Expr::add(next);
                    acc = match sum.node() {
                        Node::Add(xs) => xs.clone(),
                        _ => vec![sum.clone()],
                    };
                }
                Expr::add(acc)
            }
            _ => x,
        },
        _ => x,
    })
}

/// c·log(1 − iz) − c·log(1 + iz), c = ki/2, becomes k·arctan z.
fn log_pairs(ts: &[Expr]) -> Expr {
    let mut logs: Vec<(usize, Scalar, Expr)> = Vec::new();
    for (k, t) in ts.iter().enumerate() {
        let (c, r) = t.split_coeff();
        if let Node::Func(Func::Log, a) = r.node() {
            logs.push((k, c, a.clone()));
        }
    }
    let mut used = vec![false; ts.len()];
    let mut extra = Vec::new();
    for a in 0..logs.len() {
        for b in 0..logs.len() {
            let (ia, ca, xa) = &logs[a];
            let (ib, cb, xb) = &logs[b];
            if a == b || used[*ia] || used[*ib] || *ca != -cb {
                continue;
            }
            // xa = 1 − iz, xb = 1 + iz
            let iz = (xb - xa).scale(&Scalar::frac(1, 2));
            if (xa + xb) != Expr::int(2) {
                continue;
            }
            let z = iz.scale(&-Scalar::i());
            let k = match ca.try_mul(&Scalar::int(2)).and_then(|x| x.try_div(&Scalar::i())) {
                Ok(k) => k,
                Err(_) => continue,
            };
            used[*ia] = true;
            used[*ib] = true;
            extra.push(Expr::arctan(z).scale(&k));
        }
    }
    if extra.is_empty() {
        return Expr::add(ts.to_vec());
    }
    let mut out: Vec<Expr> = ts.iter().enumerate().filter(|(k, _)| !used[*k]).map(|(_, t)| t.clone()).collect();
    out.extend(extra);
    Expr::add(out)
}

/// Positive real or ±i·positive constant.
fn admissible_center(s: &Scalar) -> bool {
    match s.as_gaussian() {
        Some(g) => (g.im.is_zero() && g.re.is_positive()) || (g.re.is_zero() && !g.im.is_zero()),
        None => false,
    }
}

/// A^a·B^{−a} with (A+B)/2 = s constant becomes exp(−2ia·arctan z), z = i(A/s − 1),
/// times s-dependent constants that cancel.
fn power_pairs(fs: &[Expr]) -> Expr {
    let pows: Vec<(usize, Expr, Scalar)> = fs
        .iter()
        .enumerate()
        .filter_map(|(k, f)| match f.node() {
            Node::Pow(b, p) if matches!(b.node(), Node::Add(_)) && p.as_i64().is_none() => Some((k, b.clone(), p.clone())),
            _ => None,
        })
        .collect();
    let mut used = vec![false; fs.len()];
    let mut extra = Vec::new();
    for x in 0..pows.len() {
        for y in 0..pows.len() {
            let (ix, bx, px) = &pows[x];
            let (iy, by, py) = &pows[y];
            if x == y || used[*ix] || used[*iy] || *px != -py {
                continue;
            }
            let s2 = bx + by;
            let Some(s2) = s2.as_const().cloned() else { continue };
            let Ok(s) = s2.try_div(&Scalar::int(2)) else { continue };
            if !admissible_center(&s) || s.is_zero() {
                continue;
            }
            let Ok(sinv) = s.inv() else { continue };
            // A = s(1 − iz), B = s(1 + iz)
            let z = (bx.scale(&sinv) - Expr::one()).scale(&Scalar::i());
            // (1−iz)^a (1+iz)^{−a} = exp(−2ia·arctan z) on the principal branch
            let Ok(k) = px.try_mul(&Scalar::complex(Q::zero(), Q::from_integer((-2).into()))) else { continue };
            used[*ix] = true;
            used[*iy] = true;
            extra.push(Expr::exp(Expr::arctan(z).scale(&k)));
        }
    }
    if extra.is_empty() {
        return Expr::mul(fs.to_vec());
    }
    let mut out: Vec<Expr> = fs.iter().enumerate().filter(|(k, _)| !used[*k]).map(|(_, f)| f.clone()).collect();
    out.extend(extra);
    Expr::mul(out)
}

/// Split a term into coefficient, exponential argument and the rest.
fn split_exp(t: &Expr) -> (Scalar, Expr, Expr) {
    let (c, r) = t.split_coeff();
    let factors: Vec<Expr> = match r.node() {
        Node::Mul(fs) => fs.clone(),
        _ if r.is_one() => vec![],
        _ => vec![r.clone()],
    };
    let mut arg = Expr::zero();
    let mut rest = Vec::new();
    for f in factors {
        match f.node() {
            Node::Func(Func::Exp, a) => arg = &arg + a,
            _ => rest.push(f),
        }
    }
    (c, arg, Expr::mul(rest))
}

/// p·e^{u}·R + m·e^{−u}·R → (p+m)cosh(u)·R + (p−m)sinh(u)·R.
fn exp_pairs(ts: &[Expr]) -> Expr {
    let mut groups: BTreeMap<(Expr, Expr), (Scalar, Scalar)> = BTreeMap::new();
    let mut plain = Vec::new();
    for t in ts {
        let (c, u, rest) = split_exp(t);
        if u.is_zero() {
            plain.push(t.clone());
            continue;
        }
        let neg = u.leading_negative();
        let key_u = if neg { -&u } else { u };
        let e = groups.entry((rest, key_u)).or_insert((Scalar::zero(), Scalar::zero()));
        let slot = if neg { &mut e.1 } else { &mut e.0 };
        match slot.try_add(&c) {
            Ok(v) => *slot = v,
            Err(_) => plain.push(t.clone()),
        }
    }
    let mut out = plain;
    for ((rest, u), (p, m)) in groups {
        if p.is_zero() || m.is_zero() {
            if !p.is_zero() {
                out.push(Expr::constant(p) * Expr::exp(u.clone()) * rest.clone());
            }
            if !m.is_zero() {
                out.push(Expr::constant(m) * Expr::exp(-&u) * rest);
            }
            continue;
        }
        match (p.try_add(&m), p.try_sub(&m)) {
            (Ok(a), Ok(b)) => {
                out.push(Expr::constant(a) * Expr::cosh(u.clone()) * rest.clone());
                out.push(Expr::constant(b) * Expr::sinh(u) * rest);
            }
            _ => {
                out.push(Expr::constant(p) * Expr::exp(u.clone()) * rest.clone());
                out.push(Expr::constant(m) * Expr::exp(-&u) * rest);
            }
        }
    }
    Expr::add(out)
}

/// Structural equality after normalization.
pub fn same_form(a: &Expr, b: &Expr) -> bool {
    simplify(a) == simplify(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Expr {
        Expr::var("t")
    }

    #[test]
    fn exponential_pair_becomes_hyperbolic() {
        let e = Expr::exp(t()) * Expr::sin(t()) + Expr::exp(-&t()) * Expr::sin(t());
        let s = simplify(&e);
        assert_eq!(s, Expr::cosh(t()) * Expr::sin(t()).scale(&Scalar::int(2)));
    }

    #[test]
    fn imaginary_pair_becomes_circular() {
        let it = t().scale(&Scalar::i());
        let e = (Expr::exp(it.clone()) - Expr::exp(-&it)).scale(&Scalar::complex(Q::zero(), crate::algebra::qf(-1, 2)));
        assert_eq!(simplify(&e), Expr::sin(t()));
    }

    #[test]
    fn log_pair_to_arctan() {
        let iz = t().scale(&Scalar::i());
        let c = Scalar::complex(Q::zero(), crate::algebra::qf(1, 2));
        let e = Expr::log(Expr::one() - iz.clone()).scale(&c) - Expr::log(Expr::one() + iz).scale(&c);
        assert_eq!(simplify(&e), Expr::arctan(t()));
    }

    #[test]
    fn trig_of_arctan() {
        let e = Expr::cos(Expr::arctan(t()));
        assert_eq!(simplify(&e), (Expr::one() + t().powi(2)).powi(-1).sqrt());
    }

    #[test]
    fn idempotent_on_samples() {
        let samples = vec![
            Expr::cosh(t()) * Expr::sin(t()) + Expr::sinh(t()) * Expr::cos(t()),
            (t() + Expr::one()).powi(3),
            Expr::tan(t()) * Expr::cos(t()),
        ];
        for s in samples {
            let a = simplify(&s);
            assert_eq!(simplify(&a), a);
        }
    }

    #[test]
    fn cube_expands() {
        let s = simplify(&(t() + Expr::one()).powi(3));
        assert_eq!(s, simplify(&s));
    }

    #[test]
    fn hyperbolic_mix() {
        let e = Expr::cosh(t()) * Expr::sin(t()) + Expr::sinh(t()) * Expr::cos(t());
        let s = simplify(&e);
        assert_eq!(s, simplify(&s));
    }

    #[test]
    fn tan_times_cos() {
        assert_eq!(simplify(&(Expr::tan(t()) * Expr::cos(t()))), Expr::sin(t()));
    }
}
