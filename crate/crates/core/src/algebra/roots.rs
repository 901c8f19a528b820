use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::Polynomial;
use super::scalar::{Scalar, Q};
use super::AlgebraError;

/// All roots of `p` with multiplicities.
///
/// Works on the square-free factors: rational roots come from the rational
/// root theorem, what is left must split into quadratics. Gaussian
/// coefficients are handled through the rational norm polynomial p·p̄.
pub fn find_roots(p: &Polynomial) -> Result<Vec<(Scalar, usize)>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    let mut out = Vec::new();
    for (f, k) in p.square_free()? {
        for r in roots_square_free(&f)? {
            out.push((r, k));
        }
    }
    out.sort();
    let total: usize = out.iter().map(|(_, k)| k).sum();
    debug_assert_eq!(Some(total), p.degree().or(Some(0)));
    Ok(out)
}

fn unsupported(f: &Polynomial) -> AlgebraError {
    AlgebraError::UnsupportedFactorization(format!("cannot split {f}"))
}

fn roots_square_free(f: &Polynomial) -> Result<Vec<Scalar>, AlgebraError> {
    let deg = f.degree().unwrap_or(0);
    match deg {
        0 => return Ok(vec![]),
        1 => return Ok(vec![(-&f.coeff(0)).try_div(&f.coeff(1))?]),
        2 => return quadratic(&f.coeff(2), &f.coeff(1), &f.coeff(0)),
        _ => {}
    }
    if f.has_rational_coeffs() {
        return rational_poly_roots(f);
    }
    if f.has_gaussian_coeffs() {
        let norm = f.mul(&f.conj());
        let mut found = Vec::new();
        for (c, _) in find_roots(&norm)? {
            if found.contains(&c) {
                continue;
            }
            if let Ok(v) = f.try_eval(&c) {
                if v.is_zero() {
                    found.push(c);
                }
            }
        }
        if found.len() == deg {
            return Ok(found);
        }
    }
    Err(unsupported(f))
}

fn quadratic(a: &Scalar, b: &Scalar, c: &Scalar) -> Result<Vec<Scalar>, AlgebraError> {
    let disc = b.try_mul(b)?.try_sub(&Scalar::int(4).try_mul(a)?.try_mul(c)?)?;
    let s = disc.sqrt()?;
    let two_a = Scalar::int(2).try_mul(a)?;
    let r1 = (-b).try_add(&s)?.try_div(&two_a)?;
    let r2 = (-b).try_sub(&s)?.try_div(&two_a)?;
    Ok(vec![r1, r2])
}

/// Integer coefficients with the same roots.
fn integer_coeffs(f: &Polynomial) -> Vec<BigInt> {
    let qs: Vec<Q> = f.coeffs().iter().map(|c| c.as_rational().cloned().unwrap()).collect();
    let l = qs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    qs.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect()
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    let n64 = n.to_u64()?;
    if n64 > 1_000_000_000_000 {
        return None;
    }
    let mut ds = Vec::new();
    let mut d = 1u64;
    while d * d <= n64 {
        if n64 % d == 0 {
            ds.push(BigInt::from(d));
            if d * d != n64 {
                ds.push(BigInt::from(n64 / d));
            }
        }
        d += 1;
    }
    Some(ds)
}

fn rational_poly_roots(f: &Polynomial) -> Result<Vec<Scalar>, AlgebraError> {
    let mut rest = f.monic();
    let mut roots = Vec::new();
    // rational root theorem on the integer-coefficient form
    let ic = integer_coeffs(&rest);
    let mut lo = 0;
    while ic[lo].is_zero() {
        lo += 1;
    }
    if lo > 0 {
        roots.push(Scalar::zero());
        rest = rest.exact_div(&Polynomial::x(f.var().clone()))?;
    }
    if let (Some(ps), Some(qs)) = (divisors(&ic[lo]), divisors(ic.last().unwrap())) {
        'outer: for p in &ps {
            for qd in &qs {
                for sign in [1, -1] {
                    if rest.degree().unwrap_or(0) == 0 {
                        break 'outer;
                    }
                    let cand = Scalar::from_q(Q::new(p * sign, qd.clone()));
                    if roots.contains(&cand) {
                        continue;
                    }
                    if rest.eval(&cand).is_zero() {
                        rest = rest.exact_div(&Polynomial::linear_root(f.var().clone(), &cand))?;
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.extend(split_quadratics(&rest)?);
    Ok(roots)
}

/// Split a rational polynomial without rational roots into quadratic factors.
/// Candidate factors are proposed from numeric root pairs and accepted only
/// after exact division.
fn split_quadratics(f: &Polynomial) -> Result<Vec<Scalar>, AlgebraError> {
    let deg = f.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(vec![]);
    }
    if deg <= 2 {
        return roots_square_free(f);
    }
    if deg % 2 == 1 {
        return Err(unsupported(f));
    }
    let approx = numeric_roots(f);
    for i in 0..approx.len() {
        for j in (i + 1)..approx.len() {
            let s = approx[i] + approx[j];
            let pr = approx[i] * approx[j];
            if s.im.abs() > 1e-6 || pr.im.abs() > 1e-6 {
                continue;
            }
            let (Some(sq), Some(pq)) = (rationalize(s.re), rationalize(pr.re)) else { continue };
            let quad = Polynomial::new(
                f.var().clone(),
                vec![Scalar::from_q(pq), Scalar::from_q(-sq), Scalar::one()],
            );
            if let Ok((quo, rem)) = f.div_rem(&quad) {
                if rem.is_zero() {
                    let mut out = roots_square_free(&quad)?;
                    out.extend(split_quadratics(&quo)?);
                    return Ok(out);
                }
            }
        }
    }
    Err(unsupported(f))
}

fn rationalize(x: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    // continued fraction with a bounded denominator
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > 1_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() < 1e-9 * (1.0 + x.abs()) {
            return Some(Q::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    (k1 != 0 && (h1 as f64 / k1 as f64 - x).abs() < 1e-9 * (1.0 + x.abs()))
        .then(|| Q::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Durand–Kerner iteration on the monic float image of f.
fn numeric_roots(f: &Polynomial) -> Vec<Complex64> {
    let m = f.monic();
    let n = m.degree().unwrap_or(0);
    let cs: Vec<Complex64> = m.coeffs().iter().map(|c| c.to_complex()).collect();
    let eval = |z: Complex64| cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    let seed = Complex64::new(0.4, 0.9);
    let mut zs: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= zs[i] - zs[j];
                }
            }
            let step = eval(zs[i]) / den;
            zs[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    zs
}

#[cfg(test)]
mod tests {
    use super::super::poly::sym;
    use super::*;
    use super::super::scalar::{q, qf};

    fn t() -> super::super::poly::Symbol {
        sym("t")
    }

    #[test]
    fn gaussian_pair() {
        let r = find_roots(&Polynomial::from_ints(t(), &[1, 0, 1])).unwrap();
        assert_eq!(r, vec![(Scalar::complex(q(0), q(-1)), 1), (Scalar::i(), 1)]);
    }

    #[test]
    fn squared_factor() {
        let p = Polynomial::from_ints(t(), &[1, 0, 1]);
        let r = find_roots(&p.mul(&p)).unwrap();
        assert!(r.iter().all(|(_, k)| *k == 2));
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn scaled_quadratic() {
        let p = Polynomial::new(t(), vec![Scalar::from_q(qf(-8, 3)), Scalar::zero(), Scalar::from_q(qf(2, 3))]);
        let r = find_roots(&p).unwrap();
        assert_eq!(r, vec![(Scalar::int(-2), 1), (Scalar::int(2), 1)]);
    }

    #[test]
    fn quartic_into_quadratics() {
        // (τ²+1)(τ²−2)
        let p = Polynomial::from_ints(t(), &[1, 0, 1]).mul(&Polynomial::from_ints(t(), &[-2, 0, 1]));
        let r = find_roots(&p).unwrap();
        assert_eq!(r.len(), 4);
        for (c, _) in r {
            assert!(p.eval(&c).is_zero());
        }
    }

    #[test]
    fn irreducible_cubic_is_unsupported() {
        let p = Polynomial::from_ints(t(), &[-2, 0, 0, 1]);
        assert!(matches!(find_roots(&p), Err(AlgebraError::UnsupportedFactorization(_))));
    }
}
