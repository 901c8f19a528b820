use super::scalar::Scalar;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<Scalar>),
    /// particular + span(basis)
    Parametric { particular: Vec<Scalar>, basis: Vec<Vec<Scalar>> },
    Inconsistent,
}

/// Gauss–Jordan elimination in exact arithmetic; the result is checked by
/// back-substitution before it is returned.
pub fn solve_linear(a: &[Vec<Scalar>], rhs: &[Scalar]) -> Result<LinearSolution, AlgebraError> {
    let rows = a.len();
    if rhs.len() != rows {
        return Err(AlgebraError::DimensionMismatch(format!("{rows} rows, {} rhs entries", rhs.len())));
    }
    let cols = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != cols) {
        return Err(AlgebraError::DimensionMismatch("ragged matrix".into()));
    }
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(rhs)
        .map(|(r, b)| r.iter().cloned().chain(std::iter::once(b.clone())).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].inv()?;
        for x in m[row].iter_mut() {
            *x = x.try_mul(&inv)?;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=cols {
                    let v = m[r][c].try_sub(&f.try_mul(&m[row][c])?)?;
                    m[r][c] = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if m[row..].iter().any(|r| !r[cols].is_zero()) {
        return Ok(LinearSolution::Inconsistent);
    }
    let mut particular = vec![Scalar::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = m[r][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free {
        let mut v = vec![Scalar::zero(); cols];
        v[fc] = Scalar::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -&m[r][fc];
        }
        basis.push(v);
    }
    // back-substitution check
    for (r, b) in a.iter().zip(rhs) {
        let mut s = Scalar::zero();
        for (x, y) in r.iter().zip(&particular) {
            s = s.try_add(&x.try_mul(y)?)?;
        }
        assert_eq!(&s, b, "linear solve failed its own check");
    }
    Ok(if free.is_empty() {
        LinearSolution::Unique(particular)
    } else {
        LinearSolution::Parametric { particular, basis }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::int(n)
    }

    #[test]
    fn identity() {
        let a = vec![vec![s(1), s(0)], vec![s(0), s(1)]];
        let v = vec![s(3), Scalar::i()];
        assert_eq!(solve_linear(&a, &v).unwrap(), LinearSolution::Unique(v));
    }

    #[test]
    fn free_variable() {
        let r = solve_linear(&[vec![s(0)]], &[s(0)]).unwrap();
        assert!(matches!(r, LinearSolution::Parametric { .. }));
    }

    #[test]
    fn inconsistent() {
        assert_eq!(solve_linear(&[vec![s(0)]], &[s(1)]).unwrap(), LinearSolution::Inconsistent);
    }

    #[test]
    fn ince_normalization() {
        // μ₀ = C₁·e^{−t}(sin t − cos t) + C₂·e^{t}(sin t + cos t):
        // μ₀(0) = −C₁ + C₂ = 0, μ₀'(0) = 2C₁ + 2C₂ = 2a(0) = 2
        let a = vec![vec![s(-1), s(1)], vec![s(2), s(2)]];
        let r = solve_linear(&a, &[s(0), s(2)]).unwrap();
        assert_eq!(r, LinearSolution::Unique(vec![Scalar::frac(1, 2), Scalar::frac(1, 2)]));
    }
}
