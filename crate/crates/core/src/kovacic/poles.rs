use serde::Serialize;

use super::KovacicError;
use crate::algebra::{find_roots, partial_fractions, RationalFunction, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pole {
    #[serde(serialize_with = "as_text")]
    pub location: Scalar,
    pub order: usize,
    /// coefficient of (τ − c)^{−2}
    #[serde(serialize_with = "as_text")]
    pub b: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleAnalysis {
    pub poles: Vec<Pole>,
    /// deg den − deg num; i64::MAX for r ≡ 0
    pub infinity_order: i64,
    /// r = b_∞/τ² + O(τ^{−3}); zero when the order exceeds 2
    #[serde(serialize_with = "as_text")]
    pub b_infinity: Scalar,
    /// Set when r is a nonzero constant.
    #[serde(skip)]
    pub constant: Option<Scalar>,
}

fn as_text<S: serde::Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn analyze_poles(r: &RationalFunction) -> Result<PoleAnalysis, KovacicError> {
    let infinity_order = r.order_at_infinity();
    if infinity_order == 0 && r.is_polynomial() {
        let c = r.as_constant().expect("degree-zero polynomial");
        return Ok(PoleAnalysis { poles: vec![], infinity_order, b_infinity: Scalar::zero(), constant: Some(c) });
    }
    if infinity_order < 2 {
        return Err(KovacicError::UnsupportedStructure(format!(
            "r = {r} has order {infinity_order} at infinity; orders below 2 are not handled"
        )));
    }
    let roots = find_roots(r.den())?;
    if let Some((c, m)) = roots.iter().find(|(_, m)| *m > 2) {
        return Err(KovacicError::UnsupportedStructure(format!(
            "r = {r} has a pole of order {m} at {c}; only orders 1 and 2 are handled"
        )));
    }
    let pf = if r.is_zero() { None } else { Some(partial_fractions(r)?) };
    let poles = roots
        .into_iter()
        .map(|(c, order)| {
            let b = pf.as_ref().map_or_else(Scalar::zero, |pf| pf.coefficient(&c, 2));
            Pole { location: c, order, b }
        })
        .collect();
    let b_infinity = if infinity_order == 2 { r.num().lc().try_div(&r.den().lc())? } else { Scalar::zero() };
    Ok(PoleAnalysis { poles, infinity_order, b_infinity, constant: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{qf, sym, Polynomial};

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        let v = sym("tau");
        RationalFunction::new(Polynomial::from_ints(v.clone(), num), Polynomial::from_ints(v, den)).unwrap()
    }

    #[test]
    fn ince_reduced_form() {
        let pa = analyze_poles(&rf(&[4, 0, 2], &[1, 0, 2, 0, 1])).unwrap();
        assert_eq!(pa.poles.len(), 2);
        for p in &pa.poles {
            assert_eq!(p.order, 2);
            assert_eq!(p.b, Scalar::from_q(qf(-1, 2)));
        }
        let locs: Vec<_> = pa.poles.iter().map(|p| p.location.clone()).collect();
        assert!(locs.contains(&Scalar::i()) && locs.contains(&-Scalar::i()));
        assert_eq!(pa.infinity_order, 2);
        assert_eq!(pa.b_infinity, Scalar::int(2));
    }

    #[test]
    fn euler_forms() {
        for k in [2, -1] {
            let pa = analyze_poles(&rf(&[k], &[0, 0, 1])).unwrap();
            assert_eq!(pa.poles, vec![Pole { location: Scalar::zero(), order: 2, b: Scalar::int(k) }]);
            assert_eq!(pa.b_infinity, Scalar::int(k));
        }
    }

    #[test]
    fn simple_pole_and_high_infinity_order() {
        let pa = analyze_poles(&rf(&[1], &[0, 1, 0, 1])).unwrap();
        assert_eq!(pa.infinity_order, 3);
        assert!(pa.b_infinity.is_zero());
        assert!(pa.poles.iter().all(|p| p.order == 1));
    }

    #[test]
    fn zero_r() {
        let pa = analyze_poles(&rf(&[0], &[1])).unwrap();
        assert!(pa.poles.is_empty());
        assert_eq!(pa.infinity_order, i64::MAX);
    }
}
