use std::cmp::Ordering;

use super::element::{EnvElement, Monomial, Terms};
use super::EnvError;

/// Reverse-lexicographic order on non-decreasing index sequences: compare
/// from the largest entry down; a proper extension is larger.
pub fn jdeg_cmp(a: &[i64], b: &[i64]) -> Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub fn jdeg(m: &Monomial) -> Vec<i64> {
    m.iter().map(|g| g.gamma2).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JdegLt {
    pub degree: usize,
    /// Doubled indices, non-decreasing.
    pub jdeg: Vec<i64>,
    pub leading: EnvElement,
}

/// PBW degree, J-degree and leading term.
pub fn jdeg_lt(x: &EnvElement) -> Result<JdegLt, EnvError> {
    if x.is_zero() {
        return Err(EnvError::ZeroElement);
    }
    let degree = x.degree();
    let best = x
        .terms()
        .filter(|(m, _)| m.len() == degree)
        .map(|(m, _)| jdeg(m))
        .min_by(|a, b| jdeg_cmp(a, b))
        .unwrap_or_default();
    let leading: Terms = x
        .terms()
        .filter(|(m, _)| m.len() == degree && jdeg(m) == best)
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    Ok(JdegLt {
        degree,
        jdeg: best,
        leading: EnvElement::from_terms(x.algebra(), leading, None),
    })
}

/// Monomials of `diff` that stop it from lying in `Ĵ^{≤m}[σ]`, `m = |σ|`:
/// degree above `m`, or degree `m` with J-degree not above `σ`. Errors if
/// the stored level does not determine every monomial with J-degree `≤ σ`.
pub fn window_congruent(diff: &EnvElement, sigma: &[i64]) -> Result<Vec<Monomial>, EnvError> {
    let top = sigma.iter().copied().max().unwrap_or(i64::MIN);
    if let Some(level) = diff.level() {
        if level <= top {
            return Err(EnvError::ResultLevelEmpty {
                left: level,
                monomial: format!("window top {top}"),
            });
        }
    }
    Ok(diff
        .terms()
        .map(|(m, _)| m)
        .filter(|m| m.len() > sigma.len() || (m.len() == sigma.len() && jdeg_cmp(&jdeg(m), sigma) != Ordering::Greater))
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Algebra;
    use proptest::prelude::*;

    #[test]
    fn leading_term_example() {
        let x = EnvElement::parse(Algebra::One, "(e:t:1)*(f:t:2) + (h:t:7)").unwrap();
        let lt = jdeg_lt(&x).unwrap();
        assert_eq!(lt.degree, 2);
        assert_eq!(lt.jdeg, vec![2, 4]);
        assert_eq!(lt.leading.to_string(), "(e:t:1)(f:t:2)");
        let y = EnvElement::parse(Algebra::One, "(e:t:5)").unwrap();
        assert_eq!(jdeg_lt(&y).unwrap().jdeg, vec![10]);
        assert_eq!(jdeg_lt(&EnvElement::zero(Algebra::One, None)), Err(EnvError::ZeroElement));
    }

    #[test]
    fn order_examples() {
        assert_eq!(jdeg_cmp(&[1, 5], &[2, 5]), Ordering::Less);
        assert_eq!(jdeg_cmp(&[0, 6], &[5, 5]), Ordering::Greater);
        assert_eq!(jdeg_cmp(&[1, 5], &[5]), Ordering::Greater);
    }

    fn arb() -> impl Strategy<Value = EnvElement> {
        let gen = (0usize..3, -3i64..=3).prop_map(|(a, g)| format!("({}:u:{g})", ["e", "h", "f"][a]));
        prop::collection::vec(prop::collection::vec(gen, 1..=2).prop_map(|v| v.concat()), 1..=3)
            .prop_map(|ms| EnvElement::parse(Algebra::Two, &ms.join(" + ")).unwrap())
            .prop_filter("nonzero", |x| !x.is_zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn jdeg_is_multiplicative(x in arb(), y in arb()) {
            let (a, b) = (jdeg_lt(&x).unwrap(), jdeg_lt(&y).unwrap());
            let p = jdeg_lt(&x.mul(&y).unwrap()).unwrap();
            let mut merged = [a.jdeg.clone(), b.jdeg.clone()].concat();
            merged.sort();
            prop_assert_eq!(p.degree, a.degree + b.degree);
            prop_assert_eq!(p.jdeg, merged);
        }
    }
}
