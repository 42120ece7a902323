use crate::scalar::Scalar;

use super::cpoly::CPoly;
use super::element::{EnvElement, Gen, Terms};
use super::ring::{expand_basis, Algebra, RingElt};
use super::EnvError;

fn require(x: &EnvElement, alg: Algebra, op: &'static str, expected: &'static str) -> Result<(), EnvError> {
    if x.algebra() != alg {
        return Err(EnvError::WrongAlgebra {
            op,
            expected,
            got: x.algebra(),
        });
    }
    Ok(())
}

/// `a ↦ 0`, `s ↦ t`: `u_n ↦ t^{2n}`, `v_n ↦ t^{2n+1}`, level doubles.
pub fn specialize_env(x: &EnvElement) -> Result<EnvElement, EnvError> {
    require(x, Algebra::Two, "specialize_env", "two")?;
    let mut terms = Terms::new();
    for (m, c) in x.terms() {
        let c = c
            .map_coeffs(|s| s.specialize_a0().map(Scalar::from_rational))
            .map_err(|_| EnvError::NegativePowerOfA)?;
        let image = m.iter().map(|g| Gen::new(g.alpha, 2 * g.gamma2)).collect();
        super::element::add_term(&mut terms, image, &c);
    }
    Ok(EnvElement::from_terms(Algebra::One, terms, x.level().map(|n| 2 * n)))
}

/// Image of `x` under the expansion map into the `(t, s)` algebra, correct
/// modulo `Ĵ_{t,s}(level2/2)` (or the input level, if lower).
pub fn expand_env(x: &EnvElement, level2: i64) -> Result<EnvElement, EnvError> {
    require(x, Algebra::Two, "expand_env", "two")?;
    let target = x.level().map_or(level2, |n| n.min(level2));
    let mut out = EnvElement::zero(Algebra::TS, Some(target));
    for (m, c) in x.terms() {
        let image = expand_monomial(m, c, target)?;
        out = out.add(&image)?;
    }
    Ok(out)
}

fn expand_monomial(m: &[Gen], c: &CPoly, target: i64) -> Result<EnvElement, EnvError> {
    let spread: i64 = m.iter().map(|g| (1 - g.gamma2).max(0)).sum();
    let mut slack = spread + 2;
    for _ in 0..8 {
        let cut = target + slack;
        match expand_at(m, c, cut) {
            Ok(p) if p.level().is_none_or(|l| l >= target) => return Ok(p.truncate(target)),
            Ok(_) | Err(EnvError::ResultLevelEmpty { .. }) => slack = 2 * slack + 2,
            Err(e) => return Err(e),
        }
    }
    Err(EnvError::ResultLevelEmpty {
        left: target + slack,
        monomial: super::element::fmt_monomial(Algebra::Two, m),
    })
}

fn expand_at(m: &[Gen], c: &CPoly, cut: i64) -> Result<EnvElement, EnvError> {
    let mut prod = EnvElement::scalar(Algebra::TS, c.clone());
    for g in m.iter().rev() {
        let image = EnvElement::lie_fun(Algebra::TS, g.alpha, &expand_basis(g.gamma2, cut)).truncate(cut);
        prod = image.mul(&prod)?;
    }
    Ok(prod)
}

/// Action of the derivation `f∂` (with `f` in the algebra's function ring):
/// `(f∂)(J r) = J·f·r′`, extended by the Leibniz rule.
pub fn derivation_act(alg: Algebra, field: &RingElt, x: &EnvElement) -> Result<EnvElement, EnvError> {
    if x.algebra() != alg {
        return Err(EnvError::AlgebraMismatch(alg, x.algebra()));
    }
    let Some(&fmin) = field.keys().next() else {
        return Ok(EnvElement::zero(alg, x.level()));
    };
    let level = x.level().map(|n| n + (fmin - 2 - alg.h2()).min(0));
    let mut words = Vec::new();
    for (m, c) in x.terms() {
        for (i, g) in m.iter().enumerate() {
            let r = RingElt::from([(g.gamma2, Scalar::one())]);
            let image = alg.mul(field, &alg.deriv(&r));
            for (h, d) in image {
                let mut w = m.clone();
                w[i] = Gen::new(g.alpha, h);
                words.push((w, c.scale(&d)));
            }
        }
    }
    Ok(EnvElement::from_words(alg, words, level))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{sugawara1, sugawara2};
    use crate::liealg::{Sl2, BASIS};
    use proptest::prelude::*;

    fn two(s: &str) -> EnvElement {
        EnvElement::parse(Algebra::Two, s).unwrap()
    }

    #[test]
    fn specialisation_of_generators() {
        let x = specialize_env(&two("(e:u:3)")).unwrap();
        assert_eq!(x.to_string(), "(e:t:6)");
        assert!(specialize_env(&two("a*(h:v:1)")).unwrap().is_zero());
        assert_eq!(specialize_env(&two("a^-1*(h:v:1)")), Err(EnvError::NegativePowerOfA));
    }

    #[test]
    fn sugawara_specialises_to_one_variable() {
        for k2 in -4..=4 {
            for n in 1..=3 {
                let sp = specialize_env(&sugawara2(k2, n)).unwrap();
                assert_eq!(sp, sugawara1(Algebra::One, k2, 2 * n).unwrap(), "k2 = {k2}, n = {n}");
            }
        }
    }

    #[test]
    fn derivation_example() {
        // (u₁∂)(e v₋₁) = e(a v₋₁ − u₀)
        let field = RingElt::from([(2, Scalar::one())]);
        let d = derivation_act(Algebra::Two, &field, &two("(e:v:-1)")).unwrap();
        assert_eq!(d, two("a*(e:v:-1) - (e:u:0)"));
    }

    #[test]
    fn expansion_of_generators() {
        // E(e v_m) starts with (−a)^{m+1} t^m + a^m s^{m+1}
        for m in -2..=2 {
            let x = two(&format!("(e:v:{m})"));
            let e = expand_env(&x, 2 * m + 3).unwrap();
            let t = Gen::new(Sl2::E, 2 * m + 1);
            let s = Gen::new(Sl2::E, 2 * m + 2);
            assert_eq!(e.coeff(&[t]), CPoly::constant(Scalar::neg_a_pow(m + 1)));
            assert_eq!(e.coeff(&[s]), CPoly::constant(Scalar::a_pow(m)));
            assert_eq!(e.len(), 2);
        }
    }

    fn arb_word() -> impl Strategy<Value = Vec<Gen>> {
        prop::collection::vec((0usize..3, -3i64..=3), 1..=2)
            .prop_map(|v| v.into_iter().map(|(a, g)| Gen::new(BASIS[a], g)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn expansion_is_multiplicative(x in arb_word(), y in arb_word()) {
            let x = EnvElement::from_words(Algebra::Two, [(x, CPoly::one())], None);
            let y = EnvElement::from_words(Algebra::Two, [(y, CPoly::one())], None);
            let target = 4;
            let lhs = expand_env(&x.mul(&y).unwrap(), target).unwrap();
            let ey = expand_env(&y, target + 8).unwrap();
            let ex = expand_env(&x, target + 12).unwrap();
            if let Ok(rhs) = ex.mul(&ey) {
                let lvl = rhs.level().unwrap().min(target);
                prop_assert_eq!(lhs.truncate(lvl), rhs.truncate(lvl));
            }
        }

        #[test]
        fn derivation_is_leibniz(x in arb_word(), y in arb_word(), f in 0i64..4) {
            let x = EnvElement::from_words(Algebra::Two, [(x, CPoly::one())], None);
            let y = EnvElement::from_words(Algebra::Two, [(y, CPoly::one())], None);
            let field = RingElt::from([(f, Scalar::one())]);
            let d = |e: &EnvElement| derivation_act(Algebra::Two, &field, e).unwrap();
            let lhs = d(&x.mul(&y).unwrap());
            let rhs = d(&x).mul(&y).unwrap().add(&x.mul(&d(&y)).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
