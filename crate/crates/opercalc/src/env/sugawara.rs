use crate::liealg::{dual_basis, Sl2};
use crate::scalar::Scalar;

use super::cpoly::CPoly;
use super::element::{EnvElement, Gen, Monomial};
use super::ring::{Algebra, RingElt};
use super::EnvError;

/// `:(x r_{m1})(y r_{m2}):`, the product with the smaller index on the left;
/// equal indices keep the given order.
pub fn normal_pair(x: (Sl2, i64), y: (Sl2, i64)) -> Monomial {
    let (a, b) = (Gen::new(x.0, x.1), Gen::new(y.0, y.1));
    if x.1 <= y.1 {
        vec![a, b]
    } else {
        vec![b, a]
    }
}

fn dual_words(g: i64, h: i64, coef: &Scalar, level2: i64, out: &mut Vec<(Monomial, CPoly)>) {
    if g.max(h) >= level2 {
        return;
    }
    for (upper, lower, c) in dual_basis() {
        let w = normal_pair((upper, g), (lower, h));
        out.push((w, CPoly::constant(coef.scale(&c))));
    }
}

/// `S^(1)_k = Σ_n Σ_α :J^α t^n J_α t^{k−n−1}:` modulo `Ĵ(level2/2)` in a
/// one-variable algebra.
pub fn sugawara1(alg: Algebra, k: i64, level2: i64) -> Result<EnvElement, EnvError> {
    if alg.half_integral() {
        return Err(EnvError::WrongAlgebra {
            op: "sugawara1",
            expected: "one, t or s",
            got: alg,
        });
    }
    let top = level2.div_euclid(2) + 1;
    let mut words = Vec::new();
    for n in (k - top - 1)..=top {
        dual_words(2 * n, 2 * (k - n - 1), &Scalar::one(), level2, &mut words);
    }
    Ok(EnvElement::from_words(alg, words, Some(level2)))
}

/// `z_{q/2}` in the `u/v` basis: `x_n = u_n`, `y_n = a·u_n + v_n`.
fn z_basis(q2: i64) -> RingElt {
    if q2.rem_euclid(2) == 0 {
        RingElt::from([(q2, Scalar::one())])
    } else {
        RingElt::from([(q2 - 1, Scalar::a_pow(1)), (q2, Scalar::one())])
    }
}

/// `S^(2)_k = Σ_n Σ_α :J^α w_n J_α z_{−n−½} w_k:` modulo `Ĵ₂(level2/2)`,
/// with `k = k2/2`.
pub fn sugawara2(k2: i64, level2: i64) -> EnvElement {
    let wk = RingElt::from([(k2, Scalar::one())]);
    let mut words = Vec::new();
    for g in (k2 - level2 - 4)..=level2 {
        let zw = Algebra::Two.mul(&z_basis(-g - 1), &wk);
        for (h, c) in &zw {
            dual_words(g, *h, c, level2, &mut words);
        }
    }
    EnvElement::from_words(Algebra::Two, words, Some(level2))
}

/// The rescaled operators `𝕃_k`, `k = k2/2`.
pub fn lstorto(k2: i64, level2: i64) -> Result<EnvElement, EnvError> {
    match k2.rem_euclid(4) {
        0 | 2 => Ok(sugawara2(k2, level2).scale(&Scalar::a_pow(-k2 / 2))),
        3 => {
            let j = (k2 - 3).div_euclid(4);
            Ok(sugawara2(k2, level2).scale(&Scalar::a_pow(-(2 * j + 2))))
        }
        _ => {
            let j = (k2 - 1).div_euclid(4);
            let top = sugawara2(4 * j + 2, level2);
            let low = sugawara2(k2, level2).scale(&Scalar::a_pow(1));
            Ok(top.sub(&low)?.scale(&Scalar::a_pow(-(2 * j + 2))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::parse_monomial;

    fn casimir_pair(alg: Algebra, g: i64, h: i64) -> EnvElement {
        let words = dual_basis()
            .into_iter()
            .map(|(p, q, c)| (vec![Gen::new(p, g), Gen::new(q, h)], CPoly::constant(Scalar::from_rational(c))));
        EnvElement::from_words(alg, words, None)
    }

    #[test]
    fn normal_pair_cases() {
        assert_eq!(normal_pair((Sl2::E, 4), (Sl2::F, 2)), vec![Gen::new(Sl2::F, 2), Gen::new(Sl2::E, 4)]);
        assert_eq!(normal_pair((Sl2::E, 2), (Sl2::F, 2)), vec![Gen::new(Sl2::E, 2), Gen::new(Sl2::F, 2)]);
    }

    #[test]
    fn one_variable_survivors() {
        // S_1 = Σ :J^α t^n J_α t^{-n}: and only n = 0 survives modulo Ĵ(1)
        let s = sugawara1(Algebra::One, 1, 2).unwrap();
        assert_eq!(s, casimir_pair(Algebra::One, 0, 0).truncate(2));
        // S_{-1} keeps n = -2, -1, 0; the outer two coincide after normal ordering
        let s = sugawara1(Algebra::One, -1, 2).unwrap();
        let expect = casimir_pair(Algebra::One, -4, 0)
            .scale(&Scalar::from_int(2))
            .add(&casimir_pair(Algebra::One, -2, -2))
            .unwrap()
            .truncate(2);
        assert_eq!(s, expect);
        for level in 1..4 {
            for k in 2 * level..2 * level + 3 {
                assert!(sugawara1(Algebra::One, k, 2 * level).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn two_variable_matches_brute_force() {
        // integer k: Σ_n (J^α u_n)(J_α t^{k-n}s^{k-n-1}) + (J^α v_n)(J_α u_{k-n-1}),
        // each pair normal ordered by w-index after expanding y in u, v
        for k in -2..=2 {
            let level2 = 5;
            let mut words = Vec::new();
            for n in -12..=12 {
                // t^{k-n}s^{k-n-1} = y_{k-n-1} = a u_{k-n-1} + v_{k-n-1}
                let y = 2 * (k - n - 1);
                dual_words(2 * n, y, &Scalar::a_pow(1), level2, &mut words);
                dual_words(2 * n, y + 1, &Scalar::one(), level2, &mut words);
                dual_words(2 * n + 1, 2 * (k - n - 1), &Scalar::one(), level2, &mut words);
            }
            let brute = EnvElement::from_words(Algebra::Two, words, Some(level2));
            assert_eq!(sugawara2(2 * k, level2), brute, "k = {k}");
        }
    }

    #[test]
    fn lstorto_scalings() {
        let s = sugawara2(2, 4);
        assert_eq!(lstorto(2, 4).unwrap(), s.scale(&Scalar::a_pow(-1)));
        assert_eq!(lstorto(7, 4).unwrap(), sugawara2(7, 4).scale(&Scalar::a_pow(-4)));
        let combo = sugawara2(2, 4).sub(&sugawara2(1, 4).scale(&Scalar::a_pow(1))).unwrap();
        assert_eq!(lstorto(1, 4).unwrap(), combo.scale(&Scalar::a_pow(-2)));
    }

    #[test]
    fn generic_level_sugawara_commutator_with_u0_is_zero() {
        // u₀ = 1 has vanishing derivative, so S commutes with e·u₀ at every level
        let s = sugawara2(0, 8);
        let x = EnvElement::parse(Algebra::Two, "(e:u:0)").unwrap();
        let c = s.commutator(&x).unwrap();
        assert!(c.is_zero(), "{c}");
        assert!(parse_monomial(Algebra::Two, "(e:u:0)").is_some());
    }

    fn commutator_at(k2: i64, x: &EnvElement, target: i64) -> EnvElement {
        let mut n = target;
        loop {
            if let Ok(c) = sugawara2(k2, n).commutator(x) {
                if c.level().unwrap() >= target {
                    return c.truncate(target);
                }
            }
            n += 1;
        }
    }

    #[test]
    fn central_at_critical_level() {
        for k2 in -4..=4 {
            for alpha in crate::liealg::BASIS {
                for r in -4..=5 {
                    let x = EnvElement::gen(Algebra::Two, alpha, r).unwrap();
                    let c = commutator_at(k2, &x, 6).at_critical();
                    assert!(c.is_zero(), "k2={k2} {alpha} r={r}: {c}");
                }
            }
        }
    }

    #[test]
    fn generic_level_commutator() {
        // [S_k, e u_m] = e(−2C−1) w_k u_m′
        for k2 in [-2, 0, 2] {
            for m in -2..=2 {
                let x = EnvElement::gen(Algebra::Two, Sl2::E, 2 * m).unwrap();
                let c = commutator_at(k2, &x, 6);
                let du = Algebra::Two.deriv(&RingElt::from([(2 * m, Scalar::one())]));
                let f = Algebra::Two.mul(&RingElt::from([(k2, Scalar::one())]), &du);
                let factor = CPoly::monomial(Scalar::from_int(-2), 1).sub(&CPoly::one());
                let expect = EnvElement::lie_fun(Algebra::Two, Sl2::E, &f).scale_cpoly(&factor).truncate(6);
                assert_eq!(c, expect, "k2={k2} m={m}");
            }
        }
    }
}
