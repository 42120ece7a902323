//! Function rings of the five example algebras, written in the generator basis
//! `r_γ` with doubled indices.
//!
//! * `One`, `T`, `S`: `r_n = t^n` (resp. `s^n`), only even `gamma2`.
//! * `Two`: `r_n = u_n`, `r_{n+½} = v_n`.
//! * `TS`: pairs in `Q((t)) × Q((s))`, `r_n = s^n`, `r_{n+½} = t^n`.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{int, Scalar};
use crate::series::{BasisIndex, BasisKind, Family, OneVarSeries, TwoVarFun, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algebra {
    One,
    T,
    S,
    TS,
    Two,
}

/// Finite combination `Σ c_γ r_γ`, keyed by `gamma2`.
pub type RingElt = BTreeMap<i64, Scalar>;

impl Algebra {
    pub fn half_integral(self) -> bool {
        matches!(self, Algebra::TS | Algebra::Two)
    }

    /// 1 when products can lower the doubled index by one, else 0.
    pub(crate) fn h2(self) -> i64 {
        i64::from(self.half_integral())
    }

    pub fn valid_index(self, gamma2: i64) -> bool {
        self.half_integral() || gamma2 % 2 == 0
    }

    pub fn name(self) -> &'static str {
        match self {
            Algebra::One => "one",
            Algebra::T => "t",
            Algebra::S => "s",
            Algebra::TS => "ts",
            Algebra::Two => "two",
        }
    }

    /// Letter and integer subscript used in the text form of `r_γ`.
    pub fn letter(self, gamma2: i64) -> (&'static str, i64) {
        let n = gamma2.div_euclid(2);
        match self {
            Algebra::One | Algebra::T => ("t", n),
            Algebra::S => ("s", n),
            Algebra::Two if gamma2 % 2 == 0 => ("u", n),
            Algebra::Two => ("v", n),
            Algebra::TS if gamma2 % 2 == 0 => ("s", n),
            Algebra::TS => ("t", n),
        }
    }

    pub fn from_letter(self, letter: &str, n: i64) -> Option<i64> {
        match (self, letter) {
            (Algebra::One | Algebra::T, "t") | (Algebra::S, "s") => Some(2 * n),
            (Algebra::Two, "u") | (Algebra::TS, "s") => Some(2 * n),
            (Algebra::Two, "v") | (Algebra::TS, "t") => Some(2 * n + 1),
            _ => None,
        }
    }

    /// `r_g · r_h`.
    pub fn mul_basis(self, g: i64, h: i64) -> Vec<(i64, Scalar)> {
        let (godd, hodd) = (g.rem_euclid(2) == 1, h.rem_euclid(2) == 1);
        match self {
            Algebra::One | Algebra::T | Algebra::S => vec![(g + h, Scalar::one())],
            Algebra::Two if godd && hodd => {
                // v_n v_m = t^{n+m}s^{n+m+2} = u_{n+m+1} - a v_{n+m}
                vec![(g + h, Scalar::one()), (g + h - 1, -Scalar::a_pow(1))]
            }
            Algebra::Two => vec![(g + h, Scalar::one())],
            Algebra::TS if godd && hodd => vec![(g + h - 1, Scalar::one())],
            Algebra::TS if godd == hodd => vec![(g + h, Scalar::one())],
            Algebra::TS => Vec::new(),
        }
    }

    /// `r_g′`.
    pub fn deriv_basis(self, g: i64) -> Vec<(i64, Scalar)> {
        let n = g.div_euclid(2);
        let odd = g.rem_euclid(2) == 1;
        let out = match self {
            Algebra::One | Algebra::T | Algebra::S => vec![(g - 2, Scalar::from_int(n))],
            Algebra::TS => vec![(g - 2, Scalar::from_int(n))],
            Algebra::Two if !odd => vec![
                (g - 2, Scalar::monomial(int(n), 1)),
                (g - 1, Scalar::from_int(2 * n)),
            ],
            Algebra::Two => vec![
                (g - 1, Scalar::from_int(2 * n + 1)),
                (g - 2, Scalar::monomial(int(-n), 1)),
            ],
        };
        out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Residue of `r_g`.
    pub fn res_basis(self, g: i64) -> Scalar {
        let hit = match self {
            Algebra::One | Algebra::T | Algebra::S => g == -2,
            Algebra::Two => g == -1,
            Algebra::TS => g == -1 || g == -2,
        };
        if hit {
            Scalar::one()
        } else {
            Scalar::zero()
        }
    }

    pub fn mul(self, f: &RingElt, g: &RingElt) -> RingElt {
        let mut out = RingElt::new();
        for (&i, c) in f {
            for (&j, d) in g {
                let cd = c * d;
                for (k, e) in self.mul_basis(i, j) {
                    add_to(&mut out, k, &cd * &e);
                }
            }
        }
        out
    }

    pub fn deriv(self, f: &RingElt) -> RingElt {
        let mut out = RingElt::new();
        for (&i, c) in f {
            for (k, e) in self.deriv_basis(i) {
                add_to(&mut out, k, c * &e);
            }
        }
        out
    }

    pub fn res(self, f: &RingElt) -> Scalar {
        f.iter().map(|(&g, c)| c * &self.res_basis(g)).sum()
    }

    /// `Res(r_g′ r_h)`, the coefficient of the central term in `[J r_g, J r_h]`.
    pub fn residue_pairing(self, g: i64, h: i64) -> Scalar {
        let mut total = Scalar::zero();
        for (k, c) in self.deriv_basis(g) {
            for (l, d) in self.mul_basis(k, h) {
                let r = self.res_basis(l);
                if !r.is_zero() {
                    total += &(&(&c * &d) * &r);
                }
            }
        }
        total
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn add_to(map: &mut RingElt, k: i64, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(k).or_insert_with(Scalar::zero);
    *slot += &c;
    if slot.is_zero() {
        map.remove(&k);
    }
}

pub fn basis_gamma2(b: BasisIndex) -> Option<i64> {
    match b.family {
        Family::U => Some(2 * b.n),
        Family::V => Some(2 * b.n + 1),
        _ => None,
    }
}

/// A two-variable function in the `u/v` basis.
pub fn from_two_var(f: &TwoVarFun) -> RingElt {
    let mut out = RingElt::new();
    for (b, c) in f.to_basis(BasisKind::UV) {
        if let Some(g) = basis_gamma2(b) {
            add_to(&mut out, g, c);
        }
    }
    out
}

pub fn to_two_var(f: &RingElt) -> TwoVarFun {
    let mut out = TwoVarFun::zero();
    for (&g, c) in f {
        let b = if g.rem_euclid(2) == 0 {
            BasisIndex::u(g.div_euclid(2))
        } else {
            BasisIndex::v(g.div_euclid(2))
        };
        out = out.add(&TwoVarFun::basis(b).scale(c));
    }
    out
}

/// `Σ c_k var^k`, placed on the matching side of the algebra.
pub fn from_one_var(alg: Algebra, f: &OneVarSeries) -> RingElt {
    let mut out = RingElt::new();
    for (k, c) in f.terms() {
        let g = match (alg, f.var()) {
            (Algebra::TS, Var::T) => 2 * k + 1,
            _ => 2 * k,
        };
        add_to(&mut out, g, c.clone());
    }
    out
}

/// The `t`- and `s`-expansions of `r_g ∈ K₂` as a `TS` ring element, keeping
/// exactly the generators with doubled index below `cut`.
pub fn expand_basis(g: i64, cut: i64) -> RingElt {
    let f = to_two_var(&RingElt::from([(g, Scalar::one())]));
    // t^j sits at 2j+1, s^j at 2j
    let t_order = (cut - 1).div_euclid(2) + i64::from((cut - 1).rem_euclid(2) != 0);
    let s_order = cut.div_euclid(2) + i64::from(cut.rem_euclid(2) != 0);
    let mut out = RingElt::new();
    for (k, c) in f.expand(Var::T, t_order).terms() {
        add_to(&mut out, 2 * k + 1, c.clone());
    }
    for (k, c) in f.expand(Var::S, s_order).terms() {
        add_to(&mut out, 2 * k, c.clone());
    }
    out.retain(|&k, _| k < cut);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(g: i64) -> RingElt {
        RingElt::from([(g, Scalar::one())])
    }

    #[test]
    fn two_table_matches_the_function_ring() {
        for g in -7..=7 {
            let fg = to_two_var(&single(g));
            for h in -7..=7 {
                let prod = to_two_var(&Algebra::Two.mul(&single(g), &single(h)));
                assert!(prod.same_function(&fg.mul2(&to_two_var(&single(h)))), "{g} {h}");
            }
            let d = to_two_var(&Algebra::Two.deriv(&single(g)));
            assert!(d.same_function(&fg.deriv2()), "{g}");
            assert_eq!(Algebra::Two.res_basis(g), fg.res2().unwrap());
            assert_eq!(from_two_var(&fg), single(g));
        }
    }

    #[test]
    fn ts_table_matches_pairs() {
        // s^n = (0, s^n), t^n = (t^n, 0)
        let pair = |g: i64| -> (Option<i64>, Option<i64>) {
            if g.rem_euclid(2) == 0 {
                (None, Some(g / 2))
            } else {
                (Some(g.div_euclid(2)), None)
            }
        };
        for g in -5..=5 {
            for h in -5..=5 {
                let (gt, gs) = pair(g);
                let (ht, hs) = pair(h);
                let expect: Vec<i64> = match (gt, gs, ht, hs) {
                    (Some(a), _, Some(b), _) => vec![2 * (a + b) + 1],
                    (_, Some(a), _, Some(b)) => vec![2 * (a + b)],
                    _ => vec![],
                };
                let got: Vec<i64> = Algebra::TS.mul_basis(g, h).into_iter().map(|(k, _)| k).collect();
                assert_eq!(got, expect);
            }
        }
        assert!(Algebra::TS.res_basis(-1).is_one());
        assert!(Algebra::TS.res_basis(-2).is_one());
        assert!(Algebra::TS.res_basis(1).is_zero());
    }

    #[test]
    fn residue_pairing_values() {
        // Res₂(u₁′u₋₁) = 2
        assert_eq!(Algebra::Two.residue_pairing(2, -2), Scalar::from_int(2));
        // Res(t′·t⁻¹) = 1
        assert_eq!(Algebra::One.residue_pairing(2, -2), Scalar::from_int(1));
        assert!(Algebra::One.residue_pairing(2, -4).is_zero());
    }

    #[test]
    fn expansion_generators() {
        // E(u_n) ≡ (-a)^n t^n + a^n s^n at the lowest orders
        for n in -3..=3 {
            let e = expand_basis(2 * n, 2 * n + 2);
            assert_eq!(e.get(&(2 * n + 1)), Some(&Scalar::neg_a_pow(n)));
            assert_eq!(e.get(&(2 * n)), Some(&Scalar::a_pow(n)));
            assert_eq!(e.len(), 2);
        }
    }
}
