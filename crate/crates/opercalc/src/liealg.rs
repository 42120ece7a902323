//! sl(2): structure constants, Killing form, dual basis and the affine bracket.

use std::fmt;

use thiserror::Error;

use crate::scalar::{int, rat, Rational, Scalar};
use crate::series::{OneVarSeries, SeriesError, TwoVarFun, Var};

/// Basis of sl(2) in the fixed order `e < h < f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sl2 {
    E,
    H,
    F,
}

pub const BASIS: [Sl2; 3] = [Sl2::E, Sl2::H, Sl2::F];

impl Sl2 {
    fn idx(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Sl2::E => "e",
            Sl2::H => "h",
            Sl2::F => "f",
        }
    }

    pub fn from_name(s: &str) -> Option<Sl2> {
        match s {
            "e" => Some(Sl2::E),
            "h" => Some(Sl2::H),
            "f" => Some(Sl2::F),
            _ => None,
        }
    }
}

impl fmt::Display for Sl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `[x, y]` on basis elements: at most one basis element with an integer coefficient.
pub fn bracket_basis(x: Sl2, y: Sl2) -> Option<(Sl2, i64)> {
    use Sl2::*;
    match (x, y) {
        (H, E) => Some((E, 2)),
        (E, H) => Some((E, -2)),
        (H, F) => Some((F, -2)),
        (F, H) => Some((F, 2)),
        (E, F) => Some((H, 1)),
        (F, E) => Some((H, -1)),
        _ => None,
    }
}

/// Killing form on basis elements: `κ(e,f) = 4`, `κ(h,h) = 8`.
pub fn killing_basis(x: Sl2, y: Sl2) -> i64 {
    use Sl2::*;
    match (x, y) {
        (E, F) | (F, E) => 4,
        (H, H) => 8,
        _ => 0,
    }
}

/// Pairs `(J^α, J_α)` with `J_α = c·(basis element)`, dual under the Killing form.
pub fn dual_basis() -> [(Sl2, Sl2, Rational); 3] {
    [
        (Sl2::E, Sl2::F, rat(1, 4)),
        (Sl2::H, Sl2::H, rat(1, 8)),
        (Sl2::F, Sl2::E, rat(1, 4)),
    ]
}

/// An element of sl(2) with coefficients in ℚ[a,a⁻¹].
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Sl2Elt {
    pub coeffs: [Scalar; 3],
}

impl Sl2Elt {
    pub fn zero() -> Self {
        Sl2Elt::default()
    }

    pub fn basis(x: Sl2) -> Self {
        let mut out = Sl2Elt::zero();
        out.coeffs[x.idx()] = Scalar::one();
        out
    }

    pub fn coeff(&self, x: Sl2) -> &Scalar {
        &self.coeffs[x.idx()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &Sl2Elt) -> Sl2Elt {
        Sl2Elt {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] + &other.coeffs[i]),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Sl2Elt {
        Sl2Elt {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] * c),
        }
    }

    pub fn bracket(&self, other: &Sl2Elt) -> Sl2Elt {
        let mut out = Sl2Elt::zero();
        for x in BASIS {
            for y in BASIS {
                if let Some((z, c)) = bracket_basis(x, y) {
                    let w = &(self.coeff(x) * other.coeff(y)) * &Scalar::from_int(c);
                    out.coeffs[z.idx()] += &w;
                }
            }
        }
        out
    }
}

pub fn killing(x: &Sl2Elt, y: &Sl2Elt) -> Scalar {
    let mut out = Scalar::zero();
    for p in BASIS {
        for q in BASIS {
            let k = killing_basis(p, q);
            if k != 0 {
                out += &(&(x.coeff(p) * y.coeff(q)) * &Scalar::from_int(k));
            }
        }
    }
    out
}

/// The adjoint matrix of a basis element, columns indexed by `e, h, f`.
pub fn ad_matrix(x: Sl2) -> [[Rational; 3]; 3] {
    let mut m: [[Rational; 3]; 3] = Default::default();
    for y in BASIS {
        if let Some((z, c)) = bracket_basis(x, y) {
            m[z.idx()][y.idx()] = int(c);
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("functions of different kinds cannot be bracketed under this residue map")]
    MismatchedFunctions,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Function part of an affine generator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Fun {
    Two(TwoVarFun),
    One(OneVarSeries),
    /// A pair `(g_t, g_s)` in `Q((t)) × Q((s))`.
    Pair(OneVarSeries, OneVarSeries),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueMap {
    Two,
    T,
    S,
    TS,
}

/// `x⊗f + c·C`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineTerm {
    pub lie: Sl2Elt,
    pub fun: Fun,
    pub central: Scalar,
}

fn one_var_res(f: &OneVarSeries, var: Var) -> Result<Scalar, LieError> {
    if f.var() != var {
        return Err(LieError::MismatchedFunctions);
    }
    f.residue().ok_or(LieError::MismatchedFunctions)
}

/// `[x f, y g] = [x,y] fg + Res(f′g) κ(x,y) C`. Input central parts drop out.
pub fn affine_bracket(x: &AffineTerm, y: &AffineTerm, residue: ResidueMap) -> Result<AffineTerm, LieError> {
    let lie = x.lie.bracket(&y.lie);
    let kappa = killing(&x.lie, &y.lie);
    let (fun, res) = match (&x.fun, &y.fun, residue) {
        (Fun::Two(f), Fun::Two(g), ResidueMap::Two) => (Fun::Two(f.mul2(g)), f.deriv2().mul2(g).res2()?),
        (Fun::One(f), Fun::One(g), ResidueMap::T | ResidueMap::S) => {
            let var = if residue == ResidueMap::T { Var::T } else { Var::S };
            let r = one_var_res(&f.deriv().mul(g), var)?;
            (Fun::One(f.mul(g)), r)
        }
        (Fun::Pair(ft, fs), Fun::Pair(gt, gs), ResidueMap::TS) => {
            let r = &one_var_res(&ft.deriv().mul(gt), Var::T)? + &one_var_res(&fs.deriv().mul(gs), Var::S)?;
            (Fun::Pair(ft.mul(gt), fs.mul(gs)), r)
        }
        _ => return Err(LieError::MismatchedFunctions),
    };
    Ok(AffineTerm {
        lie,
        fun,
        central: &res * &kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(x: Sl2) -> Sl2Elt {
        Sl2Elt::basis(x)
    }

    fn trace_form(x: Sl2, y: Sl2) -> Rational {
        // trace(ad x ∘ ad y) computed from the matrices
        let (mx, my) = (ad_matrix(x), ad_matrix(y));
        let mut tr = int(0);
        for i in 0..3 {
            for k in 0..3 {
                tr += &mx[i][k] * &my[k][i];
            }
        }
        tr
    }

    #[test]
    fn killing_is_the_trace_form() {
        for x in BASIS {
            for y in BASIS {
                assert_eq!(int(killing_basis(x, y)), trace_form(x, y), "{x},{y}");
            }
        }
        assert_eq!(killing(&e(Sl2::E), &e(Sl2::F)), Scalar::from_int(4));
        assert_eq!(killing(&e(Sl2::H), &e(Sl2::H)), Scalar::from_int(8));
        assert!(killing(&e(Sl2::E), &e(Sl2::E)).is_zero());
    }

    #[test]
    fn dual_pairs_are_dual() {
        for (x, y, c) in dual_basis() {
            for z in BASIS {
                let k = int(killing_basis(z, y)) * &c;
                assert_eq!(k, int(i64::from(z == x)));
            }
        }
    }

    #[test]
    fn jacobi_on_basis() {
        for x in BASIS {
            for y in BASIS {
                for z in BASIS {
                    let (x, y, z) = (e(x), e(y), e(z));
                    let j = x
                        .bracket(&y.bracket(&z))
                        .add(&y.bracket(&z.bracket(&x)))
                        .add(&z.bracket(&x.bracket(&y)));
                    assert!(j.is_zero());
                }
            }
        }
    }

    #[test]
    fn casimir_identities() {
        for x in BASIS {
            let xe = e(x);
            let mut total = Sl2Elt::zero();
            let mut trace = Scalar::zero();
            for (p, q, c) in dual_basis() {
                let cs = Scalar::from_rational(c);
                let lower = e(q).scale(&cs);
                total = total.add(&e(p).bracket(&lower.bracket(&xe)));
                trace += &killing(&e(p).bracket(&xe), &lower);
            }
            assert_eq!(total, xe);
            assert!(trace.is_zero());
            // Σ [J^α,x]⊗J_α + J^α⊗[J_α,x] = 0, as a 3×3 coefficient table
            let mut table: [[Scalar; 3]; 3] = Default::default();
            for (p, q, c) in dual_basis() {
                let cs = Scalar::from_rational(c);
                let lower = e(q).scale(&cs);
                let left = e(p).bracket(&xe);
                let right = lower.bracket(&xe);
                for i in BASIS {
                    for j in BASIS {
                        table[i.idx()][j.idx()] += &(left.coeff(i) * lower.coeff(j));
                        table[i.idx()][j.idx()] += &(e(p).coeff(i) * right.coeff(j));
                    }
                }
            }
            assert!(table.iter().flatten().all(Scalar::is_zero));
        }
    }

    fn gen(x: Sl2, f: TwoVarFun) -> AffineTerm {
        AffineTerm {
            lie: e(x),
            fun: Fun::Two(f),
            central: Scalar::zero(),
        }
    }

    #[test]
    fn affine_bracket_example() {
        let r = affine_bracket(&gen(Sl2::E, TwoVarFun::u(1)), &gen(Sl2::F, TwoVarFun::u(-1)), ResidueMap::Two).unwrap();
        assert_eq!(r.lie, e(Sl2::H));
        assert_eq!(r.fun, Fun::Two(TwoVarFun::u(0)));
        assert_eq!(r.central, Scalar::from_int(8));
        let x = gen(Sl2::H, TwoVarFun::v(2));
        let r = affine_bracket(&x, &x, ResidueMap::Two).unwrap();
        assert!(r.lie.is_zero() && r.central.is_zero());
        assert_eq!(
            affine_bracket(&x, &x, ResidueMap::T),
            Err(LieError::MismatchedFunctions)
        );
    }

    #[test]
    fn casimir_sum_of_brackets() {
        // Σ_α [J^α f, J_α g] is central and equals 3·Res₂(f′g)·C
        let f = TwoVarFun::v(1);
        let g = TwoVarFun::v(-2);
        let mut lie = Sl2Elt::zero();
        let mut central = Scalar::zero();
        for (p, q, c) in dual_basis() {
            let lower = AffineTerm {
                lie: e(q).scale(&Scalar::from_rational(c)),
                fun: Fun::Two(g.clone()),
                central: Scalar::zero(),
            };
            let r = affine_bracket(&gen(p, f.clone()), &lower, ResidueMap::Two).unwrap();
            lie = lie.add(&r.lie);
            central += &r.central;
        }
        assert!(lie.is_zero());
        let res = f.deriv2().mul2(&g).res2().unwrap();
        assert_eq!(central, &res * &Scalar::from_int(3));
        // at C = -1/2 this is -3/2·Res₂(f′g)
        assert_eq!(&central * &Scalar::frac(-1, 2), &res * &Scalar::frac(-3, 2));
    }

    #[test]
    fn one_variable_and_pair_brackets() {
        let t = |k: i64| OneVarSeries::from_terms(Var::T, 50, [(k, Scalar::one())]);
        let s = |k: i64| OneVarSeries::from_terms(Var::S, 50, [(k, Scalar::one())]);
        let x = AffineTerm { lie: e(Sl2::H), fun: Fun::One(t(2)), central: Scalar::zero() };
        let y = AffineTerm { lie: e(Sl2::H), fun: Fun::One(t(-2)), central: Scalar::zero() };
        let r = affine_bracket(&x, &y, ResidueMap::T).unwrap();
        assert_eq!(r.central, Scalar::from_int(16));
        let x = AffineTerm { lie: e(Sl2::E), fun: Fun::Pair(t(1), s(1)), central: Scalar::zero() };
        let y = AffineTerm { lie: e(Sl2::F), fun: Fun::Pair(t(-1), s(-1)), central: Scalar::zero() };
        let r = affine_bracket(&x, &y, ResidueMap::TS).unwrap();
        assert_eq!(r.central, Scalar::from_int(8));
    }

    fn arb_gen() -> impl Strategy<Value = AffineTerm> {
        (0usize..3, -3i64..=3, -3i64..=3).prop_map(|(x, i, j)| gen(BASIS[x], TwoVarFun::monomial(i, j)))
    }

    /// Sum of `Σ_b b⊗f_b` collected per basis element.
    fn components(t: &AffineTerm) -> [TwoVarFun; 3] {
        let Fun::Two(f) = &t.fun else { unreachable!() };
        std::array::from_fn(|i| f.scale(&t.lie.coeffs[i]))
    }

    proptest! {
        #[test]
        fn affine_jacobi(x in arb_gen(), y in arb_gen(), z in arb_gen()) {
            // central parts never feed back, so Jacobi holds term by term
            let mut acc: [TwoVarFun; 3] = Default::default();
            let mut central = Scalar::zero();
            for (p, q, r) in [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)] {
                let inner = affine_bracket(q, r, ResidueMap::Two).unwrap();
                let inner = AffineTerm { central: Scalar::zero(), ..inner };
                let out = affine_bracket(p, &inner, ResidueMap::Two).unwrap();
                central += &out.central;
                for (a, c) in acc.iter_mut().zip(components(&out)) {
                    *a = a.add(&c);
                }
            }
            prop_assert!(central.is_zero());
            for a in &acc {
                prop_assert!(a.is_zero(), "{}", a);
            }
        }

        #[test]
        fn bracket_antisymmetric(x in arb_gen(), y in arb_gen()) {
            let l = affine_bracket(&x, &y, ResidueMap::Two).unwrap();
            let r = affine_bracket(&y, &x, ResidueMap::Two).unwrap();
            prop_assert!((&l.central + &r.central).is_zero());
            for (a, b) in components(&l).iter().zip(components(&r)) {
                prop_assert!(a.add(&b).is_zero());
            }
        }
    }
}
