//! Coordinates on spaces of opers and the polynomial equations between them.
//!
//! An oper in one variable is recorded by the coefficients `z_i` of its
//! Laurent series; in two variables by the coefficients `a_i`, `b_i` of
//! `Σ a_i u_i + b_i v_i`, or equivalently `α_i = a_i − a·b_i`, `β_i = b_i`
//! in the `{u_i, y_i}` basis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::env::{Algebra, RingElt};
use crate::scalar::{gen_binomial, int, rat, Rational, Scalar};
use crate::series::{BasisIndex, OneVarSeries, TwoVarFun, Var};
use crate::text::{fmt_sum, parse_sum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperError {
    #[error("weights ({lambda}, {mu}, {nu}) violate the tensor product rule")]
    WeightConstraint { lambda: i64, mu: i64, nu: i64 },
    #[error("{0} has no Sugawara counterpart")]
    Unsupported(CoordVar),
    #[error("negative power of a survives at a = 0")]
    NegativePowerOfA,
    #[error("polynomial is not univariate in {0}")]
    NotUnivariate(CoordVar),
    #[error("coefficients are not rational")]
    NotRational,
    #[error("constant term {0} too large for root search")]
    RootSearch(String),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Z,
    ZT,
    ZS,
    A,
    B,
    Alpha,
    Beta,
    Psi,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Z,
        Family::ZT,
        Family::ZS,
        Family::A,
        Family::B,
        Family::Alpha,
        Family::Beta,
        Family::Psi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Z => "z",
            Family::ZT => "zt",
            Family::ZS => "zs",
            Family::A => "a",
            Family::B => "b",
            Family::Alpha => "alpha",
            Family::Beta => "beta",
            Family::Psi => "psi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordVar {
    pub family: Family,
    pub index: i64,
}

impl CoordVar {
    pub fn new(family: Family, index: i64) -> Self {
        CoordVar { family, index }
    }

    pub fn z(i: i64) -> Self {
        CoordVar::new(Family::Z, i)
    }

    pub fn a(i: i64) -> Self {
        CoordVar::new(Family::A, i)
    }

    pub fn b(i: i64) -> Self {
        CoordVar::new(Family::B, i)
    }

    pub fn alpha(i: i64) -> Self {
        CoordVar::new(Family::Alpha, i)
    }

    pub fn beta(i: i64) -> Self {
        CoordVar::new(Family::Beta, i)
    }

    /// Weighted degree; the parameter `a` itself has degree −1.
    pub fn degree(self) -> i64 {
        let i = self.index;
        match self.family {
            Family::Z | Family::ZT | Family::ZS => i + 2,
            Family::A | Family::Alpha => 2 * i + 2,
            Family::B | Family::Beta => 2 * i + 3,
            Family::Psi => i + 1,
        }
    }
}

impl fmt::Display for CoordVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.family.name(), self.index)
    }
}

impl FromStr for CoordVar {
    type Err = OperError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || OperError::Parse {
            input: s.to_string(),
            reason: "expected name[index]".into(),
        };
        let (name, rest) = s.trim().split_once('[').ok_or_else(err)?;
        let idx = rest.strip_suffix(']').ok_or_else(err)?;
        let family = Family::ALL.into_iter().find(|f| f.name() == name).ok_or_else(err)?;
        Ok(CoordVar::new(family, idx.parse().map_err(|_| err())?))
    }
}

/// Sorted list of variables, with repetition.
pub type OperMonomial = Vec<CoordVar>;

fn monomial_degree(m: &OperMonomial) -> i64 {
    m.iter().map(|v| v.degree()).sum()
}

fn fmt_oper_monomial(m: &OperMonomial) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < m.len() {
        let mut j = i;
        while j < m.len() && m[j] == m[i] {
            j += 1;
        }
        match j - i {
            1 => parts.push(m[i].to_string()),
            k => parts.push(format!("{}^{k}", m[i])),
        }
        i = j;
    }
    parts.join("*")
}

/// Polynomial in oper coordinates with coefficients in ℚ[a, a⁻¹].
#[derive(Clone, PartialEq, Eq, Default)]
pub struct OperPoly {
    terms: BTreeMap<OperMonomial, Scalar>,
}

impl OperPoly {
    pub fn zero() -> Self {
        OperPoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut out = OperPoly::zero();
        out.add_term(Vec::new(), &c);
        out
    }

    pub fn one() -> Self {
        OperPoly::constant(Scalar::one())
    }

    pub fn var(v: CoordVar) -> Self {
        let mut out = OperPoly::zero();
        out.add_term(vec![v], &Scalar::one());
        out
    }

    fn add_term(&mut self, mut m: OperMonomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        m.sort();
        let slot = self.terms.entry(m.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OperMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[CoordVar]) -> Scalar {
        let mut key = m.to_vec();
        key.sort();
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn variables(&self) -> BTreeSet<CoordVar> {
        self.terms.keys().flatten().copied().collect()
    }

    /// Weighted degrees of all `a^e·monomial` pieces.
    pub fn degrees(&self) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for (m, c) in &self.terms {
            let d = monomial_degree(m);
            for (e, _) in c.terms() {
                out.insert(d - e);
            }
        }
        out
    }

    pub fn is_homogeneous(&self, degree: i64) -> bool {
        self.degrees().iter().all(|&d| d == degree)
    }

    pub fn add(&self, other: &OperPoly) -> OperPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> OperPoly {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn sub(&self, other: &OperPoly) -> OperPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> OperPoly {
        let mut out = OperPoly::zero();
        for (m, d) in &self.terms {
            out.add_term(m.clone(), &(d * c));
        }
        out
    }

    pub fn mul(&self, other: &OperPoly) -> OperPoly {
        let mut out = OperPoly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term([m.as_slice(), n.as_slice()].concat(), &(c * d));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> OperPoly {
        (0..n).fold(OperPoly::one(), |acc, _| acc.mul(self))
    }

    /// Replace every variable for which `image` returns a value.
    pub fn subst(&self, image: impl Fn(CoordVar) -> Option<OperPoly>) -> OperPoly {
        let mut cache: BTreeMap<CoordVar, OperPoly> = BTreeMap::new();
        let mut out = OperPoly::zero();
        for (m, c) in &self.terms {
            let mut prod = OperPoly::constant(c.clone());
            for v in m {
                let img = cache
                    .entry(*v)
                    .or_insert_with(|| image(*v).unwrap_or_else(|| OperPoly::var(*v)))
                    .clone();
                prod = prod.mul(&img);
            }
            out = out.add(&prod);
        }
        out
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Result<Scalar, OperError>) -> Result<OperPoly, OperError> {
        let mut out = OperPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c)?);
        }
        Ok(out)
    }

    /// Set `a = 0`; fails if a negative power of `a` is present.
    pub fn at_a_zero(&self) -> Result<OperPoly, OperError> {
        self.map_scalars(|c| {
            c.specialize_a0()
                .map(Scalar::from_rational)
                .map_err(|_| OperError::NegativePowerOfA)
        })
    }

    /// Coefficients `c_0, c_1, …` of a polynomial in the single variable `v`.
    pub fn univariate(&self, v: CoordVar) -> Result<Vec<Scalar>, OperError> {
        let mut out: Vec<Scalar> = Vec::new();
        for (m, c) in &self.terms {
            if m.iter().any(|w| *w != v) {
                return Err(OperError::NotUnivariate(v));
            }
            if out.len() <= m.len() {
                out.resize(m.len() + 1, Scalar::zero());
            }
            out[m.len()] = c.clone();
        }
        Ok(out)
    }

    pub fn from_univariate(v: CoordVar, coeffs: &[Scalar]) -> OperPoly {
        let mut out = OperPoly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            out.add_term(vec![v; k], c);
        }
        out
    }
}

impl fmt::Display for OperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by_key(|(m, _)| monomial_degree(m));
        f.write_str(&fmt_sum(sorted.into_iter().map(|(m, c)| (c, fmt_oper_monomial(m)))))
    }
}

impl fmt::Debug for OperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperPoly({self})")
    }
}

impl FromStr for OperPoly {
    type Err = OperError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let tail = |s: &str| -> Option<(CoordVar, u32)> {
            let (v, e) = match s.rsplit_once("]^") {
                Some((v, e)) => (format!("{v}]"), e.parse().ok()?),
                None => (s.to_string(), 1),
            };
            v.parse::<CoordVar>().ok().map(|v| (v, e))
        };
        let parsed = parse_sum(text, tail).map_err(|reason| OperError::Parse {
            input: text.to_string(),
            reason,
        })?;
        let mut out = OperPoly::zero();
        for (c, parts) in parsed {
            let m = parts.into_iter().flat_map(|(v, e)| std::iter::repeat_n(v, e as usize)).collect();
            out.add_term(m, &c);
        }
        Ok(out)
    }
}

/// `λ²/4 + λ/2`.
pub fn a_lambda(lambda: i64) -> Rational {
    rat(lambda * lambda + 2 * lambda, 4)
}

/// Convolution `Σ_{i+j=k} ψ_i ψ_j` over `0 ≤ i, j`.
fn psi_square(psis: &[OperPoly], k: i64) -> OperPoly {
    let mut out = OperPoly::zero();
    for i in 0..=k {
        let (i, j) = (i as usize, (k - i) as usize);
        if i < psis.len() && j < psis.len() {
            out = out.add(&psis[i].mul(&psis[j]));
        }
    }
    out
}

/// Solve `z_{−1} = −λψ₀`, `z_k = Σψ_iψ_j − (λ−1−k)ψ_{k+1}` for `ψ₀…ψ_{λ−1}`
/// in terms of `z` values.
fn solve_psi(lambda: i64, z: impl Fn(i64) -> OperPoly) -> Vec<OperPoly> {
    let mut psis = Vec::new();
    if lambda == 0 {
        return psis;
    }
    psis.push(z(-1).scale(&Scalar::from_rational(rat(-1, lambda))));
    for k in 0..lambda - 1 {
        let next = psi_square(&psis, k).sub(&z(k));
        psis.push(next.scale(&Scalar::from_rational(rat(1, lambda - 1 - k))));
    }
    psis
}

/// The relation `z_{λ−1} = P_λ(z_{−1}, …, z_{λ−2})` cutting out weight-`λ` opers.
pub fn p_lambda(lambda: i64) -> OperPoly {
    let psis = solve_psi(lambda, |k| OperPoly::var(CoordVar::z(k)));
    psi_square(&psis, lambda - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Yes,
    No,
    UndecidableAtOrder,
}

/// Whether the series lies in the weight-`λ` oper space, judged from its
/// coefficients `z_{−2} … z_{λ−1}`.
pub fn op1_member(f: &OneVarSeries, lambda: i64) -> Result<Membership, OperError> {
    if f.order() < lambda {
        return Ok(Membership::UndecidableAtOrder);
    }
    let closed = membership_closed(f, lambda);
    let recursive = membership_recursive(f, lambda);
    assert_eq!(closed, recursive, "oper membership tests disagree on {f} at weight {lambda}");
    Ok(closed)
}

fn coeff(f: &OneVarSeries, k: i64) -> Scalar {
    f.coeff(k).unwrap_or_default()
}

fn low_order_ok(f: &OneVarSeries, lambda: i64) -> bool {
    f.valuation().is_none_or(|v| v >= -2) && coeff(f, -2) == Scalar::from_rational(a_lambda(lambda))
}

fn membership_closed(f: &OneVarSeries, lambda: i64) -> Membership {
    if !low_order_ok(f, lambda) {
        return Membership::No;
    }
    let p = p_lambda(lambda);
    let value = p.subst(|v| (v.family == Family::Z).then(|| OperPoly::constant(coeff(f, v.index))));
    let value = value.as_constant().expect("P_λ evaluates to a constant");
    if value == coeff(f, lambda - 1) {
        Membership::Yes
    } else {
        Membership::No
    }
}

/// Build `ψ` step by step and compare `A/t² − (λ/t)ψ + ψ² + ψ′` with `f`.
fn membership_recursive(f: &OneVarSeries, lambda: i64) -> Membership {
    if !low_order_ok(f, lambda) {
        return Membership::No;
    }
    let order = lambda;
    let mut psi_vals: Vec<Scalar> = Vec::new();
    for k in -1..lambda - 1 {
        let square: Scalar = (0..=k)
            .filter_map(|i| Some(psi_vals.get(i as usize)? * psi_vals.get((k - i) as usize)?))
            .sum();
        let c = lambda - 1 - k;
        psi_vals.push((&square - &coeff(f, k)).scale(&rat(1, c)));
    }
    // ψ_λ is free: its contributions from ψ′ and −(λ/t)ψ cancel
    let series = OneVarSeries::from_terms(f.var(), order + 1, psi_vals.iter().enumerate().map(|(i, c)| (i as i64, c.clone())));
    let mut rebuilt = OneVarSeries::from_terms(f.var(), order, [(-2, Scalar::from_rational(a_lambda(lambda)))]);
    let over_t = OneVarSeries::from_terms(f.var(), order, series.terms().map(|(k, c)| (k - 1, c.scale(&int(-lambda)))));
    rebuilt = rebuilt.add(&over_t).add(&series.mul(&series)).add(&series.deriv());
    let rebuilt = rebuilt.truncate(order);
    if rebuilt.agrees_with(&f.truncate(order)) {
        Membership::Yes
    } else {
        Membership::No
    }
}

/// Which side an expansion lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    T,
    S,
}

/// `z^t_n` (or `z^s_n`) as a polynomial in `a_i, b_i` with `i ≥ −floor`.
pub fn coord_expand(side: Side, n: i64, floor: i64) -> OperPoly {
    let mut out = OperPoly::zero();
    for i in -floor..=n {
        let (ca, cb) = match side {
            Side::T => (
                Scalar::neg_a_pow(2 * i - n).scale(&gen_binomial(i, n - i)),
                Scalar::neg_a_pow(2 * i - n + 1).scale(&gen_binomial(i + 1, n - i)),
            ),
            Side::S => (
                Scalar::a_pow(2 * i - n).scale(&gen_binomial(i, n - i)),
                Scalar::a_pow(2 * i - n + 1).scale(&gen_binomial(i, n - i - 1)),
            ),
        };
        out = out
            .add(&OperPoly::var(CoordVar::a(i)).scale(&ca))
            .add(&OperPoly::var(CoordVar::b(i)).scale(&cb));
    }
    out
}

/// Diagonal identification `z_{2i} ↦ a_i`, `z_{2i+1} ↦ b_i`, inverted.
pub fn coord_diag(n: i64) -> CoordVar {
    if n.rem_euclid(2) == 0 {
        CoordVar::a(n.div_euclid(2))
    } else {
        CoordVar::b(n.div_euclid(2))
    }
}

fn diag_inverse(v: CoordVar) -> Option<CoordVar> {
    match v.family {
        Family::A => Some(CoordVar::z(2 * v.index)),
        Family::B => Some(CoordVar::z(2 * v.index + 1)),
        _ => None,
    }
}

/// The univariate polynomial in `z_{−2}` from the `t`-side equation restricted
/// to the diagonal.
pub fn f_lambda(lambda: i64, mu: i64) -> Result<OperPoly, OperError> {
    let floor = 2;
    let zt = |k: i64| coord_expand(Side::T, k, floor);
    let p = p_lambda(lambda).subst(|v| Some(zt(v.index)));
    let tilde = zt(lambda - 1).sub(&p);
    let am = a_lambda(mu);
    let al = a_lambda(lambda);
    let fixed = tilde.subst(|v| match (v.family, v.index) {
        (Family::A, -2) => Some(OperPoly::constant(Scalar::monomial(am.clone(), 2))),
        (Family::B, -2) => Some(OperPoly::constant(Scalar::monomial(&am - &al, 1))),
        _ => None,
    });
    let q = fixed.scale(&Scalar::a_pow(lambda + 1));
    let diag = q.at_a_zero()?;
    Ok(diag.subst(|v| diag_inverse(v).map(OperPoly::var)))
}

/// Exact rational roots (with multiplicity) of `Σ c_k x^k`, plus the leading
/// coefficient and any cofactor without rational roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorisation {
    pub leading: Rational,
    pub roots: Vec<Rational>,
    pub cofactor: Vec<Rational>,
}

pub fn rational_coeffs(coeffs: &[Scalar]) -> Result<Vec<Rational>, OperError> {
    coeffs.iter().map(|c| c.as_rational().ok_or(OperError::NotRational)).collect()
}

fn eval_poly(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Divide by `(x − r)`, assuming `r` is a root.
fn deflate(coeffs: &[Rational], r: &Rational) -> Vec<Rational> {
    let n = coeffs.len() - 1;
    let mut out = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for k in (0..n).rev() {
        carry = &coeffs[k + 1] + &carry * r;
        out[k] = carry.clone();
    }
    out
}

fn divisors(n: &BigInt) -> Result<Vec<u64>, OperError> {
    let n = n.abs().to_u64().ok_or_else(|| OperError::RootSearch(n.to_string()))?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Ok(out)
}

pub fn factor_rational(coeffs: &[Rational]) -> Result<Factorisation, OperError> {
    let mut poly: Vec<Rational> = coeffs.to_vec();
    while poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
    let leading = poly.last().cloned().unwrap_or_else(Rational::zero);
    let mut roots = Vec::new();
    while poly.len() > 1 && poly[0].is_zero() {
        poly.remove(0);
        roots.push(Rational::zero());
    }
    if poly.len() > 1 {
        let lcm = poly.iter().fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
        let ints: Vec<BigInt> = poly.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let ps = divisors(&ints[0])?;
        let qs = divisors(ints.last().expect("nonempty"))?;
        let mut candidates = BTreeSet::new();
        for p in &ps {
            for q in &qs {
                let r = Rational::new(BigInt::from(*p), BigInt::from(*q));
                candidates.insert(-r.clone());
                candidates.insert(r);
            }
        }
        for r in candidates {
            while poly.len() > 1 && eval_poly(&poly, &r).is_zero() {
                poly = deflate(&poly, &r);
                roots.push(r.clone());
            }
        }
    }
    roots.sort();
    let cofactor = poly.iter().map(|c| c / &leading).collect();
    Ok(Factorisation {
        leading,
        roots,
        cofactor,
    })
}

/// `ν ≥ 0` with `A_ν = r`, if any.
pub fn weight_of(r: &Rational) -> Option<i64> {
    let disc = r * int(4) + int(1);
    if !disc.is_integer() || disc.is_negative() {
        return None;
    }
    let d = disc.to_integer();
    let root = d.sqrt();
    (&root * &root == d).then(|| root.to_i64().expect("small weight") - 1)
}

/// A point of the two-variable oper space, `Σ a_i u_i + b_i v_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperElement {
    pub coords: BTreeMap<i64, (Scalar, Scalar)>,
    pub floor: i64,
}

impl OperElement {
    pub fn a(&self, i: i64) -> Scalar {
        self.coords.get(&i).map(|p| p.0.clone()).unwrap_or_default()
    }

    pub fn b(&self, i: i64) -> Scalar {
        self.coords.get(&i).map(|p| p.1.clone()).unwrap_or_default()
    }

    pub fn value(&self, v: CoordVar) -> Option<Scalar> {
        let i = v.index;
        match v.family {
            Family::A => Some(self.a(i)),
            Family::B | Family::Beta => Some(self.b(i)),
            Family::Alpha => Some(&self.a(i) - &(&self.b(i) * &Scalar::a_pow(1))),
            _ => None,
        }
    }

    /// Evaluate a polynomial in `a_i, b_i, α_i, β_i`.
    pub fn eval(&self, p: &OperPoly) -> Option<Scalar> {
        p.subst(|v| self.value(v).map(OperPoly::constant)).as_constant()
    }

    pub fn to_fun(&self) -> TwoVarFun {
        let mut basis = BTreeMap::new();
        for (&i, (a, b)) in &self.coords {
            basis.insert(BasisIndex::u(i), a.clone());
            basis.insert(BasisIndex::v(i), b.clone());
        }
        TwoVarFun::from_basis(basis.iter())
    }
}

impl fmt::Display for OperElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (&i, (a, b)) in &self.coords {
            if !a.is_zero() {
                terms.push((a, format!("u[{i}]")));
            }
            if !b.is_zero() {
                terms.push((b, format!("v[{i}]")));
            }
        }
        f.write_str(&fmt_sum(terms))
    }
}

fn check_weights(lambda: i64, mu: i64, nu: i64) -> Result<(), OperError> {
    let ok = lambda >= 0 && mu >= 0 && (lambda - mu).abs() <= nu && nu <= lambda + mu && (lambda + mu - nu) % 2 == 0;
    if ok {
        Ok(())
    } else {
        Err(OperError::WeightConstraint { lambda, mu, nu })
    }
}

/// `a²A_μ u₋₂ + a(A_μ − A_λ) v₋₂ + A_ν u₋₁`.
pub fn hyper_oper(lambda: i64, mu: i64, nu: i64) -> Result<OperElement, OperError> {
    check_weights(lambda, mu, nu)?;
    let (al, am, an) = (a_lambda(lambda), a_lambda(mu), a_lambda(nu));
    let mut coords = BTreeMap::new();
    coords.insert(-2, (Scalar::monomial(am.clone(), 2), Scalar::monomial(&am - &al, 1)));
    coords.insert(-1, (Scalar::from_rational(an), Scalar::zero()));
    Ok(OperElement { coords, floor: 2 })
}

fn pochhammer(x: i64, n: i64) -> Rational {
    (0..n).fold(Rational::one(), |acc, k| acc * int(x + k))
}

/// The terminating hypergeometric polynomial `φ(t)` attached to
/// `ν = λ + μ − 2j`, normalised so that `φ(0) = 1`.
pub fn hyper_series(lambda: i64, mu: i64, nu: i64, order: i64) -> Result<OneVarSeries, OperError> {
    check_weights(lambda, mu, nu)?;
    if lambda > mu {
        return Err(OperError::WeightConstraint { lambda, mu, nu });
    }
    let j = (lambda + mu - nu) / 2;
    let (al, be, ga) = (-j, j - lambda - mu - 1, -lambda);
    let mut fact = Rational::one();
    let mut terms = Vec::new();
    for n in 0..=j {
        if n > 0 {
            fact *= int(n);
        }
        let c = pochhammer(al, n) * pochhammer(be, n) / (pochhammer(ga, n) * &fact);
        terms.push((n, Scalar::monomial(c, -n)));
    }
    Ok(OneVarSeries::from_terms(Var::T, order, terms))
}

/// `t(t−a)φ″ − ((λ+μ)t − aλ)φ′ + (A_{λ+μ} − A_ν)φ`.
pub fn hyper_residual(lambda: i64, mu: i64, nu: i64, phi: &OneVarSeries) -> OneVarSeries {
    let order = phi.order();
    let poly = |terms: Vec<(i64, Scalar)>| OneVarSeries::from_terms(Var::T, order + 2, terms);
    let quad = poly(vec![(2, Scalar::one()), (1, -Scalar::a_pow(1))]);
    let lin = poly(vec![(1, Scalar::from_int(-(lambda + mu))), (0, Scalar::monomial(int(lambda), 1))]);
    let cst = Scalar::from_rational(a_lambda(lambda + mu) - a_lambda(nu));
    let d1 = phi.deriv();
    let d2 = d1.deriv();
    quad.mul(&d2).add(&lin.mul(&d1)).add(&phi.scale(&cst)).truncate(order - 2)
}

fn coordinate_of(var: CoordVar, h: &RingElt) -> Scalar {
    // α_i pairs with v_{−i−1}, β_i with u_{−i−1}
    let dual = match var.family {
        Family::Alpha => 2 * (-var.index - 1) + 1,
        _ => 2 * (-var.index - 1),
    };
    Algebra::Two.res(&Algebra::Two.mul(h, &RingElt::from([(dual, Scalar::one())])))
}

fn y_basis(j: i64) -> RingElt {
    RingElt::from([(2 * j, Scalar::a_pow(1)), (2 * j + 1, Scalar::one())])
}

/// Index window that holds every coordinate hit by `der_on_coord`.
pub fn auto_window(field: &RingElt, var: CoordVar) -> RangeInclusive<i64> {
    let lo = field.keys().next().map_or(0, |g| g.div_euclid(2));
    let hi = field.keys().next_back().map_or(0, |g| g.div_euclid(2));
    (var.index - hi - 4)..=(var.index - lo + 4)
}

/// `(f∂)·F` for the coordinate function `F = α_i` or `β_i`, as an affine
/// polynomial in the `α_j, β_j` with `j` in `window`.
pub fn der_on_coord(field: &RingElt, var: CoordVar, window: RangeInclusive<i64>) -> Result<OperPoly, OperError> {
    if !matches!(var.family, Family::Alpha | Family::Beta) {
        return Err(OperError::Unsupported(var));
    }
    let two = Algebra::Two;
    let d1 = two.deriv(field);
    let d3 = two.deriv(&two.deriv(&d1));
    let mut out = OperPoly::constant(coordinate_of(var, &d3).scale(&rat(1, 2)));
    let twice_d1: RingElt = d1.iter().map(|(k, c)| (*k, c.scale(&int(2)))).collect();
    for j in window {
        for (basis, coord) in [
            (RingElt::from([(2 * j, Scalar::one())]), CoordVar::alpha(j)),
            (y_basis(j), CoordVar::beta(j)),
        ] {
            let mut g = two.mul(&twice_d1, &basis);
            for (k, c) in two.mul(field, &two.deriv(&basis)) {
                crate::env::ring::add_to(&mut g, k, c);
            }
            let c = -coordinate_of(var, &g);
            out = out.add(&OperPoly::var(coord).scale(&c));
        }
    }
    Ok(out)
}

/// Which Sugawara family a coordinate corresponds to, with the factor 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SugawaraRef {
    /// `2·S^(1)_k`.
    One { k: i64 },
    /// `2·S^(2)_{k2/2}`.
    Two { k2: i64 },
}

impl fmt::Display for SugawaraRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SugawaraRef::One { k } => write!(f, "2*S1[{k}]"),
            SugawaraRef::Two { k2 } if k2 % 2 == 0 => write!(f, "2*S2[{}]", k2 / 2),
            SugawaraRef::Two { k2 } => write!(f, "2*S2[{k2}/2]"),
        }
    }
}

impl SugawaraRef {
    pub fn to_env(self, level2: i64) -> Result<crate::env::EnvElement, crate::env::EnvError> {
        let two = Scalar::from_int(2);
        Ok(match self {
            SugawaraRef::One { k } => crate::env::sugawara1(Algebra::One, k, level2)?.scale(&two),
            SugawaraRef::Two { k2 } => crate::env::sugawara2(k2, level2).scale(&two),
        })
    }
}

pub fn ff_dict(var: CoordVar) -> Result<SugawaraRef, OperError> {
    let n = var.index;
    match var.family {
        Family::Beta => Ok(SugawaraRef::Two { k2: -2 - 2 * n }),
        Family::Alpha => Ok(SugawaraRef::Two { k2: -2 * n - 1 }),
        Family::Z => Ok(SugawaraRef::One { k: -n - 1 }),
        _ => Err(OperError::Unsupported(var)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> OperPoly {
        s.parse().unwrap()
    }

    #[test]
    fn a_lambda_values() {
        assert_eq!(a_lambda(0), int(0));
        assert_eq!(a_lambda(1), rat(3, 4));
        assert_eq!(a_lambda(3), rat(15, 4));
    }

    #[test]
    fn small_p_lambda() {
        assert_eq!(p_lambda(1), poly("z[-1]^2"));
        assert_eq!(p_lambda(2), poly("z[-1]*z[0] - 1/4*z[-1]^3"));
        assert_eq!(p_lambda(2).to_string(), "-1/4*z[-1]^3 + z[-1]*z[0]");
    }

    /// All multisets of `z_{-1}, …, z_{λ-2}` of total weight `d`.
    fn weight_monomials(lambda: i64, d: i64) -> usize {
        fn count(vars: &[i64], d: i64) -> usize {
            match vars.split_first() {
                None => usize::from(d == 0),
                Some((&w, rest)) => (0..=d / w).map(|k| count(rest, d - k * w)).sum(),
            }
        }
        let weights: Vec<i64> = (-1..=lambda - 2).map(|i| i + 2).collect();
        count(&weights, d)
    }

    #[test]
    fn p_lambda_is_homogeneous_with_full_support() {
        for lambda in 1..=6 {
            let p = p_lambda(lambda);
            assert!(p.is_homogeneous(lambda + 1), "λ = {lambda}");
            assert_eq!(p.len(), weight_monomials(lambda, lambda + 1), "λ = {lambda}");
        }
    }

    #[test]
    fn display_round_trip() {
        let p = poly("3*a^-2*alpha[1]*beta[-2] - z[0]^2 + 1/2");
        assert_eq!(p.to_string().parse::<OperPoly>().unwrap(), p);
        assert_eq!(CoordVar::alpha(-3).to_string(), "alpha[-3]");
    }

    fn series(terms: &[(i64, Rational)], order: i64) -> OneVarSeries {
        OneVarSeries::from_terms(Var::T, order, terms.iter().map(|(k, c)| (*k, Scalar::from_rational(c.clone()))))
    }

    #[test]
    fn membership_examples() {
        for nu in 0..5 {
            let f = series(&[(-2, a_lambda(nu))], nu + 1);
            assert_eq!(op1_member(&f, nu).unwrap(), Membership::Yes);
        }
        let f = series(&[(-2, rat(3, 4)), (-1, int(1)), (0, int(1))], 3);
        assert_eq!(op1_member(&f, 1).unwrap(), Membership::Yes);
        let g = series(&[(-2, rat(3, 4)), (-1, int(1)), (0, int(2))], 3);
        assert_eq!(op1_member(&g, 1).unwrap(), Membership::No);
        let h = series(&[(-2, int(1))], 3);
        assert_eq!(op1_member(&h, 1).unwrap(), Membership::No);
        let short = series(&[(-2, rat(3, 4))], 0);
        assert_eq!(op1_member(&short, 1).unwrap(), Membership::UndecidableAtOrder);
    }

    #[test]
    fn coordinate_changes() {
        assert_eq!(coord_expand(Side::T, -2, 2), poly("a[-2] - a*b[-2]").scale(&Scalar::a_pow(-2)));
        assert_eq!(coord_expand(Side::S, -2, 2), poly("a[-2]").scale(&Scalar::a_pow(-2)));
        for n in -2..=6 {
            for side in [Side::T, Side::S] {
                assert!(coord_expand(side, n, 2).is_homogeneous(n + 2), "{n}");
            }
        }
        assert_eq!(coord_diag(-4), CoordVar::a(-2));
        assert_eq!(coord_diag(-3), CoordVar::b(-2));
        assert_eq!(coord_diag(0), CoordVar::a(0));
    }

    #[test]
    fn coordinate_changes_match_series_expansion() {
        // a generic point with a = 3, checked against the direct substitution
        let mut coords = BTreeMap::new();
        for i in -2..=2 {
            coords.insert(i, (Scalar::from_rational(rat(2 * i + 1, 3)), Scalar::from_rational(rat(i * i - 2, 5))));
        }
        let pt = OperElement { coords, floor: 2 };
        let fun = pt.to_fun();
        for (side, var) in [(Side::T, Var::T), (Side::S, Var::S)] {
            let exp = fun.expand(var, 3);
            for n in -2..3 {
                assert_eq!(pt.eval(&coord_expand(side, n, 2)).unwrap(), exp.coeff(n).unwrap(), "{n}");
            }
        }
    }

    #[test]
    fn f_lambda_small_case() {
        let f = f_lambda(1, 1).unwrap();
        assert_eq!(f, poly("-z[-2]^2 + 2*z[-2]"));
        let fac = factor_rational(&rational_coeffs(&f.univariate(CoordVar::z(-2)).unwrap()).unwrap()).unwrap();
        assert_eq!(fac.roots, vec![int(0), int(2)]);
    }

    #[test]
    fn f_lambda_roots() {
        for mu in 0..=3 {
            for lambda in 0..=mu {
                let f = f_lambda(lambda, mu).unwrap();
                let coeffs = rational_coeffs(&f.univariate(CoordVar::z(-2)).unwrap()).unwrap();
                assert_eq!(coeffs.len() as i64, lambda + 2);
                let fac = factor_rational(&coeffs).unwrap();
                let mut expect: Vec<Rational> = (0..=lambda).map(|i| a_lambda(mu + lambda - 2 * i)).collect();
                expect.sort();
                assert_eq!(fac.roots, expect, "λ = {lambda}, μ = {mu}");
                assert_eq!(fac.leading, f_lambda(lambda, lambda).unwrap().univariate(CoordVar::z(-2)).unwrap()[lambda as usize + 1].as_rational().unwrap());
            }
        }
    }

    #[test]
    fn weights_from_values() {
        for nu in 0..10 {
            assert_eq!(weight_of(&a_lambda(nu)), Some(nu));
        }
        assert_eq!(weight_of(&rat(1, 3)), None);
    }

    #[test]
    fn hypergeometric_elements() {
        let f = hyper_oper(1, 1, 0).unwrap();
        assert_eq!(f.a(-2), Scalar::monomial(rat(3, 4), 2));
        assert!(f.b(-2).is_zero() && f.a(-1).is_zero());
        assert!(matches!(hyper_oper(1, 1, 1), Err(OperError::WeightConstraint { .. })));
        let f = hyper_oper(1, 2, 3).unwrap();
        let expect: TwoVarFun = TwoVarFun::term(-2, 0, Scalar::from_rational(a_lambda(1)))
            .add(&TwoVarFun::term(0, -2, Scalar::from_rational(a_lambda(2))))
            .add(&TwoVarFun::term(-1, -1, Scalar::from_rational(a_lambda(3) - a_lambda(1) - a_lambda(2))));
        assert!(f.to_fun().same_function(&expect));
        for (l, m, n) in [(1, 1, 0), (1, 2, 1), (2, 2, 2)] {
            let sp = hyper_oper(l, m, n).unwrap().to_fun().specialize_diag(4).unwrap();
            assert_eq!(sp, series(&[(-2, a_lambda(n))], 4));
        }
    }

    #[test]
    fn hypergeometric_polynomials_solve_the_equation() {
        assert_eq!(hyper_series(2, 3, 5, 6).unwrap(), series(&[(0, int(1))], 6));
        for mu in 0..=3 {
            for lambda in 0..=mu {
                for j in 0..=lambda {
                    let nu = lambda + mu - 2 * j;
                    let phi = hyper_series(lambda, mu, nu, j + 4).unwrap();
                    assert_eq!(phi.valuation(), Some(0));
                    assert!(hyper_residual(lambda, mu, nu, &phi).is_zero(), "{lambda} {mu} {nu}");
                }
            }
        }
    }

    fn delta(i: i64, j: i64) -> Scalar {
        Scalar::from_int(i64::from(i == j))
    }

    fn lin(terms: &[(Scalar, CoordVar)], cst: Scalar) -> OperPoly {
        terms.iter().fold(OperPoly::constant(cst), |acc, (c, v)| acc.add(&OperPoly::var(*v).scale(c)))
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn a(e: i64) -> Scalar {
        Scalar::a_pow(e)
    }

    #[test]
    fn derivation_on_coordinates_matches_closed_forms() {
        let half = Scalar::frac(1, 2);
        for m in -3..=3 {
            let f1 = s(m * (m - 1) * (2 * m - 1));
            let f2 = s(m * (m - 1) * (m - 2));
            let f3 = s(m * (2 * m - 1) * (2 * m + 1));
            for i in -3..=3 {
                let (d2, d3, d1) = (delta(i, m - 2), delta(i, m - 3), delta(i, m - 1));
                let u = RingElt::from([(2 * m, Scalar::one())]);
                let v = RingElt::from([(2 * m + 1, Scalar::one())]);
                let run = |f: &RingElt, var: CoordVar| der_on_coord(f, var, auto_window(f, var)).unwrap();
                let p = m + i + 1;
                let e1 = lin(
                    &[(s(-(2 * i + 2 * m + 1)), CoordVar::beta(i - m)), (&a(1) * &s(p), CoordVar::alpha(i - m + 1))],
                    &(&(-&(&f1 * &a(1))) * &d2) - &(&(&(&half * &f2) * &a(3)) * &d3),
                );
                assert_eq!(run(&u, CoordVar::alpha(i)), e1, "u{m} α{i}");
                let e2 = lin(
                    &[(s(-2 * p), CoordVar::alpha(i - m + 1)), (&a(1) * &s(-p), CoordVar::beta(i - m + 1))],
                    &(&(&s(2) * &f1) * &d2) + &(&(&f2 * &a(2)) * &d3),
                );
                assert_eq!(run(&u, CoordVar::beta(i)), e2, "u{m} β{i}");
                let e3 = lin(
                    &[
                        (s(-2 * p), CoordVar::alpha(i - m)),
                        (&a(1) * &s(p), CoordVar::beta(i - m)),
                        (&a(2) * &s(-p), CoordVar::alpha(i - m + 1)),
                    ],
                    &(&(&(&(&half * &f2) * &a(4)) * &d3) + &(&(&(&Scalar::frac(3, 2) * &f1) * &a(2)) * &d2)) + &(&f3 * &d1),
                );
                assert_eq!(run(&v, CoordVar::alpha(i)), e3, "v{m} α{i}");
                let e4 = lin(
                    &[(s(-(2 * m + 2 * i + 3)), CoordVar::beta(i - m)), (&a(1) * &s(p), CoordVar::alpha(i - m + 1))],
                    &(&(-&(&f1 * &a(1))) * &d2) - &(&(&(&half * &f2) * &a(3)) * &d3),
                );
                assert_eq!(run(&v, CoordVar::beta(i)), e4, "v{m} β{i}");
            }
        }
    }

    #[test]
    fn hypergeometric_memberships() {
        for mu in 0..=3 {
            for lambda in 0..=mu {
                for j in 0..=lambda {
                    let nu = lambda + mu - 2 * j;
                    let f = hyper_oper(lambda, mu, nu).unwrap().to_fun();
                    let et = f.expand(Var::T, lambda + 1);
                    let es = f.expand(Var::S, mu + 1);
                    let sp = f.specialize_diag(nu + 1).unwrap();
                    assert_eq!(op1_member(&et, lambda).unwrap(), Membership::Yes, "t {lambda} {mu} {nu}");
                    assert_eq!(op1_member(&es, mu).unwrap(), Membership::Yes, "s {lambda} {mu} {nu}");
                    assert_eq!(op1_member(&sp, nu).unwrap(), Membership::Yes, "diag {lambda} {mu} {nu}");
                }
            }
        }
    }

    #[test]
    fn derivation_commutes_with_dictionary() {
        use crate::env::{derivation_act, EnvElement};
        for n in -2..=1 {
            for m in 0..=2 {
                let level = 6;
                let field = RingElt::from([(2 * m, Scalar::one())]);
                let beta = CoordVar::beta(n);
                let lhs = derivation_act(Algebra::Two, &field, &ff_dict(beta).unwrap().to_env(level).unwrap()).unwrap();
                let d = der_on_coord(&field, beta, auto_window(&field, beta)).unwrap();
                let mut rhs = EnvElement::zero(Algebra::Two, Some(level));
                for (mono, c) in d.terms() {
                    let term = match mono.as_slice() {
                        [] => EnvElement::scalar(Algebra::Two, crate::env::CPoly::constant(c.clone())),
                        [v] => ff_dict(*v).unwrap().to_env(level).unwrap().scale(c),
                        _ => unreachable!(),
                    };
                    rhs = rhs.add(&term).unwrap();
                }
                let lvl = lhs.level().unwrap().min(rhs.level().unwrap());
                assert_eq!(lhs.truncate(lvl).at_critical(), rhs.truncate(lvl).at_critical(), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn dictionary() {
        assert_eq!(ff_dict(CoordVar::beta(-2)).unwrap(), SugawaraRef::Two { k2: 2 });
        assert_eq!(ff_dict(CoordVar::alpha(-1)).unwrap(), SugawaraRef::Two { k2: 1 });
        assert_eq!(ff_dict(CoordVar::z(-2)).unwrap(), SugawaraRef::One { k: 1 });
        assert_eq!(ff_dict(CoordVar::beta(-2)).unwrap().to_string(), "2*S2[1]");
        assert_eq!(ff_dict(CoordVar::alpha(-1)).unwrap().to_string(), "2*S2[1/2]");
        assert!(ff_dict(CoordVar::a(0)).is_err());
    }
}
