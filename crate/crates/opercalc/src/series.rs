//! Two-variable Laurent functions in `t` and `s = t - a`, their u/v and x/y
//! bases, the two-point residue, and the expansion/specialisation maps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::One;
use thiserror::Error;

use crate::scalar::{gen_binomial, int, Rational, Scalar, ScalarError};
use crate::text::{fmt_sum, parse_sum, strip_int_suffix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation marker {0} hides terms with nonzero residue")]
    TruncationTooCoarse(i64),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    S,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::T => "t",
            Var::S => "s",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    U,
    V,
    X,
    Y,
}

/// `u_n = tⁿsⁿ`, `v_n = tⁿsⁿ⁺¹`, `x_n = tⁿsⁿ`, `y_n = tⁿ⁺¹sⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub family: Family,
    pub n: i64,
}

impl BasisIndex {
    pub fn u(n: i64) -> Self {
        BasisIndex { family: Family::U, n }
    }
    pub fn v(n: i64) -> Self {
        BasisIndex { family: Family::V, n }
    }
    pub fn x(n: i64) -> Self {
        BasisIndex { family: Family::X, n }
    }
    pub fn y(n: i64) -> Self {
        BasisIndex { family: Family::Y, n }
    }

    /// Exponents `(i, j)` of the monomial `tⁱsʲ`.
    pub fn exponents(self) -> (i64, i64) {
        let n = self.n;
        match self.family {
            Family::U | Family::X => (n, n),
            Family::V => (n, n + 1),
            Family::Y => (n + 1, n),
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::U => "u",
            Family::V => "v",
            Family::X => "x",
            Family::Y => "y",
        };
        write!(f, "{name}_{}", self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    UV,
    XY,
}

/// A finite ℚ[a,a⁻¹]-combination of monomials `tⁱsʲ`, optionally known only
/// modulo `u_m·ℂ[[t,s]]`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TwoVarFun {
    terms: BTreeMap<(i64, i64), Scalar>,
    trunc: Option<i64>,
}

impl TwoVarFun {
    pub fn zero() -> Self {
        TwoVarFun::default()
    }

    pub fn one() -> Self {
        TwoVarFun::monomial(0, 0)
    }

    pub fn monomial(i: i64, j: i64) -> Self {
        TwoVarFun::term(i, j, Scalar::one())
    }

    pub fn term(i: i64, j: i64, c: Scalar) -> Self {
        let mut f = TwoVarFun::zero();
        f.add_term(i, j, &c);
        f
    }

    pub fn basis(b: BasisIndex) -> Self {
        let (i, j) = b.exponents();
        TwoVarFun::monomial(i, j)
    }

    pub fn u(n: i64) -> Self {
        TwoVarFun::basis(BasisIndex::u(n))
    }
    pub fn v(n: i64) -> Self {
        TwoVarFun::basis(BasisIndex::v(n))
    }
    pub fn x(n: i64) -> Self {
        TwoVarFun::basis(BasisIndex::x(n))
    }
    pub fn y(n: i64) -> Self {
        TwoVarFun::basis(BasisIndex::y(n))
    }

    /// The interleaved family: `w_m = u_m` for integral `m`, `v_{m-½}` otherwise,
    /// indexed by `2m`.
    pub fn w2(m2: i64) -> Self {
        if m2.rem_euclid(2) == 0 {
            TwoVarFun::u(m2 / 2)
        } else {
            TwoVarFun::v((m2 - 1) / 2)
        }
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &Scalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, i: i64, j: i64) -> Scalar {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, i: i64, j: i64, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        if self.trunc.is_some_and(|m| i.min(j) >= m) {
            return;
        }
        let slot = self.terms.entry((i, j)).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    /// Forget everything in `u_m·ℂ[[t,s]]`.
    pub fn with_trunc(&self, m: i64) -> TwoVarFun {
        let m = self.trunc.map_or(m, |old| old.min(m));
        TwoVarFun {
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| (*i).min(*j) < m)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            trunc: Some(m),
        }
    }

    /// Least `min(i, j)` over stored terms.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().map(|(i, j)| (*i).min(*j)).min()
    }

    fn combine_trunc(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) | (None, x) => x,
        }
    }

    pub fn add(&self, other: &TwoVarFun) -> TwoVarFun {
        let trunc = Self::combine_trunc(self.trunc, other.trunc);
        let mut out = TwoVarFun {
            terms: BTreeMap::new(),
            trunc,
        };
        for ((i, j), c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*i, *j, c);
        }
        out
    }

    pub fn sub(&self, other: &TwoVarFun) -> TwoVarFun {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> TwoVarFun {
        let mut out = TwoVarFun {
            terms: BTreeMap::new(),
            trunc: self.trunc,
        };
        for ((i, j), x) in &self.terms {
            out.add_term(*i, *j, &(x * c));
        }
        out
    }

    pub fn mul2(&self, other: &TwoVarFun) -> TwoVarFun {
        let from_self = self
            .trunc
            .map(|m| other.valuation().map_or(i64::MAX, |v| m + v));
        let from_other = other
            .trunc
            .map(|m| self.valuation().map_or(i64::MAX, |v| m + v));
        let trunc = Self::combine_trunc(from_self, from_other).filter(|m| *m != i64::MAX);
        let mut out = TwoVarFun {
            terms: BTreeMap::new(),
            trunc,
        };
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, &(c1 * c2));
            }
        }
        out
    }

    /// The derivation with `∂t = ∂s = 1`.
    pub fn deriv2(&self) -> TwoVarFun {
        let mut out = TwoVarFun {
            terms: BTreeMap::new(),
            trunc: self.trunc.map(|m| m - 1),
        };
        for ((i, j), c) in &self.terms {
            out.add_term(i - 1, *j, &c.scale(&int(*i)));
            out.add_term(*i, j - 1, &c.scale(&int(*j)));
        }
        out
    }

    /// The two-point residue.
    pub fn res2(&self) -> Result<Scalar, SeriesError> {
        if let Some(m) = self.trunc {
            if m < 0 {
                return Err(SeriesError::TruncationTooCoarse(m));
            }
        }
        Ok(self
            .terms
            .iter()
            .map(|((i, j), c)| c * &monomial_res2(*i, *j))
            .sum())
    }

    /// Coordinates in the u/v or x/y basis. Basis elements inside the
    /// truncation ideal are omitted.
    pub fn to_basis(&self, kind: BasisKind) -> BTreeMap<BasisIndex, Scalar> {
        let mut uv: BTreeMap<BasisIndex, Scalar> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            for (b, x) in monomial_to_uv(*i, *j) {
                let slot = uv.entry(b).or_default();
                *slot += &(c * &x);
            }
        }
        uv.retain(|b, c| !c.is_zero() && self.trunc.is_none_or(|m| b.n < m));
        match kind {
            BasisKind::UV => uv,
            BasisKind::XY => {
                // u_n = x_n and v_n = y_n - a·x_n
                let mut xy: BTreeMap<BasisIndex, Scalar> = BTreeMap::new();
                for (b, c) in uv {
                    match b.family {
                        Family::U => *xy.entry(BasisIndex::x(b.n)).or_default() += &c,
                        _ => {
                            *xy.entry(BasisIndex::y(b.n)).or_default() += &c;
                            *xy.entry(BasisIndex::x(b.n)).or_default() -= &(&c * &Scalar::a_pow(1));
                        }
                    }
                }
                xy.retain(|_, c| !c.is_zero());
                xy
            }
        }
    }

    pub fn from_basis<'a, I>(coords: I) -> TwoVarFun
    where
        I: IntoIterator<Item = (&'a BasisIndex, &'a Scalar)>,
    {
        let mut out = TwoVarFun::zero();
        for (b, c) in coords {
            let (i, j) = b.exponents();
            out.add_term(i, j, c);
        }
        out
    }

    /// Equality as functions: the monomial form is not unique because
    /// `a·tⁱsʲ = tⁱ⁺¹sʲ - tⁱsʲ⁺¹`.
    pub fn same_function(&self, other: &TwoVarFun) -> bool {
        self.trunc == other.trunc && self.to_basis(BasisKind::UV) == other.to_basis(BasisKind::UV)
    }

    /// `E_t` (substitute `s = t - a`) or `E_s` (substitute `t = s + a`),
    /// known modulo `var^order`.
    pub fn expand(&self, var: Var, order: i64) -> OneVarSeries {
        let order = self.trunc.map_or(order, |m| order.min(m));
        let mut out = OneVarSeries::new(var, order);
        for ((i, j), c) in &self.terms {
            // the substituted exponent and the one kept as-is
            let (keep, sub, base) = match var {
                Var::T => (*i, *j, Scalar::from_int(-1)),
                Var::S => (*j, *i, Scalar::from_int(1)),
            };
            if sub >= 0 {
                for k in 0..=sub {
                    if keep + k >= order {
                        break;
                    }
                    let coeff = base_pow(&base, sub - k).scale(&gen_binomial(sub, k));
                    out.add_term(keep + k, &(c * &coeff));
                }
            } else {
                let mut k = 0;
                while keep + k < order {
                    let coeff = base_pow(&base, sub - k).scale(&gen_binomial(sub, k));
                    out.add_term(keep + k, &(c * &coeff));
                    k += 1;
                }
            }
        }
        out
    }

    /// Set `a = 0` and `s = t`.
    pub fn specialize_diag(&self, order: i64) -> Result<OneVarSeries, SeriesError> {
        let order = self.trunc.map_or(order, |m| order.min(2 * m));
        let mut out = OneVarSeries::new(Var::T, order);
        for ((i, j), c) in &self.terms {
            let c0 = c.specialize_a0()?;
            if i + j < order {
                out.add_term(i + j, &Scalar::from_rational(c0));
            }
        }
        Ok(out)
    }
}

/// `(±a)^e` where `base` is `±1`.
fn base_pow(base: &Scalar, e: i64) -> Scalar {
    if base.is_one() {
        Scalar::a_pow(e)
    } else {
        Scalar::neg_a_pow(e)
    }
}

/// `Res₂ tⁱsʲ = (C(i,−j−1) + (−1)^{i+j+1} C(j,−i−1))·a^{i+j+1}`.
pub fn monomial_res2(i: i64, j: i64) -> Scalar {
    let sign = if (i + j + 1).rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    };
    let c = gen_binomial(i, -j - 1) + sign * gen_binomial(j, -i - 1);
    Scalar::monomial(c, i + j + 1)
}

/// Write `tⁱsʲ` in the u/v basis by clearing denominators with `u_{-N}` and
/// eliminating on the `t`-degree of `tⁱ⁺ᴺ(t−a)ʲ⁺ᴺ`; `u_m` has degree `2m` and
/// `v_m` degree `2m+1`, both monic.
fn monomial_to_uv(i: i64, j: i64) -> Vec<(BasisIndex, Scalar)> {
    let shift = 0.max(-i).max(-j);
    let mut poly = t_poly(i + shift, j + shift);
    let mut out = Vec::new();
    while let Some(d) = poly.iter().rposition(|c| !c.is_zero()) {
        let c = poly[d].clone();
        let m = (d / 2) as i64;
        let (b, basis_poly) = if d % 2 == 0 {
            (BasisIndex::u(m - shift), t_poly(m, m))
        } else {
            (BasisIndex::v(m - shift), t_poly(m, m + 1))
        };
        for (k, x) in basis_poly.iter().enumerate() {
            poly[k] -= &(&c * x);
        }
        out.push((b, c));
    }
    out
}

/// Coefficients in `t` of `tᵖ(t−a)^q` for `p, q ≥ 0`.
fn t_poly(p: i64, q: i64) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); (p + q + 1) as usize];
    for k in 0..=q {
        out[(p + k) as usize] = Scalar::neg_a_pow(q - k).scale(&gen_binomial(q, k));
    }
    out
}

impl fmt::Display for TwoVarFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = fmt_sum(
            self.terms
                .iter()
                .map(|((i, j), c)| (c, format!("t^{i}*s^{j}"))),
        );
        match self.trunc {
            Some(m) => write!(f, "{body} + O(u_{m})"),
            None => f.write_str(&body),
        }
    }
}

impl fmt::Debug for TwoVarFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwoVarFun({self})")
    }
}

#[derive(Clone, Copy)]
enum TsFactor {
    T(i64),
    S(i64),
}

impl FromStr for TwoVarFun {
    type Err = SeriesError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| SeriesError::Parse {
            input: text.to_string(),
            reason,
        };
        let (body, trunc) = match text.rsplit_once("+ O(u_") {
            Some((body, rest)) => {
                let m = rest
                    .trim()
                    .strip_suffix(')')
                    .and_then(|r| r.parse::<i64>().ok())
                    .ok_or_else(|| err("bad truncation marker".into()))?;
                (body, Some(m))
            }
            None => (text, None),
        };
        let parsed = parse_sum(body, |f| {
            strip_int_suffix(f, "t^")
                .map(TsFactor::T)
                .or_else(|| strip_int_suffix(f, "s^").map(TsFactor::S))
        })
        .map_err(err)?;
        let mut out = TwoVarFun {
            terms: BTreeMap::new(),
            trunc,
        };
        for (c, factors) in parsed {
            let (mut i, mut j) = (0, 0);
            for fac in factors {
                match fac {
                    TsFactor::T(k) => i += k,
                    TsFactor::S(k) => j += k,
                }
            }
            out.add_term(i, j, &c);
        }
        Ok(out)
    }
}

/// Text form `coef*u_n + coef*v_n` of a basis expansion.
pub fn fmt_basis(coords: &BTreeMap<BasisIndex, Scalar>) -> String {
    fmt_sum(coords.iter().map(|(b, c)| (c, b.to_string())))
}

pub fn parse_basis(text: &str) -> Result<BTreeMap<BasisIndex, Scalar>, SeriesError> {
    let err = |reason: String| SeriesError::Parse {
        input: text.to_string(),
        reason,
    };
    let parsed = parse_sum(text, |f| {
        let (name, n) = f.split_once('_')?;
        let n: i64 = n.parse().ok()?;
        Some(match name {
            "u" => BasisIndex::u(n),
            "v" => BasisIndex::v(n),
            "x" => BasisIndex::x(n),
            "y" => BasisIndex::y(n),
            _ => return None,
        })
    })
    .map_err(err)?;
    let mut out: BTreeMap<BasisIndex, Scalar> = BTreeMap::new();
    for (c, bs) in parsed {
        match bs.as_slice() {
            [b] => *out.entry(*b).or_default() += &c,
            _ => return Err(err("each term needs exactly one basis element".into())),
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// A Laurent series in one variable, known modulo `var^order`.
#[derive(Clone, PartialEq, Eq)]
pub struct OneVarSeries {
    var: Var,
    terms: BTreeMap<i64, Scalar>,
    order: i64,
}

impl OneVarSeries {
    pub fn new(var: Var, order: i64) -> Self {
        OneVarSeries {
            var,
            terms: BTreeMap::new(),
            order,
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Scalar)>>(var: Var, order: i64, terms: I) -> Self {
        let mut out = OneVarSeries::new(var, order);
        for (k, c) in terms {
            out.add_term(k, &c);
        }
        out
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `var^k`, or `None` if it lies beyond the known order.
    pub fn coeff(&self, k: i64) -> Option<Scalar> {
        if k >= self.order {
            None
        } else {
            Some(self.terms.get(&k).cloned().unwrap_or_default())
        }
    }

    pub fn add_term(&mut self, k: i64, c: &Scalar) {
        if c.is_zero() || k >= self.order {
            return;
        }
        let slot = self.terms.entry(k).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn residue(&self) -> Option<Scalar> {
        self.coeff(-1)
    }

    pub fn truncate(&self, order: i64) -> OneVarSeries {
        OneVarSeries::from_terms(
            self.var,
            order.min(self.order),
            self.terms.iter().map(|(k, c)| (*k, c.clone())),
        )
    }

    pub fn add(&self, other: &OneVarSeries) -> OneVarSeries {
        debug_assert_eq!(self.var, other.var);
        let mut out = OneVarSeries::new(self.var, self.order.min(other.order));
        for (k, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*k, c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> OneVarSeries {
        OneVarSeries::from_terms(self.var, self.order, self.terms.iter().map(|(k, x)| (*k, x * c)))
    }

    pub fn mul(&self, other: &OneVarSeries) -> OneVarSeries {
        debug_assert_eq!(self.var, other.var);
        let o1 = other.valuation().map_or(i64::MAX, |v| self.order.saturating_add(v));
        let o2 = self.valuation().map_or(i64::MAX, |v| other.order.saturating_add(v));
        let mut out = OneVarSeries::new(self.var, o1.min(o2));
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                out.add_term(k1 + k2, &(c1 * c2));
            }
        }
        out
    }

    pub fn deriv(&self) -> OneVarSeries {
        OneVarSeries::from_terms(
            self.var,
            self.order - 1,
            self.terms.iter().map(|(k, c)| (k - 1, c.scale(&int(*k)))),
        )
    }

    /// Whether two series agree up to the smaller of their orders.
    pub fn agrees_with(&self, other: &OneVarSeries) -> bool {
        let order = self.order.min(other.order);
        self.var == other.var && self.truncate(order).terms == other.truncate(order).terms
    }
}

impl fmt::Display for OneVarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.var;
        let body = fmt_sum(self.terms.iter().map(|(k, c)| (c, format!("{v}^{k}"))));
        write!(f, "{body} + O({v}^{})", self.order)
    }
}

impl fmt::Debug for OneVarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneVarSeries({self})")
    }
}

/// Classical residue of a one-variable series with rational coefficients.
pub fn classical_residue(f: &OneVarSeries) -> Option<Rational> {
    f.residue().and_then(|c| c.as_rational())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn sc(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    #[test]
    fn products_and_units() {
        assert_eq!(TwoVarFun::u(1).mul2(&TwoVarFun::v(-2)), TwoVarFun::v(-1));
        let f: TwoVarFun = "2*t^3*s^-1 - a*t^0*s^2".parse().unwrap();
        assert_eq!(f.mul2(&TwoVarFun::one()), f);
        assert_eq!(TwoVarFun::u(3).mul2(&TwoVarFun::u(-5)), TwoVarFun::u(-2));
    }

    #[test]
    fn derivative_table() {
        let a = Scalar::a_pow(1);
        for n in -4..=4 {
            let du = TwoVarFun::u(n).deriv2();
            let expect = TwoVarFun::y(n - 1).add(&TwoVarFun::v(n - 1)).scale(&Scalar::from_int(n));
            assert!(du.same_function(&expect), "u_{n}");
            let dv = TwoVarFun::v(n).deriv2();
            let expect = TwoVarFun::u(n)
                .scale(&Scalar::from_int(2 * n + 1))
                .sub(&TwoVarFun::v(n - 1).scale(&(&a * &Scalar::from_int(n))));
            assert!(dv.same_function(&expect), "v_{n}");
        }
        assert!(TwoVarFun::one().deriv2().is_zero());
    }

    #[test]
    fn residue_examples() {
        assert_eq!(TwoVarFun::monomial(0, -1).res2().unwrap(), Scalar::one());
        assert_eq!(TwoVarFun::monomial(-1, -1).res2().unwrap(), Scalar::zero());
        assert_eq!(TwoVarFun::monomial(2, -2).res2().unwrap(), sc("2*a"));
        assert_eq!(
            TwoVarFun::monomial(0, -1).with_trunc(-1).res2(),
            Err(SeriesError::TruncationTooCoarse(-1))
        );
    }

    #[test]
    fn basis_examples() {
        let t_inv = TwoVarFun::monomial(-1, 0).to_basis(BasisKind::UV);
        assert_eq!(fmt_basis(&t_inv), "v_-1");
        let t2 = TwoVarFun::monomial(2, 0).to_basis(BasisKind::UV);
        assert_eq!(t2.get(&BasisIndex::u(1)), Some(&Scalar::one()));
        assert_eq!(t2.get(&BasisIndex::v(0)), Some(&sc("a")));
        assert_eq!(t2.get(&BasisIndex::u(0)), Some(&sc("a^2")));
        assert_eq!(t2.len(), 3);
        assert_eq!(fmt_basis(&TwoVarFun::u(5).to_basis(BasisKind::UV)), "u_5");
        let y = TwoVarFun::y(2).to_basis(BasisKind::XY);
        assert_eq!(fmt_basis(&y), "y_2");
    }

    #[test]
    fn basis_round_trip_brute_force() {
        // tⁱsʲ rebuilt from its coordinates must agree after expanding both
        // sides in t to a generous order.
        for i in -3..=3 {
            for j in -3..=3 {
                let f = TwoVarFun::monomial(i, j);
                for kind in [BasisKind::UV, BasisKind::XY] {
                    let back = TwoVarFun::from_basis(&f.to_basis(kind));
                    assert_eq!(back.expand(Var::T, 8), f.expand(Var::T, 8), "({i},{j})");
                    assert_eq!(back.expand(Var::S, 8), f.expand(Var::S, 8), "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn expansion_examples() {
        let e = TwoVarFun::monomial(0, -1).expand(Var::T, 3);
        let expect = OneVarSeries::from_terms(
            Var::T,
            3,
            [(0, sc("-a^-1")), (1, sc("-a^-2")), (2, sc("-a^-3"))],
        );
        assert_eq!(e, expect);
        for n in -3..=3 {
            let e = TwoVarFun::u(n).expand(Var::T, n + 1);
            assert_eq!(e, OneVarSeries::from_terms(Var::T, n + 1, [(n, Scalar::neg_a_pow(n))]));
        }
        let e = TwoVarFun::u(0).expand(Var::S, 5);
        assert_eq!(e, OneVarSeries::from_terms(Var::S, 5, [(0, Scalar::one())]));
    }

    #[test]
    fn specialization_examples() {
        for n in -3..=3 {
            let su = TwoVarFun::u(n).specialize_diag(10).unwrap();
            assert_eq!(su, OneVarSeries::from_terms(Var::T, 10, [(2 * n, Scalar::one())]));
            let sv = TwoVarFun::v(n).specialize_diag(10).unwrap();
            assert_eq!(sv, OneVarSeries::from_terms(Var::T, 10, [(2 * n + 1, Scalar::one())]));
        }
        assert!(TwoVarFun::u(0).scale(&sc("a")).specialize_diag(4).unwrap().is_zero());
        assert!(TwoVarFun::term(0, 0, sc("a^-1")).specialize_diag(4).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f: TwoVarFun = "-1/2*t^-1*s^2 + (1 + a)*t^1*s^2 + a^-1*t^3*s^0".parse().unwrap();
        assert_eq!(f.to_string().parse::<TwoVarFun>().unwrap(), f);
        let g = f.with_trunc(1);
        assert_eq!(g.to_string().parse::<TwoVarFun>().unwrap(), g);
        let b = TwoVarFun::monomial(2, 0).to_basis(BasisKind::UV);
        assert_eq!(parse_basis(&fmt_basis(&b)).unwrap(), b);
        assert_eq!(f.coeff(3, 0), sc("a^-1"));
        assert_eq!(f.coeff(-1, 2), Scalar::from_rational(rat(-1, 2)));
    }

    #[test]
    fn truncation_propagates() {
        let f = TwoVarFun::u(-1).add(&TwoVarFun::u(2)).with_trunc(2);
        assert_eq!(f, TwoVarFun::u(-1).with_trunc(2));
        let g = f.mul2(&TwoVarFun::v(-1));
        assert_eq!(g.trunc(), Some(1));
        assert_eq!(f.deriv2().trunc(), Some(1));
    }
}
