//! Laurent polynomials in the parameter `a` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("divisor {0} is not a monomial in a")]
    NonMonomialDivisor(String),
    #[error("element has a negative power of a")]
    NegativePowerOfA,
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Falling-factorial binomial `i(i-1)...(i-k+1)/k!`, zero for negative `k`.
pub fn gen_binomial(i: i64, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for l in 0..k {
        num *= BigInt::from(i - l);
        den *= BigInt::from(l + 1);
    }
    Rational::new(num, den)
}

/// An element of ℚ[a, a⁻¹], stored sparsely by exponent.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: BTreeMap<i64, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        Scalar::monomial(c, 0)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Scalar::from_rational(rat(n, d))
    }

    /// `c·a^e`
    pub fn monomial(c: Rational, e: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Scalar { terms }
    }

    /// `a^e`
    pub fn a_pow(e: i64) -> Self {
        Scalar::monomial(Rational::one(), e)
    }

    /// `(-a)^e`
    pub fn neg_a_pow(e: i64) -> Self {
        let s = Scalar::a_pow(e);
        if e.rem_euclid(2) == 1 {
            -s
        } else {
            s
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i64) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single term, if there is exactly one.
    pub fn as_monomial(&self) -> Option<(i64, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, e: i64, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiply by `a^k`.
    pub fn shift(&self, k: i64) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(e, x)| (e + k, x.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division by a nonzero monomial `c·a^e`.
    pub fn div_monomial(&self, d: &Scalar) -> Result<Scalar, ScalarError> {
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let (e, c) = d
            .as_monomial()
            .ok_or_else(|| ScalarError::NonMonomialDivisor(d.to_string()))?;
        let inv = c.recip();
        Ok(self.scale(&inv).shift(-e))
    }

    /// Constant term, provided no negative powers of `a` occur.
    pub fn specialize_a0(&self) -> Result<Rational, ScalarError> {
        if self.min_exp().is_some_and(|e| e < 0) {
            return Err(ScalarError::NegativePowerOfA);
        }
        Ok(self.coeff(0))
    }

    /// Substitute a rational value for `a`.
    pub fn eval(&self, a: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let p = if *e >= 0 {
                num_traits::pow(a.clone(), *e as usize)
            } else {
                num_traits::pow(a.recip(), (-*e) as usize)
            };
            acc += c * p;
        }
        acc
    }
}

impl From<Rational> for Scalar {
    fn from(c: Rational) -> Self {
        Scalar::from_rational(c)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c);
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, &-c);
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        let mut acc = Scalar::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_a_power(e: i64) -> String {
    match e {
        1 => "a".to_string(),
        _ => format!("a^{e}"),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            let body = if *e == 0 {
                fmt_rational(&mag)
            } else if mag.is_one() {
                fmt_a_power(*e)
            } else {
                format!("{}*{}", fmt_rational(&mag), fmt_a_power(*e))
            };
            match (idx, c.is_negative()) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// Split `text` at top-level `+`/`-` signs, ignoring signs inside parentheses
/// and signs that belong to an exponent (`^-2`).
pub(crate) fn split_signed_terms(text: &str) -> Result<Vec<(bool, String)>, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty input".into());
    }
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut negative = false;
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced parentheses".into());
                }
                cur.push(ch);
            }
            '+' | '-' if depth == 0 && !matches!(prev, Some('^') | Some('*') | Some('/')) => {
                if !cur.is_empty() {
                    out.push((negative, std::mem::take(&mut cur)));
                } else if prev.is_some() {
                    return Err("dangling sign".into());
                }
                negative = ch == '-';
            }
            _ => cur.push(ch),
        }
        prev = Some(ch);
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    if cur.is_empty() {
        return Err("trailing sign".into());
    }
    out.push((negative, cur));
    Ok(out)
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational, String> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("bad integer {n:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad integer {d:?}"))?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(n, d))
}

fn parse_scalar_term(s: &str) -> Result<(i64, Rational), String> {
    let mut coeff = Rational::one();
    let mut exp = 0i64;
    for factor in s.split('*') {
        if let Some(rest) = factor.strip_prefix('a') {
            let e = if rest.is_empty() {
                1
            } else {
                let r = rest.strip_prefix('^').ok_or("expected ^ after a")?;
                r.parse::<i64>().map_err(|_| format!("bad exponent {r:?}"))?
            };
            exp += e;
        } else {
            coeff *= parse_rational(factor)?;
        }
    }
    Ok((exp, coeff))
}

impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| ScalarError::Parse {
            input: text.to_string(),
            reason,
        };
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(trimmed);
        let mut out = Scalar::zero();
        for (neg, term) in split_signed_terms(inner).map_err(err)? {
            let (e, mut c) = parse_scalar_term(&term).map_err(err)?;
            if neg {
                c = -c;
            }
            out.add_term(e, &c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(s("1 + a") * s("1 - a"), s("1 - a^2"));
    }

    #[test]
    fn inverse_monomial_and_power() {
        assert_eq!(Scalar::a_pow(-1) * Scalar::a_pow(1), Scalar::one());
        assert_eq!(s("2*a").pow(3), s("8*a^3"));
    }

    #[test]
    fn specialization() {
        assert_eq!(s("3 + 2*a").specialize_a0().unwrap(), int(3));
        assert_eq!(Scalar::zero().specialize_a0().unwrap(), int(0));
        assert_eq!(
            Scalar::a_pow(-1).specialize_a0(),
            Err(ScalarError::NegativePowerOfA)
        );
    }

    #[test]
    fn binomials() {
        assert_eq!(gen_binomial(-2, 3), int(-4));
        assert_eq!(gen_binomial(5, 0), int(1));
        assert_eq!(gen_binomial(0, -1), int(0));
        assert_eq!(gen_binomial(-1, 4), int(1));
        assert_eq!(gen_binomial(3, 5), int(0));
    }

    #[test]
    fn display_and_parse() {
        let x = Scalar::monomial(rat(-1, 4), -2) + Scalar::from_int(3) + Scalar::monomial(int(2), 1);
        assert_eq!(x.to_string(), "-1/4*a^-2 + 3 + 2*a");
        assert_eq!(s("-1/4*a^-2 + 3 + 2*a"), x);
        assert_eq!(s("-a"), -Scalar::a_pow(1));
        assert_eq!(s("(1 - a)").to_string(), "1 - a");
        assert_eq!(Scalar::zero().to_string(), "0");
        assert_eq!(s("0"), Scalar::zero());
    }

    #[test]
    fn division() {
        let x = s("4*a^3 + 2*a");
        assert_eq!(x.div_monomial(&s("2*a")).unwrap(), s("2*a^2 + 1"));
        assert!(matches!(
            x.div_monomial(&s("1 + a")),
            Err(ScalarError::NonMonomialDivisor(_))
        ));
        assert_eq!(x.div_monomial(&Scalar::zero()), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("1 +".parse::<Scalar>().is_err());
        assert!("b".parse::<Scalar>().is_err());
        assert!("1/0".parse::<Scalar>().is_err());
    }
}
