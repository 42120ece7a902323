use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::liealg::{bracket_basis, killing_basis, Sl2};
use crate::scalar::Scalar;
use crate::text::{fmt_sum, parse_sum};

use super::cpoly::CPoly;
use super::ring::{Algebra, RingElt};
use super::EnvError;

/// Generator `J^α r_γ`, ordered by index first and then by `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub gamma2: i64,
    pub alpha: Sl2,
}

impl Gen {
    pub fn new(alpha: Sl2, gamma2: i64) -> Self {
        Gen { gamma2, alpha }
    }
}

pub type Monomial = Vec<Gen>;
pub(crate) type Terms = BTreeMap<Monomial, CPoly>;

pub(crate) fn add_term(map: &mut Terms, m: Monomial, c: &CPoly) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        Entry::Occupied(mut e) => {
            e.get_mut().add_assign(c);
            if e.get().is_zero() {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            e.insert(c.clone());
        }
    }
}

pub fn is_ordered(m: &[Gen]) -> bool {
    m.windows(2).all(|w| w[0] <= w[1])
}

/// Element of the enveloping algebra modulo `Ĵ(level2/2)`; `level == None`
/// means the stored sum is exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EnvElement {
    algebra: Algebra,
    terms: Terms,
    level: Option<i64>,
}

/// Rewrites words in generators as sums of ordered monomials, dropping every
/// word whose last factor has index `>= cut` (such words lie in `Ĵ(cut)`).
pub(crate) struct Straightener {
    alg: Algebra,
    cut: Option<i64>,
    memo: HashMap<Monomial, Rc<Terms>>,
}

impl Straightener {
    pub(crate) fn new(alg: Algebra, cut: Option<i64>) -> Self {
        Straightener {
            alg,
            cut,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn straighten(&mut self, word: &[Gen]) -> Rc<Terms> {
        if let (Some(cut), Some(last)) = (self.cut, word.last()) {
            if last.gamma2 >= cut {
                return Rc::new(Terms::new());
            }
        }
        if let Some(hit) = self.memo.get(word) {
            return hit.clone();
        }
        let result = match word.windows(2).position(|w| w[0] > w[1]) {
            None => Rc::new(Terms::from([(word.to_vec(), CPoly::one())])),
            Some(i) => Rc::new(self.swap_at(word, i)),
        };
        self.memo.insert(word.to_vec(), result.clone());
        result
    }

    fn swap_at(&mut self, word: &[Gen], i: usize) -> Terms {
        let (x, y) = (word[i], word[i + 1]);
        let mut acc = Terms::new();
        let mut swapped = word.to_vec();
        swapped.swap(i, i + 1);
        self.accumulate(&mut acc, &swapped, &CPoly::one());
        if let Some((z, c)) = bracket_basis(x.alpha, y.alpha) {
            for (h, s) in self.alg.mul_basis(x.gamma2, y.gamma2) {
                let mut w = word[..i].to_vec();
                w.push(Gen::new(z, h));
                w.extend_from_slice(&word[i + 2..]);
                self.accumulate(&mut acc, &w, &CPoly::constant(&s * &Scalar::from_int(c)));
            }
        }
        let k = killing_basis(x.alpha, y.alpha);
        if k != 0 {
            let res = self.alg.residue_pairing(x.gamma2, y.gamma2);
            if !res.is_zero() {
                let mut w = word[..i].to_vec();
                w.extend_from_slice(&word[i + 2..]);
                self.accumulate(&mut acc, &w, &CPoly::monomial(&res * &Scalar::from_int(k), 1));
            }
        }
        acc
    }

    fn accumulate(&mut self, acc: &mut Terms, word: &[Gen], c: &CPoly) {
        let sub = self.straighten(word);
        for (m, d) in sub.iter() {
            add_term(acc, m.clone(), &d.mul(c));
        }
    }
}

impl EnvElement {
    pub fn zero(algebra: Algebra, level: Option<i64>) -> Self {
        EnvElement {
            algebra,
            terms: Terms::new(),
            level,
        }
    }

    pub fn one(algebra: Algebra) -> Self {
        EnvElement::scalar(algebra, CPoly::one())
    }

    pub fn scalar(algebra: Algebra, c: CPoly) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, Vec::new(), &c);
        EnvElement {
            algebra,
            terms,
            level: None,
        }
    }

    /// The central element `C`.
    pub fn central(algebra: Algebra) -> Self {
        EnvElement::scalar(algebra, CPoly::monomial(Scalar::one(), 1))
    }

    pub fn gen(algebra: Algebra, alpha: Sl2, gamma2: i64) -> Result<Self, EnvError> {
        if !algebra.valid_index(gamma2) {
            return Err(EnvError::InvalidIndex { algebra, gamma2 });
        }
        Ok(EnvElement {
            algebra,
            terms: Terms::from([(vec![Gen::new(alpha, gamma2)], CPoly::one())]),
            level: None,
        })
    }

    /// `x ⊗ f` for a ring element `f`, as a sum of generators.
    pub fn lie_fun(algebra: Algebra, alpha: Sl2, f: &RingElt) -> Self {
        let mut terms = Terms::new();
        for (&g, c) in f {
            add_term(&mut terms, vec![Gen::new(alpha, g)], &CPoly::constant(c.clone()));
        }
        EnvElement {
            algebra,
            terms,
            level: None,
        }
    }

    /// Straighten arbitrary words and keep what survives modulo `Ĵ(level)`.
    pub fn from_words<I>(algebra: Algebra, words: I, level: Option<i64>) -> Self
    where
        I: IntoIterator<Item = (Monomial, CPoly)>,
    {
        let mut st = Straightener::new(algebra, level);
        let mut terms = Terms::new();
        for (w, c) in words {
            for (m, d) in st.straighten(&w).iter() {
                add_term(&mut terms, m.clone(), &d.mul(&c));
            }
        }
        EnvElement { algebra, terms, level }
    }

    pub(crate) fn from_terms(algebra: Algebra, terms: Terms, level: Option<i64>) -> Self {
        let mut out = EnvElement { algebra, terms, level };
        out.prune();
        out
    }

    fn prune(&mut self) {
        let level = self.level;
        self.terms.retain(|m, c| {
            !c.is_zero() && level.is_none_or(|n| m.last().is_none_or(|g| g.gamma2 < n))
        });
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn level(&self) -> Option<i64> {
        self.level
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[Gen]) -> CPoly {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest PBW degree among stored monomials.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Smallest doubled index of any factor.
    pub fn min_index(&self) -> Option<i64> {
        self.terms.keys().flatten().map(|g| g.gamma2).min()
    }

    /// Forget everything at or beyond `level`.
    pub fn truncate(&self, level: i64) -> EnvElement {
        let level = Some(self.level.map_or(level, |n| n.min(level)));
        EnvElement::from_terms(self.algebra, self.terms.clone(), level)
    }

    fn check(&self, other: &EnvElement) -> Result<(), EnvError> {
        if self.algebra != other.algebra {
            return Err(EnvError::AlgebraMismatch(self.algebra, other.algebra));
        }
        Ok(())
    }

    fn meet(&self, other: &EnvElement) -> Option<i64> {
        match (self.level, other.level) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn add(&self, other: &EnvElement) -> Result<EnvElement, EnvError> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c);
        }
        Ok(EnvElement::from_terms(self.algebra, terms, self.meet(other)))
    }

    pub fn sub(&self, other: &EnvElement) -> Result<EnvElement, EnvError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> EnvElement {
        self.scale_cpoly(&CPoly::constant(-Scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> EnvElement {
        self.scale_cpoly(&CPoly::constant(s.clone()))
    }

    pub fn scale_cpoly(&self, c: &CPoly) -> EnvElement {
        let terms = self.terms.iter().map(|(m, d)| (m.clone(), d.mul(c))).collect();
        EnvElement::from_terms(self.algebra, terms, self.level)
    }

    /// Substitute the critical level `C = −½`.
    pub fn at_critical(&self) -> EnvElement {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), CPoly::constant(c.at_critical())))
            .collect();
        EnvElement::from_terms(self.algebra, terms, self.level)
    }

    pub fn map_scalars<E>(&self, f: impl Fn(&Scalar) -> Result<Scalar, E>) -> Result<EnvElement, E> {
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            add_term(&mut terms, m.clone(), &c.map_coeffs(&f)?);
        }
        Ok(EnvElement::from_terms(self.algebra, terms, self.level))
    }

    /// Level up to which `self · other` is determined by the stored data.
    ///
    /// A tail `z·g` of `self` with `g` of index at least `N` is pushed through a
    /// monomial `y₁⋯y_m` of `other`. Each bracket with `y_i` lowers the index
    /// of the travelling generator by at most `h − y_i` (`h = ½` when products
    /// of half-integral generators lose a half), and the product is safe as long
    /// as no bracket on the way produces a central term.
    pub fn product_level(&self, other: &EnvElement) -> Result<Option<i64>, EnvError> {
        let Some(nx) = self.level else {
            return Ok(other.level);
        };
        let h2 = self.algebra.h2();
        let mut level = other.level.map_or(nx, |ny| ny.min(nx));
        for m in other.terms.keys() {
            let Some(dmin) = m.iter().map(|g| g.gamma2).min() else {
                continue;
            };
            let deg = m.len() as i64;
            let drop = (h2 - dmin).max(0);
            if nx - (deg - 1) * drop < 2 + h2 - dmin {
                return Err(EnvError::ResultLevelEmpty {
                    left: nx,
                    monomial: fmt_monomial(self.algebra, m),
                });
            }
            level = level.min(nx - deg * drop);
        }
        Ok(Some(level))
    }

    pub fn mul(&self, other: &EnvElement) -> Result<EnvElement, EnvError> {
        self.check(other)?;
        let level = self.product_level(other)?;
        Ok(self.mul_at(other, level))
    }

    /// Product for a right factor that commutes with every generator (say a
    /// central element at the critical level). The tail of `self` then moves
    /// past `other` unchanged, so the product is known to the lower of the
    /// two levels.
    pub fn mul_central(&self, other: &EnvElement) -> Result<EnvElement, EnvError> {
        self.check(other)?;
        let level = match (self.level, other.level) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        Ok(self.mul_at(other, level))
    }

    fn mul_at(&self, other: &EnvElement, level: Option<i64>) -> EnvElement {
        let mut st = Straightener::new(self.algebra, level);
        let mut terms = Terms::new();
        let mut word = Vec::new();
        for (mx, cx) in &self.terms {
            for (my, cy) in &other.terms {
                word.clear();
                word.extend_from_slice(mx);
                word.extend_from_slice(my);
                let c = cx.mul(cy);
                for (m, d) in st.straighten(&word).iter() {
                    add_term(&mut terms, m.clone(), &d.mul(&c));
                }
            }
        }
        EnvElement::from_terms(self.algebra, terms, level)
    }

    pub fn commutator(&self, other: &EnvElement) -> Result<EnvElement, EnvError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn parse(algebra: Algebra, text: &str) -> Result<EnvElement, EnvError> {
        let parse_err = |reason: String| EnvError::Parse {
            input: text.to_string(),
            reason,
        };
        let terms = parse_sum(text, |f| parse_tail(algebra, f)).map_err(parse_err)?;
        let mut words = Vec::new();
        for (coef, parts) in terms {
            let mut power = 0u32;
            let mut word = Vec::new();
            for p in parts {
                match p {
                    Tail::C(k) => power += k,
                    Tail::Mono(m) => word.extend(m),
                }
            }
            words.push((word, CPoly::monomial(coef, power)));
        }
        Ok(EnvElement::from_words(algebra, words, None))
    }
}

enum Tail {
    C(u32),
    Mono(Monomial),
}

fn parse_tail(algebra: Algebra, f: &str) -> Option<Tail> {
    if f == "C" {
        return Some(Tail::C(1));
    }
    if let Some(k) = f.strip_prefix("C^") {
        return k.parse().ok().map(Tail::C);
    }
    parse_monomial(algebra, f).map(Tail::Mono)
}

pub fn parse_monomial(algebra: Algebra, s: &str) -> Option<Monomial> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    if rest.is_empty() {
        return None;
    }
    while !rest.is_empty() {
        let body = rest.strip_prefix('(')?;
        let end = body.find(')')?;
        let mut it = body[..end].split(':');
        let alpha = Sl2::from_name(it.next()?)?;
        let letter = it.next()?;
        let n: i64 = it.next()?.parse().ok()?;
        if it.next().is_some() {
            return None;
        }
        out.push(Gen::new(alpha, algebra.from_letter(letter, n)?));
        rest = &body[end + 1..];
    }
    Some(out)
}

pub fn fmt_gen(algebra: Algebra, g: &Gen) -> String {
    let (letter, n) = algebra.letter(g.gamma2);
    format!("({}:{letter}:{n})", g.alpha)
}

pub fn fmt_monomial(algebra: Algebra, m: &[Gen]) -> String {
    m.iter().map(|g| fmt_gen(algebra, g)).collect()
}

fn c_tail(k: u32, mono: &str) -> String {
    let c = match k {
        0 => String::new(),
        1 => "C".to_string(),
        k => format!("C^{k}"),
    };
    match (c.is_empty(), mono.is_empty()) {
        (false, false) => format!("{c}*{mono}"),
        (true, _) => mono.to_string(),
        (false, true) => c,
    }
}

impl fmt::Display for EnvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items = Vec::new();
        for (m, c) in &self.terms {
            let mono = fmt_monomial(self.algebra, m);
            for (k, s) in c.terms() {
                items.push((s, c_tail(k, &mono)));
            }
        }
        f.write_str(&fmt_sum(items))
    }
}
