use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Polynomial in the central element `C` with `Scalar` coefficients.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct CPoly {
    terms: BTreeMap<u32, Scalar>,
}

impl CPoly {
    pub fn zero() -> Self {
        CPoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        CPoly::monomial(c, 0)
    }

    pub fn one() -> Self {
        CPoly::constant(Scalar::one())
    }

    /// `c·C^k`.
    pub fn monomial(c: Scalar, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        CPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Scalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: u32) -> Scalar {
        self.terms.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_assign(&mut self, other: &CPoly) {
        for (k, c) in &other.terms {
            let slot = self.terms.entry(*k).or_insert_with(Scalar::zero);
            *slot += c;
            if slot.is_zero() {
                self.terms.remove(k);
            }
        }
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn neg(&self) -> CPoly {
        CPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &CPoly) -> CPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> CPoly {
        CPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c * s))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut out = CPoly::zero();
        for (i, c) in &self.terms {
            for (j, d) in &other.terms {
                out.add_assign(&CPoly::monomial(c * d, i + j));
            }
        }
        out
    }

    /// Substitute `C = −½`.
    pub fn at_critical(&self) -> Scalar {
        self.terms
            .iter()
            .map(|(k, c)| {
                let half = Scalar::frac(-1, 2).pow(*k);
                c * &half
            })
            .sum()
    }

    pub fn map_coeffs<E>(&self, f: impl Fn(&Scalar) -> Result<Scalar, E>) -> Result<CPoly, E> {
        let mut out = CPoly::zero();
        for (k, c) in &self.terms {
            out.add_assign(&CPoly::monomial(f(c)?, *k));
        }
        Ok(out)
    }
}
