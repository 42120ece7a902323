//! Induced (Weyl) modules over the critical-level algebras, truncated by PBW
//! depth, with the positive part acting through evaluation at the marked
//! points.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::env::{Algebra, EnvElement, EnvError, Gen};
use crate::liealg::{bracket_basis, killing_basis, Sl2};
use crate::scalar::{int, rat, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("result needs PBW depth above {depth}")]
    DepthOverflow { depth: usize },
    #[error("operator known modulo J({level}/2) but the vector needs J({needed}/2)")]
    InsufficientLevel { level: i64, needed: i64 },
    #[error("operator lives in {got}, module is over {expected}")]
    WrongAlgebra { expected: Algebra, got: Algebra },
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Basis element: ordered word of negative generators applied to a tensor
/// of weight vectors.
pub type WeylBasis = (Vec<Gen>, Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylModule {
    algebra: Algebra,
    weights: Vec<usize>,
}

impl WeylModule {
    /// Two-point module induced from `V^λ ⊗ V^μ`.
    pub fn two(lambda: usize, mu: usize) -> Self {
        WeylModule {
            algebra: Algebra::Two,
            weights: vec![lambda, mu],
        }
    }

    /// One-point module induced from `V^{λ_1} ⊗ … ⊗ V^{λ_r}` with the
    /// diagonal action of constant loops.
    pub fn one(weights: &[usize]) -> Self {
        WeylModule {
            algebra: Algebra::One,
            weights: weights.to_vec(),
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    /// Degree-zero basis, lexicographic in the weight indices.
    pub fn degree0_basis(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &w in &self.weights {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..=w).map(move |i| {
                        let mut v = v.clone();
                        v.push(i);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// Scalar by which `r_γ` evaluates at each marked point, or `None` for
    /// negative indices.
    fn evaluation(&self, gamma2: i64) -> Option<Vec<Scalar>> {
        if gamma2 < 0 {
            return None;
        }
        let n = self.weights.len();
        Some(match (self.algebra, gamma2) {
            (Algebra::Two, 0) => vec![Scalar::one(), Scalar::one()],
            // s at t = 0 is −a, at s = 0 it vanishes
            (Algebra::Two, 1) => vec![-Scalar::a_pow(1), Scalar::zero()],
            (_, 0) => vec![Scalar::one(); n],
            _ => vec![Scalar::zero(); n],
        })
    }
}

/// `x·v_i` in `V^λ` with `h v_i = (λ−2i)v_i`, `f v_i = v_{i+1}`,
/// `e v_i = i(λ−i+1)v_{i−1}`.
pub fn weight_action(x: Sl2, lambda: usize, i: usize) -> Option<(usize, Rational)> {
    let (l, k) = (lambda as i64, i as i64);
    match x {
        Sl2::H => Some((i, int(l - 2 * k))),
        Sl2::F if i < lambda => Some((i + 1, int(1))),
        Sl2::E if i > 0 => Some((i - 1, int(k * (l - k + 1)))),
        _ => None,
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct WeylVector {
    terms: BTreeMap<WeylBasis, Scalar>,
}

impl WeylVector {
    pub fn zero() -> Self {
        WeylVector { terms: BTreeMap::new() }
    }

    pub fn basis(word: Vec<Gen>, weights: Vec<usize>) -> Self {
        let mut out = WeylVector::zero();
        out.add_term((word, weights), &Scalar::one());
        out
    }

    pub fn add_term(&mut self, key: WeylBasis, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylBasis, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &WeylBasis) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.terms.keys().map(|(w, _)| w.len()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &WeylVector) -> WeylVector {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &WeylVector) -> WeylVector {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> WeylVector {
        let mut out = WeylVector::zero();
        for (k, d) in &self.terms {
            out.add_term(k.clone(), &(d * c));
        }
        out
    }

    /// Drop everything above degree zero.
    pub fn degree0(&self) -> WeylVector {
        WeylVector {
            terms: self.terms.iter().filter(|((w, _), _)| w.is_empty()).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }
}

impl fmt::Debug for WeylVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|((w, v), c)| format!("({c}) {w:?} {v:?}")).collect();
        write!(f, "WeylVector[{}]", parts.join(", "))
    }
}

/// Applies generators to basis vectors, caching per `(generator, basis)`.
pub struct Actor<'m> {
    module: &'m WeylModule,
    depth: usize,
    memo: HashMap<(Gen, WeylBasis), WeylVector>,
}

impl<'m> Actor<'m> {
    pub fn new(module: &'m WeylModule, depth: usize) -> Self {
        Actor {
            module,
            depth,
            memo: HashMap::new(),
        }
    }

    pub fn act_gen(&mut self, g: Gen, v: &WeylVector) -> Result<WeylVector, WeylError> {
        let mut out = WeylVector::zero();
        for (key, c) in &v.terms {
            let image = self.act_basis(g, key);
            for (k, d) in &image.terms {
                out.add_term(k.clone(), &(c * d));
            }
        }
        if out.depth() > self.depth {
            return Err(WeylError::DepthOverflow { depth: self.depth });
        }
        Ok(out)
    }

    /// Action of an element of the enveloping algebra at `C = −½`.
    pub fn act_env(&mut self, x: &EnvElement, v: &WeylVector) -> Result<WeylVector, WeylError> {
        if x.algebra() != self.module.algebra {
            return Err(WeylError::WrongAlgebra {
                expected: self.module.algebra,
                got: x.algebra(),
            });
        }
        if let Some(level) = x.level() {
            let needed = self.needed_level(v);
            if level < needed {
                return Err(WeylError::InsufficientLevel { level, needed });
            }
        }
        let mut out = WeylVector::zero();
        for (m, c) in x.terms() {
            let mut w = v.scale(&c.at_critical());
            for g in m.iter().rev() {
                if w.is_zero() {
                    break;
                }
                w = self.act_gen(*g, &w)?;
            }
            out = out.add(&w);
        }
        Ok(out)
    }

    /// Least `level2` such that every generator of index `≥ level2/2`
    /// kills `v`: moving past a factor of index `γ < 0` lowers the index by
    /// at most `−γ` (plus ½ in two variables), and evaluation vanishes from
    /// index 1 on.
    pub fn needed_level(&self, v: &WeylVector) -> i64 {
        let h2 = i64::from(self.module.algebra.half_integral());
        let drop = v
            .terms
            .keys()
            .map(|(w, _)| w.iter().map(|g| h2 - g.gamma2).sum::<i64>())
            .max()
            .unwrap_or(0);
        2 + drop
    }

    fn act_basis(&mut self, g: Gen, key: &WeylBasis) -> WeylVector {
        let memo_key = (g, key.clone());
        if let Some(v) = self.memo.get(&memo_key) {
            return v.clone();
        }
        let out = self.compute(g, key);
        self.memo.insert(memo_key, out.clone());
        out
    }

    fn compute(&mut self, g: Gen, key: &WeylBasis) -> WeylVector {
        let (word, weights) = key;
        let Some((&head, rest)) = word.split_first() else {
            return self.evaluate(g, weights);
        };
        if g.gamma2 < 0 && g <= head {
            let mut w = vec![g];
            w.extend_from_slice(word);
            return WeylVector::basis(w, weights.clone());
        }
        // g·head·rest = head·(g·rest) + [g, head]·rest
        let rest_key: WeylBasis = (rest.to_vec(), weights.clone());
        let inner = self.act_basis(g, &rest_key);
        let mut out = WeylVector::zero();
        for (k, c) in &inner.terms {
            let image = self.act_basis(head, k);
            for (k2, d) in &image.terms {
                out.add_term(k2.clone(), &(c * d));
            }
        }
        let alg = self.module.algebra;
        if let Some((z, c)) = bracket_basis(g.alpha, head.alpha) {
            for (h, s) in alg.mul_basis(g.gamma2, head.gamma2) {
                let coef = &s * &Scalar::from_int(c);
                let image = self.act_basis(Gen::new(z, h), &rest_key);
                for (k2, d) in &image.terms {
                    out.add_term(k2.clone(), &(&coef * d));
                }
            }
        }
        let k = killing_basis(g.alpha, head.alpha);
        if k != 0 {
            let res = alg.residue_pairing(g.gamma2, head.gamma2);
            // C acts by −½
            let coef = &res.scale(&rat(-k, 2));
            out.add_term(rest_key, coef);
        }
        out
    }

    fn evaluate(&self, g: Gen, weights: &[usize]) -> WeylVector {
        let Some(values) = self.module.evaluation(g.gamma2) else {
            return WeylVector::basis(vec![g], weights.to_vec());
        };
        let mut out = WeylVector::zero();
        for (slot, c) in values.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if let Some((j, d)) = weight_action(g.alpha, self.module.weights[slot], weights[slot]) {
                let mut w = weights.to_vec();
                w[slot] = j;
                out.add_term((Vec::new(), w), &c.scale(&d));
            }
        }
        out
    }
}

/// Square matrix over ℚ[a, a⁻¹] indexed by a list of weight tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degree0Matrix {
    pub labels: Vec<Vec<usize>>,
    /// `rows[r][c]`: coefficient of `labels[r]` in the image of `labels[c]`.
    pub rows: Vec<Vec<Scalar>>,
}

impl Degree0Matrix {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.rows.iter().map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum()).collect()
    }

    pub fn mul(&self, other: &Degree0Matrix) -> Degree0Matrix {
        let n = self.size();
        let rows = (0..n)
            .map(|r| (0..n).map(|c| (0..n).map(|k| &self.rows[r][k] * &other.rows[k][c]).sum()).collect())
            .collect();
        Degree0Matrix {
            labels: self.labels.clone(),
            rows,
        }
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Degree0Matrix {
        Degree0Matrix {
            labels: self.labels.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    pub fn label(l: &[usize]) -> String {
        let parts: Vec<String> = l.iter().map(|i| i.to_string()).collect();
        format!("({})", parts.join(","))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let labels: Vec<String> = self.labels.iter().map(|l| Degree0Matrix::label(l)).collect();
        let rows: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
        serde_json::json!({ "labels": labels, "rows": rows })
    }
}

/// Matrix of `x` on the degree-zero part, which `x` must preserve up to
/// terms of positive degree.
pub fn degree0_matrix_of(module: &WeylModule, x: &EnvElement) -> Result<Degree0Matrix, WeylError> {
    let labels = module.degree0_basis();
    let index: HashMap<Vec<usize>, usize> = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let n = labels.len();
    let mut rows = vec![vec![Scalar::zero(); n]; n];
    let mut actor = Actor::new(module, x.degree() + 1);
    for (c, l) in labels.iter().enumerate() {
        let v = WeylVector::basis(Vec::new(), l.clone());
        let image = actor.act_env(x, &v)?.degree0();
        for ((_, w), s) in image.terms() {
            rows[index[w]][c] = s.clone();
        }
    }
    Ok(Degree0Matrix { labels, rows })
}

/// Degree-zero matrix of `S^(2)_{k2/2}` on the module induced from `V^λ ⊗ V^μ`.
pub fn degree0_matrix(k2: i64, lambda: usize, mu: usize) -> Result<Degree0Matrix, WeylError> {
    let module = WeylModule::two(lambda, mu);
    degree0_matrix_of(&module, &crate::env::sugawara2(k2, 4))
}

/// Diagonal action of `x ∈ sl2` on the degree-zero part.
pub fn tensor_action(module: &WeylModule, x: Sl2) -> Degree0Matrix {
    let x0 = EnvElement::gen(module.algebra, x, 0).expect("index 0 is always valid");
    degree0_matrix_of(module, &x0).expect("constant loops preserve degree zero")
}

/// Highest-weight vectors `(ν, coefficients in the degree0 basis)` of
/// `V^λ ⊗ V^μ`, for `ν = λ+μ, λ+μ−2, …, |λ−μ|`.
pub fn clebsch_components(lambda: usize, mu: usize) -> Vec<(usize, Vec<Scalar>)> {
    let module = WeylModule::two(lambda, mu);
    let labels = module.degree0_basis();
    let (l, m) = (lambda as i64, mu as i64);
    let mut out = Vec::new();
    for j in 0..=l.min(m) {
        let nu = l + m - 2 * j;
        let start = (j - m).max(0);
        let mut coeffs = BTreeMap::new();
        let mut c = Rational::from_integer(1.into());
        coeffs.insert(start, c.clone());
        let mut i = start;
        while i < j && i < l {
            c = -c * int((j - i) * (m - j + i + 1)) / int((i + 1) * (l - i));
            i += 1;
            coeffs.insert(i, c.clone());
        }
        let vec = labels
            .iter()
            .map(|lab| {
                let (a, b) = (lab[0] as i64, lab[1] as i64);
                if a + b == j {
                    coeffs.get(&a).map(|c| Scalar::from_rational(c.clone())).unwrap_or_default()
                } else {
                    Scalar::zero()
                }
            })
            .collect();
        out.push((nu as usize, vec));
    }
    out
}

/// The eigenvalue of `m` on `v`, if `v` is an eigenvector.
pub fn eigenvalue(m: &Degree0Matrix, v: &[Scalar]) -> Option<Scalar> {
    let image = m.apply(v);
    let pivot = v.iter().position(|c| !c.is_zero())?;
    // coefficients are Laurent polynomials; divide by a monomial pivot
    let lambda = image[pivot].div_monomial(&v[pivot]).ok()?;
    image.iter().zip(v).all(|(w, x)| *w == &lambda * x).then_some(lambda)
}
