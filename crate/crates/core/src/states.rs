//! Bosonic states `|a₁⋯a_ℓ⟩` in closed form, the pairing combinatorics behind
//! them, and the finite irreducibility checks.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::metric::Metric;
use crate::poly::{apply_box, h_eigenvalue, monomials_of_degree, radius_squared, MultiIndex, Poly};
use crate::projector::f_coeff;
use crate::scalars::{rat, Rational};
use crate::weyl::WeylElement;

/// A word `a₁…a_ℓ` of coordinate indices, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Self {
        Word(indices)
    }

    /// From 1-based indices as written by users.
    pub fn from_one_based(indices: &[i64]) -> Result<Self> {
        indices
            .iter()
            .map(|&i| {
                if i >= 1 {
                    Ok(i as usize - 1)
                } else {
                    Err(Error::Parse(format!("index {i} must be at least 1")))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn one_based(&self) -> Vec<i64> {
        self.0.iter().map(|&i| i as i64 + 1).collect()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self, m: &Metric) -> Result<()> {
        self.0.iter().try_for_each(|&a| m.check_index(a))
    }

    pub fn sorted(&self) -> Word {
        let mut v = self.0.clone();
        v.sort_unstable();
        Word(v)
    }
}

impl TryFrom<Vec<i64>> for Word {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Word::from_one_based(&v)
    }
}

impl From<Word> for Vec<i64> {
    fn from(w: Word) -> Self {
        w.one_based()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 && self.0.iter().any(|&b| b >= 9) {
                write!(f, ",")?;
            }
            write!(f, "{}", a + 1)?;
        }
        write!(f, "⟩")
    }
}

/// Disjoint position pairs `(i, j)` with `i < j`, plus the unpaired positions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialMatching {
    pub pairs: Vec<(usize, usize)>,
    pub singles: Vec<usize>,
}

/// All ways to pick `k` disjoint pairs among positions `0..l`.
pub fn enumerate_matchings(l: usize, k: usize) -> Vec<PartialMatching> {
    fn rec(
        rest: &[usize],
        k: usize,
        pairs: &mut Vec<(usize, usize)>,
        singles: &mut Vec<usize>,
        out: &mut Vec<PartialMatching>,
    ) {
        if rest.len() < 2 * k {
            return;
        }
        let Some((&first, tail)) = rest.split_first() else {
            out.push(PartialMatching {
                pairs: pairs.clone(),
                singles: singles.clone(),
            });
            return;
        };
        // leave `first` unpaired
        singles.push(first);
        rec(tail, k, pairs, singles, out);
        singles.pop();
        if k == 0 {
            return;
        }
        for (idx, &j) in tail.iter().enumerate() {
            let remaining: Vec<usize> = tail
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != idx)
                .map(|(_, &p)| p)
                .collect();
            pairs.push((first, j));
            rec(&remaining, k - 1, pairs, singles, out);
            pairs.pop();
        }
    }
    let mut out = Vec::new();
    if 2 * k <= l {
        let positions: Vec<usize> = (0..l).collect();
        rec(&positions, k, &mut Vec::new(), &mut Vec::new(), &mut out);
    }
    out
}

/// `ℓ!/(2^k k! (ℓ-2k)!)`
pub fn matching_count(l: usize, k: usize) -> u128 {
    if 2 * k > l {
        return 0;
    }
    let fact = |m: usize| (1..=m as u128).product::<u128>();
    fact(l) / (fact(k) << k) / fact(l - 2 * k)
}

fn eta_product(m: &Metric, word: &[usize], pairs: &[(usize, usize)]) -> Rational {
    pairs
        .iter()
        .map(|&(i, j)| m.upper(word[i], word[j]).clone())
        .product()
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if items.len() < size {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], size - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Closed form of `|a₁⋯a_ℓ⟩`: for each `k`, `f_k(-ℓ-n/2)(½x_bx^b)^k` times
/// the sum over `k`-pair matchings of `Π η^{a_ia_j} Π x^{a_s}`.
pub fn state_explicit(m: &Metric, word: &[usize]) -> Result<Poly> {
    word.iter().try_for_each(|&a| m.check_index(a))?;
    let n = m.n();
    let l = word.len();
    let h0 = h_eigenvalue(l as i64, n);
    let half_r2 = radius_squared(m).scale(&rat(1, 2));
    let mut out = Poly::zero(n);
    let mut r2k = Poly::one(n);
    for k in 0..=l / 2 {
        if k > 0 {
            r2k = &r2k * &half_r2;
        }
        let mut inner = Poly::zero(n);
        for pm in enumerate_matchings(l, k) {
            let c = eta_product(m, word, &pm.pairs);
            if c.is_zero() {
                continue;
            }
            let singles: Vec<usize> = pm.singles.iter().map(|&s| word[s]).collect();
            inner.add_term(MultiIndex::from_word(n, &singles), c);
        }
        if inner.is_zero() {
            continue;
        }
        let fk = f_coeff(k as u32).eval(&h0)?;
        out = out.try_add(&(&r2k * &inner).scale(&fk))?;
    }
    Ok(out)
}

/// Sum of all mixed monomials `z^{a₁}⋯z^{a_ℓ}` of degree `d`, where each
/// `z^{a_i}` is `x^{a_i}` or `∂^{a_i} = η^{a_ic}∂_c`.
pub fn mixed_monomial_sum(m: &Metric, word: &[usize], d: i64) -> Result<WeylElement> {
    word.iter().try_for_each(|&a| m.check_index(a))?;
    let n = m.n();
    let l = word.len() as i64;
    if d.abs() > l || (l - d) % 2 != 0 {
        return Ok(WeylElement::zero(n));
    }
    let t = ((l - d) / 2) as usize;
    let positions: Vec<usize> = (0..word.len()).collect();
    let mut out = WeylElement::zero(n);
    for ds in subsets(&positions, t) {
        let mut prod = WeylElement::one(n);
        for (i, &a) in word.iter().enumerate() {
            let z = if ds.contains(&i) {
                WeylElement::d_upper(m, a)
            } else {
                WeylElement::x(n, a)
            };
            prod = prod.mul(&z)?;
        }
        out = out.add(&prod)?;
    }
    Ok(out)
}

/// Sum of all distinct ordered monomials `(Πη)(Πx)(Π∂)` of degree `d`
/// indexed by permutations of the word.
pub fn ordered_monomial_sum(m: &Metric, word: &[usize], d: i64) -> Result<WeylElement> {
    ordered_monomial_sum_upto(m, word, d, word.len() / 2)
}

/// As [`ordered_monomial_sum`], keeping only terms with at most `max_pairs`
/// factors of `η`.
pub fn ordered_monomial_sum_upto(
    m: &Metric,
    word: &[usize],
    d: i64,
    max_pairs: usize,
) -> Result<WeylElement> {
    word.iter().try_for_each(|&a| m.check_index(a))?;
    let n = m.n();
    let l = word.len() as i64;
    let mut out = WeylElement::zero(n);
    if d.abs() > l || (l - d) % 2 != 0 {
        return Ok(out);
    }
    for r in 0..=max_pairs.min(word.len() / 2) {
        let free = l - 2 * r as i64;
        if d.abs() > free {
            continue;
        }
        let t = ((free - d) / 2) as usize;
        for pm in enumerate_matchings(word.len(), r) {
            let c = eta_product(m, word, &pm.pairs);
            if c.is_zero() {
                continue;
            }
            for ds in subsets(&pm.singles, t) {
                let xs: Vec<usize> = pm
                    .singles
                    .iter()
                    .filter(|s| !ds.contains(s))
                    .map(|&s| word[s])
                    .collect();
                let mut prod = WeylElement::monomial(
                    MultiIndex::from_word(n, &xs),
                    MultiIndex::zero(n),
                    c.clone(),
                );
                for &s in &ds {
                    prod = prod.mul(&WeylElement::d_upper(m, word[s]))?;
                }
                out = out.add(&prod)?;
            }
        }
    }
    Ok(out)
}

/// Memoised states keyed by sorted word.
#[derive(Debug)]
pub struct StateCache {
    metric: Metric,
    states: HashMap<Vec<usize>, Poly>,
}

impl StateCache {
    pub fn new(metric: Metric) -> Self {
        StateCache {
            metric,
            states: HashMap::new(),
        }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn get(&mut self, word: &[usize]) -> Result<&Poly> {
        let mut key = word.to_vec();
        key.sort_unstable();
        if !self.states.contains_key(&key) {
            let s = state_explicit(&self.metric, &key)?;
            self.states.insert(key.clone(), s);
        }
        Ok(&self.states[&key])
    }
}

/// Replaces each monomial `c x^{a₁}⋯x^{a_ℓ}` of a homogeneous solution by
/// `c |a₁⋯a_ℓ⟩`; the result equals the input.
pub fn lift_and_apply(m: &Metric, phi: &Poly) -> Result<Poly> {
    if phi.n() != m.n() {
        return Err(Error::DimensionMismatch(m.n(), phi.n()));
    }
    if !phi.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    if !apply_box(m, phi)?.is_zero() {
        return Err(Error::NotHarmonic);
    }
    let mut cache = StateCache::new(m.clone());
    let mut out = Poly::zero(m.n());
    for (e, c) in phi.terms() {
        let s = cache.get(&e.to_word())?;
        out = out.try_add(&s.scale(c))?;
    }
    Ok(out)
}

/// Differentiates a nonzero homogeneous polynomial down to a nonzero constant
/// along its lexicographically largest monomial `ξ x^d`; returns
/// `(d, d₁!⋯dₙ! ξ)`.
pub fn descend_to_constant(phi: &Poly) -> Result<(MultiIndex, Rational)> {
    let (d, xi) = phi.leading().ok_or(Error::ZeroPolynomial)?;
    if !phi.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let value = d.factorial() * xi;
    let reduced = phi.partial_multi(d);
    assert_eq!(reduced, Poly::constant(phi.n(), value.clone()));
    Ok((d.clone(), value))
}

/// All sorted words of length `d` over `0..n`, in lexicographic order.
pub fn sorted_words(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut words: Vec<Vec<usize>> = monomials_of_degree(n, d as u32)
        .into_iter()
        .map(|e| e.to_word())
        .collect();
    words.sort();
    words
}

/// `binom(n+d-1, d) - binom(n+d-3, d-2)`
pub fn harmonic_dimension(n: usize, d: usize) -> usize {
    let binom = |a: usize, b: usize| -> usize {
        if b > a {
            return 0;
        }
        (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
    };
    let all = binom(n + d - 1, d);
    if d < 2 {
        all
    } else {
        all - binom(n + d - 3, d - 2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningReport {
    pub degree: usize,
    pub states_rank: usize,
    pub kernel_dim: usize,
    pub expected_dim: usize,
    pub all_harmonic: bool,
}

impl SpanningReport {
    pub fn passed(&self) -> bool {
        self.all_harmonic
            && self.states_rank == self.kernel_dim
            && self.kernel_dim == self.expected_dim
    }
}

fn coordinates(p: &Poly, basis: &[MultiIndex]) -> Vec<Rational> {
    basis.iter().map(|e| p.coeff(e)).collect()
}

/// Matrix of `□` from degree `d` to degree `d-2` in the monomial bases.
pub fn box_matrix(m: &Metric, d: usize) -> Result<Matrix> {
    let n = m.n();
    let src = monomials_of_degree(n, d as u32);
    if d < 2 {
        return Ok(vec![]);
    }
    let dst = monomials_of_degree(n, d as u32 - 2);
    let mut mat = vec![vec![Rational::zero(); src.len()]; dst.len()];
    for (j, e) in src.iter().enumerate() {
        let img = apply_box(m, &Poly::monomial(e.clone(), Rational::one()))?;
        for (i, c) in coordinates(&img, &dst).into_iter().enumerate() {
            mat[i][j] = c;
        }
    }
    Ok(mat)
}

/// Kernel of `□` on degree-`d` polynomials as explicit polynomials.
pub fn harmonic_basis(m: &Metric, d: usize) -> Result<Vec<Poly>> {
    let n = m.n();
    let src = monomials_of_degree(n, d as u32);
    let mat = box_matrix(m, d)?;
    let null = if mat.is_empty() {
        linalg::identity(src.len())
    } else {
        linalg::nullspace(&mat, src.len())
    };
    null.into_iter()
        .map(|v| {
            Poly::from_terms(
                n,
                src.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero()),
            )
        })
        .collect()
}

/// Checks that the states of sorted words of length `d` span the solutions
/// of degree `d`.
pub fn spanning_check(m: &Metric, d: usize) -> Result<SpanningReport> {
    let n = m.n();
    let basis = monomials_of_degree(n, d as u32);
    let mut rows = Vec::new();
    let mut all_harmonic = true;
    for w in sorted_words(n, d) {
        let s = state_explicit(m, &w)?;
        all_harmonic &= apply_box(m, &s)?.is_zero();
        rows.push(coordinates(&s, &basis));
    }
    let mat = box_matrix(m, d)?;
    let kernel_dim = basis.len() - if mat.is_empty() { 0 } else { linalg::rank(&mat) };
    Ok(SpanningReport {
        degree: d,
        states_rank: linalg::rank(&rows),
        kernel_dim,
        expected_dim: harmonic_dimension(n, d),
        all_harmonic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::int;

    fn xw(n: usize, w: &[usize]) -> Poly {
        Poly::monomial(MultiIndex::from_word(n, w), Rational::one())
    }

    #[test]
    fn matching_examples() {
        let m31 = enumerate_matchings(3, 1);
        let pairs: Vec<_> = m31.iter().map(|p| p.pairs[0]).collect();
        assert_eq!(pairs, vec![(1, 2), (0, 1), (0, 2)]);
        assert_eq!(m31[0].singles, vec![0]);
        assert_eq!(enumerate_matchings(4, 1).len(), 6);
        assert_eq!(enumerate_matchings(4, 2).len(), 3);
        assert!(enumerate_matchings(3, 2).is_empty());
        assert_eq!(enumerate_matchings(0, 0).len(), 1);
    }

    #[test]
    fn word_io() {
        let w = Word::from_one_based(&[2, 1, 3]).unwrap();
        assert_eq!(w.indices(), &[1, 0, 2]);
        assert_eq!(w.one_based(), vec![2, 1, 3]);
        assert_eq!(w.to_string(), "|213⟩");
        assert!(Word::from_one_based(&[0]).is_err());
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, "[2,1,3]");
        assert_eq!(serde_json::from_str::<Word>(&json).unwrap(), w);
        let m = Metric::euclidean(3).unwrap();
        assert!(Word::new(vec![3]).check(&m).is_err());
    }

    #[test]
    fn explicit_low_degree() {
        let m = Metric::minkowski(4).unwrap();
        let n = 4;
        assert_eq!(state_explicit(&m, &[]).unwrap(), Poly::one(n));
        assert_eq!(state_explicit(&m, &[2]).unwrap(), Poly::var(n, 2));
        let r2 = radius_squared(&m);
        for a in 0..n {
            for b in 0..n {
                let expect = &xw(n, &[a, b]) - &r2.scale(&(m.upper(a, b) * rat(1, n as i64)));
                assert_eq!(state_explicit(&m, &[a, b]).unwrap(), expect);
            }
        }
        // ℓ = 3
        let w = [0, 1, 1];
        let coeff = rat(1, 2) / (int(-1) - rat(n as i64, 2));
        let lin = &Poly::var(n, 1).scale(&(m.upper(0, 1) * int(2))) + &Poly::var(n, 0).scale(m.upper(1, 1));
        let expect = &xw(n, &w) + &(&r2 * &lin).scale(&coeff);
        assert_eq!(state_explicit(&m, &w).unwrap(), expect);
    }

    #[test]
    fn descend_examples() {
        let n = 3;
        let p = xw(n, &[0, 1]).scale(&int(3));
        assert_eq!(descend_to_constant(&p).unwrap(), (MultiIndex(vec![1, 1, 0]), int(3)));
        let q = &xw(n, &[0, 0]) - &xw(n, &[1, 1]);
        assert_eq!(descend_to_constant(&q).unwrap(), (MultiIndex(vec![2, 0, 0]), int(2)));
        assert_eq!(descend_to_constant(&Poly::zero(n)), Err(Error::ZeroPolynomial));
        let inhom = &Poly::var(n, 0) + &Poly::one(n);
        assert_eq!(descend_to_constant(&inhom), Err(Error::NotHomogeneous));
    }

    #[test]
    fn lift_examples() {
        let e = Metric::euclidean(3).unwrap();
        let q = &xw(3, &[0, 0]) - &xw(3, &[1, 1]);
        assert_eq!(lift_and_apply(&e, &q).unwrap(), q);
        assert_eq!(lift_and_apply(&e, &Poly::var(3, 0)).unwrap(), Poly::var(3, 0));
        assert_eq!(lift_and_apply(&e, &xw(3, &[0, 0])), Err(Error::NotHarmonic));
        let mk = Metric::minkowski(4).unwrap();
        assert_eq!(lift_and_apply(&mk, &xw(4, &[0, 1])).unwrap(), xw(4, &[0, 1]));
        let inhom = &Poly::var(3, 0) + &Poly::one(3);
        assert_eq!(lift_and_apply(&e, &inhom), Err(Error::NotHomogeneous));
    }

    #[test]
    fn harmonic_dimensions() {
        // n = 3: 2d + 1
        for d in 0..6 {
            assert_eq!(harmonic_dimension(3, d), 2 * d + 1);
        }
        // n = 4: (d + 1)²
        for d in 0..6 {
            assert_eq!(harmonic_dimension(4, d), (d + 1) * (d + 1));
        }
    }

    #[test]
    fn mixed_trivial_cases() {
        let m = Metric::euclidean(3).unwrap();
        assert_eq!(mixed_monomial_sum(&m, &[1], 1).unwrap(), WeylElement::x(3, 1));
        assert!(mixed_monomial_sum(&m, &[1, 2], 1).unwrap().is_zero());
        let dd = WeylElement::d(3, 0).mul(&WeylElement::d(3, 2)).unwrap();
        assert_eq!(ordered_monomial_sum(&m, &[0, 2], -2).unwrap(), dd);
        assert_eq!(mixed_monomial_sum(&m, &[0, 2], -2).unwrap(), dd);
    }
}
