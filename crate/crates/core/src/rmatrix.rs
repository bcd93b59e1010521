//! The rational dynamical R-matrix, the symmetrizer `S` built from it, and
//! the bilinear form on the universal module computed three ways.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::poly::{MultiIndex, Poly};
use crate::scalars::{int, Coeff, LazySum, Rational, RationalFn};
use crate::states::{sorted_words, state_explicit};
use crate::zalgebra::{ZAlgebra, ZElement};

/// Dense tables are refused beyond this many entries.
pub const MAX_DENSE_ENTRIES: usize = 400_000;

/// `R_{ac}^{bd}(H) = δ_c^b δ_a^d + η_{ac} η^{bd}/(H+1)`; lower indices `a, c`,
/// upper `b, d`.
pub fn r_entry(m: &Metric, a: usize, c: usize, b: usize, d: usize) -> RationalFn {
    r_entry_at(m, a, c, b, d, 0)
}

/// `R_{ac}^{bd}(H + s)`
pub fn r_entry_at(m: &Metric, a: usize, c: usize, b: usize, d: usize, s: i64) -> RationalFn {
    let mut out = RationalFn::zero();
    if c == b && a == d {
        out = RationalFn::one();
    }
    let g = m.lower(a, c) * m.upper(b, d);
    if !g.is_zero() {
        out = out + RationalFn::inv_linear(int(1 + s)).scale(&g);
    }
    out
}

fn delta_word(a: &[usize], b: &[usize]) -> bool {
    a == b
}

/// Rank-`r` tensor `S_{a₁…a_r}^{b₁…b_r}(H)` stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct STensor {
    n: usize,
    rank: usize,
    entries: Vec<RationalFn>,
}

fn word_index(n: usize, w: &[usize]) -> usize {
    w.iter().fold(0, |acc, &a| acc * n + a)
}

fn all_words(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |a| {
                    let mut w = w.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

fn check_dense(n: usize, r: usize) -> Result<()> {
    let size = (n as u128).checked_pow(2 * r as u32).unwrap_or(u128::MAX);
    if size > MAX_DENSE_ENTRIES as u128 {
        return Err(Error::RankTooLarge(r));
    }
    Ok(())
}

impl STensor {
    fn from_fn(n: usize, r: usize, f: impl Fn(&[usize], &[usize]) -> RationalFn + Sync) -> Result<Self> {
        check_dense(n, r)?;
        let words = all_words(n, r);
        let entries = words
            .par_iter()
            .flat_map_iter(|lo| words.iter().map(|up| f(lo, up)).collect::<Vec<_>>())
            .collect();
        Ok(STensor { n, rank: r, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Entry with lower word `lo` and upper word `up`.
    pub fn get(&self, lo: &[usize], up: &[usize]) -> &RationalFn {
        let stride = self.n.pow(self.rank as u32);
        &self.entries[word_index(self.n, lo) * stride + word_index(self.n, up)]
    }

    pub fn entries(&self) -> &[RationalFn] {
        &self.entries
    }
}

/// `S` through `S^{(r)}(H) = δ⋯δ + R_{a₁a₂}^{b₁t}(H-r+1) S^{(r-1)}_{ta₃⋯}^{b₂⋯}(H)`.
pub fn s_tensor_recursive(m: &Metric, r: usize) -> Result<STensor> {
    let n = m.n();
    check_dense(n, r.max(1))?;
    let mut cur = STensor::from_fn(n, 1, |a, b| {
        if a == b {
            RationalFn::one()
        } else {
            RationalFn::zero()
        }
    })?;
    for k in 2..=r {
        let prev = cur;
        let shift = 1 - k as i64;
        cur = STensor::from_fn(n, k, |lo, up| {
            let mut acc = LazySum::new();
            if delta_word(lo, up) {
                acc.add(&RationalFn::one());
            }
            let mut tail_lo = lo[1..].to_vec();
            for t in 0..n {
                let rr = r_entry_at(m, lo[0], lo[1], up[0], t, shift);
                tail_lo[0] = t;
                acc.add_product(&rr, prev.get(&tail_lo, &up[1..]));
            }
            acc.finish()
        })?;
    }
    if r == 0 {
        return STensor::from_fn(n, 0, |_, _| RationalFn::one());
    }
    Ok(cur)
}

/// One entry of `S` from the telescoping sum of chained R-matrices with
/// arguments `H-r+1, …, H-1`.
pub fn s_entry_explicit(m: &Metric, lo: &[usize], up: &[usize]) -> RationalFn {
    let r = lo.len();
    assert_eq!(r, up.len(), "word lengths differ");
    let n = m.n();
    let mut total = LazySum::new();
    if delta_word(lo, up) {
        total.add(&RationalFn::one());
    }
    if r < 2 {
        return total.finish();
    }
    // v[c] = R_{a₁a₂}^{b₁c}(H-r+1) R_{c a₃}^{b₂c'}(H-r+2) ⋯, chain index free
    let mut v: Vec<RationalFn> = (0..n)
        .map(|c| r_entry_at(m, lo[0], lo[1], up[0], c, 1 - r as i64))
        .collect();
    for step in 1..r {
        // term closing the chain after `step` factors
        if lo[step + 1..] == up[step + 1..] {
            total.add(&v[up[step]]);
        }
        if step + 1 == r {
            break;
        }
        let shift = step as i64 + 1 - r as i64;
        let mut next = vec![LazySum::new(); n];
        for (c, vc) in v.iter().enumerate() {
            if vc.is_zero() {
                continue;
            }
            for (c2, slot) in next.iter_mut().enumerate() {
                slot.add_product(vc, &r_entry_at(m, c, lo[step + 1], up[step], c2, shift));
            }
        }
        v = next.into_iter().map(LazySum::finish).collect();
    }
    total.finish()
}

pub fn s_tensor_explicit(m: &Metric, r: usize) -> Result<STensor> {
    STensor::from_fn(m.n(), r, |lo, up| s_entry_explicit(m, lo, up))
}

/// Evaluates `⟨x^{a₁}⋯x^{a_r} | x^{b₁}⋯x^{b_r}⟩` through
/// `⟨a|b⟩ = S_{a₁c₂⋯c_r}^{b₁⋯b_r}(H) ⟨a₂⋯a_r | c₂⋯c_r⟩`, caching S tables
/// and partial results.
#[derive(Debug)]
pub struct GramViaS {
    metric: Metric,
    tables: HashMap<usize, STensor>,
    memo: HashMap<(Vec<usize>, Vec<usize>), RationalFn>,
}

impl GramViaS {
    pub fn new(m: &Metric) -> Self {
        GramViaS {
            metric: m.clone(),
            tables: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn s(&mut self, lo: &[usize], up: &[usize]) -> Result<RationalFn> {
        let r = lo.len();
        if check_dense(self.metric.n(), r).is_err() {
            return Ok(s_entry_explicit(&self.metric, lo, up));
        }
        if !self.tables.contains_key(&r) {
            let t = s_tensor_recursive(&self.metric, r)?;
            self.tables.insert(r, t);
        }
        Ok(self.tables[&r].get(lo, up).clone())
    }

    pub fn entry(&mut self, a: &[usize], b: &[usize]) -> Result<RationalFn> {
        a.iter().chain(b).try_for_each(|&i| self.metric.check_index(i))?;
        if a.len() != b.len() {
            return Ok(RationalFn::zero());
        }
        let r = a.len();
        if r == 0 {
            return Ok(RationalFn::one());
        }
        if r == 1 {
            return Ok(if a[0] == b[0] {
                RationalFn::one()
            } else {
                RationalFn::zero()
            });
        }
        let key = (a.to_vec(), b.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let n = self.metric.n();
        let mut sum = LazySum::new();
        for tail in all_words(n, r - 1) {
            let mut lo = vec![a[0]];
            lo.extend(&tail);
            let s = self.s(&lo, b)?;
            if s.is_zero() {
                continue;
            }
            sum.add_product(&s, &self.entry(&a[1..], &tail)?);
        }
        let acc = sum.finish();
        self.memo.insert(key, acc.clone());
        Ok(acc)
    }
}

pub fn gram_via_s(m: &Metric, a: &[usize], b: &[usize]) -> Result<RationalFn> {
    GramViaS::new(m).entry(a, b)
}

/// The universal module `ℚ(H)[x]` with `∂_a` acting through
/// `∂_a x^b = δ_a^b + R_{ac}^{bd}(H) x^c ∂_d` on the vacuum.
#[derive(Debug)]
pub struct VacuumModule {
    metric: Metric,
    memo: HashMap<(usize, Vec<usize>), Poly<RationalFn>>,
}

impl VacuumModule {
    pub fn new(m: &Metric) -> Self {
        VacuumModule {
            metric: m.clone(),
            memo: HashMap::new(),
        }
    }

    /// `(∂_a x^{w₁}⋯x^{w_k})(1)`, peeling `x^{w₁}` first.
    fn d_on_word(&mut self, a: usize, w: &[usize]) -> Poly<RationalFn> {
        let n = self.metric.n();
        let key = (a, w.to_vec());
        if let Some(p) = self.memo.get(&key) {
            return p.clone();
        }
        let mut sums: HashMap<MultiIndex, LazySum> = HashMap::new();
        if let Some((&b, rest)) = w.split_first() {
            if a == b {
                sums.entry(MultiIndex::from_word(n, rest)).or_default().add(&RationalFn::one());
            }
            for d in 0..n {
                let inner = self.d_on_word(d, rest);
                if inner.is_zero() {
                    continue;
                }
                // x^c e(H) = e(H+1) x^c
                let shifted: Vec<_> = inner.terms().map(|(e, c)| (e.clone(), c.shift_h(1))).collect();
                for c in 0..n {
                    let rr = r_entry(&self.metric, a, c, b, d);
                    if rr.is_zero() {
                        continue;
                    }
                    for (e, coeff) in &shifted {
                        sums.entry(e.inc(c)).or_default().add_product(&rr, coeff);
                    }
                }
            }
        }
        let out = Poly::from_terms(n, sums.into_iter().map(|(e, s)| (e, s.finish())))
            .expect("consistent dimension");
        self.memo.insert(key, out.clone());
        out
    }

    /// `∂_a` on an element `Σ c(H) x^B`: `∂_a c(H) = c(H-1) ∂_a`.
    pub fn apply_d(&mut self, a: usize, v: &Poly<RationalFn>) -> Poly<RationalFn> {
        let n = self.metric.n();
        let mut sums: HashMap<MultiIndex, LazySum> = HashMap::new();
        for (e, c) in v.terms() {
            let c = c.shift_h(-1);
            for (e2, c2) in self.d_on_word(a, &e.to_word()).terms() {
                sums.entry(e2.clone()).or_default().add_product(&c, c2);
            }
        }
        Poly::from_terms(n, sums.into_iter().map(|(e, s)| (e, s.finish()))).expect("consistent dimension")
    }
}

pub fn gram_via_recursion(m: &Metric, a: &[usize], b: &[usize]) -> Result<RationalFn> {
    a.iter().chain(b).try_for_each(|&i| m.check_index(i))?;
    if a.len() != b.len() {
        return Ok(RationalFn::zero());
    }
    let n = m.n();
    let mut module = VacuumModule::new(m);
    let mut v = Poly::monomial(MultiIndex::from_word(n, b), RationalFn::one());
    for &ai in a {
        v = module.apply_d(ai, &v);
    }
    Ok(v.coeff(&MultiIndex::zero(n)))
}

/// `⟨u|v⟩ = (u* v)(1)|_{x=0}` inside the dynamical engine: the starred
/// x-word of `a` times the x-word of `b`, constant coefficient.
pub fn gram_via_engine_with(z: &ZAlgebra, a: &[usize], b: &[usize]) -> Result<RationalFn> {
    let m = z.metric();
    a.iter().chain(b).try_for_each(|&i| m.check_index(i))?;
    let n = m.n();
    let xa = ZElement::monomial(MultiIndex::from_word(n, a), MultiIndex::zero(n), RationalFn::one());
    let xb = ZElement::monomial(MultiIndex::from_word(n, b), MultiIndex::zero(n), RationalFn::one());
    Ok(z.mul(&z.star(&xa)?, &xb)?.constant_term())
}

pub fn gram_via_engine(m: &Metric, a: &[usize], b: &[usize]) -> Result<RationalFn> {
    gram_via_engine_with(&ZAlgebra::dynamical(m), a, b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramTable {
    pub r: usize,
    /// Sorted words, 0-based.
    pub words: Vec<Vec<usize>>,
    pub entries: Vec<Vec<RationalFn>>,
}

impl GramTable {
    /// Pairs `(i, j)` with `entries[i][j] != entries[j][i]`.
    pub fn asymmetric_pairs(&self) -> Vec<(usize, usize)> {
        let k = self.words.len();
        (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.entries[i][j] != self.entries[j][i])
            .collect()
    }
}

/// Full table over sorted words of length `r` through [`GramViaS`].
pub fn gram_table(m: &Metric, r: usize) -> Result<GramTable> {
    check_dense(m.n(), r)?;
    let words = sorted_words(m.n(), r);
    let mut g = GramViaS::new(m);
    let mut entries = Vec::with_capacity(words.len());
    for a in &words {
        let row = words.iter().map(|b| g.entry(a, b)).collect::<Result<Vec<_>>>()?;
        entries.push(row);
    }
    Ok(GramTable { r, words, entries })
}

/// Same table with every entry from the vacuum-module recursion and no
/// dense S storage.
pub fn gram_table_on_demand(m: &Metric, r: usize) -> Result<GramTable> {
    let words = sorted_words(m.n(), r);
    let entries = words
        .par_iter()
        .map(|a| {
            words
                .iter()
                .map(|b| gram_via_recursion(m, a, b))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramTable { r, words, entries })
}

/// `(∂_{a₁}⋯∂_{a_r} |b₁⋯b_r⟩)|_{x=0}` for the genuine states.
pub fn state_pairing(m: &Metric, a: &[usize], b: &[usize]) -> Result<Rational> {
    let n = m.n();
    let s = state_explicit(m, b)?;
    let d = s.partial_multi(&MultiIndex::from_word(n, a));
    Ok(d.coeff(&MultiIndex::zero(n)))
}

/// `⟨x_c x^c x^{a…} | x^{b…}⟩ = Σ η_{cd} ⟨x^c x^d x^{a…} | x^{b…}⟩`
pub fn contracted_gram(m: &Metric, a: &[usize], b: &[usize]) -> Result<RationalFn> {
    let n = m.n();
    let mut g = GramViaS::new(m);
    let mut acc = RationalFn::zero();
    for c in 0..n {
        for d in 0..n {
            let eta = m.lower(c, d);
            if eta.is_zero() {
                continue;
            }
            let mut w = vec![c, d];
            w.extend_from_slice(a);
            acc = acc + g.entry(&w, b)?.scale(eta);
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GramAgreement {
    pub r: usize,
    pub pairs: usize,
    pub s_vs_recursion_mismatches: usize,
    pub engine_checked: bool,
    pub s_vs_engine_mismatches: usize,
}

impl GramAgreement {
    pub fn passed(&self) -> bool {
        self.s_vs_recursion_mismatches == 0 && self.s_vs_engine_mismatches == 0
    }
}

/// Compares the three computations on all pairs of words of length `r`
/// (all words, not only sorted ones); the engine is included when
/// `with_engine` is set.
pub fn gram_agreement(m: &Metric, r: usize, with_engine: bool) -> Result<GramAgreement> {
    let n = m.n();
    let words = all_words(n, r);
    let mut gs = GramViaS::new(m);
    let via_s: Vec<Vec<RationalFn>> = words
        .iter()
        .map(|a| words.iter().map(|b| gs.entry(a, b)).collect())
        .collect::<Result<_>>()?;
    let z = ZAlgebra::dynamical(m);
    let results: Vec<(usize, usize)> = words
        .par_iter()
        .enumerate()
        .map(|(j, b)| {
            // ∂_{a_r}⋯∂_{a₁} x^b for all words a, sharing prefixes; the
            // final layer is in the order of `words`
            let mut module = VacuumModule::new(m);
            let mut layer = vec![Poly::monomial(MultiIndex::from_word(n, b), RationalFn::one())];
            for _ in 0..r {
                let mut next = Vec::with_capacity(layer.len() * n);
                for v in &layer {
                    for c in 0..n {
                        next.push(module.apply_d(c, v));
                    }
                }
                layer = next;
            }
            let mut rec_bad = 0;
            let mut eng_bad = 0;
            for (i, a) in words.iter().enumerate() {
                if layer[i].coeff(&MultiIndex::zero(n)) != via_s[i][j] {
                    rec_bad += 1;
                }
                if with_engine && gram_via_engine_with(&z, a, b)? != via_s[i][j] {
                    eng_bad += 1;
                }
            }
            Ok((rec_bad, eng_bad))
        })
        .collect::<Result<_>>()?;
    Ok(GramAgreement {
        r,
        pairs: words.len() * words.len(),
        s_vs_recursion_mismatches: results.iter().map(|x| x.0).sum(),
        engine_checked: with_engine,
        s_vs_engine_mismatches: results.iter().map(|x| x.1).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;

    fn delta(a: usize, b: usize) -> RationalFn {
        if a == b {
            RationalFn::one()
        } else {
            RationalFn::zero()
        }
    }

    #[test]
    fn r_examples() {
        let e = Metric::euclidean(3).unwrap();
        assert_eq!(
            r_entry(&e, 0, 0, 0, 0),
            RationalFn::one() + RationalFn::inv_linear(int(1))
        );
        assert!(r_entry(&e, 0, 1, 0, 1).is_zero());
        let mk = Metric::minkowski(3).unwrap();
        assert_eq!(
            r_entry(&mk, 1, 1, 1, 1),
            RationalFn::one() + RationalFn::inv_linear(int(1))
        );
        // flip part only
        assert_eq!(r_entry(&e, 0, 1, 1, 0), RationalFn::one());
        assert_eq!(
            r_entry_at(&e, 2, 2, 2, 2, -1),
            RationalFn::one() + RationalFn::inv_linear(int(0))
        );
    }

    #[test]
    fn s_low_rank() {
        let m = Metric::minkowski(3).unwrap();
        let s1 = s_tensor_recursive(&m, 1).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(s1.get(&[a], &[b]), &delta(a, b));
            }
        }
        let s2 = s_tensor_recursive(&m, 2).unwrap();
        for w in all_words(3, 4) {
            let expect = delta(w[0], w[2]) * delta(w[1], w[3])
                + r_entry_at(&m, w[0], w[1], w[2], w[3], -1);
            assert_eq!(s2.get(&w[..2], &w[2..]), &expect);
            assert_eq!(s_entry_explicit(&m, &w[..2], &w[2..]), expect);
        }
    }

    #[test]
    fn gram_small() {
        let m = Metric::euclidean(3).unwrap();
        assert_eq!(gram_via_s(&m, &[], &[]).unwrap(), RationalFn::one());
        assert_eq!(gram_via_recursion(&m, &[], &[]).unwrap(), RationalFn::one());
        assert_eq!(gram_via_s(&m, &[0], &[0]).unwrap(), RationalFn::one());
        assert!(gram_via_s(&m, &[0], &[1]).unwrap().is_zero());
        assert!(gram_via_s(&m, &[0], &[0, 1]).unwrap().is_zero());
        // δδ + R_{11}^{11}(H-1) = 2 + 1/H
        let expect = RationalFn::constant(int(2)) + RationalFn::inv_linear(int(0));
        assert_eq!(gram_via_s(&m, &[0, 0], &[0, 0]).unwrap(), expect);
        assert_eq!(gram_via_recursion(&m, &[0, 0], &[0, 0]).unwrap(), expect);
        assert_eq!(gram_via_engine(&m, &[0, 0], &[0, 0]).unwrap(), expect);
        assert_eq!(gram_via_engine(&m, &[0], &[0]).unwrap(), RationalFn::one());
        assert!(gram_via_engine(&m, &[0], &[1]).unwrap().is_zero());
    }

    #[test]
    fn vacuum_pairing_at_minus_half_n() {
        let m = Metric::minkowski(4).unwrap();
        let h0 = rat(-4, 2);
        for a in all_words(4, 2) {
            for b in all_words(4, 2) {
                let g = gram_via_s(&m, &a, &b).unwrap().eval(&h0).unwrap();
                assert_eq!(g, state_pairing(&m, &a, &b).unwrap());
            }
        }
    }

    #[test]
    fn dense_limit() {
        let m = Metric::euclidean(5).unwrap();
        assert_eq!(s_tensor_recursive(&m, 5).unwrap_err(), Error::RankTooLarge(5));
        assert!(gram_table(&m, 5).is_err());
    }
}
