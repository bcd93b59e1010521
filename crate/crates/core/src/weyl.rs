//! The Weyl algebra on `x¹…xⁿ, ∂₁…∂ₙ` in normal order (all `x` left of all
//! `∂`), the `sl₂` triple built from a metric, the Fourier-type star
//! anti-involution and the action on polynomials.
//!
//! Coefficients are generic: with [`RationalFn`] coefficients an element
//! `Σ c(H) x^α ∂^β` lives in the localisation by `H`, with every coefficient
//! kept on the far left. Moving a coefficient left past a monomial `m` of
//! degree `k = |α| - |β|` uses `m · c(H) = c(H + k) · m`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::poly::{h_eigenvalue, MultiIndex, Poly};
use crate::scalars::{int, rat, Coeff, Rational, RationalFn};

pub type Monomial = (MultiIndex, MultiIndex);

#[derive(Clone, PartialEq, Debug)]
pub struct WeylElement<C: Coeff = Rational> {
    n: usize,
    terms: BTreeMap<Monomial, C>,
}

/// Grading of `x^α ∂^β`: `|α| - |β|`.
pub fn monomial_degree(m: &Monomial) -> i64 {
    m.0.total() as i64 - m.1.total() as i64
}

fn binom(n: u32, k: u32) -> Rational {
    let mut r = Rational::one();
    for i in 0..k {
        r = r * int((n - i) as i64) / int((i + 1) as i64);
    }
    r
}

/// Normal-ordered expansion of `∂^β x^γ` as `Σ_κ c_κ x^{γ-κ} ∂^{β-κ}` with
/// `c_κ = Π_i C(β_i, κ_i) C(γ_i, κ_i) κ_i!`, i.e. iterating
/// `∂_a x^b = x^b ∂_a + δ_a^b` coordinate by coordinate.
fn reorder(beta: &MultiIndex, gamma: &MultiIndex) -> Vec<(Rational, MultiIndex, MultiIndex)> {
    let n = beta.len();
    let mut out = vec![(Rational::one(), MultiIndex::zero(n), MultiIndex::zero(n))];
    for i in 0..n {
        let (b, g) = (beta.0[i], gamma.0[i]);
        let mut next = Vec::new();
        for (c, xs, ds) in &out {
            for k in 0..=b.min(g) {
                let f = binom(b, k) * binom(g, k) * MultiIndex(vec![k]).factorial();
                let mut xs = xs.clone();
                let mut ds = ds.clone();
                xs.0[i] = g - k;
                ds.0[i] = b - k;
                next.push((c * &f, xs, ds));
            }
        }
        out = next;
    }
    out
}

impl<C: Coeff> WeylElement<C> {
    pub fn zero(n: usize) -> Self {
        WeylElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zero(n), MultiIndex::zero(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, C::one())
    }

    pub fn monomial(x: MultiIndex, d: MultiIndex, c: C) -> Self {
        let mut w = Self::zero(x.len());
        w.add_term((x, d), c);
        w
    }

    /// `x^a` (0-based).
    pub fn x(n: usize, a: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, a), MultiIndex::zero(n), C::one())
    }

    /// `∂_a` (0-based).
    pub fn d(n: usize, a: usize) -> Self {
        Self::monomial(MultiIndex::zero(n), MultiIndex::unit(n, a), C::one())
    }

    /// `x_a = η_{ab} x^b`
    pub fn x_lower(m: &Metric, a: usize) -> Self {
        let n = m.n();
        let mut w = Self::zero(n);
        for b in 0..n {
            w.add_term(
                (MultiIndex::unit(n, b), MultiIndex::zero(n)),
                C::from_rational(m.lower(a, b).clone()),
            );
        }
        w
    }

    /// `∂^a = η^{ab} ∂_b`
    pub fn d_upper(m: &Metric, a: usize) -> Self {
        let n = m.n();
        let mut w = Self::zero(n);
        for b in 0..n {
            w.add_term(
                (MultiIndex::zero(n), MultiIndex::unit(n, b)),
                C::from_rational(m.upper(a, b).clone()),
            );
        }
        w
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, x: &MultiIndex, d: &MultiIndex) -> C {
        self.terms
            .get(&(x.clone(), d.clone()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch(self.n, o.n));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        WeylElement {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.scale(r));
        }
        out
    }

    /// Left multiplication by a coefficient.
    pub fn lmul(&self, c: &C) -> Self {
        let mut out = Self::zero(self.n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), c.clone() * v.clone());
        }
        out
    }

    /// Normally ordered product.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = Self::zero(self.n);
        for ((a1, b1), c1) in &self.terms {
            let shift = monomial_degree(&(a1.clone(), b1.clone()));
            for ((a2, b2), c2) in &o.terms {
                let coeff = c1.clone() * c2.shift_h(shift);
                for (f, xs, ds) in reorder(b1, a2) {
                    out.add_term((a1.add(&xs), ds.add(b2)), coeff.scale(&f));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// `[u, v] = uv - vu`
    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    /// `(ad u)^k (v)`
    pub fn ad_power(&self, k: u32, v: &Self) -> Result<Self> {
        let mut out = v.clone();
        for _ in 0..k {
            if out.is_zero() {
                break;
            }
            out = self.commutator(&out)?;
        }
        Ok(out)
    }

    /// Anti-automorphism with `x^a ↦ ∂_a`, `∂_a ↦ x^a`, `H ↦ H`. On numeric
    /// coefficients it is the identity, so an element built from the metric
    /// `η` is sent to the corresponding element built from `η⁻¹`.
    pub fn star(&self) -> Self {
        let mut out = Self::zero(self.n);
        for ((a, b), c) in &self.terms {
            // (c(H) x^α ∂^β)* = x^β ∂^α c(H) = c(H + |β| - |α|) x^β ∂^α
            let shift = b.total() as i64 - a.total() as i64;
            out.add_term((b.clone(), a.clone()), c.shift_h(shift));
        }
        out
    }

    /// Highest `x`-degree among the terms.
    pub fn x_degree(&self) -> u32 {
        self.terms.keys().map(|(a, _)| a.total()).max().unwrap_or(0)
    }

    /// Highest `∂`-degree among the terms.
    pub fn d_degree(&self) -> u32 {
        self.terms.keys().map(|(_, b)| b.total()).max().unwrap_or(0)
    }

    /// Grading `|α| - |β|` if all terms agree.
    pub fn grade(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(monomial_degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Applies the element to a polynomial; every coefficient `c(H)` is
    /// evaluated at the `H`-eigenvalue of the homogeneous output it
    /// multiplies, which is valid because coefficients sit on the far left.
    pub fn apply(&self, p: &Poly<Rational>) -> Result<Poly<Rational>> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch(self.n, p.n()));
        }
        let mut out = Poly::zero(self.n);
        for ((a, b), c) in &self.terms {
            let part = p.partial_multi(b).mul_monomial(a);
            match c.as_rational() {
                Some(r) => out = out.try_add(&part.scale(&r))?,
                None => {
                    for (deg, comp) in part.homogeneous_components() {
                        let h = h_eigenvalue(deg as i64, self.n);
                        out = out.try_add(&comp.scale(&c.eval_at(&h)?))?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Strict variant of [`apply`](Self::apply) that refuses `H`-dependent
    /// coefficients.
    pub fn apply_numeric(&self, p: &Poly<Rational>) -> Result<Poly<Rational>> {
        if self.terms.values().any(|c| c.as_rational().is_none()) {
            return Err(Error::Unsubstituted);
        }
        self.apply(p)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> WeylElement<D> {
        let mut out = WeylElement::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl WeylElement<Rational> {
    pub fn localize(&self) -> WeylElement<RationalFn> {
        self.map_coeffs(|c| RationalFn::constant(c.clone()))
    }
}

impl<C: Coeff> fmt::Display for WeylElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| {
                let mut s = format!("({c})");
                for (v, &k) in a.0.iter().enumerate() {
                    for _ in 0..k {
                        s.push_str(&format!("*x{}", v + 1));
                    }
                }
                for (v, &k) in b.0.iter().enumerate() {
                    for _ in 0..k {
                        s.push_str(&format!("*d{}", v + 1));
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `E' = ½∂_a∂^a`, `F' = ½x_a x^a`, `H = -½(x^a∂_a + ∂_a x^a)`; the
/// imaginary unit of the oscillator representation is dropped from `E`, `F`,
/// which turns `[E, F] = H` into `[E', F'] = -H`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl2Triple {
    pub e: WeylElement,
    pub f: WeylElement,
    pub h: WeylElement,
}

pub fn sl2(m: &Metric) -> Sl2Triple {
    let n = m.n();
    let mut e = WeylElement::zero(n);
    let mut f = WeylElement::zero(n);
    for a in 0..n {
        for b in 0..n {
            let mut ab = MultiIndex::unit(n, a);
            ab.0[b] += 1;
            e.add_term((MultiIndex::zero(n), ab.clone()), m.upper(a, b) * rat(1, 2));
            f.add_term((ab, MultiIndex::zero(n)), m.lower(a, b) * rat(1, 2));
        }
    }
    let mut h = WeylElement::zero(n);
    for a in 0..n {
        let xa = WeylElement::<Rational>::x(n, a);
        let da = WeylElement::<Rational>::d(n, a);
        let sym = xa.mul(&da).unwrap().add(&da.mul(&xa).unwrap()).unwrap();
        h = h.add(&sym.scale(&rat(-1, 2))).unwrap();
    }
    Sl2Triple { e, f, h }
}

/// The Cartan element `H` as a Weyl element; equals `-x^a∂_a - n/2`.
pub fn h_element(n: usize) -> WeylElement {
    let mut h = WeylElement::scalar(n, rat(-(n as i64), 2));
    for a in 0..n {
        h.add_term((MultiIndex::unit(n, a), MultiIndex::unit(n, a)), int(-1));
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::radius_squared;

    type W = WeylElement<Rational>;

    #[test]
    fn defining_relation() {
        let n = 3;
        let prod = W::d(n, 0).mul(&W::x(n, 0)).unwrap();
        let expect = W::x(n, 0).mul(&W::d(n, 0)).unwrap().add(&W::one(n)).unwrap();
        assert_eq!(prod, expect);
        assert_eq!(
            W::x(n, 0).mul(&W::d(n, 0)).unwrap(),
            W::monomial(MultiIndex::unit(n, 0), MultiIndex::unit(n, 0), int(1))
        );
        // ∂₁ x² commutes.
        assert_eq!(
            W::d(n, 0).mul(&W::x(n, 1)).unwrap(),
            W::x(n, 1).mul(&W::d(n, 0)).unwrap()
        );
    }

    #[test]
    fn e_commutator_with_x_raises_index() {
        for m in [Metric::euclidean(3).unwrap(), Metric::minkowski(4).unwrap()] {
            let t = sl2(&m);
            for b in 0..m.n() {
                let c = t.e.commutator(&W::x(m.n(), b)).unwrap();
                assert_eq!(c, W::d_upper(&m, b));
            }
        }
    }

    #[test]
    fn h_normal_form() {
        let m = Metric::euclidean(3).unwrap();
        let t = sl2(&m);
        assert_eq!(t.h, h_element(3));
    }

    #[test]
    fn sl2_relations() {
        for m in [Metric::euclidean(3).unwrap(), Metric::minkowski(4).unwrap()] {
            let t = sl2(&m);
            assert_eq!(t.h.commutator(&t.e).unwrap(), t.e.scale(&int(2)));
            assert_eq!(t.h.commutator(&t.f).unwrap(), t.f.scale(&int(-2)));
            assert_eq!(t.e.commutator(&t.f).unwrap(), t.h.neg());
        }
    }

    #[test]
    fn star_examples() {
        let n = 3;
        assert_eq!(W::x(n, 0).star(), W::d(n, 0));
        let m = Metric::minkowski(3).unwrap();
        let t = sl2(&m);
        assert_eq!(t.e.star(), t.f);
        assert_eq!(t.f.star(), t.e);
        assert_eq!(t.h.star(), t.h);
    }

    #[test]
    fn apply_examples() {
        let n = 3;
        let x1 = Poly::var(n, 0);
        let x1d1 = W::x(n, 0).mul(&W::d(n, 0)).unwrap();
        assert_eq!(x1d1.apply(&x1).unwrap(), x1);
        let m = Metric::euclidean(3).unwrap();
        let t = sl2(&m);
        let r2 = radius_squared(&m);
        assert_eq!(t.e.apply(&r2).unwrap(), Poly::constant(n, rat(3, 1)));
    }

    #[test]
    fn ad_power_examples() {
        let m = Metric::euclidean(3).unwrap();
        let t = sl2(&m);
        let x0 = W::x(3, 0);
        assert_eq!(t.e.ad_power(0, &x0).unwrap(), x0);
        assert_eq!(t.e.ad_power(1, &x0).unwrap(), W::d_upper(&m, 0));
        // (ad E')²(x^a x^b) = 2∂^a∂^b
        let x01 = x0.mul(&W::x(3, 1)).unwrap();
        let d01 = W::d(3, 0).mul(&W::d(3, 1)).unwrap().scale(&int(2));
        assert_eq!(t.e.ad_power(2, &x01).unwrap(), d01);
        assert!(t.e.ad_power(3, &x01).unwrap().is_zero());
        let one = Poly::one(3);
        assert!(t.e.ad_power(2, &x01).unwrap().apply(&one).unwrap().is_zero());
    }

    #[test]
    fn localized_coefficients_commute_by_degree() {
        let n = 3;
        let h = WeylElement::<RationalFn>::scalar(n, RationalFn::h());
        let x = WeylElement::<RationalFn>::x(n, 1);
        // x^a H = (H + 1) x^a
        let lhs = x.mul(&h).unwrap();
        let hp1 = RationalFn::h() + RationalFn::one();
        assert_eq!(lhs, x.lmul(&hp1));
        // H ∂_a = ∂_a (H + 1)
        let d = WeylElement::<RationalFn>::d(n, 2);
        assert_eq!(
            h.mul(&d).unwrap(),
            d.mul(&WeylElement::scalar(n, hp1)).unwrap()
        );
    }

    #[test]
    fn unsubstituted_coefficients_refused() {
        let w = WeylElement::<RationalFn>::scalar(3, RationalFn::h());
        assert_eq!(w.apply_numeric(&Poly::one(3)), Err(Error::Unsubstituted));
        assert_eq!(w.apply(&Poly::one(3)).unwrap(), Poly::constant(3, rat(-3, 2)));
    }
}
