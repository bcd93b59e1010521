//! Sparse multivariate polynomials in `x¹…xⁿ` and the constant-coefficient
//! differential operators acting on them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::scalars::{int, rat, Coeff, Rational};

/// Exponent vector `α ∈ ℤ≥0ⁿ`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, a: usize) -> Self {
        let mut v = vec![0; n];
        v[a] = 1;
        MultiIndex(v)
    }

    /// Exponent vector of the (0-based) word `a₁…a_ℓ`.
    pub fn from_word(n: usize, word: &[usize]) -> Self {
        let mut v = vec![0; n];
        for &a in word {
            v[a] += 1;
        }
        MultiIndex(v)
    }

    /// Sorted word with this exponent vector.
    pub fn to_word(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(a, &e)| std::iter::repeat_n(a, e as usize))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise maximum.
    pub fn lcm(&self, o: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn inc(&self, a: usize) -> Self {
        let mut v = self.clone();
        v.0[a] += 1;
        v
    }

    pub fn dec(&self, a: usize) -> Option<Self> {
        let mut v = self.clone();
        v.0[a] = v.0[a].checked_sub(1)?;
        Some(v)
    }

    /// `α₁!⋯αₙ!`
    pub fn factorial(&self) -> Rational {
        self.0
            .iter()
            .map(|&e| (1..=e as i64).map(int).product::<Rational>())
            .product()
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C: Coeff = Rational> {
    n: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero(n: usize) -> Self {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zero(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, C::one())
    }

    /// The coordinate `x^a` (0-based).
    pub fn var(n: usize, a: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, a), C::one())
    }

    pub fn monomial(exp: MultiIndex, c: C) -> Self {
        let n = exp.len();
        let mut p = Self::zero(n);
        p.add_term(exp, c);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Result<Self> {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::DimensionMismatch(e.len(), n));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &MultiIndex) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_dim(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch(self.n, o.n));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.clone().neg())
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let mut out = Self::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(e1.add(e2), c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.n);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.n);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.scale(r));
        }
        out
    }

    /// Multiplication by the monomial `x^α`.
    pub fn mul_monomial(&self, alpha: &MultiIndex) -> Self {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.add(alpha), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.total()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.total());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Degree of a homogeneous polynomial (zero counts as degree 0).
    pub fn homogeneous_degree(&self) -> Result<u32> {
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        Ok(self.degree().unwrap_or(0))
    }

    pub fn homogeneous_components(&self) -> BTreeMap<u32, Self> {
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        for (e, c) in &self.terms {
            out.entry(e.total())
                .or_insert_with(|| Self::zero(self.n))
                .terms
                .insert(e.clone(), c.clone());
        }
        out
    }

    /// `∂_a` (0-based).
    pub fn partial(&self, a: usize) -> Result<Self> {
        if a >= self.n {
            return Err(Error::IndexOutOfRange {
                index: a + 1,
                n: self.n,
            });
        }
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let k = e.0[a];
            if k == 0 {
                continue;
            }
            out.add_term(e.dec(a).unwrap(), c.scale(&int(k as i64)));
        }
        Ok(out)
    }

    /// `∂^β` applied as iterated partials.
    pub fn partial_multi(&self, beta: &MultiIndex) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let Some(rest) = e.checked_sub(beta) else {
                continue;
            };
            // e!/(e-β)! per coordinate
            let mut f = Rational::one();
            for (ei, bi) in e.0.iter().zip(&beta.0) {
                for j in 0..*bi {
                    f *= int((ei - j) as i64);
                }
            }
            out.add_term(rest, c.scale(&f));
        }
        out
    }

    /// Raised derivative `∂^a = η^{ab} ∂_b`.
    pub fn partial_upper(&self, m: &Metric, a: usize) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for b in 0..self.n {
            let g = m.upper(a, b);
            if g.is_zero() {
                continue;
            }
            out = out.try_add(&self.partial(b)?.scale_rational(g))?;
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Lexicographically largest stored exponent.
    pub fn leading(&self) -> Option<(&MultiIndex, &C)> {
        self.terms.iter().next_back()
    }
}

impl Poly<Rational> {
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.0.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (&k, x)| acc * num_traits::pow(x.clone(), k as usize))
            })
            .sum()
    }

    /// LaTeX rendering with `x^{a}` superscripts and `\frac` coefficients.
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    if k == 1 {
                        format!("x^{{{}}}", v + 1)
                    } else {
                        format!("(x^{{{}}})^{{{}}}", v + 1, k)
                    }
                })
                .collect();
            let coeff = if a.is_integer() {
                a.numer().to_string()
            } else {
                format!("\\frac{{{}}}{{{}}}", a.numer(), a.denom())
            };
            if mono.is_empty() {
                out.push_str(&coeff);
            } else {
                if !a.is_one() {
                    out.push_str(&coeff);
                    out.push(' ');
                }
                out.push_str(&mono.join(" "));
            }
        }
        out
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    if k == 1 {
                        format!("x{}", v + 1)
                    } else {
                        format!("x{}^{}", v + 1, k)
                    }
                })
                .collect();
            // rational coefficients fold their sign into the separator
            let (neg, coeff) = match c.as_rational() {
                Some(r) => (r.is_negative(), r.abs().to_string()),
                None => (false, format!("({c})")),
            };
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if mono.is_empty() {
                out.push_str(&coeff);
            } else {
                if coeff != "1" {
                    out.push_str(&coeff);
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        write!(f, "{out}")
    }
}

impl<C: Coeff> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly {
            n: self.n,
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

// Operator impls panic on a dimension mismatch; the `try_*` methods report it.
impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, o: &Poly<C>) -> Poly<C> {
        self.try_add(o).expect("dimension mismatch")
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, o: &Poly<C>) -> Poly<C> {
        self.try_sub(o).expect("dimension mismatch")
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: &Poly<C>) -> Poly<C> {
        self.try_mul(o).expect("dimension mismatch")
    }
}

/// `Σ_{a,b} η^{ab} ∂_a ∂_b p`
pub fn apply_box<C: Coeff>(m: &Metric, p: &Poly<C>) -> Result<Poly<C>> {
    if m.n() != p.n() {
        return Err(Error::DimensionMismatch(m.n(), p.n()));
    }
    let n = m.n();
    let mut out = Poly::zero(n);
    for a in 0..n {
        let da = p.partial(a)?;
        if da.is_zero() {
            continue;
        }
        for b in 0..n {
            let g = m.upper(a, b);
            if g.is_zero() {
                continue;
            }
            out = out.try_add(&da.partial(b)?.scale_rational(g))?;
        }
    }
    Ok(out)
}

/// `x_b x^b = Σ η_{ab} x^a x^b`
pub fn radius_squared(m: &Metric) -> Poly {
    let n = m.n();
    let mut out = Poly::zero(n);
    for a in 0..n {
        for b in 0..n {
            let g = m.lower(a, b);
            if !g.is_zero() {
                out.add_term(MultiIndex::unit(n, a).add(&MultiIndex::unit(n, b)), g.clone());
            }
        }
    }
    out
}

/// Lowered coordinate `x_a = η_{ab} x^b`.
pub fn lowered_var(m: &Metric, a: usize) -> Poly {
    let n = m.n();
    let mut out = Poly::zero(n);
    for b in 0..n {
        out.add_term(MultiIndex::unit(n, b), m.lower(a, b).clone());
    }
    out
}

/// Eigenvalue `-d - n/2` of `H` on homogeneous polynomials of degree `d`.
pub fn h_eigenvalue(d: i64, n: usize) -> Rational {
    int(-d) - rat(n as i64, 2)
}

/// All exponent vectors of total degree `d` in `n` variables, in
/// lexicographically decreasing order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// Euler operator `Σ_a x^a ∂_a`.
pub fn euler<C: Coeff>(p: &Poly<C>) -> Poly<C> {
    let mut out = Poly::zero(p.n());
    for (e, c) in p.terms() {
        out.add_term(e.clone(), c.scale(&int(e.total() as i64)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, a: usize) -> Poly {
        Poly::var(n, a)
    }

    #[test]
    fn arithmetic() {
        let n = 3;
        let x1 = x(n, 0);
        let x2 = x(n, 1);
        assert_eq!(&x1 * &x1, Poly::monomial(MultiIndex(vec![2, 0, 0]), int(1)));
        let diff = &(&x1 + &x2) * &(&x1 - &x2);
        assert_eq!(diff, &(&x1 * &x1) - &(&x2 * &x2));
        let x1x2 = &x(4, 0) * &x(4, 1);
        assert_eq!(
            x1x2.scale(&rat(-1, 4)),
            Poly::monomial(MultiIndex(vec![1, 1, 0, 0]), rat(-1, 4))
        );
        assert_eq!(x(3, 0).try_add(&x(4, 0)), Err(Error::DimensionMismatch(3, 4)));
    }

    #[test]
    fn partials() {
        let x1 = x(3, 0);
        assert_eq!((&x1 * &x1).partial(0).unwrap(), x1.scale(&int(2)));
        assert!(x1.partial(1).unwrap().is_zero());
        let p = &(&x1 * &x(3, 1)) * &x(3, 2);
        assert_eq!(p.partial(0).unwrap(), &x(3, 1) * &x(3, 2));
        assert!(matches!(x1.partial(3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn box_examples() {
        let e = Metric::euclidean(3).unwrap();
        let p = &(&x(3, 0) * &x(3, 0)) - &(&x(3, 1) * &x(3, 1));
        assert!(apply_box(&e, &p).unwrap().is_zero());
        let q = &x(3, 0) * &x(3, 0);
        assert_eq!(apply_box(&e, &q).unwrap(), Poly::constant(3, int(2)));
        let mk = Metric::minkowski(4).unwrap();
        let prod = &(&(&x(4, 0) * &x(4, 1)) * &x(4, 2)) * &x(4, 3);
        assert!(apply_box(&mk, &prod).unwrap().is_zero());
    }

    #[test]
    fn radius_examples() {
        let e = Metric::euclidean(3).unwrap();
        let expect = &(&(&x(3, 0) * &x(3, 0)) + &(&x(3, 1) * &x(3, 1))) + &(&x(3, 2) * &x(3, 2));
        assert_eq!(radius_squared(&e), expect);
        let mk = Metric::minkowski(3).unwrap();
        let expect = &(&(&x(3, 0) * &x(3, 0)) - &(&x(3, 1) * &x(3, 1))) - &(&x(3, 2) * &x(3, 2));
        assert_eq!(radius_squared(&mk), expect);
        let swap = Metric::new(vec![
            vec![int(0), int(1), int(0)],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap();
        let expect = &(&x(3, 0) * &x(3, 1)).scale(&int(2)) + &(&x(3, 2) * &x(3, 2));
        assert_eq!(radius_squared(&swap), expect);
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(h_eigenvalue(0, 3), rat(-3, 2));
        assert_eq!(h_eigenvalue(2, 4), int(-4));
        assert_eq!(h_eigenvalue(5, 3), rat(-13, 2));
    }

    #[test]
    fn homogeneity_checked() {
        let p = &x(3, 0) + &Poly::one(3);
        assert_eq!(p.homogeneous_degree(), Err(Error::NotHomogeneous));
        assert_eq!(p.homogeneous_components().len(), 2);
    }

    #[test]
    fn latex() {
        let p = &(&x(3, 0) * &x(3, 0)) - &x(3, 1).scale(&rat(1, 3));
        assert_eq!(p.to_latex(), "(x^{1})^{2} - \\frac{1}{3} x^{2}");
    }
}
