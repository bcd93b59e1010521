//! The extremal projector of `sl₂` in the oscillator realisation.
//!
//! With `E' = ½∂_a∂^a` and `F' = ½x_a x^a` the projector on a coset `w + I₊`
//! reads `P(w) = Σ_k (1/k!) f_k(H) F'^k (ad E')^k (w)` where
//! `f_k(H) = 1/((H+2)(H+3)⋯(H+1+k))`. The signs `(-1)^k` of the standard
//! series cancel against the squared imaginary units dropped from `E`, `F`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::poly::{h_eigenvalue, radius_squared, MultiIndex, Poly};
use crate::scalars::{int, rat, shifted_product, Coeff, Rational, RationalFn, UPoly};
use crate::weyl::{sl2, WeylElement};

/// `f_k(H) = 1/((H+2)(H+3)⋯(H+1+k))`, `f_0 = 1`.
pub fn f_coeff(k: u32) -> RationalFn {
    RationalFn::new(
        UPoly::constant(Rational::one()),
        shifted_product(2, 1 + k as i64),
    )
    .expect("nonzero product")
}

/// `ψ_k(H) = (H+2-2k)(H+3-2k)⋯(H+1-k)`, the polynomial the two-sided series
/// divides by; `ψ_k(H + 2k) = 1/f_k(H)`.
pub fn psi_coeff(k: u32) -> RationalFn {
    let k = k as i64;
    RationalFn::poly(shifted_product(2 - 2 * k, 1 - k))
}

fn factorial(k: u32) -> Rational {
    (1..=k as i64).map(int).product()
}

/// Truncated coefficient sequence of the projector.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorSeries {
    pub max_k: u32,
    pub terms: Vec<(u32, RationalFn)>,
}

impl ProjectorSeries {
    pub fn new(max_k: u32) -> Self {
        ProjectorSeries {
            max_k,
            terms: (0..=max_k).map(|k| (k, f_coeff(k))).collect(),
        }
    }
}

fn x_word(n: usize, word: &[usize]) -> WeylElement {
    WeylElement::monomial(MultiIndex::from_word(n, word), MultiIndex::zero(n), Rational::one())
}

fn check_word(m: &Metric, word: &[usize]) -> Result<()> {
    word.iter().try_for_each(|&a| m.check_index(a))
}

/// The state `|a₁⋯a_ℓ⟩ = P(x^{a₁}⋯x^{a_ℓ} + I₊)·1`, with `H` replaced by its
/// eigenvalue `-ℓ - n/2` up front.
///
/// `(ad E')^k(w)·1` vanishes once `2k > ℓ`, so the sum stops at `⌊ℓ/2⌋`.
pub fn project_word(m: &Metric, word: &[usize]) -> Result<Poly> {
    check_word(m, word)?;
    let n = m.n();
    let l = word.len();
    let t = sl2(m);
    let h0 = h_eigenvalue(l as i64, n);
    let half_r2 = radius_squared(m).scale(&rat(1, 2));
    let one = Poly::one(n);
    let mut ad = x_word(n, word);
    let mut out = Poly::zero(n);
    for k in 0..=(l / 2) as u32 {
        if k > 0 {
            ad = t.e.commutator(&ad)?;
        }
        let fk = f_coeff(k).eval(&h0)?;
        let lowered = ad.apply(&one)?;
        let term = (&half_r2.pow(k) * &lowered).scale(&(fk / factorial(k)));
        out = out.try_add(&term)?;
    }
    Ok(out)
}

/// Projection of an arbitrary polynomial onto the solution space,
/// `Σ_k (1/k!) f_k(H) F'^k E'^k p` on each homogeneous component.
pub fn project_poly(m: &Metric, p: &Poly) -> Result<Poly> {
    let n = m.n();
    if p.n() != n {
        return Err(Error::DimensionMismatch(n, p.n()));
    }
    let t = sl2(m);
    let half_r2 = radius_squared(m).scale(&rat(1, 2));
    let mut out = Poly::zero(n);
    for (d, comp) in p.homogeneous_components() {
        let h0 = h_eigenvalue(d as i64, n);
        let mut lowered = comp.clone();
        for k in 0..=d / 2 {
            if k > 0 {
                lowered = t.e.apply(&lowered)?;
            }
            if lowered.is_zero() {
                break;
            }
            let fk = f_coeff(k).eval(&h0)?;
            let term = (&half_r2.pow(k) * &lowered).scale(&(fk / factorial(k)));
            out = out.try_add(&term)?;
        }
    }
    Ok(out)
}

/// Coset representative of `P(w + I₊)` in the localised algebra with all
/// `H`-dependence kept symbolic on the far left.
pub fn project_general(m: &Metric, w: &WeylElement) -> Result<WeylElement<RationalFn>> {
    let n = m.n();
    if w.n() != n {
        return Err(Error::DimensionMismatch(n, w.n()));
    }
    let t = sl2(m);
    let mut ad = w.clone();
    let mut f_pow = WeylElement::one(n);
    let mut out = WeylElement::<RationalFn>::zero(n);
    // (ad E')^k lowers the x-degree of every term by at least one.
    for k in 0..=w.x_degree() {
        if k > 0 {
            ad = t.e.commutator(&ad)?;
            f_pow = f_pow.mul(&t.f)?;
        }
        if ad.is_zero() {
            break;
        }
        let body = f_pow.mul(&ad)?.scale(&factorial(k).recip()).localize();
        out = out.add(&body.lmul(&f_coeff(k)))?;
    }
    Ok(out)
}

/// Representative of the diamond product `w̄ ⋄ z̄ = w P z`:
/// `Σ_k ((-1)^k/k!) (ad F')^k(w) ψ_k(H)⁻¹ (ad E')^k(z)`.
///
/// The left factor may carry `H`-dependent coefficients; the right factor
/// must be numeric so that the series terminates.
pub fn diamond(
    m: &Metric,
    w: &WeylElement<RationalFn>,
    z: &WeylElement,
) -> Result<WeylElement<RationalFn>> {
    let n = m.n();
    if w.n() != n || z.n() != n {
        return Err(Error::DimensionMismatch(n, w.n().max(z.n())));
    }
    let t = sl2(m);
    let f = t.f.localize();
    let mut left = w.clone();
    let mut right = z.clone();
    let mut out = WeylElement::<RationalFn>::zero(n);
    for k in 0..=z.x_degree() {
        if k > 0 {
            left = f.commutator(&left)?;
            right = t.e.commutator(&right)?;
        }
        if right.is_zero() || left.is_zero() {
            break;
        }
        let sign = if k % 2 == 0 { int(1) } else { int(-1) };
        let mid = WeylElement::scalar(n, psi_coeff(k).inv()?.scale(&(sign / factorial(k))));
        out = out.add(&left.mul(&mid)?.mul(&right.localize())?)?;
    }
    Ok(out)
}

/// Raising operator `x̃^a = x^a + (1/(H+2))·½x_b x^b ∂^a` acting on a
/// polynomial, `H` taken at the output degree.
pub fn raise(m: &Metric, a: usize, phi: &Poly) -> Result<Poly> {
    m.check_index(a)?;
    let n = m.n();
    if phi.n() != n {
        return Err(Error::DimensionMismatch(n, phi.n()));
    }
    let half_r2 = radius_squared(m).scale(&rat(1, 2));
    let mut out = phi.mul_monomial(&MultiIndex::unit(n, a));
    for (d, comp) in phi.homogeneous_components() {
        let du = comp.partial_upper(m, a)?;
        if du.is_zero() {
            continue;
        }
        let h0 = h_eigenvalue(d as i64 + 1, n);
        let c = RationalFn::inv_linear(int(2)).eval(&h0)?;
        out = out.try_add(&(&half_r2 * &du).scale(&c))?;
    }
    Ok(out)
}

/// `x̃^{a₁}(x̃^{a₂}(⋯ x̃^{a_ℓ}·1))`
pub fn raise_word(m: &Metric, word: &[usize]) -> Result<Poly> {
    let mut p = Poly::one(m.n());
    for &a in word.iter().rev() {
        p = raise(m, a, &p)?;
    }
    Ok(p)
}

/// `P(x^{a₁}⋯x^{a_ℓ} + I₊)·1` through [`project_general`], substituting `H`
/// only at the end.
pub fn project_word_symbolic(m: &Metric, word: &[usize]) -> Result<Poly> {
    check_word(m, word)?;
    let w = x_word(m.n(), word);
    project_general(m, &w)?.apply(&Poly::one(m.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::apply_box;

    #[test]
    fn f_examples() {
        assert_eq!(f_coeff(0), RationalFn::one());
        assert_eq!(f_coeff(1), RationalFn::inv_linear(int(2)));
        for n in 3..=6i64 {
            let h0 = h_eigenvalue(4, n as usize);
            let expect = (rat(-4 - n, 2) * rat(-2 - n, 2)).recip();
            assert_eq!(f_coeff(2).eval(&h0).unwrap(), expect);
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_coeff(0), RationalFn::one());
        assert_eq!(psi_coeff(1), RationalFn::h());
        for k in 0..=4 {
            let shifted = psi_coeff(k).shift(&int(2 * k as i64));
            assert_eq!(shifted, f_coeff(k).inv().unwrap());
        }
    }

    #[test]
    fn f_moves_past_f_power_as_inverse_psi() {
        // f_k(H) F'^k = F'^k ψ_k(H)^{-1}
        let m = Metric::euclidean(3).unwrap();
        let f = sl2(&m).f.localize();
        for k in 1..=3u32 {
            let fk = f.pow(k).unwrap();
            let lhs = WeylElement::scalar(3, f_coeff(k)).mul(&fk).unwrap();
            let rhs = fk
                .mul(&WeylElement::scalar(3, psi_coeff(k).inv().unwrap()))
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn series_table() {
        let s = ProjectorSeries::new(3);
        assert_eq!(s.terms.len(), 4);
        assert_eq!(s.terms[0].1, RationalFn::one());
    }

    #[test]
    fn small_words() {
        let m = Metric::euclidean(3).unwrap();
        assert_eq!(project_word(&m, &[]).unwrap(), Poly::one(3));
        assert_eq!(project_word(&m, &[1]).unwrap(), Poly::var(3, 1));
        for a in 0..3 {
            for b in 0..3 {
                let got = project_word(&m, &[a, b]).unwrap();
                let mut expect = &Poly::var(3, a) * &Poly::var(3, b);
                if a == b {
                    expect = &expect - &radius_squared(&m).scale(&rat(1, 3));
                }
                assert_eq!(got, expect);
            }
        }
        assert!(project_word(&m, &[3]).is_err());
    }

    #[test]
    fn raising_operator_representative() {
        let m = Metric::minkowski(4).unwrap();
        let n = 4;
        for a in 0..n {
            let got = project_general(&m, &WeylElement::x(n, a)).unwrap();
            let t = sl2(&m);
            let expect = WeylElement::x(n, a)
                .localize()
                .add(
                    &t.f.mul(&WeylElement::d_upper(&m, a))
                        .unwrap()
                        .localize()
                        .lmul(&RationalFn::inv_linear(int(2))),
                )
                .unwrap();
            assert_eq!(got, expect);
            // ∂_a is already extremal.
            let d = WeylElement::d(n, a);
            assert_eq!(project_general(&m, &d).unwrap(), d.localize());
        }
    }

    #[test]
    fn projector_kills_f_multiples() {
        let m = Metric::euclidean(3).unwrap();
        let t = sl2(&m);
        let w = t.f.mul(&WeylElement::x(3, 0)).unwrap();
        let p = project_general(&m, &w).unwrap();
        for phi in [Poly::one(3), Poly::var(3, 2), project_word(&m, &[0, 1]).unwrap()] {
            assert!(p.apply(&phi).unwrap().is_zero());
        }
    }

    #[test]
    fn symbolic_and_substituted_paths_agree() {
        let m = Metric::minkowski(3).unwrap();
        for word in [vec![], vec![0], vec![0, 1], vec![1, 1, 2], vec![0, 0, 1, 2]] {
            let a = project_word(&m, &word).unwrap();
            assert_eq!(project_word_symbolic(&m, &word).unwrap(), a);
            assert_eq!(raise_word(&m, &word).unwrap(), a);
            assert!(apply_box(&m, &a).unwrap().is_zero());
        }
    }

    #[test]
    fn diamond_of_d_and_x() {
        let m = Metric::euclidean(3).unwrap();
        let got = diamond(&m, &WeylElement::d(3, 0).localize(), &WeylElement::x(3, 0)).unwrap();
        // ∂x + x_a (1/H) ∂^a = 1 + x∂ + (1/(H+1)) x∂ in the first coordinate
        let x1d1 = WeylElement::<RationalFn>::monomial(
            MultiIndex::unit(3, 0),
            MultiIndex::unit(3, 0),
            RationalFn::one() + RationalFn::inv_linear(int(1)),
        );
        assert_eq!(got, x1d1.add(&WeylElement::one(3)).unwrap());
    }
}
