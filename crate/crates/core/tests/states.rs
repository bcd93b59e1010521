use kgred::poly::{apply_box, monomials_of_degree};
use kgred::projector::{project_word, project_word_symbolic, raise_word};
use kgred::scalars::{int, rat};
use kgred::states::*;
use kgred::{Metric, MultiIndex, Poly, Rational, WeylElement};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn metrics(n: usize, seed: u64, random: usize) -> Vec<Metric> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Metric::euclidean(n).unwrap(), Metric::minkowski(n).unwrap()];
    for _ in 0..random {
        out.push(Metric::random(n, &mut rng).unwrap());
    }
    out
}

fn x(n: usize, a: usize) -> Poly {
    Poly::var(n, a)
}

// r² = η_{ab} x^a x^b, built term by term.
fn r2(m: &Metric) -> Poly {
    let n = m.n();
    let mut p = Poly::zero(n);
    for a in 0..n {
        for b in 0..n {
            p = &p + &(&x(n, a) * &x(n, b)).scale(m.lower(a, b));
        }
    }
    p
}

fn c(n: usize, v: Rational) -> Poly {
    Poly::constant(n, v)
}

fn half_n(n: usize) -> Rational {
    rat(n as i64, 2)
}

#[test]
fn two_index_states() {
    for n in 3..=5 {
        for m in metrics(n, 7, 3) {
            for a in 0..n {
                for b in 0..n {
                    let expected = &(&x(n, a) * &x(n, b))
                        - &(&r2(&m) * &c(n, m.upper(a, b) / int(n as i64)));
                    let s = state_explicit(&m, &[a, b]).unwrap();
                    assert_eq!(s, expected);
                    assert!(apply_box(&m, &s).unwrap().is_zero());
                }
            }
        }
    }
}

#[test]
fn three_and_four_index_states() {
    for n in 3..=4 {
        for m in metrics(n, 11, 1) {
            let half_r2 = r2(&m).scale(&rat(1, 2));
            let f1_3 = (int(-1) - half_n(n)).recip();
            let f1_4 = (int(-2) - half_n(n)).recip();
            let f2_4 = ((int(-2) - half_n(n)) * (int(-1) - half_n(n))).recip();
            for w in [[0, 1, 2], [0, 0, 1], [2, 2, 2]] {
                let [a, b, cc] = w;
                let eta_x = &(&c(n, m.upper(a, b).clone()) * &x(n, cc))
                    + &(&(&c(n, m.upper(a, cc).clone()) * &x(n, b))
                        + &(&c(n, m.upper(b, cc).clone()) * &x(n, a)));
                let expected = &(&(&x(n, a) * &x(n, b)) * &x(n, cc))
                    + &(&half_r2 * &eta_x).scale(&f1_3);
                let s = state_explicit(&m, &w).unwrap();
                assert_eq!(s, expected, "word {w:?}");
                assert!(apply_box(&m, &s).unwrap().is_zero());
            }
            for w in [[0, 1, 2, 0], [1, 1, 1, 1], [0, 1, 1, 2]] {
                let xs = |i: usize, j: usize| &x(n, w[i]) * &x(n, w[j]);
                let mut one_pair = Poly::zero(n);
                let mut two_pairs = Rational::zero();
                let idx = [0, 1, 2, 3];
                for i in 0..4 {
                    for j in i + 1..4 {
                        let rest: Vec<usize> =
                            idx.iter().copied().filter(|&k| k != i && k != j).collect();
                        one_pair = &one_pair
                            + &xs(rest[0], rest[1]).scale(m.upper(w[i], w[j]));
                    }
                }
                for (p, q) in [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))] {
                    two_pairs += m.upper(w[p.0], w[p.1]) * m.upper(w[q.0], w[q.1]);
                }
                let expected = &(&(&xs(0, 1) * &xs(2, 3)) + &(&half_r2 * &one_pair).scale(&f1_4))
                    + &half_r2.pow(2).scale(&(f2_4.clone() * two_pairs));
                let s = state_explicit(&m, &w).unwrap();
                assert_eq!(s, expected, "word {w:?}");
                assert!(apply_box(&m, &s).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn closed_form_projector_and_raising_agree() {
    for n in 3..=4 {
        for m in metrics(n, 3, 2) {
            for l in 0..=5 {
                for w in sorted_words(n, l) {
                    let s = state_explicit(&m, &w).unwrap();
                    assert_eq!(s, project_word(&m, &w).unwrap(), "{w:?}");
                    if l <= 3 {
                        assert_eq!(s, raise_word(&m, &w).unwrap(), "{w:?}");
                        assert_eq!(s, project_word_symbolic(&m, &w).unwrap(), "{w:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn states_are_symmetric_in_their_word() {
    let m = metrics(4, 5, 1).pop().unwrap();
    let w = [0, 3, 1, 3];
    let base = state_explicit(&m, &w).unwrap();
    for p in [[3, 0, 1, 3], [3, 3, 1, 0], [1, 3, 0, 3]] {
        assert_eq!(state_explicit(&m, &p).unwrap(), base);
    }
}

#[test]
fn corrections_are_multiples_of_r2() {
    for m in metrics(3, 9, 1) {
        let n = m.n();
        for l in 2..=5 {
            for w in sorted_words(n, l) {
                let s = state_explicit(&m, &w).unwrap();
                let top = Poly::monomial(MultiIndex::from_word(n, &w), Rational::one());
                let rest = &s - &top;
                let quotient = divide_by(&rest, &r2(&m));
                assert_eq!(&quotient * &r2(&m), rest, "{w:?}");
            }
        }
    }
}

// Exact division of `p` by `d` in ℚ[x], assuming it divides.
fn divide_by(p: &Poly, d: &Poly) -> Poly {
    let n = p.n();
    let mut rem = p.clone();
    let mut q = Poly::zero(n);
    let (dl, dc) = {
        let (e, c) = d.leading().unwrap();
        (e.clone(), c.clone())
    };
    while let Some((e, c)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
        let Some(shift) = e.checked_sub(&dl) else {
            break;
        };
        let t = Poly::monomial(shift, c / &dc);
        q = &q + &t;
        rem = &rem - &(&t * d);
    }
    assert!(rem.is_zero(), "not divisible");
    q
}

#[test]
fn partial_matchings_are_counted() {
    for l in 0..=7 {
        for k in 0..=l / 2 {
            let all = enumerate_matchings(l, k);
            assert_eq!(all.len() as u128, matching_count(l, k));
            let mut seen = std::collections::HashSet::new();
            for pm in &all {
                assert!(seen.insert(pm.pairs.clone()));
                assert_eq!(pm.pairs.len(), k);
                assert_eq!(pm.singles.len(), l - 2 * k);
            }
        }
    }
    // 6!/(2^2 2! 2!) = 45
    assert_eq!(matching_count(6, 2), 45);
}

fn up(m: &Metric, a: usize) -> WeylElement {
    WeylElement::d_upper(m, a)
}

fn wx(n: usize, a: usize) -> WeylElement {
    WeylElement::x(n, a)
}

fn prod(items: &[WeylElement]) -> WeylElement {
    let n = items[0].n();
    items
        .iter()
        .fold(WeylElement::one(n), |acc, z| acc.mul(z).unwrap())
}

fn sum(items: &[WeylElement]) -> WeylElement {
    let n = items[0].n();
    items
        .iter()
        .fold(WeylElement::zero(n), |acc, z| acc.add(z).unwrap())
}

fn eta(m: &Metric, a: usize, b: usize) -> WeylElement {
    WeylElement::scalar(m.n(), m.upper(a, b).clone())
}

#[test]
fn length_three_degree_one_sums() {
    for m in metrics(3, 21, 1) {
        let n = m.n();
        let w = [0, 2, 2];
        let [a1, a2, a3] = w;
        let mixed = sum(&[
            prod(&[up(&m, a1), wx(n, a2), wx(n, a3)]),
            prod(&[wx(n, a1), up(&m, a2), wx(n, a3)]),
            prod(&[wx(n, a1), wx(n, a2), up(&m, a3)]),
        ]);
        let ordered = sum(&[
            prod(&[wx(n, a1), wx(n, a2), up(&m, a3)]),
            prod(&[wx(n, a1), wx(n, a3), up(&m, a2)]),
            prod(&[wx(n, a2), wx(n, a3), up(&m, a1)]),
            prod(&[eta(&m, a1, a2), wx(n, a3)]),
            prod(&[eta(&m, a1, a3), wx(n, a2)]),
            prod(&[eta(&m, a2, a3), wx(n, a1)]),
        ]);
        assert_eq!(mixed_monomial_sum(&m, &w, 1).unwrap(), mixed);
        assert_eq!(ordered_monomial_sum(&m, &w, 1).unwrap(), ordered);
        assert_eq!(mixed, ordered);
    }
}

#[test]
fn length_four_degree_zero_sums() {
    let m = metrics(4, 2, 1).pop().unwrap();
    let n = 4;
    let (d, xx, e) = (|a| up(&m, a), |a| wx(n, a), |a, b| eta(&m, a, b));
    let mixed = sum(&[
        prod(&[d(0), d(1), xx(2), xx(3)]),
        prod(&[d(0), xx(1), d(2), xx(3)]),
        prod(&[d(0), xx(1), xx(2), d(3)]),
        prod(&[xx(0), d(1), d(2), xx(3)]),
        prod(&[xx(0), d(1), xx(2), d(3)]),
        prod(&[xx(0), xx(1), d(2), d(3)]),
    ]);
    let displayed = sum(&[
        prod(&[xx(0), xx(1), d(2), d(3)]),
        prod(&[xx(0), xx(2), d(1), d(3)]),
        prod(&[xx(0), xx(3), d(1), d(2)]),
        prod(&[xx(1), xx(2), d(0), d(3)]),
        prod(&[xx(1), xx(3), d(0), d(2)]),
        prod(&[xx(2), xx(3), d(0), d(1)]),
        prod(&[e(0, 1), xx(2), d(3)]),
        prod(&[e(0, 2), xx(1), d(3)]),
        prod(&[e(0, 3), xx(1), d(2)]),
        prod(&[e(1, 2), xx(0), d(3)]),
        prod(&[e(1, 3), xx(0), d(2)]),
        prod(&[e(2, 3), xx(0), d(1)]),
        prod(&[e(0, 1), xx(3), d(2)]),
        prod(&[e(0, 2), xx(3), d(1)]),
        prod(&[e(0, 3), xx(2), d(1)]),
        prod(&[e(1, 2), xx(3), d(0)]),
        prod(&[e(1, 3), xx(2), d(0)]),
        prod(&[e(2, 3), xx(1), d(0)]),
    ]);
    let w = [0, 1, 2, 3];
    assert_eq!(mixed_monomial_sum(&m, &w, 0).unwrap(), mixed);
    assert_eq!(ordered_monomial_sum_upto(&m, &w, 0, 1).unwrap(), displayed);
    let constants = sum(&[
        prod(&[e(0, 1), e(2, 3)]),
        prod(&[e(0, 2), e(1, 3)]),
        prod(&[e(0, 3), e(1, 2)]),
    ]);
    assert_eq!(mixed, displayed.add(&constants).unwrap());
    assert_eq!(ordered_monomial_sum(&m, &w, 0).unwrap(), mixed);
}

#[test]
fn mixed_and_ordered_sums_agree() {
    for n in 3..=4 {
        for m in metrics(n, 13, 1) {
            for l in 0..=4 {
                for w in sorted_words(n, l).into_iter().step_by(3) {
                    for d in -(l as i64)..=(l as i64) {
                        assert_eq!(
                            mixed_monomial_sum(&m, &w, d).unwrap(),
                            ordered_monomial_sum(&m, &w, d).unwrap(),
                            "{w:?} d={d}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn lift_reproduces_harmonic_polynomials() {
    for m in metrics(3, 17, 1) {
        for d in 0..=4 {
            for phi in harmonic_basis(&m, d).unwrap() {
                assert_eq!(lift_and_apply(&m, &phi).unwrap(), phi);
                let (e, v) = descend_to_constant(&phi).unwrap();
                assert_eq!(phi.partial_multi(&e), Poly::constant(3, v));
            }
        }
        let not_harmonic = &x(3, 0) * &x(3, 0);
        assert!(lift_and_apply(&m, &not_harmonic).is_err());
        let mixed = &x(3, 0) + &Poly::one(3);
        assert!(lift_and_apply(&m, &mixed).is_err());
        assert!(descend_to_constant(&Poly::zero(3)).is_err());
    }
}

#[test]
fn states_span_the_solution_space() {
    for n in 3..=4 {
        for m in metrics(n, 1, 1) {
            for d in 0..=4 {
                let rep = spanning_check(&m, d).unwrap();
                assert!(rep.passed(), "{rep:?}");
                assert_eq!(rep.expected_dim, harmonic_dimension(n, d));
            }
        }
    }
    // 2d+1 for n = 3
    for d in 0..6 {
        assert_eq!(harmonic_dimension(3, d), 2 * d + 1);
    }
    assert_eq!(monomials_of_degree(4, 2).len(), 10);
}

#[test]
fn word_io_is_one_based() {
    let w = Word::from_one_based(&[2, 1, 3]).unwrap();
    assert_eq!(w.indices(), &[1, 0, 2]);
    assert_eq!(w.to_string(), "|213⟩");
    assert_eq!(serde_json::to_string(&w).unwrap(), "[2,1,3]");
    assert!(Word::from_one_based(&[0]).is_err());
    let m = Metric::euclidean(3).unwrap();
    assert!(Word::from_one_based(&[4]).unwrap().check(&m).is_err());
    assert!(state_explicit(&m, &[3]).is_err());
}
