//! Flat metrics: a constant nondegenerate symmetric matrix `η_{ab}` together
//! with its inverse `η^{ab}`.

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalars::{int, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Metric {
    n: usize,
    eta: Matrix,
    eta_inv: Matrix,
}

impl Metric {
    pub fn new(eta: Matrix) -> Result<Self> {
        let n = eta.len();
        if eta.iter().any(|row| row.len() != n) {
            return Err(Error::NotSquare);
        }
        if n < 3 {
            return Err(Error::DimensionBelow3(n));
        }
        for a in 0..n {
            for b in 0..a {
                if eta[a][b] != eta[b][a] {
                    return Err(Error::NonSymmetric);
                }
            }
        }
        let eta_inv = linalg::inverse(&eta).ok_or(Error::DegenerateMetric)?;
        Ok(Metric { n, eta, eta_inv })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::preset("euclidean", n)
    }

    pub fn minkowski(n: usize) -> Result<Self> {
        Self::preset("minkowski", n)
    }

    pub fn preset(name: &str, n: usize) -> Result<Self> {
        let diag: Vec<Rational> = match name {
            "euclidean" => vec![Rational::one(); n],
            "minkowski" => (0..n).map(|i| if i == 0 { int(1) } else { int(-1) }).collect(),
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        Self::diagonal(diag)
    }

    pub fn diagonal(diag: Vec<Rational>) -> Result<Self> {
        let n = diag.len();
        let mut eta = vec![vec![Rational::zero(); n]; n];
        for (i, d) in diag.into_iter().enumerate() {
            eta[i][i] = d;
        }
        Self::new(eta)
    }

    /// Identity plus a random symmetric perturbation with entries in
    /// `[-2, 2]` (denominators up to 3); singular draws are rejected.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 3 {
            return Err(Error::DimensionBelow3(n));
        }
        loop {
            let mut eta = linalg::identity(n);
            for a in 0..n {
                for b in a..n {
                    let q = rng.gen_range(1..=3);
                    let p = rng.gen_range(-2 * q..=2 * q);
                    let v = rat(p, q);
                    eta[a][b] += &v;
                    if a != b {
                        eta[b][a] += v;
                    }
                }
            }
            if let Ok(m) = Self::new(eta) {
                return Ok(m);
            }
        }
    }

    /// Random diagonal metric with nonzero entries `±p/q`, `p, q ∈ 1..=3`.
    pub fn random_diagonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let diag = (0..n)
            .map(|_| {
                let p = rng.gen_range(1..=3);
                let q = rng.gen_range(1..=3);
                let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                rat(s * p, q)
            })
            .collect();
        Self::diagonal(diag)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `η_{ab}` (0-based indices).
    pub fn lower(&self, a: usize, b: usize) -> &Rational {
        &self.eta[a][b]
    }

    /// `η^{ab}` (0-based indices).
    pub fn upper(&self, a: usize, b: usize) -> &Rational {
        &self.eta_inv[a][b]
    }

    pub fn eta(&self) -> &Matrix {
        &self.eta
    }

    pub fn eta_inv(&self) -> &Matrix {
        &self.eta_inv
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| a == b || self.eta[a][b].is_zero()))
    }

    /// The metric with `η_{ab}` and `η^{ab}` exchanged.
    pub fn inverse(&self) -> Metric {
        Metric {
            n: self.n,
            eta: self.eta_inv.clone(),
            eta_inv: self.eta.clone(),
        }
    }

    pub fn check_index(&self, a: usize) -> Result<()> {
        if a >= self.n {
            return Err(Error::IndexOutOfRange {
                index: a + 1,
                n: self.n,
            });
        }
        Ok(())
    }
}
