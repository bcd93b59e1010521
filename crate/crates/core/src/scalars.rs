//! Exact scalars: arbitrary-precision rationals and rational functions in the
//! single dynamical variable `H`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Coefficient field for polynomials and Weyl-algebra elements.
///
/// `shift_h` implements the commutation of a coefficient past a homogeneous
/// monomial of degree `k`: `m · c(H) = c(H + k) · m`. For plain rationals it is
/// the identity.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    fn from_rational(r: Rational) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    fn shift_h(&self, by: i64) -> Self;
    /// `Some` when the coefficient is a plain number.
    fn as_rational(&self) -> Option<Rational>;
    fn eval_at(&self, h: &Rational) -> Result<Rational>;
}

impl Coeff for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn shift_h(&self, _by: i64) -> Self {
        self.clone()
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn eval_at(&self, _h: &Rational) -> Result<Rational> {
        Ok(self.clone())
    }
}

/// Dense univariate polynomial in `H`, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct UPoly(Vec<Rational>);

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `H + c`
    pub fn linear(c: Rational) -> Self {
        UPoly(vec![c, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.0.last()
    }

    fn add(&self, o: &Self) -> Self {
        let len = self.0.len().max(o.0.len());
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            let a = self.0.get(i);
            let b = o.0.get(i);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Self::new(out)
    }

    fn neg(&self) -> Self {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UPoly::default();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return UPoly::default();
        }
        UPoly(self.0.iter().map(|c| c * r).collect())
    }

    fn monic(&self) -> (Self, Rational) {
        match self.lead() {
            None => (UPoly::default(), Rational::one()),
            Some(l) => {
                let l = l.clone();
                (self.scale(&l.recip()), l)
            }
        }
    }

    fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.0[dd].recip();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (UPoly::default(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = &rem[i] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.0.iter().enumerate() {
                let t = &c * dc;
                rem[i - dd + j] -= t;
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic gcd.
    fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic().0
    }

    /// `p(H + c)` by Horner's scheme.
    pub fn shift(&self, c: &Rational) -> Self {
        if c.is_zero() || self.0.len() <= 1 {
            return self.clone();
        }
        let lin = UPoly::linear(c.clone());
        let mut acc = UPoly::default();
        for coeff in self.0.iter().rev() {
            acc = acc.mul(&lin).add(&UPoly::constant(coeff.clone()));
        }
        acc
    }

    pub fn eval(&self, h: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * h + c;
        }
        acc
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{var}")?,
                _ => write!(f, "{var}^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, "H")
    }
}

/// Rational function `num(H) / den(H)` in canonical form: coprime, monic
/// denominator, zero stored as `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFn {
    num: UPoly,
    den: UPoly,
}

impl RationalFn {
    pub fn new(num: UPoly, den: UPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: UPoly, den: UPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.degree() == Some(0) {
            let inv = den.0[0].recip();
            return RationalFn {
                num: num.scale(&inv),
                den: UPoly::constant(Rational::one()),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let (den, lead) = den.monic();
        RationalFn {
            num: num.scale(&lead.recip()),
            den,
        }
    }

    pub fn constant(c: Rational) -> Self {
        RationalFn {
            num: UPoly::constant(c),
            den: UPoly::constant(Rational::one()),
        }
    }

    /// The variable `H`.
    pub fn h() -> Self {
        Self::poly(UPoly::new(vec![Rational::zero(), Rational::one()]))
    }

    pub fn poly(p: UPoly) -> Self {
        RationalFn {
            num: p,
            den: UPoly::constant(Rational::one()),
        }
    }

    /// `1 / (H + c)`
    pub fn inv_linear(c: Rational) -> Self {
        RationalFn {
            num: UPoly::constant(Rational::one()),
            den: UPoly::linear(c),
        }
    }

    pub fn numer(&self) -> &UPoly {
        &self.num
    }

    pub fn denom(&self) -> &UPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        Ok(self.clone() * o.inv()?)
    }

    /// `g(H + c)`
    pub fn shift(&self, c: &Rational) -> Self {
        if c.is_zero() || (self.num.0.len() <= 1 && self.is_polynomial()) {
            return self.clone();
        }
        // Shifting preserves coprimality and leading coefficients.
        RationalFn {
            num: self.num.shift(c),
            den: self.den.shift(c),
        }
    }

    /// Exact evaluation; a vanishing denominator is reported with the
    /// offending factor.
    pub fn eval(&self, h0: &Rational) -> Result<Rational> {
        let d = self.den.eval(h0);
        if d.is_zero() {
            return Err(Error::DynamicalPole {
                factor: format!("H - ({h0})"),
                at: h0.to_string(),
            });
        }
        Ok(self.num.eval(h0) / d)
    }
}

impl Zero for RationalFn {
    fn zero() -> Self {
        RationalFn {
            num: UPoly::default(),
            den: UPoly::constant(Rational::one()),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFn {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
}

impl Add for RationalFn {
    type Output = RationalFn;
    fn add(self, o: RationalFn) -> RationalFn {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        if self.den == o.den {
            if self.is_polynomial() {
                return RationalFn {
                    num: self.num.add(&o.num),
                    den: self.den,
                };
            }
            return Self::canonical(self.num.add(&o.num), self.den);
        }
        let g = self.den.gcd(&o.den);
        let (sd, od) = if g.is_one() {
            (self.den.clone(), o.den.clone())
        } else {
            (self.den.div_rem(&g).0, o.den.div_rem(&g).0)
        };
        let num = self.num.mul(&od).add(&o.num.mul(&sd));
        let den = self.den.mul(&od);
        Self::canonical(num, den)
    }
}

impl Neg for RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: self.num.neg(),
            den: self.den,
        }
    }
}

impl Sub for RationalFn {
    type Output = RationalFn;
    fn sub(self, o: RationalFn) -> RationalFn {
        self + (-o)
    }
}

impl Mul for RationalFn {
    type Output = RationalFn;
    fn mul(self, o: RationalFn) -> RationalFn {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.is_polynomial() && o.is_polynomial() {
            return RationalFn {
                num: self.num.mul(&o.num),
                den: self.den,
            };
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let (a, d) = if g1.is_one() {
            (self.num, o.den)
        } else {
            (self.num.div_rem(&g1).0, o.den.div_rem(&g1).0)
        };
        let (c, b) = if g2.is_one() {
            (o.num, self.den)
        } else {
            (o.num.div_rem(&g2).0, self.den.div_rem(&g2).0)
        };
        RationalFn {
            num: a.mul(&c),
            den: b.mul(&d),
        }
    }
}

/// Sum of rational functions with deferred reduction: terms over the same
/// unreduced denominator are added numerator-wise, and only the final
/// combination of groups is brought to canonical form.
#[derive(Clone, Debug, Default)]
pub struct LazySum {
    groups: HashMap<UPoly, UPoly>,
}

impl LazySum {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, num: UPoly, den: UPoly) {
        if num.is_zero() {
            return;
        }
        match self.groups.get_mut(&den) {
            Some(acc) => *acc = acc.add(&num),
            None => {
                self.groups.insert(den, num);
            }
        }
    }

    pub fn add(&mut self, f: &RationalFn) {
        self.push(f.num.clone(), f.den.clone());
    }

    /// Adds `f·g` without cancelling common factors.
    pub fn add_product(&mut self, f: &RationalFn, g: &RationalFn) {
        if f.is_zero() || g.is_zero() {
            return;
        }
        self.push(f.num.mul(&g.num), f.den.mul(&g.den));
    }

    pub fn finish(self) -> RationalFn {
        let mut groups: Vec<(UPoly, UPoly)> = self.groups.into_iter().collect();
        groups.sort_by_key(|(d, _)| d.0.len());
        groups
            .into_iter()
            .fold(RationalFn::zero(), |acc, (den, num)| acc + RationalFn::canonical(num, den))
    }
}

impl Coeff for RationalFn {
    fn from_rational(r: Rational) -> Self {
        Self::constant(r)
    }
    fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        RationalFn {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }
    fn shift_h(&self, by: i64) -> Self {
        self.shift(&int(by))
    }
    fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        (self.num.degree() == Some(0) && self.is_polynomial()).then(|| self.num.0[0].clone())
    }
    fn eval_at(&self, h: &Rational) -> Result<Rational> {
        self.eval(h)
    }
}

impl From<Rational> for RationalFn {
    fn from(r: Rational) -> Self {
        Self::constant(r)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &UPoly| {
            let s = p.to_string();
            if p.0.iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

/// Rising product `(H + lo)(H + lo + 1)⋯(H + hi)`; empty when `hi < lo`.
pub fn shifted_product(lo: i64, hi: i64) -> UPoly {
    let mut p = UPoly::constant(Rational::one());
    for c in lo..=hi {
        p = p.mul(&UPoly::linear(int(c)));
    }
    p
}
