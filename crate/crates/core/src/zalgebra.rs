//! The reduction algebra `Z = A/II` as a rewriting engine.
//!
//! Elements are kept as left `ℚ(H)`-combinations of monomials
//! `x̄^α ∂̄^β`. Products straighten `∂̄ ⋄ x̄` with the dynamical Weyl relation
//! and, in [`Mode::Reduced`], rewrite with the three elimination rules for
//! the last coordinate together with the rules their overlaps force.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::poly::{apply_box, h_eigenvalue, MultiIndex, Poly};
use crate::projector::{diamond, raise};
use crate::scalars::{int, rat, Coeff, Rational, RationalFn};
use crate::states::harmonic_basis;
use crate::weyl::{Monomial, WeylElement};

/// An element of the reduction algebra, coefficients written on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct ZElement(WeylElement<RationalFn>);

impl ZElement {
    pub fn zero(n: usize) -> Self {
        ZElement(WeylElement::zero(n))
    }

    pub fn scalar(n: usize, c: RationalFn) -> Self {
        ZElement(WeylElement::scalar(n, c))
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, RationalFn::one())
    }

    pub fn monomial(x: MultiIndex, d: MultiIndex, c: RationalFn) -> Self {
        ZElement(WeylElement::monomial(x, d, c))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RationalFn)> {
        self.0.terms()
    }

    pub fn num_terms(&self) -> usize {
        self.0.num_terms()
    }

    pub fn coeff(&self, x: &MultiIndex, d: &MultiIndex) -> RationalFn {
        self.0.coeff(x, d)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.0.add(&o.0).map(ZElement)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.0.sub(&o.0).map(ZElement)
    }

    pub fn neg(&self) -> Self {
        ZElement(self.0.neg())
    }

    /// `c(H) · self`
    pub fn lmul(&self, c: &RationalFn) -> Self {
        ZElement(self.0.lmul(c))
    }

    pub fn grade(&self) -> Option<i64> {
        self.0.grade()
    }

    /// Coefficient of the empty monomial.
    pub fn constant_term(&self) -> RationalFn {
        let z = MultiIndex::zero(self.n());
        self.coeff(&z, &z)
    }

    /// The normal-ordered Weyl representative with the same coefficients.
    pub fn representative(&self) -> &WeylElement<RationalFn> {
        &self.0
    }

    fn add_term(&mut self, m: Monomial, c: RationalFn) {
        self.0.add_term(m, c)
    }
}

impl fmt::Display for ZElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which relations the engine imposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// All eight relations; normal forms avoid the leading monomials of a
    /// completed rule set, so in particular `α_n + β_n ≤ 1`.
    Reduced,
    /// Only the commutation relations, so every `x̄^α ∂̄^β` stays
    /// independent (the differential reduction algebra).
    Dynamical,
}

type Straightened = Vec<(MultiIndex, MultiIndex, RationalFn)>;

/// `lead → lead - elem`, read off a monic element of the ideal.
#[derive(Clone, Debug)]
struct Rule {
    lead: Monomial,
    elem: ZElement,
}

/// Bound on the number of rules produced by completion.
const MAX_RULES: usize = 400;

pub struct ZAlgebra {
    metric: Metric,
    mode: Mode,
    rules: Arc<Vec<Rule>>,
    dual: OnceLock<Arc<ZAlgebra>>,
    dx_cache: RwLock<HashMap<(usize, MultiIndex), Straightened>>,
    reduce_cache: RwLock<HashMap<Monomial, Straightened>>,
}

impl fmt::Debug for ZAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZAlgebra")
            .field("n", &self.metric.n())
            .field("mode", &self.mode)
            .field("rules", &self.rules.len())
            .finish()
    }
}

impl Clone for ZAlgebra {
    fn clone(&self) -> Self {
        ZAlgebra {
            metric: self.metric.clone(),
            mode: self.mode,
            rules: Arc::clone(&self.rules),
            dual: OnceLock::new(),
            dx_cache: RwLock::new(HashMap::new()),
            reduce_cache: RwLock::new(HashMap::new()),
        }
    }
}

fn shift_all(terms: &mut Straightened, by: i64) {
    for t in terms.iter_mut() {
        t.2 = t.2.shift_h(by);
    }
}

/// Degree-reverse-lexicographic order with variables ranked
/// `x^n > ∂_n > x^{n-1} > ⋯ > x^1 > ∂_1`.
fn cmp_monomial(l: &Monomial, r: &Monomial) -> Ordering {
    let dl = l.0.total() + l.1.total();
    let dr = r.0.total() + r.1.total();
    dl.cmp(&dr).then_with(|| {
        for a in 0..l.0.len() {
            for (el, er) in [(l.1 .0[a], r.1 .0[a]), (l.0 .0[a], r.0 .0[a])] {
                if el != er {
                    return er.cmp(&el);
                }
            }
        }
        Ordering::Equal
    })
}

fn leading(u: &ZElement) -> Option<(Monomial, RationalFn)> {
    u.terms()
        .max_by(|l, r| cmp_monomial(l.0, r.0))
        .map(|(m, c)| (m.clone(), c.clone()))
}

fn quotient(lead: &Monomial, m: &Monomial) -> Option<Monomial> {
    Some((m.0.checked_sub(&lead.0)?, m.1.checked_sub(&lead.1)?))
}

/// `x̄^{q.0} ⋄ u ⋄ ∂̄^{q.1}`, which never needs straightening.
fn embed(u: &ZElement, q: &Monomial) -> ZElement {
    let by = q.0.total() as i64;
    let mut out = ZElement::zero(u.n());
    for ((x, d), c) in u.terms() {
        out.add_term((x.add(&q.0), d.add(&q.1)), c.shift_h(by));
    }
    out
}

fn normal_form(rules: &[Rule], u: &ZElement) -> ZElement {
    let mut rest = u.clone();
    let mut out = ZElement::zero(u.n());
    while let Some((m, c)) = leading(&rest) {
        rest.add_term(m.clone(), -c.clone());
        match rules.iter().find_map(|r| quotient(&r.lead, &m).map(|q| (r, q))) {
            Some((rule, q)) => {
                let mut tail = embed(&rule.elem, &q);
                tail.add_term(m, -RationalFn::one());
                rest = rest.sub(&tail.lmul(&c)).expect("same dimension");
            }
            None => out.add_term(m, c),
        }
    }
    out
}

/// Completes the last three relations to a rule set with unique normal
/// forms: S-elements of overlapping leads, and products with `∂̄_b` on the
/// left or `x̄^b` on the right, are reduced until nothing new appears.
fn complete(m: &Metric) -> Result<Vec<Rule>> {
    let dz = ZAlgebra::dynamical(m);
    let n = m.n();
    let mut xx = ZElement::zero(n);
    let mut dd = ZElement::zero(n);
    let mut xd = ZElement::scalar(n, RationalFn::h() + RationalFn::constant(rat(n as i64, 2)));
    for a in 0..n {
        xx = xx.add(&dz.mul(&dz.x_lower(a), &dz.x(a))?)?;
        dd = dd.add(&dz.mul(&dz.d(a), &dz.d_upper(a))?)?;
        xd = xd.add(&dz.mul(&dz.x(a), &dz.d(a))?)?;
    }
    let mut queue: VecDeque<ZElement> = VecDeque::from([xx, dd, xd]);
    let mut rules: Vec<Rule> = Vec::new();
    while let Some(f) = queue.pop_front() {
        let r = normal_form(&rules, &f);
        let Some((lead, lc)) = leading(&r) else {
            continue;
        };
        if rules.len() >= MAX_RULES {
            return Err(Error::FuelExhausted(MAX_RULES));
        }
        let r = r.lmul(&lc.inv()?);
        for g in &rules {
            let lcm = (lead.0.lcm(&g.lead.0), lead.1.lcm(&g.lead.1));
            let qa = quotient(&lead, &lcm).unwrap();
            let qb = quotient(&g.lead, &lcm).unwrap();
            queue.push_back(embed(&r, &qa).sub(&embed(&g.elem, &qb))?);
        }
        for b in 0..n {
            queue.push_back(dz.mul(&dz.d(b), &r)?);
            queue.push_back(dz.mul(&r, &dz.x(b))?);
        }
        rules.push(Rule { lead, elem: r });
    }
    // keep minimal leads and fully reduce the tails
    let mut minimal: Vec<Rule> = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        let redundant = rules.iter().enumerate().any(|(j, g)| {
            j != i && quotient(&g.lead, &r.lead).is_some() && (g.lead != r.lead || j < i)
        });
        if !redundant {
            minimal.push(r.clone());
        }
    }
    minimal.sort_by(|l, r| cmp_monomial(&l.lead, &r.lead));
    let reduced = minimal
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let others: Vec<Rule> = minimal
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, g)| g.clone())
                .collect();
            let lead_term = ZElement::monomial(r.lead.0.clone(), r.lead.1.clone(), RationalFn::one());
            let tail = normal_form(&others, &r.elem.sub(&lead_term).expect("same dimension"));
            Rule {
                lead: r.lead.clone(),
                elem: lead_term.add(&tail).expect("same dimension"),
            }
        })
        .collect();
    Ok(reduced)
}

impl ZAlgebra {
    /// Engine with all relations; needs a diagonal metric.
    pub fn new(m: &Metric) -> Result<Self> {
        if !m.is_diagonal() {
            return Err(Error::NonDiagonalMetric);
        }
        let rules = complete(m)?;
        Ok(Self::with_rules(m.clone(), Mode::Reduced, rules))
    }

    /// Engine for the commutation relations only; any metric.
    pub fn dynamical(m: &Metric) -> Self {
        Self::with_rules(m.clone(), Mode::Dynamical, Vec::new())
    }

    fn with_rules(metric: Metric, mode: Mode, rules: Vec<Rule>) -> Self {
        ZAlgebra {
            metric,
            mode,
            rules: Arc::new(rules),
            dual: OnceLock::new(),
            dx_cache: RwLock::new(HashMap::new()),
            reduce_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    /// Leading monomials of the rewriting rules; normal forms contain none
    /// of them as a factor.
    pub fn rule_leads(&self) -> Vec<Monomial> {
        self.rules.iter().map(|r| r.lead.clone()).collect()
    }

    pub fn x(&self, a: usize) -> ZElement {
        let n = self.n();
        ZElement::monomial(MultiIndex::unit(n, a), MultiIndex::zero(n), RationalFn::one())
    }

    pub fn d(&self, a: usize) -> ZElement {
        let n = self.n();
        ZElement::monomial(MultiIndex::zero(n), MultiIndex::unit(n, a), RationalFn::one())
    }

    /// `x̄_a = η_{ab} x̄^b`
    pub fn x_lower(&self, a: usize) -> ZElement {
        let n = self.n();
        let mut out = ZElement::zero(n);
        for b in 0..n {
            let g = self.metric.lower(a, b);
            if !g.is_zero() {
                out.add_term(
                    (MultiIndex::unit(n, b), MultiIndex::zero(n)),
                    RationalFn::constant(g.clone()),
                );
            }
        }
        out
    }

    /// `∂̄^a = η^{ab} ∂̄_b`
    pub fn d_upper(&self, a: usize) -> ZElement {
        let n = self.n();
        let mut out = ZElement::zero(n);
        for b in 0..n {
            let g = self.metric.upper(a, b);
            if !g.is_zero() {
                out.add_term(
                    (MultiIndex::zero(n), MultiIndex::unit(n, b)),
                    RationalFn::constant(g.clone()),
                );
            }
        }
        out
    }

    pub fn h(&self) -> ZElement {
        ZElement::scalar(self.n(), RationalFn::h())
    }

    fn check(&self, u: &ZElement) -> Result<()> {
        if u.n() != self.n() {
            return Err(Error::DimensionMismatch(self.n(), u.n()));
        }
        Ok(())
    }

    /// `∂̄_a ⋄ x̄^γ` in normal order; memoised.
    fn d_times_x(&self, a: usize, gamma: &MultiIndex) -> Straightened {
        let key = (a, gamma.clone());
        if let Some(hit) = self.dx_cache.read().unwrap().get(&key) {
            return hit.clone();
        }
        let n = self.n();
        let out = match gamma.0.iter().position(|&e| e > 0) {
            None => vec![(MultiIndex::zero(n), MultiIndex::unit(n, a), RationalFn::one())],
            Some(b) => {
                // ∂_a x^b X = δ_a^b X + x^b ∂_a X + 1/(H+1) η_{ac}η^{bd} x^c ∂_d X
                let rest = gamma.dec(b).unwrap();
                let mut acc: HashMap<Monomial, RationalFn> = HashMap::new();
                let mut push = |x: MultiIndex, d: MultiIndex, c: RationalFn| {
                    let e = acc.entry((x, d)).or_insert_with(RationalFn::zero);
                    *e = std::mem::replace(e, RationalFn::zero()) + c;
                };
                if a == b {
                    push(rest.clone(), MultiIndex::zero(n), RationalFn::one());
                }
                let mut inner = self.d_times_x(a, &rest);
                shift_all(&mut inner, 1);
                for (x, d, c) in &inner {
                    push(x.inc(b), d.clone(), c.clone());
                }
                let pole = RationalFn::inv_linear(int(1));
                for c_idx in 0..n {
                    let g_lo = self.metric.lower(a, c_idx);
                    if g_lo.is_zero() {
                        continue;
                    }
                    for d_idx in 0..n {
                        let g_up = self.metric.upper(b, d_idx);
                        if g_up.is_zero() {
                            continue;
                        }
                        let scale = pole.scale(&(g_lo * g_up));
                        let mut inner = self.d_times_x(d_idx, &rest);
                        shift_all(&mut inner, 1);
                        for (x, d, c) in inner {
                            push(x.inc(c_idx), d, scale.clone() * c);
                        }
                    }
                }
                let mut v: Straightened = acc
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|((x, d), c)| (x, d, c))
                    .collect();
                v.sort_by(|l, r| (&l.0, &l.1).cmp(&(&r.0, &r.1)));
                v
            }
        };
        self.dx_cache.write().unwrap().insert(key, out.clone());
        out
    }

    /// Normal form of the monomial `x̄^α ∂̄^β` (coefficient 1); memoised.
    fn reduce_monomial(&self, m: &Monomial) -> Straightened {
        if !self.rules.iter().any(|r| quotient(&r.lead, m).is_some()) {
            return vec![(m.0.clone(), m.1.clone(), RationalFn::one())];
        }
        if let Some(hit) = self.reduce_cache.read().unwrap().get(m) {
            return hit.clone();
        }
        let one = ZElement::monomial(m.0.clone(), m.1.clone(), RationalFn::one());
        let out: Straightened = normal_form(&self.rules, &one)
            .terms()
            .map(|((x, d), c)| (x.clone(), d.clone(), c.clone()))
            .collect();
        self.reduce_cache.write().unwrap().insert(m.clone(), out.clone());
        out
    }

    /// Brings an arbitrary combination of monomials into normal form.
    pub fn reduce(&self, u: &ZElement) -> Result<ZElement> {
        self.check(u)?;
        let mut out = ZElement::zero(self.n());
        for (m, c) in u.terms() {
            for (x, d, e) in self.reduce_monomial(m) {
                out.add_term((x, d), c.clone() * e);
            }
        }
        Ok(out)
    }

    /// `∂̄^β ⋄ x̄^γ`, one derivative at a time.
    fn straighten(&self, beta: &MultiIndex, gamma: &MultiIndex) -> Result<ZElement> {
        let n = self.n();
        let mut cur = ZElement::monomial(gamma.clone(), MultiIndex::zero(n), RationalFn::one());
        for b in beta.to_word().into_iter().rev() {
            let mut next = ZElement::zero(n);
            for ((x, d), c) in cur.terms() {
                let c = c.shift_h(-1);
                for (x2, d2, e) in self.d_times_x(b, x) {
                    next.add_term((x2, d2.add(d)), c.clone() * e);
                }
            }
            cur = self.reduce(&next)?;
        }
        Ok(cur)
    }

    /// The diamond product `u ⋄ v`.
    pub fn mul(&self, u: &ZElement, v: &ZElement) -> Result<ZElement> {
        self.check(u)?;
        self.check(v)?;
        let n = self.n();
        let mut out = ZElement::zero(n);
        for ((al, be), c) in u.terms() {
            let la = al.total() as i64;
            let shift = la - be.total() as i64;
            for ((ga, de), d) in v.terms() {
                let cd = c.clone() * d.shift_h(shift);
                let mid = self.straighten(be, ga)?;
                for ((mu, nu), e) in mid.terms() {
                    out.add_term((al.add(mu), nu.add(de)), cd.clone() * e.shift_h(la));
                }
            }
        }
        self.reduce(&out)
    }

    pub fn pow(&self, u: &ZElement, k: u32) -> Result<ZElement> {
        let mut out = ZElement::one(self.n());
        for _ in 0..k {
            out = self.mul(&out, u)?;
        }
        Ok(out)
    }

    /// Anti-automorphism `x̄^a ↔ ∂̄_a`, `H ↦ H`. Numeric coefficients pass
    /// through unchanged, so `η`-built elements land on their `η⁻¹`-built
    /// counterparts: the result lives in the algebra of the inverse metric.
    pub fn star(&self, u: &ZElement) -> Result<ZElement> {
        self.check(u)?;
        let mut out = ZElement::zero(self.n());
        for ((al, be), c) in u.terms() {
            let shift = be.total() as i64 - al.total() as i64;
            out.add_term((be.clone(), al.clone()), c.shift_h(shift));
        }
        self.dual()?.reduce(&out)
    }

    fn dual(&self) -> Result<Arc<ZAlgebra>> {
        if let Some(z) = self.dual.get() {
            return Ok(Arc::clone(z));
        }
        let inv = self.metric.inverse();
        let z = match self.mode {
            Mode::Reduced => ZAlgebra::new(&inv)?,
            Mode::Dynamical => ZAlgebra::dynamical(&inv),
        };
        Ok(Arc::clone(self.dual.get_or_init(|| Arc::new(z))))
    }

    /// Engine for the inverse metric, the target of [`ZAlgebra::star`].
    pub fn starred(&self) -> Result<ZAlgebra> {
        Ok((*self.dual()?).clone())
    }

    /// Class in `A/II` of a normal-ordered Weyl representative.
    pub fn from_weyl(&self, w: &WeylElement<RationalFn>) -> Result<ZElement> {
        if w.n() != self.n() {
            return Err(Error::DimensionMismatch(self.n(), w.n()));
        }
        self.reduce(&ZElement(w.clone()))
    }

    /// Action on solutions: `∂̄_a` as `∂_a`, `x̄^a` as the raising operator,
    /// coefficients evaluated at the `H`-eigenvalue of the output degree.
    pub fn act(&self, u: &ZElement, phi: &Poly) -> Result<Poly> {
        self.check(u)?;
        let m = &self.metric;
        if phi.n() != m.n() {
            return Err(Error::DimensionMismatch(m.n(), phi.n()));
        }
        if !apply_box(m, phi)?.is_zero() {
            return Err(Error::NotHarmonic);
        }
        let mut out = Poly::zero(m.n());
        for ((al, be), c) in u.terms() {
            let mut p = phi.partial_multi(be);
            for a in al.to_word().into_iter().rev() {
                p = raise(m, a, &p)?;
            }
            for (d, comp) in p.homogeneous_components() {
                let v = c.eval(&h_eigenvalue(d as i64, m.n()))?;
                out = out.try_add(&comp.scale(&v))?;
            }
        }
        Ok(out)
    }
}

/// A generator of the presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Gen {
    X(usize),
    D(usize),
    H,
}

/// `coeff(H) · g₁ ⋄ g₂ ⋄ ⋯`
#[derive(Clone, Debug, PartialEq)]
pub struct GenWord {
    pub coeff: RationalFn,
    pub gens: Vec<Gen>,
}

impl GenWord {
    pub fn new(coeff: RationalFn, gens: Vec<Gen>) -> Self {
        GenWord { coeff, gens }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    /// Letter `a`–`h` in the order of the presentation.
    pub label: char,
    /// Free indices, 0-based.
    pub indices: Vec<usize>,
    pub lhs: Vec<GenWord>,
    pub rhs: Vec<GenWord>,
}

impl Relation {
    pub fn name(&self) -> String {
        let idx: Vec<String> = self.indices.iter().map(|i| (i + 1).to_string()).collect();
        if idx.is_empty() {
            format!("({})", self.label)
        } else {
            format!("({}) [{}]", self.label, idx.join(","))
        }
    }
}

fn gw(c: RationalFn, gens: Vec<Gen>) -> GenWord {
    GenWord::new(c, gens)
}

fn num(r: Rational) -> RationalFn {
    RationalFn::constant(r)
}

/// Every instance of the eight defining relations.
pub fn relations(m: &Metric) -> Vec<Relation> {
    use Gen::*;
    let n = m.n();
    let one = RationalFn::one();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            out.push(Relation {
                label: 'a',
                indices: vec![a, b],
                lhs: vec![gw(one.clone(), vec![X(a), X(b)])],
                rhs: vec![gw(one.clone(), vec![X(b), X(a)])],
            });
        }
    }
    for a in 0..n {
        for b in 0..n {
            out.push(Relation {
                label: 'b',
                indices: vec![a, b],
                lhs: vec![gw(one.clone(), vec![D(a), D(b)])],
                rhs: vec![gw(one.clone(), vec![D(b), D(a)])],
            });
        }
    }
    let pole = RationalFn::inv_linear(int(1));
    for a in 0..n {
        for b in 0..n {
            let mut rhs = vec![gw(one.clone(), vec![X(b), D(a)])];
            if a == b {
                rhs.push(gw(one.clone(), vec![]));
            }
            for c in 0..n {
                for d in 0..n {
                    let g = m.lower(a, c) * m.upper(b, d);
                    if !g.is_zero() {
                        rhs.push(gw(pole.scale(&g), vec![X(c), D(d)]));
                    }
                }
            }
            out.push(Relation {
                label: 'c',
                indices: vec![a, b],
                lhs: vec![gw(one.clone(), vec![D(a), X(b)])],
                rhs,
            });
        }
    }
    let h_plus_1 = RationalFn::h() + RationalFn::one();
    for a in 0..n {
        out.push(Relation {
            label: 'd',
            indices: vec![a],
            lhs: vec![gw(one.clone(), vec![X(a), H])],
            rhs: vec![gw(h_plus_1.clone(), vec![X(a)])],
        });
    }
    for a in 0..n {
        out.push(Relation {
            label: 'e',
            indices: vec![a],
            lhs: vec![gw(one.clone(), vec![H, D(a)])],
            rhs: vec![
                gw(one.clone(), vec![D(a), H]),
                gw(one.clone(), vec![D(a)]),
            ],
        });
    }
    let mut f = Vec::new();
    let mut g = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if !m.lower(a, b).is_zero() {
                f.push(gw(num(m.lower(a, b).clone()), vec![X(b), X(a)]));
            }
            if !m.upper(a, b).is_zero() {
                g.push(gw(num(m.upper(a, b).clone()), vec![D(a), D(b)]));
            }
        }
    }
    out.push(Relation { label: 'f', indices: vec![], lhs: f, rhs: vec![] });
    out.push(Relation { label: 'g', indices: vec![], lhs: g, rhs: vec![] });
    let h_lhs = (0..n).map(|a| gw(one.clone(), vec![X(a), D(a)])).collect();
    let h_rhs = vec![gw(
        -(RationalFn::h() + RationalFn::constant(rat(n as i64, 2))),
        vec![],
    )];
    out.push(Relation { label: 'h', indices: vec![], lhs: h_lhs, rhs: h_rhs });
    out
}

impl ZAlgebra {
    pub fn gen(&self, g: Gen) -> ZElement {
        match g {
            Gen::X(a) => self.x(a),
            Gen::D(a) => self.d(a),
            Gen::H => self.h(),
        }
    }

    /// Evaluates a generator word by left-to-right diamond products.
    pub fn eval_word(&self, w: &GenWord) -> Result<ZElement> {
        let mut acc = ZElement::scalar(self.n(), w.coeff.clone());
        for &g in &w.gens {
            acc = self.mul(&acc, &self.gen(g))?;
        }
        Ok(acc)
    }

    pub fn eval_side(&self, side: &[GenWord]) -> Result<ZElement> {
        let mut acc = ZElement::zero(self.n());
        for w in side {
            acc = acc.add(&self.eval_word(w)?)?;
        }
        Ok(acc)
    }
}

/// Acts with one generator on a solution.
pub fn act_gen(m: &Metric, g: Gen, phi: &Poly) -> Result<Poly> {
    match g {
        Gen::X(a) => raise(m, a, phi),
        Gen::D(a) => phi.partial(a),
        Gen::H => {
            let mut out = Poly::zero(m.n());
            for (d, comp) in phi.homogeneous_components() {
                out = out.try_add(&comp.scale(&h_eigenvalue(d as i64, m.n())))?;
            }
            Ok(out)
        }
    }
}

/// Acts with a generator word, innermost generator first, reusing shared
/// suffixes through `memo`.
fn act_word(
    m: &Metric,
    w: &GenWord,
    phi: &Poly,
    memo: &mut HashMap<Vec<Gen>, Poly>,
) -> Result<Poly> {
    let len = w.gens.len();
    let start = (0..len)
        .find(|&i| memo.contains_key(&w.gens[i..]))
        .unwrap_or(len);
    let mut p = if start == len {
        phi.clone()
    } else {
        memo[&w.gens[start..]].clone()
    };
    for i in (0..start).rev() {
        p = act_gen(m, w.gens[i], &p)?;
        memo.insert(w.gens[i..].to_vec(), p.clone());
    }
    let mut out = Poly::zero(m.n());
    for (d, comp) in p.homogeneous_components() {
        let v = w.coeff.eval(&h_eigenvalue(d as i64, m.n()))?;
        out = out.try_add(&comp.scale(&v))?;
    }
    Ok(out)
}

fn act_side(
    m: &Metric,
    side: &[GenWord],
    phi: &Poly,
    memo: &mut HashMap<Vec<Gen>, Poly>,
) -> Result<Poly> {
    let mut out = Poly::zero(m.n());
    for w in side {
        out = out.try_add(&act_word(m, w, phi, memo)?)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Engine,
    Operator,
    Projector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub method: Method,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl RelationCheck {
    fn new(relation: String, method: Method, witness: Option<String>) -> Self {
        RelationCheck {
            relation,
            method,
            status: if witness.is_none() { Status::Pass } else { Status::Fail },
            witness,
        }
    }
}

/// Checks each relation inside the engine and as operators on a spanning set
/// of solutions of degree at most `max_deg`, and compares generator products
/// with the projector-side diamond product.
pub fn verify_presentation(m: &Metric, max_deg: usize) -> Result<Vec<RelationCheck>> {
    let z = ZAlgebra::new(m)?;
    let rels = relations(m);
    let mut report: Vec<RelationCheck> = rels
        .par_iter()
        .map(|r| {
            let diff = z.eval_side(&r.lhs)?.sub(&z.eval_side(&r.rhs)?)?;
            let witness = (!diff.is_zero()).then(|| format!("lhs - rhs = {diff}"));
            Ok(RelationCheck::new(r.name(), Method::Engine, witness))
        })
        .collect::<Result<_>>()?;

    let mut spanning = Vec::new();
    for d in 0..=max_deg {
        spanning.extend(harmonic_basis(m, d)?);
    }
    let operator: Vec<RelationCheck> = rels
        .par_iter()
        .map(|r| {
            let mut memo = HashMap::new();
            for phi in &spanning {
                memo.clear();
                let l = act_side(m, &r.lhs, phi, &mut memo)?;
                let rr = act_side(m, &r.rhs, phi, &mut memo)?;
                if l != rr {
                    let w = format!("on {phi}: lhs = {l}, rhs = {rr}");
                    return Ok(RelationCheck::new(r.name(), Method::Operator, Some(w)));
                }
            }
            Ok(RelationCheck::new(r.name(), Method::Operator, None))
        })
        .collect::<Result<_>>()?;
    report.extend(operator);

    let n = m.n();
    let gens: Vec<Gen> = (0..n).map(Gen::X).chain((0..n).map(Gen::D)).collect();
    let pairs: Vec<(Gen, Gen)> = gens
        .iter()
        .flat_map(|&g| gens.iter().map(move |&h| (g, h)))
        .collect();
    let projector: Vec<RelationCheck> = pairs
        .par_iter()
        .map(|&(g, h)| {
            let engine = z.mul(&z.gen(g), &z.gen(h))?;
            let oracle = z.from_weyl(&diamond(m, &weyl_gen(n, g).localize(), &weyl_gen(n, h))?)?;
            let witness = (engine != oracle)
                .then(|| format!("engine = {engine}, projector = {oracle}"));
            Ok(RelationCheck::new(
                format!("{} * {}", gen_name(g), gen_name(h)),
                Method::Projector,
                witness,
            ))
        })
        .collect::<Result<_>>()?;
    report.extend(projector);
    Ok(report)
}

/// Generator as a plain Weyl element (`H` as `-x^a∂_a - n/2`).
pub fn weyl_gen(n: usize, g: Gen) -> WeylElement {
    match g {
        Gen::X(a) => WeylElement::x(n, a),
        Gen::D(a) => WeylElement::d(n, a),
        Gen::H => crate::weyl::h_element(n),
    }
}

pub fn gen_name(g: Gen) -> String {
    match g {
        Gen::X(a) => format!("x{}", a + 1),
        Gen::D(a) => format!("d{}", a + 1),
        Gen::H => "H".to_string(),
    }
}

/// Random element: a small rational times a product of one or two
/// generators.
pub fn random_element<R: Rng + ?Sized>(z: &ZAlgebra, rng: &mut R) -> Result<ZElement> {
    let n = z.n();
    let pick = |rng: &mut R| match rng.gen_range(0..5) {
        0 | 1 => Gen::X(rng.gen_range(0..n)),
        2 | 3 => Gen::D(rng.gen_range(0..n)),
        _ => Gen::H,
    };
    let len = rng.gen_range(1..=2);
    let gens: Vec<Gen> = (0..len).map(|_| pick(rng)).collect();
    let p = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
    let c = rat(p, rng.gen_range(1..=3));
    z.eval_word(&GenWord::new(RationalFn::constant(c), gens))
}
