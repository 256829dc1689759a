//! Buchberger's algorithm with the Gebauer–Möller pair criteria, multivariate
//! division with quotients, unit-ideal detection and cofactor certificates.
//!
//! The engine is generic over [`Field`]; the public entry points take
//! [`ParamPoly`]s and dispatch on their [`FieldSpec`]. Internally exponent
//! vectors are permuted into precedence order once, so comparisons never
//! consult the precedence table again.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::coeff::{CoeffError, Field, FieldSpec, PrimeField, Rationals, Scalar};
use crate::cpoly::{CpolyError, ExpVec, MonomialOrder, OrderKind, ParamPoly, VarList};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKind {
    WallClock,
    Pairs,
    Degree,
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetKind::WallClock => "wall-clock",
            BudgetKind::Pairs => "pair-count",
            BudgetKind::Degree => "degree",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroebnerError {
    #[error("the ideal has no generators")]
    EmptyIdeal,
    #[error("generator {0} is zero")]
    ZeroGenerator(usize),
    #[error("polynomials live over different fields ({0} vs {1})")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("polynomials use different variable lists")]
    VarMismatch,
    #[error("order is over {order} variables but the polynomials have {vars}")]
    OrderMismatch { order: usize, vars: usize },
    #[error("{kind} budget exceeded after {} pairs", stats.pairs_processed)]
    BudgetExceeded { kind: BudgetKind, stats: Box<GbStats> },
    #[error("exponent overflow")]
    Overflow,
    #[error("expected {expected} cofactors, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

impl From<CpolyError> for GroebnerError {
    fn from(e: CpolyError) -> Self {
        match e {
            CpolyError::FieldMismatch(a, b) => GroebnerError::FieldMismatch(a, b),
            CpolyError::VarMismatch => GroebnerError::VarMismatch,
            CpolyError::ExponentOverflow => GroebnerError::Overflow,
            CpolyError::Coeff(c) => GroebnerError::Coeff(c),
            CpolyError::LengthMismatch(a, b) => GroebnerError::OrderMismatch { order: a, vars: b },
            _ => GroebnerError::VarMismatch,
        }
    }
}

/// Pair-selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Smallest total degree of the lcm first, ties by creation.
    #[default]
    Normal,
    /// Smallest sugar degree first, ties by creation.
    Sugar,
    /// Creation order.
    Fifo,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Ok(Strategy::Normal),
            "sugar" => Ok(Strategy::Sugar),
            "fifo" => Ok(Strategy::Fifo),
            _ => Err(format!("unknown strategy `{s}` (expected normal, sugar or fifo)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Normal => "normal",
            Strategy::Sugar => "sugar",
            Strategy::Fifo => "fifo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub wall: Option<Duration>,
    pub max_pairs: Option<u64>,
    /// Degree bound: pairs and reduction steps whose sugar exceeds it are
    /// skipped. Finding 1 stays conclusive; anything else is reported as
    /// exceeding the budget.
    pub max_sugar: Option<u32>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn wall(d: Duration) -> Self {
        Budget { wall: Some(d), ..Budget::default() }
    }

    pub fn pairs(n: u64) -> Self {
        Budget { max_pairs: Some(n), ..Budget::default() }
    }

    pub fn sugar(d: u32) -> Self {
        Budget { max_sugar: Some(d), ..Budget::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GbOptions {
    pub strategy: Strategy,
    pub cofactors: bool,
    pub budget: Budget,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GbStats {
    pub pairs_created: u64,
    pub pairs_processed: u64,
    /// Pairs dropped because their leading monomials are coprime.
    pub skipped_product: u64,
    /// Pairs dropped by the chain criterion (either direction).
    pub skipped_chain: u64,
    pub zero_reductions: u64,
    pub reduction_steps: u64,
    /// Largest total degree of an S-pair lcm that was actually processed.
    pub max_pair_degree: u32,
    /// Pairs dropped because their sugar exceeds the degree bound.
    pub skipped_degree: u64,
    /// Reductions left incomplete because of the degree bound.
    pub blocked_reductions: u64,
    /// Largest number of simultaneously active basis elements.
    pub max_basis: usize,
    pub elapsed: Duration,
}

/// An ideal of a polynomial ring together with the order it is studied under.
#[derive(Debug, Clone, PartialEq)]
pub struct Ideal {
    generators: Vec<ParamPoly>,
    field: FieldSpec,
    order: MonomialOrder,
}

impl Ideal {
    pub fn new(generators: Vec<ParamPoly>, order: MonomialOrder) -> Result<Self, GroebnerError> {
        let first = generators.first().ok_or(GroebnerError::EmptyIdeal)?;
        let (field, vars) = (first.field(), first.vars().clone());
        for (k, g) in generators.iter().enumerate() {
            if g.field() != field {
                return Err(GroebnerError::FieldMismatch(field, g.field()));
            }
            if **g.vars() != *vars {
                return Err(GroebnerError::VarMismatch);
            }
            if g.is_zero() {
                return Err(GroebnerError::ZeroGenerator(k + 1));
            }
        }
        if order.nvars() != vars.len() {
            return Err(GroebnerError::OrderMismatch { order: order.nvars(), vars: vars.len() });
        }
        Ok(Ideal { generators, field, order })
    }

    pub fn generators(&self) -> &[ParamPoly] {
        &self.generators
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn vars(&self) -> &Arc<VarList> {
        self.generators[0].vars()
    }
}

/// A reduced, monic Gröbner basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis {
    pub elements: Vec<ParamPoly>,
    pub order: MonomialOrder,
    pub stats: GbStats,
    /// With cofactor tracking: `elements[k] = Σᵢ cofactors[k][i]·generatorᵢ`.
    pub cofactors: Option<Vec<Vec<ParamPoly>>>,
}

impl GroebnerBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].is_one()
    }

    /// Normal form of `p` modulo the basis.
    pub fn normal_form(&self, p: &ParamPoly) -> Result<ParamPoly, GroebnerError> {
        Ok(reduce(p, &self.elements, &self.order)?.0)
    }

    pub fn reduces_to_zero(&self, p: &ParamPoly) -> Result<bool, GroebnerError> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// Checks that every S-polynomial of the basis reduces to zero.
    pub fn satisfies_s_pair_criterion(&self) -> Result<bool, GroebnerError> {
        for i in 0..self.elements.len() {
            for j in i + 1..self.elements.len() {
                let s = s_polynomial(&self.elements[i], &self.elements[j], &self.order)?;
                if !self.reduces_to_zero(&s)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// No term of an element is divisible by another element's leading
    /// monomial, and all leading coefficients are one.
    pub fn is_reduced(&self) -> bool {
        let lms: Vec<ExpVec> = self.elements.iter().filter_map(|p| p.leading_term(&self.order).map(|t| t.0)).collect();
        self.elements.iter().enumerate().all(|(i, p)| {
            p.leading_term(&self.order).is_some_and(|(_, c)| c.is_one())
                && p.terms().all(|(e, _)| lms.iter().enumerate().all(|(j, m)| i == j || !m.divides(e)))
        })
    }
}

/// `Σ cᵢ·gᵢ = target`, or after clearing denominators `Σ cᵢ·gᵢ = m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CofactorCertificate {
    pub cofactors: Vec<ParamPoly>,
    pub target: ParamPoly,
    pub cleared_integer: Option<BigInt>,
}

impl CofactorCertificate {
    /// Multiplies every cofactor and the target by the least common
    /// denominator of the cofactor coefficients (rationals only).
    pub fn clear_denominators(&self) -> Result<CofactorCertificate, GroebnerError> {
        if self.target.field() != FieldSpec::Rationals {
            return Ok(self.clone());
        }
        let mut m = BigInt::one();
        for c in &self.cofactors {
            for (_, s) in c.terms() {
                m = m.lcm(&s.as_ratio().1);
            }
        }
        let ms = FieldSpec::Rationals.from_bigint(&m);
        let cofactors = self.cofactors.iter().map(|c| c.scale(&ms)).collect::<Result<_, _>>()?;
        Ok(CofactorCertificate { cofactors, target: self.target.scale(&ms)?, cleared_integer: Some(m) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    UnitIdeal,
    ProperIdeal,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::UnitIdeal => "UnitIdeal",
            Verdict::ProperIdeal => "ProperIdeal",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipOutcome {
    pub verdict: Verdict,
    pub basis: GroebnerBasis,
    pub certificate: Option<CofactorCertificate>,
}

/// Decides whether `1 ∈ I` by computing the reduced basis.
pub fn contains_one(ideal: &Ideal, options: &GbOptions) -> Result<MembershipOutcome, GroebnerError> {
    let basis = buchberger(ideal, options)?;
    let verdict = if basis.is_unit() { Verdict::UnitIdeal } else { Verdict::ProperIdeal };
    let certificate = match (&basis.cofactors, verdict) {
        (Some(cofs), Verdict::UnitIdeal) => {
            let cert = CofactorCertificate {
                cofactors: cofs[0].clone(),
                target: ParamPoly::one(ideal.field(), ideal.vars().clone()),
                cleared_integer: None,
            };
            Some(cert.clear_denominators()?)
        }
        _ => None,
    };
    Ok(MembershipOutcome { verdict, basis, certificate })
}

/// Recomputes `Σ cᵢ·gᵢ` and compares it with the target.
pub fn verify_certificate(cert: &CofactorCertificate, generators: &[ParamPoly]) -> Result<bool, GroebnerError> {
    if cert.cofactors.len() != generators.len() {
        return Err(GroebnerError::LengthMismatch { expected: generators.len(), found: cert.cofactors.len() });
    }
    let mut sum = ParamPoly::zero(cert.target.field(), cert.target.vars().clone());
    for (c, g) in cert.cofactors.iter().zip(generators) {
        sum = sum.add(&c.mul(g)?)?;
    }
    if sum != cert.target {
        return Ok(false);
    }
    if let Some(m) = &cert.cleared_integer {
        let integral = |s: &Scalar| s.as_ratio().1.is_one();
        let target_ok = cert.target
            == ParamPoly::constant(cert.target.field(), cert.target.vars().clone(), cert.target.field().from_bigint(m));
        let cofs_ok = cert.cofactors.iter().all(|c| c.terms().all(|(_, s)| integral(s)));
        return Ok(target_ok && cofs_ok);
    }
    Ok(true)
}

/// `lc(g)·(L/lm f)·f − lc(f)·(L/lm g)·g` with `L = lcm(lm f, lm g)`.
pub fn s_polynomial(f: &ParamPoly, g: &ParamPoly, order: &MonomialOrder) -> Result<ParamPoly, GroebnerError> {
    let (Some((ef, cf)), Some((eg, cg))) = (f.leading_term(order), g.leading_term(order)) else {
        return Ok(ParamPoly::zero(f.field(), f.vars().clone()));
    };
    let l = ef.lcm(&eg);
    Ok(f.mul_term(&ef.quotient_of(&l), &cg)?.sub(&g.mul_term(&eg.quotient_of(&l), &cf)?)?)
}

/// Multivariate division: returns `(r, q)` with `p = Σ qᵢ·basisᵢ + r` and no
/// term of `r` divisible by any leading monomial of the basis.
pub fn reduce(
    p: &ParamPoly,
    basis: &[ParamPoly],
    order: &MonomialOrder,
) -> Result<(ParamPoly, Vec<ParamPoly>), GroebnerError> {
    for b in basis {
        if b.field() != p.field() {
            return Err(GroebnerError::FieldMismatch(p.field(), b.field()));
        }
        if b.vars() != p.vars() {
            return Err(GroebnerError::VarMismatch);
        }
        if b.is_zero() {
            return Err(GroebnerError::ZeroGenerator(0));
        }
    }
    if order.nvars() != p.nvars() {
        return Err(GroebnerError::OrderMismatch { order: order.nvars(), vars: p.nvars() });
    }
    match p.field() {
        FieldSpec::Rationals => Ring::new(Rationals, order).divide(p, basis),
        FieldSpec::Prime(q) => Ring::new(PrimeField::new(q as u64)?, order).divide(p, basis),
    }
}

/// Reduced monic Gröbner basis of `ideal`.
pub fn buchberger(ideal: &Ideal, options: &GbOptions) -> Result<GroebnerBasis, GroebnerError> {
    match ideal.field() {
        FieldSpec::Rationals => Engine::new(Ring::new(Rationals, ideal.order()), ideal, options).run(),
        FieldSpec::Prime(q) => Engine::new(Ring::new(PrimeField::new(q as u64)?, ideal.order()), ideal, options).run(),
    }
}

// ---------------------------------------------------------------------------
// internal representation

type Terms<E> = Vec<(ExpVec, E)>;

#[derive(Debug)]
enum Stop {
    Overflow,
    Deadline,
}

impl From<CpolyError> for Stop {
    fn from(_: CpolyError) -> Self {
        Stop::Overflow
    }
}

struct Ring<F: Field> {
    f: F,
    kind: OrderKind,
    order: MonomialOrder,
}

struct Divisor<'a, E> {
    terms: &'a [(ExpVec, E)],
    mask: u32,
    lc_inv: E,
    sugar: u32,
}

/// Per-reduction limits and counters.
struct Control {
    deadline: Option<Instant>,
    /// Steps `h ← h − q·m·d` with `sugar(d) + deg m` above the cap are not taken.
    sugar_cap: Option<u32>,
    steps: u64,
    blocked: bool,
}

impl Control {
    fn unlimited() -> Self {
        Control { deadline: None, sugar_cap: None, steps: 0, blocked: false }
    }
}

impl<F: Field> Ring<F> {
    fn new(f: F, order: &MonomialOrder) -> Self {
        Ring { f, kind: order.kind(), order: order.clone() }
    }

    #[inline]
    fn cmp(&self, a: &ExpVec, b: &ExpVec) -> Ordering {
        self.kind.cmp(a, b)
    }

    fn import(&self, p: &ParamPoly) -> Result<Terms<F::Elem>, GroebnerError> {
        let mut t: Terms<F::Elem> = p
            .terms()
            .map(|(e, c)| Ok((self.order.to_internal(e), self.f.from_scalar(c)?)))
            .collect::<Result<_, CoeffError>>()?;
        t.sort_by(|a, b| self.cmp(&b.0, &a.0));
        Ok(t)
    }

    fn export(&self, t: &[(ExpVec, F::Elem)], vars: &Arc<VarList>) -> ParamPoly {
        ParamPoly::from_terms(
            self.f.spec(),
            vars.clone(),
            t.iter().map(|(e, c)| (self.order.from_internal(e), self.f.to_scalar(c))),
        )
    }

    fn scale(&self, t: &mut Terms<F::Elem>, c: &F::Elem) {
        if self.f.is_one(c) {
            return;
        }
        for (_, a) in t.iter_mut() {
            *a = self.f.mul(a, c);
        }
    }

    /// `c·m·b`
    fn mul_term(&self, b: &[(ExpVec, F::Elem)], m: &ExpVec, c: &F::Elem) -> Result<Terms<F::Elem>, Stop> {
        b.iter().map(|(e, a)| Ok((e.mul(m)?, self.f.mul(a, c)))).collect()
    }

    /// `a − c·m·b`, both sorted descending.
    fn sub_mul(
        &self,
        a: &[(ExpVec, F::Elem)],
        b: &[(ExpVec, F::Elem)],
        m: &ExpVec,
        c: &F::Elem,
    ) -> Result<Terms<F::Elem>, Stop> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let negc = self.f.neg(c);
        let (mut i, mut j) = (0, 0);
        let next_b =
            |j: usize| -> Result<Option<ExpVec>, Stop> { Ok(if j < b.len() { Some(b[j].0.mul(m)?) } else { None }) };
        let mut eb = next_b(0)?;
        while i < a.len() || eb.is_some() {
            let ord = match (a.get(i), &eb) {
                (Some(x), Some(y)) => self.cmp(&x.0, y),
                (Some(_), None) => Ordering::Greater,
                (None, _) => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((eb.unwrap(), self.f.mul(&b[j].1, &negc)));
                    j += 1;
                    eb = next_b(j)?;
                }
                Ordering::Equal => {
                    let v = self.f.sub(&a[i].1, &self.f.mul(&b[j].1, c));
                    if !self.f.is_zero(&v) {
                        out.push((a[i].0, v));
                    }
                    i += 1;
                    j += 1;
                    eb = next_b(j)?;
                }
            }
        }
        Ok(out)
    }

    fn add_assign_mul(
        &self,
        acc: &mut Terms<F::Elem>,
        b: &[(ExpVec, F::Elem)],
        m: &ExpVec,
        c: &F::Elem,
    ) -> Result<(), Stop> {
        if b.is_empty() || self.f.is_zero(c) {
            return Ok(());
        }
        *acc = self.sub_mul(acc, b, m, &self.f.neg(c))?;
        Ok(())
    }

    fn divisor<'a>(&self, terms: &'a [(ExpVec, F::Elem)]) -> Divisor<'a, F::Elem> {
        let lc_inv = self.f.inv(&terms[0].1).expect("nonzero leading coefficient");
        Divisor { terms, mask: terms[0].0.support_mask(), lc_inv, sugar: 0 }
    }

    /// Ascending merge of two ascending term lists.
    fn merge_ascending(&self, a: Terms<F::Elem>, b: Terms<F::Elem>) -> Terms<F::Elem> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut a = a.into_iter().peekable();
        let mut b = b.into_iter().peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => self.cmp(&x.0, &y.0),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => return out,
            };
            match ord {
                Ordering::Less => out.push(a.next().expect("peeked")),
                Ordering::Greater => out.push(b.next().expect("peeked")),
                Ordering::Equal => {
                    let (e, x) = a.next().expect("peeked");
                    let (_, y) = b.next().expect("peeked");
                    let v = self.f.add(&x, &y);
                    if !self.f.is_zero(&v) {
                        out.push((e, v));
                    }
                }
            }
        }
    }

    /// Adds an ascending term list to a geobucket whose level `k` holds at
    /// most `4^(k+1)` terms.
    fn bucket_add(&self, buckets: &mut Vec<Terms<F::Elem>>, mut p: Terms<F::Elem>) {
        let cap = |k: usize| 4usize << (2 * k);
        let mut k = 0;
        while cap(k) < p.len() {
            k += 1;
        }
        loop {
            if buckets.len() <= k {
                buckets.resize_with(k + 1, Vec::new);
            }
            if buckets[k].is_empty() {
                buckets[k] = p;
                return;
            }
            p = self.merge_ascending(std::mem::take(&mut buckets[k]), p);
            if p.len() <= cap(k) {
                buckets[k] = p;
                return;
            }
            k += 1;
        }
    }

    /// Removes and returns the leading term of the bucket sum.
    fn bucket_lead(&self, buckets: &mut [Terms<F::Elem>]) -> Option<(ExpVec, F::Elem)> {
        loop {
            let mut best: Option<ExpVec> = None;
            for b in buckets.iter() {
                if let Some((e, _)) = b.last() {
                    if best.as_ref().is_none_or(|x| self.cmp(e, x) == Ordering::Greater) {
                        best = Some(*e);
                    }
                }
            }
            let m = best?;
            let mut c = self.f.zero();
            for b in buckets.iter_mut() {
                if b.last().is_some_and(|(e, _)| *e == m) {
                    let (_, v) = b.pop().expect("nonempty");
                    c = self.f.add(&c, &v);
                }
            }
            if !self.f.is_zero(&c) {
                return Some((m, c));
            }
        }
    }

    /// Full reduction of `h`. `on_step(k, m, q)` is called for every step
    /// `h ← h − q·m·divisorₖ`.
    fn reduce_full(
        &self,
        mut h: Terms<F::Elem>,
        divisors: &[Divisor<'_, F::Elem>],
        ctl: &mut Control,
        mut on_step: impl FnMut(usize, &ExpVec, &F::Elem) -> Result<(), Stop>,
    ) -> Result<Terms<F::Elem>, Stop> {
        let mut rem = Vec::new();
        let mut buckets = Vec::new();
        h.reverse();
        self.bucket_add(&mut buckets, h);
        while let Some((lm, lc)) = self.bucket_lead(&mut buckets) {
            let mask = lm.support_mask();
            let divides = |d: &Divisor<'_, F::Elem>| d.mask & !mask == 0 && d.terms[0].0.divides(&lm);
            let hit = match ctl.sugar_cap {
                None => divisors.iter().position(divides),
                Some(cap) => {
                    let within = |d: &Divisor<'_, F::Elem>| d.sugar + lm.degree() - d.terms[0].0.degree() <= cap;
                    let k = divisors.iter().position(|d| divides(d) && within(d));
                    if k.is_none() && divisors.iter().any(divides) {
                        ctl.blocked = true;
                    }
                    k
                }
            };
            let Some(k) = hit else {
                rem.push((lm, lc));
                continue;
            };
            let d = &divisors[k];
            let m = d.terms[0].0.quotient_of(&lm);
            let q = self.f.mul(&lc, &d.lc_inv);
            on_step(k, &m, &q)?;
            let mut t = self.mul_term(&d.terms[1..], &m, &self.f.neg(&q))?;
            t.reverse();
            self.bucket_add(&mut buckets, t);
            ctl.steps += 1;
            if ctl.steps.is_multiple_of(256) && ctl.deadline.is_some_and(|t| Instant::now() >= t) {
                return Err(Stop::Deadline);
            }
        }
        Ok(rem)
    }

    fn divide(&self, p: &ParamPoly, basis: &[ParamPoly]) -> Result<(ParamPoly, Vec<ParamPoly>), GroebnerError> {
        let imported: Vec<Terms<F::Elem>> = basis.iter().map(|b| self.import(b)).collect::<Result<_, _>>()?;
        let divisors: Vec<_> = imported.iter().map(|t| self.divisor(t)).collect();
        let mut quotients: Vec<Terms<F::Elem>> = vec![Vec::new(); basis.len()];
        let one = ExpVec::one(p.nvars());
        let r = self
            .reduce_full(self.import(p)?, &divisors, &mut Control::unlimited(), |k, m, q| {
                self.add_assign_mul(&mut quotients[k], &[(one, self.f.one())], m, q)
            })
            .map_err(|_| GroebnerError::Overflow)?;
        Ok((self.export(&r, p.vars()), quotients.iter().map(|q| self.export(q, p.vars())).collect()))
    }
}

// ---------------------------------------------------------------------------
// Buchberger loop

#[derive(Debug, Clone, Copy)]
enum Source {
    Generator(usize),
    Element(usize),
}

/// `element = scale · Σ c·m·source`; recorded only when cofactors are
/// requested, and expanded once at the end by a backward pass.
struct Derivation<E> {
    steps: Vec<(Source, ExpVec, E)>,
    scale: E,
}

struct Element<E> {
    terms: Terms<E>,
    sugar: u32,
    derivation: Option<Derivation<E>>,
    active: bool,
}

impl<E> Element<E> {
    fn lm(&self) -> &ExpVec {
        &self.terms[0].0
    }
}

#[derive(Debug, Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: ExpVec,
    sugar: u32,
}

struct Engine<'a, F: Field> {
    ring: Ring<F>,
    ideal: &'a Ideal,
    options: GbOptions,
    elements: Vec<Element<F::Elem>>,
    pairs: BTreeMap<(u32, u64), Pair>,
    next_id: u64,
    stats: GbStats,
    started: Instant,
    deadline: Option<Instant>,
}

enum Flow {
    Continue,
    Unit,
}

type Output<E> = (Vec<Terms<E>>, Option<Vec<Vec<Terms<E>>>>);

/// An inter-reduced element with the derivation that produced it.
type Reduced<E> = (Terms<E>, Option<Derivation<E>>);

impl<'a, F: Field> Engine<'a, F> {
    fn new(ring: Ring<F>, ideal: &'a Ideal, options: &GbOptions) -> Self {
        let started = Instant::now();
        Engine {
            ring,
            ideal,
            options: *options,
            elements: Vec::new(),
            pairs: BTreeMap::new(),
            next_id: 0,
            stats: GbStats::default(),
            started,
            deadline: options.budget.wall.map(|d| started + d),
        }
    }

    fn exceeded(&mut self, kind: BudgetKind) -> GroebnerError {
        self.stats.elapsed = self.started.elapsed();
        GroebnerError::BudgetExceeded { kind, stats: Box::new(self.stats.clone()) }
    }

    fn stop(&mut self, s: Stop) -> GroebnerError {
        match s {
            Stop::Overflow => GroebnerError::Overflow,
            Stop::Deadline => self.exceeded(BudgetKind::WallClock),
        }
    }

    fn check_budget(&mut self) -> Result<(), GroebnerError> {
        if self.deadline.is_some_and(|t| Instant::now() >= t) {
            return Err(self.exceeded(BudgetKind::WallClock));
        }
        if self.options.budget.max_pairs.is_some_and(|n| self.stats.pairs_processed >= n) {
            return Err(self.exceeded(BudgetKind::Pairs));
        }
        Ok(())
    }

    fn run(mut self) -> Result<GroebnerBasis, GroebnerError> {
        self.check_budget()?;
        let vars = self.ideal.vars().clone();
        let mut unit = false;
        for (k, g) in self.ideal.generators().iter().enumerate() {
            let terms = self.ring.import(g)?;
            let steps = vec![(Source::Generator(k), ExpVec::one(g.nvars()), self.ring.f.one())];
            let sugar = g.total_degree().unwrap_or(0);
            if let Flow::Unit = self.insert(terms, sugar, steps).map_err(|s| self.stop(s))? {
                unit = true;
                break;
            }
        }
        while !unit {
            let Some((_, pair)) = self.pairs.pop_first() else { break };
            self.check_budget()?;
            self.stats.pairs_processed += 1;
            self.stats.max_pair_degree = self.stats.max_pair_degree.max(pair.lcm.degree());
            let flow = self.process(&pair).map_err(|s| self.stop(s))?;
            unit = matches!(flow, Flow::Unit);
        }
        if !unit && self.stats.skipped_degree + self.stats.blocked_reductions > 0 {
            return Err(self.exceeded(BudgetKind::Degree));
        }
        let (terms, cofs) = if unit { self.unit_result() } else { self.reduced_result() }.map_err(|s| self.stop(s))?;
        self.stats.elapsed = self.started.elapsed();
        let order = self.ideal.order().clone();
        Ok(GroebnerBasis {
            elements: terms.iter().map(|t| self.ring.export(t, &vars)).collect(),
            order,
            stats: self.stats,
            cofactors: cofs
                .map(|all| all.iter().map(|c| c.iter().map(|t| self.ring.export(t, &vars)).collect()).collect()),
        })
    }

    fn active_indices(&self) -> Vec<usize> {
        (0..self.elements.len()).filter(|&k| self.elements[k].active).collect()
    }

    /// Reduces `h` by the active elements, normalizes it and adds it.
    /// `steps` describes `h` in terms of earlier elements and generators.
    fn insert(
        &mut self,
        h: Terms<F::Elem>,
        sugar: u32,
        mut steps: Vec<(Source, ExpVec, F::Elem)>,
    ) -> Result<Flow, Stop> {
        let track = self.options.cofactors;
        let idx = self.active_indices();
        let mut sugar = sugar;
        let mut ctl = Control {
            deadline: self.deadline,
            sugar_cap: self.options.budget.max_sugar,
            steps: self.stats.reduction_steps,
            blocked: false,
        };
        let reduced = {
            let divisors: Vec<_> = idx
                .iter()
                .map(|&k| Divisor { sugar: self.elements[k].sugar, ..self.ring.divisor(&self.elements[k].terms) })
                .collect();
            let (ring, elements) = (&self.ring, &self.elements);
            ring.reduce_full(h, &divisors, &mut ctl, |k, m, q| {
                sugar = sugar.max(elements[idx[k]].sugar + m.degree());
                if track {
                    steps.push((Source::Element(idx[k]), *m, ring.f.neg(q)));
                }
                Ok(())
            })?
        };
        self.stats.reduction_steps = ctl.steps;
        if ctl.blocked {
            self.stats.blocked_reductions += 1;
        }
        if reduced.is_empty() {
            self.stats.zero_reductions += 1;
            return Ok(Flow::Continue);
        }
        let mut reduced = reduced;
        let scale = self.ring.f.normalizer(reduced.iter().map(|t| &t.1));
        self.ring.scale(&mut reduced, &scale);
        let derivation = track.then_some(Derivation { steps, scale });
        let element = Element { terms: reduced, sugar, derivation, active: true };
        if element.lm().is_one() {
            // the normalizer has already turned the constant into 1
            self.elements.push(element);
            return Ok(Flow::Unit);
        }
        self.update(element);
        Ok(Flow::Continue)
    }

    fn pair_key(&mut self, p: &Pair) -> (u32, u64) {
        self.next_id += 1;
        let primary = match self.options.strategy {
            Strategy::Normal => p.lcm.degree(),
            Strategy::Sugar => p.sugar,
            Strategy::Fifo => 0,
        };
        (primary, self.next_id)
    }

    /// Gebauer–Möller update with the new element `h`.
    fn update(&mut self, h: Element<F::Elem>) {
        let h_lm = *h.lm();
        let h_sugar = h.sugar;
        let hi = self.elements.len();
        self.elements.push(h);

        // candidate pairs with the active elements
        let mut cands: Vec<(Pair, bool)> = Vec::new();
        for (gi, g) in self.elements[..hi].iter().enumerate() {
            if !g.active {
                continue;
            }
            let lcm = g.lm().lcm(&h_lm);
            let sugar = (g.sugar + lcm.degree() - g.lm().degree()).max(h_sugar + lcm.degree() - h_lm.degree());
            cands.push((Pair { i: gi, j: hi, lcm, sugar }, g.lm().is_coprime(&h_lm)));
        }
        self.stats.pairs_created += cands.len() as u64;

        // chain criterion among the new pairs, keeping one per lcm
        let mut kept: Vec<(Pair, bool)> = Vec::new();
        while let Some((p, coprime)) = cands.pop() {
            let dominated = cands.iter().chain(kept.iter()).any(|(q, _)| q.lcm.divides(&p.lcm));
            if coprime || !dominated {
                kept.push((p, coprime));
            } else {
                self.stats.skipped_chain += 1;
            }
        }

        // chain criterion on the existing pairs
        let before = self.pairs.len();
        let elements = &self.elements;
        self.pairs.retain(|_, p| {
            let l = &p.lcm;
            !(h_lm.divides(l) && elements[p.i].lm().lcm(&h_lm) != *l && elements[p.j].lm().lcm(&h_lm) != *l)
        });
        self.stats.skipped_chain += (before - self.pairs.len()) as u64;

        // product criterion
        kept.reverse();
        for (p, coprime) in kept {
            if coprime {
                self.stats.skipped_product += 1;
            } else if self.options.budget.max_sugar.is_some_and(|cap| p.sugar > cap) {
                self.stats.skipped_degree += 1;
            } else {
                let key = self.pair_key(&p);
                self.pairs.insert(key, p);
            }
        }

        for g in self.elements[..hi].iter_mut() {
            if g.active && h_lm.divides(g.lm()) {
                g.active = false;
            }
        }
        let active = self.elements.iter().filter(|e| e.active).count();
        self.stats.max_basis = self.stats.max_basis.max(active);
    }

    fn process(&mut self, pair: &Pair) -> Result<Flow, Stop> {
        let ring = &self.ring;
        let (f, g) = (&self.elements[pair.i], &self.elements[pair.j]);
        let (cf, cg) = (f.terms[0].1.clone(), g.terms[0].1.clone());
        let tf = f.lm().quotient_of(&pair.lcm);
        let tg = g.lm().quotient_of(&pair.lcm);
        let a = ring.mul_term(&f.terms[1..], &tf, &cg)?;
        let s = ring.sub_mul(&a, &g.terms[1..], &tg, &cf)?;
        let steps = if self.options.cofactors {
            vec![(Source::Element(pair.i), tf, cg), (Source::Element(pair.j), tg, ring.f.neg(&cf))]
        } else {
            Vec::new()
        };
        self.insert(s, pair.sugar, steps)
    }

    /// Expands `scale · Σ c·m·source` into generator cofactors by pushing
    /// multipliers backwards through the recorded derivations.
    fn expand(&self, top: &Derivation<F::Elem>) -> Result<Vec<Terms<F::Elem>>, Stop> {
        let ring = &self.ring;
        let n = self.ideal.generators().len();
        let mut cof: Vec<Terms<F::Elem>> = vec![Vec::new(); n];
        let mut weight: Vec<Terms<F::Elem>> = vec![Vec::new(); self.elements.len()];
        let nv = self.ideal.vars().len();
        let unit = vec![(ExpVec::one(nv), top.scale.clone())];
        let push = |cof: &mut Vec<Terms<F::Elem>>,
                    weight: &mut Vec<Terms<F::Elem>>,
                    d: &Derivation<F::Elem>,
                    w: &[(ExpVec, F::Elem)]|
         -> Result<(), Stop> {
            for (src, m, c) in &d.steps {
                let slot = match *src {
                    Source::Generator(k) => &mut cof[k],
                    Source::Element(k) => &mut weight[k],
                };
                ring.add_assign_mul(slot, w, m, c)?;
            }
            Ok(())
        };
        push(&mut cof, &mut weight, top, &unit)?;
        for k in (0..self.elements.len()).rev() {
            if weight[k].is_empty() {
                continue;
            }
            let mut w = std::mem::take(&mut weight[k]);
            let d = self.elements[k].derivation.as_ref().expect("derivations are recorded");
            ring.scale(&mut w, &d.scale);
            push(&mut cof, &mut weight, d, &w)?;
        }
        Ok(cof)
    }

    fn unit_result(&mut self) -> Result<Output<F::Elem>, Stop> {
        let last = self.elements.len() - 1;
        let cofs = if self.options.cofactors {
            let top = Derivation {
                steps: vec![(Source::Element(last), ExpVec::one(self.ideal.vars().len()), self.ring.f.one())],
                scale: self.ring.f.one(),
            };
            Some(vec![self.expand(&top)?])
        } else {
            None
        };
        Ok((vec![self.elements[last].terms.clone()], cofs))
    }

    /// Minimizes, inter-reduces and makes the active elements monic.
    fn reduced_result(&mut self) -> Result<Output<F::Elem>, Stop> {
        let mut idx = self.active_indices();
        // drop elements whose leading monomial is divisible by another's
        let lms: Vec<ExpVec> = idx.iter().map(|&k| *self.elements[k].lm()).collect();
        let keep: Vec<bool> = (0..idx.len())
            .map(|a| !(0..idx.len()).any(|b| b != a && lms[b].divides(&lms[a]) && (lms[b] != lms[a] || b < a)))
            .collect();
        idx = idx.into_iter().zip(keep).filter_map(|(k, ok)| ok.then_some(k)).collect();

        let ring = &self.ring;
        let track = self.options.cofactors;
        let one = ExpVec::one(self.ideal.vars().len());
        let mut out: Vec<Reduced<F::Elem>> = Vec::with_capacity(idx.len());
        let mut ctl = Control { steps: self.stats.reduction_steps, ..Control::unlimited() };
        for (a, &k) in idx.iter().enumerate() {
            let e = &self.elements[k];
            let others: Vec<usize> = idx.iter().enumerate().filter(|(b, _)| *b != a).map(|(_, &k)| k).collect();
            let divisors: Vec<_> = others.iter().map(|&o| ring.divisor(&self.elements[o].terms)).collect();
            let mut steps = vec![(Source::Element(k), one, ring.f.one())];
            let tail = ring.reduce_full(e.terms[1..].to_vec(), &divisors, &mut ctl, |b, m, q| {
                if track {
                    steps.push((Source::Element(others[b]), *m, ring.f.neg(q)));
                }
                Ok(())
            })?;
            let mut t = Vec::with_capacity(tail.len() + 1);
            t.push(e.terms[0].clone());
            t.extend(tail);
            let inv = ring.f.inv(&t[0].1).expect("nonzero leading coefficient");
            ring.scale(&mut t, &inv);
            out.push((t, track.then_some(Derivation { steps, scale: inv })));
        }
        self.stats.reduction_steps = ctl.steps;
        out.sort_by(|a, b| ring.cmp(&b.0[0].0, &a.0[0].0));
        let cofs = if track {
            Some(out.iter().map(|(_, d)| self.expand(d.as_ref().expect("tracked"))).collect::<Result<_, _>>()?)
        } else {
            None
        };
        Ok((out.into_iter().map(|(t, _)| t).collect(), cofs))
    }
}
