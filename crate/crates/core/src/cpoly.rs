//! Commutative polynomials over a [`FieldSpec`] in a fixed, short variable list.
//!
//! Exponent vectors are dense (`MAX_VARS` slots of `u16`) so that the hot
//! comparison paths in the Gröbner engine never allocate. The canonical
//! variable list is the sixteen parameters `l1..l8, m1..m8`, with the
//! script aliases `x(1)..x(8), y(1)..y(8)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::coeff::{CoeffError, FieldSpec, Scalar};

pub const MAX_VARS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpolyError {
    #[error("polynomials live over different fields ({0} vs {1})")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("polynomials use different variable lists")]
    VarMismatch,
    #[error("exponent vectors have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("exponent overflow (cap is {})", u16::MAX)]
    ExponentOverflow,
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("at most {MAX_VARS} variables are supported, got {0}")]
    TooManyVariables(usize),
    #[error("invalid variable precedence")]
    BadPrecedence,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Dense exponent vector with a cached total degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpVec {
    len: u8,
    deg: u32,
    exps: [u16; MAX_VARS],
}

impl ExpVec {
    pub fn one(len: usize) -> Self {
        assert!(len <= MAX_VARS);
        ExpVec { len: len as u8, deg: 0, exps: [0; MAX_VARS] }
    }

    pub fn from_slice(exps: &[u16]) -> Result<Self, CpolyError> {
        if exps.len() > MAX_VARS {
            return Err(CpolyError::TooManyVariables(exps.len()));
        }
        let mut e = ExpVec::one(exps.len());
        e.exps[..exps.len()].copy_from_slice(exps);
        e.deg = exps.iter().map(|&x| x as u32).sum();
        Ok(e)
    }

    pub fn var(len: usize, i: usize) -> Self {
        let mut e = ExpVec::one(len);
        e.exps[i] = 1;
        e.deg = 1;
        e
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg
    }

    #[inline]
    pub fn get(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps[..self.len()]
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &ExpVec) -> Result<ExpVec, CpolyError> {
        let mut r = *self;
        for i in 0..MAX_VARS {
            r.exps[i] = self.exps[i].checked_add(other.exps[i]).ok_or(CpolyError::ExponentOverflow)?;
        }
        r.deg = self.deg + other.deg;
        Ok(r)
    }

    #[inline]
    pub fn divides(&self, other: &ExpVec) -> bool {
        self.deg <= other.deg && (0..MAX_VARS).all(|i| self.exps[i] <= other.exps[i])
    }

    /// `other / self`; caller guarantees divisibility.
    #[inline]
    pub fn quotient_of(&self, other: &ExpVec) -> ExpVec {
        let mut r = *other;
        for i in 0..MAX_VARS {
            r.exps[i] = other.exps[i] - self.exps[i];
        }
        r.deg = other.deg - self.deg;
        r
    }

    pub fn lcm(&self, other: &ExpVec) -> ExpVec {
        let mut r = *self;
        let mut deg = 0;
        for i in 0..MAX_VARS {
            r.exps[i] = self.exps[i].max(other.exps[i]);
            deg += r.exps[i] as u32;
        }
        r.deg = deg;
        r
    }

    pub fn is_coprime(&self, other: &ExpVec) -> bool {
        (0..MAX_VARS).all(|i| self.exps[i] == 0 || other.exps[i] == 0)
    }

    /// Bit `i` set iff variable `i` occurs.
    #[inline]
    pub fn support_mask(&self) -> u32 {
        let mut m = 0;
        for i in 0..MAX_VARS {
            if self.exps[i] != 0 {
                m |= 1 << i;
            }
        }
        m
    }

    fn permuted(&self, perm: &[usize]) -> ExpVec {
        let mut r = *self;
        for (slot, &src) in perm.iter().enumerate() {
            r.exps[slot] = self.exps[src];
        }
        r
    }

    fn unpermuted(&self, perm: &[usize]) -> ExpVec {
        let mut r = *self;
        for (slot, &dst) in perm.iter().enumerate() {
            r.exps[dst] = self.exps[slot];
        }
        r
    }
}

impl fmt::Debug for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    DegLex,
    DegRevLex,
}

impl OrderKind {
    /// Short name used by the script exporter and the CLI (`lp`, `Dp`, `dp`).
    pub fn script_name(&self) -> &'static str {
        match self {
            OrderKind::Lex => "lp",
            OrderKind::DegLex => "Dp",
            OrderKind::DegRevLex => "dp",
        }
    }

    /// Compares with the identity variable precedence.
    #[inline]
    pub fn cmp(&self, a: &ExpVec, b: &ExpVec) -> Ordering {
        match self {
            OrderKind::Lex => a.exps.cmp(&b.exps),
            OrderKind::DegLex => a.deg.cmp(&b.deg).then_with(|| a.exps.cmp(&b.exps)),
            OrderKind::DegRevLex => a.deg.cmp(&b.deg).then_with(|| {
                for i in (0..MAX_VARS).rev() {
                    match a.exps[i].cmp(&b.exps[i]) {
                        Ordering::Equal => continue,
                        other => return other.reverse(),
                    }
                }
                Ordering::Equal
            }),
        }
    }
}

impl FromStr for OrderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lp" | "lex" => Ok(OrderKind::Lex),
            "Dp" | "deglex" => Ok(OrderKind::DegLex),
            "dp" | "degrevlex" | "grevlex" => Ok(OrderKind::DegRevLex),
            other => Err(format!("unknown monomial order `{other}` (expected dp, Dp or lp)")),
        }
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.script_name())
    }
}

/// A monomial order together with a variable precedence: `precedence[0]`
/// is the most significant variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    precedence: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, nvars: usize) -> Self {
        MonomialOrder { kind, precedence: (0..nvars).collect() }
    }

    pub fn with_precedence(kind: OrderKind, precedence: Vec<usize>) -> Result<Self, CpolyError> {
        let mut seen = vec![false; precedence.len()];
        for &v in &precedence {
            if v >= precedence.len() || std::mem::replace(&mut seen[v], true) {
                return Err(CpolyError::BadPrecedence);
            }
        }
        Ok(MonomialOrder { kind, precedence })
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn nvars(&self) -> usize {
        self.precedence.len()
    }

    pub fn precedence(&self) -> &[usize] {
        &self.precedence
    }

    pub fn is_identity(&self) -> bool {
        self.precedence.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn compare(&self, a: &ExpVec, b: &ExpVec) -> Result<Ordering, CpolyError> {
        if a.len() != b.len() {
            return Err(CpolyError::LengthMismatch(a.len(), b.len()));
        }
        if a.len() != self.nvars() {
            return Err(CpolyError::LengthMismatch(a.len(), self.nvars()));
        }
        Ok(self.cmp(a, b))
    }

    /// Unchecked comparison; lengths must agree.
    pub fn cmp(&self, a: &ExpVec, b: &ExpVec) -> Ordering {
        if self.is_identity() {
            self.kind.cmp(a, b)
        } else {
            self.kind.cmp(&a.permuted(&self.precedence), &b.permuted(&self.precedence))
        }
    }

    /// Maps an exponent vector into precedence order, so that the identity
    /// comparison of the images agrees with this order.
    pub fn to_internal(&self, e: &ExpVec) -> ExpVec {
        e.permuted(&self.precedence)
    }

    pub fn from_internal(&self, e: &ExpVec) -> ExpVec {
        e.unpermuted(&self.precedence)
    }
}

/// Variable names plus optional script aliases.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarList {
    names: Vec<String>,
    aliases: Option<Vec<String>>,
}

impl VarList {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<Self>, CpolyError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_VARS {
            return Err(CpolyError::TooManyVariables(names.len()));
        }
        Ok(Arc::new(VarList { names, aliases: None }))
    }

    /// `l1..l8, m1..m8` (the λ and μ parameters), aliased to `x(1)..x(8), y(1)..y(8)`.
    pub fn parameters() -> Arc<Self> {
        let names = (1..=8).map(|i| format!("l{i}")).chain((1..=8).map(|i| format!("m{i}"))).collect();
        let aliases = (1..=8).map(|i| format!("x({i})")).chain((1..=8).map(|i| format!("y({i})"))).collect();
        Arc::new(VarList { names, aliases: Some(aliases) })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn display_name(&self, i: usize, style: VarStyle) -> &str {
        match (style, &self.aliases) {
            (VarStyle::Script, Some(a)) => &a[i],
            _ => &self.names[i],
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name).or_else(|| self.aliases.as_ref()?.iter().position(|n| n == name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStyle {
    /// `l1`, `m5`, ...
    Internal,
    /// `x(1)`, `y(5)`, ...
    Script,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// A commutative polynomial with exact coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParamPoly {
    field: FieldSpec,
    vars: Arc<VarList>,
    terms: BTreeMap<ExpVec, Scalar>,
}

impl ParamPoly {
    pub fn zero(field: FieldSpec, vars: Arc<VarList>) -> Self {
        ParamPoly { field, vars, terms: BTreeMap::new() }
    }

    pub fn constant(field: FieldSpec, vars: Arc<VarList>, c: Scalar) -> Self {
        let mut p = Self::zero(field, vars);
        let one = ExpVec::one(p.nvars());
        p.add_term(one, c);
        p
    }

    pub fn one(field: FieldSpec, vars: Arc<VarList>) -> Self {
        Self::constant(field, vars, field.one())
    }

    pub fn var(field: FieldSpec, vars: Arc<VarList>, i: usize) -> Self {
        let mut p = Self::zero(field, vars);
        let e = ExpVec::var(p.nvars(), i);
        p.add_term(e, field.one());
        p
    }

    pub fn from_terms(field: FieldSpec, vars: Arc<VarList>, terms: impl IntoIterator<Item = (ExpVec, Scalar)>) -> Self {
        let mut p = Self::zero(field, vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn vars(&self) -> &Arc<VarList> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().is_some_and(|(e, c)| e.is_one() && c.is_one())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    pub fn coeff(&self, e: &ExpVec) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&ExpVec::one(self.nvars()))
    }

    /// Terms in storage order (not a monomial order).
    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &Scalar)> {
        self.terms.iter()
    }

    /// Terms sorted descending under `order`.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(ExpVec, Scalar)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (*e, c.clone())).collect();
        v.sort_by(|a, b| order.cmp(&b.0, &a.0));
        v
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(ExpVec, Scalar)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0)).map(|(e, c)| (*e, c.clone()))
    }

    /// Adds `c·x^e` in place.
    pub fn add_term(&mut self, e: ExpVec, c: Scalar) {
        debug_assert_eq!(e.len(), self.nvars());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.field.add(o.get(), &c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn compatible(&self, other: &ParamPoly) -> Result<(), CpolyError> {
        if self.field != other.field {
            return Err(CpolyError::FieldMismatch(self.field, other.field));
        }
        if self.vars != other.vars {
            return Err(CpolyError::VarMismatch);
        }
        Ok(())
    }

    pub fn arith(&self, other: &ParamPoly, op: PolyOp) -> Result<ParamPoly, CpolyError> {
        self.compatible(other)?;
        match op {
            PolyOp::Add => Ok(self.add_unchecked(other)),
            PolyOp::Sub => Ok(self.add_unchecked(&other.neg())),
            PolyOp::Mul => self.mul_unchecked(other),
        }
    }

    pub fn add(&self, other: &ParamPoly) -> Result<ParamPoly, CpolyError> {
        self.arith(other, PolyOp::Add)
    }

    pub fn sub(&self, other: &ParamPoly) -> Result<ParamPoly, CpolyError> {
        self.arith(other, PolyOp::Sub)
    }

    pub fn mul(&self, other: &ParamPoly) -> Result<ParamPoly, CpolyError> {
        self.arith(other, PolyOp::Mul)
    }

    pub fn scale(&self, c: &Scalar) -> Result<ParamPoly, CpolyError> {
        if !self.field.contains(c) {
            return Err(CoeffError::FieldMismatch(self.field).into());
        }
        let mut r = Self::zero(self.field, self.vars.clone());
        if c.is_zero() {
            return Ok(r);
        }
        r.terms = self.terms.iter().map(|(e, a)| (*e, self.field.mul(a, c))).collect();
        Ok(r)
    }

    pub fn neg(&self) -> ParamPoly {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = self.field.neg(c);
        }
        r
    }

    /// Multiplies by `c·x^e`.
    pub fn mul_term(&self, e: &ExpVec, c: &Scalar) -> Result<ParamPoly, CpolyError> {
        let mut r = Self::zero(self.field, self.vars.clone());
        if c.is_zero() {
            return Ok(r);
        }
        for (t, a) in &self.terms {
            r.terms.insert(t.mul(e)?, self.field.mul(a, c));
        }
        Ok(r)
    }

    fn add_unchecked(&self, other: &ParamPoly) -> ParamPoly {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(*e, c.clone());
        }
        r
    }

    fn mul_unchecked(&self, other: &ParamPoly) -> Result<ParamPoly, CpolyError> {
        let mut r = Self::zero(self.field, self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                r.add_term(ea.mul(eb)?, self.field.mul(ca, cb));
            }
        }
        Ok(r)
    }

    pub fn pow(&self, e: u32) -> Result<ParamPoly, CpolyError> {
        let mut acc = Self::one(self.field, self.vars.clone());
        for _ in 0..e {
            acc = acc.mul_unchecked(self)?;
        }
        Ok(acc)
    }

    /// Evaluates at a point given by variable name (names or script aliases).
    /// Only variables that actually occur need a value.
    pub fn substitute(&self, point: &BTreeMap<String, Scalar>) -> Result<Scalar, CpolyError> {
        let mut values: Vec<Option<&Scalar>> = vec![None; self.nvars()];
        for (name, v) in point {
            if let Some(i) = self.vars.index_of(name) {
                if !self.field.contains(v) {
                    return Err(CoeffError::FieldMismatch(self.field).into());
                }
                values[i] = Some(v);
            }
        }
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.exponents().iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let v = values[i].ok_or_else(|| CpolyError::MissingAssignment(self.vars.name(i).to_string()))?;
                t = self.field.mul(&t, &self.field.pow(v, k as u32));
            }
            acc = self.field.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Reinterprets the coefficients in another field (integers only for Q → GF(p)).
    pub fn map_field(&self, field: FieldSpec) -> Result<ParamPoly, CpolyError> {
        let mut r = Self::zero(field, self.vars.clone());
        for (e, c) in &self.terms {
            let (n, d) = c.as_ratio();
            r.add_term(*e, field.from_ratio(&n, &d)?);
        }
        Ok(r)
    }

    /// Printed form with terms in descending `order`.
    pub fn to_printed(&self, order: &MonomialOrder) -> PrintedPoly {
        let terms = self
            .sorted_terms(order)
            .into_iter()
            .map(|(e, c)| {
                let (num, den) = c.as_ratio();
                let factors =
                    e.exponents().iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k as u32)).collect();
                PrintedTerm { num, den, factors }
            })
            .collect();
        PrintedPoly { terms }
    }

    /// Renders in descending degree-reverse-lexicographic order.
    pub fn render(&self, style: VarStyle) -> String {
        self.render_in(&MonomialOrder::new(OrderKind::DegRevLex, self.nvars()), style)
    }

    pub fn render_in(&self, order: &MonomialOrder, style: VarStyle) -> String {
        self.to_printed(order).render(&self.vars, style)
    }

    pub fn parse(text: &str, field: FieldSpec, vars: Arc<VarList>) -> Result<ParamPoly, CpolyError> {
        PrintedPoly::parse(text, &vars)?.to_poly(field, vars)
    }
}

impl fmt::Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamPoly[{}]({})", self.field, self.render(VarStyle::Internal))
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(VarStyle::Internal))
    }
}

/// One printed term: a signed rational coefficient and an ordered list of
/// `(variable, exponent)` factors. Factor order is kept as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrintedTerm {
    pub num: BigInt,
    pub den: BigInt,
    pub factors: Vec<(usize, u32)>,
}

/// A polynomial as written: term order and factor order are preserved, and
/// coefficients are field-independent rationals.
///
/// Grammar (whitespace allowed between tokens):
///
/// ```text
/// poly   := [sign] term (sign term)*
/// sign   := "+" | "-" | "−"
/// term   := factor ("*" factor)*
/// factor := int ["/" int] | var ["^" int]
/// var    := ident ["(" int ")"]
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrintedPoly {
    pub terms: Vec<PrintedTerm>,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CpolyError> {
        Err(CpolyError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn sign(&mut self) -> Option<bool> {
        self.skip_ws();
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(false)
            }
            Some('-') | Some('−') => {
                self.bump();
                Some(true)
            }
            _ => None,
        }
    }

    fn integer(&mut self) -> Result<BigInt, CpolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        Ok(self.src[start..self.pos].parse().expect("ascii digits"))
    }

    fn small_integer(&mut self) -> Result<u32, CpolyError> {
        let at = self.pos;
        let n = self.integer()?;
        u32::try_from(n).map_err(|_| CpolyError::Syntax { pos: at, msg: "exponent too large".into() })
    }

    fn ident(&mut self) -> Result<String, CpolyError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphabetic() || c == '_' => {
                self.bump();
            }
            _ => return self.err("expected a number or a variable"),
        }
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
            self.bump();
        }
        if self.peek() == Some('(') {
            self.bump();
            self.integer()?;
            self.skip_ws();
            if self.bump() != Some(')') {
                return self.err("expected `)`");
            }
        }
        let name: String = self.src[start..self.pos].chars().filter(|c| !c.is_whitespace()).collect();
        Ok(name)
    }
}

impl PrintedPoly {
    pub fn parse(text: &str, vars: &VarList) -> Result<PrintedPoly, CpolyError> {
        let mut lx = Lexer { src: text, pos: 0 };
        let mut terms = Vec::new();
        lx.skip_ws();
        if lx.peek().is_none() {
            return lx.err("empty polynomial");
        }
        let mut negative = lx.sign().unwrap_or(false);
        loop {
            let mut term = PrintedTerm { num: BigInt::one(), den: BigInt::one(), factors: Vec::new() };
            loop {
                lx.skip_ws();
                match lx.peek() {
                    Some(c) if c.is_ascii_digit() => {
                        term.num *= lx.integer()?;
                        lx.skip_ws();
                        if lx.peek() == Some('/') {
                            lx.bump();
                            let at = lx.pos;
                            let d = lx.integer()?;
                            if d.is_zero() {
                                return Err(CpolyError::Syntax { pos: at, msg: "zero denominator".into() });
                            }
                            term.den *= d;
                        }
                    }
                    _ => {
                        let at = lx.pos;
                        let name = lx.ident()?;
                        let idx = vars
                            .index_of(&name)
                            .ok_or_else(|| CpolyError::Syntax { pos: at, msg: format!("unknown variable `{name}`") })?;
                        lx.skip_ws();
                        let mut k = 1;
                        if lx.peek() == Some('^') {
                            lx.bump();
                            k = lx.small_integer()?;
                            if k > u16::MAX as u32 {
                                return Err(CpolyError::ExponentOverflow);
                            }
                        }
                        if k > 0 {
                            term.factors.push((idx, k));
                        }
                    }
                }
                lx.skip_ws();
                if lx.peek() == Some('*') {
                    lx.bump();
                } else {
                    break;
                }
            }
            if negative {
                term.num = -term.num;
            }
            terms.push(term);
            match lx.sign() {
                Some(neg) => negative = neg,
                None => {
                    lx.skip_ws();
                    if lx.peek().is_some() {
                        return lx.err("expected `+`, `-` or end of input");
                    }
                    break;
                }
            }
        }
        Ok(PrintedPoly { terms })
    }

    pub fn to_poly(&self, field: FieldSpec, vars: Arc<VarList>) -> Result<ParamPoly, CpolyError> {
        let n = vars.len();
        let mut p = ParamPoly::zero(field, vars);
        for t in &self.terms {
            let mut exps = [0u16; MAX_VARS];
            for &(i, k) in &t.factors {
                if i >= n {
                    return Err(CpolyError::LengthMismatch(i + 1, n));
                }
                exps[i] = u16::try_from(exps[i] as u32 + k).map_err(|_| CpolyError::ExponentOverflow)?;
            }
            let e = ExpVec::from_slice(&exps[..n])?;
            p.add_term(e, field.from_ratio(&t.num, &t.den)?);
        }
        Ok(p)
    }

    /// Renders terms as written. Leading minus signs are attached in
    /// internal style (`-l1*m1`) and spaced in script style (`- x(1)*y(1)`).
    pub fn render(&self, vars: &VarList, style: VarStyle) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, t) in self.terms.iter().enumerate() {
            let neg = t.num.is_negative();
            match (k, neg, style) {
                (0, false, _) => {}
                (0, true, VarStyle::Internal) => out.push('-'),
                (0, true, VarStyle::Script) => out.push_str("- "),
                (_, false, _) => out.push_str(" + "),
                (_, true, _) => out.push_str(" - "),
            }
            let abs = t.num.abs();
            let mut parts: Vec<String> = Vec::new();
            if !(abs.is_one() && t.den.is_one()) || t.factors.is_empty() {
                if t.den.is_one() {
                    parts.push(abs.to_string());
                } else {
                    parts.push(format!("{abs}/{}", t.den));
                }
            }
            for &(i, e) in &t.factors {
                let name = vars.display_name(i, style);
                if e == 1 {
                    parts.push(name.to_string());
                } else {
                    parts.push(format!("{name}^{e}"));
                }
            }
            out.push_str(&parts.join("*"));
        }
        out
    }
}
