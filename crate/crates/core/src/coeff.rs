//! Exact coefficient arithmetic.
//!
//! Two coefficient domains are supported: the rationals, backed by
//! arbitrary-precision integers, and prime fields `GF(p)` with `p < 2^31`.
//! [`FieldSpec`] is the dynamic handle used by the polynomial front end; the
//! [`Field`] trait is the static interface the Gröbner engine is generic over.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exclusive upper bound for prime moduli.
pub const MODULUS_LIMIT: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("modulus {0} does not fit in 31 bits")]
    ModulusTooLarge(u64),
    #[error("a prime field needs a modulus")]
    MissingModulus,
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalar does not belong to {0}")]
    FieldMismatch(FieldSpec),
    #[error("cannot parse field `{0}` (expected `q` or `gf:P`)")]
    BadFieldSyntax(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    PrimeField,
}

/// A validated coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(u32),
}

/// A field element. Rationals are kept in lowest terms with a positive
/// denominator; residues are least non-negative representatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Inv,
    Neg,
}

/// Deterministic Miller-Rabin; the witnesses {2, 7, 61} are exact below 4,759,123,141.
pub fn is_prime_u32(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n.is_multiple_of(small) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

impl FieldSpec {
    pub fn make(kind: FieldKind, modulus: Option<u64>) -> Result<Self, CoeffError> {
        match kind {
            FieldKind::Rationals => Ok(FieldSpec::Rationals),
            FieldKind::PrimeField => {
                let p = modulus.ok_or(CoeffError::MissingModulus)?;
                if p >= MODULUS_LIMIT {
                    return Err(CoeffError::ModulusTooLarge(p));
                }
                if !is_prime_u32(p) {
                    return Err(CoeffError::NonPrimeModulus(p));
                }
                Ok(FieldSpec::Prime(p as u32))
            }
        }
    }

    pub fn prime(p: u64) -> Result<Self, CoeffError> {
        Self::make(FieldKind::PrimeField, Some(p))
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            FieldSpec::Rationals => FieldKind::Rationals,
            FieldSpec::Prime(_) => FieldKind::PrimeField,
        }
    }

    /// 0 for the rationals, `p` for `GF(p)`.
    pub fn characteristic(&self) -> u32 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldSpec::Prime(p) => Scalar::Residue(v.rem_euclid(*p as i64) as u32),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(v.clone())),
            FieldSpec::Prime(p) => Scalar::Residue(reduce_bigint(v, *p)),
        }
    }

    /// Maps `num/den` into the field; fails when `den` vanishes there.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Scalar, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        match self {
            FieldSpec::Rationals => Ok(Scalar::Rational(BigRational::new(num.clone(), den.clone()))),
            FieldSpec::Prime(_) => {
                let n = self.from_bigint(num);
                let d = self.from_bigint(den);
                self.div(&n, &d)
            }
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (FieldSpec::Rationals, Scalar::Rational(_)) => true,
            (FieldSpec::Prime(p), Scalar::Residue(r)) => r < p,
            _ => false,
        }
    }

    fn check(&self, s: &Scalar) -> Result<(), CoeffError> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(CoeffError::FieldMismatch(*self))
        }
    }

    pub fn arith(&self, a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, CoeffError> {
        self.check(a)?;
        match op {
            ArithOp::Neg => return Ok(self.neg(a)),
            ArithOp::Inv => return self.inv(a),
            _ => {}
        }
        self.check(b)?;
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
            ArithOp::Neg | ArithOp::Inv => unreachable!(),
        }
    }

    // The unchecked helpers below assume both operands belong to `self`.

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(PrimeField::new_unchecked(*p).add(x, y))
            }
            (_, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            _ => panic!("mixed scalars in {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(PrimeField::new_unchecked(*p).mul(x, y))
            }
            (_, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            _ => panic!("mixed scalars in {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Prime(p), Scalar::Residue(x)) => Scalar::Residue(PrimeField::new_unchecked(*p).neg(x)),
            (_, Scalar::Rational(x)) => Scalar::Rational(-x),
            _ => panic!("mixed scalars in {self}"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar, CoeffError> {
        if a.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(match (self, a) {
            (FieldSpec::Prime(p), Scalar::Residue(x)) => {
                Scalar::Residue(PrimeField::new_unchecked(*p).inv(x).expect("nonzero residue"))
            }
            (_, Scalar::Rational(x)) => Scalar::Rational(x.recip()),
            _ => panic!("mixed scalars in {self}"),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, CoeffError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, mut e: u32) -> Scalar {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

/// Accepts `q`/`Q`/`0` and `gf:P`/`GF(P)`/bare primes.
impl FromStr for FieldSpec {
    type Err = CoeffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        if lower == "q" || lower == "0" {
            return Ok(FieldSpec::Rationals);
        }
        let digits = if let Some(rest) = lower.strip_prefix("gf:") {
            rest
        } else if let Some(rest) = lower.strip_prefix("gf(").and_then(|r| r.strip_suffix(')')) {
            rest
        } else {
            lower.as_str()
        };
        let p: u64 = digits.parse().map_err(|_| CoeffError::BadFieldSyntax(t.to_string()))?;
        FieldSpec::prime(p)
    }
}

fn reduce_bigint(v: &BigInt, p: u32) -> u32 {
    let m = BigInt::from(p);
    v.mod_floor(&m).to_u32().expect("residue below modulus")
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue(r) => *r == 1,
        }
    }

    /// Whether the rendering carries a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Residue(_) => false,
        }
    }

    /// Integer lift of a residue, or the numerator/denominator pair of a rational.
    pub fn as_ratio(&self) -> (BigInt, BigInt) {
        match self {
            Scalar::Rational(r) => (r.numer().clone(), r.denom().clone()),
            Scalar::Residue(v) => (BigInt::from(*v), BigInt::one()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Residue(v) => write!(f, "{v}"),
        }
    }
}

/// Static field interface used by the Gröbner engine.
pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        Some(self.mul(a, &self.inv(b)?))
    }

    /// Scale factor that brings a polynomial with the given coefficients
    /// (leading one first) into the working normal form: monic over
    /// `GF(p)`, primitive with positive integer leading coefficient over Q.
    fn normalizer<'a>(&self, coeffs: impl Iterator<Item = &'a Self::Elem>) -> Self::Elem
    where
        Self::Elem: 'a;

    fn to_scalar(&self, a: &Self::Elem) -> Scalar;
    #[allow(clippy::wrong_self_convention)]
    fn from_scalar(&self, s: &Scalar) -> Result<Self::Elem, CoeffError>;
}

/// `GF(p)` with `p < 2^31`, residues stored as `u32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, CoeffError> {
        match FieldSpec::prime(p)? {
            FieldSpec::Prime(p) => Ok(PrimeField { p }),
            FieldSpec::Rationals => unreachable!(),
        }
    }

    fn new_unchecked(p: u32) -> Self {
        PrimeField { p }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn is_one(&self, a: &u32) -> bool {
        *a == 1
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }
    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (*a as u64 + self.p as u64 - *b as u64) as u32
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        // extended Euclid on i64
        let (mut r0, mut r1) = (self.p as i64, *a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(t0.rem_euclid(self.p as i64) as u32)
    }
    fn normalizer<'a>(&self, mut coeffs: impl Iterator<Item = &'a u32>) -> u32 {
        coeffs.next().and_then(|lc| self.inv(lc)).unwrap_or(1)
    }
    fn to_scalar(&self, a: &u32) -> Scalar {
        Scalar::Residue(*a)
    }
    #[allow(clippy::wrong_self_convention)]
    fn from_scalar(&self, s: &Scalar) -> Result<u32, CoeffError> {
        match s {
            Scalar::Residue(v) if *v < self.p => Ok(*v),
            _ => Err(CoeffError::FieldMismatch(self.spec())),
        }
    }
}

/// The rationals over arbitrary-precision integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &BigRational) -> bool {
        a.is_one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn normalizer<'a>(&self, coeffs: impl Iterator<Item = &'a BigRational>) -> BigRational {
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        let mut lead_negative = None;
        for c in coeffs {
            if lead_negative.is_none() {
                lead_negative = Some(c.is_negative());
            }
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        if num_gcd.is_zero() {
            return BigRational::one();
        }
        let scale = BigRational::new(den_lcm, num_gcd);
        if lead_negative == Some(true) {
            -scale
        } else {
            scale
        }
    }
    fn to_scalar(&self, a: &BigRational) -> Scalar {
        Scalar::Rational(a.clone())
    }
    #[allow(clippy::wrong_self_convention)]
    fn from_scalar(&self, s: &Scalar) -> Result<BigRational, CoeffError> {
        match s {
            Scalar::Rational(r) => Ok(r.clone()),
            Scalar::Residue(_) => Err(CoeffError::FieldMismatch(FieldSpec::Rationals)),
        }
    }
}
