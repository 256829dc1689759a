//! Free non-associative words over the alphabet `{b, b', x, y}` and linear
//! combinations of them with polynomial coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cpoly::{CpolyError, ParamPoly};

/// Letters, declared in the canonical order `x < y < b < b'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
    B,
    Bp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LetterClass {
    /// `b`, `b'`
    Beta,
    /// `x`, `y`
    Chi,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::X, Letter::Y, Letter::B, Letter::Bp];

    pub fn class(self) -> LetterClass {
        match self {
            Letter::B | Letter::Bp => LetterClass::Beta,
            Letter::X | Letter::Y => LetterClass::Chi,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Letter::B => "b",
            Letter::Bp => "b'",
            Letter::X => "x",
            Letter::Y => "y",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A full binary tree with lettered leaves: a non-associative monomial.
///
/// Words order by degree first, then by their preorder serialization in
/// which letters precede the product marker.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Word {
    Leaf(Letter),
    Node(Box<Word>, Box<Word>),
}

/// Child selector for addressing a node inside a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct WordSyntaxError {
    pub pos: usize,
    pub msg: String,
}

impl Word {
    pub fn leaf(l: Letter) -> Word {
        Word::Leaf(l)
    }

    pub fn node(left: Word, right: Word) -> Word {
        Word::Node(Box::new(left), Box::new(right))
    }

    pub fn b() -> Word {
        Word::Leaf(Letter::B)
    }
    pub fn bp() -> Word {
        Word::Leaf(Letter::Bp)
    }
    pub fn x() -> Word {
        Word::Leaf(Letter::X)
    }
    pub fn y() -> Word {
        Word::Leaf(Letter::Y)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Word::Leaf(_))
    }

    pub fn children(&self) -> Option<(&Word, &Word)> {
        match self {
            Word::Leaf(_) => None,
            Word::Node(l, r) => Some((l, r)),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Word::Leaf(_) => 1,
            Word::Node(l, r) => l.degree() + r.degree(),
        }
    }

    pub fn type_of(&self) -> TypeVector {
        let mut t = TypeVector::default();
        self.visit_leaves(&mut |l| t.counts[l.index()] += 1);
        t
    }

    fn visit_leaves(&self, f: &mut impl FnMut(Letter)) {
        match self {
            Word::Leaf(l) => f(*l),
            Word::Node(a, b) => {
                a.visit_leaves(f);
                b.visit_leaves(f);
            }
        }
    }

    pub fn leaves(&self) -> Vec<Letter> {
        let mut v = Vec::new();
        self.visit_leaves(&mut |l| v.push(l));
        v
    }

    pub fn at_path(&self, path: &[Side]) -> Option<&Word> {
        let mut w = self;
        for side in path {
            let (l, r) = w.children()?;
            w = match side {
                Side::Left => l,
                Side::Right => r,
            };
        }
        Some(w)
    }

    /// Returns a copy with the subtree at `path` replaced.
    pub fn replace_at(&self, path: &[Side], with: Word) -> Option<Word> {
        match path.split_first() {
            None => Some(with),
            Some((side, rest)) => {
                let (l, r) = self.children()?;
                Some(match side {
                    Side::Left => Word::node(l.replace_at(rest, with)?, r.clone()),
                    Side::Right => Word::node(l.clone(), r.replace_at(rest, with)?),
                })
            }
        }
    }

    /// Preorder tokens: letters map through `rank`, the product marker is
    /// larger than every letter.
    fn tokens(&self, rank: &impl Fn(Letter) -> u8, out: &mut Vec<u8>) {
        match self {
            Word::Leaf(l) => out.push(rank(*l)),
            Word::Node(a, b) => {
                out.push(u8::MAX);
                a.tokens(rank, out);
                b.tokens(rank, out);
            }
        }
    }

    fn cmp_with(&self, other: &Word, rank: &impl Fn(Letter) -> u8) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            self.tokens(rank, &mut a);
            other.tokens(rank, &mut b);
            a.cmp(&b)
        })
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>, outermost: bool) -> fmt::Result {
        match self {
            Word::Leaf(l) => write!(f, "{l}"),
            Word::Node(a, b) => {
                if !outermost {
                    f.write_str("(")?;
                }
                a.fmt_inner(f, false)?;
                b.fmt_inner(f, false)?;
                if !outermost {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }

    pub fn parse(text: &str) -> Result<Word, WordSyntaxError> {
        let mut p = WordParser { src: text.as_bytes(), pos: 0, depth: 0 };
        let items = p.sequence(false)?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return p.err("unexpected `)`");
        }
        p.combine(items, 0)
    }
}

fn default_rank(l: Letter) -> u8 {
    l as u8
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_with(other, &default_rank)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_inner(f, true)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = WordSyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

/// Bracket nesting accepted by [`Word::parse`]; the parser recurses once per level.
pub const MAX_NESTING: usize = 256;

struct WordParser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl WordParser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, WordSyntaxError> {
        Err(WordSyntaxError { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Items up to the end of input or a closing parenthesis.
    fn sequence(&mut self, nested: bool) -> Result<Vec<(usize, Word)>, WordSyntaxError> {
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            let Some(&c) = self.src.get(self.pos) else {
                if nested {
                    return self.err("missing `)`");
                }
                return Ok(items);
            };
            match c {
                b'(' => {
                    if self.depth == MAX_NESTING {
                        return self.err("brackets nested too deeply");
                    }
                    self.pos += 1;
                    self.depth += 1;
                    let inner = self.sequence(true)?;
                    self.depth -= 1;
                    if inner.len() < 2 {
                        return Err(WordSyntaxError { pos: start, msg: "brackets must enclose a product".into() });
                    }
                    self.pos += 1; // ')'
                    items.push((start, self.combine(inner, start)?));
                }
                b')' => return Ok(items),
                b'x' => {
                    self.pos += 1;
                    items.push((start, Word::x()));
                }
                b'y' => {
                    self.pos += 1;
                    items.push((start, Word::y()));
                }
                b'b' => {
                    self.pos += 1;
                    if self.src.get(self.pos) == Some(&b'\'') {
                        self.pos += 1;
                        items.push((start, Word::bp()));
                    } else if self.src[self.pos..].starts_with("′".as_bytes()) {
                        self.pos += "′".len();
                        items.push((start, Word::bp()));
                    } else {
                        items.push((start, Word::b()));
                    }
                }
                _ => return self.err("expected a letter (b, b', x, y) or `(`"),
            }
        }
    }

    /// One item, or two juxtaposed items forming a product node.
    fn combine(&self, mut items: Vec<(usize, Word)>, at: usize) -> Result<Word, WordSyntaxError> {
        match items.len() {
            0 => Err(WordSyntaxError { pos: at, msg: "empty word".into() }),
            1 => Ok(items.pop().expect("one item").1),
            2 => {
                let r = items.pop().expect("two items").1;
                let l = items.pop().expect("two items").1;
                Ok(Word::node(l, r))
            }
            _ => Err(WordSyntaxError {
                pos: items[2].0,
                msg: "ambiguous product: brackets are required for every product".into(),
            }),
        }
    }
}

/// Letter multiplicities of a word, indexed in the order `x, y, b, b'`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    counts: [u32; 4],
}

impl TypeVector {
    pub fn count(&self, l: Letter) -> u32 {
        self.counts[l.index()]
    }

    pub fn degree(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn from_counts(pairs: &[(Letter, u32)]) -> TypeVector {
        let mut t = TypeVector::default();
        for &(l, c) in pairs {
            t.counts[l.index()] += c;
        }
        t
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [Letter::B, Letter::Bp, Letter::X, Letter::Y]
            .iter()
            .filter(|l| self.count(**l) > 0)
            .map(|l| format!("{l}:{}", self.count(*l)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A finite linear combination of words with polynomial coefficients.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct NAPoly {
    terms: BTreeMap<Word, ParamPoly>,
}

impl NAPoly {
    pub fn new() -> Self {
        NAPoly::default()
    }

    pub fn monomial(word: Word, coeff: ParamPoly) -> Self {
        let mut p = NAPoly::new();
        p.add_term(word, coeff).expect("fresh polynomial");
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ParamPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Option<&ParamPoly> {
        self.terms.get(w)
    }

    pub fn remove(&mut self, w: &Word) -> Option<ParamPoly> {
        self.terms.remove(w)
    }

    pub fn add_term(&mut self, word: Word, coeff: ParamPoly) -> Result<(), CpolyError> {
        if coeff.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&word) {
            None => {
                self.terms.insert(word, coeff);
            }
            Some(old) => {
                let sum = old.add(&coeff)?;
                if !sum.is_zero() {
                    self.terms.insert(word, sum);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &NAPoly) -> Result<NAPoly, CpolyError> {
        let mut r = self.clone();
        for (w, c) in &other.terms {
            r.add_term(w.clone(), c.clone())?;
        }
        Ok(r)
    }

    pub fn sub(&self, other: &NAPoly) -> Result<NAPoly, CpolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NAPoly {
        NAPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect() }
    }

    /// Partition of the terms by letter type.
    pub fn homogeneous_components(&self) -> BTreeMap<TypeVector, NAPoly> {
        let mut out: BTreeMap<TypeVector, NAPoly> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.type_of()).or_default().terms.insert(w.clone(), c.clone());
        }
        out
    }
}

impl fmt::Debug for NAPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c})·{w}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Total order on letters used to canonicalize subtrees, given as a list
/// from smallest to largest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LetterOrder([Letter; 4]);

impl LetterOrder {
    pub fn new(ascending: [Letter; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for l in ascending {
            if std::mem::replace(&mut seen[l.index()], true) {
                return None;
            }
        }
        Some(LetterOrder(ascending))
    }

    fn rank(&self, l: Letter) -> u8 {
        self.0.iter().position(|&m| m == l).expect("complete order") as u8
    }
}

impl Default for LetterOrder {
    fn default() -> Self {
        LetterOrder(Letter::ALL)
    }
}

/// Normal form modulo anticommutativity `uv = -vu`: children are normalized
/// first, then swapped (flipping the sign) whenever the left one is larger.
/// Nodes with equal children are kept with sign `+1`.
pub fn anticomm_normal_form(w: &Word, order: &LetterOrder) -> (i8, Word) {
    let rank = |l: Letter| order.rank(l);
    fn go(w: &Word, rank: &impl Fn(Letter) -> u8) -> (i8, Word) {
        match w {
            Word::Leaf(_) => (1, w.clone()),
            Word::Node(a, b) => {
                let (sa, na) = go(a, rank);
                let (sb, nb) = go(b, rank);
                let s = sa * sb;
                if na.cmp_with(&nb, rank) == Ordering::Greater {
                    (-s, Word::node(nb, na))
                } else {
                    (s, Word::node(na, nb))
                }
            }
        }
    }
    go(w, &rank)
}

/// The eight degree-3 shapes of the λ/μ templates, with the slots `z, x, y`:
/// `(zx)y, (xz)y, y(zx), y(xz), (zy)x, (yz)x, x(zy), x(yz)`.
pub fn template_word(j: usize, z: &Word, x: &Word, y: &Word) -> Word {
    let n = |a: &Word, b: &Word| Word::node(a.clone(), b.clone());
    match j {
        0 => Word::node(n(z, x), y.clone()),
        1 => Word::node(n(x, z), y.clone()),
        2 => Word::node(y.clone(), n(z, x)),
        3 => Word::node(y.clone(), n(x, z)),
        4 => Word::node(n(z, y), x.clone()),
        5 => Word::node(n(y, z), x.clone()),
        6 => Word::node(x.clone(), n(z, y)),
        7 => Word::node(x.clone(), n(y, z)),
        _ => panic!("template index {j} out of range"),
    }
}

/// Pushes `z(xy) = Σ cⱼ·templateⱼ` onto the two-element anticommutative
/// basis `{y(zx), x(yz)}` and returns the coordinates `(λ, μ)` of
/// `z(xy) = λ·y(zx) + μ·x(yz)`.
pub fn anticommutative_reduce(coeffs: &[ParamPoly; 8]) -> Result<(ParamPoly, ParamPoly), CpolyError> {
    let order = LetterOrder::default();
    let (z, x, y) = (Word::b(), Word::x(), Word::y());
    let (sy, ny) = anticomm_normal_form(&template_word(2, &z, &x, &y), &order);
    let (sx, nx) = anticomm_normal_form(&template_word(7, &z, &x, &y), &order);
    let field = coeffs[0].field();
    let zero = ParamPoly::zero(field, coeffs[0].vars().clone());
    let (mut lam, mut mu) = (zero.clone(), zero);
    for (j, c) in coeffs.iter().enumerate() {
        let (s, nf) = anticomm_normal_form(&template_word(j, &z, &x, &y), &order);
        let target = if nf == ny {
            s * sy
        } else if nf == nx {
            s * sx
        } else {
            unreachable!("degree-3 multilinear words have two anticommutative classes")
        };
        let signed = if target > 0 { c.clone() } else { c.neg() };
        if nf == ny {
            lam = lam.add(&signed)?;
        } else {
            mu = mu.add(&signed)?;
        }
    }
    Ok((lam, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::FieldSpec;
    use crate::cpoly::VarList;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn c(v: i64) -> ParamPoly {
        let f = FieldSpec::Rationals;
        ParamPoly::constant(f, VarList::parameters(), f.from_i64(v))
    }

    #[test]
    fn parse_examples() {
        assert_eq!(w("(bx)y"), Word::node(Word::node(Word::b(), Word::x()), Word::y()));
        assert_eq!(w("b(xy)"), Word::node(Word::b(), Word::node(Word::x(), Word::y())));
        let e = Word::parse("bxy").unwrap_err();
        assert_eq!(e.pos, 2);
        assert_eq!(w("((bb')(xy))"), w("(bb')(xy)"));
        assert_eq!(w("b′x"), w("b'x"));
        for bad in ["", "(b)", "(bx", "bx)", "(bxy)z", "()", "b z"] {
            assert!(Word::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn nesting_is_bounded() {
        let nest = |d: usize| "(x".repeat(d) + "y" + &")".repeat(d);
        let deep = Word::parse(&nest(MAX_NESTING)).unwrap();
        assert_eq!(deep.degree(), MAX_NESTING + 1);
        assert_eq!(Word::parse(&deep.to_string()).unwrap(), deep);
        let err = Word::parse(&nest(100_000)).unwrap_err();
        assert!(err.msg.contains("too deeply"));
    }

    #[test]
    fn render_is_parenthesized_except_outermost() {
        for s in ["(bx)y", "b(xy)", "(bb')(xy)", "x", "((b'(bx))y)x"] {
            assert_eq!(w(s).to_string(), s);
        }
    }

    #[test]
    fn type_examples() {
        assert_eq!(w("(bx)y").type_of(), TypeVector::from_counts(&[(Letter::B, 1), (Letter::X, 1), (Letter::Y, 1)]));
        let t = w("(bb')(xy)").type_of();
        assert_eq!(t.to_string(), "{b:1, b':1, x:1, y:1}");
        assert_eq!(t.degree(), 4);
        assert_eq!(w("x").type_of(), TypeVector::from_counts(&[(Letter::X, 1)]));
    }

    #[test]
    fn homogeneous_examples() {
        let mut p = NAPoly::monomial(w("xy"), c(1));
        p.add_term(w("x(xy)"), c(1)).unwrap();
        let comps = p.homogeneous_components();
        assert_eq!(comps.len(), 2);
        assert!(comps.contains_key(&TypeVector::from_counts(&[(Letter::X, 1), (Letter::Y, 1)])));
        assert!(comps.contains_key(&TypeVector::from_counts(&[(Letter::X, 2), (Letter::Y, 1)])));

        assert!(NAPoly::new().homogeneous_components().is_empty());

        let mut q = NAPoly::monomial(w("xy"), c(2));
        q.add_term(w("xy"), c(-1)).unwrap();
        let comps = q.homogeneous_components();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps.values().next().unwrap().coeff(&w("xy")), Some(&c(1)));
    }

    #[test]
    fn normal_form_examples() {
        let xyb = LetterOrder::default();
        assert_eq!(anticomm_normal_form(&w("yx"), &xyb), (-1, w("xy")));
        // z := b with x < y < b
        assert_eq!(anticomm_normal_form(&w("(by)x"), &xyb), (1, w("x(yb)")));
        assert_eq!(anticomm_normal_form(&w("xx"), &xyb), (1, w("xx")));
        let other = LetterOrder::new([Letter::B, Letter::Bp, Letter::X, Letter::Y]).unwrap();
        assert_eq!(anticomm_normal_form(&w("xb"), &other), (-1, w("bx")));
        assert!(LetterOrder::new([Letter::B, Letter::B, Letter::X, Letter::Y]).is_none());
    }

    fn onehot(i: usize) -> [ParamPoly; 8] {
        std::array::from_fn(|j| c(if j == i { 1 } else { 0 }))
    }

    #[test]
    fn anticommutative_reduction() {
        // Jacobi point
        let mut jac = onehot(99);
        jac[2] = c(-1);
        jac[7] = c(-1);
        assert_eq!(anticommutative_reduce(&jac).unwrap(), (c(-1), c(-1)));
        assert_eq!(anticommutative_reduce(&onehot(99)).unwrap(), (c(0), c(0)));
        assert_eq!(anticommutative_reduce(&onehot(0)).unwrap(), (c(-1), c(0)));
        // λ = −λ₁+λ₂+λ₃−λ₄, μ = λ₅−λ₆−λ₇+λ₈
        let signs = [(-1, 0), (1, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (0, -1), (0, 1)];
        for (i, (l, m)) in signs.into_iter().enumerate() {
            assert_eq!(anticommutative_reduce(&onehot(i)).unwrap(), (c(l), c(m)), "λ{}", i + 1);
        }
    }

    #[test]
    fn symbolic_reduction() {
        let vars = VarList::parameters();
        let f = FieldSpec::Rationals;
        let ls: [ParamPoly; 8] = std::array::from_fn(|i| ParamPoly::var(f, vars.clone(), i));
        let (lam, mu) = anticommutative_reduce(&ls).unwrap();
        assert_eq!(lam, ParamPoly::parse("-l1 + l2 + l3 - l4", f, vars.clone()).unwrap());
        assert_eq!(mu, ParamPoly::parse("l5 - l6 - l7 + l8", f, vars).unwrap());
    }

    pub(crate) fn word_strategy() -> impl Strategy<Value = Word> {
        let leaf = prop_oneof![Just(Word::b()), Just(Word::bp()), Just(Word::x()), Just(Word::y())];
        leaf.prop_recursive(4, 16, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| Word::node(a, b)))
    }

    /// Random binary tree over a fixed leaf sequence.
    fn rebracket(leaves: &[Letter], cuts: &mut impl Iterator<Item = usize>) -> Word {
        if leaves.len() == 1 {
            return Word::leaf(leaves[0]);
        }
        let k = 1 + cuts.next().unwrap_or(0) % (leaves.len() - 1);
        Word::node(rebracket(&leaves[..k], cuts), rebracket(&leaves[k..], cuts))
    }

    proptest! {
        #[test]
        fn render_parse_roundtrip(word in word_strategy()) {
            prop_assert_eq!(Word::parse(&word.to_string()).unwrap(), word);
        }

        #[test]
        fn type_ignores_brackets(word in word_strategy(), cuts in prop::collection::vec(any::<usize>(), 16),
                                 perm in any::<u64>()) {
            let mut leaves = word.leaves();
            // deterministic shuffle from the sampled seed
            let mut s = perm;
            for i in (1..leaves.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                leaves.swap(i, (s >> 33) as usize % (i + 1));
            }
            let other = rebracket(&leaves, &mut cuts.into_iter());
            prop_assert_eq!(other.type_of(), word.type_of());
            prop_assert_eq!(other.degree(), word.degree());
        }

        #[test]
        fn normal_form_properties(u in word_strategy(), v in word_strategy()) {
            let o = LetterOrder::default();
            let (s, nf) = anticomm_normal_form(&u, &o);
            prop_assert_eq!(anticomm_normal_form(&nf, &o), (1, nf.clone()));
            prop_assert_eq!(nf.type_of(), u.type_of());
            prop_assert!(s == 1 || s == -1);
            let (_, nu) = anticomm_normal_form(&u, &o);
            let (_, nv) = anticomm_normal_form(&v, &o);
            if nu != nv {
                let (s1, w1) = anticomm_normal_form(&Word::node(u.clone(), v.clone()), &o);
                let (s2, w2) = anticomm_normal_form(&Word::node(v, u), &o);
                prop_assert_eq!(w1, w2);
                prop_assert_eq!(s1, -s2);
            }
        }

        #[test]
        fn components_reconstruct(words in prop::collection::vec((word_strategy(), -3i64..4), 0..12)) {
            let mut p = NAPoly::new();
            for (word, k) in words {
                p.add_term(word, c(k)).unwrap();
            }
            let comps = p.homogeneous_components();
            let mut sum = NAPoly::new();
            for (t, comp) in &comps {
                prop_assert!(!comp.is_zero());
                for (word, _) in comp.terms() {
                    prop_assert_eq!(&word.type_of(), t);
                }
                sum = sum.add(comp).unwrap();
            }
            prop_assert_eq!(sum, p);
        }
    }
}
