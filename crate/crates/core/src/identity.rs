//! The λ/μ degree-3 identities as rewriting steps on words, and the three
//! fixed expansion pipelines that produce the 128 obstruction polynomials.
//!
//! The identities
//!
//! ```text
//! z(xy) = λ1(zx)y + λ2(xz)y + λ3y(zx) + λ4y(xz) + λ5(zy)x + λ6(yz)x + λ7x(zy) + λ8x(yz)
//! (xy)z = μ1(zx)y + μ2(xz)y + μ3y(zx) + μ4y(xz) + μ5(zy)x + μ6(yz)x + μ7x(zy) + μ8x(yz)
//! ```
//!
//! are not confluent, so every pipeline fixes which node is rewritten with
//! which rule. The polynomials are the coordinates of the resulting
//! identities over fixed bases of words of bracket depth at most two.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use thiserror::Error;

use crate::coeff::FieldSpec;
use crate::cpoly::{CpolyError, ParamPoly, PrintedPoly, VarList};
use crate::magma::{template_word, LetterClass, NAPoly, Side, Word};

/// The bundled transcription of the 128 reference polynomials.
pub const APPENDIX_A: &str = include_str!("../data/appendix_a.txt");

pub const SYSTEM_SIZE: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("rule {rule} cannot be applied to `{node}`")]
    BadShape { rule: RuleKind, node: String },
    #[error("path {path:?} does not address a node of `{word}`")]
    BadPath { word: String, path: Vec<Side> },
    #[error("`{0}` is not a term of the polynomial")]
    NotATerm(String),
    #[error("expected {expected} polynomials, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("terms outside every coordinate block: {0}")]
    Extraction(String),
    #[error("line {line}: {msg}")]
    Data { line: usize, msg: String },
    #[error(transparent)]
    Poly(#[from] CpolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// `z(xy) = Σ λⱼ·templateⱼ`
    Lambda,
    /// `(xy)z = Σ μⱼ·templateⱼ`
    Mu,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Lambda => "λ",
            RuleKind::Mu => "μ",
        })
    }
}

impl RuleKind {
    pub fn swapped(self) -> RuleKind {
        match self {
            RuleKind::Lambda => RuleKind::Mu,
            RuleKind::Mu => RuleKind::Lambda,
        }
    }

    /// Index of the j-th coefficient (0-based) in the parameter list.
    pub fn param_index(self, j: usize) -> usize {
        match self {
            RuleKind::Lambda => j,
            RuleKind::Mu => 8 + j,
        }
    }

    /// Binds the template slots `(z, x, y)` from a product node.
    ///
    /// λ needs a compound right child: `z := left, x := right.left, y := right.right`.
    /// μ needs a compound left child: `x := left.left, y := left.right, z := right`.
    pub fn bind(self, node: &Word) -> Result<(&Word, &Word, &Word), IdentityError> {
        let bad = || IdentityError::BadShape { rule: self, node: node.to_string() };
        let (l, r) = node.children().ok_or_else(bad)?;
        match self {
            RuleKind::Lambda => {
                let (x, y) = r.children().ok_or_else(bad)?;
                Ok((l, x, y))
            }
            RuleKind::Mu => {
                let (x, y) = l.children().ok_or_else(bad)?;
                Ok((r, x, y))
            }
        }
    }

    /// μ when the left child is compound, otherwise λ when the right one is.
    pub fn for_node(node: &Word) -> Result<RuleKind, IdentityError> {
        match node.children() {
            Some((l, _)) if !l.is_leaf() => Ok(RuleKind::Mu),
            Some((_, r)) if !r.is_leaf() => Ok(RuleKind::Lambda),
            _ => Err(IdentityError::BadShape { rule: RuleKind::Lambda, node: node.to_string() }),
        }
    }
}

/// Coefficient source for one rewriting step.
#[derive(Clone)]
struct Params {
    field: FieldSpec,
    vars: Arc<VarList>,
}

impl Params {
    fn new(field: FieldSpec) -> Self {
        Params { field, vars: VarList::parameters() }
    }

    fn coeff(&self, rule: RuleKind, j: usize) -> ParamPoly {
        ParamPoly::var(self.field, self.vars.clone(), rule.param_index(j))
    }

    fn one(&self) -> ParamPoly {
        ParamPoly::one(self.field, self.vars.clone())
    }
}

/// Replaces the subtree of `word` at `path` by the eight instantiated
/// templates of `rule`, scaling by `coeff` and the template coefficients
/// given by `coeff_of(j)`.
fn rewrite(
    word: &Word,
    coeff: &ParamPoly,
    path: &[Side],
    rule: RuleKind,
    coeff_of: &dyn Fn(usize) -> ParamPoly,
) -> Result<NAPoly, IdentityError> {
    let node =
        word.at_path(path).ok_or_else(|| IdentityError::BadPath { word: word.to_string(), path: path.to_vec() })?;
    let (z, x, y) = rule.bind(node)?;
    let mut out = NAPoly::new();
    for j in 0..8 {
        let replaced = word.replace_at(path, template_word(j, z, x, y)).expect("path checked above");
        out.add_term(replaced, coeff.mul(&coeff_of(j))?)?;
    }
    Ok(out)
}

/// Rewrites the node at `path` inside the term `target` of `p` with `rule`.
pub fn expand_at(p: &NAPoly, target: &Word, path: &[Side], rule: RuleKind) -> Result<NAPoly, IdentityError> {
    let coeff = p.coeff(target).ok_or_else(|| IdentityError::NotATerm(target.to_string()))?;
    let params = Params { field: coeff.field(), vars: coeff.vars().clone() };
    let expanded = rewrite(target, coeff, path, rule, &|j| params.coeff(rule, j))?;
    let mut rest = p.clone();
    rest.remove(target);
    Ok(rest.add(&expanded)?)
}

/// A named block of coordinate words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalBasis {
    pub name: String,
    pub words: Vec<Word>,
}

impl CanonicalBasis {
    fn new(name: impl Into<String>, words: Vec<Word>) -> Self {
        let b = CanonicalBasis { name: name.into(), words };
        debug_assert_eq!(b.words.iter().collect::<BTreeSet<_>>().len(), b.words.len());
        debug_assert!(b.words.iter().all(|w| w.type_of() == b.words[0].type_of()));
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pipeline {
    /// `(bx)y, (xb)y, y(bx), y(xb)`, indices 1..=32
    P1,
    /// `(bb')(xy)`, indices 33..=80
    P2,
    /// `(xy)(bb')`, indices 81..=128
    P3,
}

impl Pipeline {
    pub fn range(self) -> RangeInclusive<usize> {
        match self {
            Pipeline::P1 => 1..=32,
            Pipeline::P2 => 33..=80,
            Pipeline::P3 => 81..=128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub pipeline: Pipeline,
    pub block: String,
    pub basis_word: Word,
}

/// An expanded identity `0 = delta` together with the coordinate blocks
/// that `delta` is read off against.
#[derive(Debug, Clone)]
pub struct StageExpansion {
    pub pipeline: Pipeline,
    pub delta: NAPoly,
    pub blocks: Vec<CanonicalBasis>,
}

impl StageExpansion {
    /// Coordinates of `delta`, block by block. Fails if `delta` has a term
    /// outside every block.
    pub fn extract(&self) -> Result<Vec<(ParamPoly, Provenance)>, IdentityError> {
        let mut seen = BTreeSet::new();
        let zero = self.delta.terms().next().map(|(_, c)| ParamPoly::zero(c.field(), c.vars().clone()));
        let mut out = Vec::new();
        for block in &self.blocks {
            for w in &block.words {
                seen.insert(w);
                let c = match (self.delta.coeff(w), &zero) {
                    (Some(c), _) => c.clone(),
                    (None, Some(z)) => z.clone(),
                    (None, None) => ParamPoly::zero(FieldSpec::Rationals, VarList::parameters()),
                };
                out.push((c, Provenance { pipeline: self.pipeline, block: block.name.clone(), basis_word: w.clone() }));
            }
        }
        let stray: Vec<String> =
            self.delta.terms().filter(|(w, _)| !seen.contains(w)).map(|(w, _)| w.to_string()).collect();
        if !stray.is_empty() {
            return Err(IdentityError::Extraction(stray.join(", ")));
        }
        Ok(out)
    }
}

fn w(s: &str) -> Word {
    Word::parse(s).expect("static word")
}

fn words(list: &[&str]) -> Vec<Word> {
    list.iter().map(|s| w(s)).collect()
}

/// `(bx)y, (xb)y, y(bx), y(xb), (by)x, (yb)x, x(by), x(yb)`
pub fn stage1_basis() -> CanonicalBasis {
    CanonicalBasis::new("stage1", words(&["(bx)y", "(xb)y", "y(bx)", "y(xb)", "(by)x", "(yb)x", "x(by)", "x(yb)"]))
}

/// The coordinate blocks shared by the two four-letter pipelines: the two
/// mixed blocks followed by the four blocks `[κ(χ)]·χ'` / `χ'·[κ(χ)]`.
pub fn mixed_blocks() -> Vec<CanonicalBasis> {
    let m1 = words(&[
        "(b'y)(bx)",
        "(yb')(bx)",
        "(bx)(b'y)",
        "(bx)(yb')",
        "(b'y)(xb)",
        "(yb')(xb)",
        "(xb)(b'y)",
        "(xb)(yb')",
    ]);
    let m2 = words(&[
        "(b'x)(by)",
        "(xb')(by)",
        "(by)(b'x)",
        "(by)(xb')",
        "(b'x)(yb)",
        "(xb')(yb)",
        "(yb)(b'x)",
        "(yb)(xb')",
    ]);
    // inner words in μ-template order with x := b, y := b', z := χ
    let kappa = |chi: &Word| -> Vec<Word> { (0..8).map(|j| template_word(j, chi, &Word::b(), &Word::bp())).collect() };
    let (x, y) = (Word::x(), Word::y());
    let right = |inner: Vec<Word>, outer: &Word| inner.into_iter().map(|k| Word::node(k, outer.clone())).collect();
    let left = |inner: Vec<Word>, outer: &Word| inner.into_iter().map(|k| Word::node(outer.clone(), k)).collect();
    vec![
        CanonicalBasis::new("psi5", m1),
        CanonicalBasis::new("psi6", m2),
        CanonicalBasis::new("kappa(b,b',x)*y", right(kappa(&x), &y)),
        CanonicalBasis::new("y*kappa(b,b',x)", left(kappa(&x), &y)),
        CanonicalBasis::new("kappa(b,b',y)*x", right(kappa(&y), &x)),
        CanonicalBasis::new("x*kappa(b,b',y)", left(kappa(&y), &x)),
    ]
}

/// Is `word` a product of `b` with a compound word made only of `x`, `y`?
fn is_chi_bracket_against_b(word: &Word) -> bool {
    let pure_chi = |v: &Word| !v.is_leaf() && v.leaves().iter().all(|l| l.class() == LetterClass::Chi);
    match word.children() {
        Some((l, r)) => (*l == Word::b() && pure_chi(r)) || (*r == Word::b() && pure_chi(l)),
        None => false,
    }
}

fn root_rewrite(word: &Word, coeff: &ParamPoly, params: &Params) -> Result<NAPoly, IdentityError> {
    let rule = RuleKind::for_node(word)?;
    rewrite(word, coeff, &[], rule, &|j| params.coeff(rule, j))
}

/// Expansion for one of the three-letter starting words
/// `(bx)y, (xb)y, y(bx), y(xb)`, minus the starting word itself.
pub fn stage1_expansion(start: &Word, field: FieldSpec) -> Result<StageExpansion, IdentityError> {
    let params = Params::new(field);
    let mut acc = NAPoly::new();
    for (word, c) in root_rewrite(start, &params.one(), &params)?.terms() {
        if is_chi_bracket_against_b(word) {
            acc = acc.add(&root_rewrite(word, c, &params)?)?;
        } else {
            acc.add_term(word.clone(), c.clone())?;
        }
    }
    acc.add_term(start.clone(), params.one().neg())?;
    let mut basis = stage1_basis();
    basis.name = format!("T={start}");
    Ok(StageExpansion { pipeline: Pipeline::P1, delta: acc, blocks: vec![basis] })
}

/// The compound child of a root whose other child is a letter.
fn compound_child_path(word: &Word) -> Result<[Side; 1], IdentityError> {
    match word.children() {
        Some((l, _)) if !l.is_leaf() => Ok([Side::Left]),
        Some((_, r)) if !r.is_leaf() => Ok([Side::Right]),
        _ => Err(IdentityError::BadShape { rule: RuleKind::Lambda, node: word.to_string() }),
    }
}

fn inner_rewrite(word: &Word, coeff: &ParamPoly, params: &Params) -> Result<NAPoly, IdentityError> {
    let path = compound_child_path(word)?;
    let node = word.at_path(&path).expect("compound child");
    let rule = RuleKind::for_node(node)?;
    rewrite(word, coeff, &path, rule, &|j| params.coeff(rule, j))
}

/// Difference of the two decompositions of a product of `(bb')` and `(xy)`.
///
/// Positive side: the root step keeps `(xy)` opaque in the z-slot; each term
/// then has its `(xy)·β` bracket expanded, and the whole term is expanded at
/// the root. Negative side: the root step keeps `(bb')` opaque; each term
/// then has its `(bb')·χ` bracket expanded.
///
/// With `swap_top`, the coefficients of the two root steps are taken from
/// the other parameter family (the λ ↔ μ top-factor mirror).
fn mixed_expansion(start: &Word, field: FieldSpec, swap_top: bool) -> Result<NAPoly, IdentityError> {
    let params = Params::new(field);
    let xy = w("xy");
    let (left, right) = start.children().expect("four-letter start");
    let (pos_rule, neg_rule) = if *right == xy {
        (RuleKind::Mu, RuleKind::Lambda)
    } else if *left == xy {
        (RuleKind::Lambda, RuleKind::Mu)
    } else {
        return Err(IdentityError::BadShape { rule: RuleKind::Lambda, node: start.to_string() });
    };
    let top = |rule: RuleKind| if swap_top { rule.swapped() } else { rule };

    let one = params.one();
    let mut positive = NAPoly::new();
    let first = rewrite(start, &one, &[], pos_rule, &|j| params.coeff(top(pos_rule), j))?;
    for (word, c) in first.terms() {
        for (inner, c2) in inner_rewrite(word, c, &params)?.terms() {
            positive = positive.add(&root_rewrite(inner, c2, &params)?)?;
        }
    }

    let mut negative = NAPoly::new();
    let first = rewrite(start, &one, &[], neg_rule, &|j| params.coeff(top(neg_rule), j))?;
    for (word, c) in first.terms() {
        negative = negative.add(&inner_rewrite(word, c, &params)?)?;
    }
    Ok(positive.sub(&negative)?)
}

pub fn stage2_expansion(field: FieldSpec) -> Result<StageExpansion, IdentityError> {
    Ok(StageExpansion {
        pipeline: Pipeline::P2,
        delta: mixed_expansion(&w("(bb')(xy)"), field, false)?,
        blocks: mixed_blocks(),
    })
}

pub fn stage3_expansion(field: FieldSpec) -> Result<StageExpansion, IdentityError> {
    Ok(StageExpansion {
        pipeline: Pipeline::P3,
        delta: mixed_expansion(&w("(xy)(bb')"), field, false)?,
        blocks: mixed_blocks(),
    })
}

/// Stage-2 expansion with the root-step coefficients taken from the other
/// family; by construction this must coincide with stage 3.
pub fn stage2_mirrored(field: FieldSpec) -> Result<StageExpansion, IdentityError> {
    Ok(StageExpansion {
        pipeline: Pipeline::P3,
        delta: mixed_expansion(&w("(bb')(xy)"), field, true)?,
        blocks: mixed_blocks(),
    })
}

pub fn stage1_starts() -> Vec<Word> {
    words(&["(bx)y", "(xb)y", "y(bx)", "y(xb)"])
}

fn collect(exps: Vec<StageExpansion>) -> Result<Vec<(ParamPoly, Provenance)>, IdentityError> {
    let mut out = Vec::new();
    for e in exps {
        out.extend(e.extract()?);
    }
    Ok(out)
}

/// f₁..f₃₂ with provenance.
pub fn generate_stage1(field: FieldSpec) -> Result<Vec<(ParamPoly, Provenance)>, IdentityError> {
    collect(stage1_starts().iter().map(|s| stage1_expansion(s, field)).collect::<Result<_, _>>()?)
}

/// f₃₃..f₈₀ with provenance.
pub fn generate_stage2(field: FieldSpec) -> Result<Vec<(ParamPoly, Provenance)>, IdentityError> {
    collect(vec![stage2_expansion(field)?])
}

/// f₈₁..f₁₂₈ with provenance.
pub fn generate_stage3(field: FieldSpec) -> Result<Vec<(ParamPoly, Provenance)>, IdentityError> {
    collect(vec![stage3_expansion(field)?])
}

/// The ordered obstruction polynomials f₁..f₁₂₈.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionSystem {
    field: FieldSpec,
    polys: Vec<ParamPoly>,
    provenance: Vec<Provenance>,
}

impl ObstructionSystem {
    /// Runs the three pipelines (concurrently) and concatenates them.
    pub fn generate(field: FieldSpec) -> Result<Self, IdentityError> {
        let (s1, s2, s3) = std::thread::scope(|scope| {
            let h1 = scope.spawn(|| generate_stage1(field));
            let h2 = scope.spawn(|| generate_stage2(field));
            let s3 = generate_stage3(field);
            (h1.join().expect("stage 1"), h2.join().expect("stage 2"), s3)
        });
        let all: Vec<_> = s1?.into_iter().chain(s2?).chain(s3?).collect();
        if all.len() != SYSTEM_SIZE {
            return Err(IdentityError::LengthMismatch { expected: SYSTEM_SIZE, found: all.len() });
        }
        let (polys, provenance) = all.into_iter().unzip();
        Ok(ObstructionSystem { field, polys, provenance })
    }

    /// Sequential variant of [`generate`](Self::generate).
    pub fn generate_sequential(field: FieldSpec) -> Result<Self, IdentityError> {
        let all: Vec<_> =
            generate_stage1(field)?.into_iter().chain(generate_stage2(field)?).chain(generate_stage3(field)?).collect();
        let (polys, provenance) = all.into_iter().unzip();
        Ok(ObstructionSystem { field, polys, provenance })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[ParamPoly] {
        &self.polys
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// `f_i`, 1-based.
    pub fn get(&self, i: usize) -> Option<&ParamPoly> {
        i.checked_sub(1).and_then(|k| self.polys.get(k))
    }

    /// The polynomials with 1-based indices in `range`.
    pub fn subsystem(&self, range: RangeInclusive<usize>) -> Vec<ParamPoly> {
        let (lo, hi) = (*range.start(), *range.end());
        self.polys[lo.saturating_sub(1).min(self.len())..hi.min(self.len())].to_vec()
    }
}

/// The bundled (or user-supplied) reference polynomials, as printed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSystem {
    printed: Vec<PrintedPoly>,
}

impl ReferenceSystem {
    pub fn bundled() -> Self {
        Self::parse(APPENDIX_A).expect("bundled reference data parses")
    }

    /// Parses lines `f<i> = <poly>` with `i` running 1, 2, ... in order.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, IdentityError> {
        let vars = VarList::parameters();
        let mut printed = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| IdentityError::Data { line: k + 1, msg };
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("expected `f<i> = <poly>`".into()))?;
            let idx: usize = lhs
                .trim()
                .strip_prefix('f')
                .and_then(|s| s.trim_start_matches('(').trim_end_matches(')').parse().ok())
                .ok_or_else(|| err(format!("bad label `{}`", lhs.trim())))?;
            if idx != printed.len() + 1 {
                return Err(err(format!("expected f{}, found f{idx}", printed.len() + 1)));
            }
            let rhs = rhs.trim().trim_end_matches(';');
            printed.push(PrintedPoly::parse(rhs, &vars).map_err(|e| err(e.to_string()))?);
        }
        Ok(ReferenceSystem { printed })
    }

    pub fn len(&self) -> usize {
        self.printed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.printed.is_empty()
    }

    pub fn printed(&self) -> &[PrintedPoly] {
        &self.printed
    }

    pub fn polys(&self, field: FieldSpec) -> Result<Vec<ParamPoly>, IdentityError> {
        let vars = VarList::parameters();
        Ok(self.printed.iter().map(|p| p.to_poly(field, vars.clone())).collect::<Result<_, _>>()?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub index: usize,
    pub generated: String,
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppendixReport {
    pub total: usize,
    pub matched: usize,
    pub mismatches: Vec<Mismatch>,
}

impl AppendixReport {
    pub fn all_match(&self) -> bool {
        self.mismatches.is_empty() && self.matched == self.total
    }
}

/// Index-by-index exact comparison.
pub fn verify_appendix(generated: &[ParamPoly], reference: &[ParamPoly]) -> Result<AppendixReport, IdentityError> {
    if generated.len() != reference.len() {
        return Err(IdentityError::LengthMismatch { expected: generated.len(), found: reference.len() });
    }
    let mismatches: Vec<Mismatch> = generated
        .iter()
        .zip(reference)
        .enumerate()
        .filter(|(_, (g, r))| g != r)
        .map(|(i, (g, r))| Mismatch { index: i + 1, generated: g.to_string(), reference: r.to_string() })
        .collect();
    Ok(AppendixReport { total: generated.len(), matched: generated.len() - mismatches.len(), mismatches })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiniCase {
    Commutative,
}

/// Variables `lam`, `lamp` (λ, λ′).
pub fn mini_vars() -> Arc<VarList> {
    VarList::new(["lam", "lamp"]).expect("two variables")
}

/// The constraints forced on a commutative variety: `λ − λ′`, `λ² − 1`, `λ² + λ`.
pub fn mini_system(case: MiniCase) -> Vec<ParamPoly> {
    match case {
        MiniCase::Commutative => ["lam - lamp", "lam^2 - 1", "lam^2 + lam"]
            .iter()
            .map(|t| ParamPoly::parse(t, FieldSpec::Rationals, mini_vars()).expect("static polynomial"))
            .collect(),
    }
}
