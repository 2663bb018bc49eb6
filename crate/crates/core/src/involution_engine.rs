//! Commuting isometric involutions, complementary operators, seed vectors
//! and seed orthogonalization for signatures with `r + s ≤ 8`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::clifford_rep::{CliffordRep, Signature};
use crate::exactlin::{self, add_vec, is_zero_vec, scale_vec, LinError, MetricSpace, Operator, Scalar, SignedPerm, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("no involution scheme for signature {0}")]
    NotInCatalog(Signature),
    #[error("involution {0} is not an isometric involution")]
    NotIsometricInvolution(usize),
    #[error("involutions {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("table entry ({0},{1}) disagrees with the matrices")]
    TableMismatch(usize, usize),
    #[error("complementary operator {0} has the wrong isometry type")]
    WrongTag(usize),
    #[error("no spacelike common eigenvector")]
    NoSpacelikeSeed,
    #[error("omega {0} is not symmetric with square -Id")]
    BadOmega(usize),
    #[error("omegas {0} and {1} do not anticommute")]
    OmegasCommute(usize, usize),
    #[error("operator {0} to preserve does not commute with the omegas or does not fix the seed")]
    BadPreserve(usize),
    #[error("seed is not spacelike")]
    NotSpacelike,
    #[error("orthogonalization needs a nested radical")]
    NestedRadical,
    #[error("orthogonalization needs a surd but HTYPE_SURD=off")]
    SurdDisabled,
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// `sign · J_{i1} ⋯ J_{ik}` with 1-based increasing indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignedWord {
    pub sign: i8,
    pub word: Vec<usize>,
}

impl SignedWord {
    pub fn new(word: &[usize]) -> Self {
        SignedWord { sign: 1, word: word.to_vec() }
    }

    pub fn negated(&self) -> Self {
        SignedWord { sign: -self.sign, word: self.word.clone() }
    }

    pub fn evaluate(&self, rep: &CliffordRep) -> Operator {
        let op = rep.word_operator(&self.word);
        if self.sign < 0 {
            op.neg()
        } else {
            op
        }
    }

    /// Number of generators in the word that square to `+Id`.
    fn negative_count(&self, sig: Signature) -> usize {
        self.word.iter().filter(|&&k| k > sig.r).count()
    }

    /// Whether `J_I` and `J_K` anticommute in the Clifford algebra.
    pub fn anticommutes(&self, other: &SignedWord) -> bool {
        let common = self.word.iter().filter(|k| other.word.contains(k)).count();
        (self.word.len() * other.word.len() - common) % 2 == 1
    }
}

impl std::fmt::Display for SignedWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        for k in &self.word {
            write!(f, "J{k}")?;
        }
        if self.word.is_empty() {
            write!(f, "Id")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryTag {
    Isometry,
    AntiIsometry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Complementary {
    pub operator: SignedWord,
    pub tag: IsometryTag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "a")]
    Anticommute,
    #[serde(rename = "c")]
    Commute,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionScheme {
    pub signature: Signature,
    pub involutions: Vec<SignedWord>,
    pub complementary: Vec<Complementary>,
    /// Row `i`, column `j`: relation between involution `i` and complementary operator `j`.
    pub table: Vec<Vec<Relation>>,
    /// Symmetric operators with square `-Id` used to orthogonalize the seed.
    pub omegas: Vec<SignedWord>,
}

struct CatalogEntry {
    r: usize,
    s: usize,
    involutions: &'static [&'static [usize]],
    complementary: &'static [&'static [usize]],
    omegas: &'static [&'static [usize]],
}

const P08: &[&[usize]] = &[&[1, 2, 3, 4], &[1, 2, 5, 6], &[2, 3, 5, 7], &[1, 2, 7, 8]];

#[rustfmt::skip]
const CATALOG: &[CatalogEntry] = &[
    CatalogEntry { r: 1, s: 0, involutions: &[], complementary: &[], omegas: &[] },
    CatalogEntry { r: 0, s: 1, involutions: &[], complementary: &[], omegas: &[] },
    CatalogEntry { r: 2, s: 0, involutions: &[], complementary: &[], omegas: &[] },
    CatalogEntry { r: 1, s: 1, involutions: &[], complementary: &[], omegas: &[] },
    CatalogEntry { r: 0, s: 2, involutions: &[], complementary: &[], omegas: &[] },
    CatalogEntry { r: 0, s: 3, involutions: &[], complementary: &[], omegas: &[&[1, 2, 3]] },
    CatalogEntry { r: 3, s: 0, involutions: &[&[1, 2, 3]], complementary: &[], omegas: &[] },
    CatalogEntry { r: 1, s: 2, involutions: &[&[1, 2, 3]], complementary: &[&[2]], omegas: &[] },
    CatalogEntry { r: 0, s: 4, involutions: &[&[1, 2, 3, 4]], complementary: &[&[1]], omegas: &[] },
    CatalogEntry { r: 4, s: 0, involutions: &[&[1, 2, 3, 4]], complementary: &[], omegas: &[] },
    CatalogEntry { r: 2, s: 2, involutions: &[&[1, 2, 3, 4]], complementary: &[&[1]], omegas: &[] },
    CatalogEntry { r: 0, s: 5, involutions: &[&[1, 2, 3, 4]], complementary: &[&[5]],
                   omegas: &[&[1, 2, 5], &[1, 3, 5], &[1, 4, 5]] },
    CatalogEntry { r: 5, s: 0, involutions: &[&[1, 2, 3, 4], &[1, 2, 5]], complementary: &[&[1], &[2, 3]], omegas: &[] },
    CatalogEntry { r: 3, s: 2, involutions: &[&[2, 3, 4, 5], &[1, 2, 3]], complementary: &[&[2], &[2, 4]], omegas: &[] },
    CatalogEntry { r: 2, s: 3, involutions: &[&[1, 2, 3, 4], &[1, 4, 5]], complementary: &[&[1], &[1, 2]], omegas: &[] },
    CatalogEntry { r: 0, s: 6, involutions: &[&[1, 2, 3, 4], &[1, 2, 5, 6]], complementary: &[&[1], &[5], &[2, 3, 5]],
                   omegas: &[&[1, 3, 5], &[1, 3, 6]] },
    CatalogEntry { r: 6, s: 0, involutions: &[&[1, 2, 3, 4], &[1, 2, 5, 6], &[1, 4, 5]],
                   complementary: &[&[1], &[5], &[5, 6]], omegas: &[] },
    CatalogEntry { r: 4, s: 2, involutions: &[&[1, 2, 3, 4], &[1, 2, 5, 6]], complementary: &[&[1], &[2, 3]],
                   omegas: &[&[1, 3, 5], &[2, 3, 5]] },
    CatalogEntry { r: 3, s: 3, involutions: &[&[1, 2, 4, 5], &[2, 3, 5, 6], &[1, 2, 3]],
                   complementary: &[&[1], &[3], &[1, 4]], omegas: &[] },
    CatalogEntry { r: 0, s: 7, involutions: &[&[1, 2, 3, 4], &[1, 2, 5, 6], &[2, 3, 6, 7]],
                   complementary: &[&[1], &[5], &[7], &[5, 6, 7]], omegas: &[&[1, 3, 6]] },
    CatalogEntry { r: 7, s: 0, involutions: &[&[1, 2, 3, 4], &[1, 2, 5, 6], &[2, 3, 6, 7], &[1, 4, 5]],
                   complementary: &[&[1], &[5], &[7]], omegas: &[] },
    CatalogEntry { r: 5, s: 2, involutions: &[&[1, 2, 3, 4], &[1, 2, 6, 7], &[5, 6, 7]],
                   complementary: &[&[1], &[2, 3]], omegas: &[&[1, 3, 6], &[1, 3, 7]] },
    CatalogEntry { r: 4, s: 3, involutions: &[&[1, 2, 3, 4], &[1, 2, 5, 6], &[2, 3, 6, 7]],
                   complementary: &[&[1], &[2, 3], &[1, 2]], omegas: &[&[1, 3, 6]] },
    CatalogEntry { r: 3, s: 4, involutions: &[&[1, 2, 4, 5], &[2, 3, 5, 6], &[1, 2, 6, 7], &[3, 4, 5]],
                   complementary: &[&[1], &[3], &[7]], omegas: &[] },
    CatalogEntry { r: 0, s: 8, involutions: P08, complementary: &[&[1, 5], &[1, 3], &[1, 2], &[8]], omegas: &[] },
    CatalogEntry { r: 8, s: 0, involutions: P08, complementary: &[&[1, 5], &[1, 3], &[1, 2], &[8]], omegas: &[] },
    CatalogEntry { r: 6, s: 2, involutions: &[&[1, 2, 3, 4], &[1, 2, 5, 6], &[1, 2, 7, 8]],
                   complementary: &[&[1], &[5], &[7], &[1, 3, 5, 7]], omegas: &[&[1, 3, 5, 7], &[1, 3, 5, 8]] },
    CatalogEntry { r: 5, s: 3, involutions: &[&[1, 2, 3, 4], &[1, 2, 6, 7], &[2, 3, 7, 8]],
                   complementary: &[&[1], &[1, 3], &[8], &[1, 3, 5, 7]], omegas: &[&[1, 2, 8], &[1, 2, 5, 8]] },
    CatalogEntry { r: 4, s: 4, involutions: P08, complementary: &[&[1], &[1, 3], &[1, 2], &[8]], omegas: &[] },
];

/// Signatures with a static involution scheme.
pub fn catalog_signatures() -> Vec<Signature> {
    let mut v: Vec<Signature> = CATALOG.iter().map(|e| Signature::new(e.r, e.s)).collect();
    v.sort_by_key(|s| (s.n(), s.s, s.r));
    v
}

pub fn scheme_for(sig: Signature) -> Result<InvolutionScheme, SchemeError> {
    let entry = CATALOG.iter().find(|e| e.r == sig.r && e.s == sig.s).ok_or(SchemeError::NotInCatalog(sig))?;
    let words = |ws: &[&[usize]]| ws.iter().map(|w| SignedWord::new(w)).collect::<Vec<_>>();
    let involutions = words(entry.involutions);
    let complementary: Vec<Complementary> = words(entry.complementary)
        .into_iter()
        .map(|w| {
            let tag = if w.negative_count(sig) % 2 == 0 { IsometryTag::Isometry } else { IsometryTag::AntiIsometry };
            Complementary { operator: w, tag }
        })
        .collect();
    let table = involutions
        .iter()
        .map(|p| {
            complementary
                .iter()
                .map(|t| if p.anticommutes(&t.operator) { Relation::Anticommute } else { Relation::Commute })
                .collect()
        })
        .collect();
    Ok(InvolutionScheme { signature: sig, involutions, complementary, table, omegas: words(entry.omegas) })
}

/// The whole catalog as JSON, for documentation.
pub fn catalog_json() -> serde_json::Value {
    let schemes: Vec<InvolutionScheme> =
        catalog_signatures().into_iter().map(|s| scheme_for(s).expect("catalog entry")).collect();
    serde_json::to_value(schemes).expect("schemes serialize")
}

impl InvolutionScheme {
    /// Check every stated property against the matrices of `rep`.
    pub fn verify_against(&self, rep: &CliffordRep) -> Result<(), SchemeError> {
        let m = &rep.module;
        let ps: Vec<Operator> = self.involutions.iter().map(|p| p.evaluate(rep)).collect();
        for (i, p) in ps.iter().enumerate() {
            if !p.is_involution() || !p.is_isometry(m) {
                return Err(SchemeError::NotIsometricInvolution(i + 1));
            }
            for (j, q) in ps.iter().enumerate().skip(i + 1) {
                if !p.commutes_with(q) {
                    return Err(SchemeError::NotCommuting(i + 1, j + 1));
                }
            }
        }
        for (j, t) in self.complementary.iter().enumerate() {
            let op = t.operator.evaluate(rep);
            let ok = match t.tag {
                IsometryTag::Isometry => op.is_isometry(m),
                IsometryTag::AntiIsometry => op.is_anti_isometry(m),
            };
            if !ok {
                return Err(SchemeError::WrongTag(j + 1));
            }
            for (i, p) in ps.iter().enumerate() {
                let ok = match self.table[i][j] {
                    Relation::Anticommute => p.anticommutes_with(&op),
                    Relation::Commute => p.commutes_with(&op),
                };
                if !ok {
                    return Err(SchemeError::TableMismatch(i + 1, j + 1));
                }
            }
        }
        for (k, w) in self.omegas.iter().enumerate() {
            let o = w.evaluate(rep);
            if !o.is_symmetric(m) || !o.is_anti_involution() {
                return Err(SchemeError::BadOmega(k + 1));
            }
        }
        Ok(())
    }

    /// Involutions with the given sign flips applied.
    pub fn flipped(&self, flips: &[i8]) -> Vec<SignedWord> {
        self.involutions
            .iter()
            .zip(flips)
            .map(|(p, &f)| if f < 0 { p.negated() } else { p.clone() })
            .collect()
    }
}

/// A spacelike vector fixed by a family of involutions.
///
/// Vectors are kept integral and unnormalized: `scale = ⟨w,w⟩ > 0`, and the
/// unit seed is `w / √scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedVector {
    pub vector: Vector,
    pub scale: Scalar,
    /// 1-based indices of the involutions fixing the vector.
    pub fixed_by: Vec<usize>,
    /// Sign applied to each involution word, `-1` for a flipped operator.
    pub flips: Vec<i8>,
}

impl SeedVector {
    pub fn new(vector: Vector, metric: &MetricSpace) -> Result<Self, SchemeError> {
        let scale = metric.norm(&vector)?;
        if !scale.is_positive() {
            return Err(SchemeError::NotSpacelike);
        }
        Ok(SeedVector { vector, scale, fixed_by: Vec::new(), flips: Vec::new() })
    }

    pub fn support(&self) -> usize {
        self.vector.iter().filter(|x| !x.is_zero()).count()
    }
}

fn all_flips(k: usize) -> Vec<Vec<i8>> {
    (0..1usize << k).map(|mask| (0..k).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect()).collect()
}

/// `∏ (Id + P_i) v`, the unnormalized projection onto the common `+1` eigenspace.
fn project(ps: &[Operator], v: Vector) -> Result<Vector, LinError> {
    let mut w = v;
    for p in ps {
        let pw = p.apply(&w)?;
        w = add_vec(&w, &pw)?;
    }
    Ok(w)
}

/// Same as [`project`] on `e_j` when every involution is a signed permutation.
fn project_unit(ps: &[&SignedPerm], dim: usize, j: usize) -> Vec<i64> {
    let mut terms: Vec<(usize, i64)> = vec![(j, 1)];
    for p in ps {
        let images: Vec<(usize, i64)> = terms
            .iter()
            .map(|&(i, c)| {
                let (t, sg) = p.image(i);
                (t, c * sg as i64)
            })
            .collect();
        terms.extend(images);
    }
    let mut w = vec![0i64; dim];
    for (i, c) in terms {
        w[i] += c;
    }
    w
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum SeenKey {
    Int(Vec<i64>),
    Exact(Vec<String>),
}

fn sign_normalized(v: &[Scalar]) -> Vector {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.signum() < 0 => exactlin::neg_vec(v),
        _ => v.to_vec(),
    }
}

/// Spacelike common eigenvectors of the involutions, over all admitted sign
/// flips, in search order: smallest support, then smallest standard basis
/// index used to generate it, then flip pattern.
///
/// Candidates are projections of standard basis vectors; if none exists the
/// common eigenspace is computed exactly and its basis vectors are tried.
pub fn seed_candidates(rep: &CliffordRep, scheme: &InvolutionScheme) -> Result<Vec<SeedVector>, SchemeError> {
    let k = scheme.involutions.len();
    let m = &rep.module;
    let dim = rep.dim();
    let fixed_by: Vec<usize> = (1..=k).collect();
    let mut seen = BTreeSet::new();
    let mut found: Vec<(usize, usize, usize, SeedVector)> = Vec::new();
    for (fi, flips) in all_flips(k).into_iter().enumerate() {
        let ps: Vec<Operator> = scheme.flipped(&flips).iter().map(|p| p.evaluate(rep)).collect();
        let sparse: Option<Vec<&SignedPerm>> = ps.iter().map(Operator::sparse_form).collect();
        for j in 0..dim {
            let w = match &sparse {
                Some(sp) => {
                    // integer path: dedupe and test the norm before building scalars
                    let mut w = project_unit(sp, dim, j);
                    let Some(&lead) = w.iter().find(|&&x| x != 0) else { continue };
                    if lead < 0 {
                        w.iter_mut().for_each(|x| *x = -*x);
                    }
                    let norm: i64 = w.iter().enumerate().map(|(i, &x)| m.sign(i) as i64 * x * x).sum();
                    if norm <= 0 || !seen.insert(SeenKey::Int(w.clone())) {
                        continue;
                    }
                    w.into_iter().map(Scalar::int).collect()
                }
                None => {
                    let w = project(&ps, exactlin::unit(dim, j))?;
                    if is_zero_vec(&w) {
                        continue;
                    }
                    let w = sign_normalized(&w);
                    if !seen.insert(SeenKey::Exact(w.iter().map(|x| x.to_string()).collect())) {
                        continue;
                    }
                    w
                }
            };
            let Ok(mut seed) = SeedVector::new(w, m) else { continue };
            seed.fixed_by = fixed_by.clone();
            seed.flips = flips.clone();
            found.push((seed.support(), j, fi, seed));
        }
    }
    if found.is_empty() {
        return general_candidates(rep, scheme);
    }
    found.sort_by_key(|(support, j, fi, _)| (*support, *j, *fi));
    Ok(found.into_iter().map(|(_, _, _, s)| s).collect())
}

fn general_candidates(rep: &CliffordRep, scheme: &InvolutionScheme) -> Result<Vec<SeedVector>, SchemeError> {
    let k = scheme.involutions.len();
    let mut out = Vec::new();
    for flips in all_flips(k) {
        let ops: Vec<(Operator, i64)> = scheme.flipped(&flips).iter().map(|p| (p.evaluate(rep), 1)).collect();
        let basis = exactlin::common_eigenspace(&ops, rep.dim())?;
        for v in basis {
            if let Ok(mut seed) = SeedVector::new(v, &rep.module) {
                seed.fixed_by = (1..=k).collect();
                seed.flips = flips.clone();
                out.push(seed);
            }
        }
    }
    if out.is_empty() {
        return Err(SchemeError::NoSpacelikeSeed);
    }
    Ok(out)
}

/// First spacelike vector fixed by all involutions, allowing sign flips.
pub fn common_eigenvector(rep: &CliffordRep, scheme: &InvolutionScheme) -> Result<SeedVector, SchemeError> {
    seed_candidates(rep, scheme)?.into_iter().next().ok_or(SchemeError::NoSpacelikeSeed)
}

fn surd_disabled() -> bool {
    std::env::var("HTYPE_SURD").map(|v| v.eq_ignore_ascii_case("off")).unwrap_or(false)
}

/// Make `⟨w, Ω_k w⟩ = 0` for every `Ω_k` by `w ← w + λ_k Ω_k w` in turn.
///
/// With `a = ⟨w,Ωw⟩/⟨w,w⟩`, `λ = (√(1+a²) − 1)/a`, which has the sign of `a`
/// (`λ = 0` when `a = 0`). The squared norm becomes `⟨w,w⟩·2λ(1+a²)/a`.
/// Only one radicand may appear per call.
pub fn orthogonalize_seed(
    seed: &SeedVector,
    omegas: &[Operator],
    preserve: &[Operator],
    metric: &MetricSpace,
) -> Result<SeedVector, SchemeError> {
    for (i, o) in omegas.iter().enumerate() {
        if !o.is_symmetric(metric) || !o.is_anti_involution() {
            return Err(SchemeError::BadOmega(i + 1));
        }
        for (j, o2) in omegas.iter().enumerate().skip(i + 1) {
            if !o.anticommutes_with(o2) {
                return Err(SchemeError::OmegasCommute(i + 1, j + 1));
            }
        }
    }
    for (i, p) in preserve.iter().enumerate() {
        if !omegas.iter().all(|o| o.commutes_with(p)) || p.apply(&seed.vector)? != seed.vector {
            return Err(SchemeError::BadPreserve(i + 1));
        }
    }
    if !seed.scale.is_positive() {
        return Err(SchemeError::NotSpacelike);
    }
    let mut w = seed.vector.clone();
    let mut scale = seed.scale.clone();
    for o in omegas {
        let ow = o.apply(&w)?;
        let a = metric.inner(&w, &ow)?.checked_div(&scale)?;
        if a.is_zero() {
            continue;
        }
        let a2 = a.checked_mul(&a)?;
        let radicand = a2.as_rational().ok_or(SchemeError::NestedRadical)?;
        let root = Scalar::sqrt_rational(&(radicand + num_rational::BigRational::from_integer(1.into())))?;
        if root.radicand().is_some() && surd_disabled() {
            return Err(SchemeError::SurdDisabled);
        }
        let lambda = root.checked_add(&Scalar::int(-1))?.checked_div(&a)?;
        let two_l = Scalar::int(2).checked_mul(&lambda)?;
        let factor = two_l.checked_mul(&a2.checked_add(&Scalar::one())?)?.checked_div(&a)?;
        w = add_vec(&w, &scale_vec(&lambda, &ow)?)?;
        scale = scale.checked_mul(&factor)?;
    }
    debug_assert_eq!(metric.norm(&w).ok(), Some(scale.clone()));
    Ok(SeedVector { vector: w, scale, fixed_by: seed.fixed_by.clone(), flips: seed.flips.clone() })
}
