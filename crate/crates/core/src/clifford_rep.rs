//! Matrix representations of `Cl_{r,s}` on diagonal scalar-product spaces:
//! base models, verification, doubling and the transfer
//! `Cl_{s,r+1} → Cl_{r,s+1}`.
//!
//! Generators are numbered from 1. The first `r` square to `-Id`, the last
//! `s` square to `+Id`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{LinError, MetricSpace, Operator, SignedPerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub r: usize,
    pub s: usize,
}

impl Signature {
    pub const fn new(r: usize, s: usize) -> Self {
        Signature { r, s }
    }

    pub fn n(&self) -> usize {
        self.r + self.s
    }

    /// `⟨z_k, z_k⟩` for generator `k` (1-based).
    pub fn generator_sign(&self, k: usize) -> i8 {
        if k <= self.r {
            1
        } else {
            -1
        }
    }

    /// Sign vector of `ℝ^{r,s}`.
    pub fn metric(&self) -> MetricSpace {
        MetricSpace::standard(self.r, self.s)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("no base model for signature {0}")]
    UnsupportedBase(Signature),
    #[error("expected {expected} generators, found {found}")]
    GeneratorCount { expected: usize, found: usize },
    #[error("representation is already admissible")]
    AlreadyAdmissible,
    #[error("representation is not admissible: {0}")]
    NotAdmissible(String),
    #[error("generator {0} is neither symmetric nor skew for the given metric")]
    MixedSymmetry(usize),
    #[error("operation needs signature {expected}, got {found}")]
    SignatureMismatch { expected: String, found: Signature },
    #[error(transparent)]
    Lin(#[from] LinError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neutrality {
    Pass,
    Fail,
    NotApplicable,
}

/// Outcome of checking the Clifford relations and admissibility.
///
/// `relation_failures` holds `(i, j, k)`: generators `i, j` (1-based, `i == j`
/// for a square) violate their relation on basis vector `e_k`.
/// `skew_failures` holds `(i, u, v)` with `⟨J_i e_u, e_v⟩ + ⟨e_u, J_i e_v⟩ ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub relation_failures: Vec<(usize, usize, usize)>,
    pub skew_failures: Vec<(usize, usize, usize)>,
    pub neutrality: Neutrality,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.relation_failures.is_empty() && self.skew_failures.is_empty() && self.neutrality != Neutrality::Fail
    }

    pub fn summary(&self) -> String {
        format!(
            "{} relation failures, {} skew failures, neutrality {:?}",
            self.relation_failures.len(),
            self.skew_failures.len(),
            self.neutrality
        )
    }
}

#[derive(Clone, Debug)]
pub struct CliffordRep {
    pub signature: Signature,
    pub module: MetricSpace,
    pub generators: Vec<Operator>,
    pub admissible: bool,
}

impl CliffordRep {
    /// Assemble a representation; `admissible` stays false until [`CliffordRep::verified`].
    pub fn new(signature: Signature, module: MetricSpace, generators: Vec<Operator>) -> Result<Self, RepError> {
        if generators.len() != signature.n() {
            return Err(RepError::GeneratorCount { expected: signature.n(), found: generators.len() });
        }
        for g in &generators {
            if g.dim() != module.dim() {
                return Err(LinError::DimensionMismatch { expected: module.dim(), found: g.dim() }.into());
            }
        }
        Ok(CliffordRep { signature, module, generators, admissible: false })
    }

    /// Run [`verify`] and set the admissible flag, or report why not.
    pub fn verified(mut self) -> Result<Self, RepError> {
        let report = verify(&self);
        if !report.is_ok() {
            return Err(RepError::NotAdmissible(report.summary()));
        }
        self.admissible = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// Generator `k`, 1-based.
    pub fn generator(&self, k: usize) -> &Operator {
        &self.generators[k - 1]
    }

    /// `J_{i1} J_{i2} ⋯ J_{ik}` for a 1-based word.
    pub fn word_operator(&self, word: &[usize]) -> Operator {
        let mut acc = Operator::identity(self.dim());
        for &k in word {
            acc = acc.compose(self.generator(k)).expect("generator dimensions agree");
        }
        acc
    }

    /// True when every generator is a signed permutation.
    pub fn is_signed_permutation(&self) -> bool {
        self.generators.iter().all(|g| g.sparse_form().is_some())
    }

    /// The representation of `Cl_{r,s}` obtained by keeping the first `r`
    /// positive and the first `s` negative generators.
    pub fn restrict(&self, r: usize, s: usize) -> Result<CliffordRep, RepError> {
        let sig = self.signature;
        if r > sig.r || s > sig.s || r + s == 0 {
            return Err(RepError::SignatureMismatch { expected: format!("sub-signature of {sig}"), found: Signature::new(r, s) });
        }
        let mut gens: Vec<Operator> = self.generators[..r].to_vec();
        gens.extend_from_slice(&self.generators[sig.r..sig.r + s]);
        let mut rep = CliffordRep::new(Signature::new(r, s), self.module.clone(), gens)?;
        rep.admissible = self.admissible;
        Ok(rep)
    }
}

/// First column where two operators differ.
fn first_difference(a: &Operator, b: &Operator) -> Option<usize> {
    let n = a.dim();
    if let (Some(p), Some(q)) = (a.sparse_form(), b.sparse_form()) {
        return (0..n).find(|&j| p.image(j) != q.image(j));
    }
    (0..n).find(|&j| (0..n).any(|i| a.entry(i, j) != b.entry(i, j)))
}

fn skew_failures(k: usize, op: &Operator, m: &MetricSpace, out: &mut Vec<(usize, usize, usize)>) {
    let n = op.dim();
    let s = m.signs();
    if let Some(p) = op.sparse_form() {
        for u in 0..n {
            let (t, su) = p.image(u);
            let (back, st) = p.image(t);
            let lhs = su * s[t];
            let rhs = if back == u { st * s[u] } else { 0 };
            if lhs + rhs != 0 {
                out.push((k, u, t));
            }
        }
        return;
    }
    for u in 0..n {
        for v in 0..n {
            // ⟨J e_u, e_v⟩ = s_v J_vu, ⟨e_u, J e_v⟩ = s_u J_uv
            let a = op.entry(v, u);
            let b = op.entry(u, v);
            let a = if s[v] > 0 { a } else { -a };
            let b = if s[u] > 0 { b } else { -b };
            if !(a + b).is_zero() {
                out.push((k, u, v));
            }
        }
    }
}

/// Check generator squares, anticommutation, skew symmetry on the standard
/// basis and neutrality. Failures are collected, never thrown.
pub fn verify(rep: &CliffordRep) -> VerificationReport {
    let mut relation_failures = Vec::new();
    let mut skew = Vec::new();
    let n = rep.generators.len();
    let dim = rep.dim();
    for i in 1..=n {
        let j = rep.generator(i);
        let sq = j.compose(j).expect("square dims");
        let expected = if rep.signature.generator_sign(i) > 0 {
            Operator::identity(dim).neg()
        } else {
            Operator::identity(dim)
        };
        if let Some(w) = first_difference(&sq, &expected) {
            relation_failures.push((i, i, w));
        }
        for k in i + 1..=n {
            let other = rep.generator(k);
            let ab = j.compose(other).expect("dims");
            let ba = other.compose(j).expect("dims").neg();
            if let Some(w) = first_difference(&ab, &ba) {
                relation_failures.push((i, k, w));
            }
        }
        skew_failures(i, j, &rep.module, &mut skew);
    }
    let neutrality = if rep.signature.s == 0 {
        Neutrality::NotApplicable
    } else if rep.module.is_neutral() {
        Neutrality::Pass
    } else {
        Neutrality::Fail
    };
    VerificationReport { relation_failures, skew_failures: skew, neutrality }
}

/// Kronecker product of signed 2×2 blocks: `I`, `X = antidiag(1,1)`,
/// `Z = diag(1,-1)`, `E = antidiag(1,-1)`. A leading `-` negates.
pub fn block_operator(spec: &str) -> Operator {
    let (neg, body) = match spec.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, spec),
    };
    let mut acc = SignedPerm::identity(1);
    for c in body.chars() {
        let b = match c {
            'I' => SignedPerm::new(vec![0, 1], vec![1, 1]),
            'X' => SignedPerm::new(vec![1, 0], vec![1, 1]),
            'Z' => SignedPerm::new(vec![0, 1], vec![1, -1]),
            // columns: e_0 ↦ -e_1, e_1 ↦ e_0
            'E' => SignedPerm::new(vec![1, 0], vec![-1, 1]),
            _ => panic!("unknown block {c}"),
        }
        .expect("valid block");
        acc = acc.kron(&b);
    }
    let op = Operator::from_perm(acc);
    if neg {
        op.neg()
    } else {
        op
    }
}

/// Diagonal of a tensor product of `I` and `Z` blocks, as a metric.
fn block_metric(spec: &str) -> MetricSpace {
    let op = block_operator(spec);
    let p = op.sparse_form().expect("block metric is a signed permutation");
    MetricSpace::new(p.signs().to_vec()).expect("diagonal signs")
}

/// Explicit admissible signed-permutation models on the minimal dimension.
pub fn base_representation(sig: Signature) -> Result<CliffordRep, RepError> {
    let (metric, gens): (&str, &[&str]) = match (sig.r, sig.s) {
        (1, 0) => ("I", &["-E"]),
        (0, 1) => ("Z", &["X"]),
        // J_x e_1 = e_2, J_y e_1 = e_3 on (+,+,-,-)
        (1, 1) => ("ZI", &["-ZE", "XI"]),
        (2, 0) => ("II", &["-EI", "-ZE"]),
        // J_{y1} e_1 = e_3, J_{y2} e_1 = e_4
        (0, 2) => ("ZI", &["XI", "EE"]),
        (8, 0) => ("IIII", &["IIIE", "IXEX", "XXEZ", "ZEIX", "ZEXZ", "ZEZZ", "ZIEZ", "ZZEX"]),
        (0, 8) => ("ZIII", &["EIIE", "EXEX", "EXEZ", "XEIE", "XXII", "XZEE", "XZXI", "XZZI"]),
        (4, 4) => ("ZIII", &["IIIE", "IXEX", "IZEX", "ZIEZ", "EIEZ", "XIIZ", "XIXX", "XIZX"]),
        _ => return Err(RepError::UnsupportedBase(sig)),
    };
    let generators = gens.iter().map(|g| block_operator(g)).collect();
    CliffordRep::new(sig, block_metric(metric), generators)?.verified()
}

/// Signatures with an explicit base model.
pub const BASE_SIGNATURES: [Signature; 8] = [
    Signature::new(1, 0),
    Signature::new(0, 1),
    Signature::new(1, 1),
    Signature::new(2, 0),
    Signature::new(0, 2),
    Signature::new(8, 0),
    Signature::new(0, 8),
    Signature::new(4, 4),
];

/// Make a Clifford module admissible on `V ⊕ V`.
///
/// Each generator must be skew or symmetric for the current metric `D`.
/// Skew generators act block-diagonally, symmetric ones swap the copies; the
/// second copy carries `-D`.
pub fn double(rep: &CliffordRep) -> Result<CliffordRep, RepError> {
    let report = verify(rep);
    if report.is_ok() {
        return Err(RepError::AlreadyAdmissible);
    }
    if !report.relation_failures.is_empty() {
        return Err(RepError::NotAdmissible("Clifford relations fail".into()));
    }
    let m = &rep.module;
    let swap = block_operator("X");
    let mut gens = Vec::with_capacity(rep.generators.len());
    for (k, g) in rep.generators.iter().enumerate() {
        if g.is_skew(m) {
            gens.push(g.direct_sum(g));
        } else if g.is_symmetric(m) {
            gens.push(swap.kron(g));
        } else {
            return Err(RepError::MixedSymmetry(k + 1));
        }
    }
    CliffordRep::new(rep.signature, m.direct_sum(&m.negated()), gens)?.verified()
}

/// `Cl_{r,0}`-module `U` to the `Cl_{r,1}`-module `U ⊕ J_{r+1}U`.
///
/// Old generators act as `J ⊕ -J`, the new one swaps the summands, and the
/// second summand carries the negated metric.
pub fn add_timelike_generator(rep: &CliffordRep) -> Result<CliffordRep, RepError> {
    let sig = rep.signature;
    if sig.s != 0 {
        return Err(RepError::SignatureMismatch { expected: "(r,0)".into(), found: sig });
    }
    if !verify(rep).is_ok() {
        return Err(RepError::NotAdmissible(verify(rep).summary()));
    }
    let m = rep.module.dim();
    let mut gens: Vec<Operator> = rep.generators.iter().map(|g| g.direct_sum(&g.neg())).collect();
    gens.push(block_operator("X").kron(&Operator::identity(m)));
    let module = rep.module.direct_sum(&rep.module.negated());
    CliffordRep::new(Signature::new(sig.r, 1), module, gens)?.verified()
}

/// Transfer an admissible `Cl_{s,r+1}`-module to `Cl_{r,s+1}` on the same
/// space and metric.
///
/// With source generators `a_1..a_s` (square `-Id`) and `b_1..b_{r+1}`
/// (square `+Id`), the new generators are `b_i b_{r+1}` for `i ≤ r`, then
/// `a_j b_{r+1}` for `j ≤ s`, then `b_{r+1}`.
pub fn transfer_phi(rep: &CliffordRep) -> Result<CliffordRep, RepError> {
    let src = rep.signature;
    if src.s == 0 {
        return Err(RepError::SignatureMismatch { expected: "(s, r+1) with r+1 ≥ 1".into(), found: src });
    }
    let report = verify(rep);
    if !report.is_ok() {
        return Err(RepError::NotAdmissible(report.summary()));
    }
    let s = src.r;
    let r = src.s - 1;
    let last = rep.generator(s + r + 1);
    let mut gens = Vec::with_capacity(s + r + 1);
    for i in 1..=r {
        gens.push(rep.generator(s + i).compose(last)?);
    }
    for j in 1..=s {
        gens.push(rep.generator(j).compose(last)?);
    }
    gens.push(last.clone());
    CliffordRep::new(Signature::new(r, s + 1), rep.module.clone(), gens)?.verified()
}
