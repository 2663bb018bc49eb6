//! Tensor-product extensions of admissible integral modules, the table of
//! minimal admissible dimensions, and construction plans for any `(r,s)`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::clifford_rep::{self, base_representation, transfer_phi, CliffordRep, RepError, Signature};
use crate::exactlin::Operator;
use crate::integral_basis::{self, BasisError};

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("{kind:?} needs a base of signature {expected}, got {found}")]
    WrongBase { kind: ExtensionKind, expected: Signature, found: Signature },
    #[error("{0:?} cannot be applied to signature {1}")]
    WrongInput(ExtensionKind, Signature),
    #[error("endomorphism {0:?} violates its defining identities")]
    BadEndomorphism(EndomorphismKind),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ExtensionKind {
    /// `Cl_{r,s} → Cl_{r,s+8}` with the `(0,8)` model.
    #[serde(rename = "extend_s8")]
    S8,
    /// `Cl_{r,s} → Cl_{r+8,s}` with the `(8,0)` model.
    #[serde(rename = "extend_r8")]
    R8,
    /// `Cl_{r,s} → Cl_{r+4,s+4}` with the `(4,4)` model.
    #[serde(rename = "extend_44")]
    P44,
    /// `Cl_{n,0} → Cl_{0,n+2}` with the `(0,2)` model.
    #[serde(rename = "twist_0n2")]
    Twist0n2,
    /// `Cl_{r,s} → Cl_{r+1,s+1}` with the `(1,1)` model.
    #[serde(rename = "twist_11")]
    Twist11,
}

impl ExtensionKind {
    pub fn base_signature(self) -> Signature {
        match self {
            ExtensionKind::S8 => Signature::new(0, 8),
            ExtensionKind::R8 => Signature::new(8, 0),
            ExtensionKind::P44 => Signature::new(4, 4),
            ExtensionKind::Twist0n2 => Signature::new(0, 2),
            ExtensionKind::Twist11 => Signature::new(1, 1),
        }
    }

    pub fn endomorphism(self) -> EndomorphismKind {
        match self {
            ExtensionKind::S8 => EndomorphismKind::E08,
            ExtensionKind::R8 => EndomorphismKind::E80,
            ExtensionKind::P44 => EndomorphismKind::E44,
            ExtensionKind::Twist0n2 => EndomorphismKind::FTwist02,
            ExtensionKind::Twist11 => EndomorphismKind::FTwist11,
        }
    }

    /// Signature produced from `input`, if the rule applies.
    pub fn target(self, input: Signature) -> Option<Signature> {
        let Signature { r, s } = input;
        match self {
            ExtensionKind::S8 => Some(Signature::new(r, s + 8)),
            ExtensionKind::R8 => Some(Signature::new(r + 8, s)),
            ExtensionKind::P44 => Some(Signature::new(r + 4, s + 4)),
            ExtensionKind::Twist0n2 => (s == 0).then(|| Signature::new(0, r + 2)),
            ExtensionKind::Twist11 => Some(Signature::new(r + 1, s + 1)),
        }
    }

    pub fn factor(self) -> usize {
        match self {
            ExtensionKind::S8 | ExtensionKind::R8 | ExtensionKind::P44 => 16,
            ExtensionKind::Twist0n2 | ExtensionKind::Twist11 => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EndomorphismKind {
    E08,
    E80,
    E44,
    FTwist02,
    FTwist11,
}

#[derive(Clone, Debug)]
pub struct ExtensionEndomorphism {
    pub kind: EndomorphismKind,
    pub operator: Operator,
}

/// The twisting endomorphism of a base model, checked against its identities.
///
/// Volume forms for `(0,8)`, `(8,0)`, `(4,4)`; for `(0,2)` the signed
/// permutation with `a = d = 0, c = 1`; for `(1,1)` with `a = 1, b = c = d = 0`.
pub fn volume_endomorphism(base: &CliffordRep, kind: EndomorphismKind) -> Result<ExtensionEndomorphism, ExtendError> {
    let all: Vec<usize> = (1..=base.signature.n()).collect();
    let (op, square) = match kind {
        EndomorphismKind::E08 | EndomorphismKind::E80 | EndomorphismKind::E44 => (base.word_operator(&all), 1),
        EndomorphismKind::FTwist02 => (
            Operator::from_rows(&[vec![0, 0, 1, 0], vec![0, 0, 0, -1], vec![-1, 0, 0, 0], vec![0, 1, 0, 0]])
                .expect("4x4"),
            -1,
        ),
        EndomorphismKind::FTwist11 => (
            Operator::from_rows(&[vec![1, 0, 0, 0], vec![0, -1, 0, 0], vec![0, 0, -1, 0], vec![0, 0, 0, 1]])
                .expect("4x4"),
            1,
        ),
    };
    let bad = || ExtendError::BadEndomorphism(kind);
    if op.dim() != base.dim() || !op.compose(&op).map_err(RepError::from)?.is_scalar(square) {
        return Err(bad());
    }
    if !base.generators.iter().all(|g| op.anticommutes_with(g)) || !op.is_symmetric(&base.module) {
        return Err(bad());
    }
    if matches!(kind, EndomorphismKind::FTwist02 | EndomorphismKind::FTwist11) {
        let prod = base.word_operator(&[1, 2]);
        if op == prod || op == prod.neg() {
            return Err(bad());
        }
    }
    Ok(ExtensionEndomorphism { kind, operator: op })
}

/// Tensor `rep` with `base`: old generators act as `J ⊗ E`, new ones as
/// `Id ⊗ K`. Generators are ordered old positive, new positive, old
/// negative, new negative; the metric is the product metric.
pub fn extend(rep: &CliffordRep, kind: ExtensionKind, base: &CliffordRep) -> Result<CliffordRep, ExtendError> {
    if base.signature != kind.base_signature() {
        return Err(ExtendError::WrongBase { kind, expected: kind.base_signature(), found: base.signature });
    }
    let target = kind.target(rep.signature).ok_or(ExtendError::WrongInput(kind, rep.signature))?;
    let endo = volume_endomorphism(base, kind.endomorphism())?;
    let old: Vec<Operator> = rep.generators.iter().map(|j| j.kron(&endo.operator)).collect();
    let id = Operator::identity(rep.dim());
    let new: Vec<Operator> = base.generators.iter().map(|k| id.kron(k)).collect();
    let (r, br) = (rep.signature.r, base.signature.r);
    let gens = if kind == ExtensionKind::Twist0n2 {
        // all old generators become negative
        old.into_iter().chain(new).collect()
    } else {
        let mut g = Vec::with_capacity(target.n());
        g.extend_from_slice(&old[..r]);
        g.extend_from_slice(&new[..br]);
        g.extend_from_slice(&old[r..]);
        g.extend_from_slice(&new[br..]);
        g
    };
    let module = rep.module.kron(&base.module);
    Ok(CliffordRep::new(target, module, gens)?.verified()?)
}

/// Real matrix algebra types appearing in the classification table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraType {
    Real(usize),
    Complex(usize),
    Quaternion(usize),
    DoubleReal(usize),
    DoubleQuaternion(usize),
}

impl AlgebraType {
    /// Real dimension of an irreducible module.
    pub fn irreducible_dim(self) -> usize {
        match self {
            AlgebraType::Real(n) | AlgebraType::DoubleReal(n) => n,
            AlgebraType::Complex(n) => 2 * n,
            AlgebraType::Quaternion(n) | AlgebraType::DoubleQuaternion(n) => 4 * n,
        }
    }
}

impl std::fmt::Display for AlgebraType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (name, n) = match *self {
            AlgebraType::Real(n) => ("R", n),
            AlgebraType::Complex(n) => ("C", n),
            AlgebraType::Quaternion(n) => ("H", n),
            AlgebraType::DoubleReal(n) => ("R^2", n),
            AlgebraType::DoubleQuaternion(n) => ("H^2", n),
        };
        if n == 1 {
            write!(f, "{name}")
        } else {
            write!(f, "{name}({n})")
        }
    }
}

/// Rows `r+s = 1..=11`, entries for `r-s = -(r+s), …, r+s` in steps of 2,
/// clipped to `|r-s| ≤ 8`. `rr`/`hh` are the doubled algebras `ℝ²(n)`, `ℍ²(n)`.
const TABLE: [&str; 11] = [
    "rr1 c1",
    "r2 r2 h1",
    "c2 rr2 c2 hh1",
    "h2 r4 r4 h2 h2",
    "hh2 c4 rr4 c4 hh2 c4",
    "h4 h4 r8 r8 h4 h4 r8",
    "c8 hh4 c8 rr8 c8 hh4 c8 rr8",
    "r16 h8 h8 r16 r16 h8 h8 r16 r16",
    "c16 hh8 c16 rr16 c16 hh8 c16 rr16",
    "r32 h16 h16 r32 r32 h16 h16 r32 r32",
    "c32 hh16 c32 rr32 c32 hh16 c32 rr32",
];

/// Positions (in `r-s`) of the doubled entries in each row of [`TABLE`].
const DOUBLED: [&[i64]; 11] = [
    &[-1],
    &[-2, 0],
    &[-3, -1, 1],
    &[-2, 0],
    &[-5, -1, 3],
    &[],
    &[],
    &[],
    &[-5, -1, 3, 7],
    &[-8, -2, 0, 6, 8],
    &[-7, -3, -1, 1, 5, 7],
];

fn parse_entry(s: &str) -> AlgebraType {
    let digits = s.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    let n: usize = digits.parse().expect("table entry size");
    match &s[..s.len() - digits.len()] {
        "r" => AlgebraType::Real(n),
        "c" => AlgebraType::Complex(n),
        "h" => AlgebraType::Quaternion(n),
        "rr" => AlgebraType::DoubleReal(n),
        "hh" => AlgebraType::DoubleQuaternion(n),
        other => panic!("bad table tag {other}"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub algebra: AlgebraType,
    /// Minimal admissible modules are twice the irreducible dimension.
    pub doubled: bool,
}

/// Entry of the classification table, for `1 ≤ r+s ≤ 11` and `|r-s| ≤ 8`.
pub fn table_entry(sig: Signature) -> Option<TableEntry> {
    let n = sig.n();
    let d = sig.r as i64 - sig.s as i64;
    if n == 0 || n > TABLE.len() || d.abs() > 8 {
        return None;
    }
    let start = match n {
        0..=8 => -(n as i64),
        _ if n % 2 == 0 => -8,
        _ => -7,
    };
    let idx = ((d - start) / 2) as usize;
    let algebra = parse_entry(TABLE[n - 1].split_whitespace().nth(idx)?);
    Some(TableEntry { algebra, doubled: DOUBLED[n - 1].contains(&d) })
}

/// Minimal dimension of an admissible `Cl_{r,s}`-module.
///
/// Read from the table when covered, otherwise by 16-fold periodicity.
pub fn minimal_dimension(sig: Signature) -> usize {
    if let Some(e) = table_entry(sig) {
        return e.algebra.irreducible_dim() * if e.doubled { 2 } else { 1 };
    }
    16 * minimal_dimension(periodic_reduction(sig))
}

/// Whether the minimal admissible module is twice the irreducible one.
pub fn is_doubled(sig: Signature) -> bool {
    match table_entry(sig) {
        Some(e) => e.doubled,
        None => is_doubled(periodic_reduction(sig)),
    }
}

/// A signature 8 steps closer to the origin with the same table entry type.
fn periodic_reduction(sig: Signature) -> Signature {
    let Signature { r, s } = sig;
    if r >= 8 {
        Signature::new(r - 8, s)
    } else if s >= 8 {
        Signature::new(r, s - 8)
    } else {
        Signature::new(r - 4, s - 4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    /// Integral module of a signature with `r+s ≤ 8` from the involution catalog.
    Base { r: usize, s: usize },
    TransferPhi,
    ExtendS8,
    ExtendR8,
    Extend44,
    Twist0n2,
    Twist11,
    /// `Cl_{r,0} → Cl_{r,1}` on two copies of the module.
    Double,
}

impl Step {
    fn extension(self) -> Option<ExtensionKind> {
        match self {
            Step::ExtendS8 => Some(ExtensionKind::S8),
            Step::ExtendR8 => Some(ExtensionKind::R8),
            Step::Extend44 => Some(ExtensionKind::P44),
            Step::Twist0n2 => Some(ExtensionKind::Twist0n2),
            Step::Twist11 => Some(ExtensionKind::Twist11),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionPlan {
    pub target: Signature,
    pub steps: Vec<Step>,
    pub dimension: usize,
    pub minimal: bool,
}

/// Transfer partner `(s-1, r+1)` of `(r,s)`.
fn phi_partner(sig: Signature) -> Option<Signature> {
    (sig.s >= 1).then(|| Signature::new(sig.s - 1, sig.r + 1))
}

fn small_plan(sig: Signature) -> (usize, Vec<Step>) {
    if crate::involution_engine::scheme_for(sig).is_ok() {
        return (minimal_dimension(sig), vec![Step::Base { r: sig.r, s: sig.s }]);
    }
    if sig.s == 1 {
        let src = Signature::new(sig.r, 0);
        return (2 * minimal_dimension(src), vec![Step::Base { r: src.r, s: 0 }, Step::Double]);
    }
    let src = phi_partner(sig).expect("s ≥ 2 outside the catalog");
    (minimal_dimension(src), vec![Step::Base { r: src.r, s: src.s }, Step::TransferPhi])
}

struct Planner {
    memo: HashMap<Signature, (usize, Vec<Step>)>,
}

impl Planner {
    fn best(&mut self, sig: Signature) -> (usize, Vec<Step>) {
        if sig.n() <= 8 {
            return small_plan(sig);
        }
        if let Some(p) = self.memo.get(&sig) {
            return p.clone();
        }
        let own = self.without_phi(sig);
        let mut choice = own.clone();
        if let Some(partner) = phi_partner(sig) {
            let (d, mut steps, _) = self.without_phi(partner);
            // Φ ranks after twist_11 and before twist_0n2 / double
            if d < own.0 || (d == own.0 && own.2 > 3) {
                steps.push(Step::TransferPhi);
                choice = (d, steps, 4);
            }
        }
        let out = (choice.0, choice.1);
        self.memo.insert(sig, out.clone());
        out
    }

    /// Cheapest plan whose last step is not a transfer, with its option rank.
    fn without_phi(&mut self, sig: Signature) -> (usize, Vec<Step>, usize) {
        let Signature { r, s } = sig;
        let mut options: Vec<(usize, Signature, Step)> = Vec::new();
        if r >= 8 {
            options.push((0, Signature::new(r - 8, s), Step::ExtendR8));
        }
        if s >= 8 {
            options.push((1, Signature::new(r, s - 8), Step::ExtendS8));
        }
        if r >= 4 && s >= 4 && r + s > 8 {
            options.push((2, Signature::new(r - 4, s - 4), Step::Extend44));
        }
        if r >= 1 && s >= 1 {
            options.push((3, Signature::new(r - 1, s - 1), Step::Twist11));
        }
        if r == 0 && s >= 3 {
            options.push((5, Signature::new(s - 2, 0), Step::Twist0n2));
        }
        if s == 1 {
            options.push((6, Signature::new(r, 0), Step::Double));
        }
        let mut best: Option<(usize, Vec<Step>, usize)> = None;
        for (rank, src, step) in options {
            if src.n() == 0 {
                continue;
            }
            let (d, mut steps) = self.best(src);
            let factor = match step.extension() {
                Some(k) => k.factor(),
                None => 2,
            };
            let dim = d * factor;
            if best.as_ref().is_none_or(|b| dim < b.0) {
                steps.push(step);
                best = Some((dim, steps, rank));
            }
        }
        best.expect("some reduction applies when r+s ≥ 9")
    }
}

/// Deterministic construction plan for any `(r,s)` with `r+s ≥ 1`.
pub fn plan(target: Signature) -> ConstructionPlan {
    assert!(target.n() >= 1, "empty signature");
    let (dimension, steps) = Planner { memo: HashMap::new() }.best(target);
    ConstructionPlan { target, steps, dimension, minimal: dimension == minimal_dimension(target) }
}

impl ConstructionPlan {
    /// Run the plan and return the verified admissible integral module.
    pub fn execute(&self) -> Result<CliffordRep, ExtendError> {
        let mut rep: Option<CliffordRep> = None;
        for step in &self.steps {
            let next = match (*step, rep.take()) {
                (Step::Base { r, s }, None) => integral_basis::integral_rep(Signature::new(r, s))?,
                (Step::TransferPhi, Some(cur)) => transfer_phi(&cur)?,
                (Step::Double, Some(cur)) => clifford_rep::add_timelike_generator(&cur)?,
                (step, Some(cur)) => {
                    let kind = step.extension().expect("extension step");
                    let base = base_representation(kind.base_signature())?;
                    extend(&cur, kind, &base)?
                }
                (step, None) => panic!("plan starts with {step:?}"),
            };
            rep = Some(next);
        }
        let rep = rep.expect("non-empty plan");
        debug_assert_eq!(rep.signature, self.target);
        debug_assert_eq!(rep.dim(), self.dimension);
        Ok(rep)
    }
}
