//! General H-type algebras `N = V ⊕ Z` assembled from integral modules.
//!
//! The bracket on `V` is `[v_α, v_β] = Σ_k A^k_{αβ} z_k` with
//! `A^k_{αβ} = ν^Z_k ⟨J_k v_α, v_β⟩`; `Z` is central. Conversely
//! `J_k v_α = Σ_β ν^Z_k ν^V_β A^k_{αβ} v_β`, which is how the verifier
//! recovers the module from a serialized algebra.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford_rep::{verify, CliffordRep, Neutrality, RepError, Signature};
use crate::exactlin::{self, MetricSpace, Operator, SignedPerm};
use crate::integral_basis::{label_basis, BasisError, StructureConstants};
use crate::tensor_periodicity::{plan, ConstructionPlan, ExtendError};

/// Largest `r+s` accepted by [`build`].
pub const MAX_GENERATORS: usize = 16;

/// Structure constants indexed `[k][α][β]`.
pub type Tensor = Vec<Vec<Vec<i64>>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HTypeAlgebra {
    pub r: usize,
    pub s: usize,
    pub m: usize,
    pub n: usize,
    #[serde(rename = "metric_V")]
    pub metric_v: Vec<i8>,
    #[serde(rename = "metric_Z")]
    pub metric_z: Vec<i8>,
    #[serde(rename = "A")]
    pub a: Tensor,
    /// Word `J_{i1}⋯J_{ik}` reaching each basis vector from its cyclic origin.
    pub basis_words: Vec<Vec<usize>>,
}

#[derive(Debug, Error)]
pub enum HTypeError {
    #[error("signature {0} has no generators")]
    Empty(Signature),
    #[error("signature {sig} exceeds the limit r+s <= {limit}")]
    TooLarge { sig: Signature, limit: usize },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Extend(#[from] ExtendError),
}

impl HTypeAlgebra {
    pub fn signature(&self) -> Signature {
        Signature::new(self.r, self.s)
    }

    /// `[v_α, v_β]` as coefficients of `z_1..z_n` (0-based indices).
    pub fn bracket(&self, alpha: usize, beta: usize) -> Vec<i64> {
        self.a.iter().map(|ak| ak[alpha][beta]).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("algebra serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Algebra of a module whose standard basis is an integral orthonormal basis.
pub fn build_algebra(rep: &CliffordRep, basis_words: Vec<Vec<usize>>) -> Result<HTypeAlgebra, BasisError> {
    let c = StructureConstants::from_rep(rep)?;
    Ok(HTypeAlgebra {
        r: rep.signature.r,
        s: rep.signature.s,
        m: c.m,
        n: c.n,
        metric_v: c.nu_v,
        metric_z: c.nu_z,
        a: c.a,
        basis_words,
    })
}

#[derive(Clone, Debug)]
pub struct Built {
    pub plan: ConstructionPlan,
    pub rep: CliffordRep,
    pub algebra: HTypeAlgebra,
}

/// Run the construction plan for `sig` and assemble its algebra.
pub fn build(sig: Signature) -> Result<Built, HTypeError> {
    if sig.n() == 0 {
        return Err(HTypeError::Empty(sig));
    }
    if sig.n() > MAX_GENERATORS {
        return Err(HTypeError::TooLarge { sig, limit: MAX_GENERATORS });
    }
    let plan = plan(sig);
    let rep = plan.execute()?;
    let words = label_basis(&rep)?.into_iter().map(|l| l.word).collect();
    let algebra = build_algebra(&rep, words)?;
    Ok(Built { plan, rep, algebra })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HTypeReport {
    pub checks: Vec<CheckResult>,
}

impl HTypeReport {
    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, result: Result<String, String>) {
        let (passed, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(CheckResult { name, passed, detail });
    }
}

impl fmt::Display for HTypeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<14} {}  {}", c.name, if c.passed { "ok" } else { "FAIL" }, c.detail)?;
        }
        Ok(())
    }
}

/// Sparse columns: `cols[α]` lists `(β, c)` with `J v_α = Σ c v_β`.
type Columns = Vec<Vec<(usize, i64)>>;

fn reconstruct(alg: &HTypeAlgebra) -> Vec<Columns> {
    (0..alg.n)
        .map(|k| {
            (0..alg.m)
                .map(|alpha| {
                    (0..alg.m)
                        .filter(|&beta| alg.a[k][alpha][beta] != 0)
                        .map(|beta| {
                            let c = alg.metric_z[k] as i64 * alg.metric_v[beta] as i64 * alg.a[k][alpha][beta];
                            (beta, c)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn columns_to_operator(cols: &Columns) -> Result<Operator, exactlin::LinError> {
    let m = cols.len();
    let as_perm = cols.iter().all(|c| c.len() == 1 && c[0].1.abs() == 1);
    if as_perm {
        if let Ok(p) = SignedPerm::new(cols.iter().map(|c| c[0].0).collect(), cols.iter().map(|c| c[0].1 as i8).collect()) {
            return Ok(Operator::from_perm(p));
        }
    }
    let mut rows = vec![vec![0i64; m]; m];
    for (alpha, col) in cols.iter().enumerate() {
        for &(beta, c) in col {
            rows[beta][alpha] = c;
        }
    }
    Operator::from_rows(&rows)
}

fn add_columns(x: &Columns, y: &Columns) -> Columns {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(i, c) in a.iter().chain(b) {
                *acc.entry(i).or_default() += c;
            }
            acc.into_iter().filter(|&(_, c)| c != 0).collect()
        })
        .collect()
}

fn apply_columns(x: &Columns, v: &[(usize, i64)]) -> BTreeMap<usize, i64> {
    let mut out = BTreeMap::new();
    for &(j, c) in v {
        for &(i, d) in &x[j] {
            *out.entry(i).or_default() += c * d;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// `⟨J u, J v⟩ = q ⟨u, v⟩` on basis pairs.
fn check_orthogonality(cols: &Columns, nu: &[i8], q: i64) -> Result<(), (usize, usize)> {
    let m = cols.len();
    let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); m];
    for (alpha, col) in cols.iter().enumerate() {
        for &(i, c) in col {
            by_row[i].push((alpha, c));
        }
    }
    let mut gram: HashMap<(usize, usize), i64> = HashMap::new();
    for (i, entries) in by_row.iter().enumerate() {
        for &(a, c) in entries {
            for &(b, d) in entries {
                *gram.entry((a, b)).or_default() += nu[i] as i64 * c * d;
            }
        }
    }
    for alpha in 0..m {
        let want = q * nu[alpha] as i64;
        if gram.get(&(alpha, alpha)).copied().unwrap_or(0) != want {
            return Err((alpha, alpha));
        }
    }
    let mut bad: Vec<_> = gram.iter().filter(|(&(a, b), &g)| a != b && g != 0).map(|(&k, _)| k).collect();
    bad.sort();
    bad.first().map_or(Ok(()), |&p| Err(p))
}

/// `J² = -q Id`.
fn check_square(cols: &Columns, q: i64) -> Result<(), usize> {
    for alpha in 0..cols.len() {
        let sq = apply_columns(cols, &cols[alpha]);
        let want: BTreeMap<usize, i64> = if q == 0 { BTreeMap::new() } else { [(alpha, -q)].into() };
        if sq != want {
            return Err(alpha);
        }
    }
    Ok(())
}

fn check_shape(alg: &HTypeAlgebra) -> Result<String, String> {
    let sig = alg.signature();
    if alg.n != sig.n() || alg.n == 0 {
        return Err(format!("n = {} but r+s = {}", alg.n, sig.n()));
    }
    if alg.m == 0 || alg.metric_v.len() != alg.m {
        return Err(format!("metric_V has {} entries, m = {}", alg.metric_v.len(), alg.m));
    }
    if alg.metric_v.iter().any(|&x| x != 1 && x != -1) {
        return Err("metric_V entries must be ±1".into());
    }
    let want_z: Vec<i8> = (1..=alg.n).map(|k| sig.generator_sign(k)).collect();
    if alg.metric_z != want_z {
        return Err(format!("metric_Z {:?} does not match signature {sig}", alg.metric_z));
    }
    if alg.a.len() != alg.n || alg.a.iter().any(|ak| ak.len() != alg.m || ak.iter().any(|row| row.len() != alg.m)) {
        return Err(format!("A must be {}×{}×{}", alg.n, alg.m, alg.m));
    }
    if alg.basis_words.len() != alg.m {
        return Err(format!("{} basis words for {} vectors", alg.basis_words.len(), alg.m));
    }
    if alg.basis_words.iter().flatten().any(|&i| i == 0 || i > alg.n) {
        return Err("basis word uses a generator out of range".into());
    }
    Ok(format!("{sig}, dim V = {}, dim Z = {}", alg.m, alg.n))
}

fn check_integrality(alg: &HTypeAlgebra) -> Result<String, String> {
    for (k, ak) in alg.a.iter().enumerate() {
        for (alpha, row) in ak.iter().enumerate() {
            for (beta, &x) in row.iter().enumerate() {
                if x.abs() > 1 {
                    return Err(format!("A^{}_{{{},{}}} = {x}", k + 1, alpha + 1, beta + 1));
                }
            }
        }
    }
    Ok("all entries in {-1,0,1}".into())
}

fn check_antisymmetry(alg: &HTypeAlgebra) -> Result<String, String> {
    for (k, ak) in alg.a.iter().enumerate() {
        for alpha in 0..alg.m {
            for beta in alpha..alg.m {
                if ak[alpha][beta] != -ak[beta][alpha] {
                    return Err(format!("A^{}_{{{},{}}} vs A^{}_{{{},{}}}", k + 1, alpha + 1, beta + 1, k + 1, beta + 1, alpha + 1));
                }
            }
        }
    }
    Ok("A^k antisymmetric".into())
}

/// No nonzero `v ∈ V` brackets trivially with all of `V`.
fn check_center(alg: &HTypeAlgebra, cols: &[Columns]) -> Result<String, String> {
    // an invertible J_k already makes the bracket nondegenerate
    for (k, c) in cols.iter().enumerate() {
        if c.iter().all(|x| x.len() == 1) {
            let mut targets: Vec<usize> = c.iter().map(|x| x[0].0).collect();
            targets.sort_unstable();
            targets.dedup();
            if targets.len() == alg.m {
                return Ok(format!("J_{} invertible", k + 1));
            }
        }
    }
    let rows: Vec<Vec<BigRational>> = (0..alg.m)
        .map(|alpha| {
            alg.a.iter().flat_map(|ak| ak[alpha].iter().map(|&x| BigRational::from_integer(x.into()))).collect()
        })
        .collect();
    let rank = exactlin::rank(&rows, alg.n * alg.m);
    if rank == alg.m {
        Ok("bracket nondegenerate on V".into())
    } else {
        Err(format!("rank {rank} < {}", alg.m))
    }
}

/// Exhaustive Jacobi check over the basis of `N`, skipping triples whose
/// inner bracket cannot meet a non-central element.
fn check_jacobi(alg: &HTypeAlgebra) -> Result<String, String> {
    let (m, n) = (alg.m, alg.n);
    let dim = m + n;
    let bracket = |x: usize, y: usize| -> Vec<(usize, i64)> {
        if x < m && y < m {
            (0..n).filter(|&k| alg.a[k][x][y] != 0).map(|k| (m + k, alg.a[k][x][y])).collect()
        } else {
            Vec::new()
        }
    };
    let active: Vec<bool> = (0..dim).map(|x| (0..dim).any(|y| !bracket(x, y).is_empty())).collect();
    let nested = |x: usize, y: usize, z: usize| -> BTreeMap<usize, i64> {
        let mut out = BTreeMap::new();
        for (d, c) in bracket(x, y) {
            for (e, c2) in bracket(d, z) {
                *out.entry(e).or_insert(0) += c * c2;
            }
        }
        out
    };
    for x in 0..dim {
        for y in x + 1..dim {
            if !bracket(x, y).iter().any(|&(d, _)| active[d]) {
                continue;
            }
            for z in 0..dim {
                let mut sum = nested(x, y, z);
                for (e, c) in nested(y, z, x).into_iter().chain(nested(z, x, y)) {
                    *sum.entry(e).or_insert(0) += c;
                }
                if sum.values().any(|&c| c != 0) {
                    return Err(format!("triple ({},{},{})", x + 1, y + 1, z + 1));
                }
            }
        }
    }
    Ok("2-step nilpotent".into())
}

fn check_clifford(alg: &HTypeAlgebra, cols: &[Columns]) -> Result<(CliffordRep, String), String> {
    let module = MetricSpace::new(alg.metric_v.clone()).map_err(|e| e.to_string())?;
    let gens = cols.iter().map(columns_to_operator).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let rep = CliffordRep::new(alg.signature(), module, gens).map_err(|e: RepError| e.to_string())?;
    let report = verify(&rep);
    if !report.relation_failures.is_empty() || !report.skew_failures.is_empty() {
        return Err(report.summary());
    }
    Ok((rep, "relations and skew symmetry hold".into()))
}

fn check_orthogonality_all(alg: &HTypeAlgebra, cols: &[Columns]) -> Result<String, String> {
    let nu_z = &alg.metric_z;
    let mut tested = 0;
    for k in 0..alg.n {
        let q = nu_z[k] as i64;
        check_orthogonality(&cols[k], &alg.metric_v, q)
            .map_err(|(a, b)| format!("z_{}: <Jv_{},Jv_{}>", k + 1, a + 1, b + 1))?;
        check_square(&cols[k], q).map_err(|a| format!("z_{}: J² v_{}", k + 1, a + 1))?;
        tested += 1;
    }
    for i in 0..alg.n {
        for j in i + 1..alg.n {
            let sum = add_columns(&cols[i], &cols[j]);
            let q = nu_z[i] as i64 + nu_z[j] as i64;
            check_orthogonality(&sum, &alg.metric_v, q)
                .map_err(|(a, b)| format!("z_{}+z_{}: <Jv_{},Jv_{}>", i + 1, j + 1, a + 1, b + 1))?;
            check_square(&sum, q).map_err(|a| format!("z_{}+z_{}: J² v_{}", i + 1, j + 1, a + 1))?;
            tested += 1;
        }
    }
    Ok(format!("z_k and z_i+z_j, {tested} checked"))
}

fn check_round_trip(alg: &HTypeAlgebra, cols: &[Columns], rep: &CliffordRep) -> Result<String, String> {
    if rep.signature != alg.signature() || rep.dim() != alg.m {
        return Err(format!("module is {} of dim {}", rep.signature, rep.dim()));
    }
    if rep.module.signs() != alg.metric_v.as_slice() {
        return Err("module metric differs from metric_V".into());
    }
    for (k, g) in rep.generators.iter().enumerate() {
        for alpha in 0..alg.m {
            let expected: Vec<(usize, i64)> = match g.sparse_form() {
                Some(p) => {
                    let (t, s) = p.image(alpha);
                    vec![(t, s as i64)]
                }
                None => (0..alg.m)
                    .filter_map(|beta| {
                        let x = g.entry(beta, alpha);
                        (!x.is_zero()).then(|| (beta, x.to_i64().unwrap_or(i64::MAX)))
                    })
                    .collect(),
            };
            if expected != cols[k][alpha] {
                return Err(format!("J_{} v_{}", k + 1, alpha + 1));
            }
        }
    }
    Ok("J recovered from A matches the module".into())
}

/// Every invariant of an H-type algebra, computed in integer arithmetic.
///
/// With `rep`, also checks that the brackets reproduce its generators.
pub fn verify_htype(alg: &HTypeAlgebra, rep: Option<&CliffordRep>) -> HTypeReport {
    let mut report = HTypeReport::default();
    report.push("shape", check_shape(alg));
    if !report.is_ok() {
        return report;
    }
    report.push("integrality", check_integrality(alg));
    report.push("antisymmetry", check_antisymmetry(alg));
    let cols = reconstruct(alg);
    report.push("center", check_center(alg, &cols));
    report.push("jacobi", check_jacobi(alg));
    match check_clifford(alg, &cols) {
        Ok((rebuilt, detail)) => {
            report.push("clifford", Ok(detail));
            let neutral = match verify(&rebuilt).neutrality {
                Neutrality::Fail => Err(format!("metric signature {:?}", rebuilt.module.signature())),
                Neutrality::Pass => Ok("balanced".into()),
                Neutrality::NotApplicable => Ok("s = 0".into()),
            };
            report.push("neutrality", neutral);
        }
        Err(e) => report.push("clifford", Err(e)),
    }
    report.push("orthogonality", check_orthogonality_all(alg, &cols));
    if let Some(rep) = rep {
        report.push("round_trip", check_round_trip(alg, &cols, rep));
    }
    report
}

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("malformed constants: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entry {0} is not a rational number")]
    NotRational(String),
    #[error("bad shape: {0}")]
    Shape(String),
}

/// Structure constants with arbitrary rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalConstants {
    pub a: Vec<Vec<Vec<BigRational>>>,
}

fn rational_entry(v: &serde_json::Value) -> Result<BigRational, ConstantsError> {
    match v {
        serde_json::Value::Number(x) => x
            .as_i64()
            .map(|i| BigRational::from_integer(i.into()))
            .ok_or_else(|| ConstantsError::NotRational(x.to_string())),
        serde_json::Value::String(s) => {
            BigRational::from_str(s.trim()).map_err(|_| ConstantsError::NotRational(format!("{s:?}")))
        }
        other => Err(ConstantsError::NotRational(other.to_string())),
    }
}

/// Parse `{"A": [[[…]]]}` (extra fields ignored) whose entries are integers or
/// `"p/q"` strings.
pub fn parse_constants(text: &str) -> Result<RationalConstants, ConstantsError> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let a = v.get("A").ok_or_else(|| ConstantsError::Shape("missing field A".into()))?;
    let layer = |x: &serde_json::Value| -> Result<Vec<serde_json::Value>, ConstantsError> {
        x.as_array().cloned().ok_or_else(|| ConstantsError::Shape("expected an array".into()))
    };
    let mut out = Vec::new();
    for ak in layer(a)? {
        let mut rows = Vec::new();
        for row in layer(&ak)? {
            rows.push(layer(&row)?.iter().map(rational_entry).collect::<Result<Vec<_>, _>>()?);
        }
        out.push(rows);
    }
    Ok(RationalConstants { a: out })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalityReport {
    pub integer: bool,
    /// A lattice exists iff the constants can be taken rational, which they are.
    pub lattice: bool,
}

impl fmt::Display for RationalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.integer {
            write!(f, "integer constants: yes; lattice: exists by Mal'cev")
        } else {
            write!(f, "integer constants: no (rational); lattice: still exists by Mal'cev")
        }
    }
}

impl RationalConstants {
    pub fn report(&self) -> RationalityReport {
        let integer = self.a.iter().flatten().flatten().all(|x| x.is_integer());
        RationalityReport { integer, lattice: true }
    }
}

pub fn rationality_report(_alg: &HTypeAlgebra) -> RationalityReport {
    // i64 entries are integral by type
    RationalityReport { integer: true, lattice: true }
}

/// `b^k_{π(α)π(β)} = δ_k ε_α ε_β a^k_{αβ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub perm: Vec<usize>,
    pub v_signs: Vec<i8>,
    pub z_signs: Vec<i8>,
}

struct Matcher<'a> {
    a: &'a [Vec<Vec<i64>>],
    b: &'a [Vec<Vec<i64>>],
    signed: bool,
    order: Vec<usize>,
    perm: Vec<Option<usize>>,
    used: Vec<bool>,
    eps: Vec<i8>,
    delta: Vec<i8>,
}

fn profile(t: &[Vec<Vec<i64>>], alpha: usize) -> Vec<usize> {
    let mut p: Vec<usize> = t.iter().map(|tk| tk[alpha].iter().filter(|&&x| x != 0).count()).collect();
    p.sort_unstable();
    p
}

impl Matcher<'_> {
    /// Check `alpha ↦ (beta, e)` against every assigned index; on success
    /// return the `δ` entries newly fixed.
    fn consistent(&mut self, alpha: usize, beta: usize, e: i8) -> Option<Vec<usize>> {
        let mut fixed = Vec::new();
        let assigned: Vec<usize> = self.order.iter().copied().filter(|&g| self.perm[g].is_some() || g == alpha).collect();
        for g in assigned {
            let (bg, eg) = if g == alpha { (beta, e) } else { (self.perm[g].unwrap(), self.eps[g]) };
            for k in 0..self.a.len() {
                for (x, y, bx, by) in [(alpha, g, beta, bg), (g, alpha, bg, beta)] {
                    let av = self.a[k][x][y];
                    let bv = self.b[k][bx][by];
                    if av.abs() != bv.abs() {
                        self.undo(&fixed);
                        return None;
                    }
                    if !self.signed || av == 0 {
                        continue;
                    }
                    let need = (bv / av) as i8 * e * eg;
                    if self.delta[k] == 0 {
                        self.delta[k] = need;
                        fixed.push(k);
                    } else if self.delta[k] != need {
                        self.undo(&fixed);
                        return None;
                    }
                }
            }
        }
        Some(fixed)
    }

    fn undo(&mut self, fixed: &[usize]) {
        for &k in fixed {
            self.delta[k] = 0;
        }
    }

    fn search(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let alpha = self.order[depth];
        let pa = profile(self.a, alpha);
        let m = self.perm.len();
        let signs: &[i8] = if self.signed { &[1, -1] } else { &[1] };
        for beta in 0..m {
            if self.used[beta] || profile(self.b, beta) != pa {
                continue;
            }
            for &e in signs {
                let Some(fixed) = self.consistent(alpha, beta, e) else { continue };
                self.perm[alpha] = Some(beta);
                self.used[beta] = true;
                self.eps[alpha] = e;
                if self.search(depth + 1) {
                    return true;
                }
                self.perm[alpha] = None;
                self.used[beta] = false;
                self.undo(&fixed);
            }
        }
        false
    }
}

/// Breadth-first order over the bracket graph, so each new index is
/// constrained by an earlier one.
fn search_order(t: &[Vec<Vec<i64>>], m: usize) -> Vec<usize> {
    let mut seen = vec![false; m];
    let mut order = Vec::with_capacity(m);
    for start in 0..m {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for y in 0..m {
                if !seen[y] && t.iter().any(|tk| tk[x][y] != 0 || tk[y][x] != 0) {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    order
}

fn tensor_dims(t: &[Vec<Vec<i64>>]) -> Option<(usize, usize)> {
    let n = t.len();
    let m = t.first().map_or(0, |t0| t0.len());
    t.iter().all(|tk| tk.len() == m && tk.iter().all(|row| row.len() == m)).then_some((n, m))
}

fn find_equivalence(a: &[Vec<Vec<i64>>], b: &[Vec<Vec<i64>>], signed: bool) -> Option<Equivalence> {
    let (n, m) = tensor_dims(a)?;
    if tensor_dims(b)? != (n, m) {
        return None;
    }
    let mut matcher = Matcher {
        a,
        b,
        signed,
        order: search_order(a, m),
        perm: vec![None; m],
        used: vec![false; m],
        eps: vec![1; m],
        delta: vec![0; n],
    };
    if !matcher.search(0) {
        return None;
    }
    Some(Equivalence {
        perm: matcher.perm.into_iter().map(|p| p.expect("complete")).collect(),
        v_signs: matcher.eps,
        z_signs: matcher.delta.into_iter().map(|d| if d == 0 { 1 } else { d }).collect(),
    })
}

/// A signed relabeling of `V` and sign changes of the `z_k` taking `a` to `b`.
pub fn signed_equivalence(a: &[Vec<Vec<i64>>], b: &[Vec<Vec<i64>>]) -> Option<Equivalence> {
    find_equivalence(a, b, true)
}

/// `|a|` and `|b|` agree after permuting the basis of `V`.
pub fn abs_equivalent(a: &[Vec<Vec<i64>>], b: &[Vec<Vec<i64>>]) -> bool {
    find_equivalence(a, b, false).is_some()
}

fn format_rhs(c: &[i64]) -> String {
    let mut out = String::new();
    for (k, &x) in c.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let sign = if x < 0 { "-" } else if out.is_empty() { "" } else { "+" };
        let mag = if x.abs() == 1 { String::new() } else { x.abs().to_string() };
        out.push_str(&format!("{sign}{mag}z_{}", k + 1));
    }
    out
}

/// Nonzero brackets `[v_α, v_β]`, `α < β`, grouped by value up to sign:
/// `[v_1,v_3]=[v_2,v_4]=z_1`.
pub fn bracket_lines(alg: &HTypeAlgebra) -> Vec<String> {
    // (coefficients, [(negated, α, β)])
    type Group = (Vec<i64>, Vec<(bool, usize, usize)>);
    let mut groups: Vec<Group> = Vec::new();
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    for alpha in 0..alg.m {
        for beta in alpha + 1..alg.m {
            let c = alg.bracket(alpha, beta);
            let Some(&lead) = c.iter().find(|&&x| x != 0) else { continue };
            let neg = lead < 0;
            let key: Vec<i64> = if neg { c.iter().map(|x| -x).collect() } else { c };
            let g = *index.entry(key.clone()).or_insert_with(|| {
                groups.push((key, Vec::new()));
                groups.len() - 1
            });
            groups[g].1.push((neg, alpha, beta));
        }
    }
    let first_k = |c: &[i64]| c.iter().position(|&x| x != 0).unwrap_or(0);
    groups.sort_by_key(|(key, pairs)| (first_k(key), key.iter().filter(|&&x| x != 0).count(), pairs[0].1, pairs[0].2));
    groups
        .iter()
        .map(|(key, pairs)| {
            let lhs: Vec<String> = pairs
                .iter()
                .map(|&(neg, a, b)| format!("{}[v_{},v_{}]", if neg { "-" } else { "" }, a + 1, b + 1))
                .collect();
            format!("{}={}", lhs.join("="), format_rhs(key))
        })
        .collect()
}

/// One nonzero entry per line: `k,alpha,beta,value`, 1-based.
pub fn csv_entries(alg: &HTypeAlgebra) -> String {
    let mut out = String::from("k,alpha,beta,value\n");
    for (k, ak) in alg.a.iter().enumerate() {
        for (alpha, row) in ak.iter().enumerate() {
            for (beta, &x) in row.iter().enumerate() {
                if x != 0 {
                    out.push_str(&format!("{},{},{},{x}\n", k + 1, alpha + 1, beta + 1));
                }
            }
        }
    }
    out
}

/// Parse bracket lines in the [`bracket_lines`] format back into a tensor.
pub fn parse_bracket_lines(text: &str, m: usize, n: usize) -> Result<Tensor, String> {
    let mut a = vec![vec![vec![0i64; m]; m]; n];
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let parts: Vec<&str> = line.split('=').map(str::trim).collect();
        let (rhs, lhs) = parts.split_last().ok_or_else(|| format!("empty line {line:?}"))?;
        let mut coeffs = vec![0i64; n];
        for term in rhs.replace('-', "+-").split('+').filter(|t| !t.is_empty()) {
            let (sign, body) = term.strip_prefix('-').map_or((1, term), |b| (-1, b));
            let k: usize = body.strip_prefix("z_").and_then(|x| x.parse().ok()).ok_or_else(|| format!("bad term {term:?}"))?;
            if k == 0 || k > n {
                return Err(format!("z_{k} out of range"));
            }
            coeffs[k - 1] += sign;
        }
        for pair in lhs {
            let (sign, body) = pair.strip_prefix('-').map_or((1, *pair), |b| (-1, b));
            let inner = body.strip_prefix("[v_").and_then(|b| b.strip_suffix(']')).ok_or_else(|| format!("bad pair {pair:?}"))?;
            let (x, y) = inner.split_once(",v_").ok_or_else(|| format!("bad pair {pair:?}"))?;
            let (x, y): (usize, usize) = (x.parse().map_err(|_| pair.to_string())?, y.parse().map_err(|_| pair.to_string())?);
            if x == 0 || y == 0 || x > m || y > m {
                return Err(format!("index out of range in {pair:?}"));
            }
            for k in 0..n {
                a[k][x - 1][y - 1] = sign * coeffs[k];
                a[k][y - 1][x - 1] = -sign * coeffs[k];
            }
        }
    }
    Ok(a)
}
