//! Orbits `J_{i1} ⋯ J_{ik} w` of a seed, orthonormal integral bases drawn
//! from them, the induced signed-permutation action and structure constants.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford_rep::{base_representation, CliffordRep, RepError, Signature, BASE_SIGNATURES};
use crate::exactlin::{LinError, MetricSpace, Scalar, SignedPerm, Vector};
use crate::involution_engine::{orthogonalize_seed, scheme_for, seed_candidates, InvolutionScheme, SchemeError, SeedVector};
use crate::tensor_periodicity::{extend, minimal_dimension, ExtensionKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasisError {
    #[error("orbit vectors for words {0:?} and {1:?} are neither proportional nor orthogonal")]
    Incoherent(Vec<usize>, Vec<usize>),
    #[error("orbit vector for word {0:?} does not have norm ±⟨w,w⟩")]
    BadNorm(Vec<usize>),
    #[error("orbit spans {found} basis vectors, expected {expected}")]
    WrongDimension { expected: usize, found: usize },
    #[error("J_{generator} v_{index} is not ± a basis vector")]
    NotPermuted { generator: usize, index: usize },
    #[error("J_{0} v_{2} = ±J_{1} v_{2}")]
    Exclusion(usize, usize, usize),
    #[error("structure constant A^{0}_({1},{2}) is not in {{-1,0,1}}")]
    NonIntegral(usize, usize, usize),
    #[error("generator {0} is not a signed permutation")]
    NotSignedPermutation(usize),
    #[error("no seed of {0} gives an integral basis")]
    NoSeed(Signature),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

#[derive(Clone, Debug)]
pub struct OrbitVector {
    pub word: Vec<usize>,
    pub vector: Vector,
}

/// Increasing index words over `n` generators, by length then lexicographically.
pub fn ordered_words(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(1 << n);
    for k in 0..=n {
        let mut c: Vec<usize> = (1..=k).collect();
        loop {
            out.push(c.clone());
            // advance to the next k-combination of 1..=n
            let Some(i) = (0..k).rev().find(|&i| c[i] < n - (k - 1 - i)) else { break };
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
        }
    }
    out
}

fn mask_of(word: &[usize]) -> usize {
    word.iter().fold(0, |m, &k| m | 1 << (k - 1))
}

/// All `2^{r+s}` products `J_{i1} ⋯ J_{ik} w` with `i1 < … < ik`, in word order.
pub fn generate_orbit(rep: &CliffordRep, seed: &SeedVector) -> Result<Vec<OrbitVector>, BasisError> {
    let n = rep.signature.n();
    let mut by_mask: Vec<Vector> = Vec::with_capacity(1 << n);
    by_mask.push(seed.vector.clone());
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        let v = rep.generators[low].apply(&by_mask[mask ^ (1 << low)])?;
        by_mask.push(v);
    }
    Ok(ordered_words(n)
        .into_iter()
        .map(|w| {
            let vector = by_mask[mask_of(&w)].clone();
            OrbitVector { word: w, vector }
        })
        .collect())
}

/// Sparse form of `v` up to sign, with the sign that was removed.
fn sign_key(v: &[Scalar]) -> (String, i8) {
    let sign = match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.signum() < 0 => -1,
        _ => 1,
    };
    let mut key = String::new();
    for (i, x) in v.iter().enumerate() {
        if !x.is_zero() {
            let x = if sign < 0 { -x } else { x.clone() };
            key.push_str(&format!("{i}:{x},"));
        }
    }
    (key, sign)
}

fn support(v: &[Scalar]) -> Vec<usize> {
    (0..v.len()).filter(|&i| !v[i].is_zero()).collect()
}

fn sparse_inner(metric: &MetricSpace, u: &[Scalar], u_support: &[usize], v: &[Scalar]) -> Result<Scalar, LinError> {
    let mut acc = Scalar::zero();
    for &i in u_support {
        if v[i].is_zero() {
            continue;
        }
        let t = u[i].checked_mul(&v[i])?;
        acc = if metric.sign(i) > 0 { acc.checked_add(&t)? } else { acc.checked_add(&-t)? };
    }
    Ok(acc)
}

/// Orthonormal basis drawn from a seed orbit.
///
/// `vectors[α] / √scale` is the unit basis vector `v_α` with `⟨v_α,v_α⟩ = norms[α]`.
#[derive(Clone, Debug)]
pub struct IntegralBasis {
    pub signature: Signature,
    pub seed: SeedVector,
    pub words: Vec<Vec<usize>>,
    pub vectors: Vec<Vector>,
    pub norms: Vec<i8>,
    pub scale: Scalar,
}

impl IntegralBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Keep the first orbit vector of each `±` class, requiring all classes to be
/// mutually orthogonal with norm `±⟨w,w⟩`. Spacelike vectors come first.
pub fn select_basis(
    signature: Signature,
    seed: &SeedVector,
    orbit: &[OrbitVector],
    metric: &MetricSpace,
    expected: usize,
) -> Result<IntegralBasis, BasisError> {
    let scale = &seed.scale;
    let neg_scale = -scale;
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut chosen: Vec<(&OrbitVector, Vec<usize>, i8)> = Vec::new();
    for ov in orbit {
        let (key, _) = sign_key(&ov.vector);
        if seen.contains_key(&key) {
            continue;
        }
        let supp = support(&ov.vector);
        let norm = sparse_inner(metric, &ov.vector, &supp, &ov.vector)?;
        let sign = if &norm == scale {
            1
        } else if norm == neg_scale {
            -1
        } else {
            return Err(BasisError::BadNorm(ov.word.clone()));
        };
        for (other, _, _) in &chosen {
            if !sparse_inner(metric, &ov.vector, &supp, &other.vector)?.is_zero() {
                return Err(BasisError::Incoherent(other.word.clone(), ov.word.clone()));
            }
        }
        seen.insert(key, ());
        chosen.push((ov, supp, sign));
        if chosen.len() > expected {
            return Err(BasisError::WrongDimension { expected, found: chosen.len() });
        }
    }
    if chosen.len() != expected {
        return Err(BasisError::WrongDimension { expected, found: chosen.len() });
    }
    // stable: orbit order is already by word
    chosen.sort_by_key(|(_, _, sign)| -sign);
    Ok(IntegralBasis {
        signature,
        seed: seed.clone(),
        words: chosen.iter().map(|(o, _, _)| o.word.clone()).collect(),
        vectors: chosen.iter().map(|(o, _, _)| o.vector.clone()).collect(),
        norms: chosen.iter().map(|(_, _, s)| *s).collect(),
        scale: scale.clone(),
    })
}

/// For each generator, the signed permutation with `J_k v_α = σ v_β`.
///
/// Also checks that distinct generators never send a basis vector to the same
/// line.
pub fn action_table(rep: &CliffordRep, basis: &IntegralBasis) -> Result<Vec<SignedPerm>, BasisError> {
    let index: HashMap<String, (usize, i8)> =
        basis.vectors.iter().enumerate().map(|(i, v)| {
            let (k, s) = sign_key(v);
            (k, (i, s))
        }).collect();
    let m = basis.dim();
    let mut table = Vec::with_capacity(rep.generators.len());
    for (k, g) in rep.generators.iter().enumerate() {
        let mut targets = Vec::with_capacity(m);
        let mut signs = Vec::with_capacity(m);
        for (a, v) in basis.vectors.iter().enumerate() {
            let u = g.apply(v)?;
            let (key, t) = sign_key(&u);
            let &(b, s) = index.get(&key).ok_or(BasisError::NotPermuted { generator: k + 1, index: a + 1 })?;
            targets.push(b);
            signs.push(t * s);
        }
        table.push(SignedPerm::new(targets, signs)?);
    }
    for a in 0..m {
        for i in 0..table.len() {
            for j in i + 1..table.len() {
                if table[i].image(a).0 == table[j].image(a).0 {
                    return Err(BasisError::Exclusion(i + 1, j + 1, a + 1));
                }
            }
        }
    }
    Ok(table)
}

/// The module spanned by the basis, with generators acting by the action table.
pub fn reduced_rep(basis: &IntegralBasis, table: &[SignedPerm]) -> Result<CliffordRep, BasisError> {
    let module = MetricSpace::new(basis.norms.clone())?;
    let gens = table.iter().cloned().map(crate::exactlin::Operator::from_perm).collect();
    Ok(CliffordRep::new(basis.signature, module, gens)?.verified()?)
}

/// `[v_α, v_β] = Σ_k A^k_{αβ} z_k`, with `A^k_{αβ} = ν^Z_k ⟨J_k v_α, v_β⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureConstants {
    pub m: usize,
    pub n: usize,
    /// Indexed `[k][α][β]`.
    pub a: Vec<Vec<Vec<i64>>>,
    pub nu_v: Vec<i8>,
    pub nu_z: Vec<i8>,
}

impl StructureConstants {
    /// Constants of a representation whose standard basis is orthonormal.
    pub fn from_rep(rep: &CliffordRep) -> Result<Self, BasisError> {
        let m = rep.dim();
        let n = rep.signature.n();
        let nu_v = rep.module.signs().to_vec();
        let nu_z: Vec<i8> = (1..=n).map(|k| rep.signature.generator_sign(k)).collect();
        let mut a = vec![vec![vec![0i64; m]; m]; n];
        for (k, g) in rep.generators.iter().enumerate() {
            for alpha in 0..m {
                for beta in 0..m {
                    // ⟨J e_α, e_β⟩ = ν_β J_{βα}
                    let x = match g.sparse_form() {
                        Some(p) => {
                            let (t, s) = p.image(alpha);
                            if t == beta { s as i64 } else { 0 }
                        }
                        None => g.entry(beta, alpha).to_i64().ok_or(BasisError::NonIntegral(k + 1, alpha + 1, beta + 1))?,
                    };
                    let v = nu_z[k] as i64 * nu_v[beta] as i64 * x;
                    if v.abs() > 1 {
                        return Err(BasisError::NonIntegral(k + 1, alpha + 1, beta + 1));
                    }
                    a[k][alpha][beta] = v;
                }
            }
        }
        Ok(StructureConstants { m, n, a, nu_v, nu_z })
    }
}

/// Structure constants computed from exact inner products in the host module.
pub fn structure_constants(rep: &CliffordRep, basis: &IntegralBasis) -> Result<StructureConstants, BasisError> {
    let m = basis.dim();
    let n = rep.signature.n();
    let metric = &rep.module;
    let nu_z: Vec<i8> = (1..=n).map(|k| rep.signature.generator_sign(k)).collect();
    let mut a = vec![vec![vec![0i64; m]; m]; n];
    for (k, g) in rep.generators.iter().enumerate() {
        for (alpha, v) in basis.vectors.iter().enumerate() {
            let u = g.apply(v)?;
            let supp = support(&u);
            for (beta, w) in basis.vectors.iter().enumerate() {
                let ip = sparse_inner(metric, &u, &supp, w)?.checked_div(&basis.scale)?;
                let x = ip.to_i64().filter(|x| x.abs() <= 1).ok_or(BasisError::NonIntegral(k + 1, alpha + 1, beta + 1))?;
                a[k][alpha][beta] = nu_z[k] as i64 * x;
            }
        }
    }
    Ok(StructureConstants { m, n, a, nu_v: basis.norms.clone(), nu_z })
}

/// `Cl_{8,8}` on `ℝ^{128,128}`: the `(8,0)` model extended by the `(0,8)` model.
pub fn ambient_host() -> &'static CliffordRep {
    static HOST: OnceLock<CliffordRep> = OnceLock::new();
    HOST.get_or_init(|| {
        let r8 = base_representation(Signature::new(8, 0)).expect("(8,0) model");
        let s8 = base_representation(Signature::new(0, 8)).expect("(0,8) model");
        extend(&r8, ExtensionKind::S8, &s8).expect("Cl_{8,8} host")
    })
}

/// Module in which the catalog construction runs for `sig`.
pub fn host_for(sig: Signature) -> Result<CliffordRep, BasisError> {
    if BASE_SIGNATURES.contains(&sig) {
        return Ok(base_representation(sig)?);
    }
    Ok(ambient_host().restrict(sig.r, sig.s)?)
}

#[derive(Clone, Debug)]
pub struct CatalogBuild {
    pub host: CliffordRep,
    pub scheme: InvolutionScheme,
    pub basis: IntegralBasis,
    pub table: Vec<SignedPerm>,
    /// The basis span as a module in its own right, on the standard basis.
    pub rep: CliffordRep,
    pub constants: StructureConstants,
    /// Seed candidates tried before one succeeded.
    pub attempts: usize,
}

/// Integral basis of a minimal admissible module for a catalog signature.
pub fn build_catalog(sig: Signature) -> Result<CatalogBuild, BasisError> {
    let scheme = scheme_for(sig)?;
    let host = host_for(sig)?;
    scheme.verify_against(&host)?;
    let expected = minimal_dimension(sig);
    let omegas: Vec<_> = scheme.omegas.iter().map(|w| w.evaluate(&host)).collect();
    for (attempt, candidate) in seed_candidates(&host, &scheme)?.into_iter().enumerate() {
        let preserve: Vec<_> = scheme.flipped(&candidate.flips).iter().map(|p| p.evaluate(&host)).collect();
        let seed = orthogonalize_seed(&candidate, &omegas, &preserve, &host.module)?;
        let orbit = generate_orbit(&host, &seed)?;
        let basis = match select_basis(sig, &seed, &orbit, &host.module, expected) {
            Ok(b) => b,
            Err(BasisError::Incoherent(..) | BasisError::WrongDimension { .. } | BasisError::BadNorm(_)) => continue,
            Err(e) => return Err(e),
        };
        let table = action_table(&host, &basis)?;
        let rep = reduced_rep(&basis, &table)?;
        let constants = structure_constants(&host, &basis)?;
        return Ok(CatalogBuild { host, scheme, basis, table, rep, constants, attempts: attempt + 1 });
    }
    Err(BasisError::NoSeed(sig))
}

/// Minimal admissible integral module for a catalog signature.
pub fn integral_rep(sig: Signature) -> Result<CliffordRep, BasisError> {
    Ok(build_catalog(sig)?.rep)
}

/// How a standard basis vector is reached: `e_index = sign · J_word e_origin`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisLabel {
    pub origin: usize,
    pub sign: i8,
    pub word: Vec<usize>,
}

/// Label every standard basis vector by the first word reaching it from the
/// lowest unreached vector. Requires signed-permutation generators.
pub fn label_basis(rep: &CliffordRep) -> Result<Vec<BasisLabel>, BasisError> {
    let perms: Vec<&SignedPerm> = rep
        .generators
        .iter()
        .enumerate()
        .map(|(k, g)| g.sparse_form().ok_or(BasisError::NotSignedPermutation(k + 1)))
        .collect::<Result<_, _>>()?;
    let n = perms.len();
    let m = rep.dim();
    let words = ordered_words(n);
    let mut labels: Vec<Option<BasisLabel>> = vec![None; m];
    let mut image = vec![(0usize, 1i8); 1 << n];
    while let Some(origin) = labels.iter().position(Option::is_none) {
        image[0] = (origin, 1);
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            let (i, s) = image[mask ^ (1 << low)];
            let (t, u) = perms[low].image(i);
            image[mask] = (t, s * u);
        }
        for w in &words {
            let (t, s) = image[mask_of(w)];
            if labels[t].is_none() {
                labels[t] = Some(BasisLabel { origin, sign: s, word: w.clone() });
            }
        }
    }
    Ok(labels.into_iter().map(|l| l.expect("all labelled")).collect())
}
