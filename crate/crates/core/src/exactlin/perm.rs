use serde::{Deserialize, Serialize};

use super::{LinError, Scalar};

/// A signed permutation matrix stored by columns: `e_j ↦ sign[j] · e_{target[j]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPerm {
    target: Vec<usize>,
    sign: Vec<i8>,
}

impl SignedPerm {
    pub fn new(target: Vec<usize>, sign: Vec<i8>) -> Result<Self, LinError> {
        let n = target.len();
        if sign.len() != n {
            return Err(LinError::DimensionMismatch { expected: n, found: sign.len() });
        }
        let mut seen = vec![false; n];
        for &t in &target {
            if t >= n || seen[t] {
                return Err(LinError::NotAPermutation);
            }
            seen[t] = true;
        }
        if sign.iter().any(|&s| s != 1 && s != -1) {
            return Err(LinError::NotAPermutation);
        }
        Ok(SignedPerm { target, sign })
    }

    pub fn identity(n: usize) -> Self {
        SignedPerm { target: (0..n).collect(), sign: vec![1; n] }
    }

    /// Build from a dense row-major matrix if it is a signed permutation.
    pub fn from_dense(n: usize, entries: &[Scalar]) -> Option<Self> {
        let mut target = vec![usize::MAX; n];
        let mut sign = vec![0i8; n];
        for j in 0..n {
            for i in 0..n {
                let x = &entries[i * n + j];
                if x.is_zero() {
                    continue;
                }
                let s = match x.to_i64() {
                    Some(1) => 1,
                    Some(-1) => -1,
                    _ => return None,
                };
                if target[j] != usize::MAX {
                    return None;
                }
                target[j] = i;
                sign[j] = s;
            }
            if target[j] == usize::MAX {
                return None;
            }
        }
        SignedPerm::new(target, sign).ok()
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    /// Image of `e_j` as `(index, sign)`.
    pub fn image(&self, j: usize) -> (usize, i8) {
        (self.target[j], self.sign[j])
    }

    pub fn targets(&self) -> &[usize] {
        &self.target
    }

    pub fn signs(&self) -> &[i8] {
        &self.sign
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        let (target, sign) = other
            .target
            .iter()
            .zip(&other.sign)
            .map(|(&t, &s)| (self.target[t], self.sign[t] * s))
            .unzip();
        SignedPerm { target, sign }
    }

    pub fn negated(&self) -> SignedPerm {
        SignedPerm { target: self.target.clone(), sign: self.sign.iter().map(|s| -s).collect() }
    }

    pub fn inverse(&self) -> SignedPerm {
        let n = self.dim();
        let mut target = vec![0; n];
        let mut sign = vec![0; n];
        for j in 0..n {
            target[self.target[j]] = j;
            sign[self.target[j]] = self.sign[j];
        }
        SignedPerm { target, sign }
    }

    /// `self ⊗ other`, row-major index `(a, b) ↦ a·dim(other) + b`.
    pub fn kron(&self, other: &SignedPerm) -> SignedPerm {
        let m = other.dim();
        let mut target = Vec::with_capacity(self.dim() * m);
        let mut sign = Vec::with_capacity(self.dim() * m);
        for a in 0..self.dim() {
            for b in 0..m {
                target.push(self.target[a] * m + other.target[b]);
                sign.push(self.sign[a] * other.sign[b]);
            }
        }
        SignedPerm { target, sign }
    }

    /// `self ⊕ other` as a block-diagonal map.
    pub fn direct_sum(&self, other: &SignedPerm) -> SignedPerm {
        let n = self.dim();
        let mut target = self.target.clone();
        target.extend(other.target.iter().map(|t| t + n));
        let mut sign = self.sign.clone();
        sign.extend_from_slice(&other.sign);
        SignedPerm { target, sign }
    }

    pub fn is_identity(&self) -> bool {
        self.target.iter().enumerate().all(|(j, &t)| t == j) && self.sign.iter().all(|&s| s == 1)
    }

    /// True when `self = c·Id` for `c = ±1`.
    pub fn is_scalar(&self, c: i8) -> bool {
        self.target.iter().enumerate().all(|(j, &t)| t == j) && self.sign.iter().all(|&s| s == c)
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); v.len()];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            out[self.target[j]] = if self.sign[j] > 0 { x.clone() } else { -x };
        }
        out
    }

    /// Row-major dense expansion.
    pub fn to_dense(&self) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = vec![Scalar::zero(); n * n];
        for j in 0..n {
            out[self.target[j] * n + j] = Scalar::int(self.sign[j] as i64);
        }
        out
    }
}
