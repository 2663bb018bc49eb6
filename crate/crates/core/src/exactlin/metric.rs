use serde::{Deserialize, Serialize};

use super::{LinError, Scalar};

/// `ℝ^{p,q}` with a diagonal scalar product given by a sign vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetricSpace {
    signs: Vec<i8>,
}

impl MetricSpace {
    pub fn new(signs: Vec<i8>) -> Result<Self, LinError> {
        if signs.is_empty() {
            return Err(LinError::EmptyMetric);
        }
        if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(LinError::BadSign(bad));
        }
        Ok(MetricSpace { signs })
    }

    /// `p` positive directions followed by `q` negative ones.
    pub fn standard(p: usize, q: usize) -> Self {
        let mut signs = vec![1; p];
        signs.extend(std::iter::repeat_n(-1, q));
        MetricSpace { signs }
    }

    pub fn euclidean(n: usize) -> Self {
        Self::standard(n, 0)
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, i: usize) -> i8 {
        self.signs[i]
    }

    /// `(#positive, #negative)`.
    pub fn signature(&self) -> (usize, usize) {
        let p = self.signs.iter().filter(|&&s| s > 0).count();
        (p, self.signs.len() - p)
    }

    pub fn is_neutral(&self) -> bool {
        let (p, q) = self.signature();
        p == q
    }

    /// Product metric on the tensor product, row-major in `(self, other)`.
    pub fn kron(&self, other: &MetricSpace) -> MetricSpace {
        let mut signs = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.signs {
            for &b in &other.signs {
                signs.push(a * b);
            }
        }
        MetricSpace { signs }
    }

    /// `self ⊕ other`.
    pub fn direct_sum(&self, other: &MetricSpace) -> MetricSpace {
        let mut signs = self.signs.clone();
        signs.extend_from_slice(&other.signs);
        MetricSpace { signs }
    }

    pub fn negated(&self) -> MetricSpace {
        MetricSpace { signs: self.signs.iter().map(|s| -s).collect() }
    }

    /// `Σ signs[i] u_i v_i`.
    pub fn inner(&self, u: &[Scalar], v: &[Scalar]) -> Result<Scalar, LinError> {
        if u.len() != self.dim() || v.len() != self.dim() {
            return Err(LinError::DimensionMismatch { expected: self.dim(), found: u.len().max(v.len()) });
        }
        let mut acc = Scalar::zero();
        for ((x, y), &s) in u.iter().zip(v).zip(&self.signs) {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let p = x.checked_mul(y)?;
            acc = if s > 0 { acc.checked_add(&p)? } else { acc.checked_add(&-p)? };
        }
        Ok(acc)
    }

    pub fn norm(&self, v: &[Scalar]) -> Result<Scalar, LinError> {
        self.inner(v, v)
    }
}
