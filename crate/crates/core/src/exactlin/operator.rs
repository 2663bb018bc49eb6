use std::sync::OnceLock;

use super::{LinError, MetricSpace, Scalar, SignedPerm};

/// A square linear map with exact entries.
///
/// Dense entries are the reference semantics. Signed permutations carry a
/// sparse form and materialize their dense matrix on first request.
#[derive(Clone, Debug)]
pub struct Operator {
    dim: usize,
    sparse: Option<SignedPerm>,
    dense: OnceLock<Vec<Scalar>>,
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim {
            return false;
        }
        match (&self.sparse, &other.sparse) {
            (Some(a), Some(b)) => a == b,
            _ => self.entries() == other.entries(),
        }
    }
}

impl Eq for Operator {}

impl Operator {
    /// Row-major dense matrix. Detects signed permutations and records their sparse form.
    pub fn from_dense(dim: usize, entries: Vec<Scalar>) -> Result<Self, LinError> {
        if entries.len() != dim * dim {
            return Err(LinError::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let sparse = SignedPerm::from_dense(dim, &entries);
        let dense = OnceLock::new();
        let _ = dense.set(entries);
        Ok(Operator { dim, sparse, dense })
    }

    /// Dense operator without signed-permutation detection, so every
    /// operation takes the dense path.
    pub fn dense_only(dim: usize, entries: Vec<Scalar>) -> Result<Self, LinError> {
        if entries.len() != dim * dim {
            return Err(LinError::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let dense = OnceLock::new();
        let _ = dense.set(entries);
        Ok(Operator { dim, sparse: None, dense })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, LinError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(LinError::DimensionMismatch { expected: n, found: row.len() });
            }
            entries.extend(row.iter().map(|&x| Scalar::int(x)));
        }
        Self::from_dense(n, entries)
    }

    pub fn from_perm(p: SignedPerm) -> Self {
        Operator { dim: p.dim(), sparse: Some(p), dense: OnceLock::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_perm(SignedPerm::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sparse_form(&self) -> Option<&SignedPerm> {
        self.sparse.as_ref()
    }

    pub fn entries(&self) -> &[Scalar] {
        self.dense.get_or_init(|| self.sparse.as_ref().expect("operator without any form").to_dense())
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        match &self.sparse {
            Some(p) => {
                let (t, s) = p.image(j);
                if t == i {
                    Scalar::int(s as i64)
                } else {
                    Scalar::zero()
                }
            }
            None => self.entries()[i * self.dim + j].clone(),
        }
    }

    /// True when the sparse form, if any, expands exactly to the dense entries.
    pub fn forms_agree(&self) -> bool {
        match &self.sparse {
            Some(p) => p.to_dense() == self.entries(),
            None => SignedPerm::from_dense(self.dim, self.entries()).is_none(),
        }
    }

    fn check_dim(&self, n: usize) -> Result<(), LinError> {
        if self.dim != n {
            return Err(LinError::DimensionMismatch { expected: self.dim, found: n });
        }
        Ok(())
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinError> {
        self.check_dim(v.len())?;
        if let Some(p) = &self.sparse {
            return Ok(p.apply(v));
        }
        let n = self.dim;
        let a = self.entries();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Scalar::zero();
            for j in 0..n {
                let x = &a[i * n + j];
                if x.is_zero() || v[j].is_zero() {
                    continue;
                }
                acc = acc.checked_add(&x.checked_mul(&v[j])?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Operator, LinError> {
        self.check_dim(other.dim)?;
        if let (Some(a), Some(b)) = (&self.sparse, &other.sparse) {
            return Ok(Operator::from_perm(a.compose(b)));
        }
        Operator::from_dense(self.dim, dense_mul(self.dim, self.entries(), other.entries())?)
    }

    /// Dense product, ignoring any sparse forms. Used to cross-check the fast path.
    pub fn compose_dense(&self, other: &Operator) -> Result<Operator, LinError> {
        self.check_dim(other.dim)?;
        Operator::from_dense(self.dim, dense_mul(self.dim, self.entries(), other.entries())?)
    }

    pub fn neg(&self) -> Operator {
        match &self.sparse {
            Some(p) => Operator::from_perm(p.negated()),
            None => Operator::from_dense(self.dim, self.entries().iter().map(|x| -x).collect()).expect("same shape"),
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator, LinError> {
        self.check_dim(other.dim)?;
        let entries = self
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(x, y)| x.checked_add(y))
            .collect::<Result<Vec<_>, _>>()?;
        Operator::from_dense(self.dim, entries)
    }

    pub fn scale(&self, c: &Scalar) -> Result<Operator, LinError> {
        let entries = self.entries().iter().map(|x| x.checked_mul(c)).collect::<Result<Vec<_>, _>>()?;
        Operator::from_dense(self.dim, entries)
    }

    pub fn transpose(&self) -> Operator {
        let n = self.dim;
        if let Some(p) = &self.sparse {
            // A signed permutation is orthogonal: Aᵀ = A⁻¹.
            return Operator::from_perm(p.inverse());
        }
        let a = self.entries();
        let entries = (0..n * n).map(|k| a[(k % n) * n + k / n].clone()).collect();
        Operator::from_dense(n, entries).expect("same shape")
    }

    /// `A* = D Aᵀ D`, so that `⟨A u, v⟩ = ⟨u, A* v⟩`.
    pub fn metric_adjoint(&self, m: &MetricSpace) -> Result<Operator, LinError> {
        self.check_dim(m.dim())?;
        let n = self.dim;
        let s = m.signs();
        if let Some(p) = &self.sparse {
            let inv = p.inverse();
            let target = inv.targets().to_vec();
            let sign = (0..n).map(|j| s[target[j]] * inv.signs()[j] * s[j]).collect();
            return Ok(Operator::from_perm(SignedPerm::new(target, sign)?));
        }
        let t = self.transpose();
        let a = t.entries();
        let entries = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                if s[i] * s[j] > 0 {
                    a[k].clone()
                } else {
                    -&a[k]
                }
            })
            .collect();
        Operator::from_dense(n, entries)
    }

    /// `self == c·Id` for an integer `c`.
    pub fn is_scalar(&self, c: i64) -> bool {
        if let Some(p) = &self.sparse {
            return (c == 1 || c == -1) && p.is_scalar(c as i8);
        }
        let n = self.dim;
        let target = Scalar::int(c);
        self.entries()
            .iter()
            .enumerate()
            .all(|(k, x)| if k / n == k % n { *x == target } else { x.is_zero() })
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar(1)
    }

    pub fn is_involution(&self) -> bool {
        self.compose(self).map(|sq| sq.is_identity()).unwrap_or(false)
    }

    pub fn is_anti_involution(&self) -> bool {
        self.compose(self).map(|sq| sq.is_scalar(-1)).unwrap_or(false)
    }

    pub fn is_symmetric(&self, m: &MetricSpace) -> bool {
        self.metric_adjoint(m).map(|a| a == *self).unwrap_or(false)
    }

    pub fn is_skew(&self, m: &MetricSpace) -> bool {
        self.metric_adjoint(m).map(|a| a == self.neg()).unwrap_or(false)
    }

    /// `⟨A u, A v⟩ = ⟨u, v⟩`.
    pub fn is_isometry(&self, m: &MetricSpace) -> bool {
        self.metric_adjoint(m).and_then(|a| a.compose(self)).map(|p| p.is_identity()).unwrap_or(false)
    }

    /// `⟨A u, A v⟩ = -⟨u, v⟩`.
    pub fn is_anti_isometry(&self, m: &MetricSpace) -> bool {
        self.metric_adjoint(m).and_then(|a| a.compose(self)).map(|p| p.is_scalar(-1)).unwrap_or(false)
    }

    /// `self·other == -other·self`.
    pub fn anticommutes_with(&self, other: &Operator) -> bool {
        match (self.compose(other), other.compose(self)) {
            (Ok(ab), Ok(ba)) => ab == ba.neg(),
            _ => false,
        }
    }

    pub fn commutes_with(&self, other: &Operator) -> bool {
        match (self.compose(other), other.compose(self)) {
            (Ok(ab), Ok(ba)) => ab == ba,
            _ => false,
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Operator {
        if let (Some(a), Some(b)) = (&self.sparse, &other.sparse) {
            return Operator::from_perm(a.kron(b));
        }
        let (n, m) = (self.dim, other.dim);
        let (a, b) = (self.entries(), other.entries());
        let nm = n * m;
        let mut entries = vec![Scalar::zero(); nm * nm];
        for i in 0..n {
            for j in 0..n {
                let x = &a[i * n + j];
                if x.is_zero() {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        entries[(i * m + k) * nm + j * m + l] = x * &b[k * m + l];
                    }
                }
            }
        }
        Operator::from_dense(nm, entries).expect("kron shape")
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Operator) -> Operator {
        if let (Some(a), Some(b)) = (&self.sparse, &other.sparse) {
            return Operator::from_perm(a.direct_sum(b));
        }
        let (n, m) = (self.dim, other.dim);
        let t = n + m;
        let mut entries = vec![Scalar::zero(); t * t];
        for i in 0..n {
            for j in 0..n {
                entries[i * t + j] = self.entries()[i * n + j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                entries[(n + i) * t + n + j] = other.entries()[i * m + j].clone();
            }
        }
        Operator::from_dense(t, entries).expect("sum shape")
    }
}

fn dense_mul(n: usize, a: &[Scalar], b: &[Scalar]) -> Result<Vec<Scalar>, LinError> {
    let mut out = vec![Scalar::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let x = &a[i * n + k];
            if x.is_zero() {
                continue;
            }
            for j in 0..n {
                let y = &b[k * n + j];
                if y.is_zero() {
                    continue;
                }
                out[i * n + j] = out[i * n + j].checked_add(&x.checked_mul(y)?)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jy1() -> Operator {
        Operator::from_rows(&[vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap()
    }

    fn e(n: usize, i: usize) -> Vec<Scalar> {
        (0..n).map(|j| Scalar::int((i == j) as i64)).collect()
    }

    #[test]
    fn identity_applies_trivially() {
        assert_eq!(Operator::identity(4).apply(&e(4, 0)).unwrap(), e(4, 0));
    }

    #[test]
    fn jy1_maps_e1_to_e3() {
        assert_eq!(jy1().apply(&e(4, 0)).unwrap(), e(4, 2));
    }

    #[test]
    fn dense_input_is_compressed() {
        let j = jy1();
        assert!(j.sparse_form().is_some());
        assert!(j.forms_agree());
    }

    #[test]
    fn apply_dimension_mismatch() {
        assert!(matches!(jy1().apply(&e(3, 0)), Err(LinError::DimensionMismatch { .. })));
    }

    #[test]
    fn adjoint_of_rotation_is_negative() {
        let j = Operator::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let m = MetricSpace::euclidean(2);
        assert_eq!(j.metric_adjoint(&m).unwrap(), j.neg());
        assert!(j.is_skew(&m));
        assert!(j.is_anti_involution());
        assert!(Operator::identity(2).metric_adjoint(&m).unwrap().is_identity());
    }

    #[test]
    fn sparse_and_dense_adjoints_agree() {
        let j = jy1();
        let m = MetricSpace::standard(2, 2);
        let dense = Operator::from_dense(4, j.entries().to_vec().iter().map(|x| x * &Scalar::ratio(1, 1)).collect()).unwrap();
        let sparse_adj = j.metric_adjoint(&m).unwrap();
        // Force the dense branch by using a non-permutation multiple.
        let two = dense.scale(&Scalar::int(2)).unwrap();
        let dense_adj = two.metric_adjoint(&m).unwrap().scale(&Scalar::ratio(1, 2)).unwrap();
        assert_eq!(sparse_adj.entries(), dense_adj.entries());
    }
}
