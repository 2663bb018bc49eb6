//! Fraction-free Gaussian elimination and rational kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{LinError, Operator, Scalar};

/// Row echelon form of an integer matrix by Bareiss elimination.
/// Returns the reduced rows and the pivot column of each nonzero row.
fn bareiss(mut rows: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..nrows {
            if rows[i][c].is_zero() {
                for j in c + 1..ncols {
                    rows[i][j] = (&rows[r][c] * &rows[i][j]) / &prev;
                }
                continue;
            }
            for j in c + 1..ncols {
                let v = &rows[r][c] * &rows[i][j] - &rows[i][c] * &rows[r][j];
                rows[i][j] = v / &prev;
            }
            rows[i][c] = BigInt::zero();
        }
        prev = rows[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Clear denominators row by row.
fn integer_rows(rows: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

pub fn rank(rows: &[Vec<BigRational>], ncols: usize) -> usize {
    bareiss(integer_rows(rows), ncols).1.len()
}

/// Basis of `{x : M x = 0}` as primitive integer vectors, one per free column,
/// normalized so the free coordinate is positive.
pub fn kernel(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigInt>> {
    let (echelon, pivots) = bareiss(integer_rows(rows), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![BigRational::zero(); ncols];
        x[f] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate().rev() {
            let mut acc = BigRational::zero();
            for j in pc + 1..ncols {
                if !echelon[r][j].is_zero() && !x[j].is_zero() {
                    acc += BigRational::from_integer(echelon[r][j].clone()) * &x[j];
                }
            }
            x[pc] = -acc / BigRational::from_integer(echelon[r][pc].clone());
        }
        basis.push(primitive(&x));
    }
    basis
}

fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let l = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = x.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}

fn rational_rows(op: &Operator, shift: i64) -> Result<Vec<Vec<BigRational>>, LinError> {
    let n = op.dim();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let x = op.entry(i, j);
            let q = x.as_rational().ok_or(LinError::IrrationalEntry)?.clone();
            row.push(if i == j { q - BigRational::from_integer(shift.into()) } else { q });
        }
        rows.push(row);
    }
    Ok(rows)
}

fn to_vectors(basis: Vec<Vec<BigInt>>) -> Vec<Vec<Scalar>> {
    basis
        .into_iter()
        .map(|v| v.into_iter().map(|x| Scalar::Rational(BigRational::from_integer(x))).collect())
        .collect()
}

/// Exact basis of the `±1` eigenspace of an involution.
pub fn eigenspace(op: &Operator, eigenvalue: i64) -> Result<Vec<Vec<Scalar>>, LinError> {
    if eigenvalue != 1 && eigenvalue != -1 {
        return Err(LinError::BadEigenvalue(eigenvalue));
    }
    if !op.is_involution() {
        return Err(LinError::NotAnInvolution);
    }
    let rows = rational_rows(op, eigenvalue)?;
    Ok(to_vectors(kernel(&rows, op.dim())))
}

/// Common eigenspace `{x : A_i x = λ_i x for all i}`.
pub fn common_eigenspace(ops: &[(Operator, i64)], dim: usize) -> Result<Vec<Vec<Scalar>>, LinError> {
    let mut rows = Vec::new();
    for (op, ev) in ops {
        if op.dim() != dim {
            return Err(LinError::DimensionMismatch { expected: dim, found: op.dim() });
        }
        if !op.is_involution() {
            return Err(LinError::NotAnInvolution);
        }
        rows.extend(rational_rows(op, *ev)?);
    }
    if rows.is_empty() {
        return Ok((0..dim).map(|i| (0..dim).map(|j| Scalar::int((i == j) as i64)).collect()).collect());
    }
    Ok(to_vectors(kernel(&rows, dim)))
}
