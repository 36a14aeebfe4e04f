//! Exact linear algebra over the integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Rational, Result};

pub(crate) type BigVec = Vec<BigInt>;

pub(crate) fn to_big(v: &[i64]) -> BigVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub(crate) fn to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect()
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dot_i64(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Divides by the gcd of the entries. The zero vector is returned unchanged.
pub(crate) fn primitive(mut v: BigVec) -> BigVec {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

pub(crate) fn is_primitive(v: &[i64]) -> bool {
    v.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

/// Scales a rational vector by the lcm of its denominators and makes it primitive.
pub(crate) fn clear_denominators(v: &[Rational]) -> BigVec {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let scaled = v.iter().map(|x| (x * &l).to_integer()).collect();
    primitive(scaled)
}

/// Nonzero rows of the reduced row echelon form.
pub(crate) fn rref(rows: &[BigVec], n: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    let mut pivot_row = 0;
    for col in 0..n {
        let Some(p) = (pivot_row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != pivot_row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..n {
                    let t = &m[pivot_row][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.truncate(pivot_row);
    m
}

pub(crate) fn rank(rows: &[BigVec], n: usize) -> usize {
    rref(rows, n).len()
}

/// Canonical primitive integer basis of the row space: RREF rows cleared of
/// denominators, leading entry positive.
pub(crate) fn row_space_basis(rows: &[BigVec], n: usize) -> Vec<BigVec> {
    rref(rows, n)
        .iter()
        .map(|row| clear_denominators(row))
        .collect()
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`, scaled
/// to a primitive integer vector.
pub(crate) fn project_out(v: &BigVec, basis: &[BigVec]) -> BigVec {
    if basis.is_empty() {
        return primitive(v.clone());
    }
    let k = basis.len();
    // Solve (B B^T) c = B v, then v - B^T c.
    let gram: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| Rational::from_integer(dot(&basis[i], &basis[j])))
                .collect()
        })
        .collect();
    let rhs: Vec<Rational> = basis
        .iter()
        .map(|b| Rational::from_integer(dot(b, v)))
        .collect();
    let c = solve(gram, rhs).expect("lineality basis is independent");
    let out: Vec<Rational> = (0..v.len())
        .map(|j| {
            let mut x = Rational::from_integer(v[j].clone());
            for (ci, b) in c.iter().zip(basis) {
                x -= ci * Rational::from_integer(b[j].clone());
            }
            x
        })
        .collect();
    clear_denominators(&out)
}

/// Solves a square system by Gauss–Jordan; `None` if singular.
pub(crate) fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        b[col] *= &inv;
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..n {
                    let t = &a[col][j] * &f;
                    a[i][j] -= t;
                }
                let t = &b[col] * &f;
                b[i] -= t;
            }
        }
    }
    Some(b)
}

pub(crate) fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return BigInt::zero();
        };
        if p != col {
            a.swap(col, p);
            det = -det;
        }
        det *= &a[col][col];
        for i in col + 1..n {
            if !a[i][col].is_zero() {
                let f = &a[i][col] / &a[col][col];
                for j in col..n {
                    let t = &a[col][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
    }
    det.to_integer()
}

/// Inverse of a square integer matrix with determinant ±1.
pub(crate) fn inverse_unimodular(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    if !determinant(m).abs().is_one() {
        return None;
    }
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let a: Vec<Vec<Rational>> = m
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        cols.push(solve(a, e)?);
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| cols[j][i].to_integer().to_i64())
                .collect::<Option<Vec<i64>>>()
        })
        .collect()
}

pub(crate) fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Result<Vec<i64>> {
    m.iter()
        .map(|row| i64::try_from(dot_i64(row, v)).map_err(|_| Error::Overflow))
        .collect()
}

pub(crate) fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let s: i128 = row
                        .iter()
                        .zip(b)
                        .map(|(&x, brow)| x as i128 * brow[j] as i128)
                        .sum();
                    i64::try_from(s).map_err(|_| Error::Overflow)
                })
                .collect()
        })
        .collect()
}

pub(crate) fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}
