//! Divisor and curve classes, the intersection pairing, cubic forms and
//! complexified Kähler points.
//!
//! `H^2(X, Z)` is assumed torsion-free and identified with `Z^r` via a fixed
//! basis; curve classes live in the dual lattice with the dual basis, so the
//! pairing is the plain dot product.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::check_rank;
use crate::linalg;
use crate::rational::{self, Rational};
use crate::{Error, Result};

macro_rules! lattice_vector {
    ($name:ident) => {
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Vec<i64>);

        impl $name {
            pub fn new(coords: Vec<i64>) -> Self {
                Self(coords)
            }

            pub fn zero(rank: usize) -> Self {
                Self(vec![0; rank])
            }

            /// The `i`-th basis vector.
            pub fn basis(rank: usize, i: usize) -> Self {
                let mut v = vec![0; rank];
                v[i] = 1;
                Self(v)
            }

            pub fn rank(&self) -> usize {
                self.0.len()
            }

            pub fn coords(&self) -> &[i64] {
                &self.0
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&x| x == 0)
            }

            pub fn is_primitive(&self) -> bool {
                linalg::is_primitive(&self.0)
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                check_rank(self.rank(), other.rank())?;
                self.0
                    .iter()
                    .zip(&other.0)
                    .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
                    .collect::<Result<_>>()
                    .map(Self)
            }

            pub fn scale(&self, k: i64) -> Result<Self> {
                self.0
                    .iter()
                    .map(|a| a.checked_mul(k).ok_or(Error::Overflow))
                    .collect::<Result<_>>()
                    .map(Self)
            }

            pub fn neg(&self) -> Self {
                Self(self.0.iter().map(|a| -a).collect())
            }

            /// `Some(k)` if `self = k * other` for an integer `k`; `other` nonzero.
            pub fn multiple_of(&self, other: &Self) -> Option<i64> {
                if self.rank() != other.rank() {
                    return None;
                }
                let (i, &g) = other.0.iter().enumerate().find(|(_, &g)| g != 0)?;
                if self.0[i] % g != 0 {
                    return None;
                }
                let k = self.0[i] / g;
                self.0
                    .iter()
                    .zip(&other.0)
                    .all(|(&a, &b)| a as i128 == k as i128 * b as i128)
                    .then_some(k)
            }
        }

        impl From<Vec<i64>> for $name {
            fn from(v: Vec<i64>) -> Self {
                Self(v)
            }
        }
    };
}

lattice_vector!(DivisorClass);
lattice_vector!(CurveClass);

/// The intersection number `D . eta`.
pub fn pair(d: &DivisorClass, eta: &CurveClass) -> Result<i64> {
    check_rank(d.rank(), eta.rank())?;
    i64::try_from(linalg::dot_i64(d.coords(), eta.coords())).map_err(|_| Error::Overflow)
}

/// Symmetric trilinear form on `Z^r`, stored by sorted index triples.
///
/// `coeff(i, j, k)` is the value on basis vectors `e^i, e^j, e^k`; zero
/// entries are never stored, so equal forms compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicForm {
    rank: usize,
    coeffs: BTreeMap<[usize; 3], i64>,
}

impl CubicForm {
    pub fn zero(rank: usize) -> Self {
        Self {
            rank,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a form from `([i, j, k], c)` entries with `i <= j <= k` (0-based).
    /// Unsorted or repeated index triples are rejected.
    pub fn from_entries(
        rank: usize,
        entries: impl IntoIterator<Item = ([usize; 3], i64)>,
    ) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (idx, c) in entries {
            let [i, j, k] = idx;
            if !(i <= j && j <= k) {
                return Err(Error::invalid(
                    "cubic",
                    format!("index triple {idx:?} is not sorted (store only i <= j <= k)"),
                ));
            }
            if k >= rank {
                return Err(Error::invalid(
                    "cubic",
                    format!("index triple {idx:?} out of range for rank {rank}"),
                ));
            }
            if coeffs.insert(idx, c).is_some() {
                return Err(Error::invalid(
                    "cubic",
                    format!("duplicate index triple {idx:?}"),
                ));
            }
        }
        coeffs.retain(|_, c| *c != 0);
        Ok(Self { rank, coeffs })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> i64 {
        let mut idx = [i, j, k];
        idx.sort_unstable();
        self.coeffs.get(&idx).copied().unwrap_or(0)
    }

    /// Nonzero entries in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = ([usize; 3], i64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, *v))
    }

    pub fn eval(&self, a: &DivisorClass, b: &DivisorClass, c: &DivisorClass) -> Result<i64> {
        check_rank(self.rank, a.rank())?;
        check_rank(self.rank, b.rank())?;
        check_rank(self.rank, c.rank())?;
        let (a, b, c) = (a.coords(), b.coords(), c.coords());
        let mut total: i128 = 0;
        for (&[i, j, k], &f) in &self.coeffs {
            // Sum over the distinct orderings of the stored triple.
            let mut perms = vec![[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]];
            perms.sort_unstable();
            perms.dedup();
            let s: i128 = perms
                .iter()
                .map(|&[p, q, r]| a[p] as i128 * b[q] as i128 * c[r] as i128)
                .sum();
            total = total
                .checked_add(s.checked_mul(f as i128).ok_or(Error::Overflow)?)
                .ok_or(Error::Overflow)?;
        }
        i64::try_from(total).map_err(|_| Error::Overflow)
    }

    /// `F + scale * (. gamma)^3`, i.e. `c_ijk + scale * g_i g_j g_k`.
    pub fn add_cube_of(&self, gamma: &CurveClass, scale: i64) -> Result<Self> {
        check_rank(self.rank, gamma.rank())?;
        let g = gamma.coords();
        let mut coeffs = self.coeffs.clone();
        for i in 0..self.rank {
            for j in i..self.rank {
                for k in j..self.rank {
                    let delta = scale
                        .checked_mul(g[i])
                        .and_then(|x| x.checked_mul(g[j]))
                        .and_then(|x| x.checked_mul(g[k]))
                        .ok_or(Error::Overflow)?;
                    if delta != 0 {
                        let e = coeffs.entry([i, j, k]).or_insert(0);
                        *e = e.checked_add(delta).ok_or(Error::Overflow)?;
                    }
                }
            }
        }
        coeffs.retain(|_, c| *c != 0);
        Ok(Self {
            rank: self.rank,
            coeffs,
        })
    }
}

/// `B + iJ` with rational B-field and Kähler parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexifiedClass {
    pub b: Vec<Rational>,
    pub j: Vec<Rational>,
}

impl ComplexifiedClass {
    pub fn new(b: Vec<Rational>, j: Vec<Rational>) -> Result<Self> {
        check_rank(b.len(), j.len())?;
        Ok(Self { b, j })
    }

    pub fn rank(&self) -> usize {
        self.b.len()
    }

    /// Shifts the B-field by an integral class.
    pub fn shift_b(&self, lambda: &DivisorClass) -> Result<Self> {
        check_rank(self.rank(), lambda.rank())?;
        let b = self
            .b
            .iter()
            .zip(lambda.coords())
            .map(|(x, &l)| x + rational::int(l))
            .collect();
        Ok(Self { b, j: self.j.clone() })
    }
}

/// A lattice basis `e^1..e^r` of divisor classes spanning a simplicial
/// framing cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramingBasis {
    basis: Vec<DivisorClass>,
    /// Inverse of the matrix whose rows are the basis vectors.
    inverse: Vec<Vec<i64>>,
}

impl FramingBasis {
    pub fn new(basis: Vec<DivisorClass>) -> Result<Self> {
        let r = basis.len();
        for e in &basis {
            check_rank(r, e.rank())?;
        }
        let m: Vec<Vec<i64>> = basis.iter().map(|e| e.coords().to_vec()).collect();
        let inverse = linalg::inverse_unimodular(&m)
            .ok_or_else(|| Error::NotUnimodular(linalg::determinant(&m).to_string()))?;
        Ok(Self { basis, inverse })
    }

    pub fn standard(rank: usize) -> Self {
        Self {
            basis: (0..rank).map(|i| DivisorClass::basis(rank, i)).collect(),
            inverse: linalg::identity(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DivisorClass] {
        &self.basis
    }

    /// Coefficients `a` with `v = sum_j a_j e^j`.
    pub fn coefficients(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        check_rank(self.rank(), v.len())?;
        // v = a E, so a = v E^{-1}.
        Ok((0..self.rank())
            .map(|j| {
                v.iter()
                    .zip(&self.inverse)
                    .map(|(x, row)| x * rational::int(row[j]))
                    .fold(Rational::zero(), |s, t| s + t)
            })
            .collect())
    }

    /// Exponents `eta^j = e^j . eta` of `q^eta` in this framing.
    pub fn curve_exponents(&self, eta: &CurveClass) -> Result<Vec<i64>> {
        self.basis.iter().map(|e| pair(e, eta)).collect()
    }
}

/// `q_j = exp(2 pi i a_j)` for the coefficients `a_j` of `z` in the framing.
pub fn q_coordinates(z: &ComplexifiedClass, framing: &FramingBasis) -> Result<Vec<Complex64>> {
    check_rank(framing.rank(), z.rank())?;
    let re = framing.coefficients(&z.b)?;
    let im = framing.coefficients(&z.j)?;
    re.iter()
        .zip(&im)
        .enumerate()
        .map(|(index, (x, y))| {
            if *y <= Rational::zero() {
                return Err(Error::OutsideFramingCone { index });
            }
            // Only the fractional part of the real coefficient matters.
            let frac = x - x.floor();
            let modulus = (-2.0 * PI * rational::to_f64(y)).exp();
            Ok(Complex64::from_polar(modulus, 2.0 * PI * rational::to_f64(&frac)))
        })
        .collect()
}
