//! Dense exact rational matrices and nonnegative integer vectors.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimal::{parse_rational, rational_string};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Square matrix of exact rationals, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    dim: usize,
    entries: Vec<Rational>,
}

impl ExactMatrix {
    /// # Panics
    /// If `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ExactMatrix {
            dim,
            entries: vec![Rational::zero(); dim * dim],
        }
    }

    /// # Panics
    /// If `dim == 0`.
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    /// # Panics
    /// If `dim == 0`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let entries = (0..dim * dim).map(|n| f(n / dim, n % dim)).collect();
        ExactMatrix { dim, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(ExactMatrix { dim, entries })
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    /// Builds from columns given as integer vectors.
    pub(crate) fn from_integer_columns(cols: Vec<Vec<BigInt>>) -> Self {
        let dim = cols.len();
        assert!(dim > 0);
        let mut entries = vec![Rational::zero(); dim * dim];
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                if !v.is_zero() {
                    entries[i * dim + j] = Rational::from_integer(v);
                }
            }
        }
        ExactMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.dim)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(ExactMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(ExactMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ExactMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let m = self.dim;
        let rows: Vec<Vec<Rational>> = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut out = vec![Rational::zero(); m];
                for (k, a) in self.row(i).iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (o, b) in out.iter_mut().zip(other.row(k)) {
                        if !b.is_zero() {
                            *o += a * b;
                        }
                    }
                }
                out
            })
            .collect();
        Ok(ExactMatrix {
            dim: m,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Repeated squaring; `a^0` is the identity.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first {
                    base.clone()
                } else {
                    result.mul(&base).expect("same dimension")
                };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same dimension");
            }
        }
        result
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).clone())
    }

    /// Inverse by back-substitution, checked against `a * a^-1 = I`.
    pub fn upper_tri_inverse(&self) -> Result<Self> {
        if !self.is_upper_triangular_with_nonzero_diagonal() {
            return Err(Error::NotInvertibleTriangular);
        }
        let m = self.dim;
        // column j of the inverse solves a x = e_j; it vanishes below j
        let cols: Vec<Vec<Rational>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut x = vec![Rational::zero(); m];
                for i in (0..=j).rev() {
                    let mut acc = if i == j { Rational::one() } else { Rational::zero() };
                    for (l, xl) in x.iter().enumerate().take(j + 1).skip(i + 1) {
                        let a = self.get(i, l);
                        if !a.is_zero() && !xl.is_zero() {
                            acc -= a * xl;
                        }
                    }
                    x[i] = acc / self.get(i, i);
                }
                x
            })
            .collect();
        let inv = Self::from_fn(m, |i, j| cols[j][i].clone());
        if self.mul(&inv)? != Self::identity(m) {
            return Err(Error::Numerical("triangular inverse failed verification".into()));
        }
        Ok(inv)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        Ok(self
            .rows()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|row| {
                let mut acc = Rational::zero();
                for (a, x) in row.iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect())
    }

    /// Applies the matrix to a degree vector; a negative or fractional
    /// result means the matrix is not a valid production step for `v`.
    pub fn apply(&self, v: &DegreeVector) -> Result<DegreeVector> {
        let out = self.mul_vec(&v.to_rationals())?;
        DegreeVector::from_rationals(&out)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|a| !a.is_negative())
    }

    pub fn is_integer(&self) -> bool {
        self.entries.iter().all(|a| a.is_integer())
    }

    pub fn is_upper_triangular_with_nonzero_diagonal(&self) -> bool {
        (0..self.dim).all(|i| {
            !self.get(i, i).is_zero() && self.row(i)[..i].iter().all(|a| a.is_zero())
        })
    }

    pub fn first_negative(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|a| a.is_negative())
            .map(|n| (n / self.dim, n % self.dim))
    }

    /// Largest `i - j` over nonzero entries.
    pub fn lower_bandwidth(&self) -> usize {
        let mut b = 0;
        for i in 0..self.dim {
            for j in 0..i {
                if !self.get(i, j).is_zero() {
                    b = b.max(i - j);
                    break;
                }
            }
        }
        b
    }

    pub fn leading_block(&self, s: usize) -> Self {
        assert!(s > 0 && s <= self.dim);
        Self::from_fn(s, |i, j| self.get(i, j).clone())
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            dim: self.dim,
            entries: self
                .rows()
                .map(|r| r.iter().map(rational_string).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        if json.entries.len() != json.dim {
            return Err(Error::DimensionMismatch {
                left: json.dim,
                right: json.entries.len(),
            });
        }
        Self::from_rows(
            json.entries
                .iter()
                .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("plain strings serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: MatrixJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&json)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<String>>,
}

pub fn mat_add(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
    a.add(b)
}

pub fn mat_mul(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
    a.mul(b)
}

pub fn mat_pow(a: &ExactMatrix, e: u64) -> ExactMatrix {
    a.pow(e)
}

pub fn upper_tri_inverse(a: &ExactMatrix) -> Result<ExactMatrix> {
    a.upper_tri_inverse()
}

pub fn mat_vec(a: &ExactMatrix, v: &DegreeVector) -> Result<DegreeVector> {
    a.apply(v)
}

/// Nonnegative integer vector; entry `j` counts graphs whose root has degree `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeVector {
    entries: Vec<BigUint>,
}

impl DegreeVector {
    pub fn new(entries: Vec<BigUint>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty degree vector".into()));
        }
        Ok(DegreeVector { entries })
    }

    pub fn from_u64s(entries: &[u64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| BigUint::from(x)).collect())
    }

    pub fn unit(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!("index {index} out of range {dim}")));
        }
        let mut v = vec![BigUint::zero(); dim];
        v[index] = BigUint::one();
        Self::new(v)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![BigUint::zero(); dim])
    }

    pub fn from_rationals(values: &[Rational]) -> Result<Self> {
        let entries = values
            .iter()
            .enumerate()
            .map(|(i, r)| {
                if !r.is_integer() || r.is_negative() {
                    return Err(Error::NonIntegralCount {
                        index: i,
                        value: r.to_string(),
                    });
                }
                Ok(r.to_integer().to_biguint().expect("nonnegative"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub(crate) fn from_bigints(values: Vec<BigInt>) -> Result<Self> {
        let entries = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| match v.sign() {
                Sign::Minus => Err(Error::NonIntegralCount {
                    index: i,
                    value: v.to_string(),
                }),
                _ => Ok(v.magnitude().clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn sum(&self) -> BigUint {
        self.entries.iter().sum()
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.entries
            .iter()
            .map(|x| Rational::from_integer(BigInt::from(x.clone())))
            .collect()
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        self.entries.iter().map(|x| BigInt::from(x.clone())).collect()
    }

    /// Zero-extends or truncates to `dim`; truncation fails if it would drop a nonzero entry.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() && self.entries[dim..].iter().any(|x| !x.is_zero()) {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate degree vector to {dim} without losing entries"
            )));
        }
        let mut e = self.entries.clone();
        e.resize(dim, BigUint::zero());
        Self::new(e)
    }

    /// Entries with trailing zeros removed.
    pub fn trimmed(&self) -> &[BigUint] {
        let end = self
            .entries
            .iter()
            .rposition(|x| !x.is_zero())
            .map_or(0, |p| p + 1);
        &self.entries[..end]
    }
}
