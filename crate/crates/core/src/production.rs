//! Production matrices for convex position and for chains of pockets.
//!
//! Indices are 0-based: row `j` of a degree vector counts graphs whose root
//! vertex has degree `j`. All builders assemble columns by applying the
//! structured operators `R`, `R^-1` and `S` to unit vectors, which is exact and
//! costs O(k^2 m) per column.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{rat, DegreeVector, ExactMatrix, Rational};

/// `R v`: entry 0 is the total, entry `i > 0` is twice the tail sum from `i`.
pub fn apply_r<T>(v: &[T]) -> Vec<T>
where
    T: Clone + Zero + for<'a> std::ops::Add<&'a T, Output = T>,
    for<'a> &'a T: std::ops::Add<&'a T, Output = T>,
{
    let m = v.len();
    let mut out = vec![T::zero(); m];
    let mut tail = T::zero();
    for i in (0..m).rev() {
        tail = tail + &v[i];
        out[i] = if i == 0 { tail.clone() } else { &tail + &tail };
    }
    out
}

/// `R^-1 v`.
pub fn apply_r_inv(v: &[Rational]) -> Vec<Rational> {
    let m = v.len();
    let half = Rational::new(1.into(), 2.into());
    (0..m)
        .map(|i| {
            let next = v.get(i + 1).cloned().unwrap_or_else(Rational::zero);
            if i == 0 {
                &v[0] - &next * &half
            } else {
                (&v[i] - &next) * &half
            }
        })
        .collect()
}

/// `S^l v`: shift down by `l`, dropping what falls off the end.
pub fn apply_shift<T: Clone + Zero>(v: &[T], l: usize) -> Vec<T> {
    let m = v.len();
    (0..m)
        .map(|i| if i >= l { v[i - l].clone() } else { T::zero() })
        .collect()
}

fn add_scaled_shift(acc: &mut [BigInt], w: &[BigInt], l: usize, c: &BigInt) {
    for i in l..acc.len() {
        if !w[i - l].is_zero() {
            acc[i] += c * &w[i - l];
        }
    }
}

/// `P'_k v` without forming the matrix.
pub fn apply_pprime(k: usize, v: &[BigInt]) -> Vec<BigInt> {
    let mut powers = Vec::with_capacity(k + 2);
    powers.push(v.to_vec());
    for t in 0..=k {
        let next = apply_r(&powers[t]);
        powers.push(next);
    }
    let mut out = powers[k + 1].clone();
    for mu in 1..=k + 1 {
        for l in 1..=mu {
            let c = BigInt::from(binomial(mu as u64 - 1, l as u64 - 1));
            add_scaled_shift(&mut out, &powers[k + 1 - mu], l, &c);
        }
    }
    out
}

/// `L_k v`, the leading-vertex step that follows a pocket with `k` inner points.
pub fn apply_leading(k: usize, v: &[Rational]) -> Vec<Rational> {
    let mut inv_powers = Vec::with_capacity(k + 1);
    inv_powers.push(v.to_vec());
    for t in 0..k {
        let next = apply_r_inv(&inv_powers[t]);
        inv_powers.push(next);
    }
    let mut out = apply_r(v);
    for mu in 1..=k + 1 {
        for l in 1..=mu {
            let c = rat(binomial(mu as i64 - 1, l as i64 - 1));
            let shifted = apply_shift(&inv_powers[mu - 1], l);
            for (o, s) in out.iter_mut().zip(&shifted) {
                if !s.is_zero() {
                    *o += &c * s;
                }
            }
        }
    }
    out
}

fn check_dim(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("matrix dimension must be at least 1".into()));
    }
    Ok(())
}

fn check_pocket(k: usize, m: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("pocket size k must be at least 1".into()));
    }
    if m < k + 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension {m} too small for k = {k} (need at least {})",
            k + 2
        )));
    }
    Ok(())
}

fn unit_rational(m: usize, j: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); m];
    e[j] = Rational::one();
    e
}

fn unit_int(m: usize, j: usize) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); m];
    e[j] = BigInt::one();
    e
}

fn from_rational_columns(m: usize, f: impl Fn(usize) -> Vec<Rational> + Sync + Send) -> ExactMatrix {
    let cols: Vec<Vec<Rational>> = (0..m).into_par_iter().map(f).collect();
    ExactMatrix::from_fn(m, |i, j| cols[j][i].clone())
}

pub fn build_r(m: usize) -> Result<ExactMatrix> {
    check_dim(m)?;
    Ok(ExactMatrix::from_fn(m, |i, j| {
        if i == 0 {
            rat(1)
        } else if j >= i {
            rat(2)
        } else {
            rat(0)
        }
    }))
}

pub fn build_s(m: usize) -> Result<ExactMatrix> {
    check_dim(m)?;
    Ok(ExactMatrix::from_fn(m, |i, j| rat((i == j + 1) as i64)))
}

/// `C = R + S`.
pub fn build_convex_c(m: usize) -> Result<ExactMatrix> {
    build_r(m)?.add(&build_s(m)?)
}

pub fn build_leading_l(k: usize, m: usize) -> Result<ExactMatrix> {
    check_pocket(k, m)?;
    Ok(from_rational_columns(m, |j| apply_leading(k, &unit_rational(m, j))))
}

/// `P = R^k L`; may have fractional entries.
pub fn build_pocket_p(k: usize, m: usize) -> Result<ExactMatrix> {
    check_pocket(k, m)?;
    Ok(from_rational_columns(m, |j| {
        let mut col = apply_leading(k, &unit_rational(m, j));
        for _ in 0..k {
            col = apply_r(&col);
        }
        col
    }))
}

/// `P' = L R^k`, a nonnegative integer matrix with lower bandwidth `k + 1`.
pub fn build_pprime(k: usize, m: usize) -> Result<ExactMatrix> {
    check_pocket(k, m)?;
    let cols: Vec<Vec<BigInt>> = (0..m)
        .into_par_iter()
        .map(|j| apply_pprime(k, &unit_int(m, j)))
        .collect();
    let p = ExactMatrix::from_integer_columns(cols);
    if let Some((row, col)) = p.first_negative() {
        return Err(Error::NegativeEntry { row, col });
    }
    Ok(p)
}

/// Ordered product `P'_{k_last} ... P'_{k_first}`; the first pocket acts first.
pub fn mixed_pocket_product(ks: &[usize], m: usize) -> Result<ExactMatrix> {
    if ks.is_empty() {
        return Err(Error::InvalidArgument("empty pocket sequence".into()));
    }
    for &k in ks {
        check_pocket(k, m)?;
    }
    let cols: Vec<Vec<BigInt>> = (0..m)
        .into_par_iter()
        .map(|j| {
            ks.iter()
                .fold(unit_int(m, j), |col, &k| apply_pprime(k, &col))
        })
        .collect();
    Ok(ExactMatrix::from_integer_columns(cols))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PocketMatrixSet {
    pub k: usize,
    pub r: ExactMatrix,
    pub s: ExactMatrix,
    pub l: ExactMatrix,
    pub p: ExactMatrix,
    pub pprime: ExactMatrix,
}

impl PocketMatrixSet {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        Ok(PocketMatrixSet {
            k,
            r: build_r(m)?,
            s: build_s(m)?,
            l: build_leading_l(k, m)?,
            p: build_pocket_p(k, m)?,
            pprime: build_pprime(k, m)?,
        })
    }
}

/// The vector `(1, 0, ..., 0)` at the last vertex of the first pocket.
pub fn start_vector(m: usize) -> Result<DegreeVector> {
    DegreeVector::unit(m, 0)
}

/// One chain of `z` points made of pockets with `k` inner points, counted
/// with degree vectors of dimension `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub k: usize,
    pub z: usize,
    pub m: usize,
}

impl ChainSpec {
    pub fn new(k: usize, z: usize, m: usize) -> Result<Self> {
        check_pocket(k, m)?;
        if z < k + 2 || !(z - 1).is_multiple_of(k + 1) {
            return Err(Error::InvalidArgument(format!(
                "chain length z = {z} must be at least {} and congruent to 1 mod {}",
                k + 2,
                k + 1
            )));
        }
        Ok(ChainSpec { k, z, m })
    }

    pub fn pockets(&self) -> usize {
        (self.z - 1) / (self.k + 1)
    }

    pub fn total_points(&self) -> usize {
        2 * self.z
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterCount {
    pub vector: DegreeVector,
    /// Set when `m < z`: entries for root degrees beyond `m - 1` were dropped and
    /// the vector is a lower bound on the true counts.
    pub truncated: bool,
}

/// Degree vector of outer-part graphs at the last vertex of the chain.
pub fn outer_degree_vector(spec: &ChainSpec) -> Result<OuterCount> {
    let pockets = vec![spec.k; spec.pockets()];
    chain_degree_vector(&pockets, spec.m)
}

/// Like [`outer_degree_vector`] for a chain whose pockets have the given sizes.
pub fn chain_degree_vector(pockets: &[usize], m: usize) -> Result<OuterCount> {
    if pockets.is_empty() {
        return Err(Error::InvalidArgument("empty pocket sequence".into()));
    }
    for &k in pockets {
        check_pocket(k, m)?;
    }
    let z = 1 + pockets.iter().map(|k| k + 1).sum::<usize>();
    let truncated = m < z;
    let c = pockets.len();
    if c == 1 {
        return Ok(OuterCount {
            vector: start_vector(m)?,
            truncated,
        });
    }
    let lead = apply_leading(pockets[0], &unit_rational(m, 0));
    let mut v = DegreeVector::from_rationals(&lead)?.to_bigints();
    for &k in &pockets[1..c - 1] {
        v = apply_pprime(k, &v);
    }
    for _ in 0..pockets[c - 1] {
        v = apply_r(&v);
    }
    Ok(OuterCount {
        vector: DegreeVector::from_bigints(v)?,
        truncated,
    })
}

/// `C^(n-2) e_0` in dimension `max(m, n)`: degree partition at the last of `n`
/// convex points of the graphs without edges between consecutive points.
pub fn convex_degree_vector(n: usize, m: usize) -> Result<DegreeVector> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 points, got {n}")));
    }
    let dim = m.max(n);
    let mut v = unit_int(dim, 0);
    for _ in 0..n - 2 {
        let r = apply_r(&v);
        let s = apply_shift(&v, 1);
        v = r.into_iter().zip(s).map(|(a, b)| a + b).collect();
    }
    DegreeVector::from_bigints(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Primitivity {
    pub primitive: bool,
    /// Smallest `N` with every entry of `a^N` positive.
    pub exponent: Option<u64>,
}

type BitRows = Vec<Vec<u64>>;

fn bool_mul(x: &BitRows, y: &BitRows) -> BitRows {
    let words = y[0].len();
    x.par_iter()
        .map(|row| {
            let mut out = vec![0u64; words];
            for (w, &bits) in row.iter().enumerate() {
                let mut b = bits;
                while b != 0 {
                    let k = w * 64 + b.trailing_zeros() as usize;
                    b &= b - 1;
                    for (o, yv) in out.iter_mut().zip(&y[k]) {
                        *o |= yv;
                    }
                }
            }
            out
        })
        .collect()
}

fn all_positive(x: &BitRows, m: usize) -> bool {
    let full = m / 64;
    let rem = m % 64;
    x.iter().all(|row| {
        row[..full].iter().all(|&w| w == u64::MAX)
            && (rem == 0 || row[full] == (1u64 << rem) - 1)
    })
}

/// Decides primitivity on the sign pattern. Searches exponents up to
/// `max((m-1) m, (m-1)^2 + 1)`, which covers Wielandt's bound.
pub fn is_primitive(a: &ExactMatrix) -> Result<Primitivity> {
    if let Some((row, col)) = a.first_negative() {
        return Err(Error::NegativeEntry { row, col });
    }
    let m = a.dim();
    let not = Primitivity {
        primitive: false,
        exponent: None,
    };
    let words = m.div_ceil(64);
    let pattern: BitRows = (0..m)
        .map(|i| {
            let mut row = vec![0u64; words];
            for (j, v) in a.row(i).iter().enumerate() {
                if !v.is_zero() {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    // a zero row or column persists in every power
    if pattern.iter().any(|r| r.iter().all(|&w| w == 0)) {
        return Ok(not);
    }
    let mut col_seen = vec![0u64; words];
    for r in &pattern {
        for (c, w) in col_seen.iter_mut().zip(r) {
            *c |= w;
        }
    }
    if !all_positive(&[col_seen].to_vec(), m) {
        return Ok(not);
    }
    let limit = ((m as u64 - 1) * m as u64).max((m as u64 - 1).pow(2) + 1);
    // Without zero rows, positivity of a^N implies positivity of a^(N+1),
    // so the smallest exponent can be found by binary lifting.
    let mut squares = vec![pattern.clone()];
    while !all_positive(squares.last().unwrap(), m) {
        if (1u64 << (squares.len() - 1)) > limit {
            return Ok(not);
        }
        let last = squares.last().unwrap();
        squares.push(bool_mul(last, last));
    }
    let mut acc: Option<BitRows> = None;
    let mut n = 0u64;
    for i in (0..squares.len()).rev() {
        let candidate = match &acc {
            None => squares[i].clone(),
            Some(x) => bool_mul(x, &squares[i]),
        };
        if !all_positive(&candidate, m) {
            acc = Some(candidate);
            n += 1 << i;
        }
    }
    let exponent = n + 1;
    if exponent > limit {
        return Ok(not);
    }
    Ok(Primitivity {
        primitive: true,
        exponent: Some(exponent),
    })
}
