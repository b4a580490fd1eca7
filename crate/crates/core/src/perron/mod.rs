//! Certified lower bounds on the Perron root of nonnegative matrices.
//!
//! A float stage brackets the root and produces an approximate Perron vector,
//! an exact-residual Newton stage sharpens both, and the Collatz–Wielandt
//! quotient `min_i (A x)_i / x_i` of the resulting positive dyadic vector is
//! evaluated exactly. Any positive witness gives a valid bound, so numerical
//! error can only weaken the bound, never invalidate it.

mod float;
mod refine;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use refine::Dyadic;

use crate::decimal::{rational_string, FloorDecimal};
use crate::error::{Error, Result};
use crate::linalg::{ExactMatrix, Rational};
use crate::production::is_primitive;
use float::FloatMatrix;

/// Rows scaled to integers: row `i` of the matrix is `rows[i] / den[i]`;
/// zero entries are omitted.
pub(crate) struct IntRows {
    pub rows: Vec<Vec<(usize, BigInt)>>,
    pub den: Vec<BigInt>,
    pub den_f64: Vec<f64>,
}

impl IntRows {
    pub fn new(a: &ExactMatrix) -> Self {
        let (rows, den): (Vec<_>, Vec<_>) = (0..a.dim())
            .into_par_iter()
            .map(|i| {
                let row = a.row(i);
                let den = row
                    .iter()
                    .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                let ints = row
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.numer() * (&den / v.denom())))
                    .collect::<Vec<_>>();
                (ints, den)
            })
            .unzip();
        let den_f64 = den.iter().map(|d| d.to_f64().unwrap_or(f64::INFINITY)).collect();
        IntRows { rows, den, den_f64 }
    }
}

fn float_matrix(a: &ExactMatrix) -> FloatMatrix {
    let m = a.dim();
    let data = (0..m * m)
        .into_par_iter()
        .map(|n| a.get(n / m, n % m).to_f64().unwrap_or(0.0))
        .collect();
    FloatMatrix {
        dim: m,
        data,
        lower_bandwidth: a.lower_bandwidth(),
    }
}

fn check_nonnegative(a: &ExactMatrix) -> Result<()> {
    match a.first_negative() {
        Some((row, col)) => Err(Error::NegativeEntry { row, col }),
        None => Ok(()),
    }
}

/// Output of [`power_iteration`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerIterate {
    /// Dyadic approximation of the Perron root.
    pub estimate: Rational,
    /// Positive dyadic approximation of the Perron vector, largest entry near 1 in scale.
    pub vector: Vec<Rational>,
    pub iterations: usize,
    pub converged: bool,
}

/// Approximates the Perron root and vector of a nonnegative primitive matrix.
///
/// The float stage is shifted inverse iteration driven by bisection on the
/// shift (the sign of `(sigma I - A)^-1 1` decides on which side of the root
/// `sigma` lies), run in a diagonal exponent scaling so that Perron vectors
/// spanning thousands of binary orders of magnitude stay representable. The
/// result is then Newton-refined with exact residuals until the eigenvalue
/// correction is below `2^-precision_bits` relative. `max_iter` caps the
/// total number of solves; on exhaustion the best iterate is returned with
/// `converged = false`.
pub fn power_iteration(a: &ExactMatrix, precision_bits: u64, max_iter: usize) -> Result<PowerIterate> {
    check_nonnegative(a)?;
    let af = float_matrix(a);
    let fp = float::float_perron(&af, max_iter);
    if fp.hi <= 0.0 {
        return Err(Error::Numerical("spectral radius is zero".into()));
    }
    let x0: Vec<Dyadic> = fp
        .x
        .iter()
        .zip(&fp.exponents)
        .map(|(&v, &e)| Dyadic::from_f64(v).shifted(e))
        .collect();
    if x0.iter().any(|d| !d.is_positive()) {
        return Err(Error::Numerical("float stage produced a non-positive vector".into()));
    }
    let rows = IntRows::new(a);
    let lambda0 = 0.5 * (fp.lo + fp.hi);
    let budget = max_iter.saturating_sub(fp.steps).max(1);
    let refined = refine::newton(&rows, &af, lambda0, &x0, precision_bits, budget);
    let (lambda, x) = if refined.x.iter().all(Dyadic::is_positive) {
        (refined.lambda, refined.x)
    } else {
        (Dyadic::from_f64(lambda0), x0)
    };
    Ok(PowerIterate {
        estimate: lambda.to_rational(),
        vector: x.iter().map(Dyadic::to_rational).collect(),
        iterations: fp.steps + refined.steps,
        converged: refined.converged,
    })
}

/// Collatz–Wielandt quotients `(A x)_i / x_i` as fractions `num_i / den_i`
/// with positive denominators.
fn quotients(a: &ExactMatrix, x: &[Rational]) -> Result<Vec<(BigInt, BigInt)>> {
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: x.len(),
        });
    }
    check_nonnegative(a)?;
    if let Some(i) = x.iter().position(|v| !v.is_positive()) {
        return Err(Error::NonPositiveWitness(i));
    }
    let common = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = x
        .par_iter()
        .map(|v| v.numer() * (&common / v.denom()))
        .collect();
    let rows = IntRows::new(a);
    Ok(rows
        .rows
        .par_iter()
        .zip(rows.den.par_iter())
        .enumerate()
        .map(|(i, (row, den))| {
            let num = row
                .iter()
                .fold(BigInt::zero(), |acc, (j, v)| acc + v * &ints[*j]);
            (num, den * &ints[i])
        })
        .collect())
}

fn compare(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> Ordering {
    (&a.0 * &b.1).cmp(&(&b.0 * &a.1))
}

/// Exact `min_i (A x)_i / x_i`; a lower bound on the spectral radius of any
/// nonnegative `A` for any strictly positive `x`.
pub fn certify_lower_bound(a: &ExactMatrix, x: &[Rational]) -> Result<Rational> {
    let q = quotients(a, x)?;
    let best = q.into_iter().min_by(compare).expect("nonempty");
    Ok(Rational::new(best.0, best.1))
}

/// Exact `max_i (A x)_i / x_i`, an upper bound on the spectral radius.
pub fn certify_upper_bound(a: &ExactMatrix, x: &[Rational]) -> Result<Rational> {
    let q = quotients(a, x)?;
    let best = q.into_iter().max_by(compare).expect("nonempty");
    Ok(Rational::new(best.0, best.1))
}

/// Largest column sum, a crude upper bound on the spectral radius.
pub fn max_column_sum(a: &ExactMatrix) -> Rational {
    (0..a.dim())
        .map(|j| (0..a.dim()).map(|i| a.get(i, j).abs()).sum::<Rational>())
        .max()
        .expect("nonempty")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerronCertificate {
    pub dim: usize,
    pub lower_bound: Rational,
    /// Collatz–Wielandt maximum of the same witness.
    pub upper_bound: Rational,
    pub witness: Vec<Rational>,
    pub float_estimate: Rational,
    pub iterations: usize,
    pub precision_bits: u64,
}

pub const DEFAULT_MAX_ITER: usize = 1000;

/// Bits of working precision for a target number of decimal digits.
pub fn bits_for_digits(digits: u32) -> u64 {
    ((digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 32).max(128)
}

/// Certified lower bound on the Perron root of a nonnegative primitive matrix.
/// Doubles the working precision (at most twice) while the certified bound
/// trails the estimate by more than `2^-(bits/2)` relative.
pub fn perron_lower(a: &ExactMatrix, precision_bits: u64) -> Result<PerronCertificate> {
    check_nonnegative(a)?;
    if !is_primitive(a)?.primitive {
        return Err(Error::NotPrimitive);
    }
    let mut bits = precision_bits.max(64);
    let mut iterations = 0;
    let mut best: Option<PerronCertificate> = None;
    for _ in 0..3 {
        let it = power_iteration(a, bits, DEFAULT_MAX_ITER)?;
        iterations += it.iterations;
        let lower = certify_lower_bound(a, &it.vector)?;
        let upper = certify_upper_bound(a, &it.vector)?;
        let gap = &it.estimate - &lower;
        let slack = &it.estimate * Rational::new(BigInt::one(), BigInt::one() << (bits / 2) as usize);
        let done = gap <= slack;
        let better = best.as_ref().is_none_or(|b| lower > b.lower_bound);
        if better {
            best = Some(PerronCertificate {
                dim: a.dim(),
                lower_bound: lower,
                upper_bound: upper,
                witness: it.vector,
                float_estimate: it.estimate,
                iterations,
                precision_bits: bits,
            });
        }
        if done {
            break;
        }
        bits *= 2;
    }
    let mut cert = best.expect("at least one attempt");
    cert.iterations = iterations;
    Ok(cert)
}

impl PerronCertificate {
    /// Recomputes the bound from the witness.
    pub fn recheck(&self, a: &ExactMatrix) -> Result<bool> {
        Ok(certify_lower_bound(a, &self.witness)? == self.lower_bound)
    }

    pub fn witness_digest(&self) -> String {
        let mut h = Sha256::new();
        for v in &self.witness {
            h.update(rational_string(v).as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    pub fn summary(&self, digits: u32) -> CertificateJson {
        CertificateJson {
            dim: self.dim,
            lower_bound: rational_string(&self.lower_bound),
            lower_bound_decimal: FloorDecimal::floor_of(&self.lower_bound, digits).to_string(),
            upper_bound_decimal: crate::decimal::ceil_string(&self.upper_bound, digits),
            float_estimate: FloorDecimal::floor_of(&self.float_estimate, digits).to_string(),
            iterations: self.iterations,
            precision_bits: self.precision_bits,
            witness_sha256: self.witness_digest(),
        }
    }
}

/// Serialized form of a certificate; the witness itself is represented by its digest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateJson {
    pub dim: usize,
    pub lower_bound: String,
    pub lower_bound_decimal: String,
    pub upper_bound_decimal: String,
    pub float_estimate: String,
    pub iterations: usize,
    pub precision_bits: u64,
    pub witness_sha256: String,
}
