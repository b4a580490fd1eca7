//! Newton refinement of an eigenpair with exactly computed residuals.
//!
//! Iterates are dyadic rationals. Each step evaluates `A x - lambda x`
//! exactly, then solves the bordered system
//! `[[A' - lambda I, -x'], [e_r^T, 0]]` in `f64` for the correction, in the
//! same diagonal scaling as the float stage. Because the residual is exact,
//! every step gains roughly the `f64` precision until the target is met.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::float::{dense_solve, ldexp, FloatMatrix};
use super::IntRows;
use crate::linalg::Rational;

/// `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub mant: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    /// Exact conversion; `x` must be finite.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite value {x}");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Dyadic { mant: BigInt::from(mant) * sign, exp }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            return Self::zero();
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn shifted(&self, by: i64) -> Self {
        Dyadic { mant: self.mant.clone(), exp: self.exp + by }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.mant.is_zero() {
            return other.clone();
        }
        if other.mant.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Dyadic { mant: a + b, exp: e }.normalized()
    }

    /// Keeps the `bits` most significant bits, truncating toward zero.
    pub fn truncated(&self, bits: u64) -> Self {
        let len = self.mant.bits();
        if len <= bits {
            return self.clone();
        }
        let drop = len - bits;
        let mant = if self.mant.is_negative() {
            -BigInt::from(self.mant.magnitude() >> drop as usize)
        } else {
            BigInt::from(self.mant.magnitude() >> drop as usize)
        };
        Dyadic { mant, exp: self.exp + drop as i64 }.normalized()
    }

    /// Exponent `t` with `2^(t-1) <= |self| < 2^t`.
    pub fn magnitude_exp(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    pub fn is_positive(&self) -> bool {
        self.mant.sign() == Sign::Plus
    }

    pub fn to_f64(&self) -> f64 {
        bigint_ldexp(&self.mant, self.exp)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as usize)
        } else {
            Rational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }
}

/// `n * 2^exp` rounded (by truncation) to `f64`.
pub(crate) fn bigint_ldexp(n: &BigInt, exp: i64) -> f64 {
    let len = n.bits();
    let (top, shift) = if len > 64 {
        let drop = len - 64;
        ((n.magnitude() >> drop as usize), drop as i64)
    } else {
        (n.magnitude().clone(), 0)
    };
    let top = top.iter_u64_digits().next().unwrap_or(0) as f64;
    let v = ldexp(top, exp + shift);
    if n.is_negative() {
        -v
    } else {
        v
    }
}

/// Exact `A x - lambda x`, returned as integers `n_i` with
/// `r_i = n_i * 2^common / den_i`.
fn residual(a: &IntRows, x: &[Dyadic], lambda: &Dyadic) -> (Vec<BigInt>, i64) {
    let min_exp = x.iter().map(|d| d.exp).min().unwrap_or(0);
    let common = min_exp + lambda.exp.min(0);
    let aligned: Vec<BigInt> = x
        .par_iter()
        .map(|d| &d.mant << (d.exp - common) as usize)
        .collect();
    let n = a
        .rows
        .par_iter()
        .zip(a.den.par_iter())
        .enumerate()
        .map(|(i, (row, den))| {
            let mut acc = BigInt::zero();
            for (j, v) in row {
                acc += v * &aligned[*j];
            }
            let shift = (lambda.exp + x[i].exp - common) as usize;
            acc - ((den * &lambda.mant * &x[i].mant) << shift)
        })
        .collect();
    (n, common)
}

pub(crate) struct Refined {
    pub lambda: Dyadic,
    pub x: Vec<Dyadic>,
    pub steps: usize,
    pub converged: bool,
}

/// Refines `(lambda, x)` until the relative eigenvalue correction drops
/// below `2^-bits` or `max_steps` is reached.
pub(crate) fn newton(
    a: &IntRows,
    af: &FloatMatrix,
    lambda0: f64,
    x0: &[Dyadic],
    bits: u64,
    max_steps: usize,
) -> Refined {
    let m = af.dim;
    let keep = bits + 64;
    let mut lambda = Dyadic::from_f64(lambda0);
    let mut x: Vec<Dyadic> = x0.to_vec();
    let r = (0..m)
        .max_by_key(|&i| x[i].magnitude_exp())
        .unwrap_or(0);
    let tol = ldexp(1.0, -(bits.min(1000) as i64));
    for step in 1..=max_steps {
        let e: Vec<i64> = x.iter().map(Dyadic::magnitude_exp).collect();
        let (n, common) = residual(a, &x, &lambda);
        if n.iter().all(Zero::is_zero) {
            return Refined { lambda, x, steps: step, converged: true };
        }
        let mut rhs: Vec<f64> = n
            .par_iter()
            .enumerate()
            .map(|(i, ni)| -bigint_ldexp(ni, common - e[i]) / a.den_f64[i])
            .collect();
        rhs.push(0.0);
        let scaled = af.scaled(&e);
        let lf = lambda.to_f64();
        let dim = m + 1;
        let mut j = vec![0.0; dim * dim];
        for i in 0..m {
            j[i * dim..i * dim + m].copy_from_slice(&scaled[i * m..(i + 1) * m]);
            j[i * dim + i] -= lf;
            j[i * dim + m] = -ldexp(x[i].to_f64(), -e[i]);
        }
        j[m * dim + r] = 1.0;
        if !dense_solve(j, dim, &mut rhs) {
            return Refined { lambda, x, steps: step, converged: false };
        }
        let dl = rhs[m];
        for (i, xi) in x.iter_mut().enumerate() {
            if rhs[i] != 0.0 {
                *xi = xi.add(&Dyadic::from_f64(rhs[i]).shifted(e[i])).truncated(keep);
            }
        }
        lambda = lambda.add(&Dyadic::from_f64(dl)).truncated(keep);
        if dl.abs() <= tol * lf.abs() {
            return Refined { lambda, x, steps: step, converged: true };
        }
    }
    Refined { lambda, x, steps: max_steps, converged: false }
}
