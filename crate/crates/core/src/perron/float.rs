//! Floating-point Perron root bracketing for nonnegative matrices whose Perron
//! vector spans far more than the `f64` exponent range.
//!
//! The matrix is used in the diagonally rescaled form `A' = D^-1 A D` with
//! `D = diag(2^e_i)`. For `sigma > rho(A)` the solution of
//! `(sigma I - A') y = 1` is strictly positive, and for `sigma < rho(A)` it is
//! not, so bisection on `sigma` brackets `rho`. Each positive solve is a step
//! of shifted inverse iteration, and its exponents are folded back into `e`.

use rayon::prelude::*;

/// `2^n` with underflow to zero and overflow to infinity.
pub(crate) fn pow2(n: i64) -> f64 {
    if n > 1023 {
        f64::INFINITY
    } else if n >= -1022 {
        f64::from_bits(((n + 1023) as u64) << 52)
    } else if n >= -1074 {
        f64::from_bits(1u64 << (n + 1074))
    } else {
        0.0
    }
}

/// `x * 2^n` without spurious intermediate overflow.
pub(crate) fn ldexp(mut x: f64, mut n: i64) -> f64 {
    while n > 1000 {
        x *= pow2(1000);
        n -= 1000;
    }
    while n < -1000 {
        x *= pow2(-1000);
        n += 1000;
    }
    x * pow2(n)
}

/// Dense row-major `f64` copy of a matrix.
#[derive(Clone, Debug)]
pub(crate) struct FloatMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
    pub lower_bandwidth: usize,
}

impl FloatMatrix {
    fn leading(&self, s: usize) -> FloatMatrix {
        let mut data = Vec::with_capacity(s * s);
        for i in 0..s {
            data.extend_from_slice(&self.data[i * self.dim..i * self.dim + s]);
        }
        FloatMatrix {
            dim: s,
            data,
            lower_bandwidth: self.lower_bandwidth.min(s.saturating_sub(1)),
        }
    }

    /// `D^-1 A D` for `D = diag(2^e)`.
    pub fn scaled(&self, e: &[i64]) -> Vec<f64> {
        let m = self.dim;
        let mut out = vec![0.0; m * m];
        out.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
            for (j, o) in row.iter_mut().enumerate() {
                let a = self.data[i * m + j];
                if a != 0.0 {
                    *o = ldexp(a, e[j] - e[i]);
                }
            }
        });
        out
    }
}

/// LU factorization with partial pivoting restricted to the lower band,
/// row interchanges applied LINPACK-style.
struct BandLu {
    m: usize,
    b: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn factor(mut a: Vec<f64>, m: usize, b: usize) -> Option<Self> {
        let mut piv = vec![0; m];
        for j in 0..m {
            let last = (j + b).min(m - 1);
            let mut p = j;
            for i in j + 1..=last {
                if a[i * m + j].abs() > a[p * m + j].abs() {
                    p = i;
                }
            }
            piv[j] = p;
            if a[p * m + j] == 0.0 || !a[p * m + j].is_finite() {
                return None;
            }
            if p != j {
                for c in j..m {
                    a.swap(p * m + c, j * m + c);
                }
            }
            let (head, tail) = a.split_at_mut((j + 1) * m);
            let pivot_row = &head[j * m..];
            let d = pivot_row[j];
            for i in j + 1..=last {
                let row = &mut tail[(i - j - 1) * m..(i - j) * m];
                let l = row[j] / d;
                row[j] = l;
                if l != 0.0 {
                    for c in j + 1..m {
                        row[c] -= l * pivot_row[c];
                    }
                }
            }
        }
        Some(BandLu { m, b, lu: a, piv })
    }

    fn solve(&self, rhs: &mut [f64]) {
        let (m, b) = (self.m, self.b);
        for j in 0..m {
            rhs.swap(j, self.piv[j]);
            let r = rhs[j];
            for i in j + 1..=(j + b).min(m - 1) {
                rhs[i] -= self.lu[i * m + j] * r;
            }
        }
        for i in (0..m).rev() {
            let row = &self.lu[i * m..(i + 1) * m];
            let mut acc = rhs[i];
            for c in i + 1..m {
                acc -= row[c] * rhs[c];
            }
            rhs[i] = acc / row[i];
        }
    }
}

/// Dense LU with partial pivoting, used for the bordered Newton systems.
pub(crate) fn dense_solve(mut a: Vec<f64>, n: usize, rhs: &mut [f64]) -> bool {
    let mut piv = vec![0; n];
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if a[i * n + k].abs() > a[p * n + k].abs() {
                p = i;
            }
        }
        piv[k] = p;
        if a[p * n + k] == 0.0 || !a[p * n + k].is_finite() {
            return false;
        }
        if p != k {
            for c in 0..n {
                a.swap(p * n + c, k * n + c);
            }
        }
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..];
        let d = pivot_row[k];
        tail.par_chunks_mut(n).with_min_len(32).for_each(|row| {
            let l = row[k] / d;
            row[k] = l;
            if l != 0.0 {
                for c in k + 1..n {
                    row[c] -= l * pivot_row[c];
                }
            }
        });
    }
    // whole rows were swapped, so the permutation goes first
    for k in 0..n {
        rhs.swap(k, piv[k]);
    }
    for k in 0..n {
        let r = rhs[k];
        for i in k + 1..n {
            rhs[i] -= a[i * n + k] * r;
        }
    }
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for c in i + 1..n {
            acc -= a[i * n + c] * rhs[c];
        }
        rhs[i] = acc / a[i * n + i];
    }
    rhs.iter().all(|v| v.is_finite())
}

fn collatz_wielandt(a: &[f64], m: usize, x: &[f64]) -> (f64, f64) {
    let q: Vec<f64> = a
        .par_chunks(m)
        .zip(x.par_iter())
        .map(|(row, xi)| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / xi)
        .collect();
    let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = q.iter().copied().fold(0.0, f64::max);
    (lo, hi)
}

/// Bracket and rescaled approximate Perron vector: the true vector is
/// `x_i * 2^e_i`.
#[derive(Clone, Debug)]
pub(crate) struct FloatPerron {
    pub lo: f64,
    pub hi: f64,
    pub exponents: Vec<i64>,
    pub x: Vec<f64>,
    pub steps: usize,
}

fn rescale(y: &[f64], e: &mut [i64]) -> Vec<f64> {
    y.iter()
        .zip(e.iter_mut())
        .map(|(&v, ei)| {
            let sh = v.log2().round() as i64;
            *ei += sh;
            ldexp(v, -sh)
        })
        .collect()
}

fn bisect(a: &FloatMatrix, e: &mut [i64], lo_start: f64, rel_tol: f64, max_steps: usize) -> FloatPerron {
    let m = a.dim;
    let mut scaled = a.scaled(e);
    let mut x = vec![1.0; m];
    let (cw_lo, cw_hi) = collatz_wielandt(&scaled, m, &x);
    let mut lo = lo_start.max(cw_lo).max(0.0);
    let mut hi = cw_hi;
    let mut steps = 0;
    if hi <= 0.0 {
        return FloatPerron { lo: 0.0, hi: 0.0, exponents: e.to_vec(), x, steps };
    }
    if lo > hi {
        lo = hi;
    }
    while hi - lo > rel_tol * hi && steps < max_steps {
        steps += 1;
        let sigma = 0.5 * (lo + hi);
        let mut shifted: Vec<f64> = scaled.iter().map(|v| -v).collect();
        for i in 0..m {
            shifted[i * m + i] += sigma;
        }
        let Some(lu) = BandLu::factor(shifted, m, a.lower_bandwidth) else {
            lo = sigma;
            continue;
        };
        let mut y = vec![1.0; m];
        lu.solve(&mut y);
        if y.iter().all(|v| v.is_finite() && *v > 0.0) {
            x = rescale(&y, e);
            scaled = a.scaled(e);
            let (cl, ch) = collatz_wielandt(&scaled, m, &x);
            hi = sigma.min(ch);
            lo = lo.max(cl).min(hi);
        } else {
            lo = sigma;
        }
    }
    FloatPerron { lo, hi, exponents: e.to_vec(), x, steps }
}

/// Brackets the Perron root, growing the leading principal block from 32 rows
/// so that the exponent profile can be extrapolated before each enlargement.
pub(crate) fn float_perron(a: &FloatMatrix, max_steps: usize) -> FloatPerron {
    let m = a.dim;
    let mut s = m.min(32);
    let mut e = vec![0i64; s];
    let mut lo = 0.0;
    let mut steps = 0;
    loop {
        let block = if s == m { a.clone() } else { a.leading(s) };
        let tol = if s == m { 4.0 * f64::EPSILON } else { 1e-10 };
        let mut fp = bisect(&block, &mut e, lo, tol, max_steps.saturating_sub(steps).max(1));
        steps += fp.steps;
        fp.steps = steps;
        if s == m {
            return fp;
        }
        lo = fp.lo;
        let next = (2 * s).min(m);
        // fold the vector's residual scale into the exponents, then extrapolate
        for (ei, xi) in e.iter_mut().zip(&fp.x) {
            *ei += xi.log2().round() as i64;
        }
        let w = 8.min(s - 1).max(1);
        let slope = if s > 1 { (e[s - 1] - e[s - 1 - w]) as f64 / w as f64 } else { 0.0 };
        for i in s..next {
            e.push(e[s - 1] + (slope * (i - s + 1) as f64).round() as i64);
        }
        s = next;
    }
}
