//! Entropy lower bound for the inner part of a chain of pockets.
//!
//! A profile `alpha_t` fixes the fraction of pockets in which exactly `t`
//! inner points are covered. For each profile the number of inner-part graphs
//! grows at least like `2^(f n)` with
//! `f = xi / (k+1) + (1 - sum_t t alpha_t / (k+1)) log2 D`, where `xi` is the
//! nested entropy of choosing the covered pockets plus `sum_t alpha_t log2 p_t`,
//! and `D = 2 + sqrt 2` is the per-point base of the double chain.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};

use crate::decimal::FloorDecimal;
use crate::error::{Error, Result};
use crate::linalg::Rational;
use crate::oracle::CoverageCensus;

/// Working precision of the certified evaluation, in bits.
pub const HP_BITS: usize = 320;
/// Digits of the reported base.
pub const BASE_DIGITS: u32 = 10;
/// Margin (relative, as a power of two) subtracted before rounding down.
const MARGIN_BITS: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

/// `-x log2 x - (1-x) log2 (1-x)` with `0 log 0 = 0`.
pub fn entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("entropy argument {x} outside [0, 1]")));
    }
    Ok(entropy_unchecked(x))
}

fn entropy_unchecked(x: f64) -> f64 {
    let term = |v: f64| if v <= 0.0 { 0.0 } else { -v * v.log2() };
    term(x) + term(1.0 - x)
}

pub fn double_chain_base_f64() -> f64 {
    2.0 + std::f64::consts::SQRT_2
}

struct Hp {
    p: usize,
    cc: Consts,
}

impl Hp {
    fn new(p: usize) -> Self {
        Hp {
            p,
            cc: Consts::new().expect("constant cache allocation"),
        }
    }

    fn int(&self, n: u64) -> BigFloat {
        BigFloat::from_u64(n, self.p)
    }

    fn f(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    fn log2(&mut self, x: &BigFloat) -> BigFloat {
        x.log2(self.p, RM, &mut self.cc)
    }

    /// `-x log2 x`, zero at zero.
    fn plogp(&mut self, x: &BigFloat) -> BigFloat {
        if x.is_zero() || x.is_negative() {
            return self.int(0);
        }
        let l = self.log2(x);
        x.mul(&l, self.p, RM).neg()
    }

    fn entropy(&mut self, x: &BigFloat) -> BigFloat {
        let one = self.int(1);
        let y = one.sub(x, self.p, RM);
        let a = self.plogp(x);
        let b = self.plogp(&y);
        a.add(&b, self.p, RM)
    }

    fn double_chain_base(&mut self) -> BigFloat {
        let r2 = self.int(2).sqrt(self.p, RM);
        let num = self.int(10).add(&self.int(7).mul(&r2, self.p, RM), self.p, RM);
        let den = self.int(3).add(&self.int(2).mul(&r2, self.p, RM), self.p, RM);
        num.div(&den, self.p, RM)
    }

    fn exp2(&mut self, x: &BigFloat) -> BigFloat {
        self.int(2).pow(x, self.p, RM, &mut self.cc)
    }
}

/// Exact value of a finite `BigFloat`.
pub(crate) fn bigfloat_to_rational(x: &BigFloat) -> Result<Rational> {
    if x.is_zero() {
        return Ok(Rational::zero());
    }
    let (words, _, sign, exp, _) = x
        .as_raw_parts()
        .ok_or_else(|| Error::Numerical("non-finite high-precision value".into()))?;
    let mut digits = Vec::with_capacity(words.len() * 2);
    for w in words {
        let w = *w;
        digits.push(w as u32);
        digits.push((w >> 32) as u32);
    }
    let mant = BigInt::from(BigUint::new(digits));
    let mant = if sign == Sign::Neg { -mant } else { mant };
    // value = 0.mantissa * 2^exp
    let shift = exp as i64 - 64 * words.len() as i64;
    Ok(if shift >= 0 {
        Rational::from_integer(mant << shift as usize)
    } else {
        Rational::new(mant, BigInt::one() << (-shift) as usize)
    })
}

fn lower_rational(x: &BigFloat) -> Result<Rational> {
    let r = bigfloat_to_rational(x)?;
    let margin = Rational::new(BigInt::one(), BigInt::one() << MARGIN_BITS);
    Ok(&r - &r * margin)
}

/// `D = (10 + 7 sqrt 2) / (3 + 2 sqrt 2)`, rounded down to `digits` decimals.
pub fn double_chain_base(digits: u32) -> Result<FloorDecimal> {
    let bits = (digits as usize * 4 + 64).max(HP_BITS);
    let mut hp = Hp::new(bits);
    let d = hp.double_chain_base();
    Ok(FloorDecimal::floor_of(&lower_rational(&d)?, digits))
}

/// Fractions `alpha[t-1]` of pockets with exactly `t` covered inner points.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageProfile {
    pub k: usize,
    pub alpha: Vec<f64>,
}

impl CoverageProfile {
    pub fn new(k: usize, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != k {
            return Err(Error::DimensionMismatch {
                left: k,
                right: alpha.len(),
            });
        }
        if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::Domain("profile fractions must be finite and nonnegative".into()));
        }
        if alpha.iter().sum::<f64>() > 1.0 {
            return Err(Error::Domain("profile fractions sum to more than 1".into()));
        }
        Ok(CoverageProfile { k, alpha })
    }

    pub fn zero(k: usize) -> Self {
        CoverageProfile {
            k,
            alpha: vec![0.0; k],
        }
    }

    pub fn get(&self, t: usize) -> f64 {
        self.alpha[t - 1]
    }

    /// Fraction of all chain points left uncovered.
    pub fn uncovered_fraction(&self) -> f64 {
        1.0 - self
            .alpha
            .iter()
            .enumerate()
            .map(|(i, a)| (i + 1) as f64 * a)
            .sum::<f64>()
            / (self.k + 1) as f64
    }
}

fn check(census: &CoverageCensus, profile: &CoverageProfile) -> Result<()> {
    if census.k != profile.k {
        return Err(Error::InvalidArgument(format!(
            "census for k = {} used with profile for k = {}",
            census.k, profile.k
        )));
    }
    if (1..=census.k).any(|t| census.get(t) == 0) {
        return Err(Error::InvalidArgument("census has a zero count".into()));
    }
    Ok(())
}

fn objective_f64(log_p: &[f64], log_d: f64, alpha: &[f64]) -> f64 {
    let k = alpha.len();
    let mut xi = 0.0;
    let mut rem = 1.0;
    for t in (1..=k).rev() {
        let a = alpha[t - 1];
        if rem > 0.0 {
            xi += entropy_unchecked((a / rem).min(1.0)) * rem;
        }
        xi += log_p[t - 1] * a;
        rem -= a;
    }
    let covered: f64 = alpha.iter().enumerate().map(|(i, a)| (i + 1) as f64 * a).sum();
    let k1 = (k + 1) as f64;
    xi / k1 + (1.0 - covered / k1) * log_d
}

/// `log2` of the per-point base for `profile`, in `f64`.
pub fn objective(census: &CoverageCensus, profile: &CoverageProfile) -> Result<f64> {
    check(census, profile)?;
    let log_p: Vec<f64> = (1..=census.k).map(|t| (census.get(t) as f64).log2()).collect();
    Ok(objective_f64(&log_p, double_chain_base_f64().log2(), &profile.alpha))
}

fn objective_hp(hp: &mut Hp, census: &CoverageCensus, profile: &CoverageProfile) -> BigFloat {
    let p = hp.p;
    let k = profile.k;
    let mut xi = hp.int(0);
    let mut rem = hp.int(1);
    let mut covered = hp.int(0);
    for t in (1..=k).rev() {
        let a = hp.f(profile.get(t));
        if rem.is_positive() {
            let mut ratio = a.div(&rem, p, RM);
            if ratio.cmp(&hp.int(1)).is_some_and(|c| c > 0) {
                ratio = hp.int(1);
            }
            let h = hp.entropy(&ratio);
            xi = xi.add(&h.mul(&rem, p, RM), p, RM);
        }
        let lp = hp.log2(&hp.int(census.get(t)));
        xi = xi.add(&lp.mul(&a, p, RM), p, RM);
        rem = rem.sub(&a, p, RM);
        covered = covered.add(&hp.int(t as u64).mul(&a, p, RM), p, RM);
    }
    let k1 = hp.int(k as u64 + 1);
    let d = hp.double_chain_base();
    let log_d = hp.log2(&d);
    let uncovered = hp.int(1).sub(&covered.div(&k1, p, RM), p, RM);
    xi.div(&k1, p, RM).add(&uncovered.mul(&log_d, p, RM), p, RM)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerBoundResult {
    pub k: usize,
    pub profile: CoverageProfile,
    /// `log2` of the base, exact value of the high-precision evaluation.
    pub log2_base: Rational,
    /// Rational lower bound on the base (evaluation minus a safety margin).
    pub base_lower: Rational,
    /// `base_lower` rounded down to ten decimals.
    pub base: FloorDecimal,
}

impl InnerBoundResult {
    pub fn base_at(&self, digits: u32) -> FloorDecimal {
        FloorDecimal::floor_of(&self.base_lower, digits)
    }
}

impl Serialize for InnerBoundResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Alpha<'a>(&'a CoverageProfile);
        impl Serialize for Alpha<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.k))?;
                for t in (1..=self.0.k).rev() {
                    m.serialize_entry(&t.to_string(), &self.0.get(t))?;
                }
                m.end()
            }
        }
        let mut st = s.serialize_struct("InnerBoundResult", 4)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("alpha", &Alpha(&self.profile))?;
        st.serialize_field(
            "log2_base",
            &FloorDecimal::floor_of(&self.log2_base, 30).to_string(),
        )?;
        st.serialize_field("base", &self.base)?;
        st.end()
    }
}

/// Certified evaluation of `profile`: the returned base is a lower bound that
/// holds whether or not the profile is optimal.
pub fn evaluate(census: &CoverageCensus, profile: &CoverageProfile) -> Result<InnerBoundResult> {
    check(census, profile)?;
    let mut hp = Hp::new(HP_BITS);
    let log2_base = objective_hp(&mut hp, census, profile);
    let base = hp.exp2(&log2_base);
    let base_lower = lower_rational(&base)?;
    Ok(InnerBoundResult {
        k: profile.k,
        profile: profile.clone(),
        log2_base: bigfloat_to_rational(&log2_base)?,
        base: FloorDecimal::floor_of(&base_lower, BASE_DIGITS),
        base_lower,
    })
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= 1e-16 * (1.0 + a.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

fn ascend(log_p: &[f64], log_d: f64, mut alpha: Vec<f64>, tolerance: f64) -> (Vec<f64>, f64) {
    let k = alpha.len();
    let mut value = objective_f64(log_p, log_d, &alpha);
    for _ in 0..20_000 {
        let before = value;
        for t in 0..k {
            let others: f64 = alpha.iter().enumerate().filter(|&(i, _)| i != t).map(|(_, a)| a).sum();
            let cap = (1.0 - others).max(0.0);
            let mut trial = alpha.clone();
            let (x, fx) = golden_max(
                |v| {
                    trial[t] = v;
                    objective_f64(log_p, log_d, &trial)
                },
                0.0,
                cap,
            );
            if fx >= value {
                alpha[t] = x;
                value = fx;
            }
        }
        if value - before <= tolerance {
            break;
        }
    }
    (alpha, value)
}

/// Starting points: the empty profile, a uniform profile, and seeded random
/// points of the feasible region.
fn starts(k: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + k as u64);
    let mut out = vec![vec![0.0; k], vec![1.0 / (k + 1) as f64; k]];
    while out.len() < count {
        let raw: Vec<f64> = (0..=k).map(|_| -rng.gen_range(1e-12..1.0f64).ln()).collect();
        let total: f64 = raw.iter().sum();
        out.push(raw[..k].iter().map(|v| v / total).collect());
    }
    out
}

pub const RESTARTS: usize = 8;

/// Multi-start projected coordinate ascent with golden-section line searches;
/// every start is refined until a sweep gains at most `tolerance`.
pub fn maximize(census: &CoverageCensus, tolerance: f64) -> Result<InnerBoundResult> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    check(census, &CoverageProfile::zero(census.k))?;
    let log_p: Vec<f64> = (1..=census.k).map(|t| (census.get(t) as f64).log2()).collect();
    let log_d = double_chain_base_f64().log2();
    let best = starts(census.k, RESTARTS)
        .into_par_iter()
        .map(|s| ascend(&log_p, log_d, s, tolerance))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None::<(Vec<f64>, f64)>, |acc, cand| match acc {
            Some(a) if a.1 >= cand.1 => Some(a),
            _ => Some(cand),
        })
        .expect("at least one start");
    let mut alpha = best.0;
    // guard against the sum creeping past 1 through rounding
    let total: f64 = alpha.iter().sum();
    if total > 1.0 {
        alpha.iter_mut().for_each(|a| *a /= total * (1.0 + f64::EPSILON));
    }
    evaluate(census, &CoverageProfile::new(census.k, alpha)?)
}

/// Per-point base of a chain repeating pockets of sizes `ks`, each with its
/// own inner bound: the weighted geometric mean of the bases with weights
/// `k_i + 1`. Returns a rational lower bound.
pub fn mixed_base(parts: &[InnerBoundResult]) -> Result<Rational> {
    if parts.is_empty() {
        return Err(Error::InvalidArgument("no pocket sizes".into()));
    }
    let total: usize = parts.iter().map(|r| r.k + 1).sum();
    let mut hp = Hp::new(HP_BITS);
    let p = hp.p;
    let mut log = hp.int(0);
    for r in parts {
        let w = hp.int(r.k as u64 + 1);
        let lb = rational_to_bigfloat(&r.base_lower, p);
        let l = hp.log2(&lb);
        log = log.add(&l.mul(&w, p, RM), p, RM);
    }
    let log = log.div(&hp.int(total as u64), p, RM);
    let base = hp.exp2(&log);
    lower_rational(&base)
}

fn rational_to_bigfloat(r: &Rational, p: usize) -> BigFloat {
    let to_bf = |n: &BigInt| {
        let s = n.to_string();
        let mut cc = Consts::new().expect("constant cache allocation");
        BigFloat::parse(&s, astro_float::Radix::Dec, p + 64, RoundingMode::None, &mut cc)
    };
    to_bf(r.numer()).div(&to_bf(r.denom()), p, RM)
}
