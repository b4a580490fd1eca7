use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use crossfree_core::decimal::pow10;
use crossfree_core::linalg::{mat_add, mat_mul, rat};
use crossfree_core::perron::{
    certify_lower_bound, certify_upper_bound, max_column_sum, perron_lower, power_iteration,
    DEFAULT_MAX_ITER,
};
use crossfree_core::production::{build_pprime, build_s};
use crossfree_core::{Error, ExactMatrix, Rational};

fn two_by_two() -> ExactMatrix {
    ExactMatrix::from_integer_rows(&[vec![2, 1], vec![1, 2]]).unwrap()
}

/// Coefficients `c_0..c_n` (`c_n = 1`) of `det(xI - A)` by Faddeev-LeVerrier.
fn char_poly(a: &ExactMatrix) -> Vec<Rational> {
    let n = a.dim();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = rat(1);
    let mut m = ExactMatrix::zeros(n);
    for k in 1..=n {
        let scaled = ExactMatrix::identity(n).scale(&c[n - k + 1]);
        m = mat_add(&mat_mul(a, &m).unwrap(), &scaled).unwrap();
        let am = mat_mul(a, &m).unwrap();
        let trace: Rational = (0..n).map(|i| am.get(i, i).clone()).sum();
        c[n - k] = -trace / rat(k as i64);
    }
    c
}

fn eval(c: &[Rational], x: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, ci| acc * x + ci)
}

/// Coefficients of `p(x + s)`.
fn taylor_shift(c: &[Rational], s: &Rational) -> Vec<Rational> {
    let mut d = c.to_vec();
    let n = d.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &d[j + 1] * s;
            d[j] += t;
        }
    }
    d
}

#[test]
fn symmetric_two_by_two() {
    let a = two_by_two();
    let it = power_iteration(&a, 128, DEFAULT_MAX_ITER).unwrap();
    assert!((it.estimate.to_f64().unwrap() - 3.0).abs() < 1e-15);
    assert!(it.converged);
    let exact = certify_lower_bound(&a, &[rat(1), rat(1)]).unwrap();
    assert_eq!(exact, rat(3));
    assert_eq!(certify_upper_bound(&a, &[rat(1), rat(1)]).unwrap(), rat(3));
    let cert = perron_lower(&a, 128).unwrap();
    assert!(cert.lower_bound <= rat(3) && cert.upper_bound >= rat(3));
    assert!(rat(3) - &cert.lower_bound < Rational::new(1.into(), pow10(30)));
}

#[test]
fn pprime_bound_brackets_characteristic_root() {
    let a = build_pprime(2, 8).unwrap();
    let cert = perron_lower(&a, 160).unwrap();
    let c = char_poly(&a);
    let delta = &cert.lower_bound * Rational::new(1.into(), 10u64.pow(12).into());
    let below = &cert.lower_bound - &delta;
    let above = &cert.upper_bound + &delta;
    // a sign change below the bound and no root at all above it
    assert!(eval(&c, &below).is_negative());
    assert!(taylor_shift(&c, &above).iter().all(|x| x.is_positive()));
    let it = power_iteration(&a, 160, DEFAULT_MAX_ITER).unwrap();
    assert!(it.estimate >= below && it.estimate <= above);
    assert!(cert.recheck(&a).unwrap());
}

#[test]
fn certificate_fields() {
    let a = build_pprime(3, 16).unwrap();
    let cert = perron_lower(&a, 128).unwrap();
    assert!(cert.witness.iter().all(|x| x.is_positive()));
    assert_eq!(certify_lower_bound(&a, &cert.witness).unwrap(), cert.lower_bound);
    assert!(cert.lower_bound <= cert.upper_bound);
    assert!(cert.upper_bound <= max_column_sum(&a));
    let again = perron_lower(&a, 128).unwrap();
    assert_eq!(cert.witness_digest(), again.witness_digest());
    let json = cert.summary(20);
    assert_eq!(json.dim, 16);
    assert_eq!(json.witness_sha256.len(), 64);
    assert!(json.lower_bound_decimal <= json.upper_bound_decimal);
}

#[test]
fn bounds_grow_with_matrix_size() {
    for k in 1..=3 {
        let mut prev = Rational::zero();
        for m in [8, 16, 32, 64] {
            let lb = perron_lower(&build_pprime(k, m).unwrap(), 128).unwrap().lower_bound;
            assert!(lb > prev, "k={k} m={m}");
            prev = lb;
        }
    }
}

#[test]
fn rejects_non_primitive_and_negative_input() {
    assert_eq!(perron_lower(&build_s(6).unwrap(), 128).unwrap_err(), Error::NotPrimitive);
    assert_eq!(perron_lower(&ExactMatrix::identity(3), 128).unwrap_err(), Error::NotPrimitive);
    let neg = ExactMatrix::from_integer_rows(&[vec![1, -1], vec![1, 1]]).unwrap();
    assert!(perron_lower(&neg, 128).is_err());
    let a = two_by_two();
    assert!(certify_lower_bound(&a, &[rat(1), rat(0)]).is_err());
    assert!(certify_lower_bound(&a, &[rat(1)]).is_err());
}

#[test]
fn size_1024_estimate_near_cubic_root() {
    let a = build_pprime(2, 1024).unwrap();
    let cert = perron_lower(&a, 128).unwrap();
    let x = cert.float_estimate.to_f64().unwrap();
    let p = x * x * x - 125.0 * x * x + 96.0 * x + 28.0;
    let dp = 3.0 * x * x - 250.0 * x + 96.0;
    assert!((p / (x * dp)).abs() <= 1e-4, "relative Newton step {}", p / (x * dp));
    assert!(x < 124.225396744416);
}

fn positive_matrix(dim: usize) -> impl Strategy<Value = ExactMatrix> {
    prop::collection::vec(0i64..10, dim * dim).prop_map(move |v| {
        ExactMatrix::from_fn(dim, |i, j| rat(v[i * dim + j] + (i == j || j == (i + 1) % dim) as i64))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn collatz_wielandt_bounds_are_sound(
        a in positive_matrix(4),
        x in prop::collection::vec(1i64..50, 4),
        y in prop::collection::vec(1i64..50, 4),
    ) {
        let x: Vec<Rational> = x.into_iter().map(rat).collect();
        let y: Vec<Rational> = y.into_iter().map(rat).collect();
        let lo = certify_lower_bound(&a, &x).unwrap();
        let hi = certify_upper_bound(&a, &y).unwrap();
        prop_assert!(lo <= hi);
        let cert = perron_lower(&a, 128).unwrap();
        prop_assert!(lo <= cert.upper_bound);
        prop_assert!(cert.lower_bound <= hi);
        prop_assert!(cert.upper_bound <= max_column_sum(&a));
        let c = char_poly(&a);
        prop_assert!(!eval(&c, &cert.lower_bound).is_positive() || cert.lower_bound == cert.upper_bound);
    }
}
