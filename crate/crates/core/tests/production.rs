use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{ToPrimitive, Zero};

use crossfree_core::linalg::{mat_add, mat_mul, mat_pow, mat_vec, rat, upper_tri_inverse};
use crossfree_core::production::{
    build_convex_c, build_leading_l, build_pocket_p, build_pprime, build_r, build_s,
    chain_degree_vector, convex_degree_vector, is_primitive, mixed_pocket_product,
    outer_degree_vector, start_vector, ChainSpec, PocketMatrixSet,
};
use crossfree_core::{DegreeVector, ExactMatrix, Rational};

fn fixture(name: &str) -> ExactMatrix {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    ExactMatrix::from_json_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// `R + sum_mu sum_l binom(mu-1, l-1) S^l R^(1-mu)` by dense products.
fn dense_leading(k: usize, m: usize) -> ExactMatrix {
    let r = build_r(m).unwrap();
    let s = build_s(m).unwrap();
    let rinv = upper_tri_inverse(&r).unwrap();
    let mut out = r.clone();
    for mu in 1..=k + 1 {
        let rp = mat_pow(&rinv, (mu - 1) as u64);
        for l in 1..=mu {
            let c = Rational::from_integer(binomial(mu - 1, l - 1).into());
            let term = mat_mul(&mat_pow(&s, l as u64), &rp).unwrap().scale(&c);
            out = mat_add(&out, &term).unwrap();
        }
    }
    out
}

/// `R^(k+1) + sum_mu sum_l binom(mu-1, l-1) S^l R^(k+1-mu)` by dense products.
fn dense_pprime(k: usize, m: usize) -> ExactMatrix {
    let r = build_r(m).unwrap();
    let s = build_s(m).unwrap();
    let mut out = mat_pow(&r, (k + 1) as u64);
    for mu in 1..=k + 1 {
        let rp = mat_pow(&r, (k + 1 - mu) as u64);
        for l in 1..=mu {
            let c = Rational::from_integer(binomial(mu - 1, l - 1).into());
            let term = mat_mul(&mat_pow(&s, l as u64), &rp).unwrap().scale(&c);
            out = mat_add(&out, &term).unwrap();
        }
    }
    out
}

#[test]
fn basic_builders() {
    let r3 = ExactMatrix::from_integer_rows(&[vec![1, 1, 1], vec![0, 2, 2], vec![0, 0, 2]]).unwrap();
    assert_eq!(build_r(3).unwrap(), r3);
    assert_eq!(build_r(1).unwrap(), ExactMatrix::identity(1));
    assert_eq!(build_s(1).unwrap(), ExactMatrix::zeros(1));
    let r6 = build_r(6).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let want = if i == 0 { 1 } else if j >= i { 2 } else { 0 };
            assert_eq!(*r6.get(i, j), rat(want));
        }
    }
    let v = DegreeVector::from_u64s(&[3, 5, 7, 11]).unwrap();
    let shifted = mat_vec(&build_s(4).unwrap(), &v).unwrap();
    assert_eq!(shifted, DegreeVector::from_u64s(&[0, 3, 5, 7]).unwrap());
    let c = build_convex_c(6).unwrap();
    assert_eq!(c.sub(&build_s(6).unwrap()).unwrap(), r6);
    let col0: Rational = (0..6).map(|i| c.get(i, 0).clone()).sum();
    assert_eq!(col0, rat(2));
    assert!(build_r(0).is_err());
}

#[test]
fn printed_pocket_matrices() {
    let p6 = build_pocket_p(2, 6).unwrap();
    assert_eq!(p6, fixture("p6.json"));
    assert_eq!(*p6.get(0, 3), Rational::new(155.into(), 4.into()));
    let p8 = build_pocket_p(2, 8).unwrap();
    assert_eq!(p8, fixture("p8.json"));
    assert_eq!(*p8.get(0, 5), Rational::new(327.into(), 4.into()));
    let first = mat_vec(&p6, &start_vector(6).unwrap()).unwrap();
    assert_eq!(first, DegreeVector::from_u64s(&[32, 48, 20, 4, 0, 0]).unwrap());
}

#[test]
fn pocket_matrix_factorizations() {
    for k in 1..=4 {
        for m in [k + 2, 7, 10] {
            let set = PocketMatrixSet::new(k, m).unwrap();
            assert_eq!(set.l, dense_leading(k, m), "L k={k} m={m}");
            let rk = mat_pow(&set.r, k as u64);
            assert_eq!(set.p, mat_mul(&rk, &set.l).unwrap(), "P k={k} m={m}");
            assert_eq!(set.pprime, mat_mul(&set.l, &rk).unwrap(), "P' k={k} m={m}");
        }
    }
}

#[test]
fn pprime_matches_dense_formula() {
    for k in 1..=6 {
        for m in [k + 2, 9, 16, 33, 64] {
            let p = build_pprime(k, m).unwrap();
            assert!(p.is_nonnegative() && p.is_integer(), "k={k} m={m}");
            assert!(p.lower_bandwidth() <= k + 1);
            if m <= 33 || k <= 2 {
                assert_eq!(p, dense_pprime(k, m), "k={k} m={m}");
            }
        }
    }
    assert!(build_pprime(2, 3).is_err());
    assert!(build_pprime(0, 8).is_err());
}

#[test]
fn pocket_and_pprime_share_spectrum() {
    let spectral = |a: &ExactMatrix| {
        let n = a.dim();
        let f: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| a.get(i, j).to_f64().unwrap()).collect())
            .collect();
        let mut x = vec![1.0; n];
        let mut est = 0.0;
        for _ in 0..5000 {
            let y: Vec<f64> = f.iter().map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
            let norm = y.iter().cloned().fold(0.0, f64::max);
            est = norm / x.iter().cloned().fold(0.0, f64::max);
            x = y.into_iter().map(|v| v / norm).collect();
        }
        est
    };
    let p = spectral(&build_pocket_p(2, 8).unwrap());
    let q = spectral(&build_pprime(2, 8).unwrap());
    assert!((p - q).abs() < 1e-9 * p, "{p} vs {q}");
}

/// Interleaving rule on points in chain order.
fn crosses((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Histogram of the degree of vertex `n - 1` over crossing-free subsets of `edges`.
fn naive_partition(n: usize, edges: &[(usize, usize)]) -> Vec<u64> {
    fn go(i: usize, edges: &[(usize, usize)], chosen: &mut Vec<(usize, usize)>, n: usize, out: &mut [u64]) {
        if i == edges.len() {
            let deg = chosen.iter().filter(|e| e.1 == n - 1).count();
            out[deg] += 1;
            return;
        }
        go(i + 1, edges, chosen, n, out);
        let e = edges[i];
        if chosen.iter().all(|&f| !crosses(e, f)) {
            chosen.push(e);
            go(i + 1, edges, chosen, n, out);
            chosen.pop();
        }
    }
    let mut out = vec![0u64; n];
    go(0, edges, &mut Vec::new(), n, &mut out);
    out
}

fn to_u64s(v: &DegreeVector, n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = v.entries().iter().map(|x| x.to_u64().unwrap()).collect();
    out.resize(n.max(out.len()), 0);
    out
}

#[test]
fn convex_vectors_match_enumeration() {
    for n in 3..=10usize {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 2..n).map(move |j| (i, j)))
            .collect();
        let want = naive_partition(n, &edges);
        let got = convex_degree_vector(n, n).unwrap();
        assert_eq!(to_u64s(&got, n), want, "n={n}");
        // the same vector from powers of the dense matrix
        let c = build_convex_c(n).unwrap();
        let dense = mat_vec(&mat_pow(&c, (n - 2) as u64), &start_vector(n).unwrap()).unwrap();
        assert_eq!(dense, got);
    }
    let seven: BigUint = convex_degree_vector(7, 7).unwrap().sum();
    assert_eq!(seven, BigUint::from(394u32));
    assert_eq!(seven << 6, BigUint::from(25216u32));
    assert_eq!(convex_degree_vector(4, 4).unwrap(), DegreeVector::from_u64s(&[2, 3, 1, 0]).unwrap());
    let c6 = build_convex_c(6).unwrap();
    let v5 = mat_vec(&mat_pow(&c6, 3), &start_vector(6).unwrap()).unwrap();
    assert_eq!(v5, convex_degree_vector(5, 6).unwrap());
}

fn outer_edges(sizes: &[usize]) -> (usize, Vec<(usize, usize)>) {
    let mut ends = vec![0];
    for k in sizes {
        ends.push(ends.last().unwrap() + k + 1);
    }
    let n = *ends.last().unwrap() + 1;
    let pocket = |i: usize| ends.windows(2).position(|w| w[0] <= i && i <= w[1]).unwrap();
    let last_pocket = |i: usize| ends.windows(2).rposition(|w| w[0] <= i && i <= w[1]).unwrap();
    let edges = (0..n)
        .flat_map(|i| (i + 2..n).map(move |j| (i, j)))
        .filter(|&(i, j)| last_pocket(i) != pocket(j))
        .collect();
    (n, edges)
}

#[test]
fn chain_vectors_match_enumeration() {
    for k in 1..=3usize {
        for pockets in 1..=3usize {
            let sizes = vec![k; pockets];
            let (z, edges) = outer_edges(&sizes);
            let want = naive_partition(z, &edges);
            let m = z.max(k + 2);
            let got = chain_degree_vector(&sizes, m).unwrap();
            assert!(!got.truncated);
            assert_eq!(to_u64s(&got.vector, m)[..z], want[..], "k={k} pockets={pockets}");
            let spec = ChainSpec::new(k, z, m).unwrap();
            assert_eq!(outer_degree_vector(&spec).unwrap(), got);
        }
    }
    for sizes in [vec![1, 2], vec![2, 1, 3], vec![3, 1], vec![2, 3, 2]] {
        let (z, edges) = outer_edges(&sizes);
        let want = naive_partition(z, &edges);
        let got = chain_degree_vector(&sizes, z).unwrap();
        assert_eq!(to_u64s(&got.vector, z), want, "{sizes:?}");
    }
}

#[test]
fn single_pocket_chain_is_start_vector() {
    let got = outer_degree_vector(&ChainSpec::new(2, 4, 6).unwrap()).unwrap();
    assert_eq!(got.vector, start_vector(6).unwrap());
    assert_eq!(naive_partition(4, &outer_edges(&[2]).1), vec![1, 0, 0, 0]);
    let s = start_vector(9).unwrap();
    assert_eq!(s.entries()[0], BigUint::from(1u32));
    assert!(s.entries()[1..].iter().all(Zero::is_zero));
}

#[test]
fn chain_spec_validation() {
    assert!(ChainSpec::new(2, 7, 8).is_ok());
    assert!(ChainSpec::new(2, 8, 8).is_err());
    assert!(ChainSpec::new(2, 1, 8).is_err());
    assert!(ChainSpec::new(2, 7, 3).is_err());
    let spec = ChainSpec::new(3, 13, 8).unwrap();
    assert_eq!(spec.pockets(), 3);
    assert_eq!(spec.total_points(), 26);
    assert!(outer_degree_vector(&spec).unwrap().truncated);
}

#[test]
fn truncation_only_loses_graphs() {
    for k in 1..=6usize {
        let z = 1 + 6 * (k + 1);
        let full = outer_degree_vector(&ChainSpec::new(k, z, z).unwrap()).unwrap();
        assert!(!full.truncated);
        let mut prev = BigUint::zero();
        for m in [k + 2, 8, 16, 32, 64] {
            if m < k + 2 {
                continue;
            }
            let v = outer_degree_vector(&ChainSpec::new(k, z, m).unwrap()).unwrap();
            assert_eq!(v.truncated, m < z);
            let s = v.vector.sum();
            assert!(prev <= s, "k={k} m={m}");
            assert!(s <= full.vector.sum());
            if m >= z {
                assert_eq!(s, full.vector.sum());
            }
            prev = s;
        }
    }
}

/// Smallest `N` with all entries of `a^N` positive, by repeated boolean products.
fn naive_exponent(a: &ExactMatrix, limit: usize) -> Option<usize> {
    let m = a.dim();
    let pat: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| !a.get(i, j).is_zero()).collect()).collect();
    let mut cur = pat.clone();
    for n in 1..=limit {
        if cur.iter().all(|r| r.iter().all(|&b| b)) {
            return Some(n);
        }
        cur = (0..m)
            .map(|i| (0..m).map(|j| (0..m).any(|t| cur[i][t] && pat[t][j])).collect())
            .collect();
    }
    None
}

#[test]
fn pprime_is_primitive() {
    for k in 1..=6usize {
        for m in (k + 2..=12).chain([16, 32]) {
            let p = build_pprime(k, m).unwrap();
            let got = is_primitive(&p).unwrap();
            assert!(got.primitive, "k={k} m={m}");
            let e = got.exponent.unwrap();
            assert!(e <= m as u64 + 1, "k={k} m={m} exponent {e}");
            if m <= 12 {
                assert_eq!(Some(e as usize), naive_exponent(&p, 200), "k={k} m={m}");
            }
        }
    }
    let p = is_primitive(&build_pprime(2, 8).unwrap()).unwrap();
    assert!(p.exponent.unwrap() <= 7);
}

#[test]
fn non_primitive_patterns() {
    assert!(!is_primitive(&build_s(5).unwrap()).unwrap().primitive);
    assert!(!is_primitive(&ExactMatrix::identity(4)).unwrap().primitive);
    assert!(is_primitive(&ExactMatrix::identity(1)).unwrap().primitive);
    let neg = ExactMatrix::identity(2).scale(&rat(-1));
    assert!(is_primitive(&neg).is_err());
    let wielandt = ExactMatrix::from_fn(5, |i, j| rat(((j == i + 1) || (i == 4 && j <= 1)) as i64));
    assert_eq!(is_primitive(&wielandt).unwrap().exponent, Some(17));
    assert_eq!(naive_exponent(&wielandt, 40), Some(17));
}

#[test]
fn mixed_products() {
    let m = 12;
    let p2 = build_pprime(2, m).unwrap();
    assert_eq!(mixed_pocket_product(&[2], m).unwrap(), p2);
    assert_eq!(mixed_pocket_product(&[2, 2], m).unwrap(), mat_mul(&p2, &p2).unwrap());
    let p3 = build_pprime(3, m).unwrap();
    assert_eq!(mixed_pocket_product(&[2, 3], m).unwrap(), mat_mul(&p3, &p2).unwrap());
    let start = start_vector(m).unwrap();
    for (a, b) in [(1, 2), (2, 3), (1, 3)] {
        let x = mat_vec(&mixed_pocket_product(&[a, b], 20).unwrap(), &start_vector(20).unwrap()).unwrap();
        let y = mat_vec(&mixed_pocket_product(&[b, a], 20).unwrap(), &start_vector(20).unwrap()).unwrap();
        assert_eq!(x.sum(), y.sum(), "({a},{b})");
    }
    assert!(mat_vec(&p2, &start).unwrap().sum() > BigUint::zero());
    assert!(mixed_pocket_product(&[], m).is_err());
    assert!(mixed_pocket_product(&[2, 0], m).is_err());
}

#[test]
fn leading_matrix_is_rational() {
    let l = build_leading_l(2, 6).unwrap();
    assert!(!l.is_integer());
    assert_eq!(l, dense_leading(2, 6));
}
