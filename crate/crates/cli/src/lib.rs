//! Composition of the certified pieces into growth-rate reports, plus
//! oracle-backed verification suites.

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crossfree_core::decimal::FloorDecimal;
use crossfree_core::inner::{self, InnerBoundResult};
use crossfree_core::oracle::{
    count_crossing_free, coverage_census, convex_config, degree_partition, pocket_config,
    zigzag_outer_config, CoverageCensus,
};
use crossfree_core::perron::{self, CertificateJson, PerronCertificate};
use crossfree_core::production::{
    build_pprime, chain_degree_vector, convex_degree_vector, is_primitive, mixed_pocket_product,
};
use crossfree_core::Rational;

pub const DEFAULT_SIZE: usize = 1024;
pub const DEFAULT_DIGITS: u32 = 20;
pub const INNER_TOLERANCE: f64 = 1e-15;

/// Published covering counts `p_1..p_k` for `k = 2..=6`.
pub const PUBLISHED_CENSUS: [(usize, &[u64]); 5] = [
    (2, &[2, 3]),
    (3, &[3, 7, 11]),
    (4, &[4, 12, 28, 45]),
    (5, &[5, 18, 52, 121, 197]),
    (6, &[6, 25, 84, 237, 550, 903]),
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] crossfree_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(crossfree_core::Error::InvalidArgument(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug)]
pub struct BoundReport {
    /// Pocket sizes of one period of the chain; a single entry for uniform chains.
    pub pockets: Vec<usize>,
    pub matrix_dim: usize,
    pub precision_digits: u32,
    pub perron: PerronCertificate,
    pub inner: Vec<InnerBoundResult>,
    /// Rational lower bound on the inner-part base.
    pub inner_base: Rational,
    /// `perron.lower_bound^(1/K)` rounded down, `K` the points per period.
    pub root: FloorDecimal,
    /// `2 * root * inner_base` rounded down.
    pub total_base: FloorDecimal,
}

impl BoundReport {
    pub fn points_per_period(&self) -> u32 {
        self.pockets.iter().map(|k| *k as u32 + 1).sum()
    }

    pub fn to_json(&self) -> ReportJson {
        let d = self.precision_digits;
        ReportJson {
            k: (self.pockets.len() == 1).then(|| self.pockets[0]),
            pockets: self.pockets.clone(),
            matrix_dim: self.matrix_dim,
            precision_digits: d,
            perron: self.perron.summary(d),
            inner: self.inner.clone(),
            inner_base: FloorDecimal::floor_of(&self.inner_base, d).to_string(),
            root: self.root.to_string(),
            total_base: self.total_base.to_string(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let j = self.to_json();
        let _ = writeln!(s, "pockets            {:?}", self.pockets);
        let _ = writeln!(s, "matrix size        {}", self.matrix_dim);
        let _ = writeln!(s, "perron lower bound {}", j.perron.lower_bound_decimal);
        let _ = writeln!(s, "perron estimate    {}", j.perron.float_estimate);
        let _ = writeln!(s, "root (1/{})         {}", self.points_per_period(), self.root);
        let _ = writeln!(s, "inner base         {}", j.inner_base);
        let _ = writeln!(s, "total base         {}", self.total_base);
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub pockets: Vec<usize>,
    pub matrix_dim: usize,
    pub precision_digits: u32,
    pub perron: CertificateJson,
    pub inner: Vec<InnerBoundResult>,
    pub inner_base: String,
    pub root: String,
    pub total_base: String,
}

fn check_k(k: usize) -> Result<()> {
    if !(1..=6).contains(&k) {
        return Err(CliError::Usage(format!("k must be between 1 and 6, got {k}")));
    }
    Ok(())
}

pub fn inner_bound(k: usize) -> Result<InnerBoundResult> {
    let census = coverage_census(k)?;
    Ok(inner::maximize(&census, INNER_TOLERANCE)?)
}

/// `2 * root * inner` with `root = floor_digits(rho^(1/points))`, all rounded down.
pub fn compose(rho_lower: &Rational, points: u32, inner_base: &Rational, digits: u32) -> Result<(FloorDecimal, FloorDecimal)> {
    let root = FloorDecimal::floor_root(rho_lower, points, digits)?;
    let two = Rational::from_integer(2.into());
    let total = FloorDecimal::floor_of(&(two * root.to_rational() * inner_base), digits);
    Ok((root, total))
}

/// Bound for chains whose pockets all have `k` inner points.
pub fn cmd_total(k: usize, m: usize, digits: u32) -> Result<BoundReport> {
    cmd_total_mixed(&[k], m, digits)
}

/// Bound for chains repeating the pocket sizes `pockets`.
pub fn cmd_total_mixed(pockets: &[usize], m: usize, digits: u32) -> Result<BoundReport> {
    if pockets.is_empty() {
        return Err(CliError::Usage("no pocket sizes given".into()));
    }
    for &k in pockets {
        check_k(k)?;
    }
    let kmax = *pockets.iter().max().expect("nonempty");
    if m < kmax + 2 {
        return Err(CliError::Usage(format!("size must be at least {}", kmax + 2)));
    }
    if digits == 0 {
        return Err(CliError::Usage("precision must be positive".into()));
    }
    let matrix = if pockets.len() == 1 {
        build_pprime(pockets[0], m)?
    } else {
        mixed_pocket_product(pockets, m)?
    };
    let cert = perron::perron_lower(&matrix, perron::bits_for_digits(digits))?;
    let inner = pockets
        .iter()
        .map(|&k| inner_bound(k))
        .collect::<Result<Vec<_>>>()?;
    let inner_base = if inner.len() == 1 {
        inner[0].base_lower.clone()
    } else {
        inner::mixed_base(&inner)?
    };
    let points = pockets.iter().map(|k| *k as u32 + 1).sum();
    let (root, total_base) = compose(&cert.lower_bound, points, &inner_base, digits)?;
    Ok(BoundReport {
        pockets: pockets.to_vec(),
        matrix_dim: m,
        precision_digits: digits,
        perron: cert,
        inner,
        inner_base,
        root,
        total_base,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Convex,
    Outer,
    Census,
    Swap,
    Lemma2,
    Primitivity,
}

impl std::str::FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "convex" => Suite::Convex,
            "outer" => Suite::Outer,
            "census" => Suite::Census,
            "swap" => Suite::Swap,
            "lemma2" => Suite::Lemma2,
            "primitivity" => Suite::Primitivity,
            _ => return Err(CliError::Usage(format!("unknown suite '{s}'"))),
        })
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Convex => "convex",
            Suite::Outer => "outer",
            Suite::Census => "census",
            Suite::Swap => "swap",
            Suite::Lemma2 => "lemma2",
            Suite::Primitivity => "primitivity",
        }
    }

    /// Default size limit; its meaning depends on the suite.
    pub fn default_max_n(self) -> usize {
        match self {
            Suite::Convex => 10,
            Suite::Outer => 13,
            Suite::Census => 6,
            Suite::Swap => 3,
            Suite::Lemma2 | Suite::Primitivity => 32,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
}

struct Collector {
    passed: bool,
    lines: Vec<String>,
}

impl Collector {
    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn trimmed(v: &crossfree_core::DegreeVector) -> Vec<BigUint> {
    v.trimmed().to_vec()
}

/// Runs one oracle-versus-matrix or property suite. `max_n` bounds the
/// instance size: point count (convex), chain length (outer), pocket size
/// (census, swap) or matrix size (lemma2, primitivity).
pub fn cmd_verify(suite: Suite, max_n: usize) -> Result<SuiteReport> {
    let mut c = Collector {
        passed: true,
        lines: Vec::new(),
    };
    match suite {
        Suite::Convex => {
            if !(3..=14).contains(&max_n) {
                return Err(CliError::Usage("convex suite supports 3 <= max-n <= 14".into()));
            }
            for n in 3..=max_n {
                let cfg = convex_config(n)?;
                let oracle = degree_partition(&cfg, n - 1)?;
                let matrix = convex_degree_vector(n, n)?;
                let count = oracle.sum();
                let total = &count << (n - 1);
                c.check(
                    trimmed(&oracle) == trimmed(&matrix),
                    format!("n={n} count={count} total={total}"),
                );
            }
        }
        Suite::Outer => {
            for k in 1..=3usize {
                for pockets in 1..=3usize {
                    let z = 1 + pockets * (k + 1);
                    if z > max_n {
                        continue;
                    }
                    let sizes = vec![k; pockets];
                    let cfg = zigzag_outer_config(&sizes)?;
                    let oracle = degree_partition(&cfg, z - 1)?;
                    let matrix = chain_degree_vector(&sizes, z.max(k + 2))?.vector;
                    c.check(
                        trimmed(&oracle) == trimmed(&matrix),
                        format!("k={k} pockets={pockets} z={z} count={}", oracle.sum()),
                    );
                }
            }
        }
        Suite::Census => {
            let top = max_n.clamp(1, 8);
            for k in 1..=top {
                let census = coverage_census(k)?;
                let all = count_crossing_free(&pocket_config(k)?);
                let diagonals = count_crossing_free(&convex_config(k + 2)?) / 2;
                let published = PUBLISHED_CENSUS
                    .iter()
                    .find(|(pk, _)| *pk == k)
                    .map(|(_, v)| *v);
                let matches = published.is_none_or(|p| census.counts[1..] == *p);
                let ok = census.total() as u128 == all
                    && census.counts[k] as u128 == diagonals
                    && census.counts[0] == 1
                    && matches;
                c.check(ok, format!("k={k} counts(t=1..k)={:?}", &census.counts[1..]));
            }
        }
        Suite::Swap => {
            let top = max_n.clamp(1, 4);
            for k1 in 1..=top {
                for k2 in 1..=top {
                    if k1 >= k2 {
                        continue;
                    }
                    let a = count_crossing_free(&zigzag_outer_config(&[k1, k2])?);
                    let b = count_crossing_free(&zigzag_outer_config(&[k2, k1])?);
                    let m = 2 * (k1 + k2) + 4;
                    let pa = mixed_pocket_product(&[k1, k2], m)?;
                    let pb = mixed_pocket_product(&[k2, k1], m)?;
                    let sum_a: Rational = (0..m).map(|i| pa.get(i, 0).clone()).sum();
                    let sum_b: Rational = (0..m).map(|i| pb.get(i, 0).clone()).sum();
                    c.check(
                        a == b && sum_a == sum_b,
                        format!("({k1},{k2}) outer={a} ({k2},{k1}) outer={b} product column sums {sum_a} / {sum_b}"),
                    );
                }
            }
        }
        Suite::Lemma2 => {
            let sizes: Vec<usize> = [8, 16, 32, 64].into_iter().filter(|&m| m <= max_n.max(8)).collect();
            for k in 1..=6usize {
                let mut prev: Option<BigUint> = None;
                let mut line = format!("k={k} pockets=4 sums:");
                let mut ok = true;
                for &m in sizes.iter().filter(|&&m| m >= k + 2) {
                    let s = chain_degree_vector(&[k; 4], m)?.vector.sum();
                    ok &= prev.as_ref().is_none_or(|p| *p <= s);
                    let _ = write!(line, " m={m}:{s}");
                    prev = Some(s);
                }
                c.check(ok, line);
            }
            let mut prev: Option<Rational> = None;
            let mut ok = true;
            let mut line = "k=2 certified perron bounds:".to_string();
            for &m in &sizes {
                let cert = perron::perron_lower(&build_pprime(2, m)?, 128)?;
                ok &= prev.as_ref().is_none_or(|p| *p <= cert.lower_bound);
                let _ = write!(line, " m={m}:{}", FloorDecimal::floor_of(&cert.lower_bound, 12));
                prev = Some(cert.lower_bound);
            }
            c.check(ok, line);
        }
        Suite::Primitivity => {
            let top = max_n.clamp(3, 64);
            for k in 1..=6usize {
                for m in [k + 2, 8, 16, 32, 64] {
                    if m > top || m < k + 2 {
                        continue;
                    }
                    let p = is_primitive(&build_pprime(k, m)?)?;
                    let ok = p.primitive && p.exponent.is_some_and(|e| e <= m as u64);
                    c.check(ok, format!("k={k} m={m} exponent={:?}", p.exponent));
                }
            }
        }
    }
    Ok(SuiteReport {
        suite: suite.name(),
        passed: c.passed,
        lines: c.lines,
    })
}

#[derive(Clone, Debug)]
pub struct Table1Column {
    pub census: CoverageCensus,
    pub inner: InnerBoundResult,
    pub total: Option<BoundReport>,
}

#[derive(Clone, Debug)]
pub struct Table1 {
    pub columns: Vec<Table1Column>,
}

/// Census counts and inner bounds for each `k`, and total bounds when `size` is given.
pub fn cmd_table1(ks: &[usize], size: Option<usize>, digits: u32) -> Result<Table1> {
    if ks.is_empty() {
        return Err(CliError::Usage("empty k range".into()));
    }
    let mut columns = Vec::new();
    for &k in ks {
        if !(2..=6).contains(&k) {
            return Err(CliError::Usage(format!("table covers 2 <= k <= 6, got {k}")));
        }
        let census = coverage_census(k)?;
        let inner = inner::maximize(&census, INNER_TOLERANCE)?;
        let total = size.map(|m| cmd_total(k, m, digits)).transpose()?;
        columns.push(Table1Column { census, inner, total });
    }
    Ok(Table1 { columns })
}

impl Table1 {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:>8}", "t");
        for c in &self.columns {
            let _ = write!(s, "{:>14}", format!("Z{}", c.census.k));
        }
        s.push('\n');
        let tmax = self.columns.iter().map(|c| c.census.k).max().unwrap_or(0);
        for t in 1..=tmax {
            let _ = write!(s, "{t:>8}");
            for c in &self.columns {
                let cell = if t <= c.census.k { c.census.counts[t].to_string() } else { "-".into() };
                let _ = write!(s, "{cell:>14}");
            }
            s.push('\n');
        }
        let _ = write!(s, "{:>8}", "inner");
        for c in &self.columns {
            let _ = write!(s, "{:>14}", c.inner.base.to_string());
        }
        s.push('\n');
        if self.columns.iter().any(|c| c.total.is_some()) {
            let _ = write!(s, "{:>8}", "total");
            for c in &self.columns {
                let cell = c
                    .total
                    .as_ref()
                    .map_or("-".to_string(), |r| r.total_base.truncate_to(10).to_string());
                let _ = write!(s, "{cell:>14}");
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct Col<'a> {
            k: usize,
            census: &'a CoverageCensus,
            inner: &'a InnerBoundResult,
            #[serde(skip_serializing_if = "Option::is_none")]
            total_base: Option<String>,
        }
        let cols: Vec<Col> = self
            .columns
            .iter()
            .map(|c| Col {
                k: c.census.k,
                census: &c.census,
                inner: &c.inner,
                total_base: c.total.as_ref().map(|r| r.total_base.to_string()),
            })
            .collect();
        serde_json::to_string_pretty(&cols).expect("table serializes")
    }
}

/// Parses `2..6`, `2..=6`, `3` or `2,4,5`.
pub fn parse_ks(s: &str) -> Result<Vec<usize>> {
    let bad = || CliError::Usage(format!("bad k range '{s}'"));
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}
