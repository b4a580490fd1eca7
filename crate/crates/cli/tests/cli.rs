use std::process::Command;

use crossfree_cli::{cmd_table1, cmd_total, cmd_total_mixed, cmd_verify, compose, Suite};
use crossfree_core::decimal::FloorDecimal;
use crossfree_core::Rational;

fn crossfree(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_crossfree")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn total_is_recomputable_from_components() {
    let r = cmd_total(3, 128, 25).unwrap();
    assert!(r.perron.recheck(&crossfree_core::production::build_pprime(3, 128).unwrap()).unwrap());
    let root = FloorDecimal::floor_root(&r.perron.lower_bound, 4, 25).unwrap();
    assert_eq!(root, r.root);
    // the root is a lower bound, one unit in the last digit away from exceeding it
    let up = root.to_rational() + Rational::new(1.into(), crossfree_core::decimal::pow10(25));
    assert!(root.to_rational().pow(4) <= r.perron.lower_bound);
    assert!(up.pow(4) > r.perron.lower_bound);
    let total = Rational::from_integer(2.into()) * root.to_rational() * &r.inner_base;
    assert_eq!(FloorDecimal::floor_of(&total, 25), r.total_base);
    assert!(r.total_base.to_rational() <= total);
    assert_eq!(r.inner_base, r.inner[0].base_lower);
}

#[test]
fn totals_grow_with_size() {
    let small = cmd_total(2, 64, 20).unwrap();
    let large = cmd_total(2, 256, 20).unwrap();
    assert!(small.total_base.to_rational() < large.total_base.to_rational());
    assert!(large.total_base.to_f64() > 41.7);
}

#[test]
fn mixed_pockets() {
    let r = cmd_total_mixed(&[2, 3], 64, 20).unwrap();
    assert_eq!(r.points_per_period(), 7);
    let swapped = cmd_total_mixed(&[3, 2], 64, 20).unwrap();
    assert_eq!(r.inner_base, swapped.inner_base);
    let (_, total) = compose(&r.perron.lower_bound, 7, &r.inner_base, 20).unwrap();
    assert_eq!(total, r.total_base);
    let single = cmd_total_mixed(&[2], 64, 20).unwrap();
    assert_eq!(single.total_base, cmd_total(2, 64, 20).unwrap().total_base);
    assert!(cmd_total_mixed(&[], 64, 20).is_err());
}

#[test]
fn all_suites_pass() {
    for suite in [Suite::Convex, Suite::Outer, Suite::Census, Suite::Swap, Suite::Lemma2, Suite::Primitivity] {
        let r = cmd_verify(suite, suite.default_max_n()).unwrap();
        assert!(r.passed, "{}: {:?}", r.suite, r.lines);
    }
    let convex = cmd_verify(Suite::Convex, 8).unwrap();
    assert!(convex.lines.iter().any(|l| l.contains("count=394 total=25216")));
    let swap = cmd_verify(Suite::Swap, 3).unwrap();
    assert!(swap.lines.iter().any(|l| l.contains("(2,3)")));
    assert!(cmd_verify(Suite::Convex, 40).is_err());
}

#[test]
fn table_rows() {
    let t = cmd_table1(&[2, 3, 4, 5, 6], None, 20).unwrap();
    let row4: Vec<Option<u64>> = t.columns.iter().map(|c| c.census.counts.get(4).copied()).collect();
    assert_eq!(row4, [None, None, Some(45), Some(121), Some(237)]);
    assert!(t.columns[3].inner.base.to_f64() >= 4.67);
    let text = t.to_text();
    assert!(text.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["4", "-", "-", "45", "121", "237"]));
    let with_total = cmd_table1(&[2], Some(1024), 20).unwrap();
    assert!(with_total.columns[0].total.as_ref().unwrap().total_base.to_f64() >= 41.77);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["total", "--k", "2", "--size", "96", "--precision", "24"];
    let (code, first) = crossfree(&args);
    assert_eq!(code, 0);
    let (_, second) = crossfree(&args);
    assert_eq!(first, second);
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["k"], 2);
    assert_eq!(v["matrix_dim"], 96);
    assert_eq!(v["perron"]["witness_sha256"].as_str().unwrap().len(), 64);
    assert!(v["total_base"].as_str().unwrap().starts_with("4"));
}

#[test]
fn exit_codes() {
    assert_eq!(crossfree(&["verify", "census"]).0, 0);
    assert_eq!(crossfree(&["verify", "bogus"]).0, 2);
    assert_eq!(crossfree(&["total", "--k", "9"]).0, 2);
    assert_eq!(crossfree(&["total", "--k", "2", "--size", "3"]).0, 2);
    assert_eq!(crossfree(&["total"]).0, 2);
    assert_eq!(crossfree(&["table1", "--ks", "1..3"]).0, 2);
    let (code, out) = crossfree(&["table1", "--ks", "2..3", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[1]["census"]["counts"]["3"], 11);
}
