use num_bigint::BigUint;

use super::PointConfig;
use crate::error::{Error, Result};
use crate::linalg::DegreeVector;

/// Maps a crossing-free edge subset to a histogram bucket.
pub trait Statistic: Sync {
    fn buckets(&self) -> usize;
    fn key(&self, chosen: u128) -> usize;
}

struct Total;

impl Statistic for Total {
    fn buckets(&self) -> usize {
        1
    }
    fn key(&self, _: u128) -> usize {
        0
    }
}

struct RootDegree {
    incident: u128,
    buckets: usize,
}

impl Statistic for RootDegree {
    fn buckets(&self) -> usize {
        self.buckets
    }
    fn key(&self, chosen: u128) -> usize {
        (chosen & self.incident).count_ones() as usize
    }
}

const PARALLEL_DEPTH: usize = 8;

fn walk<S: Statistic>(
    conflicts: &[u128],
    stat: &S,
    i: usize,
    chosen: u128,
    forbidden: u128,
    hist: &mut [u128],
) {
    if i == conflicts.len() {
        hist[stat.key(chosen)] += 1;
        return;
    }
    let bit = 1u128 << i;
    let can_take = forbidden & bit == 0;
    if i < PARALLEL_DEPTH && can_take {
        let (mut a, mut b) = (vec![0u128; hist.len()], vec![0u128; hist.len()]);
        rayon::join(
            || walk(conflicts, stat, i + 1, chosen, forbidden, &mut a),
            || walk(conflicts, stat, i + 1, chosen | bit, forbidden | conflicts[i], &mut b),
        );
        for (h, (x, y)) in hist.iter_mut().zip(a.iter().zip(&b)) {
            *h += x + y;
        }
        return;
    }
    walk(conflicts, stat, i + 1, chosen, forbidden, hist);
    if can_take {
        walk(conflicts, stat, i + 1, chosen | bit, forbidden | conflicts[i], hist);
    }
}

/// Counts crossing-free subsets of the admissible edges, bucketed by `stat`.
/// Backtracks over edges in lexicographic order and prunes with precomputed
/// conflict masks; practical up to roughly 14 points.
pub fn histogram<S: Statistic>(cfg: &PointConfig, stat: &S) -> Vec<u128> {
    let mut hist = vec![0u128; stat.buckets()];
    walk(cfg.conflict_masks(), stat, 0, 0, 0, &mut hist);
    hist
}

pub fn count_crossing_free(cfg: &PointConfig) -> u128 {
    histogram(cfg, &Total)[0]
}

/// Crossing-free graphs partitioned by their degree at `root`; dimension `n`.
pub fn degree_partition(cfg: &PointConfig, root: usize) -> Result<DegreeVector> {
    let n = cfg.num_points();
    if root >= n {
        return Err(Error::InvalidArgument(format!("root {root} out of range {n}")));
    }
    let incident = cfg
        .admissible_edges()
        .iter()
        .enumerate()
        .filter(|(_, &(i, j))| i == root || j == root)
        .fold(0u128, |acc, (e, _)| acc | 1u128 << e);
    let hist = histogram(cfg, &RootDegree { incident, buckets: n });
    DegreeVector::new(hist.into_iter().map(BigUint::from).collect())
}

#[cfg(test)]
mod tests {
    use super::super::{convex_config, zigzag_outer_config};
    use super::*;

    #[test]
    fn small_convex() {
        assert_eq!(count_crossing_free(&convex_config(3).unwrap()), 2);
        let c4 = convex_config(4).unwrap();
        assert_eq!(count_crossing_free(&c4), 6);
        assert_eq!(
            degree_partition(&c4, 3).unwrap(),
            DegreeVector::from_u64s(&[2, 3, 1, 0]).unwrap()
        );
        assert_eq!(count_crossing_free(&convex_config(7).unwrap()), 394);
        assert!(degree_partition(&c4, 4).is_err());
    }

    #[test]
    fn single_pocket_has_one_outer_graph() {
        assert_eq!(count_crossing_free(&zigzag_outer_config(&[2]).unwrap()), 1);
    }
}
