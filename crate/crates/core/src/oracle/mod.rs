//! Brute-force ground truth on small structured point sets.
//!
//! Vertices are labelled `0..n` in chain (or hull) order. The crossing model
//! is combinatorial: two admissible edges cross iff their endpoints strictly
//! interleave. Exact coordinates, when attached, are used only to validate
//! that model.

mod census;
mod enumerate;
pub mod geometry;

use std::cmp::Ordering;

pub use census::{coverage_census, CoverageCensus};
pub use enumerate::{count_crossing_free, degree_partition, histogram, Statistic};
use geometry::{above_line, orientation, segments_cross, Point};

use crate::error::{Error, Result};

pub const MAX_EDGES: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    n: usize,
    edges: Vec<(usize, usize)>,
    conflicts: Vec<u128>,
    /// Closed index ranges `(s, t)` of pockets; inner points are `s+1..t`.
    pockets: Vec<(usize, usize)>,
    coords: Option<Vec<Point>>,
    facing: Option<Vec<Point>>,
}

fn interleave((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

impl PointConfig {
    fn from_edges(n: usize, mut edges: Vec<(usize, usize)>, pockets: Vec<(usize, usize)>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        if edges.len() > MAX_EDGES {
            return Err(Error::TooManyEdges(edges.len()));
        }
        let conflicts = edges
            .iter()
            .map(|&e| {
                edges
                    .iter()
                    .enumerate()
                    .filter(|&(_, &f)| interleave(e, f))
                    .fold(0u128, |acc, (i, _)| acc | (1u128 << i))
            })
            .collect();
        Ok(PointConfig {
            n,
            edges,
            conflicts,
            pockets,
            coords: None,
            facing: None,
        })
    }

    pub fn num_points(&self) -> usize {
        self.n
    }

    /// Admissible edges `(i, j)` with `i < j`, sorted lexicographically.
    pub fn admissible_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_admissible(&self, i: usize, j: usize) -> bool {
        let e = if i < j { (i, j) } else { (j, i) };
        self.edges.binary_search(&e).is_ok()
    }

    pub fn conflict_masks(&self) -> &[u128] {
        &self.conflicts
    }

    /// Unordered crossing pairs as indices into [`Self::admissible_edges`].
    pub fn crossing_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &mask) in self.conflicts.iter().enumerate() {
            for j in i + 1..self.edges.len() {
                if mask >> j & 1 == 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn crosses(&self, e: (usize, usize), f: (usize, usize)) -> bool {
        let idx = |x: (usize, usize)| self.edges.binary_search(&x).ok();
        match (idx(e), idx(f)) {
            (Some(a), Some(b)) => self.conflicts[a] >> b & 1 == 1,
            _ => false,
        }
    }

    pub fn pockets(&self) -> &[(usize, usize)] {
        &self.pockets
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    pub fn with_coords(mut self, coords: Vec<Point>) -> Result<Self> {
        if coords.len() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: coords.len(),
            });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    /// Attaches the opposite chain so mutual visibility can be checked.
    pub fn with_facing(mut self, facing: Vec<Point>) -> Self {
        self.facing = Some(facing);
        self
    }
}

/// `n` points in convex position; every pair except `i, i+1` is admissible.
pub fn convex_config(n: usize) -> Result<PointConfig> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("convex position needs n >= 3, got {n}")));
    }
    let edges = (0..n)
        .flat_map(|i| (i + 2..n).map(move |j| (i, j)))
        .collect();
    PointConfig::from_edges(n, edges, Vec::new())
}

/// A single pocket: `k + 2` points `v_0 .. v_{k+1}` with all non-consecutive pairs admissible.
pub fn pocket_config(k: usize) -> Result<PointConfig> {
    if k == 0 {
        return Err(Error::InvalidArgument("pocket needs k >= 1".into()));
    }
    let mut cfg = convex_config(k + 2)?;
    cfg.pockets = vec![(0, k + 1)];
    Ok(cfg)
}

/// Outer part of a chain of pockets; edges inside one pocket belong to the
/// inner part and are excluded.
pub fn zigzag_outer_config(pocket_sizes: &[usize]) -> Result<PointConfig> {
    if pocket_sizes.is_empty() {
        return Err(Error::InvalidArgument("empty pocket sequence".into()));
    }
    if pocket_sizes.contains(&0) {
        return Err(Error::InvalidArgument("pocket sizes must be at least 1".into()));
    }
    let mut pockets = Vec::with_capacity(pocket_sizes.len());
    let mut start = 0;
    for &k in pocket_sizes {
        pockets.push((start, start + k + 1));
        start += k + 1;
    }
    let n = start + 1;
    let same_pocket = |i: usize, j: usize| pockets.iter().any(|&(s, t)| s <= i && j <= t);
    let edges = (0..n)
        .flat_map(|i| (i + 2..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !same_pocket(i, j))
        .collect();
    PointConfig::from_edges(n, edges, pockets)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoordinateViolation {
    /// Declared and geometric crossing disagree for two admissible edges.
    Crossing {
        e: (usize, usize),
        f: (usize, usize),
        declared: bool,
    },
    /// An inner pocket point is not strictly below its chord or not between its ends.
    NotInPocket { pocket: (usize, usize), point: usize },
    /// An inner pocket point is not above a line through a pocket end and another point.
    NotFlat {
        pocket: (usize, usize),
        point: usize,
        other: usize,
    },
    /// A segment between the two chains crosses a chain edge.
    Blocked { lower: usize, upper: usize },
    Degenerate(String),
}

/// Lists every way the attached coordinates contradict the combinatorial model.
pub fn coordinate_violations(cfg: &PointConfig) -> Result<Vec<CoordinateViolation>> {
    let pts = cfg.coords.as_ref().ok_or(Error::MissingCoordinates)?;
    let mut out = Vec::new();
    for (a, &e) in cfg.edges.iter().enumerate() {
        for &f in &cfg.edges[a + 1..] {
            let geometric = segments_cross(&pts[e.0], &pts[e.1], &pts[f.0], &pts[f.1]);
            let declared = cfg.crosses(e, f);
            if geometric != declared {
                out.push(CoordinateViolation::Crossing { e, f, declared });
            }
        }
    }
    for &(s, t) in &cfg.pockets {
        let (ps, pt) = (&pts[s], &pts[t]);
        if ps.x >= pt.x {
            out.push(CoordinateViolation::Degenerate(format!(
                "pocket ({s}, {t}) is not left to right"
            )));
            continue;
        }
        for u in s + 1..t {
            let pu = &pts[u];
            if orientation(ps, pt, pu) != Ordering::Less || pu.x <= ps.x || pu.x >= pt.x {
                out.push(CoordinateViolation::NotInPocket { pocket: (s, t), point: u });
            }
            for (w, pw) in pts.iter().enumerate() {
                if (s..=t).contains(&w) || orientation(ps, pt, pw) != Ordering::Less {
                    continue;
                }
                let end = match (pw.x > pt.x, pw.x < ps.x) {
                    (true, _) => ps,
                    (_, true) => pt,
                    _ => continue,
                };
                if above_line(pu, end, pw) != Some(true) {
                    out.push(CoordinateViolation::NotFlat {
                        pocket: (s, t),
                        point: u,
                        other: w,
                    });
                }
            }
        }
    }
    if let Some(upper) = &cfg.facing {
        let chain_edges = |c: &[Point]| {
            c.windows(2)
                .map(|w| (w[0].clone(), w[1].clone()))
                .collect::<Vec<_>>()
        };
        let mut walls = chain_edges(pts);
        walls.extend(chain_edges(upper));
        for (i, p) in pts.iter().enumerate() {
            for (j, q) in upper.iter().enumerate() {
                let blocked = walls.iter().any(|(a, b)| {
                    a != p && b != p && a != q && b != q && segments_cross(p, q, a, b)
                });
                if blocked {
                    out.push(CoordinateViolation::Blocked { lower: i, upper: j });
                }
            }
        }
    }
    Ok(out)
}

/// True iff the coordinates confirm the declared crossings, pocket flatness
/// and, when an opposite chain is attached, mutual visibility.
pub fn verify_coordinates(cfg: &PointConfig) -> Result<bool> {
    Ok(coordinate_violations(cfg)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_edges() {
        let c4 = convex_config(4).unwrap();
        assert_eq!(c4.admissible_edges(), &[(0, 2), (0, 3), (1, 3)]);
        assert_eq!(c4.crossing_pairs(), vec![(0, 2)]);
        assert_eq!(convex_config(7).unwrap().admissible_edges().len(), 15);
        assert!(convex_config(2).is_err());
    }

    #[test]
    fn pentagon_crossings_form_a_cycle() {
        let c5 = convex_config(5).unwrap();
        let diagonals: Vec<usize> = (0..c5.admissible_edges().len())
            .filter(|&i| c5.admissible_edges()[i] != (0, 4))
            .collect();
        assert_eq!(diagonals.len(), 5);
        for &d in &diagonals {
            let deg = c5.conflict_masks()[d].count_ones();
            assert_eq!(deg, 2);
        }
        assert_eq!(c5.crossing_pairs().len(), 5);
    }

    #[test]
    fn pockets() {
        assert_eq!(pocket_config(2).unwrap().admissible_edges(), &[(0, 2), (0, 3), (1, 3)]);
        assert_eq!(pocket_config(3).unwrap().admissible_edges().len(), 6);
        assert_eq!(pocket_config(5).unwrap().admissible_edges().len(), 15);
        let z = zigzag_outer_config(&[2, 2]).unwrap();
        assert!(z.is_admissible(0, 4));
        assert!(!z.is_admissible(1, 3));
        assert!(!z.is_admissible(3, 5));
        assert!(zigzag_outer_config(&[2]).unwrap().admissible_edges().is_empty());
        assert!(zigzag_outer_config(&[]).is_err());
    }

    #[test]
    fn missing_coordinates() {
        let c = convex_config(4).unwrap();
        assert_eq!(verify_coordinates(&c), Err(Error::MissingCoordinates));
        assert!(c.with_coords(vec![]).is_err());
    }
}
