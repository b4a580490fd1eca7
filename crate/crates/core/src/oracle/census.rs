use std::collections::BTreeMap;

use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};

use super::enumerate::{histogram, Statistic};
use super::{pocket_config, PointConfig};
use crate::error::{Error, Result};

/// Counts `p_t` of pocket-internal crossing-free graphs covering exactly `t`
/// inner vertices, for `t = 0..=k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageCensus {
    pub k: usize,
    pub counts: Vec<u64>,
}

impl CoverageCensus {
    /// Builds a census from `p_1..p_k`; `p_0` is always 1 (the empty graph).
    pub fn from_counts(k: usize, covering: &[u64]) -> Result<Self> {
        if covering.len() != k {
            return Err(Error::DimensionMismatch {
                left: k,
                right: covering.len(),
            });
        }
        if covering.contains(&0) {
            return Err(Error::InvalidArgument("census counts must be positive".into()));
        }
        let mut counts = vec![1];
        counts.extend_from_slice(covering);
        Ok(CoverageCensus { k, counts })
    }

    pub fn get(&self, t: usize) -> u64 {
        self.counts.get(t).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn covering(&self) -> BTreeMap<usize, u64> {
        (1..=self.k).map(|t| (t, self.counts[t])).collect()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("census serializes")
    }
}

struct CountsMap<'a>(&'a CoverageCensus);

impl Serialize for CountsMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.k))?;
        for t in 1..=self.0.k {
            map.serialize_entry(&t.to_string(), &self.0.counts[t])?;
        }
        map.end()
    }
}

/// JSON shape `{"k": 5, "counts": {"1": 5, ...}}`; the empty graph (`t = 0`) is implied.
impl Serialize for CoverageCensus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CoverageCensus", 2)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("counts", &CountsMap(self))?;
        st.end()
    }
}

struct Covered {
    /// Per edge, the inner vertices strictly between its ends.
    cover: Vec<u64>,
    buckets: usize,
}

impl Statistic for Covered {
    fn buckets(&self) -> usize {
        self.buckets
    }
    fn key(&self, chosen: u128) -> usize {
        let mut covered = 0u64;
        let mut bits = chosen;
        while bits != 0 {
            covered |= self.cover[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        covered.count_ones() as usize
    }
}

fn census_of(cfg: &PointConfig, k: usize) -> Vec<u64> {
    let cover = cfg
        .admissible_edges()
        .iter()
        .map(|&(i, j)| (i + 1..j).fold(0u64, |m, v| m | 1 << v))
        .collect();
    histogram(cfg, &Covered { cover, buckets: k + 1 })
        .into_iter()
        .map(|c| c as u64)
        .collect()
}

pub fn coverage_census(k: usize) -> Result<CoverageCensus> {
    if !(1..=8).contains(&k) {
        return Err(Error::InvalidArgument(format!("census supports 1 <= k <= 8, got {k}")));
    }
    let cfg = pocket_config(k)?;
    Ok(CoverageCensus {
        k,
        counts: census_of(&cfg, k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2() {
        let c = coverage_census(2).unwrap();
        assert_eq!(c.counts, vec![1, 2, 3]);
        assert_eq!(c.to_json_string(), r#"{"k":2,"counts":{"1":2,"2":3}}"#);
    }

    #[test]
    fn bounds() {
        assert!(coverage_census(0).is_err());
        assert!(coverage_census(9).is_err());
        assert!(CoverageCensus::from_counts(2, &[2]).is_err());
        assert_eq!(CoverageCensus::from_counts(2, &[2, 3]).unwrap(), coverage_census(2).unwrap());
    }
}
