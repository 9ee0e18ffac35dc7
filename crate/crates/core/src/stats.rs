//! Degree distribution, degree correlations and distance statistics, all in
//! exact rational arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCorrelationReport {
    /// Number of vertices of each degree.
    pub histogram: BTreeMap<usize, usize>,
    /// Fraction of vertices with degree at least `d`.
    pub cumulative: BTreeMap<usize, BigRational>,
    /// Total neighbour degree over total degree, per degree class.
    pub knn: BTreeMap<usize, BigRational>,
    /// Degree Pearson coefficient; `None` when it is 0/0.
    pub pearson: Option<BigRational>,
}

fn int(x: usize) -> BigInt {
    BigInt::from(x)
}

pub fn degree_stats(g: &Graph) -> Result<DegreeCorrelationReport> {
    if g.n() == 0 {
        return Err(Error::InvalidGraph("degree statistics need at least one vertex".into()));
    }
    let histogram = g.degree_histogram();
    let n = int(g.n());
    let mut cumulative = BTreeMap::new();
    let mut above = 0usize;
    for (&d, &count) in histogram.iter().rev() {
        above += count;
        cumulative.insert(d, BigRational::new(int(above), n.clone()));
    }

    let mut neighbour_total: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..g.n() {
        let s: usize = g.neighbors(v).iter().map(|&w| g.degree(w)).sum();
        *neighbour_total.entry(g.degree(v)).or_default() += s;
    }
    let knn = neighbour_total
        .into_iter()
        .filter(|&(d, _)| d > 0)
        .map(|(d, s)| (d, BigRational::new(int(s), int(d * histogram[&d]))))
        .collect();

    Ok(DegreeCorrelationReport {
        histogram,
        cumulative,
        knn,
        pearson: pearson(g),
    })
}

/// `r = (E·Σ jk − (Σ (j+k)/2)²) / (E·Σ (j²+k²)/2 − (Σ (j+k)/2)²)` over edges
/// with endpoint degrees `j`, `k`. Sums are kept doubled to stay integral.
fn pearson(g: &Graph) -> Option<BigRational> {
    let m = int(g.edge_count());
    let (mut prod, mut sum, mut sq) = (BigInt::zero(), BigInt::zero(), BigInt::zero());
    for e in g.edges() {
        let (j, k) = (int(g.degree(e.u)), int(g.degree(e.v)));
        prod += &j * &k;
        sum += &j + &k;
        sq += &j * &j + &k * &k;
    }
    // scale numerator and denominator by 4
    let s2 = &sum * &sum;
    let num: BigInt = &m * prod * 4 - &s2;
    let den: BigInt = &m * sq * 2 - &s2;
    if den.is_zero() {
        None
    } else {
        Some(BigRational::new(num, den))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceStats {
    /// Mean distance over unordered pairs of distinct vertices.
    pub average: BigRational,
    pub diameter: u32,
    /// `histogram[d]` is the number of unordered pairs at distance `d`.
    pub histogram: Vec<u64>,
    /// Hex SHA-256 of the sorted distance multiset.
    pub multiset_digest: String,
}

/// All-pairs BFS, one source per task.
pub fn distance_stats(g: &Graph) -> Result<DistanceStats> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Domain("average distance needs at least two vertices".into()));
    }
    let per_source: Vec<Option<Vec<u64>>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let dist = g.bfs_distances(s);
            let mut h = Vec::new();
            for d in dist.iter().skip(s + 1) {
                let d = (*d)? as usize;
                if h.len() <= d {
                    h.resize(d + 1, 0);
                }
                h[d] += 1;
            }
            if dist[..s].iter().any(Option::is_none) {
                return None;
            }
            Some(h)
        })
        .collect();
    let mut histogram: Vec<u64> = Vec::new();
    for h in per_source {
        let h = h.ok_or(Error::Disconnected)?;
        if histogram.len() < h.len() {
            histogram.resize(h.len(), 0);
        }
        for (d, c) in h.into_iter().enumerate() {
            histogram[d] += c;
        }
    }
    let total: BigInt = histogram
        .iter()
        .enumerate()
        .map(|(d, &c)| BigInt::from(d) * c)
        .sum();
    let pairs = int(n) * int(n - 1) / 2;
    let mut hasher = Sha256::new();
    for (d, &c) in histogram.iter().enumerate() {
        if c > 0 {
            hasher.update(format!("{d}:{c}\n").as_bytes());
        }
    }
    Ok(DistanceStats {
        average: BigRational::new(total, pairs),
        diameter: (histogram.len() - 1) as u32,
        multiset_digest: hex::encode(hasher.finalize()),
        histogram,
    })
}
