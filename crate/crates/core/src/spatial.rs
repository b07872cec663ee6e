//! Spatial sites, maximin ordering, predecessor nearest-neighbor search, and
//! correlation kernels.
//!
//! The maximin ordering and the per-site predecessor neighbor sets are the
//! combinatorial backbone of the sparse GP factorization: every downstream
//! coefficient is tied to these index sets, so both searches are exact and
//! fully deterministic (ties broken by smallest original site index).

use crate::error::{Error, Result};

/// A fixed set of `n` spatial sites in `d` dimensions, stored row-major.
#[derive(Debug, Clone)]
pub struct LocationSet {
    coords: Vec<f64>,
    n: usize,
    d: usize,
}

impl LocationSet {
    /// Builds a location set from row-major coordinates.
    ///
    /// Rejects empty input, non-finite coordinates, and exactly duplicated
    /// rows (duplicates would make downstream conditional variances zero).
    pub fn new(coords: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptyLocationSet);
        }
        if coords.len() != n * d {
            return Err(Error::LengthMismatch {
                expected: n * d,
                found: coords.len(),
            });
        }
        for (row, chunk) in coords.chunks_exact(d).enumerate() {
            if chunk.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCoordinate { row });
            }
        }
        // Exact duplicate detection via a lexicographic sort of row indices.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            coords[a * d..(a + 1) * d]
                .partial_cmp(&coords[b * d..(b + 1) * d])
                .expect("finite coordinates are totally ordered")
        });
        for w in order.windows(2) {
            let (a, b) = (w[0], w[1]);
            if coords[a * d..(a + 1) * d] == coords[b * d..(b + 1) * d] {
                return Err(Error::DuplicateLocation {
                    first: a.min(b),
                    second: a.max(b),
                });
            }
        }
        Ok(Self { coords, n, d })
    }

    /// Builds a 2-d location set from `(x, y)` pairs.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * 2);
        for &(x, y) in points {
            coords.push(x);
            coords.push(y);
        }
        Self::new(coords, points.len(), 2)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Coordinates of site `i`.
    pub fn site(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Squared Euclidean distance; comparisons throughout use squared distances
/// so that the brute-force oracles and the production paths see identical
/// floating-point values.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean distance between two points.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// A permutation of the sites: `perm[position] = original site index`.
#[derive(Debug, Clone)]
pub struct SiteOrdering {
    perm: Vec<usize>,
}

impl SiteOrdering {
    /// Validates that `perm` is a bijection on `0..n`.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidOrdering(format!(
                    "index {p} repeated or out of range for n={n}"
                )));
            }
            seen[p] = true;
        }
        Ok(Self { perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Original site index at ordered position `pos`.
    pub fn site_at(&self, pos: usize) -> usize {
        self.perm[pos]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }
}

/// Per ordered position, the (up to `m`) nearest predecessors, as ordered
/// positions strictly below it, sorted by ascending distance.
#[derive(Debug, Clone)]
pub struct NeighborSets {
    sets: Vec<Vec<usize>>,
    m: usize,
}

impl NeighborSets {
    pub fn budget(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Neighbor list (ordered positions) for ordered position `pos`.
    pub fn set(&self, pos: usize) -> &[usize] {
        &self.sets[pos]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }
}

/// Supported correlation kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Exponential,
}

/// A stationary correlation kernel with a positive decay parameter.
#[derive(Debug, Clone, Copy)]
pub struct Kernel {
    family: KernelFamily,
    decay: f64,
}

impl Kernel {
    pub fn exponential(decay: f64) -> Result<Self> {
        if !(decay > 0.0) || !decay.is_finite() {
            return Err(Error::InvalidDecay(decay));
        }
        Ok(Self {
            family: KernelFamily::Exponential,
            decay,
        })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// Correlation between two points; 1 at zero distance, strictly
    /// decreasing in distance.
    pub fn correlation(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.family {
            KernelFamily::Exponential => (-self.decay * dist(a, b)).exp(),
        }
    }
}

/// Greedy maximin ordering of the sites.
///
/// The first site is the one nearest the coordinate centroid; each
/// subsequent site maximizes its minimum distance to all previously ordered
/// sites. Ties are broken by the smallest original index.
pub fn maximin_order(locs: &LocationSet) -> Result<SiteOrdering> {
    let n = locs.len();
    if n == 0 {
        return Err(Error::EmptyLocationSet);
    }
    let d = locs.dim();

    let mut centroid = vec![0.0; d];
    for i in 0..n {
        for (c, v) in centroid.iter_mut().zip(locs.site(i)) {
            *c += v;
        }
    }
    for c in centroid.iter_mut() {
        *c /= n as f64;
    }

    let mut first = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let d2 = dist2(locs.site(i), &centroid);
        if d2 < best {
            best = d2;
            first = i;
        }
    }

    let mut perm = Vec::with_capacity(n);
    perm.push(first);
    // min_d2[i] = squared distance from site i to the closest selected site.
    let mut min_d2 = vec![f64::INFINITY; n];
    min_d2[first] = f64::NEG_INFINITY;
    for i in 0..n {
        if i != first {
            min_d2[i] = dist2(locs.site(i), locs.site(first));
        }
    }

    while perm.len() < n {
        let mut next = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            if min_d2[i] > best {
                best = min_d2[i];
                next = i;
            }
        }
        perm.push(next);
        min_d2[next] = f64::NEG_INFINITY;
        for i in 0..n {
            if min_d2[i] != f64::NEG_INFINITY {
                let d2 = dist2(locs.site(i), locs.site(next));
                if d2 < min_d2[i] {
                    min_d2[i] = d2;
                }
            }
        }
    }

    SiteOrdering::new(perm)
}

/// Exact predecessor nearest-neighbor sets under the given ordering.
///
/// For each ordered position `i` this returns the `min(i, m)` nearest
/// predecessors (positions `< i`), sorted by ascending distance, with
/// distance ties broken by smallest original site index. The search is a
/// direct scan; any acceleration structure must reproduce these sets
/// exactly, so none is used.
pub fn predecessor_neighbors(
    locs: &LocationSet,
    ord: &SiteOrdering,
    m: usize,
) -> Result<NeighborSets> {
    if m == 0 {
        return Err(Error::InvalidNeighborBudget { got: 0, max: 20 });
    }
    if ord.len() != locs.len() {
        return Err(Error::LengthMismatch {
            expected: locs.len(),
            found: ord.len(),
        });
    }
    let n = locs.len();
    let mut sets = Vec::with_capacity(n);
    let mut scratch: Vec<(f64, usize, usize)> = Vec::with_capacity(n);
    for pos in 0..n {
        let here = locs.site(ord.site_at(pos));
        scratch.clear();
        for prev in 0..pos {
            let site = ord.site_at(prev);
            scratch.push((dist2(locs.site(site), here), site, prev));
        }
        let keep = m.min(pos);
        if keep > 0 && keep < scratch.len() {
            scratch.select_nth_unstable_by(keep - 1, |a, b| {
                (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap()
            });
            scratch.truncate(keep);
        }
        scratch.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        sets.push(scratch.iter().map(|&(_, _, prev)| prev).collect());
    }
    Ok(NeighborSets { sets, m })
}
