//! Uniform grid hashing for neighbor queries in low-dimensional projections
//! of the embedding space.
//!
//! Points are keyed by the first few delay coordinates only; a query returns
//! every point whose keyed coordinates all lie within one cell of the query,
//! which is a superset of the true `delta`-ball whenever the cell size is at
//! least `delta`. Circle-valued coordinates wrap modulo 1.
//!
//! Candidate order is deterministic: cells are visited in a fixed geometric
//! order and points within a cell keep insertion order.

use std::collections::HashMap;

/// Key dimensionality cap; higher delay counts are truncated for hashing and
/// confirmed with the exact metric by the caller.
pub const MAX_KEY_DIMS: usize = 4;

#[derive(Debug, Clone)]
pub struct GridHash {
    cell_size: f64,
    dims: usize,
    wrap: bool,
    cells_per_dim: i64,
    buckets: HashMap<[i16; MAX_KEY_DIMS], Vec<u32>>,
}

impl GridHash {
    /// `wrap` marks coordinates as circle-valued on `[0,1)`.
    pub fn new(cell_size: f64, dims: usize, wrap: bool) -> Self {
        assert!(cell_size > 0.0 && cell_size.is_finite());
        assert!(dims >= 1 && dims <= MAX_KEY_DIMS);
        let cells_per_dim = if wrap { ((1.0 / cell_size).floor() as i64).max(1) } else { 0 };
        GridHash { cell_size, dims, wrap, cells_per_dim, buckets: HashMap::new() }
    }

    #[inline]
    fn cell_index(&self, coord: f64) -> i16 {
        let mut c = (coord / self.cell_size).floor() as i64;
        if self.wrap {
            c = c.rem_euclid(self.cells_per_dim);
        }
        c.clamp(i16::MIN as i64, i16::MAX as i64) as i16
    }

    fn key_of(&self, coords: &[f64]) -> [i16; MAX_KEY_DIMS] {
        let mut key = [0i16; MAX_KEY_DIMS];
        for (d, &c) in coords.iter().take(self.dims).enumerate() {
            key[d] = self.cell_index(c);
        }
        key
    }

    pub fn insert(&mut self, coords: &[f64], index: u32) {
        let key = self.key_of(coords);
        self.buckets.entry(key).or_default().push(index);
    }

    /// Append to `out` all candidate indices within one cell of `coords` in
    /// every keyed dimension. Order is deterministic.
    pub fn candidates(&self, coords: &[f64], out: &mut Vec<u32>) {
        let center = self.key_of(coords);
        let mut offsets = [[0i16; 3]; MAX_KEY_DIMS];
        let mut counts = [0usize; MAX_KEY_DIMS];
        for d in 0..self.dims {
            let mut opts: [i16; 3] = [0; 3];
            let mut n = 0;
            for delta in [-1i64, 0, 1] {
                let mut c = center[d] as i64 + delta;
                if self.wrap {
                    c = c.rem_euclid(self.cells_per_dim);
                }
                let c = c.clamp(i16::MIN as i64, i16::MAX as i64) as i16;
                if !opts[..n].contains(&c) {
                    opts[n] = c;
                    n += 1;
                }
            }
            opts[..n].sort_unstable();
            counts[d] = n;
            offsets[d] = opts;
        }
        // Cartesian product over the (up to 3^dims) neighbor cells.
        let mut idx = [0usize; MAX_KEY_DIMS];
        loop {
            let mut key = [0i16; MAX_KEY_DIMS];
            for d in 0..self.dims {
                key[d] = offsets[d][idx[d]];
            }
            if let Some(bucket) = self.buckets.get(&key) {
                out.extend_from_slice(bucket);
            }
            // Advance the mixed-radix counter.
            let mut d = 0;
            loop {
                if d == self.dims {
                    return;
                }
                idx[d] += 1;
                if idx[d] < counts[d] {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_neighbors_across_the_wrap() {
        let mut g = GridHash::new(0.1, 1, true);
        g.insert(&[0.01], 0);
        g.insert(&[0.99], 1);
        g.insert(&[0.50], 2);
        let mut out = Vec::new();
        g.candidates(&[0.005], &mut out);
        assert!(out.contains(&0) && out.contains(&1), "wrap neighbors: {out:?}");
        assert!(!out.contains(&2));
    }

    #[test]
    fn no_wrap_for_planar_coordinates() {
        let mut g = GridHash::new(1.0, 2, false);
        g.insert(&[0.5, 0.5], 0);
        g.insert(&[-0.5, 0.5], 1);
        g.insert(&[10.0, 10.0], 2);
        let mut out = Vec::new();
        g.candidates(&[0.0, 0.0], &mut out);
        assert!(out.contains(&0) && out.contains(&1) && !out.contains(&2));
    }

    #[test]
    fn coarse_wrap_grid_deduplicates_cells() {
        // Two cells per dimension: the +/-1 neighborhood covers everything
        // but must not return duplicates.
        let mut g = GridHash::new(0.5, 1, true);
        for i in 0..4 {
            g.insert(&[i as f64 * 0.25], i);
        }
        let mut out = Vec::new();
        g.candidates(&[0.1], &mut out);
        let mut sorted = out.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), out.len(), "duplicates in {out:?}");
        assert_eq!(sorted.len(), 4);
    }

    #[test]
    fn candidate_superset_of_true_ball() {
        let mut g = GridHash::new(0.05, 2, true);
        let pts: Vec<[f64; 2]> = (0..500)
            .map(|i| {
                let x = (i as f64 * 0.618033988) % 1.0;
                let y = (i as f64 * 0.7320508) % 1.0;
                [x, y]
            })
            .collect();
        for (i, p) in pts.iter().enumerate() {
            g.insert(p, i as u32);
        }
        let q = [0.5, 0.5];
        let mut out = Vec::new();
        g.candidates(&q, &mut out);
        for (i, p) in pts.iter().enumerate() {
            let d0 = (p[0] - q[0]).abs().min(1.0 - (p[0] - q[0]).abs());
            let d1 = (p[1] - q[1]).abs().min(1.0 - (p[1] - q[1]).abs());
            if d0 < 0.05 && d1 < 0.05 {
                assert!(out.contains(&(i as u32)), "missing in-ball point {i}");
            }
        }
    }
}
