use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension the data layout can hold. Operators currently support d = 1, 2.
pub const MAX_DIM: usize = 3;

/// A uniform Cartesian lattice covering a rectangular truncation window.
///
/// Points are stored with the last axis varying fastest, so the flat index of
/// `(i0, i1)` in 2-D is `i0 * n1 + i1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    origin: [f64; MAX_DIM],
    h: f64,
    counts: [usize; MAX_DIM],
}

impl GridSpec {
    /// Grid over the window `[lo, hi]` (per axis) with spacing `h`.
    ///
    /// Every window extent must be an integer multiple of `h`.
    pub fn new(lo: &[f64], hi: &[f64], h: f64) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::InvalidGrid("lo and hi have different lengths".into()));
        }
        let mut counts = Vec::with_capacity(lo.len());
        for (a, (&l, &u)) in lo.iter().zip(hi).enumerate() {
            if !(u > l) {
                return Err(Error::InvalidGrid(format!("axis {a}: empty window [{l}, {u}]")));
            }
            let steps = (u - l) / h;
            let rounded = steps.round();
            if (steps - rounded).abs() > 1e-6 * rounded.max(1.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: h = {h} does not divide the window extent {}",
                    u - l
                )));
            }
            counts.push(rounded as usize + 1);
        }
        Self::from_counts(lo, h, &counts)
    }

    /// Grid with `counts[a]` points along axis `a`, starting at `origin`.
    pub fn from_counts(origin: &[f64], h: f64, counts: &[usize]) -> Result<Self> {
        let dim = origin.len();
        if dim == 0 || dim != counts.len() {
            return Err(Error::InvalidGrid("origin and counts must have the same nonzero length".into()));
        }
        if dim > 2 {
            return Err(Error::InvalidGrid(format!("d = {dim} grids are not supported")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if let Some(&n) = counts.iter().find(|&&n| n < 3) {
            return Err(Error::InvalidGrid(format!("need at least 3 points per axis, got {n}")));
        }
        let mut o = [0.0; MAX_DIM];
        let mut c = [1usize; MAX_DIM];
        o[..dim].copy_from_slice(origin);
        c[..dim].copy_from_slice(counts);
        Ok(Self { dim, origin: o, h, counts: c })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim]
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    /// Length of the window along `axis`, `(count - 1) * h`.
    pub fn extent(&self, axis: usize) -> f64 {
        (self.counts[axis] - 1) as f64 * self.h
    }

    pub fn window_lo(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    pub fn window_hi(&self, axis: usize) -> f64 {
        self.origin[axis] + self.extent(axis)
    }

    /// Total number of lattice points, boundary layer included.
    pub fn len(&self) -> usize {
        self.counts[..self.dim].iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.counts[axis + 1..self.dim].iter().product()
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut m = [0usize; MAX_DIM];
        for a in (0..self.dim).rev() {
            m[a] = idx % self.counts[a];
            idx /= self.counts[a];
        }
        m
    }

    pub fn flat_index(&self, m: &[usize]) -> usize {
        let mut idx = 0;
        for a in 0..self.dim {
            idx = idx * self.counts[a] + m[a];
        }
        idx
    }

    pub fn coord(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(idx);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.origin[a] + m[a] as f64 * self.h;
        }
        x
    }

    /// True for points on the outermost layer of the window.
    pub fn is_boundary(&self, idx: usize) -> bool {
        let m = self.multi_index(idx);
        (0..self.dim).any(|a| m[a] == 0 || m[a] + 1 == self.counts[a])
    }

    /// Lattice neighbours of `idx` along each axis (at most `2 d`).
    pub fn for_each_neighbor(&self, idx: usize, mut f: impl FnMut(usize)) {
        let m = self.multi_index(idx);
        for a in 0..self.dim {
            let s = self.stride(a);
            if m[a] > 0 {
                f(idx - s);
            }
            if m[a] + 1 < self.counts[a] {
                f(idx + s);
            }
        }
    }

    /// Radius of the largest origin-centred ball that fits strictly inside the window.
    pub fn inscribed_radius(&self) -> f64 {
        (0..self.dim)
            .map(|a| (-self.window_lo(a)).min(self.window_hi(a)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from the origin to the farthest window corner.
    pub fn circumscribed_radius(&self) -> f64 {
        (0..self.dim)
            .map(|a| {
                let m = self.window_lo(a).abs().max(self.window_hi(a).abs());
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn same_lattice(&self, other: &GridSpec) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn counts_follow_window_and_spacing() {
        let g = GridSpec::new(&[0.0, 0.0], &[PI, PI], PI / 4.0).unwrap();
        assert_eq!(g.counts(), &[5, 5]);
        assert!((g.extent(0) - PI).abs() < 1e-12);
        assert_eq!(g.len(), 25);
    }

    #[test]
    fn rejects_non_dividing_spacing() {
        assert!(matches!(
            GridSpec::new(&[0.0], &[1.0], 0.3),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn rejects_tiny_grids_and_3d() {
        assert!(GridSpec::from_counts(&[0.0], 0.1, &[2]).is_err());
        assert!(GridSpec::from_counts(&[0.0; 3], 0.1, &[4, 4, 4]).is_err());
    }

    #[test]
    fn index_round_trip_and_neighbors() {
        let g = GridSpec::from_counts(&[0.0, 0.0], 1.0, &[4, 6]).unwrap();
        for idx in 0..g.len() {
            let m = g.multi_index(idx);
            assert_eq!(g.flat_index(&m), idx);
        }
        let mut n = Vec::new();
        g.for_each_neighbor(g.flat_index(&[1, 1]), |j| n.push(j));
        assert_eq!(n.len(), 4);
        assert!(g.is_boundary(0));
        assert!(!g.is_boundary(g.flat_index(&[1, 1])));
    }
}
