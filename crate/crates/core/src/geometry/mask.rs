use std::sync::Arc;

use crate::error::{Error, Result};

use super::grid::GridSpec;
use super::region::Region;

/// Indicator of the interior degrees of freedom of a discretised open set.
///
/// The outermost layer of the grid window is never interior.
#[derive(Clone, Debug)]
pub struct DomainMask {
    grid: Arc<GridSpec>,
    interior: Vec<bool>,
    label: String,
}

impl PartialEq for DomainMask {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_lattice(&other.grid) && self.interior == other.interior
    }
}

/// Rasterises `region` on `grid`, keeping points strictly inside both region and window.
pub fn build_mask(region: &Region, grid: &Arc<GridSpec>) -> Result<DomainMask> {
    region.validate(grid.dim())?;
    let label = match region {
        Region::Rect { .. } => "rect",
        Region::Ball { .. } => "ball",
        Region::Annulus { .. } => "annulus",
        Region::Sector { .. } => "sector",
        Region::Halfstrip { .. } => "halfstrip",
        Region::Union { .. } => "union",
        Region::Inter { .. } => "inter",
        Region::Diff { .. } => "diff",
        Region::Complement { .. } => "complement",
    };
    let d = grid.dim();
    let mask = DomainMask::from_fn(grid, label, |_, x| region.contains(&x[..d]));
    if mask.count() == 0 {
        return Err(Error::EmptyMask(format!("region '{label}' has no interior grid points")));
    }
    Ok(mask)
}

/// True iff no grid point is interior to both masks.
pub fn disjoint(a: &DomainMask, b: &DomainMask) -> Result<bool> {
    a.check_grid(b)?;
    Ok(!a.interior.iter().zip(&b.interior).any(|(x, y)| *x && *y))
}

/// Cell `i` (1-based) of the round-robin ring partition: the union of annuli
/// `A_{r_j, R_j}` with `j = i (mod k)`, intersected with `base`.
pub fn ring_union_mask(base: &DomainMask, radii: &[(f64, f64)], k: usize, i: usize) -> Result<DomainMask> {
    if k == 0 || i == 0 || i > k {
        return Err(Error::Precondition(format!("ring index {i} out of range 1..={k}")));
    }
    check_interleaved(radii)?;
    let grid = base.grid().clone();
    let d = grid.dim();
    let own: Vec<(f64, f64)> = radii
        .iter()
        .enumerate()
        .filter(|(j, _)| j % k == i - 1)
        .map(|(_, &r)| r)
        .collect();
    let mut mask = DomainMask::from_fn(&grid, format!("ring{i}of{k}"), |idx, x| {
        if !base.interior[idx] {
            return false;
        }
        let r = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        own.iter().any(|&(lo, hi)| lo < r && r < hi)
    });
    mask.label = format!("ring{i}of{k}");
    Ok(mask)
}

/// Checks `r_1 < R_1 < r_2 < R_2 < ...` with `r_1 >= 0`.
pub fn check_interleaved(radii: &[(f64, f64)]) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for (j, &(r, big)) in radii.iter().enumerate() {
        if !(r >= 0.0 && r > prev && big > r) {
            return Err(Error::BadRadii(format!("ring {} = ({r}, {big}) after outer radius {prev}", j + 1)));
        }
        prev = big;
    }
    Ok(())
}

impl DomainMask {
    /// Mask of window-interior points where `f(index, coordinates)` holds.
    pub fn from_fn(
        grid: &Arc<GridSpec>,
        label: impl Into<String>,
        mut f: impl FnMut(usize, [f64; 3]) -> bool,
    ) -> Self {
        let interior = (0..grid.len())
            .map(|idx| !grid.is_boundary(idx) && f(idx, grid.coord(idx)))
            .collect();
        Self { grid: grid.clone(), interior, label: label.into() }
    }

    /// Mask from an explicit indicator; boundary-layer entries are cleared.
    pub fn from_indicator(grid: &Arc<GridSpec>, label: impl Into<String>, interior: Vec<bool>) -> Result<Self> {
        if interior.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_fn(grid, label, |idx, _| interior[idx]))
    }

    /// Every window-interior point.
    pub fn full(grid: &Arc<GridSpec>) -> Self {
        Self::from_fn(grid, "window", |_, _| true)
    }

    pub fn empty(grid: &Arc<GridSpec>) -> Self {
        Self { grid: grid.clone(), interior: vec![false; grid.len()], label: "empty".into() }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn interior(&self) -> &[bool] {
        &self.interior
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.interior[idx]
    }

    pub fn count(&self) -> usize {
        self.interior.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.interior.iter().any(|&b| b)
    }

    /// Flat indices of interior points in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        self.interior.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    pub fn check_grid(&self, other: &DomainMask) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_lattice(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn zip_with(&self, other: &DomainMask, label: String, f: impl Fn(bool, bool) -> bool) -> Result<DomainMask> {
        self.check_grid(other)?;
        let interior = self.interior.iter().zip(&other.interior).map(|(&a, &b)| f(a, b)).collect();
        Ok(DomainMask { grid: self.grid.clone(), interior, label })
    }

    pub fn union(&self, other: &DomainMask) -> Result<DomainMask> {
        self.zip_with(other, format!("{}|{}", self.label, other.label), |a, b| a || b)
    }

    pub fn intersection(&self, other: &DomainMask) -> Result<DomainMask> {
        self.zip_with(other, format!("{}&{}", self.label, other.label), |a, b| a && b)
    }

    pub fn difference(&self, other: &DomainMask) -> Result<DomainMask> {
        self.zip_with(other, format!("{}-{}", self.label, other.label), |a, b| a && !b)
    }

    pub fn is_subset_of(&self, other: &DomainMask) -> Result<bool> {
        self.check_grid(other)?;
        Ok(self.interior.iter().zip(&other.interior).all(|(&a, &b)| !a || b))
    }

    /// Removes the closed ball `|x| <= r` (centred at the origin).
    pub fn minus_closed_ball(&self, r: f64) -> DomainMask {
        let d = self.grid.dim();
        let mut out = DomainMask::from_fn(&self.grid, "", |idx, x| {
            self.interior[idx] && x[..d].iter().map(|v| v * v).sum::<f64>() > r * r
        });
        out.label = format!("{}\\B{r}", self.label);
        out
    }

    /// Keeps only points with `r < |x| < big`.
    pub fn within_annulus(&self, r: f64, big: f64) -> DomainMask {
        let d = self.grid.dim();
        let mut out = DomainMask::from_fn(&self.grid, "", |idx, x| {
            let s = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
            self.interior[idx] && r < s && s < big
        });
        out.label = format!("{}&A({r},{big})", self.label);
        out
    }

    /// Grows the mask by `layers` lattice steps (axis neighbours), clipped to `within`.
    pub fn dilate(&self, layers: usize, within: &DomainMask) -> Result<DomainMask> {
        self.check_grid(within)?;
        let mut cur = self.interior.clone();
        let mut frontier: Vec<usize> = self.indices();
        for _ in 0..layers {
            let mut next = Vec::new();
            for &idx in &frontier {
                self.grid.for_each_neighbor(idx, |j| {
                    if !cur[j] && within.interior[j] {
                        cur[j] = true;
                        next.push(j);
                    }
                });
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(DomainMask { grid: self.grid.clone(), interior: cur, label: format!("{}+{layers}", self.label) })
    }

    /// Connected components (axis adjacency), each as a mask.
    pub fn components(&self) -> Vec<DomainMask> {
        let mut seen = vec![false; self.interior.len()];
        let mut out = Vec::new();
        for start in self.indices() {
            if seen[start] {
                continue;
            }
            let mut comp = vec![false; self.interior.len()];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                comp[i] = true;
                self.grid.for_each_neighbor(i, |j| {
                    if self.interior[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                });
            }
            out.push(DomainMask { grid: self.grid.clone(), interior: comp, label: format!("{}#{}", self.label, out.len()) });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square_grid(h: f64) -> Arc<GridSpec> {
        Arc::new(GridSpec::new(&[0.0, 0.0], &[PI, PI], h).unwrap())
    }

    #[test]
    fn square_has_nine_interior_points() {
        let g = square_grid(PI / 4.0);
        let m = build_mask(&Region::rect(&[0.0, 0.0], &[PI, PI]), &g).unwrap();
        assert_eq!(m.count(), 9);
    }

    #[test]
    fn zero_ball_is_empty() {
        let g = square_grid(PI / 4.0);
        let err = build_mask(&Region::ball(&[1.0, 1.0], 0.0), &g).unwrap_err();
        assert!(matches!(err, Error::EmptyMask(_)));
    }

    #[test]
    fn self_overlap_and_adjacent_rects() {
        let g = square_grid(PI / 8.0);
        let left = build_mask(&Region::rect(&[0.0, 0.0], &[PI / 2.0, PI]), &g).unwrap();
        let right = build_mask(&Region::rect(&[PI / 2.0, 0.0], &[PI, PI]), &g).unwrap();
        assert!(disjoint(&left, &right).unwrap());
        assert!(!disjoint(&left, &left).unwrap());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = DomainMask::full(&square_grid(PI / 4.0));
        let b = DomainMask::full(&square_grid(PI / 8.0));
        assert!(matches!(disjoint(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn bad_radii_rejected() {
        let g = Arc::new(GridSpec::new(&[-5.0, -5.0], &[5.0, 5.0], 0.5).unwrap());
        let base = DomainMask::full(&g);
        assert!(matches!(ring_union_mask(&base, &[(1.0, 3.0), (2.0, 4.0)], 2, 1), Err(Error::BadRadii(_))));
    }

    #[test]
    fn dilate_grows_by_one_layer() {
        let g = Arc::new(GridSpec::from_counts(&[0.0], 1.0, &[11]).unwrap());
        let full = DomainMask::full(&g);
        let seed = DomainMask::from_fn(&g, "pt", |i, _| i == 5);
        assert_eq!(seed.dilate(2, &full).unwrap().count(), 5);
    }
}
