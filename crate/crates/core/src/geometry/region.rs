use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn infinite() -> f64 {
    f64::INFINITY
}

fn zero() -> f64 {
    0.0
}

/// Expression tree describing an open subset of R^d.
///
/// Membership is strict (open-set semantics): points on a boundary are outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Region {
    /// Open box `lo < x < hi`.
    Rect { lo: Vec<f64>, hi: Vec<f64> },
    /// Open ball `|x - center| < radius`.
    Ball { center: Vec<f64>, radius: f64 },
    /// Open annulus `inner < |x - center| < outer`.
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    /// Planar sector: polar angle in the open range `angles`, radius in `(inner, outer)`.
    Sector {
        center: Vec<f64>,
        angles: [f64; 2],
        #[serde(default = "zero")]
        inner: f64,
        #[serde(default = "infinite", with = "crate::pnorm::float_or_inf")]
        outer: f64,
    },
    /// Half-strip `{x > start, lo < y < lo + width}`; in 1-D the half-line `x > start`.
    Halfstrip {
        start: f64,
        #[serde(default = "zero")]
        lo: f64,
        #[serde(default = "infinite", with = "crate::pnorm::float_or_inf")]
        width: f64,
    },
    Union { items: Vec<Region> },
    Inter { items: Vec<Region> },
    /// `a` minus the closure of `b`.
    Diff { a: Box<Region>, b: Box<Region> },
    /// Everything (within the window) outside the closure of `a`.
    Complement { a: Box<Region> },
}

fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl Region {
    pub fn rect(lo: &[f64], hi: &[f64]) -> Self {
        Region::Rect { lo: lo.to_vec(), hi: hi.to_vec() }
    }

    pub fn ball(center: &[f64], radius: f64) -> Self {
        Region::Ball { center: center.to_vec(), radius }
    }

    pub fn annulus(center: &[f64], inner: f64, outer: f64) -> Self {
        Region::Annulus { center: center.to_vec(), inner, outer }
    }

    pub fn sector(center: &[f64], from: f64, to: f64, inner: f64, outer: f64) -> Self {
        Region::Sector { center: center.to_vec(), angles: [from, to], inner, outer }
    }

    pub fn union(items: Vec<Region>) -> Self {
        Region::Union { items }
    }

    pub fn inter(items: Vec<Region>) -> Self {
        Region::Inter { items }
    }

    pub fn diff(a: Region, b: Region) -> Self {
        Region::Diff { a: Box::new(a), b: Box::new(b) }
    }

    /// Checks parameter ranges and that every primitive matches dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let check_len = |name: &str, v: &[f64]| {
            if v.len() != dim {
                Err(Error::InvalidRegion(format!("{name} has {} coordinates, grid has {dim}", v.len())))
            } else {
                Ok(())
            }
        };
        match self {
            Region::Rect { lo, hi } => {
                check_len("rect.lo", lo)?;
                check_len("rect.hi", hi)?;
                if lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(Error::InvalidRegion("rect has lo > hi".into()));
                }
            }
            Region::Ball { center, radius } => {
                check_len("ball.center", center)?;
                if !(*radius >= 0.0) {
                    return Err(Error::InvalidRegion(format!("negative ball radius {radius}")));
                }
            }
            Region::Annulus { center, inner, outer } => {
                check_len("annulus.center", center)?;
                if !(*inner >= 0.0 && inner < outer) {
                    return Err(Error::InvalidRegion(format!(
                        "annulus needs 0 <= r < R, got r = {inner}, R = {outer}"
                    )));
                }
            }
            Region::Sector { center, angles, inner, outer } => {
                if dim != 2 {
                    return Err(Error::InvalidRegion("sectors need a 2-D grid".into()));
                }
                check_len("sector.center", center)?;
                let span = angles[1] - angles[0];
                if !(span > 0.0 && span <= TAU + 1e-12) {
                    return Err(Error::InvalidRegion(format!("sector angle span {span} not in (0, 2pi]")));
                }
                if !(*inner >= 0.0 && inner < outer) {
                    return Err(Error::InvalidRegion("sector needs 0 <= inner < outer".into()));
                }
            }
            Region::Halfstrip { width, .. } => {
                if dim == 2 && !(*width > 0.0) {
                    return Err(Error::InvalidRegion("halfstrip width must be positive".into()));
                }
            }
            Region::Union { items } | Region::Inter { items } => {
                if items.is_empty() {
                    return Err(Error::InvalidRegion("empty union/intersection".into()));
                }
                for r in items {
                    r.validate(dim)?;
                }
            }
            Region::Diff { a, b } => {
                a.validate(dim)?;
                b.validate(dim)?;
            }
            Region::Complement { a } => a.validate(dim)?,
        }
        Ok(())
    }

    /// Strict (open-set) membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Rect { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| l < v && v < h),
            Region::Ball { center, radius } => dist(x, center) < *radius,
            Region::Annulus { center, inner, outer } => {
                let r = dist(x, center);
                *inner < r && r < *outer
            }
            Region::Sector { center, angles, inner, outer } => {
                let r = dist(x, center);
                if !(*inner < r && r < *outer) {
                    return false;
                }
                let rel = sector_angle(x, center, angles[0]);
                let span = angles[1] - angles[0];
                if span >= TAU {
                    rel > 0.0
                } else {
                    rel > 0.0 && rel < span
                }
            }
            Region::Halfstrip { start, lo, width } => {
                if x[0] <= *start {
                    return false;
                }
                x.len() < 2 || (*lo < x[1] && x[1] < lo + width)
            }
            Region::Union { items } => items.iter().any(|r| r.contains(x)),
            Region::Inter { items } => items.iter().all(|r| r.contains(x)),
            Region::Diff { a, b } => a.contains(x) && !b.contains_closed(x),
            Region::Complement { a } => !a.contains_closed(x),
        }
    }

    /// Membership in the closure.
    pub fn contains_closed(&self, x: &[f64]) -> bool {
        match self {
            Region::Rect { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| l <= v && v <= h),
            Region::Ball { center, radius } => dist(x, center) <= *radius,
            Region::Annulus { center, inner, outer } => {
                let r = dist(x, center);
                *inner <= r && r <= *outer
            }
            Region::Sector { center, angles, inner, outer } => {
                let r = dist(x, center);
                if !(*inner <= r && r <= *outer) {
                    return false;
                }
                if r == 0.0 {
                    return true;
                }
                let rel = sector_angle(x, center, angles[0]);
                rel <= angles[1] - angles[0] || rel == 0.0
            }
            Region::Halfstrip { start, lo, width } => {
                if x[0] < *start {
                    return false;
                }
                x.len() < 2 || (*lo <= x[1] && x[1] <= lo + width)
            }
            Region::Union { items } => items.iter().any(|r| r.contains_closed(x)),
            Region::Inter { items } => items.iter().all(|r| r.contains_closed(x)),
            Region::Diff { a, b } => a.contains_closed(x) && !b.contains(x),
            Region::Complement { a } => !a.contains(x),
        }
    }
}

/// Polar angle of `x - center` measured from `from`, in `[0, 2pi)`.
fn sector_angle(x: &[f64], center: &[f64], from: f64) -> f64 {
    let theta = (x[1] - center[1]).atan2(x[0] - center[0]);
    (theta - from).rem_euclid(TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn strict_membership_excludes_boundary() {
        let r = Region::rect(&[0.0, 0.0], &[1.0, 1.0]);
        assert!(r.contains(&[0.5, 0.5]));
        assert!(!r.contains(&[1.0, 0.5]));
        assert!(r.contains_closed(&[1.0, 0.5]));
    }

    #[test]
    fn annulus_validation() {
        assert!(Region::annulus(&[0.0, 0.0], 2.0, 1.0).validate(2).is_err());
        assert!(Region::annulus(&[0.0, 0.0], 1.0, 2.0).validate(2).is_ok());
        assert!(Region::annulus(&[0.0], 0.0, 2.0).validate(2).is_err());
    }

    #[test]
    fn sector_wraps_across_branch_cut() {
        let s = Region::sector(&[0.0, 0.0], 0.75 * PI, 1.25 * PI, 0.0, f64::INFINITY);
        assert!(s.contains(&[-1.0, 0.0]));
        assert!(!s.contains(&[1.0, 0.0]));
        assert!(!s.contains(&[0.0, 0.0]));
    }

    #[test]
    fn diff_removes_closure() {
        let d = Region::diff(Region::rect(&[-2.0, -2.0], &[2.0, 2.0]), Region::ball(&[0.0, 0.0], 1.0));
        assert!(!d.contains(&[1.0, 0.0]));
        assert!(d.contains(&[1.5, 0.0]));
    }

    #[test]
    fn parses_tagged_json() {
        let r: Region = serde_json::from_str(
            r#"{"type":"union","items":[{"type":"ball","center":[0,0],"radius":1},
                {"type":"halfstrip","start":0,"width":3.0}]}"#,
        )
        .unwrap();
        assert!(r.contains(&[5.0, 1.0]));
        assert!(r.validate(2).is_ok());
    }
}
