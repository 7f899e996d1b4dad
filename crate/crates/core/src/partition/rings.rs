use crate::error::{Error, Result};
use crate::geometry::{ring_union_mask, DomainMask};
use crate::operator::{assemble, smallest_eigenpair, Potential};

/// Ring partition cells together with the annuli they were built from.
#[derive(Clone, Debug)]
pub struct RingPartition {
    pub radii: Vec<(f64, f64)>,
    /// `lambda(Ω ∩ A_{r_j,R_j})` per annulus.
    pub annulus_lambdas: Vec<f64>,
    pub cells: Vec<DomainMask>,
}

fn annulus_lambda(domain: &DomainMask, v: &Potential, r: f64, big: f64, tol: f64) -> Result<Option<f64>> {
    let m = domain.within_annulus(r, big);
    if m.is_empty() {
        return Ok(None);
    }
    Ok(Some(smallest_eigenpair(&assemble(&m, v)?, tol)?.lambda))
}

/// Greedy concentric annuli with `lambda(Ω ∩ A_{r_j,R_j}) <= sigma + eps`, assigned round-robin to `k` cells.
pub fn build_rings(domain: &DomainMask, v: &Potential, k: usize, eps: f64, sigma: f64, tol: f64) -> Result<RingPartition> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if !sigma.is_finite() {
        return Err(Error::Precondition("ring partitions need a finite sigma".into()));
    }
    let grid = domain.grid();
    let h = grid.h();
    let target = sigma + eps;
    let r_max = grid.circumscribed_radius() + h;
    let mut radii = Vec::new();
    let mut lambdas = Vec::new();
    let mut r = 0.0;
    loop {
        // annulus energies decrease in the outer radius, so bisect over the lattice of radii
        let steps = ((r_max - r) / h).floor() as usize;
        if steps == 0 {
            break;
        }
        let at = |m: usize| r + m as f64 * h;
        match annulus_lambda(domain, v, r, at(steps), tol)? {
            Some(l) if l <= target => {}
            _ => break,
        }
        let (mut lo, mut hi) = (0usize, steps);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            match annulus_lambda(domain, v, r, at(mid), tol)? {
                Some(l) if l <= target => hi = mid,
                _ => lo = mid,
            }
        }
        let big = at(hi);
        let l = annulus_lambda(domain, v, r, big, tol)?.expect("qualifying annulus is nonempty");
        radii.push((r, big));
        lambdas.push(l);
        r = big + h;
    }
    if radii.len() < k {
        return Err(Error::WindowTooSmall(format!(
            "only {} annuli with energy <= {target} fit in the window, need {k}",
            radii.len()
        )));
    }
    let cells = (1..=k)
        .map(|i| ring_union_mask(domain, &radii, k, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(RingPartition { radii, annulus_lambdas: lambdas, cells })
}

/// Cells of the ring construction; see [`build_rings`].
pub fn build_ring_partition(
    domain: &DomainMask,
    v: &Potential,
    k: usize,
    eps: f64,
    sigma: f64,
    tol: f64,
) -> Result<Vec<DomainMask>> {
    Ok(build_rings(domain, v, k, eps, sigma, tol)?.cells)
}
