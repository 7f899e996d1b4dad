use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainMask;
use crate::operator::{k_smallest, DiscreteForm, Field, Potential};
use crate::pnorm::PNorm;

use super::energy::EnergyReport;
use super::rings::build_ring_partition;
use super::state::{cells_from_labels, ground_states, Labels, PartitionState, StopReason};

/// Tolerances and multi-start settings of the alternating minimisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizeOptions {
    /// Eigensolver relative residual tolerance.
    pub tol: f64,
    /// Relative energy decrease counted as a stall.
    pub rel_tol: f64,
    /// Consecutive stalls before stopping.
    pub patience: usize,
    pub max_iter: usize,
    /// Weighted values below `drop_tol * max` are released to no cell.
    pub drop_tol: f64,
    /// Lattice layers by which a cell is extended when probing its neighbourhood.
    pub overlap: usize,
    /// Random Voronoi starts.
    pub starts: usize,
    pub seed: u64,
    pub reseed_attempts: usize,
    /// Also start from the nodal domains of the k-th eigenfunction when there are exactly k.
    pub nodal_seed: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            rel_tol: 1e-7,
            patience: 3,
            max_iter: 1000,
            drop_tol: 1e-12,
            overlap: 4,
            starts: 8,
            seed: 0,
            reseed_attempts: 3,
            nodal_seed: true,
        }
    }
}

/// How the initial cells are chosen.
#[derive(Clone, Debug)]
pub enum Seeding {
    /// Nodal start (if available) plus `starts` random Voronoi starts; best result wins.
    MultiStart,
    /// A single Voronoi start from `seed`.
    Voronoi,
    /// Round-robin ring cells with per-annulus energy at most `sigma + eps`.
    Rings { eps: f64, sigma: f64 },
    /// Explicit cells.
    Cells(Vec<DomainMask>),
    /// Warm start from an earlier state (its cells are reused).
    State(Box<PartitionState>),
}

/// Default p-continuation schedule.
pub const DEFAULT_P_SCHEDULE: [f64; 6] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

struct Ctx<'a> {
    domain: Arc<DomainMask>,
    potential: Arc<Vec<f64>>,
    k: usize,
    p: PNorm,
    opts: &'a OptimizeOptions,
}

/// Minimises the relaxed energy `L_{k,p}` over k-tuples with disjoint supports (`p < inf`).
pub fn optimize(
    domain: &DomainMask,
    v: &Potential,
    k: usize,
    p: PNorm,
    seeding: &Seeding,
    opts: &OptimizeOptions,
) -> Result<(PartitionState, EnergyReport)> {
    if p.is_inf() {
        return Err(Error::Precondition("optimize needs p < inf; use optimize_pinf".into()));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if domain.count() < k {
        return Err(Error::Precondition(format!("domain has {} points, fewer than k = {k}", domain.count())));
    }
    let ctx = Ctx {
        domain: Arc::new(domain.clone()),
        potential: Arc::new(v.sample(domain.grid())?),
        k,
        p,
        opts,
    };
    let state = if k == 1 {
        let mut s = PartitionState::from_cells(ctx.domain.clone(), ctx.potential.clone(), vec![ctx.domain.clone()], p, opts.tol)?;
        s.converged = true;
        s.stop = StopReason::Trivial;
        s.origin = "whole domain".into();
        s
    } else {
        let starts = initial_labelings(&ctx, v, seeding)?;
        best_of(&ctx, starts)?
    };
    let report = EnergyReport::from_state(&state)?;
    Ok((state, report))
}

/// Runs `optimize` along an increasing p schedule, warm-starting each stage,
/// and reports the final state with `p = inf`.
/// Every start is continued through the whole schedule; the best `p = inf` energy wins.
pub fn optimize_pinf(
    domain: &DomainMask,
    v: &Potential,
    k: usize,
    schedule: &[f64],
    seeding: &Seeding,
    opts: &OptimizeOptions,
) -> Result<(PartitionState, EnergyReport)> {
    if schedule.is_empty() || schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("p schedule must be nonempty and increasing".into()));
    }
    let first = PNorm::new(schedule[0])?;
    if k <= 1 || domain.count() < k {
        let (mut state, _) = optimize(domain, v, k, first, seeding, opts)?;
        state.p = PNorm::INF;
        let report = EnergyReport::from_state(&state)?;
        return Ok((state, report));
    }
    let ctx = Ctx {
        domain: Arc::new(domain.clone()),
        potential: Arc::new(v.sample(domain.grid())?),
        k,
        p: first,
        opts,
    };
    let starts = initial_labelings(&ctx, v, seeding)?;
    let results: Vec<Result<PartitionState>> = starts
        .into_par_iter()
        .map(|(origin, labels)| continuation(&ctx, schedule, origin, labels))
        .collect();
    let mut best: Option<PartitionState> = None;
    let mut first_err = None;
    for r in results {
        match r {
            Ok(s) => {
                if best.as_ref().is_none_or(|b| s.energy() < b.energy()) {
                    best = Some(s);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let state = best.ok_or_else(|| first_err.expect("at least one start"))?;
    let report = EnergyReport::from_state(&state)?;
    Ok((state, report))
}

fn continuation(base: &Ctx, schedule: &[f64], origin: String, mut labels: Labels) -> Result<PartitionState> {
    let mut state = None;
    for &p in schedule {
        let ctx = Ctx { domain: base.domain.clone(), potential: base.potential.clone(), k: base.k, p: PNorm::new(p)?, opts: base.opts };
        let s = run(&ctx, labels)?;
        labels = labels_of(&base.domain, s.cells.iter().map(|c| c.as_ref()));
        state = Some(s);
    }
    let mut state = state.expect("schedule is nonempty");
    state.origin = origin;
    state.p = PNorm::INF;
    Ok(state)
}

fn initial_labelings(ctx: &Ctx, v: &Potential, seeding: &Seeding) -> Result<Vec<(String, Labels)>> {
    let domain = &ctx.domain;
    let k = ctx.k;
    Ok(match seeding {
        Seeding::MultiStart => {
            let mut out = Vec::new();
            if ctx.opts.nodal_seed {
                if let Some(l) = nodal_labels(ctx, v) {
                    out.push(("nodal".to_string(), l));
                }
            }
            for s in 0..ctx.opts.starts.max(1) {
                let seed = ctx.opts.seed.wrapping_add(s as u64);
                out.push((format!("voronoi:{seed}"), voronoi_labels(domain, k, seed)));
            }
            out
        }
        Seeding::Voronoi => vec![(format!("voronoi:{}", ctx.opts.seed), voronoi_labels(domain, k, ctx.opts.seed))],
        Seeding::Rings { eps, sigma } => {
            let cells = build_ring_partition(domain, v, k, *eps, *sigma, ctx.opts.tol)?;
            vec![("rings".to_string(), labels_of(domain, cells.iter()))]
        }
        Seeding::Cells(cells) => {
            if cells.len() != k {
                return Err(Error::Precondition(format!("{} seed cells for k = {k}", cells.len())));
            }
            vec![("cells".to_string(), labels_of(domain, cells.iter()))]
        }
        Seeding::State(s) => {
            if s.k != k {
                return Err(Error::Precondition(format!("warm start has k = {}, need {k}", s.k)));
            }
            vec![(s.origin.clone(), labels_of(domain, s.cells.iter().map(|c| c.as_ref())))]
        }
    })
}

fn labels_of<'a>(domain: &DomainMask, cells: impl Iterator<Item = &'a DomainMask>) -> Labels {
    let mut l = vec![0u32; domain.grid().len()];
    for (i, c) in cells.enumerate() {
        for idx in c.indices() {
            if domain.contains(idx) && l[idx] == 0 {
                l[idx] = i as u32 + 1;
            }
        }
    }
    l
}

fn best_of(ctx: &Ctx, starts: Vec<(String, Labels)>) -> Result<PartitionState> {
    let results: Vec<Result<PartitionState>> = starts
        .into_par_iter()
        .map(|(origin, labels)| {
            let mut s = run(ctx, labels)?;
            s.origin = origin;
            Ok(s)
        })
        .collect();
    let mut best: Option<PartitionState> = None;
    let mut first_err = None;
    for r in results {
        match r {
            Ok(s) => {
                if best.as_ref().is_none_or(|b| s.energy() < b.energy()) {
                    best = Some(s);
                }
            }
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    best.ok_or_else(|| first_err.expect("at least one start"))
}

/// k random centres, nearest-centre cells, then a one-point separation layer.
pub fn voronoi_labels(domain: &DomainMask, k: usize, seed: u64) -> Labels {
    let grid = domain.grid();
    let d = grid.dim();
    let pts = domain.indices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // centres at least 3h apart keep their neighbourhood through the separation step
    let min_d2 = 9.0 * grid.h() * grid.h();
    let far = |a: usize, b: usize| {
        let (x, y) = (grid.coord(a), grid.coord(b));
        (0..d).map(|i| (x[i] - y[i]).powi(2)).sum::<f64>() >= min_d2 * (1.0 - 1e-9)
    };
    let mut centers: Vec<usize> = Vec::with_capacity(k);
    let mut attempts = 0;
    while centers.len() < k.min(pts.len()) {
        let c = pts[rng.random_range(0..pts.len())];
        attempts += 1;
        let spaced = attempts > 64 * k || centers.iter().all(|&o| far(o, c));
        if spaced && !centers.contains(&c) {
            centers.push(c);
        }
    }
    let cx: Vec<[f64; 3]> = centers.iter().map(|&c| grid.coord(c)).collect();
    let mut labels = vec![0u32; grid.len()];
    let mut score = vec![f64::NEG_INFINITY; grid.len()];
    for &idx in &pts {
        let x = grid.coord(idx);
        let mut best = (f64::INFINITY, 0usize);
        let mut second = f64::INFINITY;
        for (i, c) in cx.iter().enumerate() {
            let d2: f64 = (0..d).map(|a| (x[a] - c[a]).powi(2)).sum();
            if d2 < best.0 {
                second = best.0;
                best = (d2, i);
            } else if d2 < second {
                second = d2;
            }
        }
        labels[idx] = best.1 as u32 + 1;
        score[idx] = second - best.0;
    }
    separate(domain, &mut labels, &score);
    labels
}

/// Starting cells from the nodal domains of the k-th eigenfunction, if there are exactly k.
fn nodal_labels(ctx: &Ctx, _v: &Potential) -> Option<Labels> {
    let form = DiscreteForm::with_samples(ctx.domain.clone(), ctx.potential.clone()).ok()?;
    let pairs = k_smallest(&form, ctx.k, ctx.opts.tol).ok()?;
    let u = &pairs[ctx.k - 1].vector;
    let vals = u.values();
    let thr = 1e-8 * u.max_abs();
    let grid = ctx.domain.grid();
    let pos = DomainMask::from_fn(grid, "pos", |i, _| ctx.domain.contains(i) && vals[i] > thr);
    let neg = DomainMask::from_fn(grid, "neg", |i, _| ctx.domain.contains(i) && vals[i] < -thr);
    let comps: Vec<DomainMask> = pos.components().into_iter().chain(neg.components()).collect();
    if comps.len() != ctx.k {
        return None;
    }
    let mut labels = labels_of(&ctx.domain, comps.iter());
    let score: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
    separate(&ctx.domain, &mut labels, &score);
    Some(labels)
}

/// Releases every labelled point that has an axis neighbour in another cell
/// with a larger score (lower cell index wins ties), so cells never touch.
///
/// The score is the margin by which a point's cell wins the assignment, so the
/// released layer sits where the competing values cross.
fn separate(domain: &DomainMask, labels: &mut [u32], score: &[f64]) {
    let grid = domain.grid();
    let snapshot = labels.to_vec();
    for idx in domain.indices() {
        let li = snapshot[idx];
        if li == 0 {
            continue;
        }
        let mut release = false;
        grid.for_each_neighbor(idx, |j| {
            let lj = snapshot[j];
            if lj != 0 && lj != li && (score[j] > score[idx] || (score[j] == score[idx] && lj < li)) {
                release = true;
            }
        });
        if release {
            labels[idx] = 0;
        }
    }
}

fn weights(lambdas: &[f64], p: PNorm) -> Vec<f64> {
    let big = p.norm(lambdas);
    lambdas.iter().map(|&l| (l / big).powf(0.5 * (p.value() - 1.0))).collect()
}

fn state_from_labels(ctx: &Ctx, labels: &[u32], guesses: Option<&[Field]>) -> Result<PartitionState> {
    let cells = cells_from_labels(&ctx.domain, labels, ctx.k);
    let gs = ground_states(&cells, &ctx.potential, ctx.opts.tol, guesses)?;
    let (lambdas, fields): (Vec<f64>, Vec<Field>) = gs.into_iter().unzip();
    Ok(PartitionState {
        k: ctx.k,
        p: ctx.p,
        domain: ctx.domain.clone(),
        potential: ctx.potential.clone(),
        cells,
        fields,
        lambdas,
        iteration: 0,
        history: Vec::new(),
        converged: false,
        stop: StopReason::Initial,
        origin: String::new(),
    })
}

/// Puts an empty cell back at the point where all weighted fields are weakest.
fn reseed(ctx: &Ctx, labels: &mut [u32], best: &[f64], cell: u32) {
    let grid = ctx.domain.grid();
    let mut choice: Option<(f64, usize)> = None;
    for idx in ctx.domain.indices() {
        if choice.is_none_or(|(b, _)| best[idx] < b) {
            choice = Some((best[idx], idx));
        }
    }
    if let Some((_, idx)) = choice {
        labels[idx] = cell;
        grid.for_each_neighbor(idx, |j| {
            if labels[j] != 0 && labels[j] != cell {
                labels[j] = 0;
            }
        });
    }
}

/// One alternating-minimisation run from a labelling.
fn run(ctx: &Ctx, init: Labels) -> Result<PartitionState> {
    let opts = ctx.opts;
    let mut labels = init;
    let mut reseeds = 0usize;
    for i in 1..=ctx.k as u32 {
        if !labels.contains(&i) {
            reseeds += 1;
            if reseeds > opts.reseed_attempts {
                return Err(Error::CellCollapse(i as usize));
            }
            let zero = vec![0.0; labels.len()];
            reseed(ctx, &mut labels, &zero, i);
        }
    }
    let mut state = state_from_labels(ctx, &labels, None)?;
    state.record(0);
    let mut stalls = 0usize;
    let grid_len = ctx.domain.grid().len();
    for it in 1..=opts.max_iter {
        let a = weights(&state.lambdas, ctx.p);
        // ground states on cells grown into their neighbourhood
        let ext = state
            .cells
            .par_iter()
            .zip(&state.fields)
            .map(|(c, u)| {
                let grown = Arc::new(c.dilate(opts.overlap, &ctx.domain)?);
                let form = DiscreteForm::with_samples(grown, ctx.potential.clone())?;
                Ok(crate::operator::smallest_eigenpair_from(&form, opts.tol, Some(u))?.vector)
            })
            .collect::<Result<Vec<Field>>>()?;
        let mut best = vec![0.0f64; grid_len];
        let mut second = vec![0.0f64; grid_len];
        let mut cand = vec![0u32; grid_len];
        for (i, e) in ext.iter().enumerate() {
            for (g, &val) in e.values().iter().enumerate() {
                let w = a[i] * val.abs();
                if w > best[g] {
                    second[g] = best[g];
                    best[g] = w;
                    cand[g] = i as u32 + 1;
                } else if w > second[g] {
                    second[g] = w;
                }
            }
        }
        let gmax = best.iter().cloned().fold(0.0, f64::max);
        for g in 0..grid_len {
            if !ctx.domain.contains(g) || best[g] <= opts.drop_tol * gmax {
                cand[g] = 0;
            }
        }
        let margin: Vec<f64> = best.iter().zip(&second).map(|(b, s)| b - s).collect();
        separate(&ctx.domain, &mut cand, &margin);
        for i in 1..=ctx.k as u32 {
            if !cand.contains(&i) {
                reseeds += 1;
                if reseeds > opts.reseed_attempts {
                    return Err(Error::CellCollapse(i as usize));
                }
                reseed(ctx, &mut cand, &best, i);
            }
        }
        let moved = cand.iter().zip(&labels).filter(|(a, b)| a != b).count();
        if moved == 0 {
            state.converged = true;
            state.stop = StopReason::Fixed;
            return Ok(state);
        }
        let next = state_from_labels(ctx, &cand, Some(&state.fields));
        let mut next = match next {
            Ok(s) => s,
            Err(Error::CellCollapse(_)) => unreachable!("empty cells are reseeded"),
            Err(e) => return Err(e),
        };
        let old = state.energy();
        let new = next.energy();
        if new > old {
            state.converged = true;
            state.stop = StopReason::Rejected;
            return Ok(state);
        }
        next.iteration = it;
        next.history = std::mem::take(&mut state.history);
        next.record(moved);
        labels = cand;
        state = next;
        if old - new <= opts.rel_tol * old {
            stalls += 1;
            if stalls >= opts.patience {
                state.converged = true;
                state.stop = StopReason::Stalled;
                return Ok(state);
            }
        } else {
            stalls = 0;
        }
    }
    let h = &state.history;
    let last = h.len();
    let residual = if last >= 2 { (h[last - 2].energy - h[last - 1].energy) / h[last - 1].energy } else { f64::NAN };
    Err(Error::NoConvergence { iterations: opts.max_iter, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_one_for_p_one_and_equal_lambdas() {
        assert_eq!(weights(&[3.0, 5.0], PNorm::ONE), vec![1.0, 1.0]);
        let w = weights(&[4.0, 4.0], PNorm::new(8.0).unwrap());
        assert!((w[0] - w[1]).abs() < 1e-15);
    }
}
