use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::envelope::Envelope;
use super::field::Field;
use super::form::DiscreteForm;

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Problems up to this size are solved densely.
const DENSE_LIMIT: usize = 160;

/// An eigenvalue, its L2-normalised eigenvector and the relative residual reached.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub lambda: f64,
    pub vector: Field,
    /// `||A u - lambda u|| / ||u||`.
    pub residual: f64,
}

/// Residual bound accepted for eigenvalue `lambda`.
///
/// The requested `tol * max(lambda, 1)` is floored at what double precision can
/// resolve for this matrix.
pub fn residual_bound(form: &DiscreteForm, tol: f64, lambda: f64) -> f64 {
    (tol * lambda.abs().max(1.0)).max(32.0 * f64::EPSILON * form.norm_inf())
}

/// Iteration budget `10 sqrt(n) + 1000`.
pub fn max_iterations(n: usize) -> usize {
    10 * (n as f64).sqrt() as usize + 1000
}

/// Ground state of the form: smallest eigenvalue, nonnegative-sum normalised eigenvector.
pub fn smallest_eigenpair(form: &DiscreteForm, tol: f64) -> Result<Eigenpair> {
    smallest_eigenpair_from(form, tol, None)
}

/// As [`smallest_eigenpair`], starting from `guess` (any field on the same grid).
pub fn smallest_eigenpair_from(form: &DiscreteForm, tol: f64, guess: Option<&Field>) -> Result<Eigenpair> {
    let start = guess.map(|g| form.dofs().iter().map(|&i| g.values()[i]).collect());
    let mut pairs = lowest(form, 1, tol, start)?;
    Ok(pairs.remove(0))
}

/// The `k` smallest eigenpairs in ascending order with orthonormal vectors.
pub fn k_smallest(form: &DiscreteForm, k: usize, tol: f64) -> Result<Vec<Eigenpair>> {
    if k == 0 || k > form.n() {
        return Err(Error::TooManyEigenpairs { requested: k, available: form.n() });
    }
    lowest(form, k, tol, None)
}

/// Number of eigenvalues `<= c`, counted with multiplicity by Sylvester inertia.
pub fn count_below(form: &DiscreteForm, c: f64) -> Result<usize> {
    let shift = c + 1e-12 * c.abs().max(1.0);
    Ok(inertia_below(form, shift))
}

/// Number of eigenvalues strictly below `shift`.
fn inertia_below(form: &DiscreteForm, shift: f64) -> usize {
    let mut env = form.shifted_envelope(shift);
    env.factor(pivmin(form)).negative
}

fn pivmin(form: &DiscreteForm) -> f64 {
    f64::EPSILON * f64::EPSILON * form.norm_inf().max(1.0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(u, v)| *u += a * v);
}

fn normalize(x: &mut [f64]) -> f64 {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(x, q);
            axpy(x, -c, q);
        }
    }
}

/// Rayleigh quotient and residual norm of a unit vector.
fn rayleigh_residual(form: &DiscreteForm, x: &[f64], ax: &mut [f64]) -> (f64, f64) {
    form.apply(x, ax);
    let theta = dot(x, ax);
    let r: f64 = ax.iter().zip(x).map(|(a, v)| (a - theta * v).powi(2)).sum::<f64>().sqrt();
    (theta, r)
}

fn finish(form: &DiscreteForm, lambda: f64, mut x: Vec<f64>, residual: f64) -> Eigenpair {
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let mut vector = form.extend(&x);
    vector.normalize().expect("eigenvector is nonzero");
    Eigenpair { lambda, vector, residual }
}

fn lowest(form: &DiscreteForm, k: usize, tol: f64, start: Option<Vec<f64>>) -> Result<Vec<Eigenpair>> {
    let n = form.n();
    if k > n {
        return Err(Error::TooManyEigenpairs { requested: k, available: n });
    }
    if n <= DENSE_LIMIT {
        return Ok(dense_lowest(form, k));
    }
    ShiftInvert::new(form, tol).run(k, start)
}

fn dense_lowest(form: &DiscreteForm, k: usize) -> Vec<Eigenpair> {
    let n = form.n();
    let a = form.dense();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut ax = vec![0.0; n];
    order
        .into_iter()
        .take(k)
        .map(|c| {
            let x: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let (theta, r) = rayleigh_residual(form, &x, &mut ax);
            finish(form, theta, x, r)
        })
        .collect()
}

struct Locked {
    lambda: f64,
    x: Vec<f64>,
    residual: f64,
}

/// Shift-and-invert Lanczos with full reorthogonalisation, locking and explicit restarts.
///
/// The shift always stays below the smallest eigenvalue, certified by a
/// positive-definite factorisation, so the inverse is well conditioned for
/// solves and the wanted eigenvalues are the dominant ones of the inverse.
struct ShiftInvert<'a> {
    form: &'a DiscreteForm,
    tol: f64,
    sigma: f64,
    fact: Envelope,
    iterations: usize,
    budget: usize,
    rng: ChaCha8Rng,
}

impl<'a> ShiftInvert<'a> {
    fn new(form: &'a DiscreteForm, tol: f64) -> Self {
        let mut sigma = form.min_potential();
        let mut fact;
        loop {
            fact = form.shifted_envelope(sigma);
            if fact.factor(pivmin(form)).negative == 0 {
                break;
            }
            sigma -= 1.0 + sigma.abs();
        }
        Self {
            form,
            tol,
            sigma,
            fact,
            iterations: 0,
            budget: max_iterations(form.n()),
            rng: ChaCha8Rng::seed_from_u64(0x5eed ^ form.n() as u64),
        }
    }

    fn random_vector(&mut self) -> Vec<f64> {
        (0..self.form.n()).map(|_| self.rng.random::<f64>() - 0.5).collect()
    }

    /// Moves the shift up towards `target` if a positive-definite factorisation allows it.
    fn try_shift(&mut self, target: f64) {
        let mut cand = target;
        for _ in 0..4 {
            if cand <= self.sigma {
                return;
            }
            let mut env = self.form.shifted_envelope(cand);
            if env.factor(pivmin(self.form)).negative == 0 {
                self.sigma = cand;
                self.fact = env;
                return;
            }
            cand = 0.5 * (cand + self.sigma);
        }
    }

    fn run(mut self, k: usize, start: Option<Vec<f64>>) -> Result<Vec<Eigenpair>> {
        let n = self.form.n();
        let mut locked: Vec<Locked> = Vec::new();
        let mut want = k;
        let mut start = match start {
            Some(mut s) => {
                let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let noise = self.random_vector();
                let eps = if scale > 0.0 { 1e-6 * scale } else { 1.0 };
                axpy(&mut s, eps, &noise);
                s
            }
            None => self.random_vector(),
        };
        let mut ax = vec![0.0; n];
        let mut best_residual = f64::INFINITY;
        loop {
            if locked.len() >= want {
                locked.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
                let theta = locked[want - 1].lambda;
                let delta = 10.0 * residual_bound(self.form, self.tol, theta) + 1e-10 * theta.abs().max(1.0);
                let below = inertia_below(self.form, theta - delta);
                let found = locked.iter().filter(|p| p.lambda < theta - delta).count();
                if below <= found || locked.len() >= n {
                    break;
                }
                want = (want + below - found).min(n);
                start = self.random_vector();
                continue;
            }
            if self.iterations >= self.budget {
                return Err(Error::NoConvergence { iterations: self.iterations, residual: best_residual });
            }
            let basis_vecs: Vec<Vec<f64>> = locked.iter().map(|p| p.x.clone()).collect();
            let free = n - locked.len();
            let m = free.min((2 * (want - locked.len()) + 24).max(32));
            let (q, alpha, beta) = self.cycle(&basis_vecs, &mut start, m);
            let dim = alpha.len();
            let t = DMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
            let need = want - locked.len();
            let mut restart: Option<Vec<f64>> = None;
            let mut next_theta: Option<(f64, f64)> = None;
            for &c in order.iter().take(need.max(1)) {
                let s = eig.eigenvectors.column(c);
                let mut x = vec![0.0; n];
                for (qi, si) in q.iter().zip(s.iter()) {
                    axpy(&mut x, *si, qi);
                }
                orthogonalize(&mut x, &basis_vecs);
                if normalize(&mut x) == 0.0 {
                    continue;
                }
                let (theta, r) = rayleigh_residual(self.form, &x, &mut ax);
                if restart.is_none() && r <= residual_bound(self.form, self.tol, theta) {
                    locked.push(Locked { lambda: theta, x, residual: r });
                    continue;
                }
                best_residual = best_residual.min(r);
                if restart.is_none() {
                    next_theta = Some((theta, r));
                    restart = Some(x);
                } else if let Some(v) = restart.as_mut() {
                    axpy(v, 0.1, &x);
                }
            }
            start = match restart {
                Some(v) => v,
                None => self.random_vector(),
            };
            if let Some((theta, r)) = next_theta {
                let gap = theta - self.sigma;
                let target = theta - (2.0 * r).max(1e-6 * theta.abs().max(1.0));
                if target - self.sigma > 0.5 * gap.max(0.0) {
                    self.try_shift(target);
                }
            }
        }
        locked.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        Ok(locked
            .into_iter()
            .take(k)
            .map(|p| finish(self.form, p.lambda, p.x, p.residual))
            .collect())
    }

    /// One Lanczos run of at most `m` steps on `(A - sigma)^{-1}`, deflated against `locked`.
    fn cycle(&mut self, locked: &[Vec<f64>], start: &mut Vec<f64>, m: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
        let mut q0 = std::mem::take(start);
        orthogonalize(&mut q0, locked);
        while normalize(&mut q0) < 1e-10 {
            q0 = self.random_vector();
            orthogonalize(&mut q0, locked);
        }
        let mut q = vec![q0];
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        for j in 0..m {
            let mut w = q[j].clone();
            self.fact.solve(&mut w);
            self.iterations += 1;
            orthogonalize(&mut w, locked);
            let a = dot(&w, &q[j]);
            alpha.push(a);
            orthogonalize(&mut w, &q);
            let b = normalize(&mut w);
            if j + 1 == m || b <= 1e-13 * a.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            beta.push(b);
            q.push(w);
        }
        q.truncate(alpha.len());
        beta.truncate(alpha.len().saturating_sub(1));
        (q, alpha, beta)
    }
}
