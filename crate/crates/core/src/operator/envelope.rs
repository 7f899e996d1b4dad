//! Envelope (skyline) storage and an unpivoted `L D L^T` factorisation.

/// Symmetric matrix stored by rows of its lower envelope.
///
/// Row `i` keeps columns `first[i]..i` contiguously, followed separately by the diagonal.
#[derive(Clone, Debug)]
pub struct Envelope {
    first: Vec<usize>,
    ptr: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
    factored: bool,
}

/// Result of factoring `A - shift I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub positive: usize,
}

impl Envelope {
    pub fn with_profile(first: Vec<usize>, diag: Vec<f64>) -> Self {
        let n = diag.len();
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        for i in 0..n {
            debug_assert!(first[i] <= i);
            ptr.push(ptr[i] + (i - first[i]));
        }
        let vals = vec![0.0; ptr[n]];
        Self { first, ptr, vals, diag, factored: false }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Number of stored off-diagonal entries.
    pub fn profile(&self) -> usize {
        self.vals.len()
    }

    /// Sets entry `(i, j)` with `j < i`, which must lie inside the envelope.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(j < i && j >= self.first[i], "entry outside envelope");
        self.vals[self.ptr[i] + j - self.first[i]] = v;
    }

    /// In-place `L D L^T`; pivots smaller than `pivmin` in magnitude are replaced by `-pivmin`.
    pub fn factor(&mut self, pivmin: f64) -> Inertia {
        assert!(!self.factored, "envelope already factored");
        let n = self.n();
        let mut neg = 0;
        for i in 0..n {
            let fi = self.first[i];
            let (before, rest) = self.vals.split_at_mut(self.ptr[i]);
            let row_i = &mut rest[..i - fi];
            // row_i[j - fi] becomes (L D)_{ij} then L_{ij}
            for j in fi..i {
                let fj = self.first[j];
                let lo = fi.max(fj);
                let row_j = &before[self.ptr[j]..self.ptr[j] + (j - fj)];
                let mut s = row_i[j - fi];
                let a = &row_i[lo - fi..j - fi];
                let b = &row_j[lo - fj..j - fj];
                for (x, y) in a.iter().zip(b) {
                    s -= x * y;
                }
                row_i[j - fi] = s;
            }
            let mut d = self.diag[i];
            for j in fi..i {
                let g = row_i[j - fi];
                let l = g / self.diag[j];
                d -= g * l;
                row_i[j - fi] = l;
            }
            if d.abs() < pivmin || d.is_nan() {
                d = -pivmin;
            }
            if d < 0.0 {
                neg += 1;
            }
            self.diag[i] = d;
        }
        self.factored = true;
        Inertia { negative: neg, positive: n - neg }
    }

    /// Solves `A x = b` in place using the factors.
    pub fn solve(&self, x: &mut [f64]) {
        assert!(self.factored, "solve before factor");
        let n = self.n();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1]];
            let s: f64 = row.iter().zip(&x[fi..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in 0..n {
            x[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = x[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1]];
            for (v, l) in x[fi..i].iter_mut().zip(row) {
                *v -= l * xi;
            }
        }
    }

    pub fn pivots(&self) -> &[f64] {
        &self.diag
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_solve_tridiagonal() {
        let n: usize = 6;
        let first: Vec<usize> = (0..n).map(|i| i.saturating_sub(1)).collect();
        let mut e = Envelope::with_profile(first, vec![2.0; n]);
        for i in 1..n {
            e.set(i, i - 1, -1.0);
        }
        let inertia = e.factor(1e-300);
        assert_eq!(inertia.negative, 0);
        let mut x = vec![1.0; n];
        e.solve(&mut x);
        // A x = 1 for tridiag(-1,2,-1) has x_i = (i+1)(n-i)/2
        for (i, v) in x.iter().enumerate() {
            let expect = ((i + 1) * (n - i)) as f64 / 2.0;
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        // tridiag(-1,2,-1) of size 3 has eigenvalues 2 - sqrt2, 2, 2 + sqrt2
        for (shift, expect) in [(0.5, 0), (1.0, 1), (2.5, 2), (3.5, 3)] {
            let mut e = Envelope::with_profile(vec![0, 0, 1], vec![2.0 - shift; 3]);
            e.set(1, 0, -1.0);
            e.set(2, 1, -1.0);
            assert_eq!(e.factor(1e-300).negative, expect, "shift {shift}");
        }
    }
}
