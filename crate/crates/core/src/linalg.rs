//! Dense SVD helpers shared by the rank tests and the linear solvers.

use nalgebra::{DMatrix, DVector};

/// Default relative singular-value threshold.
pub const DEFAULT_RTOL: f64 = 1e-8;

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rtol * sigma_max`.
pub fn rank_from_sigma(sigma: &[f64], rtol: f64) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > rtol * smax).count()
}

pub fn numerical_rank(m: &DMatrix<f64>, rtol: f64) -> (usize, Vec<f64>) {
    let s = singular_values(m);
    (rank_from_sigma(&s, rtol), s)
}

/// Full SVD pieces: descending singular values, orthonormal right singular
/// vectors (all `ncols` of them, as columns) and the numerical rank.
pub struct FullSvd {
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub rank: usize,
}

/// SVD returning a complete right basis even for wide matrices (zero rows are
/// appended so that the factorization is at least square).
pub fn full_svd(m: &DMatrix<f64>, rtol: f64) -> FullSvd {
    let (r, c) = (m.nrows(), m.ncols());
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    if c == 0 {
        return FullSvd { sigma: vec![], v: DMatrix::zeros(0, 0), u: DMatrix::zeros(r, 0), rank: 0 };
    }
    let svd = padded.svd(true, true);
    let u_full = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let v = DMatrix::from_fn(c, order.len(), |i, j| vt[(order[j], i)]);
    let u = DMatrix::from_fn(r, order.len(), |i, j| u_full[(i, order[j])]);
    let rank = rank_from_sigma(&sigma, rtol);
    FullSvd { sigma, v, u, rank }
}

impl FullSvd {
    /// Orthonormal basis (columns) of the numerical null space.
    pub fn null_space(&self) -> DMatrix<f64> {
        let c = self.v.nrows();
        self.v.columns(self.rank, c - self.rank).into_owned()
    }

    /// Minimum-norm least-squares solution `A^+ b` using the truncated SVD.
    pub fn pinv_solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.v.nrows());
        for k in 0..self.rank {
            let coef = self.u.column(k).dot(b) / self.sigma[k];
            x += coef * self.v.column(k);
        }
        x
    }
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rtol: f64) -> DVector<f64> {
    full_svd(a, rtol).pinv_solve(b)
}
