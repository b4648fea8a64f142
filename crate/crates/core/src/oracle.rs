//! Brute-force search for configurations sharing every SA and RoD value with a
//! given framework. Intended for small frameworks only, as an independent check
//! on the analytic rigidity criteria.

use nalgebra::{DMatrix, DVector, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::framework::Framework;
use crate::geometry::{fit_similarity, ratio_of_distance, rot, signed_angle, Configuration};
use crate::graph::TripleMode;
use crate::lm::{levenberg_marquardt, LmOptions};

pub const ORACLE_MAX_N: usize = 8;

/// Residual norm below which a start counts as an exact solution.
pub const SOLUTION_TOL: f64 = 1e-10;

/// Derives an independent RNG seed for start `index` of a run seeded with `seed`.
pub fn start_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Distinct (modulo similarity) configurations `q` with `f(q) = f(p)` found from
/// `trials` random starts. Vertices 1 and 2 are pinned at their true positions.
pub fn equivalent_shape_search(fw: &Framework, trials: usize, seed: u64) -> Result<Vec<Configuration>> {
    let n = fw.n();
    if n > ORACLE_MAX_N {
        return Err(Error::OracleTooLarge(n));
    }
    if n < 3 {
        return Err(Error::InvalidInput("oracle needs at least 3 vertices".into()));
    }
    let (sa, rod) = fw.triples(TripleMode::Full);
    let alpha = sa.triples.iter().map(|&t| signed_angle(&fw.config, t)).collect::<Result<Vec<f64>>>()?;
    let kappa = rod.triples.iter().map(|&t| ratio_of_distance(&fw.config, t)).collect::<Result<Vec<f64>>>()?;
    let scale = fw.config.scale();
    let centre = fw.config.points.iter().sum::<Vector2<f64>>() / n as f64;
    let pinned = [fw.config.points[0], fw.config.points[1]];
    let free = 2 * (n - 2);

    let assemble = |x: &DVector<f64>| -> Configuration {
        let mut pts = pinned.to_vec();
        pts.extend((0..n - 2).map(|i| Vector2::new(x[2 * i], x[2 * i + 1])));
        Configuration::new(pts)
    };
    // Smooth residuals: unit-bearing differences for SA constraints and length
    // differences for RoD constraints. Unlike wrapped angle differences they have
    // no branch cut, which otherwise walls off the basins of alternative shapes.
    let residual = |x: &DVector<f64>| -> DVector<f64> {
        let q = assemble(x);
        let mut r = Vec::with_capacity(2 * alpha.len() + kappa.len());
        for (t, &a) in sa.triples.iter().zip(&alpha) {
            let (u, v) = (q.points[t.j] - q.points[t.apex], q.points[t.k] - q.points[t.apex]);
            let d = v.normalize() - rot(a) * u.normalize();
            r.extend([d.x, d.y]);
        }
        for (t, &k) in rod.triples.iter().zip(&kappa) {
            let (u, v) = (q.points[t.j] - q.points[t.apex], q.points[t.k] - q.points[t.apex]);
            r.push((v.norm() - k * u.norm()) / scale);
        }
        DVector::from_vec(r)
    };
    // central differences keep the oracle independent of the analytic rigidity matrix
    let model = |x: &DVector<f64>| -> (DVector<f64>, DMatrix<f64>) {
        let r0 = residual(x);
        let h = 1e-7 * scale;
        let mut jac = DMatrix::zeros(r0.len(), free);
        for c in 0..free {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[c] += h;
            xm[c] -= h;
            jac.set_column(c, &((residual(&xp) - residual(&xm)) / (2.0 * h)));
        }
        if !r0.iter().all(|v| v.is_finite()) {
            return (DVector::from_element(r0.len(), f64::INFINITY), jac);
        }
        (r0, jac)
    };

    let opts = LmOptions { max_iter: 300, cost_tol: 1e-26, ..LmOptions::default() };
    let found: Vec<Option<Configuration>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(start_seed(seed, t as u64));
            let x0 = DVector::from_fn(free, |i, _| {
                let c = if i % 2 == 0 { centre.x } else { centre.y };
                c + rng.gen_range(-1.5..1.5) * scale
            });
            let res = levenberg_marquardt(x0, model, &opts);
            let q = assemble(&res.x);
            let ok = res.cost.sqrt() < SOLUTION_TOL && q.collocated_pair(1e-6 * scale).is_none();
            ok.then_some(q)
        })
        .collect();

    let mut shapes: Vec<Configuration> = Vec::new();
    for q in found.into_iter().flatten() {
        let mut new = true;
        for s in &shapes {
            if fit_similarity(s, &q)?.1 < 1e-6 * scale {
                new = false;
                break;
            }
        }
        if new {
            shapes.push(q);
        }
    }
    Ok(shapes)
}
