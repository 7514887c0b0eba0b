//! Matrix-free Lanczos solver for the smallest eigenpair of a real
//! symmetric operator, with full reorthogonalization and optional deflation.
//!
//! The second eigenvalue (counted with multiplicity) is obtained by a second
//! run deflated against the first Ritz vector; for a degenerate ground space
//! the deflated minimum reproduces the ground energy and the gap closes.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BREAKDOWN_TOL: f64 = 1e-12;
const RITZ_CHECK_EVERY: usize = 5;

pub(crate) struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Smallest eigenpair of `apply` restricted to the orthogonal complement of
/// `deflate`, to residual tolerance `tol`.
pub(crate) fn smallest_eigenpair<F>(
    dim: usize,
    apply: F,
    deflate: &[&[f64]],
    seed: u64,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair>
where
    F: Fn(&[f64], &mut [f64]),
{
    let max_iter = max_iter.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    project_out(&mut v, deflate);
    let nrm = norm(&v);
    if nrm < BREAKDOWN_TOL {
        return Err(Error::EigensolverStalled {
            residual: f64::NAN,
            iterations: 0,
        });
    }
    scale(&mut v, 1.0 / nrm);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;

    for j in 0..max_iter {
        apply(&basis[j], &mut w);
        let alpha = dot(&w, &basis[j]);
        alphas.push(alpha);
        // Full reorthogonalization against the Krylov basis and the deflation
        // space; two sweeps keep the basis orthogonal to machine precision.
        for _ in 0..2 {
            project_out(&mut w, deflate);
            for u in &basis {
                let p = dot(&w, u);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= p * ui;
                }
            }
        }
        let beta = norm(&w);

        let exhausted = beta < BREAKDOWN_TOL || j + 1 == max_iter;
        if exhausted || (j + 1).is_multiple_of(RITZ_CHECK_EVERY) {
            let (theta, y) = smallest_ritz(&alphas, &betas);
            // Lanczos residual bound: beta_j * |last Ritz coefficient|.
            let bound = beta * y.last().copied().unwrap_or(1.0).abs();
            if exhausted || bound <= tol * theta.abs().max(1.0) {
                let vector = ritz_vector(&basis, &y);
                let residual = true_residual(&apply, &vector, theta, &mut w);
                if residual <= tol * theta.abs().max(1.0) {
                    return Ok(EigenPair {
                        value: theta,
                        vector,
                        residual,
                    });
                }
                last_residual = residual;
                if exhausted {
                    break;
                }
            }
        }
        if beta < BREAKDOWN_TOL {
            break;
        }
        betas.push(beta);
        let mut next = w.clone();
        scale(&mut next, 1.0 / beta);
        basis.push(next);
    }

    Err(Error::EigensolverStalled {
        residual: last_residual,
        iterations: alphas.len(),
    })
}

/// Smallest eigenvalue and eigenvector of the Lanczos tridiagonal matrix.
fn smallest_ritz(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(k.saturating_sub(1)).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = SymmetricEigen::new(t);
    let mut best = 0;
    for i in 1..k {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    let y: Vec<f64> = eig.eigenvectors.column(best).iter().copied().collect();
    (eig.eigenvalues[best], y)
}

fn ritz_vector(basis: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let dim = basis[0].len();
    let mut out = vec![0.0; dim];
    for (u, &c) in basis.iter().zip(y) {
        for (oi, ui) in out.iter_mut().zip(u) {
            *oi += c * ui;
        }
    }
    let nrm = norm(&out);
    scale(&mut out, 1.0 / nrm);
    out
}

fn true_residual<F>(apply: &F, v: &[f64], theta: f64, scratch: &mut [f64]) -> f64
where
    F: Fn(&[f64], &mut [f64]),
{
    apply(v, scratch);
    let mut acc = 0.0;
    for (hi, vi) in scratch.iter().zip(v) {
        let r = hi - theta * vi;
        acc += r * r;
    }
    acc.sqrt()
}

fn project_out(v: &mut [f64], space: &[&[f64]]) {
    for u in space {
        let p = dot(v, u);
        for (vi, ui) in v.iter_mut().zip(*u) {
            *vi -= p * ui;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn scale(v: &mut [f64], c: f64) {
    for x in v {
        *x *= c;
    }
}
