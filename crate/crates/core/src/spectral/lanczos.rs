//! Thick-restart Lanczos with full reorthogonalization.
//!
//! The projected matrix `H = Q^T M Q` is kept dense: after a restart it is an
//! arrowhead (kept Ritz values on the diagonal, coupling to the residual
//! vector in the last row), which the dense solver handles directly.

use nalgebra::DMatrix;
use rand::Rng;

use super::dense::symmetric_eigen;
use super::operator::SymmetricOperator;
use crate::error::{Error, Result};
use crate::rng::rng_from;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    LargestAlgebraic,
    SmallestAlgebraic,
    LargestMagnitude,
}

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    pub which: Which,
    /// Convergence test on the residual estimate, relative to the largest
    /// Ritz value magnitude.
    pub tol: f64,
    pub max_restarts: usize,
    /// Krylov basis size before a restart; 0 picks `max(2 nev + 20, 40)`.
    pub basis_size: usize,
    pub start_seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            which: Which::LargestAlgebraic,
            tol: 1e-10,
            max_restarts: 1000,
            basis_size: 0,
            start_seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosOutput {
    /// Wanted Ritz values, ordered by `which`.
    pub values: Vec<f64>,
    /// Ritz vectors (n × nev).
    pub vectors: DMatrix<f64>,
    /// Residual estimates `|β s_m|` for each returned pair.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    pub restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two passes of classical Gram-Schmidt against `basis`; returns the
/// accumulated coefficients.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (q, c) in basis.iter().zip(coeffs.iter_mut()) {
            let h = dot(q, w);
            *c += h;
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= h * qi;
            }
        }
    }
    coeffs
}

fn random_unit(n: usize, rng: &mut impl Rng, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        orthogonalize(&mut v, basis);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

fn order_by(which: Which, values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    match which {
        Which::LargestAlgebraic => idx.sort_by(|&a, &b| values[b].total_cmp(&values[a])),
        Which::SmallestAlgebraic => idx.sort_by(|&a, &b| values[a].total_cmp(&values[b])),
        Which::LargestMagnitude => {
            idx.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()))
        }
    }
    idx
}

pub fn lanczos(
    op: &dyn SymmetricOperator,
    nev: usize,
    opts: &LanczosOptions,
) -> Result<LanczosOutput> {
    let n = op.dim();
    if nev == 0 || nev > n {
        return Err(Error::param("nev", nev, format!("must lie in [1, {n}]")));
    }
    let mut m_max = if opts.basis_size == 0 {
        (2 * nev + 20).max(40)
    } else {
        opts.basis_size
    };
    m_max = m_max.min(n).max(nev);
    let keep = (nev + (m_max - nev) / 2)
        .min(m_max.saturating_sub(1))
        .max(nev.min(m_max - 1));

    let mut rng = rng_from(opts.start_seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_max);
    let mut h = DMatrix::<f64>::zeros(m_max, m_max);
    basis.push(random_unit(n, &mut rng, &[]).expect("n >= 1"));

    let mut w = vec![0.0; n];
    let mut matvecs = 0;
    let mut last_residuals = vec![f64::INFINITY; nev];
    for restart in 0..=opts.max_restarts {
        // Extend the basis to m_max columns; the coupling to the residual
        // vector `w` of the last column is `beta`.
        let mut beta: f64;
        let mut j = basis.len() - 1;
        loop {
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let coeffs = orthogonalize(&mut w, &basis);
            for (i, &c) in coeffs.iter().enumerate() {
                if i < j {
                    // Off-diagonal entries are already known from earlier
                    // columns; average to keep H exactly symmetric.
                    let v = 0.5 * (h[(i, j)] + c);
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                } else {
                    h[(i, j)] = c;
                }
            }
            beta = norm(&w);
            if basis.len() == m_max {
                break;
            }
            let scale = h
                .view((0, 0), (j + 1, j + 1))
                .abs()
                .max()
                .max(f64::MIN_POSITIVE);
            let next = if beta > 1e-12 * scale {
                let q: Vec<f64> = w.iter().map(|x| x / beta).collect();
                h[(j + 1, j)] = beta;
                h[(j, j + 1)] = beta;
                q
            } else {
                // Invariant subspace: continue with a fresh direction.
                h[(j + 1, j)] = 0.0;
                h[(j, j + 1)] = 0.0;
                match random_unit(n, &mut rng, &basis) {
                    Some(q) => q,
                    None => break,
                }
            };
            basis.push(next);
            j += 1;
        }

        let m = basis.len();
        let hm = h.view((0, 0), (m, m)).into_owned();
        let eig = symmetric_eigen(&hm)?;
        let order = order_by(opts.which, &eig.values);
        let anorm = eig
            .values
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let exhausted = m == n || basis.len() < m_max;
        let residuals: Vec<f64> = order[..nev]
            .iter()
            .map(|&k| {
                if exhausted {
                    0.0
                } else {
                    (beta * eig.vectors[(m - 1, k)]).abs()
                }
            })
            .collect();
        let converged = residuals.iter().all(|r| *r <= opts.tol * anorm);
        last_residuals = residuals.clone();

        if converged || restart == opts.max_restarts || exhausted {
            if !converged && !exhausted {
                break;
            }
            let mut vectors = DMatrix::zeros(n, nev);
            for (c, &k) in order[..nev].iter().enumerate() {
                for (b, q) in basis.iter().enumerate() {
                    let s = eig.vectors[(b, k)];
                    if s != 0.0 {
                        for i in 0..n {
                            vectors[(i, c)] += s * q[i];
                        }
                    }
                }
            }
            return Ok(LanczosOutput {
                values: order[..nev].iter().map(|&k| eig.values[k]).collect(),
                vectors,
                residuals,
                matvecs,
                restarts: restart,
            });
        }

        // Thick restart: keep the best `keep` Ritz vectors plus the residual.
        let kept = &order[..keep];
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(m_max);
        for &k in kept {
            let mut y = vec![0.0; n];
            for (b, q) in basis.iter().enumerate() {
                let s = eig.vectors[(b, k)];
                for i in 0..n {
                    y[i] += s * q[i];
                }
            }
            new_basis.push(y);
        }
        h.fill(0.0);
        for (c, &k) in kept.iter().enumerate() {
            h[(c, c)] = eig.values[k];
        }
        let next = if beta > 0.0 {
            let mut q: Vec<f64> = w.iter().map(|x| x / beta).collect();
            // Re-orthogonalize against the rotated basis for stability.
            orthogonalize(&mut q, &new_basis);
            let nq = norm(&q);
            q.iter_mut().for_each(|x| *x /= nq);
            for (c, &k) in kept.iter().enumerate() {
                let coupling = beta * eig.vectors[(m - 1, k)];
                h[(keep, c)] = coupling;
                h[(c, keep)] = coupling;
            }
            Some(q)
        } else {
            random_unit(n, &mut rng, &new_basis)
        };
        basis = new_basis;
        match next {
            Some(q) => basis.push(q),
            None => break,
        }
    }
    Err(Error::NoConvergence {
        iterations: matvecs,
        residual: last_residuals.iter().cloned().fold(0.0, f64::max),
    })
}
