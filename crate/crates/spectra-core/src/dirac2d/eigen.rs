//! Generalized eigensolvers for the realified pencil `(E, B)`.
//!
//! The production path is shift-free inverse iteration on the
//! positive-definite energy matrix with an inner Jacobi-preconditioned CG
//! solve; the dense path reduces via a Cholesky factor of `B` and computes
//! the full spectrum, serving as the verification route for small
//! problems.

use super::sparse::{pcg, Csr};
use super::Dirac2dError;

#[derive(Debug, Clone)]
pub struct EigenOptions {
    /// Relative stagnation tolerance on the smallest Ritz value.
    pub rtol: f64,
    /// Relative eigen-residual `||E x - nu B x|| / ||E x||` target.
    pub residual_tol: f64,
    pub max_outer: usize,
    /// Subspace width; must cover near-degenerate clusters (the realified
    /// pencil doubles every eigenvalue, and the triangle spectra carry
    /// close physical doublets on top of that).
    pub block: usize,
    /// Warm-start vector in the realified basis (breaks into column 0).
    pub start: Option<Vec<f64>>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            residual_tol: 1e-6,
            max_outer: 200,
            block: 4,
            start: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SmallestPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub outer_iters: usize,
    pub residual: f64,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Deterministic full-rank start columns (splitmix64 stream per seed); no
/// RNG state leaks across calls, so solves are bit-reproducible.
fn deterministic_column(n: usize, seed: usize) -> Vec<f64> {
    let mut state = 0x9E3779B97F4A7C15u64.wrapping_mul(seed as u64 + 1);
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Smallest eigenvalue of `E x = nu B x` by block inverse iteration with
/// Rayleigh-Ritz extraction (`E` and `B` positive definite).
///
/// Single-vector iteration contracts like `nu1/nu2` and stalls on the
/// near-doublets these pencils carry; a small subspace restores the
/// `nu1/nu_{block+1}` rate.
pub fn smallest_eigenpair(
    e: &Csr,
    b: &Csr,
    opts: &EigenOptions,
) -> Result<SmallestPair, Dirac2dError> {
    let n = e.n;
    let p = opts.block.clamp(1, n);
    let diag = e.diag();
    if diag.iter().any(|&d| d <= 0.0) {
        return Err(Dirac2dError::EigenNotConverged {
            residual: f64::INFINITY,
            iters: 0,
        });
    }
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();

    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| deterministic_column(n, j)).collect();
    if let Some(v) = &opts.start {
        if v.len() == n && v.iter().any(|&c| c != 0.0) {
            cols[0] = v.clone();
        }
    }
    b_orthonormalize(b, &mut cols)?;

    let mut nu = f64::INFINITY;
    let mut resid = f64::INFINITY;
    let mut scratch = vec![0.0; n];
    for outer in 0..opts.max_outer {
        // Y_j = E^{-1} B X_j, warm-started at X_j / nu_j
        let cg_tol = (1e-4 * resid).clamp(1e-13, 1e-8);
        let mut next: Vec<Vec<f64>> = Vec::with_capacity(p);
        for col in &cols {
            b.matvec(col, &mut scratch);
            let mut y = col.clone();
            let guess_scale = if nu.is_finite() { 1.0 / nu } else { 1.0 };
            y.iter_mut().for_each(|v| *v *= guess_scale);
            pcg(e, &inv_diag, &scratch, &mut y, cg_tol, 200_000)?;
            next.push(y);
        }
        b_orthonormalize(b, &mut next)?;

        // Rayleigh-Ritz on the B-orthonormal block
        let mut h = nalgebra::DMatrix::zeros(p, p);
        let mut e_cols: Vec<Vec<f64>> = Vec::with_capacity(p);
        for col in &next {
            let mut ec = vec![0.0; n];
            e.matvec(col, &mut ec);
            e_cols.push(ec);
        }
        for i in 0..p {
            for j in i..p {
                let v = dot(&next[i], &e_cols[j]);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
        let nu_new = eig.eigenvalues[order[0]];

        // rotate the block onto the Ritz basis
        let mut rotated: Vec<Vec<f64>> = Vec::with_capacity(p);
        for &k in &order {
            let mut col = vec![0.0; n];
            for (j, src) in next.iter().enumerate() {
                let w = eig.eigenvectors[(j, k)];
                if w != 0.0 {
                    for i in 0..n {
                        col[i] += w * src[i];
                    }
                }
            }
            rotated.push(col);
        }

        // residual of the first Ritz pair
        e.matvec(&rotated[0], &mut scratch);
        let ex_norm = dot(&scratch, &scratch).sqrt();
        let mut bx0 = vec![0.0; n];
        b.matvec(&rotated[0], &mut bx0);
        let mut r_sq = 0.0;
        for i in 0..n {
            let r = scratch[i] - nu_new * bx0[i];
            r_sq += r * r;
        }
        resid = r_sq.sqrt() / ex_norm.max(f64::MIN_POSITIVE);
        let stalled = (nu_new - nu).abs() <= opts.rtol * nu_new.abs().max(1e-300);
        cols = rotated;
        nu = nu_new;
        if stalled && resid <= opts.residual_tol {
            return Ok(SmallestPair {
                value: nu,
                vector: cols.swap_remove(0),
                outer_iters: outer + 1,
                residual: resid,
            });
        }
    }
    Err(Dirac2dError::EigenNotConverged {
        residual: resid,
        iters: opts.max_outer,
    })
}

/// Modified Gram-Schmidt in the B inner product; collapsed columns are
/// re-seeded deterministically.
fn b_orthonormalize(b: &Csr, cols: &mut [Vec<f64>]) -> Result<(), Dirac2dError> {
    let n = b.n;
    let mut bcol = vec![0.0; n];
    for j in 0..cols.len() {
        for attempt in 0..3 {
            for i in 0..j {
                b.matvec(&cols[i], &mut bcol);
                let proj = dot(&cols[j], &bcol);
                let (head, tail) = cols.split_at_mut(j);
                let ci = &head[i];
                let cj = &mut tail[0];
                for k in 0..n {
                    cj[k] -= proj * ci[k];
                }
            }
            b.matvec(&cols[j], &mut bcol);
            let norm_sq = dot(&cols[j], &bcol);
            if norm_sq > 1e-24 {
                let s = norm_sq.sqrt();
                cols[j].iter_mut().for_each(|v| *v /= s);
                break;
            }
            if attempt == 2 {
                return Err(Dirac2dError::MassNotPositiveDefinite);
            }
            cols[j] = deterministic_column(n, 31 + 7 * j + attempt);
        }
    }
    Ok(())
}

/// Full generalized spectrum of `(E, B)` via dense Cholesky reduction.
/// Intended for small verification problems.
pub fn generalized_eigenvalues_dense(e: &Csr, b: &Csr) -> Result<Vec<f64>, Dirac2dError> {
    let be = b.to_dense();
    let ee = e.to_dense();
    let chol = nalgebra::Cholesky::new(be).ok_or(Dirac2dError::MassNotPositiveDefinite)?;
    let l = chol.l();
    // C = L^{-1} E L^{-T}, symmetric with the pencil's eigenvalues
    let w = l.solve_lower_triangular(&ee).unwrap();
    let c_t = l.solve_lower_triangular(&w.transpose()).unwrap();
    let c = 0.5 * (&c_t + c_t.transpose());
    let eig = nalgebra::SymmetricEigen::new(c);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|p, q| p.partial_cmp(q).unwrap());
    Ok(vals)
}

/// All eigenvalues of a single realified symmetric matrix (for
/// positive-semidefiniteness checks).
pub fn symmetric_eigenvalues_dense(mat: &Csr) -> Vec<f64> {
    let d = mat.to_dense();
    let sym = 0.5 * (&d + d.transpose());
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|p, q| p.partial_cmp(q).unwrap());
    vals
}
