//! Minimal sparse kernels: CSR storage for real-symmetric and complex
//! Hermitian matrices plus a Jacobi-preconditioned conjugate gradient.

use super::Dirac2dError;
use num_complex::Complex64;

/// Real CSR matrix (square).
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

fn compress<T: Copy + std::ops::AddAssign>(
    n: usize,
    mut triplets: Vec<(u32, u32, T)>,
) -> (Vec<usize>, Vec<usize>, Vec<T>) {
    triplets.sort_by_key(|&(i, j, _)| (i, j));
    let mut row_ptr = vec![0usize; n + 1];
    let mut cols = Vec::with_capacity(triplets.len());
    let mut vals: Vec<T> = Vec::with_capacity(triplets.len());
    let mut rows = Vec::with_capacity(triplets.len());
    for (i, j, v) in triplets {
        if let (Some(&lc), Some(lv)) = (cols.last(), vals.last_mut()) {
            if rows.last() == Some(&(i as usize)) && lc == j as usize {
                *lv += v;
                continue;
            }
        }
        rows.push(i as usize);
        cols.push(j as usize);
        vals.push(v);
    }
    for &r in &rows {
        row_ptr[r + 1] += 1;
    }
    for r in 0..n {
        row_ptr[r + 1] += row_ptr[r];
    }
    (row_ptr, cols, vals)
}

impl Csr {
    pub fn from_triplets(n: usize, triplets: Vec<(u32, u32, f64)>) -> Self {
        let (row_ptr, cols, vals) = compress(n, triplets);
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    d[i] = self.vals[k];
                }
            }
        }
        d
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.vals[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k])] = self.vals[k];
            }
        }
        m
    }
}

/// Complex Hermitian CSR matrix; both triangles are stored.
#[derive(Debug, Clone)]
pub struct HermitianCsr {
    pub n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl HermitianCsr {
    pub fn from_triplets(n: usize, triplets: Vec<(u32, u32, Complex64)>) -> Self {
        let (row_ptr, cols, vals) = compress(n, triplets);
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.cols[lo..hi].binary_search(&j) {
            Ok(k) => self.vals[lo + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for i in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    /// `Re(u^H A u)`; the imaginary part vanishes for Hermitian `A`.
    pub fn quadratic(&self, u: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.vals[k] * u[self.cols[k]];
            }
            acc += (u[i].conj() * row).re;
        }
        acc
    }

    /// Largest relative asymmetry `|a_ij - conj(a_ji)|` over stored entries,
    /// scaled by the largest entry modulus.
    pub fn hermiticity_defect(&self) -> f64 {
        let scale = self
            .vals
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(j, i).conj()).norm());
            }
        }
        worst / scale
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.vals[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference against `other`, walking the union of
    /// both sparsity patterns.
    pub fn max_entry_diff(&self, other: &HermitianCsr) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                worst = worst.max((self.vals[k] - other.get(i, j)).norm());
            }
            for k in other.row_ptr[i]..other.row_ptr[i + 1] {
                let j = other.cols[k];
                worst = worst.max((other.vals[k] - self.get(i, j)).norm());
            }
        }
        worst
    }

    /// Real-symmetric doubling `[[Re A, -Im A], [Im A, Re A]]`; eigenvalues
    /// of the pencil are preserved (with doubled multiplicity).
    pub fn realified(&self) -> Csr {
        let mut triplets: Vec<(u32, u32, f64)> = Vec::with_capacity(4 * self.nnz());
        let n = self.n as u32;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k] as u32;
                let v = self.vals[k];
                let i = i as u32;
                if v.re != 0.0 {
                    triplets.push((i, j, v.re));
                    triplets.push((i + n, j + n, v.re));
                }
                if v.im != 0.0 {
                    triplets.push((i, j + n, -v.im));
                    triplets.push((i + n, j, v.im));
                }
            }
        }
        Csr::from_triplets(2 * self.n, triplets)
    }

    /// Scaled sum `sum_k coeffs[k] * mats[k]` over matrices of equal size.
    pub fn linear_combination(mats: &[(f64, &HermitianCsr)]) -> HermitianCsr {
        let n = mats[0].1.n;
        let mut triplets = Vec::new();
        for (c, m) in mats {
            for i in 0..m.n {
                for k in m.row_ptr[i]..m.row_ptr[i + 1] {
                    triplets.push((i as u32, m.cols[k] as u32, *c * m.vals[k]));
                }
            }
        }
        HermitianCsr::from_triplets(n, triplets)
    }
}

/// Jacobi-preconditioned conjugate gradient for positive-definite systems.
///
/// `x` carries the initial guess and receives the solution. Returns the
/// iteration count; errors if the relative residual has not reached `tol`
/// within `max_iter` iterations.
pub fn pcg(
    a: &Csr,
    inv_diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<usize, Dirac2dError> {
    let n = a.n;
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok(0);
    }
    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = (0..n).map(|i| inv_diag[i] * r[i]).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= tol * b_norm {
            return Ok(it);
        }
        a.matvec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Dirac2dError::CgStalled {
                residual: r_norm / b_norm,
                iters: it,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    Err(Dirac2dError::CgStalled {
        residual: r_norm / b_norm,
        iters: max_iter,
    })
}
