//! Dense symmetric eigensolvers and small special functions.
//!
//! Everything the solvers need fits in two classic kernels: Householder
//! reduction of a real symmetric matrix to tridiagonal form, and the
//! implicit-shift QL iteration with eigenvector accumulation. Problem sizes
//! here stay below a few thousand, where these are fast and exactly
//! reproducible run to run.

use crate::error::{Error, Result};

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
///
/// `vectors` is row-major with `vectors[i * dim + k]` holding component `i`
/// of eigenvector `k`, i.e. columns are orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub dim: usize,
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl EigenDecomposition {
    /// Component `i` of eigenvector `k`.
    #[inline]
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.dim + k]
    }

    /// Copies eigenvector `k` out as a contiguous slice.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.component(i, k)).collect()
    }

    /// Transposed copy: row `k` of the result is eigenvector `k`.
    pub fn vectors_by_row(&self) -> Vec<f64> {
        let n = self.dim;
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                rows[k * n + i] = self.vectors[i * n + k];
            }
        }
        rows
    }
}

/// All eigenpairs of a symmetric tridiagonal matrix.
///
/// `diag` has length n, `offdiag` length n-1.
pub fn tridiag_eigen(diag: &[f64], offdiag: &[f64]) -> Result<EigenDecomposition> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::invalid("empty tridiagonal matrix"));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::invalid("offdiagonal length must be n-1"));
    }
    let mut d = diag.to_vec();
    // tql2 expects e[i] to hold the (i-1, i) coupling, e[0] unused.
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(offdiag);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, &mut z, n)?;
    sort_pairs(&mut d, &mut z, n);
    Ok(EigenDecomposition {
        dim: n,
        values: d,
        vectors: z,
    })
}

/// All eigenpairs of a dense real symmetric matrix (row-major, n*n).
///
/// Only the lower triangle is read.
pub fn symmetric_eigen(matrix: &[f64], n: usize) -> Result<EigenDecomposition> {
    if matrix.len() != n * n {
        return Err(Error::invalid("matrix buffer size does not match dimension"));
    }
    if n == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let mut a = matrix.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut a, &mut d, &mut e, n);
    tql2(&mut d, &mut e, &mut a, n)?;
    sort_pairs(&mut d, &mut a, n);
    Ok(EigenDecomposition {
        dim: n,
        values: d,
        vectors: a,
    })
}

fn sort_pairs(d: &mut [f64], z: &mut [f64], n: usize) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let dv = d.to_vec();
    let zv = z.to_vec();
    for (new_k, &old_k) in order.iter().enumerate() {
        d[new_k] = dv[old_k];
        for i in 0..n {
            z[i * n + new_k] = zv[i * n + old_k];
        }
    }
}

/// Householder reduction of a real symmetric matrix to tridiagonal form,
/// accumulating the orthogonal transformation in `a`.
fn tred2(a: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let mut f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                f = 0.0;
                for j in 0..=l {
                    a[j * n + i] = a[i * n + j] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[i * n + k] * a[k * n + j];
                }
                for k in 0..i {
                    a[k * n + j] -= g * a[k * n + i];
                }
            }
        }
        d[i] = a[i * n + i];
        a[i * n + i] = 1.0;
        for j in 0..i {
            a[j * n + i] = 0.0;
            a[i * n + j] = 0.0;
        }
    }
}

/// QL iteration with implicit shifts on a symmetric tridiagonal matrix,
/// rotating the columns of `z` along with it.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::invalid(
                    "QL iteration failed to converge (should not happen for symmetric input)",
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Bessel functions J_0(x)..J_kmax(x) by Miller's downward recurrence.
///
/// Accurate to machine precision for the x, k ranges used by the Chebyshev
/// propagator (k_max a few tens beyond x).
pub fn bessel_j_sequence(x: f64, k_max: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let start = k_max + 20 + (ax.sqrt() as usize);
    let mut jn = vec![0.0f64; start + 2];
    jn[start + 1] = 0.0;
    jn[start] = 1e-300;
    let mut norm = 0.0f64;
    for k in (1..=start).rev() {
        jn[k - 1] = (2.0 * k as f64 / ax) * jn[k] - jn[k + 1];
        if jn[k - 1].abs() > 1e250 {
            let scale = 1e-250;
            for v in jn[k - 1..].iter_mut() {
                *v *= scale;
            }
            norm *= scale;
        }
        if k - 1 > 0 && (k - 1) % 2 == 0 {
            norm += 2.0 * jn[k - 1];
        }
    }
    norm += jn[0];
    let mut out = vec![0.0; k_max + 1];
    for k in 0..=k_max {
        out[k] = jn[k] / norm;
        // J_k(-x) = (-1)^k J_k(x)
        if x < 0.0 && k % 2 == 1 {
            out[k] = -out[k];
        }
    }
    out
}
