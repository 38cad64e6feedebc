//! Eigenvalues of dense Hermitian matrices.
//!
//! Householder reduction to tridiagonal form followed by implicit-shift QL
//! on the real tridiagonal matrix. Only eigenvalues are needed (spectrum
//! drift of the lattice density matrix, Schatten norms of Gram forms), so
//! transforms are not accumulated. A diagonal phase similarity makes the
//! off-diagonal real, which leaves the spectrum unchanged.

use crate::error::{Error, Result};
use crate::par::{par_chunks_mut, par_map_range};
use num_complex::Complex64;

/// Eigenvalues of the Hermitian n x n matrix `a` (row-major), ascending.
pub fn hermitian_eigenvalues(a: &[Complex64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n, "matrix shape mismatch");
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[0].re]);
    }
    let mut m = a.to_vec();
    let (mut d, mut e) = tridiagonalize(&mut m, n);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Householder reduction of a Hermitian matrix to tridiagonal form.
/// Returns (diagonal, |off-diagonal|).
fn tridiagonalize(m: &mut [Complex64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut e = vec![0.0f64; n.saturating_sub(1)];
    let idx = |i: usize, j: usize| i * n + j;
    for k in 0..n.saturating_sub(2) {
        // column x = m[k+1.., k]
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            norm_sq += m[idx(i, k)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm < 1e-300 {
            e[k] = 0.0;
            continue;
        }
        let x0 = m[idx(k + 1, k)];
        let phase = if x0.norm() > 1e-300 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        e[k] = norm;
        // v = x - alpha e1, normalized
        let mut v = vec![Complex64::new(0.0, 0.0); n - k - 1];
        for i in k + 1..n {
            v[i - k - 1] = m[idx(i, k)];
        }
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn < 1e-300 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // Hermitian rank-2 update of the trailing block:
        // p = 2 A v; K = v* p; q = p - K v; A <- A - q v* - v q*
        // (matvec and update are row-parallel; this step dominates the
        // n^3 cost for the lattice-sized matrices)
        let nb = n - k - 1;
        let p: Vec<Complex64> = {
            let m_ref: &[Complex64] = m;
            par_map_range(nb, |i| {
                let row = (k + 1 + i) * n + k + 1;
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..nb {
                    acc += m_ref[row + j] * v[j];
                }
                2.0 * acc
            })
        };
        let mut kappa = Complex64::new(0.0, 0.0);
        for i in 0..nb {
            kappa += p[i] * v[i].conj();
        }
        let q: Vec<Complex64> = (0..nb).map(|i| p[i] - kappa * v[i]).collect();
        par_chunks_mut(m, n, |row_i, row| {
            if row_i > k {
                let i = row_i - k - 1;
                for j in 0..nb {
                    row[k + 1 + j] -= q[i] * v[j].conj() + v[i] * q[j].conj();
                }
            }
        });
        // write the reduced column back
        m[idx(k + 1, k)] = Complex64::new(norm, 0.0);
        for i in k + 2..n {
            m[idx(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    if n >= 2 {
        e[n - 2] = m[idx(n - 1, n - 2)].norm();
    }
    let d: Vec<f64> = (0..n).map(|i| m[idx(i, i)].re).collect();
    (d, e)
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix.
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut ework = vec![0.0f64; n];
    ework[..n - 1].copy_from_slice(e);
    // absolute deflation floor: off-diagonals this far below the matrix
    // scale are zero for every downstream consumer, and clusters of zero
    // eigenvalues never satisfy a purely relative test
    let scale = d
        .iter()
        .chain(ework.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = f64::EPSILON * scale;
    for l in 0..n {
        let mut iter = 0;
        loop {
            // find a split point
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if ework[m].abs() <= f64::EPSILON * dd + floor * 1e-4 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::accuracy(
                    "tridiagonal QL iteration",
                    ework[l].abs(),
                    0.0,
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * ework[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + ework[l] / (g + sign_r);
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let f = s * ework[i];
                let b = c * ework[i];
                r = f.hypot(g);
                ework[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    ework[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    d[l] -= p;
                    ework[l] = g;
                    ework[m] = 0.0;
                }
            }
        }
    }
    Ok(())
}
