//! Dense complex linear-algebra helpers shared by the pencil and range code.

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn smallest_singular_value(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b> = sum a_ij * conj(b_ij)`, linear in `a` and conjugate-linear in `b`.
pub fn inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// Thin SVD truncated to the leading `rank` triplets.
pub struct TruncatedSvd {
    pub u: CMat,
    pub sigma: Vec<f64>,
    pub v: CMat,
}

pub fn truncated_svd(m: &CMat, rank: usize) -> Result<TruncatedSvd> {
    let svd = m.clone().svd(true, true);
    let u = svd
        .u
        .ok_or_else(|| Error::Numeric("SVD did not return U".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD did not return V^H".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let rank = rank.min(order.len());
    let keep = &order[..rank];
    let u_r = CMat::from_fn(m.nrows(), rank, |i, j| u[(i, keep[j])]);
    let v_r = CMat::from_fn(m.ncols(), rank, |i, j| v_t[(keep[j], i)].conj());
    let sigma = keep.iter().map(|&k| svd.singular_values[k]).collect();
    Ok(TruncatedSvd { u: u_r, sigma, v: v_r })
}

impl TruncatedSvd {
    pub fn reconstruct(&self) -> CMat {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.adjoint()
    }
}

/// Numerical rank with the usual pseudoinverse cutoff `max(m, n) * eps * sigma_1`.
pub fn numerical_rank(sv: &[f64], rows: usize, cols: usize) -> usize {
    let Some(&top) = sv.first() else { return 0 };
    let cutoff = rows.max(cols) as f64 * f64::EPSILON * top;
    sv.iter().filter(|&&s| s > cutoff).count()
}

/// Largest eigenvalue of a Hermitian matrix: Householder reduction to a real
/// tridiagonal matrix, then Sturm-sequence bisection for the top eigenvalue only.
pub fn hermitian_max_eigenvalue(h: &CMat) -> f64 {
    let n = h.nrows();
    match n {
        0 => f64::NEG_INFINITY,
        1 => h[(0, 0)].re,
        _ => {
            let (d, e2) = tridiagonalize(h);
            top_tridiagonal_eigenvalue(&d, &e2)
        }
    }
}

/// Diagonal and squared off-diagonal of a real tridiagonal matrix unitarily similar to `h`.
pub fn tridiagonalize(h: &CMat) -> (Vec<f64>, Vec<f64>) {
    let n = h.nrows();
    // row-major copy of the lower triangle; the upper one is implied by symmetry
    let mut a: Vec<Complex64> = (0..n * n).map(|k| h[(k / n, k % n)]).collect();
    let mut e2 = vec![0.0; n - 1];
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut p = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n - 1 {
        let m = n - k - 1;
        let base = k + 1;
        let alpha2: f64 = (0..m).map(|i| a[(base + i) * n + k].norm_sqr()).sum();
        e2[k] = alpha2;
        if m == 1 || alpha2 == 0.0 {
            continue;
        }
        let alpha = alpha2.sqrt();
        let x0 = a[base * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..m {
            v[i] = a[(base + i) * n + k];
        }
        v[0] += phase * alpha;
        let vv: f64 = v[..m].iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vv;
        // p = tau * A22 v from the lower triangle
        for z in p[..m].iter_mut() {
            *z = Complex64::new(0.0, 0.0);
        }
        for i in 0..m {
            let row = &a[(base + i) * n + base..(base + i) * n + base + i + 1];
            let mut acc = row[i] * v[i];
            for j in 0..i {
                acc += row[j] * v[j];
                p[j] += row[j].conj() * v[i];
            }
            p[i] += acc;
        }
        for z in p[..m].iter_mut() {
            *z *= tau;
        }
        let vp: f64 = (0..m).map(|i| (v[i].conj() * p[i]).re).sum();
        let half = 0.5 * tau * vp;
        for i in 0..m {
            p[i] -= v[i] * half;
        }
        for i in 0..m {
            let (vi, pi) = (v[i], p[i]);
            let row = &mut a[(base + i) * n + base..(base + i) * n + base + i + 1];
            for j in 0..=i {
                row[j] -= vi * p[j].conj() + pi * v[j].conj();
            }
        }
    }
    let d = (0..n).map(|i| a[i * n + i].re).collect();
    (d, e2)
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal `d` and
/// squared off-diagonal `e2`: Sturm-count bisection until the eigenvalue is
/// isolated, then safeguarded Newton on the characteristic polynomial.
pub fn top_tridiagonal_eigenvalue(d: &[f64], e2: &[f64]) -> f64 {
    let n = d.len();
    let e = |i: usize| if i < n - 1 { e2[i].sqrt() } else { 0.0 };
    let mut lo = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = e(i) + if i > 0 { e(i - 1) } else { 0.0 };
        hi = hi.max(d[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale * scale);
    let stop = 4.0 * f64::EPSILON * scale;
    // Sturm ratios r_i = p_i / p_{i-1}: count of negatives and the Newton step -p_n / p_n'
    let sweep = |x: f64| {
        let mut count = 0;
        let (mut r, mut dr) = (1.0, 0.0);
        let mut log_deriv = 0.0;
        for i in 0..n {
            let (r_next, dr_next) = if i == 0 {
                (d[0] - x, -1.0)
            } else {
                (d[i] - x - e2[i - 1] / r, -1.0 + e2[i - 1] * dr / (r * r))
            };
            r = if r_next.abs() < pivmin { -pivmin } else { r_next };
            dr = dr_next;
            if r < 0.0 {
                count += 1;
            }
            log_deriv += dr / r;
        }
        (count, -1.0 / log_deriv)
    };
    let mut isolated = false;
    let mut x = hi;
    for _ in 0..200 {
        if hi - lo <= stop {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (count, step) = sweep(if isolated { x } else { mid });
        let at = if isolated { x } else { mid };
        if count == n {
            hi = at;
        } else {
            lo = at;
            isolated |= count == n - 1;
        }
        if isolated {
            let next = at + step;
            if step.is_finite() && next > lo && next < hi {
                if step.abs() <= stop {
                    return next;
                }
                x = next;
            } else {
                x = 0.5 * (lo + hi);
            }
        }
    }
    0.5 * (lo + hi)
}

/// Largest eigenpair of a Hermitian matrix.
pub fn hermitian_max_eigenpair(h: &CMat) -> (f64, nalgebra::DVector<Complex64>) {
    let eig = SymmetricEigen::new(h.clone());
    let (k, val) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    (val, eig.eigenvectors.column(k).into_owned())
}

/// Eigenvalues of a square complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::invalid("eigenvalues need a square matrix"));
    }
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numeric("Schur form is not triangular".into()))?;
    Ok(ev.iter().copied().collect())
}

/// Diagonal equivalence scaling `(Dr A Dc, Dr B Dc)` that equalizes the joint
/// row and column energies of the pair. Generalized eigenvalues are unchanged.
/// With `rows == false` only columns are scaled, which is a similarity on `B^+ A`.
pub fn balance_pair(a: &CMat, b: &CMat, rows: bool) -> (CMat, CMat) {
    let (m, n) = a.shape();
    let energy = CMat::from_fn(m, n, |i, j| {
        Complex64::new(a[(i, j)].norm_sqr() + b[(i, j)].norm_sqr(), 0.0)
    });
    let mut dr = vec![1.0f64; m];
    let mut dc = vec![1.0f64; n];
    for _ in 0..60 {
        let mut change = 0.0f64;
        if rows {
            for (i, d) in dr.iter_mut().enumerate() {
                let e: f64 = (0..n).map(|j| energy[(i, j)].re * dc[j] * dc[j]).sum();
                if e > 0.0 {
                    let nd = e.sqrt().sqrt().recip();
                    change = change.max((nd / *d).ln().abs());
                    *d = nd;
                }
            }
        }
        for (j, d) in dc.iter_mut().enumerate() {
            let e: f64 = (0..m).map(|i| energy[(i, j)].re * dr[i] * dr[i]).sum();
            if e > 0.0 {
                let nd = e.sqrt().sqrt().recip();
                change = change.max((nd / *d).ln().abs());
                *d = nd;
            }
        }
        if change < 1e-6 {
            break;
        }
    }
    let scale = |x: &CMat| CMat::from_fn(m, n, |i, j| x[(i, j)] * (dr[i] * dc[j]));
    (scale(a), scale(b))
}

/// Moore-Penrose pseudo-inverse, dropping singular values below the numerical rank cutoff.
pub fn pseudo_inverse(m: &CMat) -> Result<CMat> {
    let sv = singular_values(m);
    let rank = numerical_rank(&sv, m.nrows(), m.ncols());
    if rank == 0 {
        return Err(Error::ZeroMatrix);
    }
    let t = truncated_svd(m, rank)?;
    let inv = CMat::from_fn(rank, rank, |i, j| if i == j { Complex64::new(1.0 / t.sigma[i], 0.0) } else { Complex64::new(0.0, 0.0) });
    Ok(&t.v * inv * t.u.adjoint())
}

/// Orthonormal basis of the numerical column space of `f`.
pub fn column_space_basis(f: &CMat) -> Result<CMat> {
    let sv = singular_values(f);
    let rank = numerical_rank(&sv, f.nrows(), f.ncols());
    Ok(truncated_svd(f, rank)?.u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn truncated_svd_reconstructs_full_rank() {
        let m = CMat::from_row_slice(3, 2, &[c(1.0, 0.5), c(2.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(3.0, -2.0), c(0.5, 0.5)]);
        let svd = truncated_svd(&m, 2).unwrap();
        assert!((svd.reconstruct() - &m).norm() < 1e-12);
        assert!(svd.sigma[0] >= svd.sigma[1]);
    }

    #[test]
    fn top_eigenvalue_matches_full_decomposition() {
        for n in [1, 2, 3, 7, 20] {
            let a = CMat::from_fn(n + 3, n, |i, j| c(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64 * 0.3));
            let g = a.adjoint() * &a;
            let want = g.clone().symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let got = hermitian_max_eigenvalue(&g);
            assert!((got - want).abs() <= 1e-12 * want.abs(), "n = {n}: {got} vs {want}");
        }
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-3.0, 0.0), c(-1.0, 0.0), c(-2.0, 0.0)]));
        assert!((hermitian_max_eigenvalue(&d) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 1.0), c(5.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)]);
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - c(-2.0, 0.0)).norm() < 1e-12);
        assert!((ev[1] - c(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn balancing_preserves_square_generalized_eigenvalues() {
        let a = CMat::from_row_slice(2, 2, &[c(1e3, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(3e-3, 0.0)]);
        let b = CMat::identity(2, 2);
        let (ab, bb) = balance_pair(&a, &b, true);
        let inv = bb.try_inverse().unwrap();
        let mut ev = eigenvalues(&(inv * ab)).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0].re - 3e-3).abs() < 1e-12);
        assert!((ev[1].re - 1e3).abs() < 1e-9);
    }
}
