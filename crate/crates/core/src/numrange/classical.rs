use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_max_eigenpair, CMat};

use super::Polygon;

/// Boundary of the field of values `{x^H M x : |x| = 1}` of a square matrix.
///
/// For each direction `phi` the top eigenvector `x` of the Hermitian part of
/// `e^{-i phi} M` supports `W(M)`, and `x^H M x` is the boundary point there.
pub fn classical_range_boundary(m: &CMat, n_angles: usize) -> Result<Polygon> {
    if !m.is_square() || m.is_empty() {
        return Err(Error::invalid("the field of values needs a nonempty square matrix"));
    }
    if n_angles < 3 {
        return Err(Error::invalid("need at least three support directions"));
    }
    let mh = m.adjoint();
    let points: Vec<Complex64> = (0..n_angles)
        .map(|k| {
            let rot = Complex64::from_polar(1.0, -TAU * k as f64 / n_angles as f64);
            let herm = (m * rot + &mh * rot.conj()) * Complex64::new(0.5, 0.0);
            let (_, x) = hermitian_max_eigenpair(&herm);
            let mx = m * &x;
            x.iter().zip(mx.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() / x.norm_squared()
        })
        .collect();
    Ok(Polygon::convex_hull(&points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_is_a_point() {
        let poly = classical_range_boundary(&CMat::identity(2, 2), 16).unwrap();
        assert!(poly.vertices.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn normal_matrix_gives_segment() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]));
        let poly = classical_range_boundary(&m, 32).unwrap();
        for v in &poly.vertices {
            assert!(v.im.abs() < 1e-10 && v.re > -1e-10 && v.re < 1.0 + 1e-10);
        }
    }

    #[test]
    fn jordan_block_gives_half_disk() {
        // oracle: sample unit vectors densely and take the largest |x^H J x|
        let j = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let mut oracle = 0.0f64;
        for a in 0..400 {
            let th = std::f64::consts::FRAC_PI_2 * a as f64 / 399.0;
            for p in 0..64 {
                let ph = TAU * p as f64 / 64.0;
                let x = [c(th.cos(), 0.0), Complex64::from_polar(th.sin(), ph)];
                let q = x[0].conj() * x[1];
                oracle = oracle.max(q.norm());
            }
        }
        assert!((oracle - 0.5).abs() < 1e-5);
        let poly = classical_range_boundary(&j, 64).unwrap();
        let r = poly.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!((r - 0.5).abs() < 1e-8);
    }
}
