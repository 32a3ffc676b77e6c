use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, inner};
use crate::pencil::PencilPair;
use crate::signal::Signal;

/// The Frobenius-norm numerical range, a closed disk containing the 2-norm range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusDisk {
    #[serde(with = "crate::io::cplx")]
    pub center: Complex64,
    pub radius: f64,
}

impl FrobeniusDisk {
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        (z - self.center).norm() <= self.radius + tol
    }

    fn from_sums(ab: Complex64, a2: f64, b2: f64) -> Result<Self> {
        if b2 < 1.0 {
            return Err(Error::FrobeniusBelowOne(b2.sqrt()));
        }
        let center = ab / b2;
        let residual = (a2 - ab.norm_sqr() / b2).max(0.0);
        let radius = residual.sqrt() * ((b2 - 1.0) / b2).sqrt();
        Ok(Self { center, radius })
    }
}

/// Center `<A,B> / ||B||_F^2` and radius `||A - cB||_F sqrt(||B||_F^2 - 1) / ||B||_F`.
pub fn frobenius_disk(p: &PencilPair) -> Result<FrobeniusDisk> {
    let b2 = frobenius_norm(&p.b).powi(2);
    if b2 < 1.0 {
        return Err(Error::FrobeniusBelowOne(b2.sqrt()));
    }
    let center = inner(&p.a, &p.b) / b2;
    let residual = frobenius_norm(&(&p.a - p.b.map(|z| z * center)));
    let radius = residual * ((b2 - 1.0) / b2).sqrt();
    Ok(FrobeniusDisk { center, radius })
}

/// The same disk computed straight from the samples, without forming the pencil.
///
/// Anti-diagonal `d` of `B` (and of `A`) holds `eta_d` copies of `y_d` (of `y_{d+1}`),
/// so every Frobenius sum collapses to an `eta`-weighted sum over vector samples.
pub fn frobenius_disk_from_signal(signal: &Signal, s: usize, n: usize) -> Result<FrobeniusDisk> {
    if n < 1 || s <= n {
        return Err(Error::invalid(format!("need s > n >= 1, got s={s}, n={n}")));
    }
    if signal.len() < s + n {
        return Err(Error::InsufficientSamples { needed: s + n, available: signal.len() });
    }
    let mut ab = Complex64::new(0.0, 0.0);
    let mut a2 = 0.0;
    let mut b2 = 0.0;
    for d in 0..s + n - 1 {
        let eta = anti_diagonal_len(d, s, n) as f64;
        let (cur, next) = (signal.sample(d), signal.sample(d + 1));
        let cross: Complex64 = next.iter().zip(cur).map(|(x, y)| x * y.conj()).sum();
        ab += cross * eta;
        a2 += eta * next.iter().map(|z| z.norm_sqr()).sum::<f64>();
        b2 += eta * cur.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    FrobeniusDisk::from_sums(ab, a2, b2)
}

/// Number of `(i, j)` with `i + j = d`, `0 <= i < s`, `0 <= j < n`.
fn anti_diagonal_len(d: usize, s: usize, n: usize) -> usize {
    let lo = d.saturating_sub(n - 1);
    let hi = d.min(s - 1);
    hi + 1 - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;
    use crate::pencil::{build_block_hankel, split_pencil};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eta_counts() {
        let (s, n) = (4, 2);
        let total: usize = (0..s + n - 1).map(|d| anti_diagonal_len(d, s, n)).sum();
        assert_eq!(total, s * n);
        assert_eq!(anti_diagonal_len(0, s, n), 1);
        assert_eq!(anti_diagonal_len(2, s, n), 2);
        assert_eq!(anti_diagonal_len(4, s, n), 1);
    }

    #[test]
    fn equal_matrices_give_point() {
        let ones = CMat::from_element(3, 2, c(1.0, 0.0));
        let d = frobenius_disk(&PencilPair::new(ones.clone(), ones).unwrap()).unwrap();
        assert!((d.center - c(1.0, 0.0)).norm() < 1e-15);
        assert!(d.radius.abs() < 1e-15);

        let d = frobenius_disk(
            &PencilPair::new(CMat::from_element(1, 1, c(2.0, 0.0)), CMat::from_element(1, 1, c(1.0, 0.0))).unwrap(),
        )
        .unwrap();
        assert_eq!(d.center, c(2.0, 0.0));
        assert_eq!(d.radius, 0.0);
    }

    #[test]
    fn below_one_is_rejected() {
        let p = PencilPair::new(CMat::from_element(1, 1, c(2.0, 0.0)), CMat::from_element(1, 1, c(0.5, 0.0))).unwrap();
        assert!(matches!(frobenius_disk(&p), Err(Error::FrobeniusBelowOne(_))));
    }

    #[test]
    fn constant_signal_from_samples() {
        let sig = Signal::from_scalar(vec![c(1.0, 0.0); 8]).unwrap();
        let d = frobenius_disk_from_signal(&sig, 5, 2).unwrap();
        assert!((d.center - c(1.0, 0.0)).norm() < 1e-15);
        assert!(d.radius < 1e-7);
    }

    #[test]
    fn single_real_mode_center() {
        // center = sum eta_d z^(2d+1) / sum eta_d z^(2d), evaluated term by term
        let z: f64 = 1.3;
        let (s, n) = (4, 2);
        let sig = Signal::from_scalar((0..s + n).map(|t| c(z.powi(t as i32), 0.0)).collect()).unwrap();
        let d = frobenius_disk_from_signal(&sig, s, n).unwrap();
        let eta = [1.0, 2.0, 2.0, 2.0, 1.0];
        let num: f64 = eta.iter().enumerate().map(|(i, e)| e * z.powi(2 * i as i32 + 1)).sum();
        let den: f64 = eta.iter().enumerate().map(|(i, e)| e * z.powi(2 * i as i32)).sum();
        assert!((d.center.re - num / den).abs() < 1e-12);
        assert!(d.center.im.abs() < 1e-15);
        let m = frobenius_disk(&split_pencil(&build_block_hankel(&sig, s, n).unwrap()).unwrap()).unwrap();
        assert!((m.center - d.center).norm() < 1e-12);
    }
}
