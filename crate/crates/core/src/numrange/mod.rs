//! Numerical ranges of a rectangular pencil `A - lambda B`.
//!
//! The 2-norm range `W(A;B) = { theta : ||A - lambda B||_2 >= |theta - lambda| for all lambda }`
//! is tested pointwise by [`membership`]. The Frobenius-norm range is a closed disk
//! ([`frobenius_disk`]) that contains it and serves as a cheap reject test.

mod boundary;
mod classical;
mod disk;
mod membership;
mod polygon;
mod spectrum;

pub use boundary::{rect_range_boundary, LambdaGrid};
pub use classical::classical_range_boundary;
pub use disk::{frobenius_disk, frobenius_disk_from_signal, FrobeniusDisk};
pub use membership::{
    membership, MembershipConfig, MembershipResult, MembershipSolver, PencilNorm, RadiusBound, Stage, Verdict,
};
pub use polygon::Polygon;
pub use spectrum::{g_map, mpm_eigenvalues, sigma_min, GridField};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::pencil::PencilPair;

/// Default target norm used when a pencil has to be rescaled.
pub const DEFAULT_D: f64 = 2.0;

/// Rescales the pencil so that `||B||_2 >= 1`.
///
/// A pencil that already satisfies the bound is returned unchanged; otherwise both
/// matrices are multiplied by `d / ||B||_2`.
pub fn ensure_scaled(p: &PencilPair, d: f64) -> Result<PencilPair> {
    apply_scaling(p, d, ScalePolicy::IfBelowOne)
}

/// When the pencil gets rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalePolicy {
    /// Only when `||B||_2 < 1`.
    IfBelowOne,
    /// Always, so that `||B||_2 = d` afterwards.
    Normalize,
}

pub fn apply_scaling(p: &PencilPair, d: f64, policy: ScalePolicy) -> Result<PencilPair> {
    let min_d = match policy {
        ScalePolicy::IfBelowOne => 1.0,
        ScalePolicy::Normalize => 0.0,
    };
    if !(d > min_d) || !d.is_finite() {
        return Err(Error::invalid(format!("scaling constant D must be finite and > {min_d}, got {d}")));
    }
    let nb = spectral_norm(&p.b);
    if nb == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    if policy == ScalePolicy::IfBelowOne && nb >= 1.0 {
        return Ok(p.clone());
    }
    Ok(p.scaled(Complex64::new(d / nb, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues, CMat};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scaled_only_when_needed() {
        let p = PencilPair::new(CMat::from_element(1, 1, c(1.0, 0.0)), CMat::from_element(1, 1, c(3.0, 0.0))).unwrap();
        assert_eq!(ensure_scaled(&p, 2.0).unwrap(), p);

        let p = PencilPair::new(CMat::from_element(1, 1, c(1.0, 0.0)), CMat::from_element(1, 1, c(0.5, 0.0))).unwrap();
        let s = ensure_scaled(&p, 2.0).unwrap();
        assert!((s.b[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((s.a[(0, 0)] - c(4.0, 0.0)).norm() < 1e-15);
        assert!((s.scale - c(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn scaling_errors() {
        let p = PencilPair::new(CMat::from_element(1, 1, c(1.0, 0.0)), CMat::zeros(1, 1)).unwrap();
        assert!(matches!(ensure_scaled(&p, 2.0), Err(Error::ZeroMatrix)));
        assert!(ensure_scaled(&p, 1.0).is_err());
    }

    #[test]
    fn normalize_sets_norm() {
        let p = PencilPair::new(CMat::from_element(2, 1, c(1.0, 1.0)), CMat::from_element(2, 1, c(5.0, 0.0))).unwrap();
        let s = apply_scaling(&p, 1.5, ScalePolicy::Normalize).unwrap();
        assert!((spectral_norm(&s.b) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn square_eigenvalues_survive_scaling() {
        let a = CMat::from_row_slice(2, 2, &[c(0.3, 0.1), c(0.2, 0.0), c(-0.1, 0.4), c(0.05, -0.2)]);
        let b = CMat::from_row_slice(2, 2, &[c(0.4, 0.0), c(0.1, 0.1), c(0.0, 0.2), c(0.3, 0.0)]);
        let p = PencilPair::new(a, b).unwrap();
        let s = ensure_scaled(&p, 2.0).unwrap();
        let ev = |q: &PencilPair| {
            let mut e = eigenvalues(&(q.b.clone().try_inverse().unwrap() * &q.a)).unwrap();
            e.sort_by(|x, y| x.re.total_cmp(&y.re));
            e
        };
        for (x, y) in ev(&p).iter().zip(ev(&s)) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
