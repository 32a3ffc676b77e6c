//! Likelihood-ratio baseline: least-squares fit of the observed samples on the
//! Vandermonde model of each candidate class.
//!
//! With unknown residues and i.i.d. Gaussian noise the maximized likelihood is a
//! monotone function of the projection residual, so the ratio test with threshold
//! one reduces to comparing residual norms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_space_basis, frobenius_norm, CMat};
use crate::signal::{CandidateClass, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    H1,
    H2,
}

/// `(l+1) x p` Vandermonde matrix `F[t][i] = z_i^t` of one class.
#[derive(Debug, Clone)]
pub struct GlrtModel {
    pub class_name: String,
    f: CMat,
    basis: CMat,
}

impl GlrtModel {
    pub fn new(class: &CandidateClass, l: usize) -> Result<Self> {
        let z = class.freqs();
        let f = CMat::from_fn(l + 1, z.len(), |t, i| z[i].powu(t as u32));
        if let Some(i) = (0..f.ncols()).find(|&i| f.column(i).iter().all(|v| *v == Complex64::new(0.0, 0.0))) {
            return Err(Error::invalid(format!("Vandermonde column {i} of class {} is identically zero", class.name)));
        }
        let basis = column_space_basis(&f)?;
        Ok(Self { class_name: class.name.clone(), f, basis })
    }

    pub fn matrix(&self) -> &CMat {
        &self.f
    }

    /// `||(I - P_F) Y||_F`.
    pub fn residual(&self, y: &CMat) -> f64 {
        let q = &self.basis;
        let fitted = q * (q.adjoint() * y);
        frobenius_norm(&(y - fitted))
    }
}

/// Observation matrix: row `t` holds the looks of `y_t`, for `t = 0..=l`.
pub fn observation_matrix(signal: &Signal, l: usize) -> Result<CMat> {
    if l + 1 > signal.len() {
        return Err(Error::InsufficientSamples { needed: l + 1, available: signal.len() });
    }
    Ok(CMat::from_fn(l + 1, signal.looks(), |t, k| signal.at(t, k)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlrtDecision {
    pub decision: Hypothesis,
    pub residual_h1: f64,
    pub residual_h2: f64,
    /// False when the two classes have different sizes: the residuals then have
    /// different degrees of freedom and the unit threshold is not calibrated.
    pub calibrated: bool,
}

/// Decides H1 iff the class-1 residual does not exceed the class-2 residual.
pub fn glrt_classify(signal: &Signal, z1: &CandidateClass, z2: &CandidateClass, l: usize) -> Result<GlrtDecision> {
    let y = observation_matrix(signal, l)?;
    let r1 = GlrtModel::new(z1, l)?.residual(&y);
    let r2 = GlrtModel::new(z2, l)?.residual(&y);
    Ok(GlrtDecision {
        decision: if r1 <= r2 { Hypothesis::H1 } else { Hypothesis::H2 },
        residual_h1: r1,
        residual_h2: r2,
        calibrated: z1.len() == z2.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{add_awgn, scale_signal, synth_mixture, Mode};

    fn noiseless(class: &CandidateClass, len: usize, looks: usize) -> Signal {
        synth_mixture(&Mode::unit_modes(class.freqs(), looks), len, looks).unwrap()
    }

    #[test]
    fn exact_model_picks_its_class() {
        let (z1, z2) = (CandidateClass::z1(), CandidateClass::z2());
        let d = glrt_classify(&noiseless(&z1, 60, 1), &z1, &z2, 59).unwrap();
        assert_eq!(d.decision, Hypothesis::H1);
        let y = observation_matrix(&noiseless(&z1, 60, 1), 59).unwrap();
        assert!(d.residual_h1 < 1e-10 * frobenius_norm(&y), "{}", d.residual_h1);
        assert!(d.calibrated);

        let d = glrt_classify(&noiseless(&z2, 60, 2), &z1, &z2, 59).unwrap();
        assert_eq!(d.decision, Hypothesis::H2);
    }

    #[test]
    fn tie_goes_to_h1() {
        let z1 = CandidateClass::z1();
        let sig = add_awgn(&noiseless(&CandidateClass::z2(), 40, 1), 5.0, 3).unwrap();
        let d = glrt_classify(&sig, &z1, &z1, 39).unwrap();
        assert_eq!(d.residual_h1, d.residual_h2);
        assert_eq!(d.decision, Hypothesis::H1);
    }

    #[test]
    fn positive_scaling_keeps_decision() {
        let (z1, z2) = (CandidateClass::z1(), CandidateClass::z2());
        for seed in 0..5 {
            let sig = add_awgn(&noiseless(&z1, 60, 1), 0.0, seed).unwrap();
            let big = scale_signal(&sig, Complex64::new(37.0, 0.0)).unwrap();
            let a = glrt_classify(&sig, &z1, &z2, 59).unwrap();
            let b = glrt_classify(&big, &z1, &z2, 59).unwrap();
            assert_eq!(a.decision, b.decision);
            assert!((b.residual_h1 - 37.0 * a.residual_h1).abs() < 1e-9 * b.residual_h1);
        }
    }

    #[test]
    fn unequal_sizes_flagged() {
        let z1 = CandidateClass::z1();
        let z2 = CandidateClass::z2().largest(4).unwrap();
        let d = glrt_classify(&noiseless(&z1, 30, 1), &z1, &z2, 29).unwrap();
        assert!(!d.calibrated);
    }

    #[test]
    fn errors() {
        let z1 = CandidateClass::z1();
        assert!(matches!(
            glrt_classify(&noiseless(&z1, 10, 1), &z1, &z1, 10),
            Err(Error::InsufficientSamples { .. })
        ));
        let zero = CandidateClass::new("zero", vec![Complex64::new(0.0, 0.0)]).unwrap();
        // z^0 = 1, so the column is not degenerate for t = 0
        assert!(GlrtModel::new(&zero, 5).is_ok());
    }
}
