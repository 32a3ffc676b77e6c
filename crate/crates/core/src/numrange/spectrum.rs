use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{balance_pair, eigenvalues, numerical_rank, singular_values, smallest_singular_value, truncated_svd, CMat};
use crate::pencil::PencilPair;

/// `g(lambda) = sigma_min(A - lambda B)` sampled on a rectangular grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// `values[i][j]` belongs to `re_axis[i] + i * im_axis[j]`.
    pub values: Vec<Vec<f64>>,
}

impl GridField {
    /// Grid points ordered by increasing value.
    pub fn smallest(&self, count: usize) -> Vec<(Complex64, f64)> {
        let mut all: Vec<(Complex64, f64)> = self
            .values
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(j, &v)| (Complex64::new(self.re_axis[i], self.im_axis[j]), v))
            })
            .collect();
        all.sort_by(|a, b| a.1.total_cmp(&b.1));
        all.truncate(count);
        all
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn sigma_min(p: &PencilPair, lambda: Complex64) -> f64 {
    smallest_singular_value(&p.at(lambda))
}

pub fn g_map(p: &PencilPair, re_axis: &[f64], im_axis: &[f64]) -> Result<GridField> {
    if re_axis.is_empty() || im_axis.is_empty() {
        return Err(Error::invalid("grid axes must be nonempty"));
    }
    let values = re_axis
        .par_iter()
        .map(|&re| im_axis.iter().map(|&im| sigma_min(p, Complex64::new(re, im))).collect())
        .collect();
    Ok(GridField { re_axis: re_axis.to_vec(), im_axis: im_axis.to_vec(), values })
}

/// Eigenvalues of `B^+ A`, the matrix-pencil frequency estimates.
///
/// With `rank = None` the pencil must have full column rank and all `n` eigenvalues
/// are returned. With `rank = Some(r)` the pencil is treated as rank `r` (e.g. after
/// Cadzow), and the `r` eigenvalues of the compressed problem
/// `Sigma_r^{-1} U_r^H A V_r` are returned; these are the nonzero eigenvalues of
/// `B_r^+ A`. In that case the pair is first balanced by a diagonal equivalence,
/// which leaves generalized eigenvalues unchanged and tames the decay of late samples.
pub fn mpm_eigenvalues(p: &PencilPair, rank: Option<usize>) -> Result<Vec<Complex64>> {
    let (m, n) = p.dims();
    match rank {
        None => {
            let (a, b) = balance_pair(&p.a, &p.b, false);
            let sv = singular_values(&b);
            let r = numerical_rank(&sv, m, n);
            if r < n {
                return Err(Error::RankDeficient { rank: r, cols: n });
            }
            compressed_eigenvalues(&a, &b, n)
        }
        Some(r) => {
            if r < 1 || r > n {
                return Err(Error::invalid(format!("rank {r} outside 1..={n}")));
            }
            let (a, b) = balance_pair(&p.a, &p.b, true);
            let sv = singular_values(&b);
            if sv.get(r - 1).is_none_or(|&s| s <= 0.0) {
                return Err(Error::RankDeficient { rank: numerical_rank(&sv, m, n), cols: r });
            }
            compressed_eigenvalues(&a, &b, r)
        }
    }
}

fn compressed_eigenvalues(a: &CMat, b: &CMat, r: usize) -> Result<Vec<Complex64>> {
    let svd = truncated_svd(b, r)?;
    let mut core = svd.u.adjoint() * a * &svd.v;
    for (i, s) in svd.sigma.iter().enumerate() {
        core.row_mut(i).scale_mut(1.0 / s);
    }
    eigenvalues(&core)
}
