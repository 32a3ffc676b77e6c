//! Block-Hankel construction, the `(A, B)` pencil split, Cadzow reduced-rank
//! approximation and singular-value order estimation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, singular_values, truncated_svd, CMat};
use crate::signal::Signal;

/// Shape parameters of a block-Hankel matrix: `s` block rows, `n + 1` columns, `k` looks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HankelShape {
    pub s: usize,
    pub n: usize,
    pub k: usize,
}

impl HankelShape {
    pub fn rows(&self) -> usize {
        self.s * self.k
    }

    /// Number of vector samples `y_0 .. y_{s+n-1}` the matrix holds.
    pub fn samples(&self) -> usize {
        self.s + self.n
    }
}

/// `sK x (n+1)` matrix whose block `(i, j)` is the vector sample `y_{i+j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHankel {
    data: CMat,
    shape: HankelShape,
}

impl BlockHankel {
    pub fn matrix(&self) -> &CMat {
        &self.data
    }

    pub fn shape(&self) -> HankelShape {
        self.shape
    }

    /// The vector samples encoded by the matrix, read off the first block
    /// column and the last block row.
    pub fn samples(&self) -> Vec<Complex64> {
        let HankelShape { s, n, k } = self.shape;
        let mut out = Vec::with_capacity((s + n) * k);
        for d in 0..s + n {
            let i = d.min(s - 1);
            let j = d - i;
            out.extend((0..k).map(|kk| self.data[(i * k + kk, j)]));
        }
        out
    }

    pub fn to_signal(&self) -> Result<Signal> {
        Signal::from_samples(self.shape.samples(), self.shape.k, self.samples())
    }

    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.data)
    }

    /// Largest deviation from the block anti-diagonal mean; zero for an exact block-Hankel.
    pub fn structure_defect(&self) -> f64 {
        let avg = hankel_average(&self.data, self.shape).expect("shape is consistent");
        (&avg.data - &self.data).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn build_block_hankel(signal: &Signal, s: usize, n: usize) -> Result<BlockHankel> {
    if n < 1 || s <= n {
        return Err(Error::invalid(format!("need s > n >= 1, got s={s}, n={n}")));
    }
    if signal.len() < s + n {
        return Err(Error::InsufficientSamples { needed: s + n, available: signal.len() });
    }
    let k = signal.looks();
    let data = CMat::from_fn(s * k, n + 1, |r, j| signal.at(r / k + j, r % k));
    Ok(BlockHankel { data, shape: HankelShape { s, n, k } })
}

/// Averages every block anti-diagonal of `x`, producing the nearest block-Hankel
/// matrix in Frobenius norm.
pub fn hankel_average(x: &CMat, shape: HankelShape) -> Result<BlockHankel> {
    let HankelShape { s, n, k } = shape;
    if x.nrows() != s * k || x.ncols() != n + 1 {
        return Err(Error::invalid(format!(
            "matrix is {}x{}, shape expects {}x{}",
            x.nrows(),
            x.ncols(),
            s * k,
            n + 1
        )));
    }
    let mut sums = vec![Complex64::new(0.0, 0.0); (s + n) * k];
    let mut counts = vec![0usize; s + n];
    for i in 0..s {
        for j in 0..=n {
            counts[i + j] += 1;
            for kk in 0..k {
                sums[(i + j) * k + kk] += x[(i * k + kk, j)];
            }
        }
    }
    for (d, &c) in counts.iter().enumerate() {
        for kk in 0..k {
            sums[d * k + kk] /= c as f64;
        }
    }
    let data = CMat::from_fn(s * k, n + 1, |r, j| sums[(r / k + j) * k + r % k]);
    Ok(BlockHankel { data, shape })
}

/// The pencil `A - lambda B`, with `A` the Hankel matrix minus its first column and
/// `B` minus its last column.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilPair {
    pub a: CMat,
    pub b: CMat,
    /// Factor already applied to both matrices.
    pub scale: Complex64,
    pub shape: Option<HankelShape>,
}

impl PencilPair {
    /// A general pencil not tied to a Hankel matrix.
    pub fn new(a: CMat, b: CMat) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::invalid(format!("A is {:?} but B is {:?}", a.shape(), b.shape())));
        }
        if a.is_empty() {
            return Err(Error::invalid("empty pencil"));
        }
        Ok(Self { a, b, scale: Complex64::new(1.0, 0.0), shape: None })
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            a: self.a.scale_c(alpha),
            b: self.b.scale_c(alpha),
            scale: self.scale * alpha,
            shape: self.shape,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.a.shape()
    }

    /// `A - lambda B`.
    pub fn at(&self, lambda: Complex64) -> CMat {
        &self.a - self.b.scale_c(lambda)
    }
}

trait ScaleComplex {
    fn scale_c(&self, alpha: Complex64) -> CMat;
}

impl ScaleComplex for CMat {
    fn scale_c(&self, alpha: Complex64) -> CMat {
        self.map(|z| z * alpha)
    }
}

pub fn split_pencil(h: &BlockHankel) -> Result<PencilPair> {
    let cols = h.data.ncols();
    if cols < 2 {
        return Err(Error::invalid("the Hankel matrix needs at least two columns"));
    }
    Ok(PencilPair {
        a: h.data.columns(1, cols - 1).into_owned(),
        b: h.data.columns(0, cols - 1).into_owned(),
        scale: Complex64::new(1.0, 0.0),
        shape: Some(h.shape),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CadzowConfig {
    /// Absolute stopping threshold; `None` means `1e-8 * ||H||_F`.
    pub eps: Option<f64>,
    pub max_iter: usize,
}

impl Default for CadzowConfig {
    fn default() -> Self {
        Self { eps: None, max_iter: 50 }
    }
}

#[derive(Debug, Clone)]
pub struct CadzowOutcome {
    pub hankel: BlockHankel,
    pub iterations: usize,
    pub converged: bool,
    /// `||T(L(X)) - L(X)||_F` after every iteration.
    pub residuals: Vec<f64>,
    /// Whether the last three residuals are non-increasing.
    pub tail_monotone: bool,
}

/// Alternates rank-`order` truncation and block anti-diagonal averaging until the
/// averaged matrix is within `eps` of its low-rank preimage.
pub fn cadzow_denoise(h: &BlockHankel, order: usize, cfg: &CadzowConfig) -> Result<CadzowOutcome> {
    let (m, cols) = h.data.shape();
    if order < 1 || order > m.min(cols) {
        return Err(Error::invalid(format!("order {order} outside 1..={}", m.min(cols))));
    }
    if cfg.max_iter < 1 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    let eps = match cfg.eps {
        Some(e) if e > 0.0 && e.is_finite() => e,
        Some(e) => return Err(Error::invalid(format!("eps must be positive, got {e}"))),
        None => 1e-8 * frobenius_norm(&h.data),
    };
    let mut current = h.clone();
    let mut residuals = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let low = truncated_svd(&current.data, order)?.reconstruct();
        let next = hankel_average(&low, h.shape)?;
        let r = frobenius_norm(&(&next.data - &low));
        residuals.push(r);
        current = next;
        if r < eps || r == 0.0 {
            converged = true;
            break;
        }
    }
    let tail = &residuals[residuals.len().saturating_sub(3)..];
    let tail_monotone = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-300);
    Ok(CadzowOutcome {
        hankel: current,
        iterations: residuals.len(),
        converged,
        residuals,
        tail_monotone,
    })
}

/// Median-scaled hard threshold on the singular values of a Hankel matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OrderRule {
    /// Multiplier on the median singular value; `None` picks the aspect-ratio
    /// dependent optimal hard-threshold coefficient for unknown noise level.
    pub omega: Option<f64>,
}

impl OrderRule {
    pub fn omega_for(&self, rows: usize, cols: usize) -> f64 {
        self.omega.unwrap_or_else(|| {
            let beta = rows.min(cols) as f64 / rows.max(cols) as f64;
            0.56 * beta.powi(3) - 0.95 * beta.powi(2) + 1.82 * beta + 1.43
        })
    }
}

pub fn estimate_order(h: &BlockHankel, rule: &OrderRule) -> Result<usize> {
    let sv = h.singular_values();
    order_from_singular_values(&sv, h.data.nrows(), h.data.ncols(), rule)
}

pub fn order_from_singular_values(sv: &[f64], rows: usize, cols: usize, rule: &OrderRule) -> Result<usize> {
    if sv.first().is_none_or(|&s| s == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let mut sorted = sv.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    let cutoff = rule.omega_for(rows, cols) * median;
    Ok(sv.iter().filter(|&&s| s > cutoff).count().max(1))
}
