//! Multi-look sums of damped complex exponentials.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// One damped complex exponential: `c_k * z^(t - delay)` for `t >= delay`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub z: Complex64,
    /// One residue per look.
    pub residues: Vec<Complex64>,
    /// Onset in samples; the mode contributes nothing before it.
    pub delay: usize,
}

impl Mode {
    pub fn new(z: Complex64, residues: Vec<Complex64>) -> Self {
        Self { z, residues, delay: 0 }
    }

    pub fn with_delay(mut self, delay: usize) -> Self {
        self.delay = delay;
        self
    }

    /// Unit residue on every look for each frequency.
    pub fn unit_modes(freqs: &[Complex64], looks: usize) -> Vec<Mode> {
        freqs
            .iter()
            .map(|&z| Mode::new(z, vec![Complex64::new(1.0, 0.0); looks]))
            .collect()
    }
}

/// How a signal was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMeta {
    pub modes: Vec<Mode>,
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
    /// Cumulative factor applied by [`scale_signal`].
    pub scale: Complex64,
}

impl Default for SignalMeta {
    fn default() -> Self {
        Self {
            modes: Vec::new(),
            snr_db: None,
            seed: None,
            scale: Complex64::new(1.0, 0.0),
        }
    }
}

/// A `T x K` complex time series stored sample-major: entry `(t, k)` lives at `t * K + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    len: usize,
    looks: usize,
    samples: Vec<Complex64>,
    pub meta: Option<SignalMeta>,
}

impl Signal {
    pub fn from_samples(len: usize, looks: usize, samples: Vec<Complex64>) -> Result<Self> {
        if len == 0 || looks == 0 {
            return Err(Error::invalid("a signal needs T >= 1 and K >= 1"));
        }
        if samples.len() != len * looks {
            return Err(Error::invalid(format!(
                "expected {} samples for T={len}, K={looks}, got {}",
                len * looks,
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|z| !z.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(Self { len, looks, samples, meta: None })
    }

    /// Single-look signal from a scalar sequence.
    pub fn from_scalar(samples: Vec<Complex64>) -> Result<Self> {
        let len = samples.len();
        Self::from_samples(len, 1, samples)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn looks(&self) -> usize {
        self.looks
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// The vector sample `y_t` (one entry per look).
    pub fn sample(&self, t: usize) -> &[Complex64] {
        &self.samples[t * self.looks..(t + 1) * self.looks]
    }

    pub fn at(&self, t: usize, k: usize) -> Complex64 {
        self.samples[t * self.looks + k]
    }

    /// Mean squared magnitude over all `T * K` entries.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Keep the first `len` samples.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len {
            return Err(Error::InsufficientSamples { needed: len, available: self.len });
        }
        let mut out = Self::from_samples(len, self.looks, self.samples[..len * self.looks].to_vec())?;
        out.meta = self.meta.clone();
        Ok(out)
    }

    fn meta_mut(&mut self) -> &mut SignalMeta {
        self.meta.get_or_insert_with(SignalMeta::default)
    }
}

/// A named set of candidate complex frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateClass {
    pub name: String,
    freqs: Vec<Complex64>,
}

impl CandidateClass {
    pub fn new(name: impl Into<String>, freqs: Vec<Complex64>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::invalid("a candidate class needs at least one frequency"));
        }
        if let Some(i) = freqs.iter().position(|z| !z.is_finite()) {
            return Err(Error::invalid(format!("frequency {i} is not finite")));
        }
        for i in 0..freqs.len() {
            for j in i + 1..freqs.len() {
                if freqs[i] == freqs[j] {
                    return Err(Error::invalid(format!("frequencies {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { name: name.into(), freqs })
    }

    pub fn freqs(&self) -> &[Complex64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// The `p` frequencies of largest magnitude, in their original order.
    pub fn largest(&self, p: usize) -> Result<Self> {
        let p = p.clamp(1, self.freqs.len());
        let mut idx: Vec<usize> = (0..self.freqs.len()).collect();
        idx.sort_by(|&a, &b| self.freqs[b].norm().total_cmp(&self.freqs[a].norm()));
        let mut keep = idx[..p].to_vec();
        keep.sort_unstable();
        Self::new(self.name.clone(), keep.into_iter().map(|i| self.freqs[i]).collect())
    }

    /// Same set as another class, ignoring order.
    pub fn same_set(&self, other: &Self) -> bool {
        self.freqs.len() == other.freqs.len() && self.freqs.iter().all(|z| other.freqs.contains(z))
    }

    /// Ten-mode reference class used for the disk-geometry and error-rate experiments.
    pub fn z1() -> Self {
        Self::new("Z1", conjugate_pairs(&[(0.4474, 0.5822), (0.4447, 0.5782), (0.4236, 0.5874), (0.4166, 0.5959), (0.3871, 0.5858)]))
            .expect("static class is valid")
    }

    /// Ten-mode alternative class.
    pub fn z2() -> Self {
        Self::new("Z2", conjugate_pairs(&[(0.0429, 0.0825), (-0.4130, 0.1176), (-0.3118, 0.2127), (-0.1951, 0.3642), (-0.3385, 0.1249)]))
            .expect("static class is valid")
    }
}

fn conjugate_pairs(upper: &[(f64, f64)]) -> Vec<Complex64> {
    upper
        .iter()
        .flat_map(|&(re, im)| [Complex64::new(re, im), Complex64::new(re, -im)])
        .collect()
}

/// Noiseless mixture `y_t = sum_i c_i z_i^(t - tau_i)` over `len` samples and `looks` looks.
pub fn synth_mixture(modes: &[Mode], len: usize, looks: usize) -> Result<Signal> {
    if len == 0 || looks == 0 {
        return Err(Error::invalid("a signal needs T >= 1 and K >= 1"));
    }
    for (i, m) in modes.iter().enumerate() {
        if m.residues.len() != looks {
            return Err(Error::ResidueMismatch { mode: i, got: m.residues.len(), looks });
        }
        if !m.z.is_finite() || m.residues.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("mode {i} has non-finite parameters")));
        }
    }
    let mut samples = vec![Complex64::new(0.0, 0.0); len * looks];
    for m in modes {
        let mut power = Complex64::new(1.0, 0.0);
        for t in m.delay..len {
            for (k, c) in m.residues.iter().enumerate() {
                samples[t * looks + k] += c * power;
            }
            power *= m.z;
        }
    }
    let mut sig = Signal::from_samples(len, looks, samples)?;
    sig.meta = Some(SignalMeta { modes: modes.to_vec(), ..SignalMeta::default() });
    Ok(sig)
}

/// Adds circular complex white Gaussian noise at the requested SNR.
///
/// The noise variance per entry is `mean_power / 10^(snr_db / 10)`. `snr_db = +inf`
/// returns the input unchanged.
pub fn add_awgn(signal: &Signal, snr_db: f64, seed: u64) -> Result<Signal> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::invalid(format!("snr_db must be a number or +inf, got {snr_db}")));
    }
    if snr_db == f64::INFINITY {
        return Ok(signal.clone());
    }
    let power = signal.mean_power();
    if power == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let sigma = (power / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = signal.clone();
    for z in out.samples.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *z += Complex64::new(re, im) * sigma;
    }
    let meta = out.meta_mut();
    meta.snr_db = Some(snr_db);
    meta.seed = Some(seed);
    Ok(out)
}

pub fn scale_signal(signal: &Signal, alpha: Complex64) -> Result<Signal> {
    if alpha == Complex64::new(0.0, 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("scale factor must be finite and nonzero, got {alpha}")));
    }
    let mut out = signal.clone();
    for z in out.samples.iter_mut() {
        *z *= alpha;
    }
    let meta = out.meta_mut();
    meta.scale *= alpha;
    Ok(out)
}

/// Independent per-trial seed derived from a run seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
