//! Classification by rectangular numerical range (CRNR) and the Monte Carlo
//! harnesses around it.
//!
//! An observed signal is of class `Z` iff every `z` in `Z` lies in the 2-norm range
//! `W(A_y; B_y)` of its (denoised, rescaled) pencil.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glrt::{glrt_classify, Hypothesis};
use crate::numrange::{apply_scaling, frobenius_disk, FrobeniusDisk, MembershipConfig, MembershipResult, MembershipSolver, RadiusBound, ScalePolicy, Stage, Verdict};
use crate::pencil::{build_block_hankel, cadzow_denoise, estimate_order, split_pencil, CadzowConfig, OrderRule, PencilPair};
use crate::signal::{add_awgn, derive_seed, synth_mixture, CandidateClass, Mode, Signal};

/// Scaling constant used by [`CrnrConfig::default`].
///
/// With `||B||_2` normalized to `D`, the range of a noiseless ten-mode reference
/// pencil contains its own modes from `D ~ 1.45` on, and a disjoint ten-mode class
/// starts being accepted around `D ~ 1.8`. See [`calibrate_scale`].
pub const CRNR_D: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMode {
    Known(usize),
    /// Hard threshold on the Hankel singular values, see [`OrderRule`].
    Estimated,
}

impl OrderMode {
    pub fn label(&self) -> &'static str {
        match self {
            OrderMode::Known(_) => "known-order",
            OrderMode::Estimated => "estimated-order",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CrnrConfig {
    pub s: usize,
    pub n: usize,
    pub order: OrderMode,
    pub d: f64,
    pub scaling: ScalePolicy,
    /// `None` skips the reduced-rank approximation.
    pub cadzow: Option<CadzowConfig>,
    pub membership: MembershipConfig,
    pub order_rule: OrderRule,
    /// Residue of every synthesized mode on every look.
    #[serde(with = "crate::io::cplx")]
    pub residue: Complex64,
    pub looks: usize,
}

impl Default for CrnrConfig {
    fn default() -> Self {
        Self {
            s: 40,
            n: 20,
            order: OrderMode::Known(10),
            d: CRNR_D,
            scaling: ScalePolicy::Normalize,
            cadzow: Some(CadzowConfig::default()),
            membership: MembershipConfig { early_reject: true, ..MembershipConfig::default() },
            order_rule: OrderRule::default(),
            residue: Complex64::new(1.0, 0.0),
            looks: 1,
        }
    }
}

impl CrnrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d > 1.0) || !self.d.is_finite() {
            return Err(Error::invalid(format!("D must be finite and > 1, got {}", self.d)));
        }
        if self.n < 1 || self.s <= self.n {
            return Err(Error::invalid(format!("need s > n >= 1, got s = {}, n = {}", self.s, self.n)));
        }
        if let OrderMode::Known(0) = self.order {
            return Err(Error::invalid("known order must be at least 1"));
        }
        if self.looks < 1 {
            return Err(Error::invalid("looks must be at least 1"));
        }
        Ok(())
    }

    /// Samples consumed per observation.
    pub fn samples(&self) -> usize {
        self.s + self.n
    }

    fn with_cadzow(&self, on: bool) -> Self {
        let mut cfg = self.clone();
        if !on {
            cfg.cadzow = None;
        } else if cfg.cadzow.is_none() {
            cfg.cadzow = Some(CadzowConfig::default());
        }
        cfg
    }
}

/// The pencil an observation is judged by.
#[derive(Debug, Clone)]
pub struct ObservedPencil {
    pub pencil: PencilPair,
    pub order: usize,
    /// `None` when the reduced-rank approximation was skipped.
    pub cadzow_converged: Option<bool>,
}

/// Hankel matrix, reduced-rank approximation, split, rescaling.
pub fn observed_pencil(signal: &Signal, cfg: &CrnrConfig) -> Result<ObservedPencil> {
    cfg.validate()?;
    let h = build_block_hankel(signal, cfg.s, cfg.n)?;
    let order = match cfg.order {
        OrderMode::Known(m) => m,
        OrderMode::Estimated => estimate_order(&h, &cfg.order_rule)?,
    };
    let (h, cadzow_converged) = match &cfg.cadzow {
        Some(c) => {
            let out = cadzow_denoise(&h, order, c)?;
            (out.hankel, Some(out.converged))
        }
        None => (h, None),
    };
    let pencil = apply_scaling(&split_pencil(&h)?, cfg.d, cfg.scaling)?;
    Ok(ObservedPencil { pencil, order, cadzow_converged })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassDecision {
    pub class_name: String,
    pub is_member: bool,
    /// Results up to and including the first rejection.
    pub per_freq: Vec<MembershipResult>,
    /// Index of the rejected frequency and the stage that rejected it.
    pub rejected_at: Option<(usize, Stage)>,
    pub order: usize,
    pub cadzow_converged: Option<bool>,
}

pub fn crnr_classify(signal: &Signal, class: &CandidateClass, cfg: &CrnrConfig) -> Result<ClassDecision> {
    let observed = observed_pencil(signal, cfg)?;
    decide(&observed, class, &cfg.membership)
}

/// One decision per class, all against the same observed pencil.
pub fn crnr_classify_many(signal: &Signal, classes: &[CandidateClass], cfg: &CrnrConfig) -> Result<Vec<ClassDecision>> {
    let observed = observed_pencil(signal, cfg)?;
    classes.iter().map(|c| decide(&observed, c, &cfg.membership)).collect()
}

/// Frobenius-disk reject, then the 2-norm test, frequency by frequency; stops at
/// the first rejection.
pub fn decide(observed: &ObservedPencil, class: &CandidateClass, membership: &MembershipConfig) -> Result<ClassDecision> {
    if class.is_empty() {
        return Err(Error::invalid("candidate class is empty"));
    }
    let solver = MembershipSolver::new(&observed.pencil, membership)?;
    let disk = frobenius_disk(&observed.pencil)?;
    let tol = solver.tolerance();
    let mut per_freq = Vec::new();
    let mut rejected_at = None;
    for (k, &z) in class.freqs().iter().enumerate() {
        let result = if disk.contains(z, tol) {
            solver.test(z)?
        } else {
            disk_rejection(&disk, z, tol)
        };
        let accepted = result.verdict.accepts();
        let stage = result.stage;
        per_freq.push(result);
        if !accepted {
            rejected_at = Some((k, stage));
            break;
        }
    }
    Ok(ClassDecision {
        class_name: class.name.clone(),
        is_member: rejected_at.is_none(),
        per_freq,
        rejected_at,
        order: observed.order,
        cadzow_converged: observed.cadzow_converged,
    })
}

fn disk_rejection(disk: &FrobeniusDisk, z: Complex64, tol: f64) -> MembershipResult {
    // at lambda = c the Frobenius norm bounds f from above by r - |z - c| < 0
    MembershipResult {
        theta: z,
        delta: disk.radius - (z - disk.center).norm(),
        lambda_star: disk.center,
        verdict: Verdict::Outside,
        stage: Stage::DiskReject,
        radius: 0.0,
        bound: RadiusBound::Derived,
        tol,
        evaluations: 0,
    }
}

/// Smallest `D` among `candidates` (ascending) for which the pencil of `reference`,
/// normalized to `||B||_2 = D`, contains every frequency of `class`.
pub fn calibrate_scale(reference: &Signal, class: &CandidateClass, cfg: &CrnrConfig, candidates: &[f64]) -> Result<Option<f64>> {
    let mut sorted = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    for d in sorted {
        let trial = CrnrConfig { d, scaling: ScalePolicy::Normalize, ..cfg.clone() };
        if crnr_classify(reference, class, &trial)?.is_member {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Noiseless reference signal of a class: unit (or configured) residues on every
/// mode, `s + n` samples.
pub fn reference_signal(class: &CandidateClass, cfg: &CrnrConfig) -> Result<Signal> {
    let modes: Vec<Mode> = class
        .freqs()
        .iter()
        .map(|&z| Mode::new(z, vec![cfg.residue; cfg.looks]))
        .collect();
    synth_mixture(&modes, cfg.samples(), cfg.looks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Crnr,
    Glrt,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Crnr => "crnr",
            Method::Glrt => "glrt",
        }
    }
}

/// One line of a sweep: an error rate or a pair of disk means at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(with = "snr_serde")]
    pub snr_db: f64,
    pub method: String,
    pub variant: String,
    pub trials: usize,
    pub errors: Option<usize>,
    pub error_rate: Option<f64>,
    #[serde(with = "crate::io::cplx_opt")]
    pub disk_center_mean: Option<Complex64>,
    pub disk_radius_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    #[serde(with = "snr_serde::list")]
    pub snr_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn row(&self, snr_db: f64, method: &str, variant: &str) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| same_snr(r.snr_db, snr_db) && r.method == method && r.variant == variant)
    }

    /// Column `selector` of the rows matching `method` and `variant`, in grid order.
    pub fn series(&self, method: &str, variant: &str, selector: impl Fn(&SweepRow) -> Option<f64>) -> Vec<f64> {
        self.snr_grid
            .iter()
            .filter_map(|&snr| self.row(snr, method, variant).and_then(&selector))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Header: `snr_db,method,error_rate,disk_center_re,disk_center_im,disk_radius,variant`.
    /// Cells that do not apply to a row are empty.
    pub fn to_csv(&self) -> String {
        fn cell(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let mut out = String::from("snr_db,method,error_rate,disk_center_re,disk_center_im,disk_radius,variant\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.snr_db,
                r.method,
                cell(r.error_rate),
                cell(r.disk_center_mean.map(|c| c.re)),
                cell(r.disk_center_mean.map(|c| c.im)),
                cell(r.disk_radius_mean),
                r.variant
            );
        }
        out
    }
}

fn same_snr(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() < 1e-12
}

/// JSON has no infinity; the noiseless sentinel is written as the string `"inf"`.
mod snr_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Snr {
        Finite(f64),
        Text(String),
    }

    fn encode(v: f64) -> Snr {
        if v == f64::INFINITY {
            Snr::Text("inf".into())
        } else {
            Snr::Finite(v)
        }
    }

    fn decode<E: serde::de::Error>(s: Snr) -> Result<f64, E> {
        match s {
            Snr::Finite(v) => Ok(v),
            Snr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Snr::Text(t) => Err(E::custom(format!("invalid SNR `{t}`"))),
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        encode(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        decode(Snr::deserialize(d)?)
    }

    pub mod list {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|&x| encode(x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Snr>::deserialize(d)?.into_iter().map(decode).collect()
        }
    }
}

fn check_sweep(snr_grid: &[f64], trials: usize) -> Result<()> {
    if trials < 1 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if snr_grid.is_empty() {
        return Err(Error::invalid("SNR grid is empty"));
    }
    if let Some(v) = snr_grid.iter().find(|v| v.is_nan() || **v == f64::NEG_INFINITY) {
        return Err(Error::invalid(format!("invalid SNR {v}")));
    }
    Ok(())
}

/// Observation of trial `trial` at `snr_db`. The noise stream depends on `(seed, trial)`
/// only, so every SNR and every method sees the same underlying realization.
fn observation(clean: &Signal, snr_db: f64, seed: u64, trial: usize) -> Result<Signal> {
    add_awgn(clean, snr_db, derive_seed(seed, trial as u64))
}

/// Ensemble means of the Frobenius disk with and without the reduced-rank step.
pub fn disk_geometry_sweep(z_true: &CandidateClass, snr_grid: &[f64], trials: usize, cfg: &CrnrConfig, seed: u64) -> Result<SweepReport> {
    check_sweep(snr_grid, trials)?;
    cfg.validate()?;
    let clean = reference_signal(z_true, cfg)?;
    let variants = [("cadzow", cfg.with_cadzow(true)), ("raw", cfg.with_cadzow(false))];
    let mut rows = Vec::new();
    for &snr in snr_grid {
        let disks: Vec<[FrobeniusDisk; 2]> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let y = observation(&clean, snr, seed, t)?;
                let on = frobenius_disk(&observed_pencil(&y, &variants[0].1)?.pencil)?;
                let off = frobenius_disk(&observed_pencil(&y, &variants[1].1)?.pencil)?;
                Ok([on, off])
            })
            .collect::<Result<_>>()?;
        for (v, (name, _)) in variants.iter().enumerate() {
            let center = disks.iter().map(|d| d[v].center).sum::<Complex64>() / trials as f64;
            let radius = disks.iter().map(|d| d[v].radius).sum::<f64>() / trials as f64;
            rows.push(SweepRow {
                snr_db: snr,
                method: "disk".into(),
                variant: (*name).into(),
                trials,
                errors: None,
                error_rate: None,
                disk_center_mean: Some(center),
                disk_radius_mean: Some(radius),
            });
        }
    }
    Ok(SweepReport { snr_grid: snr_grid.to_vec(), trials, seed, rows })
}

/// Fraction of trials in which a `z_true` observation is accepted as `z_candidate`.
///
/// CRNR errs when every candidate frequency lies in the observed range. The
/// likelihood-ratio baseline errs when it prefers `z_candidate` over `z_true`; in
/// estimated-order mode both classes are cut to their `M` largest-magnitude
/// frequencies, `M` being the order estimated from the observation.
pub fn error_rate_sweep(
    z_true: &CandidateClass,
    z_candidate: &CandidateClass,
    snr_grid: &[f64],
    trials: usize,
    methods: &[Method],
    cfg: &CrnrConfig,
    seed: u64,
) -> Result<SweepReport> {
    check_sweep(snr_grid, trials)?;
    cfg.validate()?;
    if z_true.same_set(z_candidate) {
        return Err(Error::invalid("true and candidate classes coincide"));
    }
    let report = acceptance_sweep(z_true, z_candidate, snr_grid, trials, methods, cfg, seed)?;
    Ok(report)
}

/// Like [`error_rate_sweep`] without the distinct-class requirement: with
/// `z_candidate = z_true` the reported rate is the self-acceptance rate.
pub fn acceptance_sweep(
    z_true: &CandidateClass,
    z_candidate: &CandidateClass,
    snr_grid: &[f64],
    trials: usize,
    methods: &[Method],
    cfg: &CrnrConfig,
    seed: u64,
) -> Result<SweepReport> {
    check_sweep(snr_grid, trials)?;
    cfg.validate()?;
    if methods.is_empty() {
        return Err(Error::invalid("no methods selected"));
    }
    let clean = reference_signal(z_true, cfg)?;
    let l = cfg.samples() - 1;
    let mut rows = Vec::new();
    for &snr in snr_grid {
        let outcomes: Vec<Vec<bool>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let y = observation(&clean, snr, seed, t)?;
                let observed = observed_pencil(&y, cfg)?;
                methods
                    .iter()
                    .map(|m| match m {
                        Method::Crnr => Ok(decide(&observed, z_candidate, &cfg.membership)?.is_member),
                        Method::Glrt => {
                            let (h1, h2) = match cfg.order {
                                OrderMode::Known(_) => (z_true.clone(), z_candidate.clone()),
                                OrderMode::Estimated => (z_true.largest(observed.order)?, z_candidate.largest(observed.order)?),
                            };
                            if h1.same_set(&h2) {
                                // identical hypotheses tie, and ties go to the true class
                                return Ok(false);
                            }
                            Ok(glrt_classify(&y, &h1, &h2, l)?.decision == Hypothesis::H2)
                        }
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (i, m) in methods.iter().enumerate() {
            let errors = outcomes.iter().filter(|o| o[i]).count();
            rows.push(SweepRow {
                snr_db: snr,
                method: m.label().into(),
                variant: cfg.order.label().into(),
                trials,
                errors: Some(errors),
                error_rate: Some(errors as f64 / trials as f64),
                disk_center_mean: None,
                disk_radius_mean: None,
            });
        }
    }
    Ok(SweepReport { snr_grid: snr_grid.to_vec(), trials, seed, rows })
}
