//! Command-line front end. Every command writes its artifacts under `--out-dir` and
//! prints a one-line JSON summary on standard output.
//!
//! Exit codes: 0 ok, 2 usage or input error, 3 numerical failure, 4 non-convergence.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::classify::{
    acceptance_sweep, decide, disk_geometry_sweep, error_rate_sweep, observed_pencil, CrnrConfig, Method, OrderMode, CRNR_D,
};
use crate::error::{Error, Result};
use crate::glrt::{glrt_classify, Hypothesis};
use crate::io::{grid_csv, load_class_file, load_signal, polygon_csv, save_signal, singular_values_csv, write_json};
use crate::numrange::{
    classical_range_boundary, frobenius_disk, g_map, membership, rect_range_boundary, LambdaGrid, MembershipConfig, ScalePolicy,
};
use crate::pencil::{build_block_hankel, estimate_order, CadzowConfig, OrderRule};
use crate::signal::{add_awgn, synth_mixture, Mode, Signal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "crnr", version, about = "Classify sums of damped complex exponentials by rectangular numerical range")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a (noisy) signal from a class file.
    Synth(SynthArgs),
    /// Test a signal against one or more classes.
    Classify(ClassifyArgs),
    /// Error rate versus SNR for CRNR and the likelihood-ratio baseline.
    SweepError(SweepErrorArgs),
    /// Mean Frobenius disk versus SNR, with and without the reduced-rank step.
    SweepDisk(SweepDiskArgs),
    /// Smallest singular value of A - lambda B on a grid.
    Gmap(GmapArgs),
    /// Outer boundary of the 2-norm range of a signal's pencil.
    Boundary(BoundaryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scaling {
    Normalize,
    IfBelowOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Crnr,
    Glrt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + h * i as f64).collect()
    }
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(format!("expected min:max:steps, got `{s}`"));
    };
    let min: f64 = lo.trim().parse().map_err(|e| format!("bad minimum `{lo}`: {e}"))?;
    let max: f64 = hi.trim().parse().map_err(|e| format!("bad maximum `{hi}`: {e}"))?;
    let steps: usize = steps.trim().parse().map_err(|e| format!("bad step count `{steps}`: {e}"))?;
    if !(min.is_finite() && max.is_finite()) || max < min || steps < 1 || (steps > 1 && max == min) {
        return Err(format!("need finite min < max and steps >= 1, got `{s}`"));
    }
    Ok(Axis { min, max, steps })
}

fn parse_order(s: &str) -> std::result::Result<OrderMode, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(OrderMode::Estimated);
    }
    match s.parse::<usize>() {
        Ok(m) if m >= 1 => Ok(OrderMode::Known(m)),
        _ => Err(format!("expected a positive integer or `auto`, got `{s}`")),
    }
}

fn parse_snr(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("+inf") {
        return Ok(f64::INFINITY);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a number in dB or `inf`, got `{s}`")),
    }
}

/// Pencil, reduced-rank and membership settings shared by the analysis commands.
#[derive(Debug, Clone, Args)]
pub struct PencilArgs {
    /// Block rows of the Hankel matrix (default: samples minus n).
    #[arg(long)]
    pub s: Option<usize>,
    /// Pencil parameter (default: a third of the samples).
    #[arg(long)]
    pub n: Option<usize>,
    /// Model order: a positive integer or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_order)]
    pub order: OrderMode,
    /// Reduced-rank Hankel approximation.
    #[arg(long, value_enum, default_value = "on")]
    pub cadzow: Switch,
    #[arg(long, default_value_t = 50)]
    pub cadzow_max_iter: usize,
    /// Absolute Cadzow stopping threshold (default 1e-8 ||H||_F).
    #[arg(long)]
    pub cadzow_eps: Option<f64>,
    /// Scaling constant: target ||B||_2 after rescaling.
    #[arg(long = "D", default_value_t = CRNR_D)]
    pub d: f64,
    #[arg(long, value_enum, default_value = "normalize")]
    pub scaling: Scaling,
    /// Rays through a candidate in the coarse membership search.
    #[arg(long, default_value_t = 64)]
    pub angles: usize,
    /// Coarse minima refined locally.
    #[arg(long, default_value_t = 8)]
    pub refine_seeds: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub refine_tol: f64,
    /// Override of the lambda search radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Exit with code 4 when the reduced-rank iteration does not converge.
    #[arg(long)]
    pub require_convergence: bool,
}

impl PencilArgs {
    /// `(s, n)` for `len` available samples.
    pub fn shape_for(&self, len: usize) -> Result<(usize, usize)> {
        let (s, n) = match (self.s, self.n) {
            (Some(s), Some(n)) => (s, n),
            (Some(s), None) => (s, len.saturating_sub(s)),
            (None, Some(n)) => (len.saturating_sub(n), n),
            (None, None) => {
                let n = len / 3;
                (len - n, n)
            }
        };
        if n < 1 || s <= n {
            return Err(Error::invalid(format!("need s > n >= 1, got s = {s}, n = {n} for {len} samples")));
        }
        if (n as f64) < s as f64 / 2.0 || n > 2 * s {
            eprintln!("warning: n = {n} lies outside [s/2, 2s] = [{}, {}]", s as f64 / 2.0, 2 * s);
        }
        Ok((s, n))
    }

    pub fn config(&self, len: usize) -> Result<CrnrConfig> {
        let (s, n) = self.shape_for(len)?;
        self.config_with_shape(s, n)
    }

    pub fn config_with_shape(&self, s: usize, n: usize) -> Result<CrnrConfig> {
        let cfg = CrnrConfig {
            s,
            n,
            order: self.order,
            d: self.d,
            scaling: match self.scaling {
                Scaling::Normalize => ScalePolicy::Normalize,
                Scaling::IfBelowOne => ScalePolicy::IfBelowOne,
            },
            cadzow: match self.cadzow {
                Switch::On => Some(CadzowConfig { eps: self.cadzow_eps, max_iter: self.cadzow_max_iter }),
                Switch::Off => None,
            },
            membership: MembershipConfig {
                angles: self.angles,
                seeds: self.refine_seeds,
                refine_tol: self.refine_tol,
                radius_override: self.radius,
                early_reject: true,
                require_scaled: true,
            },
            ..CrnrConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

impl OutArgs {
    fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)?;
        Ok(self.out_dir.join(name))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub class_file: PathBuf,
    /// Samples per look.
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub looks: usize,
    /// Noise level; `inf` gives a noiseless signal.
    #[arg(long, default_value = "inf", value_parser = parse_snr)]
    pub snr_db: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "signal.json")]
    pub name: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub signal: PathBuf,
    /// Candidate class; repeat for several. The likelihood-ratio method takes
    /// exactly two (H1 then H2).
    #[arg(long, required = true)]
    pub class_file: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "crnr")]
    pub method: MethodArg,
    #[command(flatten)]
    pub pencil: PencilArgs,
    /// Also write the full decisions to `<out-dir>/decisions.json`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// SNR grid in dB, comma separated; `inf` is the noiseless sentinel.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_snr)]
    pub snr_db: Vec<f64>,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Samples per trial (`s + n`).
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
    #[command(flatten)]
    pub pencil: PencilArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepErrorArgs {
    /// Class the observations are drawn from.
    #[arg(long)]
    pub true_class_file: PathBuf,
    /// Class the observations are tested against.
    #[arg(long)]
    pub class_file: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "crnr,glrt")]
    pub methods: Vec<MethodArg>,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepDiskArgs {
    /// Class the observations are drawn from.
    #[arg(long)]
    pub class_file: PathBuf,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GmapArgs {
    #[arg(long)]
    pub signal: PathBuf,
    /// Real axis as `min:max:steps`.
    #[arg(long = "grid", alias = "grid-re", default_value = "-1.2:1.2:121", value_parser = parse_axis)]
    pub grid_re: Axis,
    /// Imaginary axis as `min:max:steps`.
    #[arg(long, default_value = "-1.2:1.2:121", value_parser = parse_axis)]
    pub grid_im: Axis,
    /// Number of grid minima listed in the summary.
    #[arg(long, default_value_t = 4)]
    pub minima: usize,
    #[command(flatten)]
    pub pencil: PencilArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub signal: PathBuf,
    /// Frequencies to test for membership and report with the boundary.
    #[arg(long)]
    pub class_file: Option<PathBuf>,
    /// Lambda grid steps per axis at the first pass.
    #[arg(long, default_value_t = 32)]
    pub lambda_steps: usize,
    #[arg(long, default_value_t = 128)]
    pub lambda_max_steps: usize,
    /// Directions sampled on the boundary.
    #[arg(long, default_value_t = 360)]
    pub rays: usize,
    #[command(flatten)]
    pub pencil: PencilArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(Failure::NotConverged(summary)) => {
            println!("{summary}");
            eprintln!("error: the reduced-rank approximation did not converge");
            EXIT_NONCONVERGENCE
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Schema { .. } | Error::Io(_) | Error::InsufficientSamples { .. } | Error::ResidueMismatch { .. } => {
            EXIT_USAGE
        }
        Error::ZeroSignal
        | Error::ZeroMatrix
        | Error::FrobeniusBelowOne(_)
        | Error::Unscaled(_)
        | Error::RankDeficient { .. }
        | Error::Numeric(_) => EXIT_NUMERIC,
    }
}

#[derive(Debug)]
pub enum Failure {
    Error(Error),
    /// Finished, but the reduced-rank step did not converge and convergence was required.
    NotConverged(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

pub fn run(command: &Command) -> std::result::Result<Value, Failure> {
    match command {
        Command::Synth(a) => Ok(synth(a)?),
        Command::Classify(a) => classify(a),
        Command::SweepError(a) => Ok(with_workers(a.sweep.workers, || sweep_error(a))?),
        Command::SweepDisk(a) => Ok(with_workers(a.sweep.workers, || sweep_disk(a))?),
        Command::Gmap(a) => gmap(a),
        Command::Boundary(a) => boundary(a),
    }
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match workers {
        None => f(),
        Some(0) => Err(Error::invalid("workers must be at least 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {w} workers: {e}")))?
            .install(f),
    }
}

fn cplx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn snr_value(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

fn check_convergence(summary: Value, converged: Option<bool>, required: bool) -> std::result::Result<Value, Failure> {
    if required && converged == Some(false) {
        Err(Failure::NotConverged(summary))
    } else {
        Ok(summary)
    }
}

fn synth(a: &SynthArgs) -> Result<Value> {
    let class = load_class_file(&a.class_file)?;
    let modes = Mode::unit_modes(class.freqs(), a.looks);
    let clean = synth_mixture(&modes, a.samples, a.looks)?;
    let signal = add_awgn(&clean, a.snr_db, a.seed)?;
    let path = a.out.path(&a.name)?;
    save_signal(&path, &signal)?;
    Ok(json!({
        "command": "synth",
        "signal": path,
        "class": class.name,
        "T": signal.len(),
        "K": signal.looks(),
        "snr_db": snr_value(a.snr_db),
        "seed": a.seed,
    }))
}

fn classify(a: &ClassifyArgs) -> std::result::Result<Value, Failure> {
    let signal = load_signal(&a.signal)?;
    let classes = a.class_file.iter().map(load_class_file).collect::<Result<Vec<_>>>()?;
    let cfg = a.pencil.config(signal.len())?;
    if a.method == MethodArg::Glrt {
        let [h1, h2] = &classes[..] else {
            return Err(Error::invalid("the likelihood-ratio method needs exactly two class files").into());
        };
        let d = glrt_classify(&signal, h1, h2, cfg.samples() - 1)?;
        let winner = if d.decision == Hypothesis::H1 { &h1.name } else { &h2.name };
        if let Some(dir) = &a.out_dir {
            fs::create_dir_all(dir).map_err(Error::from)?;
            write_json(dir.join("decisions.json"), &d)?;
        }
        return Ok(json!({
            "command": "classify",
            "method": "glrt",
            "decision": d.decision,
            "class": winner,
            "residual_h1": d.residual_h1,
            "residual_h2": d.residual_h2,
            "calibrated": d.calibrated,
        }));
    }
    let observed = observed_pencil(&signal, &cfg)?;
    let decisions = classes
        .iter()
        .map(|c| decide(&observed, c, &cfg.membership))
        .collect::<Result<Vec<_>>>()?;
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).map_err(Error::from)?;
        write_json(dir.join("decisions.json"), &decisions)?;
    }
    let brief: Vec<Value> = decisions
        .iter()
        .map(|d| {
            json!({
                "class": d.class_name,
                "is_member": d.is_member,
                "rejected_at": d.rejected_at.map(|(k, stage)| json!({"index": k, "stage": stage})),
            })
        })
        .collect();
    let mut summary = json!({
        "command": "classify",
        "method": "crnr",
        "s": cfg.s,
        "n": cfg.n,
        "order": observed.order,
        "cadzow_converged": observed.cadzow_converged,
        "decisions": brief,
    });
    if let [only] = &decisions[..] {
        summary["is_member"] = json!(only.is_member);
    }
    check_convergence(summary, observed.cadzow_converged, a.pencil.require_convergence)
}

fn sweep_config(s: &SweepArgs) -> Result<(CrnrConfig, Vec<f64>)> {
    let cfg = s.pencil.config(s.samples)?;
    Ok((cfg, s.snr_db.clone()))
}

fn sweep_error(a: &SweepErrorArgs) -> Result<Value> {
    let z_true = load_class_file(&a.true_class_file)?;
    let z_cand = load_class_file(&a.class_file)?;
    let (cfg, mut grid) = sweep_config(&a.sweep)?;
    if grid.is_empty() {
        grid = vec![-5.0, 0.0, 5.0, 10.0, 15.0, 20.0];
    }
    let methods: Vec<Method> = a
        .methods
        .iter()
        .map(|m| match m {
            MethodArg::Crnr => Method::Crnr,
            MethodArg::Glrt => Method::Glrt,
        })
        .collect();
    let report = if z_true.same_set(&z_cand) {
        acceptance_sweep(&z_true, &z_cand, &grid, a.sweep.trials, &methods, &cfg, a.sweep.seed)?
    } else {
        error_rate_sweep(&z_true, &z_cand, &grid, a.sweep.trials, &methods, &cfg, a.sweep.seed)?
    };
    let (json_path, csv_path) = (a.sweep.out.path("sweep_error.json")?, a.sweep.out.path("sweep_error.csv")?);
    fs::write(&json_path, report.to_json())?;
    fs::write(&csv_path, report.to_csv())?;
    Ok(json!({
        "command": "sweep-error",
        "json": json_path,
        "csv": csv_path,
        "trials": report.trials,
        "seed": report.seed,
        "snr_db": report.snr_grid.iter().map(|&v| snr_value(v)).collect::<Vec<_>>(),
        "error_rate": report.rows.iter().map(|r| json!({"snr_db": snr_value(r.snr_db), "method": r.method, "rate": r.error_rate})).collect::<Vec<_>>(),
    }))
}

fn sweep_disk(a: &SweepDiskArgs) -> Result<Value> {
    let z_true = load_class_file(&a.class_file)?;
    let (cfg, mut grid) = sweep_config(&a.sweep)?;
    if grid.is_empty() {
        grid = vec![0.0, 10.0, 20.0, 30.0];
    }
    let report = disk_geometry_sweep(&z_true, &grid, a.sweep.trials, &cfg, a.sweep.seed)?;
    let (json_path, csv_path) = (a.sweep.out.path("sweep_disk.json")?, a.sweep.out.path("sweep_disk.csv")?);
    fs::write(&json_path, report.to_json())?;
    fs::write(&csv_path, report.to_csv())?;
    Ok(json!({
        "command": "sweep-disk",
        "json": json_path,
        "csv": csv_path,
        "trials": report.trials,
        "seed": report.seed,
        "snr_db": report.snr_grid.iter().map(|&v| snr_value(v)).collect::<Vec<_>>(),
    }))
}

fn analysis_pencil(signal: &Signal, p: &PencilArgs) -> Result<(crate::classify::ObservedPencil, CrnrConfig)> {
    let cfg = p.config(signal.len())?;
    Ok((observed_pencil(signal, &cfg)?, cfg))
}

/// Without an explicit `--n` the map is drawn for `n = M`: with more columns than
/// the model order the reduced-rank pencil is singular everywhere.
fn gmap_pencil(signal: &Signal, p: &PencilArgs) -> Result<(crate::classify::ObservedPencil, CrnrConfig)> {
    if p.n.is_some() {
        return analysis_pencil(signal, p);
    }
    let order = match p.order {
        OrderMode::Known(m) => m,
        OrderMode::Estimated => {
            let (s, n) = p.shape_for(signal.len())?;
            estimate_order(&build_block_hankel(signal, s, n)?, &OrderRule::default())?
        }
    };
    let s = p.s.unwrap_or(signal.len().saturating_sub(order));
    if s <= order {
        return Err(Error::invalid(format!("need s > n = {order}, got s = {s}")));
    }
    let cfg = CrnrConfig { order: OrderMode::Known(order), ..p.config_with_shape(s, order)? };
    Ok((observed_pencil(signal, &cfg)?, cfg))
}

fn gmap(a: &GmapArgs) -> std::result::Result<Value, Failure> {
    let signal = load_signal(&a.signal)?;
    let (observed, cfg) = gmap_pencil(&signal, &a.pencil)?;
    let field = g_map(&observed.pencil, &a.grid_re.points(), &a.grid_im.points())?;
    let path = a.out.path("gmap.csv")?;
    fs::write(&path, grid_csv(&field)).map_err(Error::from)?;
    let sv_path = a.out.path("singular_values.csv")?;
    let sv = build_block_hankel(&signal, cfg.s, cfg.n)?.singular_values();
    fs::write(&sv_path, singular_values_csv(&sv)).map_err(Error::from)?;
    let minima: Vec<Value> = field
        .smallest(a.minima)
        .into_iter()
        .map(|(z, v)| json!({"lambda": cplx(z), "g": v}))
        .collect();
    let summary = json!({
        "command": "gmap",
        "csv": path,
        "singular_values": sv_path,
        "s": cfg.s,
        "n": cfg.n,
        "order": observed.order,
        "min": field.min(),
        "minima": minima,
    });
    check_convergence(summary, observed.cadzow_converged, a.pencil.require_convergence)
}

fn boundary(a: &BoundaryArgs) -> std::result::Result<Value, Failure> {
    let signal = load_signal(&a.signal)?;
    let class = a.class_file.as_deref().map(load_class_file).transpose()?;
    let (observed, cfg) = analysis_pencil(&signal, &a.pencil)?;
    let p = &observed.pencil;
    let grid = LambdaGrid {
        steps: a.lambda_steps,
        max_steps: a.lambda_max_steps,
        rays: a.rays,
        ..LambdaGrid::default()
    };
    let poly = rect_range_boundary(p, &grid)?;
    let disk = frobenius_disk(p)?;
    // classical range of B^+ A, the square counterpart of the rectangular one
    let classical = crate::linalg::pseudo_inverse(&p.b)
        .map(|pinv| pinv * &p.a)
        .and_then(|m| classical_range_boundary(&m, a.rays))
        .ok();
    let members = match &class {
        Some(c) => c
            .freqs()
            .iter()
            .map(|&z| membership(p, z, &MembershipConfig { early_reject: false, ..cfg.membership.clone() }))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let csv_path = a.out.path("boundary.csv")?;
    fs::write(&csv_path, polygon_csv(&poly)).map_err(Error::from)?;
    let json_path = a.out.path("boundary.json")?;
    write_json(
        &json_path,
        &json!({
            "range": poly,
            "frobenius_disk": disk,
            "classical_range_pinv": classical,
            "membership": members,
        }),
    )?;
    let summary = json!({
        "command": "boundary",
        "csv": csv_path,
        "json": json_path,
        "vertices": poly.vertices.len(),
        "area": poly.area(),
        "disk_center": cplx(disk.center),
        "disk_radius": disk.radius,
        "members": members.iter().map(|m| json!({"z": cplx(m.theta), "verdict": m.verdict, "delta": m.delta})).collect::<Vec<_>>(),
    });
    check_convergence(summary, observed.cadzow_converged, a.pencil.require_convergence)
}
