//! Pointwise membership in the 2-norm rectangular numerical range.
//!
//! `theta` belongs to `W(A;B)` iff `inf f(lambda) >= 0` with
//! `f(lambda) = ||A - lambda B||_2 - |theta - lambda|`. Along any ray
//! `lambda = theta + t u` (`t >= 0`, `|u| = 1`) the function is convex in `t`: the
//! norm of an affine matrix function minus a linear term. The search therefore
//! minimizes exactly on a fan of rays through `theta`, then polishes the best
//! rays with a Nelder-Mead search in the plane.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_space_basis, hermitian_max_eigenvalue, spectral_norm, CMat};
use crate::pencil::PencilPair;

/// Search settings for [`membership`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MembershipConfig {
    /// Number of rays through `theta` in the coarse stage.
    pub angles: usize,
    /// Number of coarse minima refined locally.
    pub seeds: usize,
    /// Tolerance of the local refinement.
    pub refine_tol: f64,
    /// Replaces the derived search radius.
    pub radius_override: Option<f64>,
    /// Stop as soon as a `lambda` with `f < -tol` is found.
    pub early_reject: bool,
    /// Refuse pencils with `||B||_2 < 1` instead of searching them.
    pub require_scaled: bool,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        Self {
            angles: 64,
            seeds: 8,
            refine_tol: 1e-9,
            radius_override: None,
            early_reject: false,
            require_scaled: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Inside,
    Outside,
    /// `|delta|` within the boundary tolerance; counts as inside.
    Boundary,
}

impl Verdict {
    pub fn accepts(self) -> bool {
        !matches!(self, Verdict::Outside)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    DiskReject,
    TwoNorm,
}

/// How the search radius was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusBound {
    /// `(||A||_2 + |theta|) / (||B||_2 - 1)`: no `lambda` outside can make `f` negative.
    Derived,
    /// `||B||_2 <= 1`; no finite radius is guaranteed.
    Heuristic,
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    #[serde(with = "crate::io::cplx")]
    pub theta: Complex64,
    /// Smallest value of `f` found.
    pub delta: f64,
    #[serde(with = "crate::io::cplx")]
    pub lambda_star: Complex64,
    pub verdict: Verdict,
    pub stage: Stage,
    pub radius: f64,
    pub bound: RadiusBound,
    /// Tolerance used to separate `Boundary` from the other verdicts.
    pub tol: f64,
    pub evaluations: usize,
}

/// `lambda -> ||A - lambda B||_2` through the smaller of the two Gram matrices
/// `(A - lambda B)^H (A - lambda B)` and `Q^H (A - lambda B)(A - lambda B)^H Q`,
/// where `Q` is an orthonormal basis of the joint column space of `A` and `B`.
/// Both expand into fixed matrices `P + c Q + conj(c) Q^H + |lambda|^2 R`.
pub struct PencilNorm<'a> {
    pencil: &'a PencilPair,
    p: CMat,
    q: CMat,
    r: CMat,
    /// Row form: `c = -conj(lambda)`; column form: `c = -lambda`.
    rows: bool,
    norm_a: f64,
    norm_b: f64,
}

impl<'a> PencilNorm<'a> {
    pub fn new(pencil: &'a PencilPair) -> Self {
        let (a, b) = (&pencil.a, &pencil.b);
        let (m, n) = a.shape();
        let mut joint = CMat::zeros(m, 2 * n);
        joint.columns_mut(0, n).copy_from(a);
        joint.columns_mut(n, n).copy_from(b);
        let basis = column_space_basis(&joint).ok().filter(|q| q.ncols() < n);
        let (p, q, r, rows) = match basis {
            Some(basis) => {
                let (at, bt) = (basis.adjoint() * a, basis.adjoint() * b);
                let (ah, bh) = (at.adjoint(), bt.adjoint());
                (&at * &ah, &at * &bh, &bt * &bh, true)
            }
            None => {
                let ah = a.adjoint();
                (&ah * a, &ah * b, b.adjoint() * b, false)
            }
        };
        Self {
            p,
            q,
            r,
            rows,
            norm_a: spectral_norm(a),
            norm_b: spectral_norm(b),
            pencil,
        }
    }

    pub fn norm_a(&self) -> f64 {
        self.norm_a
    }

    pub fn norm_b(&self) -> f64 {
        self.norm_b
    }

    pub fn eval(&self, lambda: Complex64) -> f64 {
        let k = self.p.nrows();
        let c = if self.rows { -lambda.conj() } else { -lambda };
        let (cc, l2) = (c.conj(), lambda.norm_sqr());
        let g = CMat::from_fn(k, k, |i, j| self.p[(i, j)] + c * self.q[(i, j)] + cc * self.q[(j, i)].conj() + self.r[(i, j)] * l2);
        let top = hermitian_max_eigenvalue(&g);
        let scale = self.norm_a * self.norm_a + l2 * self.norm_b * self.norm_b;
        if top > 1e-8 * scale {
            top.sqrt()
        } else {
            // heavy cancellation in the Gram matrix; go back to the pencil itself
            spectral_norm(&self.pencil.at(lambda))
        }
    }
}

/// Reusable membership tester for one pencil.
pub struct MembershipSolver<'a> {
    norm: PencilNorm<'a>,
    cfg: MembershipConfig,
}

/// Multiplier applied to the heuristic radius when `||B||_2 <= 1`. Ray bracketing is
/// logarithmic in the radius, and the asymptote of `f` at `||B||_2 = 1` is only
/// reached far out.
const HEURISTIC_STRETCH: f64 = 1e6;

impl<'a> MembershipSolver<'a> {
    pub fn new(pencil: &'a PencilPair, cfg: &MembershipConfig) -> Result<Self> {
        if cfg.angles < 3 || cfg.seeds < 1 || !(cfg.refine_tol > 0.0) {
            return Err(Error::invalid("membership needs angles >= 3, seeds >= 1, refine_tol > 0"));
        }
        if let Some(r) = cfg.radius_override {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::invalid(format!("radius override must be positive, got {r}")));
            }
        }
        let norm = PencilNorm::new(pencil);
        if cfg.require_scaled && norm.norm_b < 1.0 {
            return Err(Error::Unscaled(norm.norm_b));
        }
        Ok(Self { norm, cfg: cfg.clone() })
    }

    pub fn pencil_norm(&self) -> &PencilNorm<'a> {
        &self.norm
    }

    pub fn tolerance(&self) -> f64 {
        1e-7 * (1.0 + self.norm.norm_a)
    }

    pub fn search_radius(&self, theta: Complex64) -> (f64, RadiusBound) {
        let (na, nb) = (self.norm.norm_a, self.norm.norm_b);
        if let Some(r) = self.cfg.radius_override {
            (r, RadiusBound::Override)
        } else if nb > 1.0 + 1e-12 {
            ((na + theta.norm()) / (nb - 1.0), RadiusBound::Derived)
        } else {
            ((4.0 * (na + theta.norm()) + 1.0) * HEURISTIC_STRETCH, RadiusBound::Heuristic)
        }
    }

    pub fn test(&self, theta: Complex64) -> Result<MembershipResult> {
        if !theta.is_finite() {
            return Err(Error::invalid(format!("candidate {theta} is not finite")));
        }
        let (radius, bound) = self.search_radius(theta);
        let tol = self.tolerance();
        let mut search = Search {
            norm: &self.norm,
            theta,
            best: f64::INFINITY,
            best_lambda: theta,
            evals: 0,
            stop_below: if self.cfg.early_reject { Some(-tol) } else { None },
        };
        search.run(&self.cfg, radius);
        let delta = search.best;
        let verdict = if delta < -tol {
            Verdict::Outside
        } else if delta <= tol {
            Verdict::Boundary
        } else {
            Verdict::Inside
        };
        Ok(MembershipResult {
            theta,
            delta,
            lambda_star: search.best_lambda,
            verdict,
            stage: Stage::TwoNorm,
            radius,
            bound,
            tol,
            evaluations: search.evals,
        })
    }
}

/// Tests `theta in W(A;B)` by minimizing `||A - lambda B||_2 - |theta - lambda|`.
pub fn membership(p: &PencilPair, theta: Complex64, cfg: &MembershipConfig) -> Result<MembershipResult> {
    MembershipSolver::new(p, cfg)?.test(theta)
}

struct Search<'s, 'a> {
    norm: &'s PencilNorm<'a>,
    theta: Complex64,
    best: f64,
    best_lambda: Complex64,
    evals: usize,
    stop_below: Option<f64>,
}

struct RayMin {
    t: f64,
    value: f64,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Relative bracket width at which a coarse ray minimization stops.
const COARSE_TOL: f64 = 1e-3;

impl Search<'_, '_> {
    fn done(&self) -> bool {
        self.stop_below.is_some_and(|s| self.best < s)
    }

    fn f(&mut self, lambda: Complex64) -> f64 {
        self.evals += 1;
        let v = self.norm.eval(lambda) - (self.theta - lambda).norm();
        if v < self.best {
            self.best = v;
            self.best_lambda = lambda;
        }
        v
    }

    fn on_ray(&mut self, u: Complex64, t: f64) -> f64 {
        let lambda = self.theta + u * t;
        self.f(lambda)
    }

    /// Minimizes the convex `t -> f(theta + t u)` on `[0, t_max]`.
    /// `h0` is `f(theta)`, shared by all rays.
    fn ray_min(&mut self, u: Complex64, h0: f64, t_max: f64, t0: f64, rel_tol: f64) -> RayMin {
        let mut prev = (0.0, h0);
        let mut t = t0.min(t_max);
        let mut ht = self.on_ray(u, t);
        if self.done() {
            return RayMin { t, value: ht };
        }
        let (lo, hi) = if ht >= h0 {
            (0.0, t)
        } else {
            loop {
                if t >= t_max {
                    break (prev.0, t_max);
                }
                let t2 = (2.0 * t).min(t_max);
                let h2 = self.on_ray(u, t2);
                if self.done() {
                    return RayMin { t: t2, value: h2 };
                }
                if h2 >= ht {
                    break (prev.0, t2);
                }
                prev = (t, ht);
                t = t2;
                ht = h2;
            }
        };
        self.line_min(u, lo, hi, rel_tol)
    }

    /// Brent minimization of the convex ray profile on `[lo, hi]`, down to a bracket
    /// of `rel_tol` times the initial width.
    fn line_min(&mut self, u: Complex64, mut lo: f64, mut hi: f64, rel_tol: f64) -> RayMin {
        let tol = 0.5 * rel_tol * (hi - lo).max(1e-300);
        let mut x = lo + GOLDEN * (hi - lo);
        let mut fx = self.on_ray(u, x);
        let (mut w, mut fw, mut v, mut fv) = (x, fx, x, fx);
        let (mut d, mut e) = (0.0f64, 0.0f64);
        for _ in 0..200 {
            if self.done() {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let tol1 = tol + 1e-15 * x.abs();
            let tol2 = 2.0 * tol1;
            if (x - mid).abs() <= tol2 - 0.5 * (hi - lo) {
                break;
            }
            let mut golden_step = true;
            if e.abs() > tol1 {
                // parabola through x, w, v
                let r = (x - w) * (fx - fv);
                let mut q = (x - v) * (fx - fw);
                let mut p = (x - v) * q - (x - w) * r;
                q = 2.0 * (q - r);
                if q > 0.0 {
                    p = -p;
                }
                q = q.abs();
                if p.abs() < (0.5 * q * e).abs() && p > q * (lo - x) && p < q * (hi - x) {
                    e = d;
                    d = p / q;
                    let t = x + d;
                    if t - lo < tol2 || hi - t < tol2 {
                        d = tol1.copysign(mid - x);
                    }
                    golden_step = false;
                }
            }
            if golden_step {
                e = if x >= mid { lo - x } else { hi - x };
                d = GOLDEN * e;
            }
            let t = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
            let ft = self.on_ray(u, t);
            if ft <= fx {
                if t >= x {
                    lo = x;
                } else {
                    hi = x;
                }
                (v, fv, w, fw, x, fx) = (w, fw, x, fx, t, ft);
            } else {
                if t < x {
                    lo = t;
                } else {
                    hi = t;
                }
                if ft <= fw || w == x {
                    (v, fv, w, fw) = (w, fw, t, ft);
                } else if ft <= fv || v == x || v == w {
                    (v, fv) = (t, ft);
                }
            }
        }
        RayMin { t: x, value: fx }
    }

    fn run(&mut self, cfg: &MembershipConfig, radius: f64) {
        let t_max = radius + self.theta.norm();
        let t0 = (0.05 * self.norm.norm_a / self.norm.norm_b.max(1e-300)).clamp(1e-9, t_max.max(1e-9));
        let n = cfg.angles;
        let h0 = self.f(self.theta);
        let mut coarse = Vec::with_capacity(n);
        for j in 0..n {
            let u = Complex64::from_polar(1.0, TAU * j as f64 / n as f64);
            // coarse accuracy only ranks the rays; the seeds are polished below
            // neighbouring rays have nearby minimizers
            let start = coarse.last().map_or(t0, |r: &RayMin| r.t.max(t0));
            let r = self.ray_min(u, h0, t_max, start, COARSE_TOL);
            if self.done() {
                return;
            }
            coarse.push(r);
        }

        // local minima of the coarse angular profile, best first
        let value = |k: usize| coarse[k % n].value;
        let mut order: Vec<usize> = (0..n)
            .filter(|&j| value(j) <= value(j + n - 1) && value(j) <= value(j + 1))
            .collect();
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        order.truncate(cfg.seeds);

        let step_angle = TAU / n as f64;
        for j in order {
            let RayMin { t, .. } = coarse[j];
            let u = Complex64::from_polar(1.0, step_angle * j as f64);
            let start = self.theta + u * t;
            let h = (t * step_angle).max(1e-6 * (1.0 + t0));
            let polished = self.nelder_mead(start, h, cfg.refine_tol);
            if self.done() {
                return;
            }
            // finish on the exact ray through the polished point
            let d = polished - self.theta;
            if d.norm() > 0.0 {
                let u = d / d.norm();
                let span = 2.0 * d.norm();
                let lo = (d.norm() - 0.25 * span).max(0.0);
                let hi = (d.norm() + 0.25 * span).min(t_max.max(d.norm()));
                self.line_min(u, lo, hi, cfg.refine_tol);
                if self.done() {
                    return;
                }
            }
        }
    }

    fn nelder_mead(&mut self, start: Complex64, step: f64, tol: f64) -> Complex64 {
        let mut simplex = [
            (start, 0.0),
            (start + Complex64::new(step, 0.0), 0.0),
            (start + Complex64::new(0.0, step), 0.0),
        ];
        for v in simplex.iter_mut() {
            v.1 = self.f(v.0);
        }
        for _ in 0..400 {
            if self.done() {
                break;
            }
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let size = (simplex[1].0 - simplex[0].0).norm().max((simplex[2].0 - simplex[0].0).norm());
            let spread = simplex[2].1 - simplex[0].1;
            if size <= tol * (1.0 + simplex[0].0.norm()) && spread <= tol * (1.0 + simplex[0].1.abs()) {
                break;
            }
            let centroid = (simplex[0].0 + simplex[1].0) * 0.5;
            let worst = simplex[2];
            let reflect = centroid + (centroid - worst.0);
            let fr = self.f(reflect);
            if fr < simplex[0].1 {
                let expand = centroid + (centroid - worst.0) * 2.0;
                let fe = self.f(expand);
                simplex[2] = if fe < fr { (expand, fe) } else { (reflect, fr) };
            } else if fr < simplex[1].1 {
                simplex[2] = (reflect, fr);
            } else {
                let (contract, fc) = if fr < worst.1 {
                    let p = centroid + (reflect - centroid) * 0.5;
                    (p, self.f(p))
                } else {
                    let p = centroid + (worst.0 - centroid) * 0.5;
                    (p, self.f(p))
                };
                if fc < worst.1.min(fr) {
                    simplex[2] = (contract, fc);
                } else {
                    let best = simplex[0].0;
                    for v in simplex.iter_mut().skip(1) {
                        v.0 = best + (v.0 - best) * 0.5;
                        v.1 = self.f(v.0);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        simplex[0].0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar(a: f64, b: f64) -> PencilPair {
        PencilPair::new(CMat::from_element(1, 1, c(a, 0.0)), CMat::from_element(1, 1, c(b, 0.0))).unwrap()
    }

    #[test]
    fn gram_norm_matches_svd() {
        let a = CMat::from_fn(5, 3, |i, j| c((i as f64 - j as f64).sin(), (i * j) as f64 * 0.1));
        let b = CMat::from_fn(5, 3, |i, j| c((i + 2 * j) as f64 * 0.2, (i as f64).cos()));
        let p = PencilPair::new(a, b).unwrap();
        let norm = PencilNorm::new(&p);
        for lambda in [c(0.0, 0.0), c(1.5, -0.3), c(-20.0, 7.0)] {
            let direct = spectral_norm(&p.at(lambda));
            assert!((norm.eval(lambda) - direct).abs() < 1e-10 * (1.0 + direct));
        }
    }

    #[test]
    fn projected_gram_matches_svd_for_low_rank_pencil() {
        // columns of both matrices live in a 2-dimensional space
        let u = CMat::from_fn(7, 2, |i, j| c((i + j) as f64 * 0.3, (i as f64 - j as f64) * 0.2));
        let a = &u * CMat::from_fn(2, 4, |i, j| c(1.0 + i as f64, j as f64 * 0.5));
        let b = &u * CMat::from_fn(2, 4, |i, j| c((i * j) as f64 * 0.4 - 0.3, 0.7));
        let p = PencilPair::new(a, b).unwrap();
        let norm = PencilNorm::new(&p);
        assert!(norm.rows);
        assert_eq!(norm.p.nrows(), 2);
        for lambda in [c(0.0, 0.0), c(0.4, 0.9), c(-3.0, -2.0)] {
            let direct = spectral_norm(&p.at(lambda));
            assert!((norm.eval(lambda) - direct).abs() < 1e-10 * (1.0 + direct));
        }
    }

    #[test]
    fn scalar_pencil_point_range() {
        let p = scalar(2.0, 1.0);
        let r = membership(&p, c(2.0, 0.0), &MembershipConfig::default()).unwrap();
        assert!(r.delta.abs() < 1e-9);
        assert!(r.verdict.accepts());

        let r = membership(&p, c(2.5, 0.0), &MembershipConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Outside);
        assert!(r.delta < -0.49, "delta {}", r.delta);
    }

    #[test]
    fn single_mode_is_on_boundary() {
        // A = 0.9 B, so f(lambda) = |0.9 - lambda| (||B||_2 - 1) >= 0 with equality at 0.9
        let b = CMat::from_fn(4, 2, |i, j| c(0.9f64.powi((i + j) as i32), 0.0));
        let p = PencilPair::new(b.map(|z| z * 0.9), b).unwrap();
        let r = membership(&p, c(0.9, 0.0), &MembershipConfig::default()).unwrap();
        assert!(r.verdict.accepts());
        assert!(r.delta.abs() <= r.tol);
    }

    #[test]
    fn unscaled_pencil_rejected_unless_allowed() {
        let p = scalar(1.0, 0.5);
        assert!(matches!(membership(&p, c(0.0, 0.0), &MembershipConfig::default()), Err(Error::Unscaled(_))));
        let cfg = MembershipConfig { require_scaled: false, ..MembershipConfig::default() };
        for theta in [c(0.0, 0.0), c(2.0, 0.0), c(-1.0, 3.0)] {
            assert_eq!(membership(&p, theta, &cfg).unwrap().verdict, Verdict::Outside);
        }
    }

    #[test]
    fn non_finite_theta() {
        assert!(membership(&scalar(2.0, 1.0), c(f64::NAN, 0.0), &MembershipConfig::default()).is_err());
    }

    #[test]
    fn early_reject_agrees_on_verdict() {
        let p = scalar(2.0, 1.5);
        let full = membership(&p, c(3.0, 1.0), &MembershipConfig::default()).unwrap();
        let fast = membership(&p, c(3.0, 1.0), &MembershipConfig { early_reject: true, ..Default::default() }).unwrap();
        assert_eq!(full.verdict, fast.verdict);
        assert!(fast.evaluations <= full.evaluations);
    }
}
