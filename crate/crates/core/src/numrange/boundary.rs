//! Outer approximation of the 2-norm range as a finite intersection of disks
//! `D(lambda_k, ||A - lambda_k B||_2)`, for plotting. [`super::membership`] stays
//! the authoritative test.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pencil::PencilPair;

use super::{frobenius_disk, PencilNorm, Polygon};

/// Square `lambda` grid, refined by doubling the per-axis step count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LambdaGrid {
    /// Defaults to the Frobenius disk center.
    #[serde(with = "crate::io::cplx_opt")]
    pub center: Option<Complex64>,
    /// Defaults to `max(2 r_F, 0.25 ||A||_2 / ||B||_2)`.
    pub half_width: Option<f64>,
    pub steps: usize,
    pub max_steps: usize,
    /// Number of boundary points on the returned polygon.
    pub rays: usize,
    /// Stop once the relative area change of a refinement falls below this.
    pub area_tol: f64,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self {
            center: None,
            half_width: None,
            steps: 32,
            max_steps: 128,
            rays: 360,
            area_tol: 0.01,
        }
    }
}

struct Disk {
    center: Complex64,
    radius: f64,
}

impl Disk {
    fn excess(&self, x: Complex64) -> f64 {
        (x - self.center).norm() - self.radius
    }

    /// Distance from an interior point `p` to the circle along `u`.
    fn exit(&self, p: Complex64, u: Complex64) -> f64 {
        let d = p - self.center;
        let b = (d * u.conj()).re;
        let disc = b * b - d.norm_sqr() + self.radius * self.radius;
        (-b + disc.max(0.0).sqrt()).max(0.0)
    }
}

pub fn rect_range_boundary(p: &PencilPair, grid: &LambdaGrid) -> Result<Polygon> {
    if grid.steps < 2 || grid.max_steps < grid.steps || grid.rays < 3 {
        return Err(Error::invalid("grid needs steps >= 2, max_steps >= steps and rays >= 3"));
    }
    let norm = PencilNorm::new(p);
    if norm.norm_b() < 1.0 {
        return Err(Error::Unscaled(norm.norm_b()));
    }
    let fdisk = frobenius_disk(p)?;
    let center = grid.center.unwrap_or(fdisk.center);
    let half = grid
        .half_width
        .unwrap_or_else(|| (2.0 * fdisk.radius).max(0.25 * norm.norm_a() / norm.norm_b()));
    if !(half > 0.0) {
        return Err(Error::invalid("grid half width must be positive"));
    }

    let mut steps = grid.steps;
    let mut previous: Option<Polygon> = None;
    loop {
        let mut disks: Vec<Disk> = (0..steps * steps)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / steps, k % steps);
                let h = 2.0 * half / (steps - 1) as f64;
                let lambda = center + Complex64::new(-half + i as f64 * h, -half + j as f64 * h);
                Disk { center: lambda, radius: norm.eval(lambda) }
            })
            .collect();
        disks.push(Disk { center: fdisk.center, radius: fdisk.radius });
        let poly = intersect(&disks, fdisk.center, fdisk.radius, grid.rays, norm.norm_a());
        let settled = match &previous {
            Some(prev) => {
                let (a0, a1) = (prev.area(), poly.area());
                a0 <= f64::MIN_POSITIVE || (a0 - a1).abs() <= grid.area_tol * a0
            }
            None => false,
        };
        if settled || steps * 2 > grid.max_steps {
            return Ok(poly);
        }
        previous = Some(poly);
        steps *= 2;
    }
}

/// Boundary of the intersection of `disks`, sampled on `rays` directions from its
/// deepest point. Empty polygon when the intersection is empty.
fn intersect(disks: &[Disk], hint: Complex64, span: f64, rays: usize, scale: f64) -> Polygon {
    let worst = |x: Complex64| disks.iter().map(|d| d.excess(x)).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * (1.0 + scale);
    if span <= tol {
        return if worst(hint) <= tol { Polygon::new(vec![hint]) } else { Polygon::default() };
    }
    // worst() is convex, and so is its partial minimum over x; nested golden sections
    let inner = |y: f64| golden_min(|x| worst(Complex64::new(x, y)), hint.re - span, hint.re + span, 60);
    let (y, _) = golden_min(|y| inner(y).1, hint.im - span, hint.im + span, 60);
    let (x, depth) = inner(y);
    let deepest = Complex64::new(x, y);
    if depth > tol {
        return Polygon::default();
    }
    let vertices = (0..rays)
        .map(|k| {
            let u = Complex64::from_polar(1.0, TAU * k as f64 / rays as f64);
            let rho = disks.iter().map(|d| d.exit(deepest, u)).fold(f64::INFINITY, f64::min);
            deepest + u * rho
        })
        .collect();
    Polygon::new(vertices)
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    const G: f64 = 0.381_966_011_250_105_1;
    let mut x1 = lo + G * (hi - lo);
    let mut x2 = hi - G * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + G * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - G * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
