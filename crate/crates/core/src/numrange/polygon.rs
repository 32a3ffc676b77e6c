use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Closed polygon in the complex plane; vertices in counter-clockwise order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polygon {
    #[serde(with = "crate::io::cplx_vec")]
    pub vertices: Vec<Complex64>,
}

impl Polygon {
    pub fn new(vertices: Vec<Complex64>) -> Self {
        Self { vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Convex hull (Andrew's monotone chain), counter-clockwise.
    pub fn convex_hull(points: &[Complex64]) -> Self {
        let mut pts: Vec<Complex64> = points.to_vec();
        pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        pts.dedup();
        if pts.len() < 3 {
            return Self::new(pts);
        }
        let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
        let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
        for &p in &pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        let lower = hull.len() + 1;
        for &p in pts.iter().rev().skip(1) {
            while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        Self::new(hull)
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        0.5 * (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                a.re * b.im - b.re * a.im
            })
            .sum::<f64>()
            .abs()
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max((v[i] - v[j]).norm());
            }
        }
        d
    }

    /// Distance from `p` to the polygon region, zero inside. Assumes convexity.
    pub fn distance(&self, p: Complex64) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 => f64::INFINITY,
            1 => (p - v[0]).norm(),
            _ => {
                let mut inside = v.len() >= 3;
                let mut best = f64::INFINITY;
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    let e = b - a;
                    if inside && (e.re * (p - a).im - e.im * (p - a).re) < 0.0 {
                        inside = false;
                    }
                    best = best.min(segment_distance(p, a, b));
                }
                if inside {
                    0.0
                } else {
                    best
                }
            }
        }
    }
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let e = b - a;
    let len2 = e.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * e.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + e * t)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square() {
        let sq = Polygon::convex_hull(&[c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.5)]);
        assert_eq!(sq.vertices.len(), 4);
        assert!((sq.area() - 1.0).abs() < 1e-15);
        assert_eq!(sq.distance(c(0.5, 0.2)), 0.0);
        assert!((sq.distance(c(2.0, 0.5)) - 1.0).abs() < 1e-15);
        assert!((sq.diameter() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn degenerate() {
        let seg = Polygon::convex_hull(&[c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(seg.distance(c(0.5, 0.0)) < 1e-15);
        assert!((seg.distance(c(0.5, 0.3)) - 0.3).abs() < 1e-15);
        let pt = Polygon::convex_hull(&[c(1.0, 0.0); 5]);
        assert_eq!(pt.vertices.len(), 1);
        assert_eq!(pt.distance(c(1.0, 0.0)), 0.0);
    }
}
