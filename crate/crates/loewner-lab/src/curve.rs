use crate::error::{Error, Result};
use crate::mobius::Mobius;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Capacity,
    Arclength,
    Unspecified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Root {
    Point { re: f64, im: f64 },
    Infinity,
}

impl Root {
    pub fn point(z: C64) -> Self {
        Root::Point { re: z.re, im: z.im }
    }
}

/// Coordinates the samples live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    /// Upper half-plane, chord from a real point to ∞.
    HalfPlane,
    /// Slit plane ℂ∖ℝ₊, chord from 0 to ∞.
    SlitPlane,
    /// Whole plane, used for loops.
    Plane,
}

/// Ordered samples of an arc or of a Jordan loop.
///
/// Loops are stored without repeating the first point. A loop through ∞ has root
/// `Root::Infinity` and is understood to pass through ∞ between its last and first sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSamples {
    pub points: Vec<C64>,
    pub param: Param,
    pub root: Option<Root>,
    pub closed: bool,
    pub ambient: Ambient,
    /// Capacity times when `param` is `Capacity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

impl CurveSamples {
    pub fn arc(points: Vec<C64>, ambient: Ambient) -> Self {
        Self { points, param: Param::Unspecified, root: None, closed: false, ambient, times: None }
    }

    pub fn closed_loop(points: Vec<C64>) -> Self {
        Self { points, param: Param::Unspecified, root: None, closed: true, ambient: Ambient::Plane, times: None }
    }

    /// `n` samples of `f` on `[0, 2π)`.
    pub fn from_loop_fn<F: Fn(f64) -> C64>(f: F, n: usize) -> Self {
        let pts = (0..n).map(|k| f(std::f64::consts::TAU * k as f64 / n as f64)).collect();
        Self::closed_loop(pts)
    }

    pub fn circle(center: C64, radius: f64, n: usize) -> Self {
        Self::from_loop_fn(|t| center + radius * C64::from_polar(1.0, t), n)
    }

    /// Ellipse traced by the Joukowski image `e^{it} + c e^{-it}`.
    pub fn joukowski_ellipse(c: f64, n: usize) -> Self {
        Self::from_loop_fn(|t| C64::from_polar(1.0, t) + c * C64::from_polar(1.0, -t), n)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn map<F: Fn(C64) -> C64>(&self, f: F) -> Self {
        let mut out = self.clone();
        out.points = self.points.iter().map(|&z| f(z)).collect();
        if let Some(Root::Point { re, im }) = self.root {
            out.root = Some(Root::point(f(C64::new(re, im))));
        }
        out
    }

    /// Image under a Möbius map, sending the root along (including a root at ∞).
    pub fn mobius_image(&self, m: &Mobius) -> Self {
        let mut out = self.map(|z| m.apply(z));
        out.root = match self.root {
            Some(Root::Infinity) => Some(m.image_of_infinity().map_or(Root::Infinity, Root::point)),
            Some(Root::Point { re, im }) => {
                let z = C64::new(re, im);
                Some(if m.pole() == Some(z) { Root::Infinity } else { Root::point(m.apply(z)) })
            }
            None => None,
        };
        out
    }

    /// Moves a loop through infinity to a bounded loop by inverting about a point far from its samples.
    /// Bounded curves come back unchanged with the identity.
    pub fn bounded_image(&self) -> (Self, Mobius) {
        if !matches!(self.root, Some(Root::Infinity)) {
            return (self.clone(), Mobius::identity());
        }
        let mut r: Vec<f64> = self.points.iter().map(|z| z.norm()).collect();
        r.sort_by(f64::total_cmp);
        let half = 2.0 * r[r.len() / 2].max(1e-12);
        let mut best = (C64::new(0.0, 0.0), -1.0);
        for i in 0..=20 {
            for j in 0..=20 {
                let p = C64::new(half * (i as f64 / 10.0 - 1.0), half * (j as f64 / 10.0 - 1.0));
                let d = self.points.iter().map(|z| (z - p).norm()).fold(f64::INFINITY, f64::min);
                if d > best.1 {
                    best = (p, d);
                }
            }
        }
        let m = Mobius::invert_about(best.0);
        (self.mobius_image(&m), m)
    }

    /// Translates the centroid to 0 and scales so the farthest sample has modulus 1.
    pub fn unit_normalized(&self) -> (Self, Mobius) {
        let c = self.centroid();
        let r = self.points.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
        let m = Mobius::affine(C64::new(1.0 / r, 0.0), -c / r);
        (self.mobius_image(&m), m)
    }

    /// Segments of the polyline; loops through a finite root include the closing segment.
    fn segments(&self) -> Vec<(C64, C64)> {
        let p = &self.points;
        let mut s: Vec<_> = p.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed && !matches!(self.root, Some(Root::Infinity)) && p.len() > 2 {
            s.push((p[p.len() - 1], p[0]));
        }
        s
    }

    /// Checks that consecutive samples differ and that no two non-adjacent segments cross.
    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 3 {
            return Err(Error::Degenerate(format!("need at least 3 samples, got {}", self.points.len())));
        }
        if let Some(k) = self.points.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Degenerate(format!("non-finite sample {k}")));
        }
        let segs = self.segments();
        for (k, (a, b)) in segs.iter().enumerate() {
            if (a - b).norm() == 0.0 {
                return Err(Error::Degenerate(format!("samples {k} and {} coincide", (k + 1) % self.points.len())));
            }
        }
        let m = segs.len();
        let wrap = m == self.points.len();
        for i in 0..m {
            for j in i + 2..m {
                if wrap && i == 0 && j == m - 1 {
                    continue;
                }
                if segments_cross(segs[i], segs[j]) {
                    return Err(Error::NotSimple(i, j));
                }
            }
        }
        Ok(())
    }

    /// Signed area of a closed polyline (positive for counterclockwise orientation).
    pub fn signed_area(&self) -> f64 {
        let p = &self.points;
        let n = p.len();
        (0..n).map(|k| {
            let (a, b) = (p[k], p[(k + 1) % n]);
            a.re * b.im - a.im * b.re
        }).sum::<f64>() / 2.0
    }

    pub fn centroid(&self) -> C64 {
        let p = &self.points;
        let n = p.len();
        let mut a = 0.0;
        let mut c = C64::new(0.0, 0.0);
        for k in 0..n {
            let (z0, z1) = (p[k], p[(k + 1) % n]);
            let cr = z0.re * z1.im - z0.im * z1.re;
            a += cr;
            c += (z0 + z1) * cr;
        }
        c / (3.0 * a)
    }

    pub fn winding_number(&self, z: C64) -> i32 {
        let p = &self.points;
        let n = p.len();
        let mut total = 0.0;
        for k in 0..n {
            total += ((p[(k + 1) % n] - z) / (p[k] - z)).arg();
        }
        (total / std::f64::consts::TAU).round() as i32
    }

    pub fn length(&self) -> f64 {
        self.segments().iter().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn orient(a: C64, b: C64, c: C64) -> f64 {
    let (u, v) = (b - a, c - a);
    u.re * v.im - u.im * v.re
}

fn segments_cross((a, b): (C64, C64), (c, d): (C64, C64)) -> bool {
    let lo = |x: f64, y: f64| x.min(y);
    let hi = |x: f64, y: f64| x.max(y);
    if hi(a.re, b.re) < lo(c.re, d.re) || hi(c.re, d.re) < lo(a.re, b.re)
        || hi(a.im, b.im) < lo(c.im, d.im) || hi(c.im, d.im) < lo(a.im, b.im)
    {
        return false;
    }
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Hausdorff distance between two point sets, measured from points to polyline vertices.
pub fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    let one = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}
