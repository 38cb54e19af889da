//! Adaptive tensor Gauss quadrature on rectangles, refined by comparing each cell's rule
//! with the sum over its four children.

use crate::energy::pairwise_sum;
use crate::error::{Error, Result};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Axis-aligned cell `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn children(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect::new(self.x0, xm, self.y0, ym),
            Rect::new(xm, self.x1, self.y0, ym),
            Rect::new(self.x0, xm, ym, self.y1),
            Rect::new(xm, self.x1, ym, self.y1),
        ]
    }

    /// Tensor grid of rectangles from breakpoints.
    pub fn grid(xs: &[f64], ys: &[f64]) -> Vec<Rect> {
        let mut out = Vec::new();
        for x in xs.windows(2) {
            for y in ys.windows(2) {
                out.push(Rect::new(x[0], x[1], y[0], y[1]));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    /// Absolute tolerance on the total error estimate.
    pub tol: f64,
    /// Gauss points per direction.
    pub order: usize,
    pub max_cells: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { tol: 1e-4, order: 5, max_cells: 40_000 }
    }
}

/// Final cell of an adaptive integration.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cell {
    pub rect: Rect,
    pub value: f64,
    pub error: f64,
}

/// Cell list produced by an adaptive integration, with its total and error estimate.
#[derive(Clone, Debug, Serialize)]
pub struct QuadratureGrid {
    pub cells: Vec<Cell>,
    pub value: f64,
    pub error: f64,
    /// Integrand evaluations that failed and were counted as zero.
    pub skipped: usize,
    pub evaluations: usize,
}

impl QuadratureGrid {
    pub fn total_area(&self) -> f64 {
        pairwise_sum(&self.cells.iter().map(|c| c.rect.area()).collect::<Vec<_>>())
    }
}

/// How a cell meets the set across which the integrand jumps.
#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    Smooth,
    /// The integrand is smooth on each of these polygons, which tile the cell.
    Split(Vec<Vec<(f64, f64)>>),
    /// The cell holds an end of the jump set. Its whole integral counts as error.
    Rough,
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

struct Eval<'a, F, C> {
    f: &'a F,
    cut: C,
    rule: Rule,
    skipped: usize,
    evaluations: usize,
}

impl<F: Fn(f64, f64) -> Option<f64>, C: Fn(&Rect) -> Piece> Eval<'_, F, C> {
    fn at(&mut self, x: f64, y: f64) -> f64 {
        self.evaluations += 1;
        match (self.f)(x, y) {
            Some(v) if v.is_finite() => v,
            _ => {
                self.skipped += 1;
                0.0
            }
        }
    }

    fn rect(&mut self, r: &Rect) -> f64 {
        let (cx, hx) = (0.5 * (r.x0 + r.x1), 0.5 * (r.x1 - r.x0));
        let (cy, hy) = (0.5 * (r.y0 + r.y1), 0.5 * (r.y1 - r.y0));
        let mut s = 0.0;
        for i in 0..self.rule.x.len() {
            let mut row = 0.0;
            for j in 0..self.rule.x.len() {
                row += self.rule.w[j] * self.at(cx + hx * self.rule.x[i], cy + hy * self.rule.x[j]);
            }
            s += self.rule.w[i] * row;
        }
        s * hx * hy
    }

    /// Collapsed tensor rule on a triangle.
    fn triangle(&mut self, a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
        let area2 = ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).abs();
        if area2 == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..self.rule.x.len() {
            let u = 0.5 * (1.0 + self.rule.x[i]);
            let mut row = 0.0;
            for j in 0..self.rule.x.len() {
                let v = 0.5 * (1.0 + self.rule.x[j]);
                let x = a.0 + u * (b.0 - a.0 + v * (c.0 - b.0));
                let y = a.1 + u * (b.1 - a.1 + v * (c.1 - b.1));
                row += self.rule.w[j] * self.at(x, y);
            }
            s += self.rule.w[i] * u * row;
        }
        s * 0.25 * area2
    }

    /// Integral over `r` and whether the cell is rough.
    fn cell(&mut self, r: &Rect) -> (f64, bool) {
        match (self.cut)(r) {
            Piece::Smooth => (self.rect(r), false),
            Piece::Rough => (self.rect(r), true),
            Piece::Split(polys) => {
                let mut s = 0.0;
                for p in &polys {
                    for [a, b, c] in triangulate(p) {
                        s += self.triangle(a, b, c);
                    }
                }
                (s, false)
            }
        }
    }

    fn children(&mut self, r: &Rect) -> ([f64; 4], [bool; 4]) {
        let mut v = [0.0; 4];
        let mut rough = [false; 4];
        for (k, ch) in r.children().iter().enumerate() {
            (v[k], rough[k]) = self.cell(ch);
        }
        (v, rough)
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Ear-clipping triangulation of a simple polygon.
pub fn triangulate(poly: &[(f64, f64)]) -> Vec<[(f64, f64); 3]> {
    let mut v: Vec<(f64, f64)> = poly.to_vec();
    let signed: f64 = (0..v.len()).map(|i| cross((0.0, 0.0), v[i], v[(i + 1) % v.len()])).sum();
    if signed < 0.0 {
        v.reverse();
    }
    let mut out = Vec::with_capacity(v.len().saturating_sub(2));
    while v.len() > 3 {
        let n = v.len();
        let ear = (0..n).find(|&i| {
            let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            cross(a, b, c) >= 0.0
                && (0..n).filter(|&k| k != i && k != (i + n - 1) % n && k != (i + 1) % n).all(|k| {
                    let p = v[k];
                    !(cross(a, b, p) > 0.0 && cross(b, c, p) > 0.0 && cross(c, a, p) > 0.0)
                })
        });
        match ear {
            Some(i) => {
                out.push([v[(i + n - 1) % n], v[i], v[(i + 1) % n]]);
                v.remove(i);
            }
            None => {
                // degenerate input: fan from the first vertex
                for k in 1..n - 1 {
                    out.push([v[0], v[k], v[k + 1]]);
                }
                return out;
            }
        }
    }
    if v.len() == 3 {
        out.push([v[0], v[1], v[2]]);
    }
    out
}

struct Active {
    rect: Rect,
    kids: [f64; 4],
    rough: [bool; 4],
    err: f64,
    id: usize,
}

impl Active {
    fn value(&self) -> f64 {
        self.kids.iter().sum()
    }
}

impl PartialEq for Active {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Active {}
impl PartialOrd for Active {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Active {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.id.cmp(&self.id))
    }
}

/// Integrates `f` over the union of `cells`, refining until the summed error estimate is
/// below `opts.tol`. Failed evaluations (`None`) count as zero and are tallied.
pub fn integrate<F: Fn(f64, f64) -> Option<f64>>(f: &F, cells: &[Rect], opts: QuadOptions) -> Result<QuadratureGrid> {
    integrate_cut(f, cells, opts, |_| Piece::Smooth)
}

/// As [`integrate`], for integrands that jump across a known set; `cut` says how each cell
/// meets it.
pub fn integrate_cut<F, C>(f: &F, cells: &[Rect], opts: QuadOptions, cut: C) -> Result<QuadratureGrid>
where
    F: Fn(f64, f64) -> Option<f64>,
    C: Fn(&Rect) -> Piece,
{
    let estimate = |own: f64, rough: bool, kids: &[f64; 4]| {
        let sum: f64 = kids.iter().sum();
        let err = (own - sum).abs();
        if rough {
            err.max(sum.abs())
        } else {
            err
        }
    };
    let (x, w) = gauss_legendre(opts.order);
    let mut ev = Eval { f, cut, rule: Rule { x, w }, skipped: 0, evaluations: 0 };
    let mut heap = BinaryHeap::new();
    let mut next_id = 0;
    let mut total_err = 0.0;
    for r in cells {
        let (own, is_rough) = ev.cell(r);
        let (kids, rough) = ev.children(r);
        let err = estimate(own, is_rough, &kids);
        total_err += err;
        heap.push(Active { rect: *r, kids, rough, err, id: next_id });
        next_id += 1;
    }
    let mut iterations = 0;
    while total_err > opts.tol {
        if heap.len() + 3 > opts.max_cells {
            return Err(Error::GridTooCoarse { tol: opts.tol, err: total_err, cells: heap.len() });
        }
        let top = heap.pop().expect("non-empty");
        total_err -= top.err;
        for (k, child) in top.rect.children().iter().enumerate() {
            let (kids, rough) = ev.children(child);
            let err = estimate(top.kids[k], top.rough[k], &kids);
            total_err += err;
            heap.push(Active { rect: *child, kids, rough, err, id: next_id });
            next_id += 1;
        }
        iterations += 1;
        if iterations % 256 == 0 {
            // guard against drift of the running sum
            total_err = heap.iter().map(|a| a.err).sum();
        }
    }
    let mut active: Vec<Active> = heap.into_vec();
    active.sort_by_key(|a| a.id);
    let values: Vec<f64> = active.iter().map(|a| a.value()).collect();
    let errors: Vec<f64> = active.iter().map(|a| a.err).collect();
    Ok(QuadratureGrid {
        value: pairwise_sum(&values),
        error: pairwise_sum(&errors),
        cells: active.iter().map(|a| Cell { rect: a.rect, value: a.value(), error: a.err }).collect(),
        skipped: ev.skipped,
        evaluations: ev.evaluations,
    })
}

/// An open polyline across which an integrand jumps.
#[derive(Clone, Debug)]
pub struct Polyline {
    pts: Vec<(f64, f64)>,
    /// Vertices where the integrand is singular on top of the jump.
    marks: Vec<(f64, f64)>,
    lo: (f64, f64),
    hi: (f64, f64),
}

fn inside(p: (f64, f64), r: &Rect) -> bool {
    p.0 > r.x0 && p.0 < r.x1 && p.1 > r.y0 && p.1 < r.y1
}

/// Parameter range of the segment `a b` inside `r`.
fn clip(a: (f64, f64), b: (f64, f64), r: &Rect) -> Option<(f64, f64)> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for (p, q) in [(-dx, a.0 - r.x0), (dx, r.x1 - a.0), (-dy, a.1 - r.y0), (dy, r.y1 - a.1)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else if p < 0.0 {
            lo = lo.max(q / p);
        } else {
            hi = hi.min(q / p);
        }
    }
    (lo < hi).then_some((lo, hi))
}

fn lerp(a: (f64, f64), b: (f64, f64), t: f64) -> (f64, f64) {
    (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
}

fn seg_dist(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).clamp(0.0, 1.0) } else { 0.0 };
    let q = lerp(a, b, t);
    ((p.0 - q.0).hypot(p.1 - q.1), t)
}

fn douglas_peucker(pts: &[(f64, f64)], eps: f64, out: &mut Vec<(f64, f64)>) {
    let (a, b) = (pts[0], pts[pts.len() - 1]);
    let far = (1..pts.len() - 1).map(|k| (seg_dist(pts[k], a, b).0, k)).max_by(|x, y| x.0.total_cmp(&y.0));
    match far {
        Some((d, k)) if d > eps => {
            douglas_peucker(&pts[..=k], eps, out);
            out.pop();
            douglas_peucker(&pts[k..], eps, out);
        }
        _ => {
            out.push(a);
            out.push(b);
        }
    }
}

fn contains(poly: &[(f64, f64)], p: (f64, f64)) -> bool {
    let mut odd = false;
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        if (a.1 > p.1) != (b.1 > p.1) && p.0 < a.0 + (p.1 - a.1) / (b.1 - a.1) * (b.0 - a.0) {
            odd = !odd;
        }
    }
    odd
}

/// Position of a boundary point as edge index plus fraction.
fn perimeter_pos(poly: &[(f64, f64)], p: (f64, f64)) -> f64 {
    let n = poly.len();
    let (k, t) = (0..n)
        .map(|k| (k, seg_dist(p, poly[k], poly[(k + 1) % n])))
        .min_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
        .map(|(k, (_, t))| (k, t))
        .expect("polygon has edges");
    k as f64 + t
}

/// Polygon vertices strictly between two boundary positions, walking forward.
fn walk(poly: &[(f64, f64)], from: f64, to: f64) -> Vec<(f64, f64)> {
    let n = poly.len() as f64;
    let span = (to - from).rem_euclid(n);
    let mut out = Vec::new();
    let mut k = from.floor() + 1.0;
    while (k - from).rem_euclid(n) < span && out.len() < poly.len() {
        out.push(poly[k.rem_euclid(n) as usize]);
        k += 1.0;
    }
    out
}

/// Splits `poly` along `chain`, whose ends lie on its boundary.
fn split(poly: &[(f64, f64)], chain: &[(f64, f64)]) -> [Vec<(f64, f64)>; 2] {
    let (s_in, s_out) = (perimeter_pos(poly, chain[0]), perimeter_pos(poly, chain[chain.len() - 1]));
    let mut a = chain.to_vec();
    a.extend(walk(poly, s_out, s_in));
    let mut b: Vec<(f64, f64)> = chain.iter().rev().cloned().collect();
    b.extend(walk(poly, s_in, s_out));
    [a, b]
}

impl Polyline {
    pub fn new(pts: Vec<(f64, f64)>) -> Self {
        let lo = pts.iter().fold((f64::INFINITY, f64::INFINITY), |m, p| (m.0.min(p.0), m.1.min(p.1)));
        let hi = pts.iter().fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |m, p| (m.0.max(p.0), m.1.max(p.1)));
        Self { pts, marks: Vec::new(), lo, hi }
    }

    pub fn with_marks(mut self, marks: Vec<(f64, f64)>) -> Self {
        self.marks = marks;
        self
    }

    /// Pieces of the polyline inside `r`, each running from boundary to boundary.
    fn chains(&self, r: &Rect) -> Vec<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        let mut cur: Vec<(f64, f64)> = Vec::new();
        for s in self.pts.windows(2) {
            match clip(s[0], s[1], r) {
                Some((lo, hi)) => {
                    if lo > 0.0 || cur.is_empty() {
                        if cur.len() > 1 {
                            out.push(std::mem::take(&mut cur));
                        }
                        cur = vec![lerp(s[0], s[1], lo)];
                    }
                    cur.push(lerp(s[0], s[1], hi));
                    if hi < 1.0 {
                        out.push(std::mem::take(&mut cur));
                    }
                }
                None => {
                    if cur.len() > 1 {
                        out.push(std::mem::take(&mut cur));
                    }
                    cur.clear();
                }
            }
        }
        if cur.len() > 1 {
            out.push(cur);
        }
        out
    }

    /// How `r` meets the polyline. Chains are simplified to within `rel` of the cell diagonal.
    pub fn piece(&self, r: &Rect, rel: f64) -> Piece {
        if self.hi.0 < r.x0 || self.lo.0 > r.x1 || self.hi.1 < r.y0 || self.lo.1 > r.y1 {
            return Piece::Smooth;
        }
        let on = |p: &(f64, f64)| p.0 >= r.x0 && p.0 <= r.x1 && p.1 >= r.y0 && p.1 <= r.y1;
        if inside(self.pts[0], r) || inside(self.pts[self.pts.len() - 1], r) || self.marks.iter().any(on) {
            return Piece::Rough;
        }
        let chains = self.chains(r);
        if chains.is_empty() {
            return Piece::Smooth;
        }
        let eps = rel * (r.x1 - r.x0).hypot(r.y1 - r.y0);
        let mut polys = vec![vec![(r.x0, r.y0), (r.x1, r.y0), (r.x1, r.y1), (r.x0, r.y1)]];
        for c in chains {
            let mut simple = Vec::new();
            douglas_peucker(&c, eps, &mut simple);
            let probe = simple
                .windows(2)
                .max_by(|x, y| {
                    let lx = (x[1].0 - x[0].0).hypot(x[1].1 - x[0].1);
                    let ly = (y[1].0 - y[0].0).hypot(y[1].1 - y[0].1);
                    lx.total_cmp(&ly)
                })
                .map(|w| lerp(w[0], w[1], 0.5))
                .expect("chain has a segment");
            let Some(k) = polys.iter().position(|p| contains(p, probe)) else {
                continue;
            };
            let host = polys.swap_remove(k);
            polys.extend(split(&host, &simple).into_iter().filter(|p| p.len() >= 3));
        }
        Piece::Split(polys)
    }
}

/// One-dimensional composite Gauss rule on `[a, b]` with `pieces` panels.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / pieces as f64;
    let vals: Vec<f64> = (0..pieces)
        .map(|k| {
            let c = a + (k as f64 + 0.5) * h;
            x.iter().zip(&w).map(|(xi, wi)| wi * f(c + 0.5 * h * xi)).sum::<f64>() * 0.5 * h
        })
        .collect();
    pairwise_sum(&vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_corner_singularity() {
        // ∫∫_{[0,1]^2} 1/|z| = 2 asinh(1)
        let f = |x: f64, y: f64| Some(1.0 / x.hypot(y));
        let g = integrate(&f, &[Rect::new(0.0, 1.0, 0.0, 1.0)], QuadOptions { tol: 1e-8, ..Default::default() }).unwrap();
        assert!((g.value - 2.0 * 1f64.asinh()).abs() < 1e-8, "{}", g.value);
        assert!((g.total_area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jump_across_a_cut_is_integrated_exactly() {
        let cut = Polyline::new(vec![(-0.5, -0.5), (0.3, 0.3), (1.5, 1.5)]);
        let f = |x: f64, y: f64| Some(if y > x { 2.0 + x } else { 1.0 });
        let cells = Rect::grid(&[0.0, 0.5, 1.0], &[0.0, 0.5, 1.0]);
        let g = integrate_cut(&f, &cells, QuadOptions { tol: 1e-12, ..Default::default() }, |r| cut.piece(r, 1e-6)).unwrap();
        assert!((g.value - (1.0 + 1.0 / 6.0 + 0.5)).abs() < 1e-12, "{}", g.value);
        assert!(g.cells.len() <= 4);
    }

    #[test]
    fn split_pieces_tile_the_cell() {
        let pts: Vec<(f64, f64)> = (0..=200).map(|k| (k as f64 / 100.0 - 0.5, 0.5 + 0.3 * (k as f64 / 20.0).sin())).collect();
        let cut = Polyline::new(pts);
        let r = Rect::new(0.0, 1.0, 0.0, 1.0);
        let Piece::Split(polys) = cut.piece(&r, 1e-6) else { panic!("expected a split") };
        let area: f64 = polys.iter().flat_map(|p| triangulate(p)).map(|[a, b, c]| 0.5 * cross(a, b, c).abs()).sum();
        assert!((area - 1.0).abs() < 1e-12, "{area}");
        assert_eq!(cut.piece(&Rect::new(0.0, 1.0, 0.9, 1.0), 1e-6), Piece::Smooth);
        assert_eq!(cut.piece(&Rect::new(-0.6, -0.4, 0.0, 1.0), 1e-6), Piece::Rough);
    }

    #[test]
    fn too_few_cells_is_reported() {
        let f = |x: f64, y: f64| Some(if x > y { 1.0 } else { 0.0 });
        let r = integrate(&f, &[Rect::new(0.0, 1.0, 0.0, 1.0)], QuadOptions { tol: 1e-12, order: 3, max_cells: 50 });
        assert!(matches!(r, Err(Error::GridTooCoarse { .. })));
    }
}
