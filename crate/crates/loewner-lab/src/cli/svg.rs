//! Minimal SVG emitters for curves, graphs and scalar fields.

use crate::C64;
use std::fmt::Write;

const SIZE: f64 = 480.0;
const PAD: f64 = 20.0;

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = C64>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in points.filter(|z| z.re.is_finite() && z.im.is_finite()) {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        if !x0.is_finite() {
            return Self { x0: -1.0, y0: -1.0, scale: (SIZE - 2.0 * PAD) / 2.0 };
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        // center the shorter side
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        Self { x0: cx - span / 2.0, y0: cy - span / 2.0, scale: (SIZE - 2.0 * PAD) / span }
    }

    fn map(&self, z: C64) -> (f64, f64) {
        (PAD + (z.re - self.x0) * self.scale, SIZE - PAD - (z.im - self.y0) * self.scale)
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
}

fn points_attr(frame: &Frame, pts: &[C64]) -> String {
    pts.iter()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .map(|&z| {
            let (x, y) = frame.map(z);
            format!("{x:.3},{y:.3}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Draws a sampled curve; closed curves become a `polygon`, open ones a `polyline`.
/// `window` optionally clips the frame to the square `|re|, |im| ≤ window`.
pub fn curve(points: &[C64], closed: bool, window: Option<f64>) -> String {
    let frame = match window {
        Some(r) => Frame::fit([C64::new(-r, -r), C64::new(r, r)].into_iter()),
        None => Frame::fit(points.iter().copied()),
    };
    let mut out = String::new();
    header(&mut out);
    let (ax, ay) = frame.map(C64::new(0.0, 0.0));
    let _ = writeln!(out, r#"<line x1="0" y1="{ay:.3}" x2="{SIZE}" y2="{ay:.3}" stroke="lightgray"/>"#);
    let _ = writeln!(out, r#"<line x1="{ax:.3}" y1="0" x2="{ax:.3}" y2="{SIZE}" stroke="lightgray"/>"#);
    let tag = if closed { "polygon" } else { "polyline" };
    let _ = writeln!(
        out,
        r#"<{tag} points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        points_attr(&frame, points)
    );
    out.push_str("</svg>\n");
    out
}

/// Graph of a function `[0, 2π] → ℝ` drawn in the square `[0, 2π]²`, with the diagonal for reference.
pub fn angle_graph(x: &[f64], y: &[f64]) -> String {
    let tau = std::f64::consts::TAU;
    let frame = Frame::fit([C64::new(0.0, 0.0), C64::new(tau, tau)].into_iter());
    let mut out = String::new();
    header(&mut out);
    let d: Vec<C64> = vec![C64::new(0.0, 0.0), C64::new(tau, tau)];
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="lightgray" stroke-dasharray="4 4"/>"#,
        points_attr(&frame, &d)
    );
    let pts: Vec<C64> = x.iter().zip(y).map(|(&a, &b)| C64::new(a, b)).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        points_attr(&frame, &pts)
    );
    out.push_str("</svg>\n");
    out
}

fn color(v: f64, vmax: f64) -> String {
    if !v.is_finite() {
        return "#808080".into();
    }
    let t = if vmax > 0.0 { (v / vmax).clamp(-1.0, 1.0) } else { 0.0 };
    // blue for negative, red for positive, white at zero
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

/// Heatmap of `values[j][i]` sampled at cell centres of the square `[-r, r]²`, row `j = 0` at the top.
/// Non-finite values (points on the curve) are drawn gray. Each cell carries its value in `data-v`.
pub fn heatmap(values: &[Vec<f64>], r: f64) -> String {
    let ny = values.len();
    let nx = values.first().map_or(0, Vec::len);
    let vmax = values.iter().flatten().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = String::new();
    header(&mut out);
    let (cw, ch) = ((SIZE - 2.0 * PAD) / nx.max(1) as f64, (SIZE - 2.0 * PAD) / ny.max(1) as f64);
    for (j, row) in values.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}" data-v="{:.6e}"/>"#,
                PAD + i as f64 * cw,
                PAD + j as f64 * ch,
                cw,
                ch,
                color(v, vmax),
                v
            );
        }
    }
    let _ = writeln!(out, r#"<!-- window [-{r}, {r}]^2, max |value| {vmax:.6e} -->"#);
    out.push_str("</svg>\n");
    out
}
