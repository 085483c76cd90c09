//! Static SVG for the image set of `B` and for the forbidden zones.

use std::f64::consts::PI;
use std::fmt::Write;

use isotoda::{Complex64, ForbiddenZones, SpectrumInvariants, ZoneParity};

use crate::output::fmt_f;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: &[Complex64]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for z in points {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
        // center the shorter side
        let cx = 0.5 * (x0 + x1);
        let cy = 0.5 * (y0 + y1);
        Frame {
            x0: cx - span / 2.0,
            y1: cy + span / 2.0,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, z: Complex64) -> (String, String) {
        (
            fmt_f(MARGIN + (z.re - self.x0) * self.scale),
            fmt_f(MARGIN + (self.y1 - z.im) * self.scale),
        )
    }
}

fn polyline(frame: &Frame, points: &[Complex64]) -> String {
    let mut d = String::new();
    for (i, &z) in points.iter().enumerate() {
        let (x, y) = frame.map(z);
        let _ = write!(d, "{}{x} {y} ", if i == 0 { "M" } else { "L" });
    }
    d.trim_end().to_string()
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = fmt_f(width),
        h = fmt_f(height)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

/// Boundary arcs of the image set: the `-` arc around the positive real
/// axis, the `+` arc around the negative one, meeting at the two corners.
pub fn bset(inv: &SpectrumInvariants, samples: usize) -> String {
    let (c1, c2) = inv.corners();
    let theta_c = c1.arg().abs();
    let arc = |from: f64, to: f64, r: &dyn Fn(f64) -> f64| -> Vec<Complex64> {
        (0..samples)
            .map(|k| {
                let th = from + (to - from) * k as f64 / (samples - 1) as f64;
                Complex64::from_polar(r(th), th)
            })
            .collect()
    };
    let minus = arc(-theta_c, theta_c, &|th| inv.minus_branch(th));
    let plus = arc(theta_c, 2.0 * PI - theta_c, &|th| inv.plus_branch(th));
    let all: Vec<Complex64> = minus.iter().chain(&plus).copied().collect();
    let frame = Frame::fit(&all);

    let mut out = String::new();
    header(&mut out, SIZE, SIZE);
    let _ = writeln!(
        out,
        r#"<title>image set of B: m={} M={} n_plus={} n_minus={}</title>"#,
        fmt_f(inv.small_m),
        fmt_f(inv.big_m),
        inv.n_plus,
        inv.n_minus
    );
    let (ox, oy) = frame.map(Complex64::new(0.0, 0.0));
    let _ = writeln!(
        out,
        r##"<g stroke="#999" stroke-width="0.5"><line x1="0" y1="{oy}" x2="{s}" y2="{oy}"/><line x1="{ox}" y1="0" x2="{ox}" y2="{s}"/></g>"##,
        s = fmt_f(SIZE)
    );
    let region = format!(
        "{} {} Z",
        polyline(&frame, &minus),
        polyline(&frame, &plus).replacen('M', "L", 1)
    );
    let _ = writeln!(
        out,
        r##"<path d="{region}" fill="#dde8f5" stroke="none"/>"##
    );
    let _ = writeln!(
        out,
        r##"<path class="arc-minus" d="{}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>"##,
        polyline(&frame, &minus)
    );
    let _ = writeln!(
        out,
        r##"<path class="arc-plus" d="{}" fill="none" stroke="#b8312f" stroke-width="1.5"/>"##,
        polyline(&frame, &plus)
    );
    for c in [c1, c2] {
        let (x, y) = frame.map(c);
        let _ = writeln!(
            out,
            r#"<circle class="corner" cx="{x}" cy="{y}" r="4" fill="black"/>"#
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Number line with the allowed bands in blue and the forbidden zones in
/// red; collapsed zones are drawn as ticks.
pub fn zones(z: &ForbiddenZones) -> String {
    let width = 640.0;
    let height = 120.0;
    let lo = z.roots[0];
    let hi = z.roots[z.roots.len() - 1];
    let scale = (width - 2.0 * MARGIN) / (hi - lo).max(f64::MIN_POSITIVE);
    let x = |v: f64| fmt_f(MARGIN + (v - lo) * scale);
    let mid = 60.0;

    let mut out = String::new();
    header(&mut out, width, height);
    let _ = writeln!(
        out,
        "<title>forbidden zones: {} open of {}</title>",
        z.open_count(),
        z.zones.len()
    );
    for pair in z.roots.chunks(2) {
        let _ = writeln!(
            out,
            r##"<line class="band" x1="{}" y1="{m}" x2="{}" y2="{m}" stroke="#1f5fa8" stroke-width="6"/>"##,
            x(pair[0]),
            x(pair[1]),
            m = fmt_f(mid)
        );
    }
    for (k, ((a, b), (&closed, parity))) in z
        .zones
        .iter()
        .zip(z.collapsed.iter().zip(&z.parity))
        .enumerate()
    {
        let tag = match parity {
            ZoneParity::Upper => "U",
            ZoneParity::Lower => "L",
        };
        if closed {
            let _ = writeln!(
                out,
                r##"<line class="zone collapsed" x1="{c}" y1="45" x2="{c}" y2="75" stroke="#b8312f" stroke-width="1"/>"##,
                c = x(0.5 * (a + b))
            );
        } else {
            let _ = writeln!(
                out,
                r##"<rect class="zone" x="{}" y="52" width="{}" height="16" fill="#b8312f"/>"##,
                x(*a),
                fmt_f((b - a) * scale)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="95" font-size="11" text-anchor="middle">I{}{}</text>"#,
            x(0.5 * (a + b)),
            k + 1,
            tag
        );
    }
    out.push_str("</svg>\n");
    out
}
