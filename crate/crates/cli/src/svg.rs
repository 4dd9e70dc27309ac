//! Self-contained SVG plots. Every plotted value is also stored verbatim in a
//! `data-*` attribute so the numbers can be read back without rendering.

use std::fmt::Write;

use dimsig_core::perturbation::{HistogramBin, Stats};

const W: f64 = 720.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let span = |it: &mut dyn Iterator<Item = f64>| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for v in it {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = span(&mut xs.clone());
        let (y0, y1) = span(&mut ys.clone());
        Self { x0, x1, y0, y1 }
    }

    fn x(&self, v: f64) -> f64 {
        PAD + (v - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn y(&self, v: f64) -> f64 {
        H - PAD - (v - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn open(out: &mut String, kind: &str, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" data-plot="{kind}">"#
    );
    let _ = write!(
        out,
        r#"<rect width="{W}" height="{H}" fill="white"/><text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        W / 2.0,
        esc(title)
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        r##"<g stroke="#333" fill="none"><line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}"/></g>"##,
        b = H - PAD,
        r = W - PAD
    );
    let _ = write!(
        out,
        r#"<g font-family="sans-serif" font-size="11"><text x="{PAD}" y="{}">{}</text><text x="{}" y="{}" text-anchor="end">{}</text><text x="{}" y="{PAD}" text-anchor="end">{}</text><text x="{}" y="{}" text-anchor="end">{}</text>"#,
        H - PAD + 16.0,
        fmt_tick(f.x0),
        W - PAD,
        H - PAD + 16.0,
        fmt_tick(f.x1),
        PAD - 4.0,
        fmt_tick(f.y1),
        PAD - 4.0,
        H - PAD,
        fmt_tick(f.y0),
    );
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text><text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">{}</text></g>"#,
        W / 2.0,
        H - 12.0,
        esc(x_label),
        H / 2.0,
        H / 2.0,
        esc(y_label)
    );
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1000.0 || v == v.trunc() {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let f = Frame::new(all.clone().map(|p| p.0), all.map(|p| p.1));
    let mut out = String::new();
    open(&mut out, "line", title);
    axes(&mut out, &f, x_label, y_label);
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", f.x(x), f.y(y)))
            .collect();
        let _ = write!(
            out,
            r#"<g class="series" data-name="{}"><polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            esc(&s.name),
            path.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = write!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}" data-x="{x}" data-y="{y}"/>"#,
                f.x(x),
                f.y(y)
            );
        }
        let _ = write!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text></g>"#,
            W - PAD + 4.0,
            PAD + 14.0 * i as f64,
            esc(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One box (quartiles, whiskers at min/max, mean marker) per flip count.
pub fn box_plot(title: &str, y_label: &str, rows: &[(usize, Stats)]) -> String {
    let f = Frame::new(
        rows.iter().map(|r| r.0 as f64),
        rows.iter().flat_map(|r| [r.1.min, r.1.max]),
    );
    let mut out = String::new();
    open(&mut out, "box", title);
    axes(&mut out, &f, "flipped bits", y_label);
    let half = ((W - 2.0 * PAD) / (rows.len().max(1) as f64) * 0.35).clamp(1.0, 12.0);
    for (k, s) in rows {
        let x = f.x(*k as f64);
        let _ = write!(
            out,
            r##"<g class="box" data-k="{k}" data-min="{}" data-q1="{}" data-median="{}" data-q3="{}" data-max="{}" data-mean="{}" stroke="#1f77b4" fill="none">"##,
            s.min, s.q1, s.median, s.q3, s.max, s.mean
        );
        let _ = write!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-width="2"/>"#,
            f.y(s.min),
            f.y(s.max),
            x - half,
            f.y(s.q3),
            2.0 * half,
            (f.y(s.q1) - f.y(s.q3)).max(0.5),
            x - half,
            f.y(s.median),
            x + half,
            f.y(s.median),
        );
        let _ = write!(
            out,
            r##"<circle cx="{x:.2}" cy="{:.2}" r="1.5" fill="#d62728" stroke="none"/></g>"##,
            f.y(s.mean)
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn histogram(title: &str, x_label: &str, bins: &[HistogramBin], original: f64) -> String {
    let f = Frame::new(
        bins.iter().flat_map(|b| [b.lo, b.hi]).chain([original]),
        bins.iter().map(|b| b.count as f64).chain([0.0]),
    );
    let mut out = String::new();
    open(&mut out, "histogram", title);
    axes(&mut out, &f, x_label, "trials");
    for b in bins {
        let (x0, x1) = (f.x(b.lo), f.x(b.hi));
        let _ = write!(
            out,
            r##"<rect class="bin" x="{x0:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#1f77b4" fill-opacity="0.6" data-lo="{}" data-hi="{}" data-count="{}"/>"##,
            f.y(b.count as f64),
            (x1 - x0).max(1.0),
            f.y(0.0) - f.y(b.count as f64),
            b.lo,
            b.hi,
            b.count
        );
    }
    let xo = f.x(original);
    let _ = write!(
        out,
        r##"<line class="original" x1="{xo:.2}" y1="{PAD}" x2="{xo:.2}" y2="{}" stroke="#d62728" stroke-width="2" data-value="{original}"/>"##,
        H - PAD
    );
    out.push_str("</svg>\n");
    out
}

/// Radar chart: one spoke per label, values expected in [0, 1].
pub fn radar(title: &str, labels: &[String], series: &[(String, Vec<f64>)]) -> String {
    let mut out = String::new();
    open(&mut out, "radar", title);
    let (cx, cy) = (W / 2.0, H / 2.0 + 12.0);
    let radius = H / 2.0 - PAD;
    let n = labels.len().max(1);
    let at = |i: usize, v: f64| {
        let a = std::f64::consts::TAU * i as f64 / n as f64 - std::f64::consts::FRAC_PI_2;
        (cx + radius * v * a.cos(), cy + radius * v * a.sin())
    };
    for ring in [0.25, 0.5, 0.75, 1.0] {
        let _ = write!(
            out,
            r##"<circle cx="{cx}" cy="{cy}" r="{:.2}" fill="none" stroke="#ccc"/>"##,
            radius * ring
        );
    }
    for (i, l) in labels.iter().enumerate() {
        let (x, y) = at(i, 1.0);
        let (lx, ly) = at(i, 1.08);
        let _ = write!(
            out,
            r##"<line x1="{cx}" y1="{cy}" x2="{x:.2}" y2="{y:.2}" stroke="#eee"/><text x="{lx:.2}" y="{ly:.2}" font-family="sans-serif" font-size="8" text-anchor="middle">{}</text>"##,
            esc(l)
        );
    }
    for (j, (name, values)) in series.iter().enumerate() {
        let color = COLORS[j % COLORS.len()];
        let pts: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let (x, y) = at(i, v);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = write!(
            out,
            r#"<g class="series" data-name="{}"><polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}"/>"#,
            esc(name),
            pts.join(" ")
        );
        for (i, &v) in values.iter().enumerate() {
            let (x, y) = at(i, v);
            let _ = write!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="{color}" data-label="{}" data-value="{v}"/>"#,
                esc(&labels[i])
            );
        }
        out.push_str("</g>");
    }
    out.push_str("</svg>\n");
    out
}
