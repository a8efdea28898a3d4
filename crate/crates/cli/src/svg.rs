//! Minimal SVG line and phase plots.

use std::fmt::Write;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 80.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
/// Polylines are thinned to at most this many vertices.
const MAX_POINTS: usize = 6000;

pub const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Left,
    Right,
}

pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
    pub axis: Axis,
    pub color: &'a str,
}

#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of<'a>(values: impl IntoIterator<Item = &'a f64>) -> Self {
        let (lo, hi) = values
            .into_iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            return Range { lo: 0.0, hi: 1.0 };
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            let pad = 0.5 * lo.abs().max(1.0);
            return Range { lo: lo - pad, hi: hi + pad };
        }
        Range { lo, hi }
    }

    fn ticks(&self) -> Vec<f64> {
        let raw = (self.hi - self.lo) / 8.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }

    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }
}

fn label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_owned()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn stride(n: usize) -> usize {
    n.div_ceil(MAX_POINTS).max(1)
}

fn polyline(out: &mut String, xs: &[f64], ys: &[f64], color: &str) {
    let step = stride(xs.len());
    out.push_str(r#"<polyline fill="none" stroke-width="1.5" stroke=""#);
    out.push_str(color);
    out.push_str(r#"" points=""#);
    let mut idx: Vec<usize> = (0..xs.len()).step_by(step).collect();
    if idx.last() != Some(&(xs.len().saturating_sub(1))) && !xs.is_empty() {
        idx.push(xs.len() - 1);
    }
    for i in idx {
        if xs[i].is_finite() && ys[i].is_finite() {
            write!(out, "{:.2},{:.2} ", xs[i], ys[i]).unwrap();
        }
    }
    out.push_str("\"/>\n");
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    )
    .unwrap();
}

fn x_axis(out: &mut String, range: Range, name: &str) {
    let y0 = HEIGHT - BOTTOM;
    for t in range.ticks() {
        let x = range.map(t, LEFT, WIDTH - RIGHT);
        writeln!(out, r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0).unwrap();
        writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, y0 + 18.0, label(t)).unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 15.0,
        escape(name)
    )
    .unwrap();
}

fn y_axis(out: &mut String, range: Range, name: &str, side: Axis) {
    let (x0, dir, anchor, name_x) = match side {
        Axis::Left => (LEFT, -1.0, "end", 20.0),
        Axis::Right => (WIDTH - RIGHT, 1.0, "start", WIDTH - 20.0),
    };
    for v in range.ticks() {
        let y = range.map(v, HEIGHT - BOTTOM, TOP);
        writeln!(out, r#"<line x1="{x0}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black"/>"#, x0 + 5.0 * dir).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="{anchor}">{}</text>"#,
            x0 + 8.0 * dir,
            y + 4.0,
            label(v)
        )
        .unwrap();
    }
    let mid = (TOP + HEIGHT - BOTTOM) / 2.0;
    writeln!(
        out,
        r#"<text x="{name_x}" y="{mid}" text-anchor="middle" transform="rotate(-90 {name_x} {mid})">{}</text>"#,
        escape(name)
    )
    .unwrap();
}

/// Time-series plot with an optional second y-axis on the right.
pub fn line_plot(title: &str, x_label: &str, times: &[f64], series: &[Series], left_label: &str, right_label: &str) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let xr = Range::of(times);
    x_axis(&mut out, xr, x_label);
    let mut legend_y = TOP + 16.0;
    for side in [Axis::Left, Axis::Right] {
        let on_side: Vec<&Series> = series.iter().filter(|s| s.axis == side).collect();
        if on_side.is_empty() {
            continue;
        }
        let yr = Range::of(on_side.iter().flat_map(|s| s.values.iter()));
        y_axis(&mut out, yr, if side == Axis::Left { left_label } else { right_label }, side);
        for s in on_side {
            let xs: Vec<f64> = times.iter().map(|&t| xr.map(t, LEFT, WIDTH - RIGHT)).collect();
            let ys: Vec<f64> = s.values.iter().map(|&v| yr.map(v, HEIGHT - BOTTOM, TOP)).collect();
            polyline(&mut out, &xs, &ys, s.color);
            let side_name = if side == Axis::Left { "left" } else { "right" };
            writeln!(
                out,
                r#"<line x1="{}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{} ({side_name} axis)</text>"#,
                LEFT + 10.0,
                LEFT + 30.0,
                s.color,
                LEFT + 36.0,
                legend_y + 4.0,
                escape(s.label)
            )
            .unwrap();
            legend_y += 16.0;
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Parametric plot of `y` against `x`.
pub fn phase_plot(title: &str, x_label: &str, y_label: &str, x: &[f64], y: &[f64]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let xr = Range::of(x);
    let yr = Range::of(y);
    x_axis(&mut out, xr, x_label);
    y_axis(&mut out, yr, y_label, Axis::Left);
    let xs: Vec<f64> = x.iter().map(|&v| xr.map(v, LEFT, WIDTH - RIGHT)).collect();
    let ys: Vec<f64> = y.iter().map(|&v| yr.map(v, HEIGHT - BOTTOM, TOP)).collect();
    polyline(&mut out, &xs, &ys, PALETTE[0]);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_numbers_inside_range() {
        let r = Range { lo: 1.0, hi: 4000.0 };
        let t = r.ticks();
        assert_eq!(t, (1..=8).map(|k| 500.0 * f64::from(k)).collect::<Vec<_>>());
        let r = Range { lo: 0.0, hi: 2.8 };
        assert_eq!(r.ticks().len(), 6);
    }

    #[test]
    fn line_plot_has_one_polyline_per_series() {
        let t = [0.0, 1.0, 2.0];
        let a = [1.0, 2.0, 1.0];
        let b = [0.0, 0.5, 0.0];
        let svg = line_plot(
            "demo <1>",
            "t",
            &t,
            &[
                Series { label: "S", values: &a, axis: Axis::Left, color: PALETTE[0] },
                Series { label: "N", values: &b, axis: Axis::Right, color: PALETTE[1] },
            ],
            "S",
            "N",
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("demo &lt;1&gt;"));
    }

    #[test]
    fn long_series_are_thinned() {
        let x: Vec<f64> = (0..100_000).map(f64::from).collect();
        let svg = phase_plot("p", "x", "y", &x, &x);
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert!(pts.split_whitespace().count() <= MAX_POINTS + 1);
    }

    #[test]
    fn flat_series_does_not_divide_by_zero() {
        let svg = phase_plot("p", "x", "y", &[50.0, 50.0], &[50.0, 50.0]);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
