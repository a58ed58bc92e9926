//! Static SVG plots: mean ± standard error per scheme over the sweep axis.
//! The output bytes are a pure function of the input series.

use std::fmt::Write as _;

use crate::error::Result;

#[derive(Debug, Clone)]
pub struct PlotSeries {
    pub label: String,
    /// (sweep value, mean, standard error) per point, in plotting order.
    pub points: Vec<(f64, f64, f64)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 55.0;

const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

fn fmt(v: f64) -> String {
    // Fixed decimals keep the byte stream deterministic and diff-friendly.
    format!("{v:.3}")
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if hi <= lo || hi.is_nan() || lo.is_nan() {
        return vec![lo];
    }
    let raw_step = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw_step.log10().floor());
    let norm = raw_step / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= hi + step * 1e-9 {
        // Snap tiny float drift so labels render cleanly.
        ticks.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    ticks
}

/// Render mean ± stderr curves, one per series, into an SVG document.
/// A dashed zero line appears whenever the y-range spans zero.
pub fn render_plot(series: &[PlotSeries], x_label: &str, y_label: &str, title: &str) -> String {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, m, e) in &s.points {
            xs.push(x);
            ys.push(m - e);
            ys.push(m + e);
        }
    }
    let (x_lo, x_hi) = match (
        xs.iter().cloned().reduce(f64::min),
        xs.iter().cloned().reduce(f64::max),
    ) {
        (Some(lo), Some(hi)) if hi > lo => (lo, hi),
        (Some(lo), Some(_)) => (lo - 1.0, lo + 1.0),
        _ => (0.0, 1.0),
    };
    let (mut y_lo, mut y_hi) = match (
        ys.iter().cloned().reduce(f64::min),
        ys.iter().cloned().reduce(f64::max),
    ) {
        (Some(lo), Some(hi)) if hi > lo => (lo, hi),
        (Some(lo), Some(_)) => (lo - 1.0, lo + 1.0),
        _ => (0.0, 1.0),
    };
    let pad = (y_hi - y_lo) * 0.08;
    y_lo -= pad;
    y_hi += pad;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = move |y: f64| MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        fmt(MARGIN_L + plot_w / 2.0),
        title
    );

    // Axes.
    let _ = writeln!(
        svg,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        fmt(MARGIN_L),
        fmt(MARGIN_T),
        fmt(plot_w),
        fmt(plot_h)
    );
    for t in nice_ticks(x_lo, x_hi, 8) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>",
            fmt(x),
            fmt(MARGIN_T + plot_h),
            fmt(MARGIN_T + plot_h + 5.0)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            fmt(x),
            fmt(MARGIN_T + plot_h + 18.0),
            fmt(t)
        );
    }
    for t in nice_ticks(y_lo, y_hi, 8) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"black\"/>",
            fmt(y),
            fmt(MARGIN_L - 5.0),
            fmt(MARGIN_L)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            fmt(MARGIN_L - 8.0),
            fmt(y + 4.0),
            fmt(t)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        fmt(MARGIN_L + plot_w / 2.0),
        fmt(HEIGHT - 12.0),
        x_label
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        fmt(MARGIN_T + plot_h / 2.0),
        fmt(MARGIN_T + plot_h / 2.0),
        y_label
    );

    // Zero line when the range spans it.
    if y_lo < 0.0 && y_hi > 0.0 {
        let y = sy(0.0);
        let _ = writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>",
            fmt(MARGIN_L),
            fmt(y),
            fmt(MARGIN_L + plot_w)
        );
    }

    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        // Error bars.
        for &(x, m, e) in &s.points {
            if e > 0.0 {
                let (px, y0, y1) = (sx(x), sy(m - e), sy(m + e));
                let _ = writeln!(
                    svg,
                    "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\"/>",
                    fmt(px),
                    fmt(y0),
                    fmt(y1),
                    color
                );
                for y in [y0, y1] {
                    let _ = writeln!(
                        svg,
                        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\"/>",
                        fmt(px - 4.0),
                        fmt(y),
                        fmt(px + 4.0),
                        color
                    );
                }
            }
        }
        // Polyline through the means.
        if s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, m, _)| format!("{},{}", fmt(sx(x)), fmt(sy(m))))
                .collect();
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
                path.join(" "),
                color
            );
        }
        // Markers.
        for &(x, m, _) in &s.points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>",
                fmt(sx(x)),
                fmt(sy(m)),
                color
            );
        }
        // Legend entry.
        let ly = MARGIN_T + 14.0 + idx as f64 * 18.0;
        let _ = writeln!(
            svg,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"1.5\"/>",
            fmt(WIDTH - MARGIN_R + 10.0),
            fmt(ly - 4.0),
            fmt(WIDTH - MARGIN_R + 34.0),
            color
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            fmt(WIDTH - MARGIN_R + 40.0),
            fmt(ly),
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_plot(
    series: &[PlotSeries],
    x_label: &str,
    y_label: &str,
    title: &str,
    path: &std::path::Path,
) -> Result<()> {
    std::fs::write(path, render_plot(series, x_label, y_label, title))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_renders_marker_and_axes() {
        let svg = render_plot(
            &[PlotSeries {
                label: "ps".into(),
                points: vec![(1.0, 42.0, 0.0)],
            }],
            "ratio",
            "ec (%)",
            "demo",
        );
        assert!(svg.contains("<circle"));
        assert!(svg.contains("<rect"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn identical_input_identical_bytes() {
        let series = vec![PlotSeries {
            label: "ps".into(),
            points: vec![(1.0, 10.0, 1.0), (2.0, 5.0, 0.5), (3.0, 7.0, 0.4)],
        }];
        let a = render_plot(&series, "x", "y", "t");
        let b = render_plot(&series, "x", "y", "t");
        assert_eq!(a, b);
    }

    #[test]
    fn zero_line_drawn_when_values_cross_zero() {
        let series = vec![PlotSeries {
            label: "ps".into(),
            points: vec![(1.0, 10.0, 0.0), (2.0, -5.0, 0.0)],
        }];
        let svg = render_plot(&series, "x", "y", "t");
        assert!(svg.contains("stroke-dasharray"));
        // All-positive data: no zero line.
        let positive = vec![PlotSeries {
            label: "ps".into(),
            points: vec![(1.0, 10.0, 0.0), (2.0, 5.0, 0.0)],
        }];
        assert!(!render_plot(&positive, "x", "y", "t").contains("stroke-dasharray"));
    }
}
