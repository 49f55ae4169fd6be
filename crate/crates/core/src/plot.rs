//! Self-contained SVG line plot of the experiment curves. No plotting
//! dependency; linear axes; three polylines with a legend.

use crate::runner::ExperimentRow;
use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 52.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    values: Vec<f64>,
}

/// Render the empirical prefix curve against the two scaled bound curves.
pub fn render_svg(rows: &[ExperimentRow]) -> String {
    let ms: Vec<f64> = rows.iter().map(|r| r.m as f64).collect();
    let series = [
        Series {
            label: "empirical",
            color: "#1f77b4",
            values: rows.iter().map(|r| r.empirical).collect(),
        },
        Series {
            label: "scaled-sum",
            color: "#8c564b",
            values: rows.iter().map(|r| r.curve_sum).collect(),
        },
        Series {
            label: "scaled-max",
            color: "#d62728",
            values: rows.iter().map(|r| r.curve_max).collect(),
        },
    ];

    let x_min = ms.first().copied().unwrap_or(0.0);
    let x_max = ms.last().copied().unwrap_or(1.0).max(x_min + 1.0);
    let y_max = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max)
        .max(1e-12);
    let y_min = 0.0;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = move |y: f64| MARGIN_T + plot_h - (y - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // Axes
    let x0 = sx(x_min);
    let x1 = sx(x_max);
    let y0 = sy(y_min);
    let y1 = sy(y_max);
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black" stroke-width="1"/>"#
    );

    // X ticks at each m; y ticks at 5 even divisions.
    for &m in &ms {
        let x = sx(m);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-size="13" text-anchor="middle" font-family="sans-serif">{m}</text>"#,
            y0 + 22.0
        );
    }
    for k in 0..=5 {
        let yv = y_min + (y_max - y_min) * k as f64 / 5.0;
        let y = sy(yv);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black" stroke-width="1"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="end" font-family="sans-serif">{yv:.1}</text>"#,
            x0 - 9.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle" font-family="sans-serif">m (kernels in prefix sum)</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0
    );

    // Curves
    for s in &series {
        let mut pts = String::new();
        for (x, y) in ms.iter().zip(&s.values) {
            let _ = write!(pts, "{:.2},{:.2} ", sx(*x), sy(*y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            pts.trim_end(),
            s.color
        );
    }

    // Legend
    let lx = MARGIN_L + plot_w - 150.0;
    let mut ly = MARGIN_T + 10.0;
    for s in &series {
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/>"#,
            lx + 28.0,
            s.color
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" font-family="sans-serif">{}</text>"#,
            lx + 34.0,
            ly + 4.0,
            s.label
        );
        ly += 20.0;
    }

    svg.push_str("</svg>\n");
    svg
}
