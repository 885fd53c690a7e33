//! CSV and SVG rendering of profiles and experiment series.

use std::f64::consts::TAU;
use std::fmt::Write;

use crate::asymmetry::{decompose, f_at, Which};
use crate::error::Result;
use crate::exec::Exec;
use crate::experiments::{ExperimentResult, Series};
use crate::gauge::GaugeContext;

/// Samples per revolution for profiles of smooth bodies.
pub const PROFILE_SAMPLES: usize = 1440;

/// What a plot shows: one or more named curves and their axis labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log: bool,
    pub series: Vec<Series>,
}

/// `f(θ)` over the polar angle. Polygons give exact steps from the piece
/// decomposition; rounded bodies are sampled uniformly.
pub fn profile(ctx: &GaugeContext, which: Which, exec: Exec) -> Result<Figure> {
    let points = if ctx.body().as_polygon().is_some() {
        let dec = decompose(ctx, which, exec)?;
        let mut pts = Vec::with_capacity(2 * dec.pieces.len() + 2);
        if let Some(last) = dec.pieces.last().filter(|p| p.end > TAU) {
            pts.push((0.0, last.value));
            pts.push((last.end - TAU, last.value));
        }
        for p in &dec.pieces {
            pts.push((p.start, p.value));
            pts.push((p.end.min(TAU), p.value));
        }
        pts
    } else {
        let vals = exec.map_range(PROFILE_SAMPLES + 1, |k| {
            let t = TAU * k as f64 / PROFILE_SAMPLES as f64;
            f_at(ctx, which, t).map(|v| (t, v))
        });
        vals.into_iter().collect::<Result<Vec<_>>>()?
    };
    let name = match which {
        Which::Out => "f_out",
        Which::In => "f_in",
        Which::HatOut => "f_hat_out",
    };
    Ok(Figure {
        title: format!("{name} profile"),
        x_label: "polar angle".into(),
        y_label: name.into(),
        log: false,
        series: vec![Series {
            name: name.into(),
            points,
        }],
    })
}

/// Series of an experiment; the continuity suite is plotted on log axes.
pub fn experiment_figure(r: &ExperimentResult) -> Figure {
    let log = r.name == "continuity";
    Figure {
        title: r.name.clone(),
        x_label: if log { "n".into() } else { "parameter".into() },
        y_label: if log {
            "residual".into()
        } else {
            "value".into()
        },
        log,
        series: r.series.clone(),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per point. Log figures carry extra `log10` columns.
pub fn to_csv(fig: &Figure) -> String {
    let mut out = String::new();
    if fig.log {
        out.push_str("series,parameter,value,log10_parameter,log10_value\n");
    } else {
        out.push_str("series,parameter,value\n");
    }
    for s in &fig.series {
        for &(x, y) in &s.points {
            let _ = write!(out, "{},{},{}", s.name, num(x), num(y));
            if fig.log {
                let _ = write!(out, ",{},{}", num(x.log10()), num(y.log10()));
            }
            out.push('\n');
        }
    }
    out
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Data range padded so flat curves stay visible.
fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if lo > hi {
        return (0.0, 1.0);
    }
    let pad = if hi - lo > 1e-12 {
        0.05 * (hi - lo)
    } else {
        0.5_f64.max(lo.abs() * 0.1)
    };
    (lo - pad, hi + pad)
}

/// Line plot with a fixed 800×600 view box. Output depends only on `fig`.
pub fn to_svg(fig: &Figure) -> String {
    let tx = |v: f64| if fig.log { v.log10() } else { v };
    let all = || fig.series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = range(all().map(|p| tx(p.0)));
    let (y0, y1) = range(all().map(|p| tx(p.1)));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" width="800" height="600" font-family="sans-serif" font-size="14">"#
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n");
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let label = |v: f64| {
            if fig.log {
                format!("1e{v:.2}")
            } else {
                format!("{v:.4}")
            }
        };
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(fx),
            HEIGHT - BOTTOM + 20.0,
            label(fx)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(fy) + 5.0,
            label(fy)
        );
    }
    if y0 < 0.0 && y1 > 0.0 && !fig.log {
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 4"/>"##,
            sy(0.0),
            LEFT + pw,
            sy(0.0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="400" y="30" text-anchor="middle" font-size="18">{}</text>"#,
        escape(&fig.title)
    );
    let _ = writeln!(
        out,
        r#"<text x="400" y="{:.2}" text-anchor="middle">{}</text>"#,
        HEIGHT - 20.0,
        escape(&fig.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="300" text-anchor="middle" transform="rotate(-90 20 300)">{}</text>"#,
        escape(&fig.y_label)
    );
    for (i, s) in fig.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| (tx(x), tx(y)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
            LEFT + 10.0,
            TOP + 20.0 + 18.0 * i as f64,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}
