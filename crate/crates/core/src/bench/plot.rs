//! Minimal SVG line charts: one column per case, with the budget trajectory
//! on top and normalized running-average consumption against the targets
//! below.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::traces::LabeledTrace;
use crate::{Error, Result};

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 220.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 40.0;
const MAX_POINTS: usize = 400;
/// Leading share of the horizon ignored when fitting the y-range.
const TRANSIENT: f64 = 0.02;

const RESOURCE_COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];
const ALGORITHM_DASH: [&str; 4] = ["", "6,3", "2,2", "8,3,2,3"];

struct Series {
    points: Vec<(f64, f64)>,
    color: &'static str,
    dash: &'static str,
    width: f64,
}

struct Panel {
    title: String,
    y_label: &'static str,
    series: Vec<Series>,
    /// Horizontal reference lines.
    refs: Vec<(f64, &'static str)>,
}

fn stride_indices(n: usize) -> impl Iterator<Item = usize> {
    let stride = n.div_ceil(MAX_POINTS).max(1);
    (0..n).step_by(stride).chain(if n > 0 && !(n - 1).is_multiple_of(stride) { Some(n - 1) } else { None })
}

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else if v.abs() >= 10.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.2}")
    }
}

fn draw_panel(svg: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let (pw, ph) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let (x0, y0) = (ox + MARGIN_L, oy + MARGIN_T);
    let all = || panel.series.iter().flat_map(|s| s.points.iter());
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, _) in all() {
        xmin = xmin.min(*x);
        xmax = xmax.max(*x);
    }
    // Early transients are clipped rather than allowed to set the scale.
    let settled = xmin + TRANSIENT * (xmax - xmin);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, y) in all().filter(|(x, _)| *x >= settled) {
        ymin = ymin.min(*y);
        ymax = ymax.max(*y);
    }
    for (r, _) in &panel.refs {
        ymin = ymin.min(*r);
        ymax = ymax.max(*r);
    }
    let (xmin, xmax) = if xmax > xmin { (xmin, xmax) } else { nice_range(xmin, xmax) };
    let (ymin, ymax) = nice_range(ymin, ymax);
    let sx = |x: f64| x0 + (x - xmin) / (xmax - xmin) * pw;
    let sy = |y: f64| y0 + ph - (y - ymin) / (ymax - ymin) * ph;

    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
        x0 + pw / 2.0,
        oy + 20.0,
        panel.title
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{x0:.1}" y="{y0:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#444"/>"##
    );
    for k in 0..=2 {
        let fx = xmin + (xmax - xmin) * k as f64 / 2.0;
        let fy = ymin + (ymax - ymin) * k as f64 / 2.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{fx:.0}</text>"#,
            sx(fx),
            y0 + ph + 14.0,
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#,
            x0 - 4.0,
            sy(fy) + 3.0,
            fmt_tick(fy)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">t</text>"#,
        x0 + pw / 2.0,
        y0 + ph + 30.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        ox + 14.0,
        y0 + ph / 2.0,
        ox + 14.0,
        y0 + ph / 2.0,
        panel.y_label
    );
    for (r, color) in &panel.refs {
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{:.2}" x2="{:.1}" y2="{:.2}" stroke="{color}" stroke-opacity="0.5" stroke-dasharray="4,4"/>"#,
            x0,
            sy(*r),
            x0 + pw,
            sy(*r)
        );
    }
    let clip = format!("clip{}_{}", ox as i64, oy as i64);
    let _ = writeln!(
        svg,
        r#"<clipPath id="{clip}"><rect x="{x0:.1}" y="{y0:.1}" width="{pw:.1}" height="{ph:.1}"/></clipPath>"#
    );
    let _ = writeln!(svg, r#"<g clip-path="url(#{clip})">"#);
    for s in &panel.series {
        let mut pts = String::new();
        for (x, y) in &s.points {
            let _ = write!(pts, "{:.1},{:.2} ", sx(*x), sy(*y));
        }
        let dash = if s.dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{}""#, s.dash)
        };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="{}"{dash} points="{}"/>"#,
            s.color,
            s.width,
            pts.trim_end()
        );
    }
    svg.push_str("</g>\n");
}

/// SVG document for the given traces, or `None` when there is nothing to
/// draw.
pub fn render_figure(traces: &[LabeledTrace]) -> Option<String> {
    if traces.iter().all(|t| t.trace.records.is_empty()) {
        return None;
    }
    let mut cases: Vec<&str> = Vec::new();
    let mut algorithms: Vec<&str> = Vec::new();
    for t in traces {
        if !cases.contains(&t.case.as_str()) {
            cases.push(&t.case);
        }
        if !algorithms.contains(&t.trace.algorithm.as_str()) {
            algorithms.push(&t.trace.algorithm);
        }
    }
    let dash_of = |alg: &str| ALGORITHM_DASH[algorithms.iter().position(|a| *a == alg).unwrap_or(0) % ALGORITHM_DASH.len()];

    let legend_h = 24.0;
    let width = PANEL_W * cases.len() as f64;
    let height = 2.0 * PANEL_H + legend_h;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    for (col, case) in cases.iter().enumerate() {
        let members: Vec<&LabeledTrace> = traces.iter().filter(|t| t.case == *case).collect();
        let mut budget = Panel {
            title: format!("{case}: budget"),
            y_label: "c_t",
            series: Vec::new(),
            refs: Vec::new(),
        };
        let mut usage = Panel {
            title: format!("{case}: running consumption"),
            y_label: "(1/t) sum g / g_max",
            series: Vec::new(),
            refs: Vec::new(),
        };
        for lt in &members {
            let tr = &lt.trace;
            let n = tr.records.len();
            let dash = dash_of(&tr.algorithm);
            budget.series.push(Series {
                points: stride_indices(n).map(|k| (tr.records[k].t as f64, tr.records[k].c[0])).collect(),
                color: "#333333",
                dash,
                width: 1.2,
            });
            let avg = tr.running_average();
            for (i, b) in tr.beta.iter().enumerate() {
                let color = RESOURCE_COLORS[i % RESOURCE_COLORS.len()];
                usage.series.push(Series {
                    points: stride_indices(n).map(|k| (tr.records[k].t as f64, avg[k][i])).collect(),
                    color,
                    dash,
                    width: 1.2,
                });
                if !usage.refs.iter().any(|(r, c)| *r == *b && *c == color) {
                    usage.refs.push((*b, color));
                }
            }
        }
        let ox = PANEL_W * col as f64;
        draw_panel(&mut svg, &budget, ox, legend_h);
        draw_panel(&mut svg, &usage, ox, legend_h + PANEL_H);
    }

    let mut lx = 10.0;
    for alg in &algorithms {
        let dash = dash_of(alg);
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let _ = writeln!(
            svg,
            r##"<line x1="{lx:.1}" y1="14" x2="{:.1}" y2="14" stroke="#333333" stroke-width="1.5"{dash_attr}/>"##,
            lx + 28.0
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="18" font-size="12">{alg}</text>"#, lx + 34.0);
        lx += 40.0 + 8.0 * alg.len() as f64 + 16.0;
    }
    let _ = writeln!(
        svg,
        r##"<text x="{lx:.1}" y="18" font-size="11" fill="#555">dashed horizontal lines: targets beta_i</text>"##
    );
    svg.push_str("</svg>\n");
    Some(svg)
}

/// Writes `figure.svg` into `dir`; returns `None` (and writes nothing) for
/// an empty input.
pub fn emit_plots(traces: &[LabeledTrace], dir: &Path) -> Result<Option<PathBuf>> {
    let Some(svg) = render_figure(traces) else {
        return Ok(None);
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("figure.svg");
    std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
    Ok(Some(path))
}
