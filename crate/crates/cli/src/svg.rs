//! Static log-log diagnostics for a sweep.
//!
//! Left panel: `|P+ / p_leading - 1|` against `Lambda1`. Right panel:
//! `P- / P+` against `Lambda1`. Each panel gets a least-squares line and a
//! slope label once it holds three or more points. Output depends only on
//! the rows, so identical input gives identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use mott1d::report::{fit_rate, ComparisonRow};
use mott1d::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 360.0;
const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 240.0;
const TOP: f64 = 50.0;
const LEFTS: [f64; 2] = [70.0, 470.0];

struct Series {
    title: &'static str,
    points: Vec<(f64, f64)>,
}

fn series(rows: &[ComparisonRow]) -> [Series; 2] {
    let pick = |sign: i32, f: fn(f64) -> f64| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.a2_sign == sign)
            .filter_map(|r| r.ratio.map(|q| (r.lambda1, f(q))))
            .filter(|&(x, y)| x > 0.0 && y > 0.0 && y.is_finite())
            .collect()
    };
    [
        Series {
            title: "|P+ / leading - 1|",
            points: pick(1, |q| (q - 1.0).abs()),
        },
        Series {
            title: "P- / P+",
            points: pick(-1, |q| q),
        },
    ]
}

// log10 range padded to whole decades, never degenerate
fn decades(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .map(f64::log10)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (-1.0, 0.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn panel(out: &mut String, left: f64, s: &Series, xr: (f64, f64)) {
    let yr = decades(s.points.iter().map(|p| p.1));
    let px = |x: f64| left + (x.log10() - xr.0) / (xr.1 - xr.0) * PANEL_W;
    let py = |y: f64| TOP + PANEL_H - (y.log10() - yr.0) / (yr.1 - yr.0) * PANEL_H;
    let _ = writeln!(
        out,
        r##"<rect x="{left:.2}" y="{TOP:.2}" width="{PANEL_W:.2}" height="{PANEL_H:.2}" fill="none" stroke="#000"/>"##
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        left + PANEL_W / 2.0,
        TOP - 12.0,
        escape(s.title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Lambda1</text>"#,
        left + PANEL_W / 2.0,
        TOP + PANEL_H + 40.0
    );
    // decade ticks
    for e in (xr.0.ceil() as i32)..=(xr.1.floor() as i32) {
        let x = px(10f64.powi(e));
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{e}</text>"#,
            TOP + PANEL_H + 18.0
        );
    }
    for e in (yr.0.ceil() as i32)..=(yr.1.floor() as i32) {
        let y = py(10f64.powi(e));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#,
            left - 6.0,
            y + 4.0
        );
    }
    if s.points.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">no data</text>"#,
            left + PANEL_W / 2.0,
            TOP + PANEL_H / 2.0
        );
        return;
    }
    for &(x, y) in &s.points {
        let _ = writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#1f4e79"/>"##, px(x), py(y));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = s.points.iter().copied().unzip();
    if let Ok(slope) = fit_rate(&xs, &ys) {
        let n = xs.len() as f64;
        let mx = xs.iter().map(|x| x.log10()).sum::<f64>() / n;
        let my = ys.iter().map(|y| y.log10()).sum::<f64>() / n;
        let (x0, x1) = (
            xs.iter().copied().fold(f64::INFINITY, f64::min),
            xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
        let y_at = |x: f64| 10f64.powf(my + slope * (x.log10() - mx));
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#b22222" stroke-dasharray="6,4"/>"##,
            px(x0),
            py(y_at(x0)),
            px(x1),
            py(y_at(x1))
        );
        let _ = writeln!(
            out,
            r##"<text class="slope" x="{:.2}" y="{:.2}" text-anchor="end" fill="#b22222">slope = {slope:.3}</text>"##,
            left + PANEL_W - 8.0,
            TOP + 18.0
        );
    }
}

/// The SVG document for `rows`.
pub fn render_svg(rows: &[ComparisonRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("cannot plot an empty sweep".into()));
    }
    let panels = series(rows);
    let xr = decades(panels.iter().flat_map(|s| s.points.iter().map(|p| p.0)).chain(rows.iter().map(|r| r.lambda1)));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    for (s, &left) in panels.iter().zip(&LEFTS) {
        panel(&mut out, left, s, xr);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes [`render_svg`] to `path`.
pub fn emit_svg(rows: &[ComparisonRow], path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(rows)?)?;
    Ok(())
}
