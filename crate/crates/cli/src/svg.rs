//! Minimal standalone SVG line charts: one panel per cell, probability
//! against log(lambda), optional +-2 stderr bands.

use std::fmt::Write;

pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
}

pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

const PALETTE: [&str; 8] = ["#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93", "#00798c", "#8c564b", "#444444"];
const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 58.0;
const MARGIN_R: f64 = 14.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 46.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

/// Lays panels out row by row, `cols` per row.
pub fn render(panels: &[Panel], cols: usize) -> String {
    let cols = cols.clamp(1, panels.len().max(1));
    let rows = panels.len().div_ceil(cols).max(1);
    let width = PANEL_W * cols as f64;
    let height = PANEL_H * rows as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        let ox = PANEL_W * (i % cols) as f64;
        let oy = PANEL_H * (i / cols) as f64;
        draw_panel(&mut s, panel, ox, oy);
    }
    s.push_str("</svg>\n");
    s
}

fn draw_panel(s: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let (x0, x1) = panel
        .series
        .iter()
        .flat_map(|se| se.x.iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (x0, x1) = if x0 < x1 { (x0, x1) } else { (x0 - 1.0, x0 + 1.0) };
    let left = ox + MARGIN_L;
    let right = ox + PANEL_W - MARGIN_R;
    let top = oy + MARGIN_T;
    let bottom = oy + PANEL_H - MARGIN_B;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let py = |y: f64| bottom - y.clamp(0.0, 1.0) * (bottom - top);

    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
        (left + right) / 2.0,
        oy + 18.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{left:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#000"/>"##,
        right - left,
        bottom - top
    );
    for t in ticks(x0, x1) {
        let x = px(t);
        let _ = writeln!(s, r##"<line x1="{x:.1}" y1="{bottom:.1}" x2="{x:.1}" y2="{:.1}" stroke="#000"/>"##, bottom + 4.0);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#, bottom + 16.0);
    }
    for k in 0..=5 {
        let v = k as f64 / 5.0;
        let y = py(v);
        let _ = writeln!(s, r##"<line x1="{:.1}" y1="{y:.1}" x2="{left:.1}" y2="{y:.1}" stroke="#000"/>"##, left - 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"#, left - 6.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">log(lambda)</text>"#,
        (left + right) / 2.0,
        bottom + 34.0
    );
    let (yx, yy) = (ox + 14.0, (top + bottom) / 2.0);
    let _ = writeln!(
        s,
        r#"<text x="{yx:.1}" y="{yy:.1}" text-anchor="middle" transform="rotate(-90 {yx:.1} {yy:.1})">sign recovery probability</text>"#
    );

    for (j, se) in panel.series.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        if let Some(err) = &se.stderr {
            if err.iter().any(|e| *e > 0.0) {
                let mut pts: Vec<String> =
                    se.x.iter().zip(&se.y).zip(err).map(|((x, y), e)| format!("{:.2},{:.2}", px(*x), py(y + 2.0 * e))).collect();
                pts.extend(
                    se.x.iter().zip(&se.y).zip(err).rev().map(|((x, y), e)| format!("{:.2},{:.2}", px(*x), py(y - 2.0 * e))),
                );
                let _ = writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, pts.join(" "));
            }
        }
        let pts: Vec<String> = se.x.iter().zip(&se.y).map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "));
        let ly = top + 12.0 + 14.0 * j as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            right - 150.0,
            right - 132.0
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, right - 128.0, ly + 4.0, escape(&se.label));
    }
}
