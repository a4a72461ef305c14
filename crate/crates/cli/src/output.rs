//! CSV rows and the static SVG line chart.

use std::fmt::Write as _;
use std::io::{self, Write};

pub const CSV_HEADER: &str = "ps_db,pr_db,scheme,metric,layers,value_nats,params,n_mc,seed";

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub ps_db: f64,
    pub pr_db: f64,
    pub scheme: &'static str,
    pub metric: String,
    pub layers: String,
    /// NaN marks a failed evaluation.
    pub value_nats: f64,
    pub params: String,
    pub n_mc: usize,
    pub seed: u64,
}

impl CsvRow {
    pub fn line(&self) -> String {
        let value = if self.value_nats.is_nan() { "nan".to_string() } else { format!("{:.9}", self.value_nats) };
        // Parameters never contain commas, but a failure message might.
        let params = self.params.replace(',', ";");
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.ps_db, self.pr_db, self.scheme, self.metric, self.layers, value, params, self.n_mc, self.seed
        )
    }
}

pub fn write_csv<W: Write>(mut w: W, rows: &[CsvRow]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.line())?;
    }
    Ok(())
}

pub const SVG_WIDTH: f64 = 960.0;
pub const SVG_HEIGHT: f64 = 600.0;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555", "#8c564b", "#e377c2"];
const MARGIN: (f64, f64, f64, f64) = (70.0, 150.0, 30.0, 60.0); // left, right, top, bottom

/// One polyline per series, in the given order (colors follow it).
pub fn render_svg(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let pts = series.iter().flat_map(|(_, v)| v.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let y1 = if y1 > 0.0 { y1 * 1.05 } else { 1.0 };
    let (l, r, t, b) = MARGIN;
    let (pw, ph) = (SVG_WIDTH - l - r, SVG_HEIGHT - t - b);
    let sx = |x: f64| l + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| t + ph - y / y1 * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#, l + pw / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{t}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let fy = y1 * i as f64 / 5.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(fx), t + ph + 18.0, trim(fx));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, l - 6.0, sy(fy) + 4.0, trim(fy));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">P_r (dB)</text>"#, l + pw / 2.0, SVG_HEIGHT - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">rate (nats)</text>"#,
        t + ph / 2.0,
        t + ph / 2.0
    );
    for (i, (name, v)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = v
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = t + 20.0 + 20.0 * i as f64;
        let lx = l + pw + 15.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 25.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 32.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

fn trim(v: f64) -> String {
    let t = format!("{v:.3}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
