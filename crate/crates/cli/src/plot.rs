//! Self-contained SVG line plots of trajectory-style CSV tables.

use std::fmt::Write as _;

use crate::error::{CliError, Result};
use crate::output::{CsvTable, TOOL};

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub width: f64,
    pub height: f64,
    /// Plot concurrence and purity deficit 1 − P on log axes.
    pub log_log: bool,
    pub title: Option<String>,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self { width: 720.0, height: 480.0, log_log: false, title: None }
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

/// Columns ending in `concurrence` or `purity` against column `t`.
fn collect_series(table: &CsvTable, log_log: bool) -> Result<Vec<Series>> {
    let t = table.column("t").ok_or_else(|| CliError::Usage("table has no `t` column".into()))?;
    let mut out = Vec::new();
    for name in &table.columns {
        let is_purity = name.ends_with("purity");
        if !(is_purity || name.ends_with("concurrence")) {
            continue;
        }
        let ys = table.column(name).expect("listed column");
        let (label, transform): (String, fn(f64) -> f64) = if log_log && is_purity {
            (format!("1 − {name}"), |y| 1.0 - y)
        } else {
            (name.clone(), |y| y)
        };
        let points: Vec<(f64, f64)> = t
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| (x, transform(y)))
            .filter(|&(x, y)| x.is_finite() && y.is_finite() && (!log_log || (x > 0.0 && y > 0.0)))
            .collect();
        out.push(Series { label, points });
    }
    if out.is_empty() {
        return Err(CliError::Usage("table has no concurrence or purity columns".into()));
    }
    Ok(out)
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = if log { (0.1, 1.0) } else { (0.0, 1.0) };
        }
        if log {
            lo = 10f64.powf(lo.log10().floor());
            hi = 10f64.powf(hi.log10().ceil());
            if hi <= lo {
                hi = lo * 10.0;
            }
        } else {
            if hi <= lo {
                let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
                (lo, hi) = (lo - pad, hi + pad);
            }
            let step = nice_step(hi - lo);
            lo = (lo / step).floor() * step;
            hi = (hi / step).ceil() * step;
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        if self.log {
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        }
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.log10().round() as i32, self.hi.log10().round() as i32);
            let stride = ((b - a) as usize).div_ceil(8).max(1);
            (a..=b).step_by(stride).map(|e| 10f64.powi(e)).collect()
        } else {
            let step = nice_step(self.hi - self.lo);
            let n = ((self.hi - self.lo) / step).round() as usize;
            (0..=n).map(|i| self.lo + step * i as f64).collect()
        }
    }

    fn label(&self, v: f64) -> String {
        if self.log {
            format!("1e{}", v.log10().round() as i32)
        } else {
            let s = format!("{:.6}", v);
            let s = s.trim_end_matches('0').trim_end_matches('.');
            if s == "-0" { "0".into() } else { s.into() }
        }
    }
}

/// 1, 2 or 5 times a power of ten giving about five intervals.
fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    mag * if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(table: &CsvTable, options: &PlotOptions) -> Result<String> {
    if table.rows.is_empty() {
        return Err(CliError::Usage("cannot plot an empty trajectory".into()));
    }
    let series = collect_series(table, options.log_log)?;
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
    let x_axis = Axis::fit(xs, options.log_log);
    let y_axis = Axis::fit(ys, options.log_log);

    let (w, h) = (options.width, options.height);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let px = |v: f64| left + pw * x_axis.unit(v);
    let py = |v: f64| top + ph * (1.0 - y_axis.unit(v));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<!-- {} -->", escape(TOOL));
    if let Some(hash) = table.provenance.get("config_sha256") {
        let _ = writeln!(s, "<!-- config_sha256: {} -->", escape(hash));
    }
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let title = options.title.clone().or_else(|| table.provenance.get("scenario").map(str::to_string));
    if let Some(title) = title {
        let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, left + pw / 2.0, escape(&title));
    }

    for tick in x_axis.ticks() {
        let x = px(tick);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##, top + ph);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, top + ph + 18.0, x_axis.label(tick));
    }
    for tick in y_axis.ticks() {
        let y = py(tick);
        let _ = writeln!(s, r##"<line x1="{left:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##, left + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, left - 6.0, y + 4.0, y_axis.label(tick));
    }
    let _ = writeln!(s, r#"<rect x="{left:.2}" y="{top:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#, left + pw / 2.0, h - 12.0);

    for (i, series) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if !series.points.is_empty() {
            let path: Vec<String> = series.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        }
        let ly = top + 10.0 + 20.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&series.label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
