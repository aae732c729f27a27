//! CSV tables, SVG log-log plots and JSON files.

use std::fmt::Write as _;
use std::io::{Read, Write};

use mortar_fem::analysis::fitted_slope;
use mortar_fem::ConvergenceRecord;

pub const HEADER: [&str; 9] = ["h", "r", "error_l2", "error_x", "error_neg", "p", "q", "p_x", "p_neg"];

/// 17 significant digits, so every `f64` survives a round trip.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_records<W: Write>(out: W, rows: &[ConvergenceRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            num(r.h),
            opt(r.r),
            num(r.error_l2),
            num(r.error_x),
            opt(r.error_neg),
            opt(r.p),
            opt(r.q),
            opt(r.p_x),
            opt(r.p_neg),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}, column `{column}`: {message}")]
    Field { row: usize, column: &'static str, message: String },
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<ConvergenceRecord>, ReadError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(ReadError::Header(header));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| -> Result<Option<f64>, ReadError> {
            let s = rec.get(c).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|e: std::num::ParseFloatError| ReadError::Field {
                row: i + 1,
                column: HEADER[c],
                message: e.to_string(),
            })
        };
        let required = |c: usize| -> Result<f64, ReadError> {
            field(c)?.ok_or(ReadError::Field {
                row: i + 1,
                column: HEADER[c],
                message: "missing value".into(),
            })
        };
        rows.push(ConvergenceRecord {
            h: required(0)?,
            r: field(1)?,
            error_l2: required(2)?,
            error_x: required(3)?,
            error_neg: field(4)?,
            p: field(5)?,
            q: field(6)?,
            p_x: field(7)?,
            p_neg: field(8)?,
        });
    }
    Ok(rows)
}

/// `x, y, value` samples.
pub fn write_samples<W: Write>(out: W, samples: &[(f64, f64, f64)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "value"])?;
    for &(x, y, v) in samples {
        w.write_record([num(x), num(y), num(v)])?;
    }
    w.flush()?;
    Ok(())
}

pub struct Series<'a> {
    pub label: &'a str,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Self-contained SVG with logarithmic axes. Each series gets markers, a
/// polyline and its least-squares slope in the legend.
pub fn loglog_svg(title: &str, x_label: &str, series: &[Series]) -> String {
    let (w, h) = (640.0, 440.0);
    let (left, right, top, bottom) = (80.0, 20.0, 40.0, 60.0);
    let pts = || series.iter().flat_map(|s| s.x.iter().zip(&s.y)).filter(|(x, y)| **x > 0.0 && **y > 0.0);
    let fold = |f: fn(f64, f64) -> f64, init: f64, ax: fn((&f64, &f64)) -> f64| pts().map(ax).fold(init, f);
    let lx = |p: (&f64, &f64)| p.0.log10();
    let ly = |p: (&f64, &f64)| p.1.log10();
    let (mut x0, mut x1) = (fold(f64::min, f64::INFINITY, lx).floor(), fold(f64::max, f64::NEG_INFINITY, lx).ceil());
    let (mut y0, mut y1) = (fold(f64::min, f64::INFINITY, ly).floor(), fold(f64::max, f64::NEG_INFINITY, ly).ceil());
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 0.0, -1.0, 0.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let px = |v: f64| left + (v.log10() - x0) / (x1 - x0) * (w - left - right);
    let py = |v: f64| h - bottom - (v.log10() - y0) / (y1 - y0) * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let (ax0, ax1, ay0, ay1) = (left, w - right, top, h - bottom);
    let _ = writeln!(
        s,
        r#"<rect x="{ax0}" y="{ay0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        ax1 - ax0,
        ay1 - ay0
    );
    for e in x0 as i32..=x1 as i32 {
        let x = px(10f64.powi(e));
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{ay0}" x2="{x:.2}" y2="{ay1}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{e}</text>"#, ay1 + 16.0);
    }
    for e in y0 as i32..=y1 as i32 {
        let y = py(10f64.powi(e));
        let _ = writeln!(s, r##"<line x1="{ax0}" y1="{y:.2}" x2="{ax1}" y2="{y:.2}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"#, ax0 - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (ax0 + ax1) / 2.0, h - 18.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">error</text>"#,
        (ay0 + ay1) / 2.0,
        (ay0 + ay1) / 2.0
    );
    for (i, ser) in series.iter().enumerate() {
        let c = COLOURS[i % COLOURS.len()];
        let p: Vec<(f64, f64)> = ser
            .x
            .iter()
            .zip(&ser.y)
            .filter(|(x, y)| **x > 0.0 && **y > 0.0)
            .map(|(&x, &y)| (px(x), py(y)))
            .collect();
        let line: Vec<String> = p.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#, line.join(" "));
        for (x, y) in &p {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{c}"/>"#);
        }
        let slope = fitted_slope(&ser.x, &ser.y).map(|v| format!("slope {v:.3}")).unwrap_or_else(|_| "slope n/a".into());
        let ly = ay0 + 18.0 + 18.0 * i as f64;
        let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="3.5" fill="{c}"/>"#, ax0 + 14.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}: {slope}</text>"#, ax0 + 24.0, escape(ser.label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<ConvergenceRecord> {
        vec![
            ConvergenceRecord { h: 1.0 / 6.0, r: Some(1.0 / 36.0), error_l2: 0.1 / 3.0, error_x: 0.7, ..Default::default() },
            ConvergenceRecord {
                h: 0.125,
                r: Some(0.015625),
                error_l2: std::f64::consts::PI * 1e-3,
                error_x: 0.5 + f64::EPSILON,
                error_neg: Some(1e-300),
                p: Some(1.9333),
                q: Some(0.96665),
                p_x: Some(1.0),
                p_neg: Some(f64::MIN_POSITIVE),
            },
        ]
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let mut buf = Vec::new();
        write_records(&mut buf, &rows()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("h,r,error_l2,error_x,error_neg,p,q,p_x,p_neg\n"));
        let back = read_records(buf.as_slice()).unwrap();
        assert_eq!(back, rows());
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(matches!(read_records("a,b\n1,2\n".as_bytes()), Err(ReadError::Header(_))));
    }

    #[test]
    fn svg_has_slope_annotation() {
        let s = Series { label: "L2", x: vec![0.5, 0.25, 0.125], y: vec![0.25, 0.0625, 0.015625] };
        let svg = loglog_svg("t < 1", "h", &[s]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("L2: slope 2.000"));
        assert!(svg.contains("t &lt; 1"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
