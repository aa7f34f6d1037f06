//! CSV and SVG emitters. Output is a pure function of its input, so equal
//! configs give byte-identical files.

use std::fmt::Write as _;

use seccap_core::lp::RegionPoint;

pub const SIG_DIGITS: usize = 9;

/// Decimal rendering with [`SIG_DIGITS`] significant digits. Round-off
/// debris below 1e-12 prints as 0.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x.abs() < 1e-12 {
        return "0".into();
    }
    let mut magnitude = x.abs().log10().floor() as i64;
    let decimals = |m: i64| (SIG_DIGITS as i64 - 1 - m).max(0) as usize;
    let s = format!("{x:.*}", decimals(magnitude));
    // rounding can carry into a new leading digit (9.9999999996 -> 10.00000000)
    if s.trim_start_matches('-').parse::<f64>().unwrap_or(0.0) >= 10f64.powi(magnitude as i32 + 1) {
        magnitude += 1;
        return format!("{x:.*}", decimals(magnitude));
    }
    s
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Frontier CSV: rates then one column per auxiliary.
pub fn frontier_csv(points: &[RegionPoint]) -> String {
    let aux: Vec<&str> = points
        .first()
        .map(|p| p.aux.iter().map(|(n, _)| n.as_str()).collect())
        .unwrap_or_default();
    let mut header = vec!["r1", "r2"];
    header.extend(&aux);
    let mut csv = Csv::new(&header);
    for p in points {
        let mut cells = vec![num(p.r1), num(p.r2)];
        cells.extend(p.aux.iter().map(|(_, v)| num(*v)));
        csv.row(&cells);
    }
    csv.finish()
}

/// One named frontier for plotting.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    pub stroke: &'a str,
    pub dash: Option<&'a str>,
}

const SIZE: f64 = 480.0;
const PAD: f64 = 56.0;

/// Minimal SVG: axes, one closed polyline per series, a legend.
pub fn frontier_svg(title: &str, series: &[Series]) -> String {
    let max = series
        .iter()
        .flat_map(|s| s.points.iter().flat_map(|&(a, b)| [a, b]))
        .fold(0.0f64, f64::max);
    let scale = if max > 0.0 { (SIZE - 2.0 * PAD) / (max * 1.05) } else { 1.0 };
    let sx = |x: f64| PAD + x * scale;
    let sy = |y: f64| SIZE - PAD - y * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-size="14" text-anchor="middle">{}</text>"#, SIZE / 2.0, escape(title));
    let (x0, y0) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.2},{:.2} L{x0:.2},{y0:.2} L{:.2},{y0:.2}" fill="none" stroke="black"/>"#,
        PAD / 2.0,
        SIZE - PAD / 2.0
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">R1</text>"#, SIZE - PAD / 2.0, y0 + 16.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">R2</text>"#, x0 - 24.0, PAD / 2.0);
    if max > 0.0 {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            sx(max),
            y0 + 16.0,
            num(max)
        );
    }
    for (i, ser) in series.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(ser.points.len() + 3);
        // close the down-set against both axes
        pts.push((0.0, 0.0));
        if let Some(&(a, _)) = ser.points.first() {
            pts.push((a, 0.0));
        }
        pts.extend(&ser.points);
        if let Some(&(_, b)) = ser.points.last() {
            pts.push((0.0, b));
        }
        let coords: Vec<String> = pts.iter().map(|&(a, b)| format!("{:.2},{:.2}", sx(a), sy(b))).collect();
        let dash = ser.dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            coords.join(" "),
            ser.stroke
        );
        let ly = PAD + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}"{dash}/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            SIZE - PAD - 110.0,
            SIZE - PAD - 90.0,
            ser.stroke,
            SIZE - PAD - 84.0,
            ly + 4.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
