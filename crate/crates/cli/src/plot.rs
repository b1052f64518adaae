//! Static SVG rendering of tabulated curves.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const PANEL: f64 = 180.0;
const MARGIN: f64 = 48.0;

/// One panel per column, stacked vertically, sharing the abscissa.
pub fn svg_panels(title: &str, x: &[f64], columns: &[(String, Vec<f64>)]) -> String {
    let height = 2.0 * MARGIN + PANEL * columns.len() as f64;
    let (x0, x1) = (x[0], x[x.len() - 1]);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" font-size="13">{}</text>"#, MARGIN / 2.0, escape(title));
    for (k, (name, y)) in columns.iter().enumerate() {
        let top = MARGIN + PANEL * k as f64;
        let inner = PANEL - 24.0;
        let (lo, hi) = y
            .iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        let _ = writeln!(
            s,
            r##"<rect x="{MARGIN}" y="{top}" width="{plot_w}" height="{inner}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, MARGIN + 4.0, top + 12.0, escape(name));
        let _ = writeln!(s, r#"<text x="2" y="{}">{hi:.3e}</text>"#, top + 10.0);
        let _ = writeln!(s, r#"<text x="2" y="{}">{lo:.3e}</text>"#, top + inner);
        let mut points = String::new();
        for (xi, yi) in x.iter().zip(y) {
            if !yi.is_finite() {
                continue;
            }
            let px = MARGIN + plot_w * (xi - x0) / (x1 - x0);
            let py = top + inner * (1.0 - (yi - lo) / span);
            let _ = write!(points, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#1f5fa8" stroke-width="1.4"/>"##,
            points.trim_end()
        );
    }
    let base = height - MARGIN + 14.0;
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{base}">{x0}</text>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{base}" text-anchor="end">{x1}</text>"#, WIDTH - MARGIN);
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
