//! Log-scale line plots of a diagnostics series as standalone SVG.

use std::fmt::Write as _;

use crate::diagnostics::DiagnosticsSeries;

const W: f64 = 720.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// Oscillation and max |grad phi| against tau with a log10 y axis.
/// Non-positive values are left out of the polylines.
pub fn plot_svg(series: &DiagnosticsSeries) -> String {
    let curves = [
        ("oscillation", "#1f77b4", series.column(|r| r.osc)),
        ("max |grad phi|", "#d62728", series.column(|r| r.grad_phi_max)),
    ];
    let pts = curves.iter().flat_map(|c| c.2.iter()).filter(|(_, v)| *v > 0.0 && v.is_finite());
    let (mut t0, mut t1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (t, v) in pts {
        t0 = t0.min(*t);
        t1 = t1.max(*t);
        y0 = y0.min(v.log10());
        y1 = y1.max(v.log10());
    }
    if !t0.is_finite() {
        (t0, t1, y0, y1) = (0.0, 1.0, -1.0, 0.0);
    }
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let t1 = if t1 > t0 { t1 } else { t0 + 1.0 };
    let sx = |t: f64| MARGIN + (t - t0) / (t1 - t0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (xa, xb, ya, yb) = (sx(t0), sx(t1), sy(y0), sy(y1));
    let _ = writeln!(
        s,
        r#"<path d="M{xa:.1},{yb:.1} V{ya:.1} H{xb:.1}" fill="none" stroke="black"/>"#
    );
    for e in (y0 as i32)..=(y1 as i32) {
        let y = sy(e as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{xa:.1}" y1="{y:.1}" x2="{xb:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"##,
            xa - 6.0,
            y + 4.0
        );
    }
    for i in 0..=4 {
        let t = t0 + (t1 - t0) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t:.3}</text>"#,
            sx(t),
            ya + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">tau</text>"#,
        (xa + xb) / 2.0,
        H - 12.0
    );
    for (i, (label, color, data)) in curves.iter().enumerate() {
        let coords: Vec<String> = data
            .iter()
            .filter(|(_, v)| *v > 0.0 && v.is_finite())
            .map(|(t, v)| format!("{:.2},{:.2}", sx(*t), sy(v.log10())))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = MARGIN / 2.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{label}</text>"#,
            xb - 150.0,
            xb - 126.0,
            xb - 120.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
