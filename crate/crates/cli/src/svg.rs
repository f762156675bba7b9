//! Static SVG plot of a traced path projected onto a coordinate plane.

use std::fmt::Write;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if hi - lo < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Render `points` projected onto coordinates `(a, b)`.
pub fn render(title: &str, labels: (&str, &str), points: &[(f64, f64)]) -> String {
    let (x0, x1) = range(points.iter().map(|p| p.0));
    let (y0, y1) = range(points.iter().map(|p| p.1));
    // equal scale on both axes so circles stay round
    let span = (x1 - x0).max(y1 - y0);
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let (x0, y0) = (cx - span / 2.0, cy - span / 2.0);
    let plot = SIZE - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / span * plot;
    let sy = |y: f64| SIZE - MARGIN - (y - y0) / span * plot;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    // axes through the origin when visible, otherwise along the frame
    let ax = if (x0..=x0 + span).contains(&0.0) { sx(0.0) } else { MARGIN };
    let ay = if (y0..=y0 + span).contains(&0.0) { sy(0.0) } else { SIZE - MARGIN };
    let _ = writeln!(
        s,
        r#"<g stroke="gray" stroke-width="1"><line x1="{MARGIN}" y1="{ay:.2}" x2="{:.2}" y2="{ay:.2}"/><line x1="{ax:.2}" y1="{MARGIN}" x2="{ax:.2}" y2="{:.2}"/></g>"#,
        SIZE - MARGIN,
        SIZE - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
        SIZE - MARGIN + 4.0,
        ay + 4.0,
        escape(labels.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
        ax - 4.0,
        MARGIN - 8.0,
        escape(labels.1)
    );
    for (v, label) in [(x0, format!("{x0:.3}")), (x0 + span, format!("{:.3}", x0 + span))] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="10">{label}</text>"#,
            sx(v),
            SIZE - MARGIN + 16.0
        );
    }
    let path: Vec<String> = points.iter().map(|(x, y)| format!("{:.3},{:.3}", sx(*x), sy(*y))).collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        path.join(" ")
    );
    if let Some((x, y)) = points.first() {
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="darkred"/>"#, sx(*x), sy(*y));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
