//! Static SVG rendering of FAR-HED step curves.

use std::fmt::Write;

use hed_core::FrontierCurve;

const WIDTH: f64 = 560.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// `(far, hed)` knots in ascending FAR; ties keep the best HED.
fn knots(curve: &FrontierCurve) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = curve.points().iter().map(|p| (p.far, p.hed)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for (u, h) in pts {
        match out.last_mut() {
            Some(last) if last.0 == u => last.1 = last.1.max(h),
            _ => out.push((u, h)),
        }
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn frontier_svg(curves: &[&FrontierCurve]) -> String {
    let all: Vec<Vec<(f64, f64)>> = curves.iter().map(|c| knots(c)).collect();
    let top = all.iter().flatten().map(|k| k.1).fold(0.0, f64::max);
    let y_max = if top > 0.0 { top * 1.05 } else { 1.0 };
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |u: f64| MARGIN + u * plot_w;
    let y = |h: f64| HEIGHT - MARGIN - h / y_max * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{f:.2}</text>"#,
            x(f),
            HEIGHT - MARGIN + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
            MARGIN - 6.0,
            y(f * y_max) + 4.0,
            f * y_max
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">false-alarm rate</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">HED</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for (i, (curve, ks)) in curves.iter().zip(&all).enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        // right-continuous steps, held flat to FAR = 1
        let mut path = String::new();
        for (j, &(u, h)) in ks.iter().enumerate() {
            let next = ks.get(j + 1).map_or(1.0, |k| k.0);
            let cmd = if j == 0 { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{:.2},{:.2} L{:.2},{:.2} ", x(u), y(h), x(next), y(h));
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.8"/>"#,
            path.trim_end()
        );
        let ly = MARGIN + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="1.8"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            WIDTH - MARGIN - 100.0,
            WIDTH - MARGIN - 94.0,
            ly + 4.0,
            escape(&curve.label)
        );
    }
    s.push_str("</svg>\n");
    s
}
