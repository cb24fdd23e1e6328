//! Static SVG rendering of BER-vs-azimuth sweeps.
//!
//! BER is drawn on a log scale from [`BER_FLOOR`] to 0.5. Polar plots put
//! 0.5 on the outer ring (so secure directions dip toward the centre);
//! cartesian plots use azimuth on x and log BER on y. The LU direction and
//! the region threshold are annotated. Successive series cycle through
//! solid, dashed and dotted strokes.

use std::f64::consts::PI;
use std::fmt::Write as _;

/// Lowest BER shown; smaller values (including 0) are clipped to it.
pub const BER_FLOOR: f64 = 1e-6;
const BER_CEIL: f64 = 0.5;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const DASHES: [&str; 3] = ["", "8 4", "2 3"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotKind {
    #[default]
    Polar,
    Cartesian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub angle_deg: Vec<f64>,
    pub ber: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub kind: PlotKind,
    pub title: Option<String>,
    pub lu_deg: Option<f64>,
    pub threshold: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            kind: PlotKind::Polar,
            title: None,
            lu_deg: None,
            threshold: 1e-2,
        }
    }
}

/// Fraction in [0, 1] of the log BER axis.
fn log_frac(ber: f64) -> f64 {
    let lo = BER_FLOOR.log10();
    let hi = BER_CEIL.log10();
    ((ber.max(BER_FLOOR).log10() - lo) / (hi - lo)).clamp(0.0, 1.0)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn stroke(i: usize) -> String {
    let dash = DASHES[i % DASHES.len()];
    let mut s = format!(
        r#"fill="none" stroke="{}" stroke-width="1.6""#,
        COLORS[i % COLORS.len()]
    );
    if !dash.is_empty() {
        let _ = write!(s, r#" stroke-dasharray="{dash}""#);
    }
    s
}

pub fn render_svg(series: &[Series], opts: &PlotOptions) -> String {
    match opts.kind {
        PlotKind::Polar => render_polar(series, opts),
        PlotKind::Cartesian => render_cartesian(series, opts),
    }
}

fn header(out: &mut String, w: f64, h: f64, opts: &PlotOptions) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    if let Some(t) = &opts.title {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="15">{}</text>"#,
            w / 2.0,
            escape(t)
        );
    }
}

fn legend(out: &mut String, series: &[Series], x: f64, y: f64) {
    for (i, s) in series.iter().enumerate() {
        let yy = y + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{x}" y1="{yy}" x2="{}" y2="{yy}" {}/>"#,
            x + 28.0,
            stroke(i)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{}</text>"#,
            x + 34.0,
            yy + 4.0,
            escape(&s.label)
        );
    }
}

fn render_polar(series: &[Series], opts: &PlotOptions) -> String {
    let (w, h) = (560.0, 520.0);
    let (cx, cy, radius) = (250.0, 270.0, 200.0);
    let mut out = String::new();
    header(&mut out, w, h, opts);

    // rings at each decade, labelled along 90 deg
    let mut decade = BER_FLOOR;
    while decade <= BER_CEIL {
        let r = radius * log_frac(decade);
        let _ = writeln!(
            out,
            r##"<circle cx="{cx}" cy="{cy}" r="{r:.3}" fill="none" stroke="#cccccc" stroke-width="0.8"/>"##
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.3}" y="{:.3}" font-size="10" fill="#666666">{decade:.0e}</text>"##,
            cx + 3.0,
            cy - r - 2.0
        );
        decade *= 10.0;
    }
    let _ = writeln!(
        out,
        r##"<circle cx="{cx}" cy="{cy}" r="{radius}" fill="none" stroke="#444444" stroke-width="1"/>"##
    );
    for spoke in (0..360).step_by(30) {
        let a = (spoke as f64).to_radians();
        let (x, y) = (cx + radius * a.cos(), cy - radius * a.sin());
        let (lx, ly) = (cx + (radius + 16.0) * a.cos(), cy - (radius + 16.0) * a.sin() + 4.0);
        let _ = writeln!(
            out,
            r##"<line x1="{cx}" y1="{cy}" x2="{x:.3}" y2="{y:.3}" stroke="#e0e0e0" stroke-width="0.8"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{lx:.3}" y="{ly:.3}" text-anchor="middle">{spoke}°</text>"#
        );
    }

    let rt = radius * log_frac(opts.threshold);
    let _ = writeln!(
        out,
        r##"<circle cx="{cx}" cy="{cy}" r="{rt:.3}" fill="none" stroke="#000000" stroke-width="1" stroke-dasharray="4 3"><title>BER threshold {}</title></circle>"##,
        opts.threshold
    );
    if let Some(lu) = opts.lu_deg {
        let a = lu.to_radians();
        let _ = writeln!(
            out,
            r##"<line x1="{cx}" y1="{cy}" x2="{:.3}" y2="{:.3}" stroke="#000000" stroke-width="1.2"/>"##,
            cx + radius * a.cos(),
            cy - radius * a.sin()
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-weight="bold">LU {lu}°</text>"#,
            cx + (radius + 6.0) * a.cos(),
            cy - (radius + 6.0) * a.sin() - 14.0
        );
    }

    for (i, s) in series.iter().enumerate() {
        let mut d = String::new();
        for (k, (&phi, &ber)) in s.angle_deg.iter().zip(&s.ber).enumerate() {
            let a = phi * PI / 180.0;
            let r = radius * log_frac(ber);
            let _ = write!(
                d,
                "{}{:.3},{:.3} ",
                if k == 0 { "M" } else { "L" },
                cx + r * a.cos(),
                cy - r * a.sin()
            );
        }
        if !d.is_empty() {
            d.push('Z');
        }
        let _ = writeln!(out, r#"<path d="{}" {}/>"#, d.trim_end(), stroke(i));
    }
    legend(&mut out, series, 420.0, 50.0);
    out.push_str("</svg>\n");
    out
}

fn render_cartesian(series: &[Series], opts: &PlotOptions) -> String {
    let (w, h) = (720.0, 420.0);
    let (x0, y0, pw, ph) = (70.0, 40.0, 600.0, 320.0);
    let px = |phi: f64| x0 + pw * phi / 360.0;
    let py = |ber: f64| y0 + ph * (1.0 - log_frac(ber));
    let mut out = String::new();
    header(&mut out, w, h, opts);

    let _ = writeln!(
        out,
        r##"<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="#444444"/>"##
    );
    let mut decade = BER_FLOOR;
    while decade <= BER_CEIL {
        let y = py(decade);
        let _ = writeln!(
            out,
            r##"<line x1="{x0}" y1="{y:.3}" x2="{}" y2="{y:.3}" stroke="#e0e0e0"/>"##,
            x0 + pw
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.3}" text-anchor="end">{decade:.0e}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
        decade *= 10.0;
    }
    for tick in (0..=360).step_by(45) {
        let x = px(tick as f64);
        let _ = writeln!(
            out,
            r#"<text x="{x:.3}" y="{}" text-anchor="middle">{tick}°</text>"#,
            y0 + ph + 18.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">azimuth (deg)</text>"#,
        x0 + pw / 2.0,
        y0 + ph + 38.0
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">BER</text>"#,
        y0 + ph / 2.0,
        y0 + ph / 2.0
    );

    let yt = py(opts.threshold);
    let _ = writeln!(
        out,
        r##"<line x1="{x0}" y1="{yt:.3}" x2="{}" y2="{yt:.3}" stroke="#000000" stroke-dasharray="4 3"><title>BER threshold {}</title></line>"##,
        x0 + pw,
        opts.threshold
    );
    if let Some(lu) = opts.lu_deg {
        let x = px(lu);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.3}" y1="{y0}" x2="{x:.3}" y2="{}" stroke="#000000" stroke-width="1.2"/>"##,
            y0 + ph
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{}" font-weight="bold">LU {lu}°</text>"#,
            x + 4.0,
            y0 + 14.0
        );
    }

    for (i, s) in series.iter().enumerate() {
        let points: Vec<String> = s
            .angle_deg
            .iter()
            .zip(&s.ber)
            .map(|(&phi, &ber)| format!("{:.3},{:.3}", px(phi), py(ber)))
            .collect();
        let _ = writeln!(out, r#"<polyline points="{}" {}/>"#, points.join(" "), stroke(i));
    }
    legend(&mut out, series, x0 + pw - 180.0, y0 + 18.0);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(label: &str) -> Series {
        Series {
            label: label.into(),
            angle_deg: (0..360).map(f64::from).collect(),
            ber: (0..360)
                .map(|k| if (40..50).contains(&k) { 1e-5 } else { 0.49 })
                .collect(),
        }
    }

    #[test]
    fn log_axis() {
        assert_eq!(log_frac(0.0), 0.0);
        assert_eq!(log_frac(0.5), 1.0);
        assert!((log_frac(1e-3) - (3.0 / (6.0 + 0.5f64.log10()))).abs() < 1e-12);
    }

    #[test]
    fn svg_is_well_formed() {
        for kind in [PlotKind::Polar, PlotKind::Cartesian] {
            let opts = PlotOptions {
                kind,
                title: Some("free space & <shadowed>".into()),
                lu_deg: Some(45.0),
                threshold: 1e-2,
            };
            let svg = render_svg(&[series("free space"), series("shadowed")], &opts);
            let doc = roxmltree::Document::parse(&svg).expect("valid xml");
            let root = doc.root_element();
            assert_eq!(root.tag_name().name(), "svg");
            assert!(svg.contains("LU 45°"));
            assert!(svg.contains("BER threshold 0.01"));
            assert!(svg.contains("stroke-dasharray=\"8 4\""), "second series dashed");
            assert!(svg.contains("free space &amp; &lt;shadowed&gt;"));
        }
    }
}
