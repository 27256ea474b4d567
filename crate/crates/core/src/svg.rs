//! SVG rendering of persistence diagrams.
//!
//! The diagonal is drawn across the plot, dimension-0 pairs as dots and
//! dimension-1 pairs as triangles. Essential pairs sit in a labelled band
//! above the plot area. Axes span `[0, 1.1 * max finite value]`.

use std::fmt::Write as _;

use crate::ph::PersistenceDiagram;
use crate::scalar::Scalar;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 56.0;
const GUTTER: f64 = 28.0;

pub fn diagram_svg<T: Scalar>(d: &PersistenceDiagram<T>, title: &str) -> String {
    let max_finite = d
        .pairs
        .iter()
        .flat_map(|p| {
            let mut v = vec![p.birth.as_f64()];
            if !p.is_essential() {
                v.push(p.death.as_f64());
            }
            v
        })
        .fold(0.0f64, f64::max);
    let extent = if max_finite > 0.0 { max_finite * 1.1 } else { 1.0 };
    let plot = SIZE - 2.0 * MARGIN;
    let top = MARGIN + GUTTER;
    let sx = |v: f64| MARGIN + v / extent * plot;
    let sy = |v: f64| top + plot - v / extent * plot;
    let width = SIZE;
    let height = SIZE + GUTTER;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, width / 2.0, escape(title));
    // essential band
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{}" width="{plot}" height="{}" fill="#f0f0f0" stroke="#999"/>"##,
        MARGIN - 4.0,
        GUTTER - 4.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">inf</text>"#,
        MARGIN - 6.0,
        MARGIN + GUTTER / 2.0
    );
    // axes and diagonal
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{top}" width="{plot}" height="{plot}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888" stroke-dasharray="4 3"/>"##,
        sx(0.0),
        sy(0.0),
        sx(extent),
        sy(extent)
    );
    for i in 0..=4 {
        let v = extent * i as f64 / 4.0;
        let label = format!("{v:.3}");
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{label}</text>"#, sx(v), top + plot + 16.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#, MARGIN - 6.0, sy(v) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">birth</text>"#, width / 2.0, height - 8.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">death</text>"#,
        top + plot / 2.0,
        top + plot / 2.0
    );

    for p in &d.pairs {
        let x = sx(p.birth.as_f64());
        let y = if p.is_essential() { MARGIN + GUTTER / 2.0 - 2.0 } else { sy(p.death.as_f64()) };
        match p.dim {
            0 => {
                let _ = writeln!(s, r##"<circle class="h0" cx="{x:.2}" cy="{y:.2}" r="3.5" fill="#1f77b4"/>"##);
            }
            _ => {
                let _ = writeln!(
                    s,
                    r##"<polygon class="h1" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="#d62728"/>"##,
                    x,
                    y - 4.5,
                    x - 4.0,
                    y + 3.0,
                    x + 4.0,
                    y + 3.0
                );
            }
        }
    }
    // legend
    let ly = top + 14.0;
    let lx = MARGIN + plot - 70.0;
    let _ = writeln!(s, r##"<circle cx="{lx}" cy="{}" r="3.5" fill="#1f77b4"/><text x="{}" y="{}">H0</text>"##, ly - 4.0, lx + 8.0, ly);
    let _ = writeln!(
        s,
        r##"<polygon points="{},{} {},{} {},{}" fill="#d62728"/><text x="{}" y="{}">H1</text>"##,
        lx,
        ly + 11.5,
        lx - 4.0,
        ly + 19.0,
        lx + 4.0,
        ly + 19.0,
        lx + 8.0,
        ly + 20.0
    );
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
