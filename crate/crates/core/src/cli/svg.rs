//! Self-contained SVG renderings: fringe plots and tomogram bars.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::experiment::{AlphaFit, DetectionRecord};
use crate::numcore::ComplexMatrix;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// `p` versus θ, one series per α: markers for the data, lines for the fits.
pub fn fringe_plot(records: &[DetectionRecord], fits: &[AlphaFit]) -> String {
    let (w, h) = (760.0, 480.0);
    let (left, right, top, bottom) = (70.0, 170.0, 30.0, 60.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let x = |theta: f64| left + theta / (2.0 * PI) * pw;
    let y = |p: f64| top + (1.0 - p) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    // axes and grid
    for k in 0..=4 {
        let theta = k as f64 * PI / 2.0;
        let label = ["0", "π/2", "π", "3π/2", "2π"][k];
        let xv = x(theta);
        let _ = writeln!(
            s,
            r##"<line x1="{xv:.2}" y1="{top}" x2="{xv:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            top + ph
        );
        let _ = writeln!(
            s,
            r#"<text x="{xv:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            top + ph + 18.0
        );
    }
    for k in 0..=4 {
        let p = k as f64 * 0.25;
        let yv = y(p);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{yv:.2}" x2="{:.2}" y2="{yv:.2}" stroke="#e0e0e0"/>"##,
            left + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{p:.2}</text>"#,
            left - 8.0,
            yv + 4.0
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">θ (rad)</text>"#,
        left + pw / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">Tr(Δρ |10⟩⟨10|)</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );

    for (idx, af) in fits.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut pts = String::new();
        for k in 0..=200 {
            let theta = 2.0 * PI * k as f64 / 200.0;
            let p = af.fit.eval(theta).clamp(-0.05, 1.05);
            let _ = write!(pts, "{:.2},{:.2} ", x(theta), y(p));
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.trim_end()
        );
        for r in records.iter().filter(|r| r.alpha == af.alpha) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                x(r.theta),
                y(r.p.clamp(-0.05, 1.05))
            );
        }
        let ly = top + 14.0 + 20.0 * idx as f64;
        let lx = left + pw + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            esc(&format!("α = {:.4}", af.alpha))
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Oblique 3D bar chart of the real part of a 4×4 matrix.
pub fn tomogram(m: &ComplexMatrix, title: &str) -> String {
    let (w, h) = (640.0, 480.0);
    let (cx, cy) = (w / 2.0, 170.0);
    let (dx, dy) = (48.0, 24.0);
    let scale = 220.0;
    let labels = ["|00⟩", "|01⟩", "|10⟩", "|11⟩"];
    let base = |i: f64, j: f64| (cx + (j - i) * dx, cy + (i + j) * dy);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        esc(title)
    );
    // floor grid
    for k in 0..=4 {
        let k = k as f64;
        let (x1, y1) = base(k, 0.0);
        let (x2, y2) = base(k, 4.0);
        let _ = writeln!(
            s,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#bbb"/>"##
        );
        let (x1, y1) = base(0.0, k);
        let (x2, y2) = base(4.0, k);
        let _ = writeln!(
            s,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#bbb"/>"##
        );
    }
    for (k, label) in labels.iter().enumerate() {
        let (xr, yr) = base(k as f64 + 0.5, 4.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{label}</text>"#,
            xr + 6.0,
            yr + 14.0
        );
        let (xc, yc) = base(4.0, k as f64 + 0.5);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            xc - 6.0,
            yc + 14.0
        );
    }

    // back to front
    let mut cells: Vec<(usize, usize)> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).collect();
    cells.sort_by_key(|&(i, j)| (i + j, i));
    let inset = 0.18;
    for (i, j) in cells {
        let v = m.get(i, j).re;
        let hgt = v * scale;
        let (fi, fj) = (i as f64, j as f64);
        let corner = |a: f64, b: f64, lift: f64| {
            let (x, y) = base(fi + a, fj + b);
            (x, y - lift)
        };
        let (p0, p1, p2, p3) = (
            (inset, inset),
            (inset, 1.0 - inset),
            (1.0 - inset, 1.0 - inset),
            (1.0 - inset, inset),
        );
        let poly = |pts: &[(f64, f64)]| {
            pts.iter()
                .map(|(x, y)| format!("{x:.2},{y:.2}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let (top_fill, side_a, side_b) = if v >= 0.0 {
            ("#6baed6", "#3182bd", "#08519c")
        } else {
            ("#fc9272", "#de2d26", "#a50f15")
        };
        if hgt.abs() < 1e-9 {
            let face = [
                corner(p0.0, p0.1, 0.0),
                corner(p1.0, p1.1, 0.0),
                corner(p2.0, p2.1, 0.0),
                corner(p3.0, p3.1, 0.0),
            ];
            let _ = writeln!(
                s,
                r##"<polygon points="{}" fill="#eeeeee" stroke="#999"/>"##,
                poly(&face)
            );
            continue;
        }
        // visible side faces: along +i (left-front) and +j (right-front)
        let left_face = [
            corner(p3.0, p3.1, 0.0),
            corner(p2.0, p2.1, 0.0),
            corner(p2.0, p2.1, hgt),
            corner(p3.0, p3.1, hgt),
        ];
        let right_face = [
            corner(p1.0, p1.1, 0.0),
            corner(p2.0, p2.1, 0.0),
            corner(p2.0, p2.1, hgt),
            corner(p1.0, p1.1, hgt),
        ];
        let top = [
            corner(p0.0, p0.1, hgt),
            corner(p1.0, p1.1, hgt),
            corner(p2.0, p2.1, hgt),
            corner(p3.0, p3.1, hgt),
        ];
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="{side_a}" stroke="#333" stroke-width="0.5"/>"##,
            poly(&left_face)
        );
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="{side_b}" stroke="#333" stroke-width="0.5"/>"##,
            poly(&right_face)
        );
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="{top_fill}" stroke="#333" stroke-width="0.5"/>"##,
            poly(&top)
        );
        let (tx, ty) = corner(0.5, 0.5, hgt);
        let _ = writeln!(
            s,
            r#"<text x="{tx:.2}" y="{:.2}" text-anchor="middle" font-size="10">{v:.3}</text>"#,
            ty - 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
