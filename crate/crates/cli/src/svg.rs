//! Minimal hand-written SVG figures.

use std::fmt::Write as _;

use pdm_core::metrics::ConfusionMatrix;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn header(out: &mut String, width: u32, height: u32) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, "<!-- pdm {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// 2x2 grid, actual class by row and predicted class by column, shaded by
/// the share of all rows.
pub fn confusion_matrix(cm: &ConfusionMatrix, title: &str) -> String {
    let (cell, left, top) = (150.0, 120.0, 70.0);
    let total = cm.total().max(1) as f64;
    let mut s = String::new();
    header(&mut s, 460, 420);
    let _ = writeln!(
        s,
        r#"<text x="230" y="30" text-anchor="middle" font-size="18">{}</text>"#,
        escape(title)
    );
    let cells = [[cm.tn, cm.fp], [cm.fn_, cm.tp]];
    for (r, row) in cells.iter().enumerate() {
        for (c, &count) in row.iter().enumerate() {
            let x = left + c as f64 * cell;
            let y = top + r as f64 * cell;
            let share = count as f64 / total;
            let opacity = 0.1 + 0.9 * share;
            let ink = if share > 0.5 { "white" } else { "black" };
            let _ = writeln!(
                s,
                r##"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="#1f4e79" fill-opacity="{opacity:.4}" stroke="black"/>"##
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" font-size="22" fill="{ink}">{count}</text>"#,
                x + cell / 2.0,
                y + cell / 2.0 + 8.0
            );
        }
    }
    for (i, label) in ["0", "1"].iter().enumerate() {
        let mid = i as f64 * cell + cell / 2.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{label}</text>"#,
            left + mid,
            top - 8.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="14">{label}</text>"#,
            left - 10.0,
            top + mid + 5.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">Predicted label</text>"#,
        left + cell,
        top + 2.0 * cell + 30.0
    );
    let _ = writeln!(
        s,
        r#"<text x="40" y="{y}" text-anchor="middle" font-size="14" transform="rotate(-90 40 {y})">True label</text>"#,
        y = top + cell
    );
    s.push_str("</svg>\n");
    s
}

/// Accuracy against fold number, one polyline per repetition.
pub fn cv_lines(grid: &[Vec<f64>], mean: f64) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (70.0, 150.0, 50.0, 60.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let k = grid.iter().map(Vec::len).max().unwrap_or(0);
    let values = grid.iter().flatten().copied();
    let lo = values.clone().fold(f64::INFINITY, f64::min).min(mean);
    let hi = values.fold(f64::NEG_INFINITY, f64::max).max(mean);
    let (lo, hi) = if lo.is_finite() && hi.is_finite() && hi > lo {
        let pad = (hi - lo) * 0.1;
        (lo - pad, hi + pad)
    } else {
        let c = if mean.is_finite() { mean } else { 0.5 };
        (c - 0.01, c + 0.01)
    };
    let px = |fold: usize| {
        if k <= 1 {
            left + pw / 2.0
        } else {
            left + pw * fold as f64 / (k - 1) as f64
        }
    };
    let py = |acc: f64| top + ph * (hi - acc) / (hi - lo);

    let mut s = String::new();
    header(&mut s, w as u32, h as u32);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="18">Repeated {k}-fold cross-validation</text>"#,
        left + pw / 2.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{y}" x2="{x}" y2="{y}" stroke="black"/>"#,
        y = top + ph,
        x = left + pw
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{}" stroke="black"/>"#,
        top + ph
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd"/>"##,
            left + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="12">{v:.4}</text>"#,
            left - 6.0,
            y + 4.0
        );
    }
    for f in 0..k {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
            px(f),
            top + ph + 18.0,
            f + 1
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">Fold</text>"#,
        left + pw / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{y}" text-anchor="middle" font-size="14" transform="rotate(-90 18 {y})">Accuracy</text>"#,
        y = top + ph / 2.0
    );
    let _ = writeln!(
        s,
        r##"<line x1="{left}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#444444" stroke-dasharray="6 4"/>"##,
        left + pw,
        y = py(mean)
    );
    for (r, row) in grid.iter().enumerate() {
        let color = PALETTE[r % PALETTE.len()];
        let points: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(f, &a)| format!("{:.2},{:.2}", px(f), py(a)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="repetition" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 10.0 + 20.0 * r as f64;
        let lx = left + pw + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12">Repetition {}</text>"#,
            lx + 26.0,
            ly + 4.0,
            r + 1
        );
    }
    let ly = top + 10.0 + 20.0 * grid.len() as f64;
    let lx = left + pw + 15.0;
    let _ = writeln!(
        s,
        r##"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="#444444" stroke-dasharray="6 4"/>"##,
        lx + 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12">Mean {mean:.4}</text>"#,
        lx + 26.0,
        ly + 4.0
    );
    s.push_str("</svg>\n");
    s
}
