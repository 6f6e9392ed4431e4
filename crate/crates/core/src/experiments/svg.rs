//! Minimal static SVG charts for quick looks at study output.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

pub struct Band<'a> {
    pub x: &'a [f64],
    pub lower: &'a [f64],
    pub upper: &'a [f64],
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(out: &mut String, title: &str, frame: &Frame, xlabel: &str, ylabel: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = write!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/><text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = write!(
        out,
        r#"<path d="M{l},{t}V{b}H{r}" fill="none" stroke="black"/>"#
    );
    for (v, y) in [(frame.y0, b), (frame.y1, t)] {
        let _ = write!(
            out,
            r#"<text x="{}" y="{y:.1}" text-anchor="end">{}</text>"#,
            l - 4.0,
            tick(v)
        );
    }
    for (v, x) in [(frame.x0, l), (frame.x1, r)] {
        let _ = write!(
            out,
            r#"<text x="{x:.1}" y="{}" text-anchor="middle">{}</text>"#,
            b + 14.0,
            tick(v)
        );
    }
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text><text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel),
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn legend(out: &mut String, labels: &[&str]) {
    for (i, label) in labels.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64;
        let _ = write!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="3" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            y - 4.0,
            PALETTE[i % PALETTE.len()],
            WIDTH - MARGIN - 135.0,
            y,
            escape(label)
        );
    }
}

/// Line chart with an optional shaded band drawn underneath.
pub fn line_chart(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[Series<'_>],
    band: Option<Band<'_>>,
) -> String {
    let xs = series
        .iter()
        .flat_map(|s| s.x.iter().copied())
        .chain(band.iter().flat_map(|b| b.x.iter().copied()));
    let (x0, x1) = extent(xs);
    let ys = series.iter().flat_map(|s| s.y.iter().copied()).chain(
        band.iter()
            .flat_map(|b| b.lower.iter().chain(b.upper).copied()),
    );
    let (y0, y1) = extent(ys);
    let frame = Frame { x0, x1, y0, y1 };
    let mut out = String::new();
    header(&mut out, title, &frame, xlabel, ylabel);
    if let Some(b) = band {
        let mut d = String::new();
        for (i, (&x, &u)) in b.x.iter().zip(b.upper).enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if i == 0 { 'M' } else { 'L' },
                frame.px(x),
                frame.py(u)
            );
        }
        for (&x, &l) in b.x.iter().zip(b.lower).rev() {
            let _ = write!(d, "L{:.2},{:.2}", frame.px(x), frame.py(l));
        }
        let _ = write!(
            out,
            r##"<path d="{d}Z" fill="#9ecae1" fill-opacity="0.6" stroke="none"/>"##
        );
    }
    for (i, s) in series.iter().enumerate() {
        let mut d = String::new();
        for (j, (&x, &y)) in
            s.x.iter()
                .zip(s.y)
                .filter(|(_, y)| y.is_finite())
                .enumerate()
        {
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if j == 0 { 'M' } else { 'L' },
                frame.px(x),
                frame.py(y)
            );
        }
        let _ = write!(
            out,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            PALETTE[i % PALETTE.len()]
        );
    }
    let labels: Vec<&str> = series.iter().map(|s| s.label).collect();
    if labels.len() > 1 {
        legend(&mut out, &labels);
    }
    out.push_str("</svg>\n");
    out
}

/// Box plots (quartiles, whiskers at the extremes) for labelled groups.
pub fn box_chart(title: &str, ylabel: &str, groups: &[(String, Vec<f64>)]) -> String {
    let (y0, y1) = extent(groups.iter().flat_map(|(_, v)| v.iter().copied()));
    let frame = Frame {
        x0: 0.0,
        x1: groups.len().max(1) as f64,
        y0,
        y1,
    };
    let mut out = String::new();
    header(&mut out, title, &frame, "", ylabel);
    let slot = (WIDTH - 2.0 * MARGIN) / groups.len().max(1) as f64;
    for (i, (label, values)) in groups.iter().enumerate() {
        let cx = MARGIN + slot * (i as f64 + 0.5);
        let _ = write!(
            out,
            r#"<text x="{cx:.1}" y="{}" text-anchor="middle">{}</text>"#,
            HEIGHT - MARGIN + 26.0,
            escape(label)
        );
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            continue;
        }
        v.sort_by(f64::total_cmp);
        let q = |p: f64| crate::mixture::quantile_sorted(&v, p);
        let (lo, q1, med, q3, hi) = (v[0], q(0.25), q(0.5), q(0.75), v[v.len() - 1]);
        let half = 0.25 * slot;
        let _ = write!(
            out,
            r##"<path d="M{cx:.1},{:.2}V{:.2}M{cx:.1},{:.2}V{:.2}" stroke="black"/><rect x="{:.1}" y="{:.2}" width="{:.1}" height="{:.2}" fill="#9ecae1" stroke="black"/><path d="M{:.1},{:.2}H{:.1}" stroke="#d62728" stroke-width="2"/>"##,
            frame.py(hi),
            frame.py(q3),
            frame.py(q1),
            frame.py(lo),
            cx - half,
            frame.py(q3),
            2.0 * half,
            (frame.py(q1) - frame.py(q3)).max(0.5),
            cx - half,
            frame.py(med),
            cx + half
        );
    }
    out.push_str("</svg>\n");
    out
}
