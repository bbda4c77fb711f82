//! Minimal SVG: panels with a data-to-pixel map, polylines, markers and labels.

use std::fmt::Write;

pub const BLUE: &str = "#1f4fd1";
pub const RED: &str = "#d12f1f";
pub const YELLOW: &str = "#e0b000";
pub const GREY: &str = "#888888";

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

/// A rectangle on the canvas showing `[x_lo, x_hi] × [y_lo, y_hi]`.
#[derive(Clone, Copy, Debug)]
pub struct Panel {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Panel {
    pub fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.left + (x - lo) / (hi - lo) * self.width
    }

    pub fn py(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.top + self.height - (y - lo) / (hi - lo) * self.height
    }
}

/// `[lo, hi]` padded by 5%, never empty.
pub fn padded_range(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.into_iter().filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * (1.0 + lo.abs()) };
    (lo - pad, hi + pad)
}

fn num(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height, body: String::new() }
    }

    pub fn frame(&mut self, p: &Panel, title: &str, x_label: &str, y_label: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            num(p.left),
            num(p.top),
            num(p.width),
            num(p.height)
        );
        self.text(p.left + p.width / 2.0, p.top - 8.0, title, "middle", 14.0);
        self.text(p.left + p.width / 2.0, p.top + p.height + 32.0, x_label, "middle", 12.0);
        let (x, y) = (p.left - 40.0, p.top + p.height / 2.0);
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>"#,
            num(x),
            num(y),
            num(x),
            num(y),
            escape(y_label)
        );
        for (v, anchor) in [(p.x_range.0, "start"), (p.x_range.1, "end")] {
            self.text(p.px(v), p.top + p.height + 14.0, &format!("{v:.3}"), anchor, 10.0);
        }
        for v in [p.y_range.0, p.y_range.1] {
            self.text(p.left - 4.0, p.py(v) + 4.0, &format!("{v:.3}"), "end", 10.0);
        }
    }

    pub fn text(&mut self, x: f64, y: f64, s: &str, anchor: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            num(x),
            num(y),
            escape(s)
        );
    }

    /// One path per run of finite points; `None` breaks the line.
    pub fn polyline(&mut self, p: &Panel, pts: &[Option<(f64, f64)>], color: &str) {
        for run in pts.split(|q| q.is_none()) {
            if run.len() < 2 {
                continue;
            }
            let d: Vec<String> = run
                .iter()
                .flatten()
                .enumerate()
                .map(|(i, (x, y))| format!("{}{},{}", if i == 0 { "M" } else { "L" }, num(p.px(*x)), num(p.py(*y))))
                .collect();
            let _ = writeln!(self.body, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.join(" "));
        }
    }

    pub fn marker(&mut self, p: &Panel, x: f64, y: f64, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="4" fill="{color}" stroke="black" stroke-width="0.5"/>"#,
            num(p.px(x)),
            num(p.py(y))
        );
    }

    pub fn vline(&mut self, p: &Panel, x: f64, color: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="{color}" stroke-dasharray="3,3"/>"#,
            num(p.px(x)),
            num(p.top),
            num(p.top + p.height)
        );
    }

    pub fn legend(&mut self, x: f64, y: f64, entries: &[(&str, &str)]) {
        for (i, (color, label)) in entries.iter().enumerate() {
            let yy = y + 16.0 * i as f64;
            let _ = writeln!(self.body, r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#, num(x), num(yy - 9.0));
            self.text(x + 14.0, yy, label, "start", 11.0);
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}
