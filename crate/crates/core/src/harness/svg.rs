use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 380.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 140.0;
const TOP: f64 = 34.0;
const BOTTOM: f64 = 44.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// A named curve; `x` is usually the iteration index.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    /// Points `(k, values[k])`.
    pub fn indexed(label: impl Into<String>, values: &[f64], offset: usize) -> Self {
        let points = values
            .iter()
            .enumerate()
            .map(|(k, &v)| ((k + offset) as f64, v))
            .collect();
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub label: String,
    pub points: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Panel {
    /// Line plot with a log-scale y axis; nonpositive values are skipped.
    LogLines { title: String, series: Vec<Series> },
    /// Points in the complex plane with the unit circle for reference.
    Scatter {
        title: String,
        clouds: Vec<PointCloud>,
    },
}

impl Panel {
    fn is_empty(&self) -> bool {
        match self {
            Panel::LogLines { series, .. } => series.is_empty(),
            Panel::Scatter { clouds, .. } => clouds.is_empty(),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// Renders panels into a standalone SVG document, two panels per row.
pub fn render_svg_string(panels: &[Panel]) -> Result<String> {
    if panels.is_empty() || panels.iter().any(Panel::is_empty) {
        return Err(Error::InvalidParameter("nothing to plot".into()));
    }
    let cols = panels.len().min(2);
    let rows = panels.len().div_ceil(cols);
    let (width, height) = (PANEL_W * cols as f64, PANEL_H * rows as f64);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        let (x, y) = (PANEL_W * (i % cols) as f64, PANEL_H * (i / cols) as f64);
        let _ = writeln!(s, r#"<g class="panel" transform="translate({x},{y})">"#);
        match panel {
            Panel::LogLines { title, series } => log_lines(&mut s, title, series),
            Panel::Scatter { title, clouds } => scatter(&mut s, title, clouds),
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_svg(panels: &[Panel], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let doc = render_svg_string(panels)?;
    std::fs::write(path, doc).map_err(|e| Error::io(path, e))
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let w = PANEL_W - LEFT - RIGHT;
        LEFT + (x - self.x0) / (self.x1 - self.x0) * w
    }

    fn py(&self, y: f64) -> f64 {
        let h = PANEL_H - TOP - BOTTOM;
        TOP + (self.y1 - y) / (self.y1 - self.y0) * h
    }
}

fn chrome(s: &mut String, title: &str) {
    let (w, h) = (PANEL_W - LEFT - RIGHT, PANEL_H - TOP - BOTTOM);
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{w}" height="{h}" fill="none" stroke="#333"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        LEFT + w / 2.0,
        escape(title)
    );
}

fn legend<'a>(s: &mut String, labels: impl Iterator<Item = &'a str>) {
    let x = PANEL_W - RIGHT + 12.0;
    for (i, label) in labels.enumerate() {
        let y = TOP + 14.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text></g>"#,
            x + 18.0,
            color(i),
            x + 24.0,
            y + 4.0,
            escape(label)
        );
    }
}

fn log_lines(s: &mut String, title: &str, series: &[Series]) {
    let visible = |&&(_, y): &&(f64, f64)| y > 0.0 && y.is_finite();
    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|c| c.points.iter().filter(visible).copied())
        .collect();
    let (mut x0, mut x1) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.0), b.max(p.0))
        });
    let (lo, hi) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.1.log10()), b.max(p.1.log10()))
        });
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        (x0, x1) = (x0 - 0.5, x0 + 0.5);
    }
    let (mut y0, mut y1) = if lo.is_finite() {
        (lo.floor(), hi.ceil())
    } else {
        (-1.0, 1.0)
    };
    if y1 <= y0 {
        (y0, y1) = (y0 - 1.0, y1 + 1.0);
    }
    let frame = Frame { x0, x1, y0, y1 };
    chrome(s, title);

    let decades = (y1 - y0) as usize;
    let step = decades.div_ceil(10).max(1);
    for d in (0..=decades).step_by(step) {
        let exp = y0 + d as f64;
        let py = frame.py(exp);
        let _ = writeln!(
            s,
            r##"<g class="tick"><line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">1e{exp}</text></g>"##,
            PANEL_W - RIGHT,
            LEFT - 6.0,
            py + 4.0
        );
    }
    for (label, v) in [(format!("{x0}"), x0), (format!("{x1}"), x1)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            frame.px(v),
            PANEL_H - BOTTOM + 16.0,
            escape(&label)
        );
    }

    for (i, c) in series.iter().enumerate() {
        let mut pts = String::new();
        for &(x, y) in c.points.iter().filter(visible) {
            let _ = write!(pts, "{:.2},{:.2} ", frame.px(x), frame.py(y.log10()));
        }
        let _ = writeln!(
            s,
            r#"<polyline class="series" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            color(i),
            pts.trim_end()
        );
    }
    legend(s, series.iter().map(|c| c.label.as_str()));
}

fn scatter(s: &mut String, title: &str, clouds: &[PointCloud]) {
    let reach = clouds
        .iter()
        .flat_map(|c| c.points.iter().map(|z| z.norm()))
        .filter(|r| r.is_finite())
        .fold(1.0f64, f64::max)
        * 1.05;
    // square plot area, centered in the panel
    let h = PANEL_H - TOP - BOTTOM;
    let w = PANEL_W - LEFT - RIGHT;
    let aspect = w / h;
    let frame = Frame {
        x0: -reach * aspect,
        x1: reach * aspect,
        y0: -reach,
        y1: reach,
    };
    chrome(s, title);
    let (cx, cy) = (frame.px(0.0), frame.py(0.0));
    let unit = frame.py(0.0) - frame.py(1.0);
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="#bbb"/><line x1="{cx:.2}" y1="{TOP}" x2="{cx:.2}" y2="{:.2}" stroke="#bbb"/>"##,
        LEFT + w,
        TOP + h
    );
    let _ = writeln!(
        s,
        r##"<circle class="unit-circle" cx="{cx:.2}" cy="{cy:.2}" r="{unit:.2}" fill="none" stroke="#888" stroke-dasharray="4 3"/>"##
    );
    for (i, c) in clouds.iter().enumerate() {
        let _ = writeln!(s, r#"<g class="cloud" fill="{}">"#, color(i));
        for z in c
            .points
            .iter()
            .filter(|z| z.re.is_finite() && z.im.is_finite())
        {
            let _ = writeln!(
                s,
                r#"<circle class="point" cx="{:.3}" cy="{:.3}" r="2"/>"#,
                frame.px(z.re),
                frame.py(z.im)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    legend(s, clouds.iter().map(|c| c.label.as_str()));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points_of(doc: &str) -> Vec<Vec<(f64, f64)>> {
        doc.lines()
            .filter(|l| l.contains(r#"class="series""#))
            .map(|l| {
                let start = l.find("points=\"").unwrap() + 8;
                let end = start + l[start..].find('"').unwrap();
                l[start..end]
                    .split_whitespace()
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn constant_series_is_horizontal() {
        let panel = Panel::LogLines {
            title: "flat".into(),
            series: vec![Series::indexed("c", &[0.5; 20], 0)],
        };
        let doc = render_svg_string(&[panel]).unwrap();
        let lines = points_of(&doc);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].len(), 20);
        assert!(lines[0].iter().all(|p| p.1 == lines[0][0].1));
        assert!(doc.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(doc.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn nonpositive_values_are_skipped() {
        let panel = Panel::LogLines {
            title: "V".into(),
            series: vec![
                Series::indexed("a", &[1.0, -1.0, 0.0, 1e-3, f64::NAN], 2),
                Series::indexed("b<&>", &[2.0], 0),
            ],
        };
        let doc = render_svg_string(&[panel]).unwrap();
        let lines = points_of(&doc);
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].len(), 2);
        assert!(doc.contains("b&lt;&amp;&gt;"));
        assert_eq!(doc.matches(r#"class="legend""#).count(), 2);
    }

    #[test]
    fn panels_and_points_are_counted() {
        let line = Panel::LogLines {
            title: "x".into(),
            series: vec![Series::indexed("m", &[1.0, 0.1], 0)],
        };
        let cloud = Panel::Scatter {
            title: "spectrum".into(),
            clouds: vec![PointCloud {
                label: "HB".into(),
                points: vec![
                    Complex64::new(0.5, 0.1),
                    Complex64::new(0.5, -0.1),
                    Complex64::new(0.2, 0.0),
                ],
            }],
        };
        let doc = render_svg_string(&[line.clone(), line.clone(), line, cloud]).unwrap();
        assert_eq!(doc.matches(r#"<g class="panel""#).count(), 4);
        assert_eq!(doc.matches(r#"class="point""#).count(), 3);
        assert_eq!(doc.matches(r#"class="unit-circle""#).count(), 1);
        assert_eq!(doc.matches("<g").count(), doc.matches("</g>").count());
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(render_svg_string(&[]).is_err());
        assert!(render_svg_string(&[Panel::LogLines {
            title: "x".into(),
            series: vec![]
        }])
        .is_err());
    }
}
