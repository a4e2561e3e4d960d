//! Interval charts: one row per series, a box over the interval and a
//! star at the sample mean.

use crate::report::SeriesInterval;

/// Columns of the ASCII plotting area.
pub const ASCII_COLUMNS: usize = 80;

const SVG_LABEL_WIDTH: f64 = 140.0;
const SVG_PLOT_WIDTH: f64 = 480.0;
const SVG_MARGIN: f64 = 20.0;
const SVG_ROW: f64 = 28.0;
const SVG_BOX: f64 = 14.0;

/// Common horizontal axis: the hull of all intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
}

impl Axis {
    pub fn covering(rows: &[SeriesInterval]) -> Axis {
        let lo = rows.iter().map(|r| r.lo).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|r| r.hi).fold(f64::NEG_INFINITY, f64::max);
        Axis { lo, hi }
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.hi > self.lo)
    }

    /// Position of `v` in `[0, 1]`; a degenerate axis maps everything to
    /// the middle.
    pub fn fraction(&self, v: f64) -> f64 {
        if self.is_degenerate() {
            0.5
        } else {
            ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
        }
    }

    pub fn column(&self, v: f64) -> usize {
        (self.fraction(v) * (ASCII_COLUMNS - 1) as f64).round() as usize
    }
}

pub fn ascii(rows: &[SeriesInterval]) -> String {
    let axis = Axis::covering(rows);
    let label_width = rows.iter().map(|r| r.label.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for row in rows {
        let mut cells = vec![' '; ASCII_COLUMNS];
        let (start, end) = (axis.column(row.lo), axis.column(row.hi));
        if start == end {
            cells[start] = '|';
        } else {
            cells[start] = '[';
            cells[end] = ']';
            for cell in &mut cells[start + 1..end] {
                *cell = '=';
            }
        }
        if let Some(mean) = row.mean {
            cells[axis.column(mean)] = '*';
        }
        let line: String = cells.into_iter().collect();
        out.push_str(&format!("{:<label_width$} |{}|\n", row.label, line));
    }
    let left = format!("{:.4}", axis.lo);
    let right = format!("{:.4}", axis.hi);
    let gap = (ASCII_COLUMNS + 2).saturating_sub(left.len() + right.len()).max(1);
    out.push_str(&format!("{:<label_width$} {left}{}{right}\n", "", " ".repeat(gap)));
    out
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}

fn star(cx: f64, cy: f64, radius: f64) -> String {
    let points: Vec<String> = (0..10)
        .map(|k| {
            let r = if k % 2 == 0 { radius } else { radius * 0.4 };
            let angle = std::f64::consts::PI * (k as f64 / 5.0 - 0.5);
            format!("{:.2},{:.2}", cx + r * angle.cos(), cy + r * angle.sin())
        })
        .collect();
    points.join(" ")
}

pub fn svg(rows: &[SeriesInterval]) -> String {
    let axis = Axis::covering(rows);
    let x = |v: f64| SVG_MARGIN + SVG_LABEL_WIDTH + axis.fraction(v) * SVG_PLOT_WIDTH;
    let width = 2.0 * SVG_MARGIN + SVG_LABEL_WIDTH + SVG_PLOT_WIDTH;
    let axis_y = SVG_MARGIN + rows.len() as f64 * SVG_ROW;
    let height = axis_y + 2.0 * SVG_MARGIN;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    ));
    for (i, row) in rows.iter().enumerate() {
        let cy = SVG_MARGIN + (i as f64 + 0.5) * SVG_ROW;
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
            SVG_MARGIN + SVG_LABEL_WIDTH - 8.0,
            cy,
            escape(&row.label)
        ));
        let (x0, x1) = (x(row.lo), x(row.hi));
        out.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#9ecae1\" stroke=\"#08519c\" stroke-width=\"1\"/>\n",
            x0,
            cy - SVG_BOX / 2.0,
            x1 - x0,
            SVG_BOX
        ));
        if let Some(mean) = row.mean {
            out.push_str(&format!(
                "<polygon points=\"{}\" fill=\"#d94801\"/>\n",
                star(x(mean), cy, 6.0)
            ));
        }
    }
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{axis_y:.2}\" x2=\"{:.2}\" y2=\"{axis_y:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
        x(axis.lo),
        SVG_MARGIN + SVG_LABEL_WIDTH + SVG_PLOT_WIDTH
    ));
    let ticks: &[f64] = if axis.is_degenerate() {
        &[0.5]
    } else {
        &[0.0, 0.25, 0.5, 0.75, 1.0]
    };
    for &t in ticks {
        let value = if axis.is_degenerate() { axis.lo } else { axis.lo + t * (axis.hi - axis.lo) };
        let tx = SVG_MARGIN + SVG_LABEL_WIDTH + t * SVG_PLOT_WIDTH;
        out.push_str(&format!(
            "<line x1=\"{tx:.2}\" y1=\"{axis_y:.2}\" x2=\"{tx:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
            axis_y + 4.0
        ));
        out.push_str(&format!(
            "<text x=\"{tx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{value:.4}</text>\n",
            axis_y + 18.0
        ));
    }
    out.push_str("</svg>\n");
    out
}
