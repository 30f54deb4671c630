//! Deterministic SVG artifacts: line plots of diagnostic series and a
//! space-time view of a run with trajectory overlays.
//!
//! Everything is assembled as plain strings from the input data (no clocks,
//! no randomness), so identical inputs give byte-identical files. The
//! space-time field is rasterized to a PNG (one pixel per stored cell) and
//! embedded base64 in the SVG, stretched to the plot rectangle.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};

use crate::error::{Error, Result};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 54.0;

pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// One curve of a line plot.
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
    /// Draw circles at the points in addition to the polyline.
    pub markers: bool,
}

/// A decimated space-time record: `rows[i]` holds the field at `ts[i]`
/// sampled at `xs`.
#[derive(Clone, Debug)]
pub struct Raster {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

/// A trajectory drawn over the space-time view, as `(x, t)` pairs.
pub struct Overlay<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
    pub dashed: bool,
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    let s = if (1e-4..1e6).contains(&a) {
        format!("{v:.6}")
    } else {
        return format!("{v:.2e}");
    };
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Tick positions at a 1-2-5 progression covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if span <= 0.0 || span.is_nan() {
        return vec![lo];
    }
    let raw = span / target.max(2) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm <= 1.5 {
        1.0
    } else if norm <= 3.5 {
        2.0
    } else if norm <= 7.5 {
        5.0
    } else {
        10.0
    } * mag;
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        // Snap tiny residues to zero so labels read "0", not "1.2e-17".
        out.push(if t.abs() < 1e-9 * span { 0.0 } else { t });
        t += step;
    }
    out
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT
            - MARGIN_B
            - (v - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn svg_header(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica,Arial,sans-serif\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{title}</text>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tx = WIDTH / 2.0,
        title = escape(title),
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn axes(frame: &Frame, xlabel: &str, ylabel: &str) -> String {
    let mut out = String::new();
    let (px0, px1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (py0, py1) = (HEIGHT - MARGIN_B, MARGIN_T);
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        px(px0),
        px(py1),
        px(px1 - px0),
        px(py0 - py1)
    ));
    for t in ticks(frame.x_lo, frame.x_hi, 7) {
        let x = frame.x(t);
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333\"/>\n",
            px(x),
            px(py0),
            px(py0 + 5.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            px(x),
            px(py0 + 18.0),
            fmt_num(t)
        ));
    }
    for t in ticks(frame.y_lo, frame.y_hi, 6) {
        let y = frame.y(t);
        out.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#333\"/>\n",
            px(y),
            px(px0 - 5.0),
            px(px0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            px(px0 - 8.0),
            px(y + 4.0),
            fmt_num(t)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        px((px0 + px1) / 2.0),
        px(HEIGHT - 14.0),
        escape(xlabel)
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        px((py0 + py1) / 2.0),
        px((py0 + py1) / 2.0),
        escape(ylabel)
    ));
    out
}

fn polyline(frame: &Frame, points: &[(f64, f64)], color: &str, dashed: bool) -> String {
    let mut out = String::new();
    let dash = if dashed {
        " stroke-dasharray=\"6 4\""
    } else {
        ""
    };
    let mut segment = String::new();
    let mut count = 0usize;
    let flush = |seg: &mut String, count: &mut usize, out: &mut String| {
        if *count >= 2 {
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{seg}\"/>\n"
            ));
        }
        seg.clear();
        *count = 0;
    };
    for &(x, y) in points {
        if !(x.is_finite() && y.is_finite()) {
            flush(&mut segment, &mut count, &mut out);
            continue;
        }
        if !segment.is_empty() {
            segment.push(' ');
        }
        segment.push_str(&format!("{},{}", px(frame.x(x)), px(frame.y(y))));
        count += 1;
    }
    flush(&mut segment, &mut count, &mut out);
    out
}

/// A line plot of one or more series sharing the axes.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series<'_>]) -> String {
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            if x.is_finite() && y.is_finite() {
                x_lo = x_lo.min(x);
                x_hi = x_hi.max(x);
                y_lo = y_lo.min(y);
                y_hi = y_hi.max(y);
            }
        }
    }
    if !x_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    let (x_lo, x_hi) = padded(x_lo, x_hi);
    let (y_lo, y_hi) = padded(y_lo, y_hi);
    let frame = Frame {
        x_lo,
        x_hi,
        y_lo,
        y_hi,
    };

    let mut out = svg_header(title);
    out.push_str(&axes(&frame, xlabel, ylabel));
    for s in series {
        out.push_str(&polyline(&frame, s.points, s.color, false));
        if s.markers {
            for &(x, y) in s.points {
                if x.is_finite() && y.is_finite() {
                    out.push_str(&format!(
                        "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n",
                        px(frame.x(x)),
                        px(frame.y(y)),
                        s.color
                    ));
                }
            }
        }
    }
    // Legend in the top-right corner of the plot area.
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_T + 16.0 + 18.0 * i as f64;
        let x = WIDTH - MARGIN_R - 150.0;
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            px(x),
            px(y - 4.0),
            px(x + 22.0),
            px(y - 4.0),
            s.color
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            px(x + 28.0),
            px(y),
            escape(s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Diverging blue-white-red map for `v` in `[-1, 1]`.
fn diverging(v: f64) -> [u8; 3] {
    let v = v.clamp(-1.0, 1.0);
    let lerp = |a: [u8; 3], b: [u8; 3], t: f64| -> [u8; 3] {
        [
            (a[0] as f64 + (b[0] as f64 - a[0] as f64) * t).round() as u8,
            (a[1] as f64 + (b[1] as f64 - a[1] as f64) * t).round() as u8,
            (a[2] as f64 + (b[2] as f64 - a[2] as f64) * t).round() as u8,
        ]
    };
    let blue = [33, 102, 172];
    let white = [247, 247, 247];
    let red = [178, 24, 43];
    if v < 0.0 {
        lerp(white, blue, -v)
    } else {
        lerp(white, red, v)
    }
}

fn raster_png(raster: &Raster) -> Result<Vec<u8>> {
    let rows = raster.rows.len();
    let cols = raster.xs.len();
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("empty raster".into()));
    }
    let mut vmax = 0.0f64;
    for row in &raster.rows {
        if row.len() != cols {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: row.len(),
            });
        }
        for &v in row {
            if v.is_finite() {
                vmax = vmax.max(v.abs());
            }
        }
    }
    if vmax == 0.0 {
        vmax = 1.0;
    }
    let mut pixels = Vec::with_capacity(rows * cols * 3);
    // Image row 0 is the latest time so that time increases upward.
    for row in raster.rows.iter().rev() {
        for &v in row {
            let c = diverging(if v.is_finite() { v / vmax } else { 0.0 });
            pixels.extend_from_slice(&c);
        }
    }
    let mut png = Vec::new();
    PngEncoder::new(&mut png)
        .write_image(&pixels, cols as u32, rows as u32, ExtendedColorType::Rgb8)
        .map_err(|e| Error::Serialize(format!("png encoding: {e}")))?;
    Ok(png)
}

/// Space-time view: the raster as an image, axes in data coordinates, and
/// trajectory overlays.
pub fn spacetime_plot(title: &str, raster: &Raster, overlays: &[Overlay<'_>]) -> Result<String> {
    let png = raster_png(raster)?;
    let x_lo = *raster.xs.first().unwrap();
    let x_hi = *raster.xs.last().unwrap();
    let t_lo = *raster.ts.first().unwrap();
    let t_hi = *raster.ts.last().unwrap();
    let (t_lo, t_hi) = if t_lo == t_hi {
        (t_lo, t_lo + 1.0)
    } else {
        (t_lo, t_hi)
    };
    let frame = Frame {
        x_lo,
        x_hi,
        y_lo: t_lo,
        y_hi: t_hi,
    };
    let mut out = svg_header(title);
    out.push_str(&format!(
        concat!(
            "<image x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\" ",
            "preserveAspectRatio=\"none\" style=\"image-rendering:pixelated\" ",
            "href=\"data:image/png;base64,{data}\"/>\n"
        ),
        x = px(MARGIN_L),
        y = px(MARGIN_T),
        w = px(WIDTH - MARGIN_L - MARGIN_R),
        h = px(HEIGHT - MARGIN_T - MARGIN_B),
        data = BASE64.encode(&png),
    ));
    out.push_str(&axes(&frame, "x", "t"));
    for o in overlays {
        out.push_str(&polyline(&frame, o.points, o.color, o.dashed));
    }
    for (i, o) in overlays.iter().enumerate() {
        let y = MARGIN_T + 16.0 + 18.0 * i as f64;
        let x = MARGIN_L + 10.0;
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n",
            px(x),
            px(y),
            o.color,
            escape(o.label)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
