use std::fmt::Write;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;

use crate::dsp::SpectrogramMeta;
use crate::scalar::Sample;
use crate::viz::{turbo_color, PixelGrid, ViewRange, WaveformSummary};

use super::png::encode_png;
use super::ticks::tick_set;
use super::RenderError;

pub const MARGIN_LEFT: f64 = 48.0;
pub const MARGIN_RIGHT: f64 = 24.0;
pub const MARGIN_TOP: f64 = 16.0;
pub const MARGIN_BOTTOM: f64 = 32.0;

pub const FONT_FAMILY: &str = "sans-serif";
const INK: &str = "#333333";
const WAVE_FILL: &str = "#1f77b4";

/// Plot rectangle inside the fixed margins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotArea {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl PlotArea {
    pub fn for_canvas(width: usize, height: usize) -> Result<Self, RenderError> {
        let (w, h) = (width as f64, height as f64);
        let pw = w - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = h - MARGIN_TOP - MARGIN_BOTTOM;
        if pw < 1.0 || ph < 1.0 {
            return Err(RenderError::InvalidDimensions { width, height });
        }
        Ok(Self {
            x: MARGIN_LEFT,
            y: MARGIN_TOP,
            width: pw,
            height: ph,
        })
    }

    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }
}

/// Coordinates print with at most two decimals and no trailing zeros.
pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".to_string(),
        _ => s.to_string(),
    }
}

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' && c != '\r' => {}
            c => out.push(c),
        }
    }
    out
}

fn open(svg: &mut String, width: usize, height: usize, title: &str) {
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="{FONT_FAMILY}" font-size="10">"#
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(title));
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="12" text-anchor="middle" font-size="11" fill="{INK}">{}</text>"#,
        num(width as f64 / 2.0),
        escape(title)
    );
}

/// Axis frame, ticks and labels for a plot mapping `x` onto `[x_lo, x_hi]`
/// and `y` onto `[y_lo, y_hi]`.
struct Axes<'a> {
    area: PlotArea,
    x_range: (f64, f64),
    y_range: (f64, f64),
    x_title: &'a str,
    y_title: &'a str,
    /// Divide y tick values by this before printing.
    y_unit_scale: f64,
}

impl Axes<'_> {
    fn x_px(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.area.x + (v - lo) / (hi - lo) * self.area.width
    }

    fn y_px(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.area.y + (hi - v) / (hi - lo) * self.area.height
    }

    fn draw(&self, svg: &mut String) -> Result<(), RenderError> {
        let a = self.area;
        let x_target = ((a.width / 80.0).round() as usize).max(2);
        let y_target = ((a.height / 40.0).round() as usize).max(2);
        let xt = tick_set(self.x_range.0, self.x_range.1, x_target)?;
        let yt = tick_set(
            self.y_range.0 / self.y_unit_scale,
            self.y_range.1 / self.y_unit_scale,
            y_target,
        )?;

        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{INK}" stroke-width="1"/>"#,
            num(a.x),
            num(a.y),
            num(a.width),
            num(a.height)
        );
        let _ = writeln!(svg, r#"<g stroke="{INK}" stroke-width="1">"#);
        for &v in &xt.values {
            let x = num(self.x_px(v));
            let _ = writeln!(
                svg,
                r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#,
                num(a.bottom()),
                num(a.bottom() + 4.0)
            );
        }
        for &v in &yt.values {
            let y = num(self.y_px(v * self.y_unit_scale));
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}"/>"#,
                num(a.x - 4.0),
                num(a.x)
            );
        }
        let _ = writeln!(svg, "</g>");

        let _ = writeln!(svg, r#"<g fill="{INK}" font-size="9">"#);
        for &v in &xt.values {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                num(self.x_px(v)),
                num(a.bottom() + 13.0),
                xt.label(v)
            );
        }
        for &v in &yt.values {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                num(a.x - 6.0),
                num(self.y_px(v * self.y_unit_scale) + 3.0),
                yt.label(v)
            );
        }
        let _ = writeln!(svg, "</g>");
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" fill="{INK}">{}</text>"#,
            num(a.x + a.width / 2.0),
            num(a.bottom() + 27.0),
            escape(self.x_title)
        );
        let ly = a.y + a.height / 2.0;
        let _ = writeln!(
            svg,
            r#"<text x="10" y="{}" text-anchor="middle" fill="{INK}" transform="rotate(-90 10 {})">{}</text>"#,
            num(ly),
            num(ly),
            escape(self.y_title)
        );
        Ok(())
    }
}

/// Waveform plot: one vertical min-max bar per bucket inside the view's
/// time and amplitude window.
pub fn render_waveform_svg<T: Sample>(
    summary: &WaveformSummary<T>,
    range: &ViewRange,
    width: usize,
    height: usize,
    title: &str,
) -> Result<String, RenderError> {
    let area = PlotArea::for_canvas(width, height)?;
    let (t0, t1) = (range.time.lo, range.time.hi);
    let visible: Vec<usize> = (0..summary.len())
        .filter(|&i| {
            let (s, e) = summary.bucket_span(i);
            e > t0 && s < t1
        })
        .collect();
    if visible.is_empty() {
        return Err(RenderError::EmptyResult(
            "no waveform buckets inside the time range".into(),
        ));
    }
    let axes = Axes {
        area,
        x_range: (t0, t1),
        y_range: (range.amplitude.lo, range.amplitude.hi),
        x_title: "Time (s)",
        y_title: "Amplitude",
        y_unit_scale: 1.0,
    };

    let mut svg = String::with_capacity(256 + visible.len() * 64);
    open(&mut svg, width, height, title);
    let _ = writeln!(
        svg,
        r#"<defs><clipPath id="plot-area"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath></defs>"#,
        num(area.x),
        num(area.y),
        num(area.width),
        num(area.height)
    );
    let _ = writeln!(
        svg,
        r#"<g clip-path="url(#plot-area)" fill="{WAVE_FILL}" shape-rendering="crispEdges">"#
    );
    for i in visible {
        let (s, e) = summary.bucket_span(i);
        let b = summary.buckets[i];
        let x0 = axes.x_px(s);
        let x1 = axes.x_px(e);
        let top = axes.y_px(b.max.as_f64());
        let bottom = axes.y_px(b.min.as_f64());
        let (y, h) = if bottom - top < 1.0 {
            ((top + bottom) / 2.0 - 0.5, 1.0)
        } else {
            (top, bottom - top)
        };
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
            num(x0),
            num(y),
            num(x1 - x0),
            num(h)
        );
    }
    let _ = writeln!(svg, "</g>");
    axes.draw(&mut svg)?;
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Spectrogram figure: the raster embedded as a base64 PNG with vector time
/// and frequency axes and a low-to-high color legend.
pub fn render_spectrogram_svg(
    grid: &PixelGrid,
    meta: &SpectrogramMeta,
    width: usize,
    height: usize,
    title: &str,
) -> Result<String, RenderError> {
    let area = PlotArea::for_canvas(width, height)?;
    let (t0, t1) = (meta.start_time(), meta.end_time());
    let (f0, f1) = (meta.min_frequency(), meta.max_frequency());
    let f1 = if f1 > f0 { f1 } else { f0 + meta.freq_step() };
    let khz = f1 >= 1000.0;
    let axes = Axes {
        area,
        x_range: (t0, t1),
        y_range: (f0, f1),
        x_title: "Time (s)",
        y_title: if khz {
            "Frequency (kHz)"
        } else {
            "Frequency (Hz)"
        },
        y_unit_scale: if khz { 1000.0 } else { 1.0 },
    };
    let png = encode_png(grid)?;

    let mut svg = String::with_capacity(png.len() * 4 / 3 + 4096);
    open(&mut svg, width, height, title);
    let _ = writeln!(
        svg,
        r#"<image x="{}" y="{}" width="{}" height="{}" preserveAspectRatio="none" image-rendering="pixelated" xlink:href="data:image/png;base64,{}"/>"#,
        num(area.x),
        num(area.y),
        num(area.width),
        num(area.height),
        STANDARD.encode(&png)
    );
    axes.draw(&mut svg)?;
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="12" text-anchor="end" font-size="9" fill="{INK}">{} Hz</text>"#,
        num(area.x - 2.0),
        num(meta.max_frequency())
    );

    // legend
    let lx = area.right() + 8.0;
    let _ = writeln!(
        svg,
        r#"<defs><linearGradient id="turbo-legend" x1="0" y1="1" x2="0" y2="0">"#
    );
    for i in 0..=8 {
        let t = i as f64 / 8.0;
        let [r, g, b] = turbo_color(t);
        let _ = writeln!(
            svg,
            r##"<stop offset="{}" stop-color="#{r:02x}{g:02x}{b:02x}"/>"##,
            num(t)
        );
    }
    let _ = writeln!(svg, "</linearGradient></defs>");
    let _ = writeln!(
        svg,
        r#"<rect x="{}" y="{}" width="8" height="{}" fill="url(#turbo-legend)" stroke="{INK}" stroke-width="0.5"/>"#,
        num(lx),
        num(area.y),
        num(area.height)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="8" fill="{INK}">high</text>"#,
        num(lx + 4.0),
        num(area.y - 3.0)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="8" fill="{INK}">low</text>"#,
        num(lx + 4.0),
        num(area.bottom() + 10.0)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}
