//! SVG and PNG export with axes, ticks and labels.
//!
//! Output is deterministic: no timestamps, fixed margins
//! (48 left, 24 right, 16 top, 32 bottom) and a fixed font family name.

mod png;
mod svg;
mod ticks;

use thiserror::Error;

use crate::viz::VizError;

pub use png::{encode_png, render_spectrogram_png, PNG_SIGNATURE};
pub use svg::{
    render_spectrogram_svg, render_waveform_svg, PlotArea, FONT_FAMILY, MARGIN_BOTTOM, MARGIN_LEFT,
    MARGIN_RIGHT, MARGIN_TOP,
};
pub use ticks::{nice_ticks, tick_set, TickSet};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("empty result: {0}")]
    EmptyResult(String),
    #[error("degenerate range [{lo}, {hi}]")]
    DegenerateRange { lo: f64, hi: f64 },
    #[error("tick count {0} must be at least 2")]
    InvalidTickCount(usize),
    #[error("canvas {width}x{height} is too small")]
    InvalidDimensions { width: usize, height: usize },
    #[error(transparent)]
    Viz(#[from] VizError),
    #[error("encoder error: {0}")]
    Io(#[from] std::io::Error),
}

impl RenderError {
    pub fn kind(&self) -> &'static str {
        match self {
            RenderError::EmptyResult(_) => "EmptyResult",
            RenderError::DegenerateRange { .. } => "DegenerateRange",
            RenderError::InvalidTickCount(_) => "InvalidTickCount",
            RenderError::InvalidDimensions { .. } => "InvalidDimensions",
            RenderError::Viz(e) => e.kind(),
            RenderError::Io(_) => "Io",
        }
    }
}
