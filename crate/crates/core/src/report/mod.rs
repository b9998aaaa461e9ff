//! Rendering of statistics tables and heatmaps.
//!
//! All renderers are pure functions of their inputs: no timestamps, no locale,
//! `.` as the decimal separator, and rounding half away from zero.

mod svg;
mod tables;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use svg::render_heatmap_svg;
pub use tables::{export_counts_csv, export_matrix_csv, render_cwe_table, render_keyword_table};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("decimals must be in 0..=6, got {0}")]
    Decimals(u32),

    #[error("cell size must be in 4..=64, got {0}")]
    CellSize(u32),

    #[error("{0:?} output is not available for this renderer")]
    UnsupportedFormat(Format),

    #[error("cannot render a heatmap with {rows} rows and {cols} columns")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("heatmap dimensions do not match its labels")]
    MalformedMatrix,

    #[error("CSV encoding failed: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Format {
    Csv,
    LatexFragment,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::LatexFragment => "tex",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: Format,
    pub decimals: u32,
    pub highlight: bool,
    pub cell_size: u32,
}

impl RenderOptions {
    pub fn new(format: Format) -> Self {
        RenderOptions { format, decimals: 2, highlight: true, cell_size: 14 }
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        if self.decimals > 6 {
            return Err(ReportError::Decimals(self.decimals));
        }
        if !(4..=64).contains(&self.cell_size) {
            return Err(ReportError::CellSize(self.cell_size));
        }
        Ok(())
    }
}

/// Fixed-point formatting with rounding half away from zero.
pub fn format_fixed(value: f64, decimals: u32) -> String {
    let scale = 10u64.pow(decimals);
    let rounded = (value * scale as f64).round();
    let negative = rounded < 0.0;
    let magnitude = rounded.abs() as u64;
    let sign = if negative { "-" } else { "" };
    if decimals == 0 {
        return format!("{sign}{magnitude}");
    }
    let (int, frac) = (magnitude / scale, magnitude % scale);
    format!("{sign}{int}.{frac:0width$}", width = decimals as usize)
}
