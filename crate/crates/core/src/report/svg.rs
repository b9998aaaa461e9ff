use std::fmt::Write;

use crate::analytics::HeatmapMatrix;

use super::{format_fixed, RenderOptions, ReportError};

const LOW: (u8, u8, u8) = (0xFF, 0xFF, 0xFF);
const HIGH: (u8, u8, u8) = (0xCC, 0x00, 0x00);
const PAD: u32 = 8;

/// Renders a heatmap as a standalone SVG document.
///
/// Cells are laid out row-major with one `<rect>` per cell, filled on a
/// linear white-to-red ramp over `value / kind.value_max()`. Row labels sit
/// to the left, column labels above, rotated to read bottom-up.
pub fn render_heatmap_svg(matrix: &HeatmapMatrix, opts: &RenderOptions) -> Result<String, ReportError> {
    opts.validate()?;
    if !matrix.is_well_formed() {
        return Err(ReportError::MalformedMatrix);
    }
    let (rows, cols) = (matrix.rows.len(), matrix.cols.len());
    if rows == 0 || cols == 0 {
        return Err(ReportError::EmptyMatrix { rows, cols });
    }

    let cell = opts.cell_size;
    let font = (cell * 3 / 4).max(3);
    // rough advance width of a sans-serif glyph: 0.6 em
    let text_width = |chars: usize| chars as u32 * font * 6 / 10;
    let row_label_w = text_width(matrix.rows.iter().map(|r| r.as_str().chars().count()).max().unwrap_or(0));
    let col_label_h = text_width(matrix.cols.iter().map(|c| c.chars().count()).max().unwrap_or(0));

    let left = PAD + row_label_w + PAD;
    let top = PAD + col_label_h + PAD;
    let width = left + cols as u32 * cell + PAD;
    let height = top + rows as u32 * cell + PAD;
    let value_max = matrix.kind.value_max();

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"{font}\">"
    );
    let _ = writeln!(out, "<desc>{:?} {rows}x{cols}</desc>", matrix.kind);

    out.push_str("<g class=\"cells\" stroke=\"#DDDDDD\" stroke-width=\"0.5\">\n");
    for (i, cwe) in matrix.rows.iter().enumerate() {
        for (j, keyword) in matrix.cols.iter().enumerate() {
            let value = matrix.values[i][j];
            let x = left + j as u32 * cell;
            let y = top + i as u32 * cell;
            let _ = writeln!(
                out,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"{}\"><title>{} / {}: {} (n={})</title></rect>",
                ramp(value / value_max),
                xml_escape(cwe.as_str()),
                xml_escape(keyword),
                format_fixed(value, opts.decimals),
                matrix.raw_counts[i][j]
            );
        }
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"row-labels\" text-anchor=\"end\">\n");
    for (i, cwe) in matrix.rows.iter().enumerate() {
        let y = top + i as u32 * cell + cell / 2;
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{y}\" dominant-baseline=\"middle\">{}</text>",
            left - PAD / 2,
            xml_escape(cwe.as_str())
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"col-labels\" text-anchor=\"start\">\n");
    for (j, keyword) in matrix.cols.iter().enumerate() {
        let x = left + j as u32 * cell + cell / 2;
        let y = top - PAD / 2;
        let _ = writeln!(
            out,
            "<text transform=\"translate({x},{y}) rotate(-90)\" dominant-baseline=\"middle\">{}</text>",
            xml_escape(keyword)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Color at position `t` (clamped to [0, 1]) on the white-to-red ramp.
fn ramp(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let lerp = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    format!("#{:02X}{:02X}{:02X}", lerp(LOW.0, HIGH.0), lerp(LOW.1, HIGH.1), lerp(LOW.2, HIGH.2))
}

fn xml_escape(text: &str) -> String {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::HeatmapKind;
    use crate::corpus::CweId;
    use crate::report::Format;

    fn one_cell(kind: HeatmapKind, value: f64) -> HeatmapMatrix {
        HeatmapMatrix {
            kind,
            rows: vec![CweId::parse("CWE-295").unwrap()],
            cols: vec!["certificate".into()],
            raw_counts: vec![vec![2]],
            values: vec![vec![value]],
        }
    }

    fn fills(svg: &str) -> Vec<&str> {
        svg.match_indices("fill=\"#").map(|(i, _)| &svg[i + 6..i + 13]).collect()
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), "#FFFFFF");
        assert_eq!(ramp(1.0), "#CC0000");
        assert_eq!(ramp(2.0), "#CC0000");
        assert_eq!(ramp(-1.0), "#FFFFFF");
        assert_eq!(ramp(f64::NAN), "#FFFFFF");
        assert_eq!(ramp(0.5), "#E68080");
    }

    #[test]
    fn single_cells() {
        let opts = RenderOptions::new(Format::Svg);
        let white = render_heatmap_svg(&one_cell(HeatmapKind::PrevalenceNormalized, 0.0), &opts).unwrap();
        assert_eq!(fills(&white), ["#FFFFFF"]);
        let red = render_heatmap_svg(&one_cell(HeatmapKind::PrevalenceNormalized, 1.0), &opts).unwrap();
        assert_eq!(fills(&red), ["#CC0000"]);
        let severity = render_heatmap_svg(&one_cell(HeatmapKind::AvgSeverityMinSupport, 10.0), &opts).unwrap();
        assert_eq!(fills(&severity), ["#CC0000"]);
        let half = render_heatmap_svg(&one_cell(HeatmapKind::AvgSeverityMinSupport, 5.0), &opts).unwrap();
        assert_eq!(fills(&half), ["#E68080"]);
    }

    #[test]
    fn empty_matrix_is_an_error() {
        let mut m = one_cell(HeatmapKind::PrevalenceNormalized, 0.0);
        m.rows.clear();
        m.values.clear();
        m.raw_counts.clear();
        assert_eq!(
            render_heatmap_svg(&m, &RenderOptions::new(Format::Svg)),
            Err(ReportError::EmptyMatrix { rows: 0, cols: 1 })
        );
    }

    #[test]
    fn labels_are_escaped() {
        let mut m = one_cell(HeatmapKind::PrevalenceNormalized, 0.5);
        m.cols = vec!["<a&b>".into()];
        let svg = render_heatmap_svg(&m, &RenderOptions::new(Format::Svg)).unwrap();
        assert!(svg.contains("&lt;a&amp;b&gt;"));
        assert!(!svg.contains("<a&b>"));
    }
}
