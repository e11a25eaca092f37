//! SVG rendering of a region slice.
//!
//! The output depends only on the grid and the style: coordinates are
//! printed at fixed precision and cells are emitted in axis order.

use std::fmt::Write as _;

use thiserror::Error;

use crate::analysis::{Mask, RegionGrid};

#[derive(Debug, Error, PartialEq)]
pub enum StyleError {
    #[error("cell_px must be at least 1")]
    CellSize,
    #[error("overlay_alpha must lie in (0, 1], got {0}")]
    Alpha(f64),
    #[error("invalid color {0:?}: expected #rrggbb")]
    Color(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotStyle {
    /// Pixel size of one grid cell.
    pub cell_px: u32,
    pub sp_color: String,
    pub numeric_color: String,
    pub overlay_alpha: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            cell_px: 4,
            sp_color: "#2ca02c".into(),
            numeric_color: "#1f77b4".into(),
            overlay_alpha: 0.6,
        }
    }
}

fn valid_color(c: &str) -> bool {
    c.len() == 7 && c.starts_with('#') && c[1..].chars().all(|ch| ch.is_ascii_hexdigit())
}

impl PlotStyle {
    pub fn validate(&self) -> Result<(), StyleError> {
        if self.cell_px < 1 {
            return Err(StyleError::CellSize);
        }
        if !(self.overlay_alpha > 0.0 && self.overlay_alpha <= 1.0) {
            return Err(StyleError::Alpha(self.overlay_alpha));
        }
        for c in [&self.sp_color, &self.numeric_color] {
            if !valid_color(c) {
                return Err(StyleError::Color(c.clone()));
            }
        }
        Ok(())
    }
}

/// Plotted data range.
const C1_MAX: f64 = 6.0;
const C2_MAX: f64 = 3.0;

const MARGIN_LEFT: f64 = 56.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;
const LEGEND_WIDTH: f64 = 210.0;

struct Frame {
    /// Pixels per unit of c1 and c2.
    sx: f64,
    sy: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn x(&self, c1: f64) -> f64 {
        MARGIN_LEFT + c1 * self.sx
    }

    fn y(&self, c2: f64) -> f64 {
        MARGIN_TOP + (C2_MAX - c2) * self.sy
    }
}

fn cells(out: &mut String, r: &RegionGrid, f: &Frame, mask: &Mask) {
    let (w, h) = (r.c1_step * f.sx, r.c2_step * f.sy);
    for (j, &c2) in r.c2_axis.iter().enumerate() {
        for (i, &c1) in r.c1_axis.iter().enumerate() {
            if mask.get(i, j) {
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.3}" y="{:.3}" width="{w:.3}" height="{h:.3}"/>"#,
                    f.x(c1 - r.c1_step),
                    f.y(c2),
                );
            }
        }
    }
}

/// Renders the stationary-phase region with the numeric region overlaid.
pub fn render_svg(r: &RegionGrid, style: &PlotStyle) -> Result<String, StyleError> {
    style.validate()?;
    let px = f64::from(style.cell_px);
    let sx = px / r.c1_step;
    let sy = px / r.c2_step;
    let (plot_w, plot_h) = (C1_MAX * sx, C2_MAX * sy);
    let f = Frame {
        sx,
        sy,
        width: MARGIN_LEFT + plot_w + LEGEND_WIDTH,
        height: MARGIN_TOP + plot_h + MARGIN_BOTTOM,
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}" font-family="sans-serif" font-size="12">"#,
        f.width.ceil(),
        f.height.ceil(),
        f.width.ceil(),
        f.height.ceil()
    );
    let _ = writeln!(s, r#"<title>Entanglement region, c3 = {}</title>"#, r.c3);
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="20" text-anchor="middle">c3 = {}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        r.c3
    );

    let _ = writeln!(s, r#"<g id="sp-region" fill="{}" stroke="none">"#, style.sp_color);
    cells(&mut s, r, &f, &r.sp_mask);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<g id="numeric-region" fill="{}" fill-opacity="{}" stroke="none">"#,
        style.numeric_color, style.overlay_alpha
    );
    cells(&mut s, r, &f, &r.numeric_mask);
    let _ = writeln!(s, "</g>");

    // frame, ticks and labels
    let _ = writeln!(s, r##"<g id="axes" stroke="#000000" fill="none">"##);
    let _ = writeln!(
        s,
        r#"<rect x="{:.3}" y="{:.3}" width="{plot_w:.3}" height="{plot_h:.3}"/>"#,
        f.x(0.0),
        f.y(C2_MAX)
    );
    for k in 0..=6 {
        let x = f.x(k as f64);
        let _ = writeln!(s, r#"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}"/>"#, f.y(0.0), f.y(0.0) + 5.0);
    }
    for k in 0..=3 {
        let y = f.y(k as f64);
        let _ = writeln!(s, r#"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}"/>"#, f.x(0.0) - 5.0, f.x(0.0));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g id="labels" fill="#000000">"##);
    for k in 0..=6 {
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{k}</text>"#, f.x(k as f64), f.y(0.0) + 18.0);
    }
    for k in 0..=3 {
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{k}</text>"#, f.x(0.0) - 8.0, f.y(k as f64) + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">c1</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        f.y(0.0) + 38.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.3}" text-anchor="middle" transform="rotate(-90 16 {:.3})">c2</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "</g>");

    let lx = MARGIN_LEFT + plot_w + 16.0;
    let _ = writeln!(s, r#"<g id="legend">"#);
    let _ = writeln!(
        s,
        r#"<rect class="legend" x="{lx:.3}" y="{:.3}" width="14" height="14" fill="{}"/>"#,
        MARGIN_TOP,
        style.sp_color
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}">stationary-phase region</text>"#,
        lx + 20.0,
        MARGIN_TOP + 11.0
    );
    let _ = writeln!(
        s,
        r#"<rect class="legend" x="{lx:.3}" y="{:.3}" width="14" height="14" fill="{}" fill-opacity="{}"/>"#,
        MARGIN_TOP + 22.0,
        style.numeric_color,
        style.overlay_alpha
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}">numerical region</text>"#,
        lx + 20.0,
        MARGIN_TOP + 33.0
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Contents of the `<g id=...>` group, one element per line.
pub fn group_body<'a>(svg: &'a str, id: &str) -> Vec<&'a str> {
    let open = format!(r#"<g id="{id}""#);
    svg.lines()
        .skip_while(|l| !l.starts_with(&open))
        .skip(1)
        .take_while(|l| *l != "</g>")
        .collect()
}
