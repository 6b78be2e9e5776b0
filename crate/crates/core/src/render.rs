//! Minimal deterministic SVG rendering of a (graph, layout) pair.
//! Augmenting edges are drawn in a highlight color.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;
use crate::layout::Layout;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("graph has {graph_nodes} nodes but layout has {layout_nodes}")]
    MismatchedFiles { graph_nodes: usize, layout_nodes: usize },
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub width: f64,
    pub node_radius: f64,
    pub edge_color: String,
    pub aug_color: String,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 800.0,
            node_radius: 3.0,
            edge_color: "#444444".into(),
            aug_color: "#d62728".into(),
        }
    }
}

/// Render to SVG, viewport fit with a 5% margin.
pub fn render_svg(g: &Graph, layout: &Layout, opts: &RenderOptions) -> Result<String, RenderError> {
    if layout.coords.len() != g.n() {
        return Err(RenderError::MismatchedFiles {
            graph_nodes: g.n(),
            layout_nodes: layout.coords.len(),
        });
    }
    let min_x = layout.coords.iter().map(|c| c[0]).fold(f64::INFINITY, f64::min);
    let max_x = layout.coords.iter().map(|c| c[0]).fold(f64::NEG_INFINITY, f64::max);
    let min_y = layout.coords.iter().map(|c| c[1]).fold(f64::INFINITY, f64::min);
    let max_y = layout.coords.iter().map(|c| c[1]).fold(f64::NEG_INFINITY, f64::max);
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    let margin = 0.05 * opts.width;
    let inner = opts.width - 2.0 * margin;
    let scale = inner / span_x.max(span_y);
    let height = span_y * scale + 2.0 * margin;

    let px = |c: [f64; 2]| -> (f64, f64) {
        (
            margin + (c[0] - min_x) * scale,
            margin + (c[1] - min_y) * scale,
        )
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        opts.width, height, opts.width, height
    )
    .unwrap();
    // plain edges first so augmenting edges stay visible on top
    for aug_pass in [false, true] {
        for e in g.edges().iter().filter(|e| e.aug == aug_pass) {
            let (x1, y1) = px(layout.coords[e.u]);
            let (x2, y2) = px(layout.coords[e.v]);
            let color = if e.aug { &opts.aug_color } else { &opts.edge_color };
            writeln!(
                svg,
                r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{color}" stroke-width="1"/>"#
            )
            .unwrap();
        }
    }
    for c in &layout.coords {
        let (x, y) = px(*c);
        writeln!(
            svg,
            r##"<circle cx="{x:.3}" cy="{y:.3}" r="{:.1}" fill="#1f77b4"/>"##,
            opts.node_radius
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
