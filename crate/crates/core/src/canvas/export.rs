use std::fmt::Write;

use super::{Author, CanvasState};
use crate::geometry::Point;

/// Canonical coordinate formatting: three decimals, never `-0.000`.
pub fn fmt_coord(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_owned()
    } else {
        s
    }
}

fn fmt_dim(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        fmt_coord(v)
    }
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// SVG 1.1 document with one stroke-only `<path>` per polyline, grouped by
/// element. Equal canvases produce identical bytes.
pub fn export_svg(canvas: &CanvasState) -> String {
    let c = &canvas.constraints;
    let (w, h) = (fmt_dim(c.width), fmt_dim(c.height));
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    for element in &canvas.elements {
        let (class, color) = match element.author {
            Author::Agent => ("agent", "#000000"),
            Author::Human => ("human", "#1f4e9c"),
        };
        let _ = writeln!(
            out,
            "  <g id=\"{}\" class=\"{class}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" stroke-linecap=\"round\" stroke-linejoin=\"round\">",
            escape_xml(&element.id)
        );
        if let Some(label) = &element.label {
            let _ = writeln!(out, "    <title>{}</title>", escape_xml(label));
        }
        for stroke in element.strokes() {
            out.push_str("    <path d=\"");
            for (i, p) in stroke.points().iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(if i == 0 { "M " } else { "L " });
                out.push_str(&fmt_coord(p.x));
                out.push(' ');
                out.push_str(&fmt_coord(p.y));
            }
            out.push_str("\"/>\n");
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Line-oriented pen program: `U x y` travels with the pen up, `D x y` draws.
///
/// Strokes are emitted in element order. The program always starts and ends
/// with a `U` command; an empty canvas parks the pen at the margin corner.
pub fn export_pen_program(canvas: &CanvasState) -> String {
    let mut lines: Vec<String> = Vec::new();
    let cmd = |op: char, p: Point| format!("{op} {} {}", fmt_coord(p.x), fmt_coord(p.y));
    let mut last = None;
    for stroke in canvas.polylines() {
        let pts = stroke.points();
        lines.push(cmd('U', pts[0]));
        lines.extend(pts[1..].iter().map(|&p| cmd('D', p)));
        last = Some(stroke.last());
    }
    let park = last.unwrap_or_else(|| {
        let m = canvas.constraints.edge_margin;
        Point::new(m, m)
    });
    lines.push(cmd('U', park));
    lines.join("\n")
}
