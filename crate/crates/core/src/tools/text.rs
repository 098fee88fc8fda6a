//! Single-stroke text from the bundled Hershey simplex font.

use std::sync::OnceLock;

use super::ToolError;
use crate::geometry::{Point, Polyline};

const FONT_DATA: &str = include_str!("../../data/futural.jhf");

/// Font units between the cap line and the baseline.
pub const CAP_HEIGHT_UNITS: f64 = 21.0;
const BASELINE: i32 = 9;
const FIRST_CHAR: u32 = 32;
const LAST_CHAR: u32 = 126;

struct Glyph {
    left: i32,
    right: i32,
    strokes: Vec<Vec<(i32, i32)>>,
}

fn parse_glyph(line: &str) -> Option<Glyph> {
    let bytes = line.as_bytes();
    let count: usize = line.get(5..8)?.trim().parse().ok()?;
    let data = &bytes[8..];
    if data.len() < count * 2 {
        return None;
    }
    let coord = |b: u8| b as i32 - b'R' as i32;
    let left = coord(data[0]);
    let right = coord(data[1]);
    let mut strokes = Vec::new();
    let mut current = Vec::new();
    for pair in data[2..count * 2].chunks_exact(2) {
        if pair == b" R" {
            strokes.push(std::mem::take(&mut current));
        } else {
            current.push((coord(pair[0]), coord(pair[1])));
        }
    }
    strokes.push(current);
    strokes.retain(|s| s.len() >= 2);
    Some(Glyph { left, right, strokes })
}

fn font() -> &'static [Glyph] {
    static FONT: OnceLock<Vec<Glyph>> = OnceLock::new();
    FONT.get_or_init(|| {
        FONT_DATA
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| parse_glyph(l).expect("bundled font is well formed"))
            .collect()
    })
}

fn placeholder() -> Glyph {
    let r = vec![(3, -7), (11, -7), (11, 9), (3, 9), (3, -7)];
    Glyph { left: 0, right: 14, strokes: vec![r] }
}

/// Renders `text` with its baseline starting at `origin`, scaled so capital
/// letters are `height` pixels tall. Characters outside printable ASCII are
/// drawn as a small rectangle.
pub fn draw_text(text: &str, origin: Point, height: f64) -> Result<Vec<Polyline>, ToolError> {
    if text.trim().is_empty() {
        return Err(ToolError::EmptyText);
    }
    if !origin.is_finite() || !height.is_finite() {
        return Err(ToolError::NonFinite);
    }
    if height <= 0.0 {
        return Err(ToolError::InvalidParameter { name: "height", reason: "must be positive".into() });
    }
    let scale = height / CAP_HEIGHT_UNITS;
    let glyphs = font();
    let fallback = placeholder();
    let mut cursor = 0i32;
    let mut out = Vec::new();
    for c in text.chars() {
        let code = c as u32;
        let glyph = if (FIRST_CHAR..=LAST_CHAR).contains(&code) {
            &glyphs[(code - FIRST_CHAR) as usize]
        } else {
            &fallback
        };
        for stroke in &glyph.strokes {
            let pts = stroke.iter().map(|&(x, y)| {
                Point::new(
                    origin.x + f64::from(cursor + x - glyph.left) * scale,
                    origin.y + f64::from(y - BASELINE) * scale,
                )
            });
            if let Ok(line) = Polyline::new(pts) {
                out.push(line);
            }
        }
        cursor += glyph.right - glyph.left;
    }
    Ok(out)
}
