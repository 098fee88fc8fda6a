//! System instructions given to the model at the start of every session.

use serde::{Deserialize, Serialize};

use crate::canvas::ConstraintSet;

const TEMPLATE: &str = include_str!("../../data/instructions.txt");

/// Physical layout the instructions describe: the simulated drawing area in
/// pixels and the paper it maps onto in millimetres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstructionParams {
    pub drawing_size: (f64, f64),
    pub workspace_mm: (f64, f64),
    pub edge_margin: f64,
    pub element_buffer: f64,
}

impl Default for InstructionParams {
    fn default() -> Self {
        Self {
            drawing_size: (ConstraintSet::DEFAULT_WIDTH, ConstraintSet::DEFAULT_HEIGHT),
            workspace_mm: (170.0, 130.0),
            edge_margin: ConstraintSet::EDGE_MARGIN,
            element_buffer: ConstraintSet::ELEMENT_BUFFER,
        }
    }
}

impl InstructionParams {
    /// Millimetres of paper per canvas pixel.
    pub fn scale(&self) -> f64 {
        self.workspace_mm.0 / self.drawing_size.0
    }

    /// Smallest mark the pen can draw legibly: 10 mm in pixels.
    pub fn min_mark_px(&self) -> f64 {
        10.0 / self.scale()
    }

    pub fn max_element_height(&self) -> f64 {
        (self.drawing_size.1 / 3.0).floor()
    }

    pub fn is_valid(&self) -> bool {
        let (w, h) = self.drawing_size;
        let (mw, mh) = self.workspace_mm;
        [w, h, mw, mh].iter().all(|v| v.is_finite() && *v > 0.0)
            && self.edge_margin >= 0.0
            && self.element_buffer >= 0.0
            && 2.0 * self.edge_margin < w.min(h)
    }

    /// The constraint set enforced on the canvas, consistent with the text
    /// the model is given.
    pub fn constraints(&self) -> ConstraintSet {
        let mut c = ConstraintSet::new(self.drawing_size.0, self.drawing_size.1, self.scale());
        c.edge_margin = self.edge_margin;
        c.element_buffer = self.element_buffer;
        c
    }
}

/// Renders the instruction template with every numeric slot filled in.
/// Numbers use the shortest representation that round-trips, so the minima
/// appear with full precision (e.g. `70.58823529411765`).
pub fn render_system_instructions(params: &InstructionParams) -> String {
    let min = params.min_mark_px().to_string();
    TEMPLATE
        .replace("{edge_margin}", &params.edge_margin.to_string())
        .replace("{element_buffer}", &params.element_buffer.to_string())
        .replace("{min_line}", &min)
        .replace("{min_circle}", &min)
        .replace("{min_text}", &min)
        .replace("{width}", &params.drawing_size.0.to_string())
        .replace("{height}", &params.drawing_size.1.to_string())
        .replace("{max_height}", &params.max_element_height().to_string())
}
