//! Turns a model's tool call into canvas mutations.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use super::message::ToolCall;
use crate::canvas::{Author, CanvasError, CanvasState, Element, PlacementPolicy, ValidationReport, Violation};
use crate::geometry::{clip_polyline, Point, Polyline};
use crate::tools::schema::ToolName;
use crate::tools::{
    draw_circles, draw_hatching, draw_path, draw_scribbles, draw_scribbly_splines, draw_segments, draw_splines,
    draw_text, thicken, Density, Polygon, RandomSource, ScribbleStyle, ToolError,
};

/// Spacing between retraced passes when a call asks for thicker lines.
pub const THICKEN_OFFSET: f64 = 1.0;
pub const DEFAULT_HATCH_ANGLE: f64 = 45.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DispatchError {
    #[error("unknown tool {0:?}")]
    UnknownTool(String),
    #[error("arguments for {tool} do not match its schema: {message}")]
    ArgSchemaMismatch { tool: String, message: String },
    #[error("constraint violation: {0}")]
    ConstraintViolation(ValidationReport),
    #[error(transparent)]
    Tool(#[from] ToolError),
    #[error(transparent)]
    Canvas(#[from] CanvasError),
}

/// Result of a successful call: the new canvas and what was drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispatched {
    pub canvas: CanvasState,
    pub element_id: String,
    pub polylines: Vec<Polyline>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentArg {
    start: Point,
    end: Point,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentsArgs {
    segments: Vec<SegmentArg>,
    passes: Option<usize>,
    label: Option<String>,
    attach_to: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CircleArg {
    center: Point,
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CirclesArgs {
    circles: Vec<CircleArg>,
    passes: Option<usize>,
    label: Option<String>,
    attach_to: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KeypointArgs {
    keypoints: Vec<Point>,
    passes: Option<usize>,
    label: Option<String>,
    attach_to: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TextArgs {
    text: String,
    origin: Point,
    height: f64,
    label: Option<String>,
    attach_to: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScribblesArgs {
    polygon: Vec<Point>,
    density: f64,
    label: Option<String>,
    attach_to: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HatchingArgs {
    polygon: Vec<Point>,
    density: f64,
    angle: Option<f64>,
    cross: Option<bool>,
    label: Option<String>,
    attach_to: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScribblyArgs {
    keypoints: Vec<Point>,
    amplitude: Option<f64>,
    wavelength: Option<f64>,
    label: Option<String>,
    attach_to: Option<String>,
}

/// What a tool produced before placement.
struct Drawn {
    strokes: Vec<Polyline>,
    passes: Option<usize>,
    minima: Vec<Violation>,
    label: Option<String>,
    attach_to: Option<String>,
}

fn parse<T: DeserializeOwned>(tool: ToolName, args: &Value) -> Result<T, DispatchError> {
    // A call without arguments is treated as an empty object.
    let args = if args.is_null() { Value::Object(Default::default()) } else { args.clone() };
    serde_json::from_value(args)
        .map_err(|e| DispatchError::ArgSchemaMismatch { tool: tool.as_str().into(), message: e.to_string() })
}

fn mismatch(tool: ToolName, message: impl Into<String>) -> DispatchError {
    DispatchError::ArgSchemaMismatch { tool: tool.as_str().into(), message: message.into() }
}

fn line_minimum(canvas: &CanvasState, length: f64) -> Option<Violation> {
    let min = canvas.constraints.min_line_len_px;
    (length < min).then_some(Violation::LineTooShort { length, min })
}

fn draw(name: ToolName, call: &ToolCall, canvas: &CanvasState) -> Result<Drawn, DispatchError> {
    let rng = RandomSource::new(call.seed);
    let c = &canvas.constraints;
    let drawn = match name {
        ToolName::Segments => {
            let a: SegmentsArgs = parse(name, &call.args)?;
            if a.segments.is_empty() {
                return Err(mismatch(name, "segments must not be empty"));
            }
            let pairs: Vec<(Point, Point)> = a.segments.iter().map(|s| (s.start, s.end)).collect();
            let strokes = draw_segments(&pairs)?;
            let minima = pairs.iter().filter_map(|(s, e)| line_minimum(canvas, s.distance(*e))).collect();
            Drawn { strokes, passes: a.passes, minima, label: a.label, attach_to: a.attach_to }
        }
        ToolName::Circles => {
            let a: CirclesArgs = parse(name, &call.args)?;
            if a.circles.is_empty() {
                return Err(mismatch(name, "circles must not be empty"));
            }
            let circles: Vec<(Point, f64)> = a.circles.iter().map(|c| (c.center, c.radius)).collect();
            let strokes = draw_circles(&circles)?;
            let minima = circles
                .iter()
                .filter(|(_, r)| 2.0 * r < c.min_circle_diam_px)
                .map(|(_, r)| Violation::CircleTooSmall { diameter: 2.0 * r, min: c.min_circle_diam_px })
                .collect();
            Drawn { strokes, passes: a.passes, minima, label: a.label, attach_to: a.attach_to }
        }
        ToolName::Splines | ToolName::Path => {
            let a: KeypointArgs = parse(name, &call.args)?;
            let line = if name == ToolName::Splines { draw_splines(&a.keypoints)? } else { draw_path(&a.keypoints)? };
            let minima = line_minimum(canvas, line.length()).into_iter().collect();
            Drawn { strokes: vec![line], passes: a.passes, minima, label: a.label, attach_to: a.attach_to }
        }
        ToolName::Text => {
            let a: TextArgs = parse(name, &call.args)?;
            let strokes = draw_text(&a.text, a.origin, a.height)?;
            let minima = (a.height < c.min_text_height_px)
                .then_some(Violation::TextTooSmall { height: a.height, min: c.min_text_height_px })
                .into_iter()
                .collect();
            Drawn { strokes, passes: None, minima, label: a.label, attach_to: a.attach_to }
        }
        ToolName::Scribbles => {
            let a: ScribblesArgs = parse(name, &call.args)?;
            let region = Polygon::new(a.polygon)?;
            let strokes = draw_scribbles(&region, Density::new(a.density)?, &rng)?;
            Drawn { strokes, passes: None, minima: vec![], label: a.label, attach_to: a.attach_to }
        }
        ToolName::Hatching => {
            let a: HatchingArgs = parse(name, &call.args)?;
            let region = Polygon::new(a.polygon)?;
            let angle = a.angle.unwrap_or(DEFAULT_HATCH_ANGLE);
            let strokes = draw_hatching(&region, Density::new(a.density)?, angle, a.cross.unwrap_or(false))?;
            Drawn { strokes, passes: None, minima: vec![], label: a.label, attach_to: a.attach_to }
        }
        ToolName::ScribblySplines => {
            let a: ScribblyArgs = parse(name, &call.args)?;
            let defaults = ScribbleStyle::default();
            let style = ScribbleStyle {
                amplitude: a.amplitude.unwrap_or(defaults.amplitude),
                wavelength: a.wavelength.unwrap_or(defaults.wavelength),
            };
            let line = draw_scribbly_splines(&a.keypoints, style, &rng)?;
            let central = draw_splines(&a.keypoints)?.length();
            let minima = line_minimum(canvas, central).into_iter().collect();
            Drawn { strokes: vec![line], passes: None, minima, label: a.label, attach_to: a.attach_to }
        }
    };
    Ok(drawn)
}

/// Executes `call` against `canvas`.
///
/// The output of the tool is clipped to the drawable rectangle and must then
/// satisfy the minimum sizes, the element buffer (except against
/// `attach_to`) and the height cap. On any error the input canvas is left as
/// it was.
pub fn dispatch_tool_call(call: &ToolCall, canvas: &CanvasState) -> Result<Dispatched, DispatchError> {
    let name = ToolName::parse(&call.name).ok_or_else(|| DispatchError::UnknownTool(call.name.clone()))?;
    let drawn = draw(name, call, canvas)?;

    if let Some(target) = &drawn.attach_to {
        if canvas.element(target).is_none() {
            return Err(mismatch(name, format!("attach_to refers to unknown element {target:?}")));
        }
    }
    let strokes = match drawn.passes {
        None | Some(1) => drawn.strokes,
        Some(p @ 2..=6) => {
            let mut out = Vec::with_capacity(drawn.strokes.len() * p);
            for s in &drawn.strokes {
                out.extend(thicken(s, p, THICKEN_OFFSET)?);
            }
            out
        }
        Some(p) => return Err(mismatch(name, format!("passes must be between 1 and 6, got {p}"))),
    };

    let rect = canvas.constraints.margin_rect();
    let clipped: Vec<Polyline> = strokes.iter().flat_map(|s| clip_polyline(s, &rect)).collect();
    if clipped.is_empty() {
        return Err(CanvasError::ClippedAway.into());
    }
    let id = canvas.next_element_id();
    let candidate = Element::new(id.clone(), Author::Agent, clipped, drawn.label.clone())?;
    let mut report = canvas.validate_placement(&candidate, drawn.attach_to.as_deref());
    report.violations.splice(0..0, drawn.minima);
    if !report.is_ok() {
        return Err(DispatchError::ConstraintViolation(report));
    }
    let polylines = candidate.strokes().to_vec();
    let next = canvas.add_element(
        Author::Agent,
        polylines.clone(),
        drawn.label,
        PlacementPolicy::Reject,
        drawn.attach_to.as_deref(),
    )?;
    Ok(Dispatched { canvas: next, element_id: id, polylines })
}
