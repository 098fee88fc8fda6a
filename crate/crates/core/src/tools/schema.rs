//! Function declarations handed to the language model.
//!
//! The document is a JSON array of `{name, description, parameters}` objects
//! whose `parameters` are JSON Schema; backends wrap it in whatever envelope
//! their API expects.

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ToolName {
    Segments,
    Circles,
    Splines,
    Path,
    Text,
    Scribbles,
    Hatching,
    ScribblySplines,
}

impl ToolName {
    pub const ALL: [ToolName; 8] = [
        ToolName::Segments,
        ToolName::Circles,
        ToolName::Splines,
        ToolName::Path,
        ToolName::Text,
        ToolName::Scribbles,
        ToolName::Hatching,
        ToolName::ScribblySplines,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ToolName::Segments => "draw-segments",
            ToolName::Circles => "draw-circles",
            ToolName::Splines => "draw-splines",
            ToolName::Path => "draw-path",
            ToolName::Text => "draw-text",
            ToolName::Scribbles => "draw-scribbles",
            ToolName::Hatching => "draw-hatching",
            ToolName::ScribblySplines => "draw-scribbly-splines",
        }
    }

    pub fn parse(name: &str) -> Option<ToolName> {
        ToolName::ALL.into_iter().find(|t| t.as_str() == name)
    }
}

impl std::fmt::Display for ToolName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn point() -> Value {
    json!({
        "type": "array",
        "items": { "type": "number" },
        "minItems": 2,
        "maxItems": 2,
        "description": "[x, y] in canvas pixels, origin top-left, y down"
    })
}

fn points(min: usize, what: &str) -> Value {
    json!({ "type": "array", "items": point(), "minItems": min, "description": what })
}

fn common(mut props: Value) -> Value {
    let obj = props.as_object_mut().expect("object");
    obj.insert(
        "label".into(),
        json!({ "type": "string", "description": "Short name of what this element depicts" }),
    );
    obj.insert(
        "attach_to".into(),
        json!({
            "type": "string",
            "description": "Id of an existing element this addition belongs to; the spacing rule is not applied against it"
        }),
    );
    props
}

fn passes() -> Value {
    json!({
        "type": "integer",
        "minimum": 1,
        "maximum": 6,
        "description": "Retrace each line this many times with a small offset to make it thicker (default 1)"
    })
}

fn declaration(name: ToolName, description: &str, props: Value, required: &[&str]) -> Value {
    json!({
        "name": name.as_str(),
        "description": description,
        "parameters": {
            "type": "object",
            "properties": common(props),
            "required": required,
            "additionalProperties": false
        }
    })
}

/// The declarations for every drawing tool, in a fixed order.
pub fn tool_declarations() -> Value {
    Value::Array(vec![
        declaration(
            ToolName::Segments,
            "Draw straight line segments.",
            json!({
                "segments": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "properties": { "start": point(), "end": point() },
                        "required": ["start", "end"],
                        "additionalProperties": false
                    }
                },
                "passes": passes()
            }),
            &["segments"],
        ),
        declaration(
            ToolName::Circles,
            "Draw circles given centre and radius.",
            json!({
                "circles": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "properties": {
                            "center": point(),
                            "radius": { "type": "number", "exclusiveMinimum": 0 }
                        },
                        "required": ["center", "radius"],
                        "additionalProperties": false
                    }
                },
                "passes": passes()
            }),
            &["circles"],
        ),
        declaration(
            ToolName::Splines,
            "Draw a smooth curve passing through the keypoints.",
            json!({ "keypoints": points(2, "Points the curve passes through, in order"), "passes": passes() }),
            &["keypoints"],
        ),
        declaration(
            ToolName::Path,
            "Draw a smooth path passing through the keypoints.",
            json!({ "keypoints": points(2, "Points the path passes through, in order"), "passes": passes() }),
            &["keypoints"],
        ),
        declaration(
            ToolName::Text,
            "Write text in a single-stroke font. The origin is the left end of the baseline.",
            json!({
                "text": { "type": "string", "minLength": 1 },
                "origin": point(),
                "height": { "type": "number", "exclusiveMinimum": 0, "description": "Capital letter height in pixels" }
            }),
            &["text", "origin", "height"],
        ),
        declaration(
            ToolName::Scribbles,
            "Fill a polygon with an organic scribble.",
            json!({
                "polygon": points(3, "Boundary vertices, closure implicit"),
                "density": {
                    "type": "number",
                    "exclusiveMinimum": 0,
                    "maximum": 100,
                    "description": "Scribble points per 1000 square pixels"
                }
            }),
            &["polygon", "density"],
        ),
        declaration(
            ToolName::Hatching,
            "Fill a polygon with parallel hatching lines, optionally cross-hatched.",
            json!({
                "polygon": points(3, "Boundary vertices, closure implicit"),
                "density": {
                    "type": "number",
                    "exclusiveMinimum": 0,
                    "maximum": 100,
                    "description": "Lines per 100 pixels"
                },
                "angle": { "type": "number", "description": "Line angle in degrees (default 45)" },
                "cross": { "type": "boolean", "description": "Add a second family at +90 degrees (default false)" }
            }),
            &["polygon", "density"],
        ),
        declaration(
            ToolName::ScribblySplines,
            "Draw a sketchy line that oscillates along a smooth curve through the keypoints.",
            json!({
                "keypoints": points(2, "Points of the central curve, in order"),
                "amplitude": { "type": "number", "minimum": 0, "description": "Oscillation amplitude in pixels (default 6)" },
                "wavelength": { "type": "number", "exclusiveMinimum": 0, "description": "Oscillation wavelength in pixels (default 14)" }
            }),
            &["keypoints"],
        ),
    ])
}
