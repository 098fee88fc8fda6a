//! The simulated drawing surface.
//!
//! A [`CanvasState`] is an immutable value: every mutation returns a new
//! state with `revision + 1`, so older revisions stay valid for readers.

mod export;

pub use export::{export_pen_program, export_svg, fmt_coord};

use serde::{Deserialize, Serialize};

use crate::geometry::{clip_polyline, BBox, Polyline};

/// Physical constraints the agent's marks must respect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub width: f64,
    pub height: f64,
    pub edge_margin: f64,
    pub element_buffer: f64,
    pub max_element_height: f64,
    pub min_line_len_px: f64,
    pub min_circle_diam_px: f64,
    pub min_text_height_px: f64,
}

impl ConstraintSet {
    pub const DEFAULT_WIDTH: f64 = 1200.0;
    pub const DEFAULT_HEIGHT: f64 = 900.0;
    pub const EDGE_MARGIN: f64 = 30.0;
    pub const ELEMENT_BUFFER: f64 = 40.0;

    /// Builds the constraint set for a drawing area of `width`×`height` px,
    /// where one pixel covers `mm_per_px` millimetres of paper. Every minimum
    /// size is 10 mm expressed in pixels.
    pub fn new(width: f64, height: f64, mm_per_px: f64) -> Self {
        let min_px = 10.0 / mm_per_px;
        Self {
            width,
            height,
            edge_margin: Self::EDGE_MARGIN,
            element_buffer: Self::ELEMENT_BUFFER,
            max_element_height: (height / 3.0).floor(),
            min_line_len_px: min_px,
            min_circle_diam_px: min_px,
            min_text_height_px: min_px,
        }
    }

    /// Rectangle the agent may draw in.
    pub fn margin_rect(&self) -> BBox {
        BBox::new(
            self.edge_margin,
            self.edge_margin,
            self.width - self.edge_margin,
            self.height - self.edge_margin,
        )
    }

    pub fn page_rect(&self) -> BBox {
        BBox::new(0.0, 0.0, self.width, self.height)
    }
}

impl Default for ConstraintSet {
    fn default() -> Self {
        Self::new(Self::DEFAULT_WIDTH, Self::DEFAULT_HEIGHT, 170.0 / 1200.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Author {
    Agent,
    Human,
}

/// A group of strokes drawn together; the unit the agent places and spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementDoc")]
pub struct Element {
    pub id: String,
    pub author: Author,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    strokes: Vec<Polyline>,
    #[serde(skip)]
    bbox: BBox,
}

#[derive(Deserialize)]
struct ElementDoc {
    id: String,
    author: Author,
    #[serde(default)]
    label: Option<String>,
    strokes: Vec<Polyline>,
}

impl TryFrom<ElementDoc> for Element {
    type Error = CanvasError;

    fn try_from(doc: ElementDoc) -> Result<Self, Self::Error> {
        Element::new(doc.id, doc.author, doc.strokes, doc.label)
    }
}

impl Element {
    pub fn new(
        id: impl Into<String>,
        author: Author,
        strokes: Vec<Polyline>,
        label: Option<String>,
    ) -> Result<Self, CanvasError> {
        let bbox = strokes
            .iter()
            .map(Polyline::bbox)
            .reduce(BBox::union)
            .ok_or(CanvasError::EmptyElement)?;
        Ok(Self { id: id.into(), author, label, strokes, bbox })
    }

    pub fn strokes(&self) -> &[Polyline] {
        &self.strokes
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn point_count(&self) -> usize {
        self.strokes.iter().map(|s| s.points().len()).sum()
    }
}

/// Minimum bbox-to-bbox distance between two elements; zero when the boxes
/// overlap or touch.
pub fn min_element_distance(a: &Element, b: &Element) -> f64 {
    a.bbox.distance(&b.bbox)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EdgeMargin { bbox: BBox, margin: f64 },
    ElementBuffer { other: String, distance: f64, required: f64 },
    HeightCap { height: f64, cap: f64 },
    LineTooShort { length: f64, min: f64 },
    CircleTooSmall { diameter: f64, min: f64 },
    TextTooSmall { height: f64, min: f64 },
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self {
            Violation::EdgeMargin { .. } => ViolationKind::EdgeMargin,
            Violation::ElementBuffer { .. } => ViolationKind::ElementBuffer,
            Violation::HeightCap { .. } => ViolationKind::HeightCap,
            Violation::LineTooShort { .. } | Violation::CircleTooSmall { .. } | Violation::TextTooSmall { .. } => {
                ViolationKind::MinimumSize
            }
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::EdgeMargin { margin, .. } => {
                write!(f, "element extends into the {margin} px edge margin")
            }
            Violation::ElementBuffer { other, distance, required } => write!(
                f,
                "element is {distance:.1} px from {other}; keep at least {required} px between elements"
            ),
            Violation::HeightCap { height, cap } => {
                write!(f, "element is {height:.1} px high; the cap is {cap} px")
            }
            Violation::LineTooShort { length, min } => {
                write!(f, "line is {length:.1} px long; lines must be at least {min:.3} px")
            }
            Violation::CircleTooSmall { diameter, min } => {
                write!(f, "circle diameter is {diameter:.1} px; circles must be at least {min:.3} px across")
            }
            Violation::TextTooSmall { height, min } => {
                write!(f, "text is {height:.1} px high; text must be at least {min:.3} px high")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    EdgeMargin,
    ElementBuffer,
    HeightCap,
    MinimumSize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind() == kind)
    }

    pub fn without(mut self, kind: ViolationKind) -> Self {
        self.violations.retain(|v| v.kind() != kind);
        self
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementPolicy {
    Reject,
    #[default]
    ClipThenAccept,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CanvasError {
    #[error("element has no strokes")]
    EmptyElement,
    #[error("element rejected: {0}")]
    RejectedByConstraint(ValidationReport),
    #[error("element lies entirely outside the drawable area")]
    ClippedAway,
}

/// A recorded canvas mutation. Replaying a log of these from an empty canvas
/// reproduces the final state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Mutation {
    AddElement { element: Element },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanvasState {
    pub constraints: ConstraintSet,
    pub elements: Vec<Element>,
    pub revision: u64,
}

impl Default for CanvasState {
    fn default() -> Self {
        Self::new(ConstraintSet::default())
    }
}

impl CanvasState {
    pub fn new(constraints: ConstraintSet) -> Self {
        Self { constraints, elements: Vec::new(), revision: 0 }
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn next_element_id(&self) -> String {
        format!("e{}", self.elements.len() + 1)
    }

    pub fn polylines(&self) -> impl Iterator<Item = &Polyline> {
        self.elements.iter().flat_map(|e| e.strokes.iter())
    }

    /// Checks `candidate` against the constraint set. Human-authored
    /// candidates are only held to the page bounds.
    pub fn validate_placement(&self, candidate: &Element, exempt: Option<&str>) -> ValidationReport {
        let c = &self.constraints;
        let mut violations = Vec::new();
        let bbox = candidate.bbox();
        let allowed = match candidate.author {
            Author::Agent => c.margin_rect(),
            Author::Human => c.page_rect(),
        };
        if !allowed.contains_box(&bbox) {
            let margin = if candidate.author == Author::Agent { c.edge_margin } else { 0.0 };
            violations.push(Violation::EdgeMargin { bbox, margin });
        }
        if candidate.author == Author::Agent {
            for other in &self.elements {
                if Some(other.id.as_str()) == exempt || other.id == candidate.id {
                    continue;
                }
                let distance = min_element_distance(candidate, other);
                if distance < c.element_buffer {
                    violations.push(Violation::ElementBuffer {
                        other: other.id.clone(),
                        distance,
                        required: c.element_buffer,
                    });
                }
            }
            if bbox.height() > c.max_element_height {
                violations.push(Violation::HeightCap { height: bbox.height(), cap: c.max_element_height });
            }
        }
        ValidationReport { violations }
    }

    /// Adds an element built from `strokes`, returning the new state.
    ///
    /// Under [`PlacementPolicy::Reject`] any violation is an error. Under
    /// [`PlacementPolicy::ClipThenAccept`] strokes are clipped to the
    /// drawable rectangle (the margin rectangle for the agent, the page for
    /// a human) and accepted.
    pub fn add_element(
        &self,
        author: Author,
        strokes: Vec<Polyline>,
        label: Option<String>,
        policy: PlacementPolicy,
        exempt: Option<&str>,
    ) -> Result<CanvasState, CanvasError> {
        let id = self.next_element_id();
        let candidate = Element::new(id.clone(), author, strokes, label.clone())?;
        let element = match policy {
            PlacementPolicy::Reject => {
                let report = self.validate_placement(&candidate, exempt);
                if !report.is_ok() {
                    return Err(CanvasError::RejectedByConstraint(report));
                }
                candidate
            }
            PlacementPolicy::ClipThenAccept => {
                let rect = match author {
                    Author::Agent => self.constraints.margin_rect(),
                    Author::Human => self.constraints.page_rect(),
                };
                let clipped: Vec<Polyline> =
                    candidate.strokes.iter().flat_map(|s| clip_polyline(s, &rect)).collect();
                if clipped.is_empty() {
                    return Err(CanvasError::ClippedAway);
                }
                Element::new(id, author, clipped, label)?
            }
        };
        Ok(self.apply(&Mutation::AddElement { element }))
    }

    pub fn apply(&self, mutation: &Mutation) -> CanvasState {
        let mut next = self.clone();
        match mutation {
            Mutation::AddElement { element } => next.elements.push(element.clone()),
        }
        next.revision += 1;
        next
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("canvas serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
