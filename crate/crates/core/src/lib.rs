//! Runtime for a collaborative drawing agent.
//!
//! A language model proposes drawing tool calls; [`agent`] validates and
//! executes them on an immutable [`canvas::CanvasState`] built from
//! [`tools`] output, and [`perception`] turns photographs of the page back
//! into images for the model.

pub mod agent;
pub mod batch;
pub mod canvas;
pub mod geometry;
pub mod perception;
pub mod tools;
pub mod verify;
