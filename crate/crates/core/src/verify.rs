//! Geometric assertions over a finished canvas.
//!
//! Scripts are line oriented; `#` starts a comment. Element lists accept
//! single ids and inclusive ranges such as `e1..e3`.
//!
//! ```text
//! circle e1 tol=2            # element is close to a circle (RMS radial error)
//! collinear e1 e2 e3 tol=5   # fitted centres lie on one line
//! increasing-radius e1 e2 e3 # fitted radii strictly increase
//! contains e4 e1..e3         # convex hull of e4 encloses every listed element
//! left-of e1 e2              # bbox of e1 ends before bbox of e2 starts
//! right-of e2 e1
//! ```

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::canvas::{CanvasState, Element};
use crate::geometry::{convex_hull, hull_contains, Point};

pub const DEFAULT_COLLINEAR_TOL: f64 = 5.0;
pub const DEFAULT_CIRCLE_TOL: f64 = 2.0;
const CONTAINS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("line {line}: unknown assertion {name:?}")]
    UnknownAssertion { line: usize, name: String },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Assertion {
    Circle { element: String, tol: f64 },
    Collinear { elements: Vec<String>, tol: f64 },
    IncreasingRadius { elements: Vec<String> },
    Contains { outer: String, inner: Vec<String> },
    LeftOf { a: String, b: String },
    RightOf { a: String, b: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssertionResult {
    pub line: usize,
    pub text: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub results: Vec<AssertionResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in &self.results {
            writeln!(f, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.text, r.detail)?;
        }
        Ok(())
    }
}

/// Least-squares circle through `points` (algebraic fit): returns centre and
/// radius, or `None` when the points are collinear or too few.
pub fn fit_circle(points: &[Point]) -> Option<(Point, f64)> {
    if points.len() < 3 {
        return None;
    }
    // Centre the data for conditioning.
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let my = points.iter().map(|p| p.y).sum::<f64>() / n;
    // Solve x² + y² + D x + E y + F = 0 in the least-squares sense.
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for p in points {
        let (x, y) = (p.x - mx, p.y - my);
        let row = Vector3::new(x, y, 1.0);
        ata += row * row.transpose();
        atb += row * -(x * x + y * y);
    }
    let sol = ata.lu().solve(&atb)?;
    let (cx, cy) = (-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = cx * cx + cy * cy - sol[2];
    if !(r2 > 0.0) || !r2.is_finite() {
        return None;
    }
    Some((Point::new(cx + mx, cy + my), r2.sqrt()))
}

fn element_points(e: &Element) -> Vec<Point> {
    e.strokes().iter().flat_map(|s| s.points().iter().copied()).collect()
}

fn parse_ids(tokens: &[&str], line: usize) -> Result<Vec<String>, VerifyError> {
    let mut ids = Vec::new();
    for t in tokens {
        if let Some((a, b)) = t.split_once("..") {
            let num = |s: &str| {
                s.strip_prefix('e').and_then(|n| n.parse::<usize>().ok()).ok_or_else(|| VerifyError::Syntax {
                    line,
                    reason: format!("bad element range {t:?}"),
                })
            };
            let (lo, hi) = (num(a)?, num(b)?);
            if lo > hi {
                return Err(VerifyError::Syntax { line, reason: format!("empty element range {t:?}") });
            }
            ids.extend((lo..=hi).map(|i| format!("e{i}")));
        } else {
            ids.push(t.to_string());
        }
    }
    Ok(ids)
}

/// Parses an assertion script. Returns each assertion with its line number.
pub fn parse_assertions(script: &str) -> Result<Vec<(usize, String, Assertion)>, VerifyError> {
    let mut out = Vec::new();
    for (i, raw) in script.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let mut tol = None;
        let mut words = Vec::new();
        for tok in text.split_whitespace() {
            if let Some(v) = tok.strip_prefix("tol=") {
                let v: f64 = v.parse().map_err(|_| VerifyError::Syntax { line, reason: format!("bad tolerance {v:?}") })?;
                tol = Some(v);
            } else {
                words.push(tok);
            }
        }
        let name = words[0];
        let ids = parse_ids(&words[1..], line)?;
        let need = |n: usize| {
            if ids.len() < n {
                Err(VerifyError::Syntax { line, reason: format!("{name} needs at least {n} element(s)") })
            } else {
                Ok(())
            }
        };
        let exactly = |n: usize| {
            if ids.len() != n {
                Err(VerifyError::Syntax { line, reason: format!("{name} takes exactly {n} element(s)") })
            } else {
                Ok(())
            }
        };
        let assertion = match name {
            "circle" => {
                exactly(1)?;
                Assertion::Circle { element: ids[0].clone(), tol: tol.unwrap_or(DEFAULT_CIRCLE_TOL) }
            }
            "collinear" => {
                need(3)?;
                Assertion::Collinear { elements: ids, tol: tol.unwrap_or(DEFAULT_COLLINEAR_TOL) }
            }
            "increasing-radius" => {
                need(2)?;
                Assertion::IncreasingRadius { elements: ids }
            }
            "contains" => {
                need(2)?;
                Assertion::Contains { outer: ids[0].clone(), inner: ids[1..].to_vec() }
            }
            "left-of" => {
                exactly(2)?;
                Assertion::LeftOf { a: ids[0].clone(), b: ids[1].clone() }
            }
            "right-of" => {
                exactly(2)?;
                Assertion::RightOf { a: ids[0].clone(), b: ids[1].clone() }
            }
            other => return Err(VerifyError::UnknownAssertion { line, name: other.to_string() }),
        };
        out.push((line, text.to_string(), assertion));
    }
    Ok(out)
}

/// Evaluates one assertion: `Ok(detail)` on pass, `Err(detail)` on failure.
pub fn evaluate(canvas: &CanvasState, assertion: &Assertion) -> Result<String, String> {
    if canvas.is_empty() {
        return Err("EmptyCanvas: the canvas has no elements".into());
    }
    let get = |id: &str| canvas.element(id).ok_or_else(|| format!("no element {id}"));
    let fit = |id: &str| -> Result<(Point, f64), String> {
        let e = get(id)?;
        fit_circle(&element_points(e)).ok_or_else(|| format!("{id} cannot be fitted by a circle"))
    };
    match assertion {
        Assertion::Circle { element, tol } => {
            let e = get(element)?;
            let pts = element_points(e);
            let (c, r) = fit(element)?;
            let rms = (pts.iter().map(|p| (p.distance(c) - r).powi(2)).sum::<f64>() / pts.len() as f64).sqrt();
            let detail = format!("radius {r:.2}, rms error {rms:.3}");
            if rms <= *tol {
                Ok(detail)
            } else {
                Err(detail)
            }
        }
        Assertion::Collinear { elements, tol } => {
            let centers: Vec<Point> = elements.iter().map(|id| fit(id).map(|f| f.0)).collect::<Result<_, _>>()?;
            let dev = max_line_deviation(&centers);
            let detail = format!("centres deviate {dev:.3} px from their best-fit line (tol {tol})");
            if dev <= *tol {
                Ok(detail)
            } else {
                Err(detail)
            }
        }
        Assertion::IncreasingRadius { elements } => {
            let radii: Vec<f64> = elements.iter().map(|id| fit(id).map(|f| f.1)).collect::<Result<_, _>>()?;
            let detail =
                format!("radii {}", radii.iter().map(|r| format!("{r:.1}")).collect::<Vec<_>>().join(" < "));
            if radii.windows(2).all(|w| w[0] < w[1]) {
                Ok(detail)
            } else {
                Err(detail.replace(" < ", ", "))
            }
        }
        Assertion::Contains { outer, inner } => {
            let hull = convex_hull(&element_points(get(outer)?));
            let mut outside = Vec::new();
            for id in inner {
                let e = get(id)?;
                if !element_points(e).into_iter().all(|p| hull_contains(&hull, p, CONTAINS_TOL)) {
                    outside.push(id.as_str());
                }
            }
            if outside.is_empty() {
                Ok(format!("{outer} encloses {}", inner.join(", ")))
            } else {
                Err(format!("{outer} does not enclose {}", outside.join(", ")))
            }
        }
        Assertion::LeftOf { a, b } | Assertion::RightOf { a, b } => {
            let (l, r) = if matches!(assertion, Assertion::LeftOf { .. }) { (a, b) } else { (b, a) };
            let (bl, br) = (get(l)?.bbox(), get(r)?.bbox());
            let gap = br.min_x - bl.max_x;
            let detail = format!("{l} ends at x={:.1}, {r} starts at x={:.1}", bl.max_x, br.min_x);
            if gap >= 0.0 {
                Ok(detail)
            } else {
                Err(detail)
            }
        }
    }
}

/// Largest perpendicular distance of `pts` from their total-least-squares
/// line.
fn max_line_deviation(pts: &[Point]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in pts {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Direction of the principal axis of the scatter matrix.
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (nx, ny) = (-theta.sin(), theta.cos());
    pts.iter().map(|p| ((p.x - mx) * nx + (p.y - my) * ny).abs()).fold(0.0, f64::max)
}

/// Parses and evaluates `script` against `canvas`.
pub fn verify(canvas: &CanvasState, script: &str) -> Result<VerifyReport, VerifyError> {
    let results = parse_assertions(script)?
        .into_iter()
        .map(|(line, text, a)| {
            let (passed, detail) = match evaluate(canvas, &a) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            AssertionResult { line, text, passed, detail }
        })
        .collect();
    Ok(VerifyReport { results })
}
