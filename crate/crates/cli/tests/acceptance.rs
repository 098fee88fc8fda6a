//! Acceptance gate: every primary criterion at its stated tolerance, one
//! PASS/FAIL line each.
//!
//! cargo test -p codraw-cli --test acceptance

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use codraw::agent::{
    assemble_context, demo_vocabulary, dispatch_tool_call, render_system_instructions, replay, replay_revisions,
    ContextLibrary, InstructionParams, LibraryMode, Part, SessionTranscript, ToolCall,
};
use codraw::batch::Scenario;
use codraw::canvas::{export_svg, CanvasState};
use codraw::geometry::{point_in_polygon, point_polygon_boundary_distance, point_polyline_distance, Point};
use codraw::perception::{
    clahe, clip_ceiling, clip_histogram, solve_homography, tile_mapping, tile_mappings, warp, ClaheParams, GrayImage,
};
use codraw::tools::{draw_circles, draw_hatching, draw_scribbles, draw_splines, Density, Polygon, RandomSource};
use codraw::verify::verify;
use futures::StreamExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn segment(a: (f64, f64), b: (f64, f64)) -> ToolCall {
    ToolCall::new("draw-segments", json!({"segments": [{"start": [a.0, a.1], "end": [b.0, b.1]}]}))
}

// Constraint fidelity

fn constraint_fidelity() -> Outcome {
    let anchor = dispatch_tool_call(&segment((200.0, 450.0), (300.0, 450.0)), &CanvasState::default())
        .map_err(|e| e.to_string())?
        .canvas;
    let at_39 = dispatch_tool_call(&segment((339.0, 450.0), (439.0, 450.0)), &anchor);
    let at_41 = dispatch_tool_call(&segment((341.0, 450.0), (441.0, 450.0)), &anchor);
    ensure(at_39.is_err(), || "39 px gap accepted".into())?;
    ensure(at_41.is_ok(), || format!("41 px gap rejected: {:?}", at_41.err()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let (mut accepted, mut clipped) = (0, 0);
    for _ in 0..2000 {
        // Strokes up to 280 px tall scattered across and beyond the page.
        let (cx, cy) = (rng.random_range(-100.0..1300.0), rng.random_range(-100.0..1000.0));
        let pts: Vec<[f64; 2]> = (0..rng.random_range(2..10))
            .map(|_| [cx + rng.random_range(-140.0..140.0), cy + rng.random_range(-140.0..140.0)])
            .collect();
        let call = ToolCall::new("draw-path", json!({ "keypoints": pts }));
        let Ok(done) = dispatch_tool_call(&call, &CanvasState::default()) else { continue };
        accepted += 1;
        if pts.iter().any(|p| p[0] < 30.0 || p[0] > 1170.0 || p[1] < 30.0 || p[1] > 870.0) {
            clipped += 1;
        }
        for p in done.polylines.iter().flat_map(|l| l.points()) {
            // Margin rectangle written out from the page size and the 30 px margin.
            ensure((30.0 - 1e-9..=1170.0 + 1e-9).contains(&p.x) && (30.0 - 1e-9..=870.0 + 1e-9).contains(&p.y), || {
                format!("point {p:?} outside the margin")
            })?;
        }
    }
    ensure(clipped > 100, || format!("only {clipped} fuzzed strokes needed clipping"))?;
    Ok(format!("39 px rejected, 41 px accepted; {accepted} fuzzed strokes kept ({clipped} clipped) all within margin"))
}

// Hatching oracle

/// Hatch offsets as the tool documents them: `max(1, floor(extent/spacing))`
/// lines centred in the polygon's extent along the normal.
fn oracle_offsets(poly: &[Point], spacing: f64, angle_deg: f64) -> Vec<f64> {
    let a = angle_deg.to_radians();
    let normal = (-a.sin(), a.cos());
    let proj: Vec<f64> = poly.iter().map(|p| p.x * normal.0 + p.y * normal.1).collect();
    let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let n = (((hi - lo) / spacing).floor() as usize).max(1);
    let start = lo + ((hi - lo) - (n - 1) as f64 * spacing) / 2.0;
    (0..n).map(|k| start + k as f64 * spacing).collect()
}

/// Chords of a hatch line found by marching along it in 0.05 px steps and
/// bisecting each inside/outside change.
fn scanline_chords(poly: &[Point], angle_deg: f64, offset: f64) -> Vec<(Point, Point)> {
    let a = angle_deg.to_radians();
    let (dir, normal) = ((a.cos(), a.sin()), (-a.sin(), a.cos()));
    let at = |s: f64| Point::new(s * dir.0 + offset * normal.0, s * dir.1 + offset * normal.1);
    let inside = |s: f64| point_in_polygon(at(s), poly);
    let reach = poly.iter().map(|p| p.x.abs() + p.y.abs()).fold(0.0, f64::max) + 10.0;
    let refine = |mut lo: f64, mut hi: f64| {
        let lo_in = inside(lo);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) == lo_in {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let (mut out, mut s, mut was, mut start) = (Vec::new(), -reach, inside(-reach), None);
    while s < reach {
        let now = inside(s + 0.05);
        if now != was {
            let t = refine(s, s + 0.05);
            match (now, start.take()) {
                (true, _) => start = Some(t),
                (false, Some(s0)) => out.push((at(s0), at(t))),
                (false, None) => {}
            }
            was = now;
        }
        s += 0.05;
    }
    out
}

fn random_convex(rng: &mut ChaCha8Rng) -> Vec<Point> {
    let (cx, cy) = (rng.random_range(200.0..1000.0), rng.random_range(200.0..700.0));
    let (rx, ry) = (rng.random_range(40.0..160.0), rng.random_range(40.0..160.0));
    let angles = loop {
        let mut a: Vec<f64> = (0..rng.random_range(3..9)).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        a.sort_by(f64::total_cmp);
        a.dedup_by(|a, b| (*a - *b).abs() < 0.05);
        if a.len() >= 3 {
            break a;
        }
    };
    angles.iter().map(|a| Point::new(cx + rx * a.cos(), cy + ry * a.sin())).collect()
}

fn hatching_oracle() -> Outcome {
    let square = [Point::new(0.0, 0.0), Point::new(100.0, 0.0), Point::new(100.0, 100.0), Point::new(0.0, 100.0)];
    let poly = Polygon::new(square).map_err(|e| e.to_string())?;
    let d10 = Density::new(10.0).map_err(|e| e.to_string())?;
    let single = draw_hatching(&poly, d10, 0.0, false).map_err(|e| e.to_string())?;
    ensure((9..=11).contains(&single.len()), || format!("{} chords for density 10", single.len()))?;
    for c in &single {
        ensure((c.length() - 100.0).abs() <= 1e-6, || format!("chord length {}", c.length()))?;
    }
    let crossed = draw_hatching(&poly, d10, 0.0, true).map_err(|e| e.to_string())?;
    ensure(crossed.len().abs_diff(2 * single.len()) <= 1, || format!("cross gave {}", crossed.len()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut chords = 0;
    for i in 0..50 {
        let verts = random_convex(&mut rng);
        let poly = Polygon::new(verts.clone()).map_err(|e| e.to_string())?;
        let density = rng.random_range(2.0..12.0);
        let angle = rng.random_range(0.0..180.0);
        let cross = i % 2 == 0;
        let got = draw_hatching(&poly, Density::new(density).unwrap(), angle, cross).map_err(|e| e.to_string())?;
        let mut want = Vec::new();
        for a in if cross { vec![angle, angle + 90.0] } else { vec![angle] } {
            for o in oracle_offsets(&verts, 100.0 / density, a) {
                want.extend(scanline_chords(&verts, a, o).into_iter().filter(|(s, e)| s.distance(*e) >= 1.0));
            }
        }
        ensure(got.len() == want.len(), || format!("polygon {i}: {} chords, oracle {}", got.len(), want.len()))?;
        for (g, (s, e)) in got.iter().zip(&want) {
            let ends = [g.first(), g.last()];
            let ok = ends.iter().any(|p| p.distance(*s) < 1e-6) && ends.iter().any(|p| p.distance(*e) < 1e-6);
            ensure(ok, || format!("polygon {i}: chord {ends:?} vs oracle {s:?} {e:?}"))?;
        }
        chords += got.len();
    }
    Ok(format!(
        "square: {} chords of 100 px, {} crossed; 50 convex polygons agree with scanline oracle ({chords} chords)",
        single.len(),
        crossed.len()
    ))
}

// Scribble containment

fn random_star(rng: &mut ChaCha8Rng) -> Vec<Point> {
    let (cx, cy) = (rng.random_range(200.0..1000.0), rng.random_range(200.0..700.0));
    let n = rng.random_range(3..12);
    (0..n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            let r = rng.random_range(30.0..150.0);
            Point::new(cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}

fn scribble_containment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut points = 0usize;
    for i in 0..100 {
        let verts = if i % 2 == 0 { random_convex(&mut rng) } else { random_star(&mut rng) };
        let poly = Polygon::new(verts.clone()).map_err(|e| e.to_string())?;
        let density = Density::new(rng.random_range(0.2..3.0)).unwrap();
        let seed = rng.random::<u64>();
        let a = draw_scribbles(&poly, density, &RandomSource::new(seed)).map_err(|e| e.to_string())?;
        let b = draw_scribbles(&poly, density, &RandomSource::new(seed)).map_err(|e| e.to_string())?;
        let (ja, jb) = (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        ensure(ja == jb, || format!("polygon {i}: seed {seed} gave different bytes"))?;
        for p in a.iter().flat_map(|l| l.points()) {
            points += 1;
            let ok = point_in_polygon(*p, &verts) || point_polygon_boundary_distance(*p, &verts) <= 0.5;
            ensure(ok, || format!("polygon {i}: {p:?} outside"))?;
        }
    }
    Ok(format!("{points} points from 100 polygons inside within 0.5 px; reruns byte-identical"))
}

// Spline interpolation

fn spline_interpolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_key = 0.0f64;
    for _ in 0..500 {
        let keys: Vec<Point> = (0..rng.random_range(2..12))
            .map(|_| Point::new(rng.random_range(30.0..1170.0), rng.random_range(30.0..870.0)))
            .collect();
        let Ok(line) = draw_splines(&keys) else { continue };
        for k in &keys {
            worst_key = worst_key.max(line.points().iter().map(|p| p.distance(*k)).fold(f64::INFINITY, f64::min));
        }
    }
    ensure(worst_key <= 1e-9, || format!("keypoint off curve by {worst_key:e}"))?;

    let mut worst_line = 0.0f64;
    for _ in 0..500 {
        let o = Point::new(rng.random_range(100.0..1100.0), rng.random_range(100.0..800.0));
        let t = rng.random_range(0.0..PI);
        let d = (t.cos(), t.sin());
        let keys: Vec<Point> = (0..rng.random_range(2..10))
            .map(|_| {
                let s = rng.random_range(-300.0..300.0);
                Point::new(o.x + s * d.0, o.y + s * d.1)
            })
            .collect();
        let Ok(line) = draw_splines(&keys) else { continue };
        for p in line.points() {
            worst_line = worst_line.max(((p.x - o.x) * d.1 - (p.y - o.y) * d.0).abs());
        }
    }
    ensure(worst_line <= 1e-6, || format!("collinear input left the line by {worst_line:e}"))?;

    let mut worst_chord = 0.0f64;
    for _ in 0..200 {
        let r = rng.random_range(1.0..=400.0);
        let c = Point::new(600.0, 450.0);
        let line = &draw_circles(&[(c, r)]).map_err(|e| e.to_string())?[0];
        for k in 0..4000 {
            let a = 2.0 * PI * k as f64 / 4000.0;
            let p = Point::new(c.x + r * a.cos(), c.y + r * a.sin());
            worst_chord = worst_chord.max(point_polyline_distance(p, line.points()));
        }
    }
    ensure(worst_chord <= 0.25, || format!("circle chord error {worst_chord}"))?;
    Ok(format!(
        "keypoint residual {worst_key:.1e}, collinear residual {worst_line:.1e}, worst chord error {worst_chord:.4} px"
    ))
}

// Instruction template

fn instruction_template() -> Outcome {
    let text = render_system_instructions(&InstructionParams::default());
    for needle in ["1200 by 900", "stay a minimum of 30 pixels away from the edges"] {
        ensure(text.contains(needle), || format!("missing {needle:?}"))?;
    }
    let expected = 10.0 / (170.0 / 1200.0);
    let line = text.lines().find(|l| l.contains("less than")).ok_or("no minimum line clause")?;
    let value: f64 = line.split_whitespace().find_map(|w| w.parse().ok()).ok_or("no number in clause")?;
    ensure((value - 70.588).abs() <= 0.001 && (value - expected).abs() < 1e-9, || format!("minimum {value}"))?;
    let golden = std::fs::read_to_string(repo().join("crates/core/tests/golden/instructions.txt"))
        .map_err(|e| e.to_string())?;
    ensure(text == golden, || "rendered text differs from golden file".into())?;
    Ok(format!("min line {value}, golden file equal ({} bytes)", golden.len()))
}

// ICL assembly

fn icl_assembly() -> Outcome {
    let vocab = demo_vocabulary();
    ensure(vocab.len() == 24, || format!("{} entries", vocab.len()))?;
    let with_method = |msgs: &[codraw::agent::Message]| {
        msgs.iter()
            .zip(&vocab)
            .filter(|(m, e)| {
                let method = e.method.as_deref().unwrap_or("\u{0}");
                m.parts.iter().any(|p| matches!(p, Part::Text { text } if text == method))
            })
            .count()
    };
    let mut counts = Vec::new();
    for mode in LibraryMode::ALL {
        let msgs = assemble_context(&ContextLibrary::new(vocab.clone(), mode)).map_err(|e| e.to_string())?;
        counts.push((mode, msgs.len(), with_method(&msgs)));
    }
    let want = [(LibraryMode::None, 0, 0), (LibraryMode::ImagesOnly, 24, 0), (LibraryMode::ImagesAndMethods, 24, 24)];
    ensure(counts == want, || format!("{counts:?}"))?;
    Ok("none 0, images 24 (0 with methods), images+methods 24 (24 with methods)".into())
}

// Deterministic replay

fn deterministic_replay() -> Outcome {
    let mut notes = Vec::new();
    for name in ["hare_and_turtle", "three_circles"] {
        let scenario = Scenario::load(&repo().join("scenarios").join(name)).map_err(|e| e.to_string())?;
        let golden = std::fs::read_to_string(scenario.golden_svg_path()).map_err(|e| e.to_string())?;
        let transcript = SessionTranscript::from_json(
            &std::fs::read_to_string(scenario.transcript_path()).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let replayed = export_svg(&replay(&transcript).map_err(|e| e.to_string())?);
        ensure(replayed == golden, || format!("{name}: replayed SVG differs"))?;
        let rerun = scenario.run().map_err(|e| e.to_string())?;
        ensure(export_svg(rerun.session.canvas()) == golden, || format!("{name}: scripted rerun differs"))?;
        notes.push(format!("{name} {} elements", rerun.session.canvas().elements.len()));
    }
    let circles = Scenario::load(&repo().join("scenarios/three_circles")).map_err(|e| e.to_string())?;
    let canvas = circles.run().map_err(|e| e.to_string())?.session.canvas().clone();
    let report = verify(&canvas, "collinear e1 e2 e3 tol=5\nincreasing-radius e1 e2 e3\n").map_err(|e| e.to_string())?;
    ensure(report.passed(), || report.to_string())?;
    Ok(format!("{} byte-identical; collinear tol=5 and increasing-radius pass", notes.join(", ")))
}

// Perception

fn random_quad(rng: &mut ChaCha8Rng, span: f64) -> [Point; 4] {
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    loop {
        let q: [Point; 4] = std::array::from_fn(|_| Point::new(rng.random_range(-span..span), rng.random_range(-span..span)));
        let ok = (0..4).all(|skip| {
            let t: Vec<Point> = (0..4).filter(|&i| i != skip).map(|i| q[i]).collect();
            cross(t[0], t[1], t[2]).abs() > 0.01 * span * span
        });
        if ok {
            return q;
        }
    }
}

/// Anti-aliased checkerboard: each square edge ramps over `ramp` px.
fn soft_checkerboard(w: usize, h: usize, square: f64, ramp: f64) -> GrayImage {
    let axis = |v: f64| {
        let t = (v + 0.5) / square;
        let d = (t - t.round()).abs() * square;
        if (t.floor() as i64) % 2 == 0 { d } else { -d }
    };
    let profile = |d: f64| ((d / (ramp / 2.0)).clamp(-1.0, 1.0) * PI / 2.0).sin();
    GrayImage::from_fn(w, h, |x, y| (127.5 + 97.5 * profile(axis(x as f64)) * profile(axis(y as f64))).round() as u8)
}

fn round_trip_fraction(board: &GrayImage) -> Result<f64, String> {
    let (w, h) = (board.width(), board.height());
    let page = [Point::new(0.0, 0.0), Point::new(479.0, 0.0), Point::new(479.0, 359.0), Point::new(0.0, 359.0)];
    let photo = [Point::new(22.0, 14.0), Point::new(455.0, 31.0), Point::new(470.0, 349.0), Point::new(9.0, 338.0)];
    let hm = solve_homography(&page, &photo).map_err(|e| e.to_string())?;
    let there = warp(board, &hm, w, h).map_err(|e| e.to_string())?;
    let back = warp(&there, &hm.inverse().map_err(|e| e.to_string())?, w, h).map_err(|e| e.to_string())?;
    let (mut total, mut close) = (0usize, 0usize);
    for y in 10..h - 10 {
        for x in 10..w - 10 {
            total += 1;
            close += usize::from((back.get(x, y) as i32 - board.get(x, y) as i32).abs() <= 2);
        }
    }
    Ok(close as f64 / total as f64)
}

/// Unclipped equalization of one tile from scratch.
fn oracle_mapping(pixels: &[u8]) -> [u8; 256] {
    let mut hist = [0usize; 256];
    for &p in pixels {
        hist[p as usize] += 1;
    }
    if hist.iter().filter(|&&c| c > 0).count() <= 1 {
        return std::array::from_fn(|i| i as u8);
    }
    let mut cdf = 0;
    std::array::from_fn(|i| {
        cdf += hist[i];
        (255.0 * cdf as f64 / pixels.len() as f64).round() as u8
    })
}

/// Bilinear blend of per-tile oracle mappings between tile centres.
fn oracle_adaptive(img: &GrayImage, tc: usize, tr: usize) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let xb: Vec<usize> = (0..=tc).map(|i| i * w / tc).collect();
    let yb: Vec<usize> = (0..=tr).map(|j| j * h / tr).collect();
    let maps: Vec<Vec<[u8; 256]>> = (0..tr)
        .map(|r| {
            (0..tc)
                .map(|c| {
                    let px: Vec<u8> =
                        (yb[r]..yb[r + 1]).flat_map(|y| (xb[c]..xb[c + 1]).map(move |x| (x, y))).map(|(x, y)| img.get(x, y)).collect();
                    oracle_mapping(&px)
                })
                .collect()
        })
        .collect();
    let centre = |b: &[usize], i: usize| (b[i] + b[i + 1]) as f64 / 2.0 - 0.5;
    let locate = |b: &[usize], n: usize, v: f64| -> (usize, usize, f64) {
        if v <= centre(b, 0) {
            return (0, 0, 0.0);
        }
        if v >= centre(b, n - 1) {
            return (n - 1, n - 1, 0.0);
        }
        let i = (0..n - 1).find(|&i| v < centre(b, i + 1)).unwrap();
        (i, i + 1, (v - centre(b, i)) / (centre(b, i + 1) - centre(b, i)))
    };
    GrayImage::from_fn(w, h, |x, y| {
        let (c0, c1, fx) = locate(&xb, tc, x as f64);
        let (r0, r1, fy) = locate(&yb, tr, y as f64);
        let v = img.get(x, y) as usize;
        let m = |r: usize, c: usize| maps[r][c][v] as f64;
        let top = m(r0, c0) * (1.0 - fx) + m(r0, c1) * fx;
        let bottom = m(r1, c0) * (1.0 - fx) + m(r1, c1) * fx;
        (top * (1.0 - fy) + bottom * fy).round() as u8
    })
}

fn noise(w: usize, h: usize, rng: &mut ChaCha8Rng, lo: u8, hi: u8) -> GrayImage {
    GrayImage::from_raw(w, h, (0..w * h).map(|_| rng.random_range(lo..=hi)).collect()).unwrap()
}

fn perception() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (src, dst) = (random_quad(&mut rng, 1000.0), random_quad(&mut rng, 1000.0));
        let h = solve_homography(&src, &dst).map_err(|e| e.to_string())?;
        for (s, d) in src.iter().zip(&dst) {
            worst = worst.max(h.apply(*s).distance(*d));
        }
    }
    ensure(worst <= 1e-6, || format!("homography residual {worst:e}"))?;

    let fraction = round_trip_fraction(&soft_checkerboard(480, 360, 48.0, 16.0))?;
    ensure(fraction >= 0.99, || format!("checkerboard round trip {fraction:.4}"))?;

    let mut monotone = 0;
    for _ in 0..200 {
        let spread: u8 = rng.random_range(1..=255);
        let base: u8 = rng.random_range(0..=255 - spread);
        let img = noise(40, 32, &mut rng, base, base + spread);
        let clip = rng.random_range(1.0..8.0);
        let grid = tile_mappings(&img, ClaheParams { tiles: (4, 4), clip_limit: clip }).map_err(|e| e.to_string())?;
        for r in 0..4 {
            for c in 0..4 {
                ensure(grid.mapping(c, r).windows(2).all(|w| w[0] <= w[1]), || "non-monotone tile mapping".into())?;
                monotone += 1;
            }
        }
        let mut hist = [0.0f64; 256];
        for &p in img.pixels() {
            hist[p as usize] += 1.0;
        }
        let n = img.pixels().len();
        let ceiling = clip_ceiling(clip, n);
        ensure(ceiling >= clip * n as f64 / 256.0 - 1e-9, || "ceiling below clip·N/256".into())?;
        let (clipped, excess) = clip_histogram(&hist, ceiling);
        ensure(clipped.iter().all(|&b| b <= ceiling + 1e-9), || "bin above ceiling".into())?;
        ensure((clipped.iter().sum::<f64>() + excess - n as f64).abs() < 1e-6, || "clipping lost mass".into())?;
        ensure(tile_mapping(&hist, clip).windows(2).all(|w| w[0] <= w[1]), || "non-monotone mapping".into())?;
    }

    let mut worst_px = 0;
    for _ in 0..50 {
        let lo: u8 = rng.random_range(0..200);
        let img = noise(16, 16, &mut rng, lo, lo + 55);
        let ours = clahe(&img, ClaheParams { tiles: (2, 2), clip_limit: f64::INFINITY }).map_err(|e| e.to_string())?;
        let oracle = oracle_adaptive(&img, 2, 2);
        let d = ours.pixels().iter().zip(oracle.pixels()).map(|(a, b)| (*a as i32 - *b as i32).abs()).max().unwrap();
        worst_px = worst_px.max(d);
    }
    ensure(worst_px <= 1, || format!("unclipped CLAHE differs from oracle by {worst_px}"))?;
    Ok(format!(
        "homography residual {worst:.1e} px; checkerboard {:.2}% within ±2; {monotone} monotone tile mappings; \
         clip→∞ within {worst_px} of oracle on 16×16",
        fraction * 100.0
    ))
}

// Service contract

struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    async fn post(&self, path: &str, body: Value) -> (u16, Value) {
        match self.http.post(format!("{}{path}", self.base)).json(&body).send().await {
            Ok(r) => (r.status().as_u16(), r.json().await.unwrap_or(Value::Null)),
            Err(e) => (0, json!(e.to_string())),
        }
    }

    async fn get(&self, path: &str) -> Result<String, String> {
        let r = self.http.get(format!("{}{path}", self.base)).send().await.map_err(|e| e.to_string())?;
        r.text().await.map_err(|e| e.to_string())
    }
}

fn turn_grammar(events: &[Value]) -> Result<usize, String> {
    let (mut open, mut turns) = (false, 0);
    for (i, e) in events.iter().enumerate() {
        ensure(e["seq"] == i as u64, || format!("event {i} has seq {}", e["seq"]))?;
        match (e["type"].as_str().unwrap_or(""), open) {
            ("turn_started", false) => open = true,
            ("agent_text" | "tool_call" | "error", true) => {}
            ("turn_ended", true) => {
                open = false;
                turns += 1;
            }
            ("strokes_added" | "signal", false) => {}
            (t, _) => return Err(format!("{t} at {i} breaks turn order")),
        }
    }
    ensure(!open, || "unterminated turn".into())?;
    Ok(turns)
}

async fn service_contract_async() -> Outcome {
    let data = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = codraw_service::ServiceConfig { data_dir: Some(data.path().to_path_buf()), ..Default::default() };
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.map_err(|e| e.to_string())?;
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(codraw_service::serve_on(listener, codraw_service::AppState::new(config)));
    let client = std::sync::Arc::new(Client { base: base.clone(), http: reqwest::Client::new() });

    let steps: Vec<Value> = (0..60)
        .map(|i| {
            if i % 7 == 6 {
                json!({"error": "timeout"})
            } else {
                let (x, y) = (100 + (i * 173) % 1000, 100 + (i * 97) % 700);
                json!({"text": format!("step {i}"), "tool_calls": [
                    {"name": "draw-circles", "args": {"circles": [{"center": [x, y], "radius": 40}]}}]})
            }
        })
        .collect();
    let backend = json!({"kind": "scripted", "steps": steps, "latency_ms": 5});

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut sessions, mut turns_total, mut conflicts) = (0, 0, 0);
    for _round in 0..10 {
        let (status, v) = client.post("/sessions", json!({"backend": backend, "seed": rng.random::<u32>()})).await;
        ensure(status == 201, || format!("create: {status} {v}"))?;
        let id = v["id"].as_str().unwrap().to_string();
        sessions += 1;
        let url = format!("{}/sessions/{id}/events", base.replace("http", "ws"));
        let (mut ws, _) = tokio_tungstenite::connect_async(url).await.map_err(|e| e.to_string())?;

        let mut tasks = Vec::new();
        for _ in 0..rng.random_range(2..7) {
            let ops: Vec<(u8, f64, f64)> = (0..rng.random_range(1..6))
                .map(|_| (rng.random_range(0..4), rng.random_range(40.0..1100.0), rng.random_range(40.0..800.0)))
                .collect();
            let (client, id) = (client.clone(), id.clone());
            tasks.push(tokio::spawn(async move {
                let mut seen = Vec::new();
                for (op, x, y) in ops {
                    let (path, body) = match op {
                        0 | 1 => ("message", json!({"attach_image": false})),
                        2 => ("strokes", json!({"strokes": [[[x, y], [x + 30.0, y + 10.0]]]})),
                        _ => ("signal", json!({"kind": "look_at_drawing"})),
                    };
                    seen.push((path, client.post(&format!("/sessions/{id}/{path}"), body).await.0));
                }
                seen
            }));
        }
        let mut accepted_messages = 0;
        for t in tasks {
            for (path, status) in t.await.map_err(|e| e.to_string())? {
                ensure([200, 409, 502].contains(&status), || format!("{path}: status {status}"))?;
                conflicts += usize::from(status == 409);
                accepted_messages += usize::from(path == "message" && status != 409);
            }
        }
        let mut events = Vec::new();
        while let Ok(Some(Ok(msg))) = tokio::time::timeout(Duration::from_millis(300), ws.next()).await {
            if let tokio_tungstenite::tungstenite::Message::Text(t) = msg {
                events.push(serde_json::from_str::<Value>(&t).map_err(|e| e.to_string())?);
            }
        }
        let turns = turn_grammar(&events).map_err(|e| format!("session {id}: {e}"))?;
        ensure(turns == accepted_messages, || format!("{turns} turns for {accepted_messages} accepted messages"))?;
        turns_total += turns;

        let dir = data.path().join(&id);
        let text = std::fs::read_to_string(dir.join("transcript.json")).map_err(|e| e.to_string())?;
        let transcript = SessionTranscript::from_json(&text).map_err(|e| e.to_string())?;
        for (rev, canvas) in replay_revisions(&transcript).map_err(|e| e.to_string())?.iter().enumerate() {
            let stored = std::fs::read_to_string(dir.join("snapshots").join(codraw_service::snapshot_name(rev as u64)))
                .map_err(|e| e.to_string())?;
            ensure(export_svg(canvas) == stored, || format!("session {id}: revision {rev} differs from snapshot"))?;
            let served = client.get(&format!("/sessions/{id}/svg?revision={rev}")).await?;
            ensure(served == stored, || format!("session {id}: served revision {rev} differs"))?;
        }
    }

    // A message posted while a slow turn runs is refused.
    let slow = json!({"kind": "scripted", "latency_ms": 400, "steps": [
        {"text": "slow", "tool_calls": []}, {"text": "next", "tool_calls": []}]});
    let (_, v) = client.post("/sessions", json!({"backend": slow})).await;
    let path = format!("/sessions/{}/message", v["id"].as_str().unwrap_or("?"));
    let first = client.post(&path, json!({}));
    let second = async {
        tokio::time::sleep(Duration::from_millis(100)).await;
        client.post(&path, json!({})).await
    };
    let ((s1, _), (s2, v2)) = tokio::join!(first, second);
    ensure(s1 == 200 && s2 == 409 && v2["error"] == "turn_in_progress", || format!("{s1} then {s2} {v2}"))?;

    Ok(format!(
        "{sessions} fuzzed sessions, {turns_total} turns in contract order, {conflicts} refused with 409; \
         TurnInProgress enforced; every snapshot replays byte-identical"
    ))
}

fn service_contract() -> Outcome {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| e.to_string())?;
    rt.block_on(service_contract_async())
}

fn main() {
    let criteria: [(&str, Option<f64>, fn() -> Outcome); 9] = [
        ("constraint fidelity", Some(1.0), constraint_fidelity),
        ("hatching oracle", Some(5.0), hatching_oracle),
        ("scribble containment", Some(10.0), scribble_containment),
        ("spline interpolation", None, spline_interpolation),
        ("instruction template", None, instruction_template),
        ("ICL assembly", None, icl_assembly),
        ("deterministic replay", None, deterministic_replay),
        ("perception", Some(10.0), perception),
        ("service contract", None, service_contract),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if secs >= l => Err(format!("took {secs:.2} s, limit {l} s")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.2} s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.2} s): {why}");
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("{} of 9 criteria passed in {total:.1} s", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
