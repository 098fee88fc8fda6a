//! Photographs a rendered drawing at an angle, then rectifies and
//! contrast-equalizes it back to the canvas frame.
//!
//! cargo run -p codraw --example perception_rectify [OUT_DIR]

use codraw::geometry::Point;
use codraw::perception::{rectify, render_canvas, solve_homography, warp, ClaheParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("codraw-perception"));
    std::fs::create_dir_all(&out)?;
    let transcript = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/hare_and_turtle/transcript.json"))?;
    let canvas = codraw::agent::replay(&codraw::agent::SessionTranscript::from_json(&transcript)?)?;
    let page = render_canvas(&canvas);
    let (w, h) = (page.width(), page.height());

    // Where the page corners land in a tilted, dim photograph.
    let corners = [Point::new(90.0, 40.0), Point::new(1130.0, 95.0), Point::new(1170.0, 860.0), Point::new(30.0, 800.0)];
    let frame = [Point::new(0.0, 0.0), Point::new((w - 1) as f64, 0.0), Point::new((w - 1) as f64, (h - 1) as f64), Point::new(0.0, (h - 1) as f64)];
    let mut photo = warp(&page, &solve_homography(&frame, &corners)?, w, h)?;
    for y in 0..h {
        for x in 0..w {
            let v = photo.get(x, y) as f64;
            photo.set(x, y, (70.0 + v * 0.35 + 20.0 * (x as f64 / w as f64)) as u8);
        }
    }
    let flat = rectify(&photo, &corners, w, h, ClaheParams::default())?;

    std::fs::write(out.join("page.png"), page.to_png())?;
    std::fs::write(out.join("photo.png"), photo.to_png())?;
    std::fs::write(out.join("rectified.png"), flat.to_png())?;
    let agree = (0..h).step_by(3).flat_map(|y| (0..w).step_by(3).map(move |x| (x, y)))
        .filter(|&(x, y)| page.get(x, y) < 128)
        .filter(|&(x, y)| flat.get(x, y) < 128)
        .count();
    let ink = (0..h).step_by(3).flat_map(|y| (0..w).step_by(3).map(move |x| (x, y))).filter(|&(x, y)| page.get(x, y) < 128).count();
    println!("photo range {:?}, rectified range {:?}", photo.min_max(), flat.min_max());
    println!("{agree} of {ink} sampled ink pixels are dark again after rectification");
    println!("wrote {}", out.display());
    Ok(())
}
