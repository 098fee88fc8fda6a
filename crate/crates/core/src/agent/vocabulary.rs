//! A built-in vocabulary of rough sketches with drawing methods, used when no
//! hand-drawn library is supplied.

use super::context::VocabularyEntry;
use super::message::ImageData;
use crate::geometry::{Point, Polyline};
use crate::perception::render_polylines;
use crate::tools::{draw_circles, draw_splines};

/// Side of the square sketch images in pixels.
pub const SKETCH_SIZE: usize = 240;

#[derive(Default)]
struct Sketch {
    lines: Vec<Polyline>,
}

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

impl Sketch {
    fn line(mut self, pts: &[(f64, f64)]) -> Self {
        self.lines.push(Polyline::new(pts.iter().map(|&(x, y)| p(x, y))).expect("sketch line"));
        self
    }

    fn closed(self, pts: &[(f64, f64)]) -> Self {
        let mut v = pts.to_vec();
        v.push(pts[0]);
        self.line(&v)
    }

    fn circle(mut self, x: f64, y: f64, r: f64) -> Self {
        self.lines.extend(draw_circles(&[(p(x, y), r)]).expect("sketch circle"));
        self
    }

    fn curve(mut self, pts: &[(f64, f64)]) -> Self {
        let keys: Vec<Point> = pts.iter().map(|&(x, y)| p(x, y)).collect();
        self.lines.push(draw_splines(&keys).expect("sketch curve"));
        self
    }

    fn stick_figure(self, x: f64) -> Self {
        self.circle(x, 50.0, 18.0)
            .line(&[(x, 68.0), (x, 150.0)])
            .line(&[(x, 150.0), (x - 28.0, 215.0)])
            .line(&[(x, 150.0), (x + 26.0, 212.0)])
            .line(&[(x - 40.0, 95.0), (x, 88.0), (x + 42.0, 100.0)])
    }

    fn png(&self) -> Vec<u8> {
        render_polylines(&self.lines, SKETCH_SIZE, SKETCH_SIZE).to_png()
    }
}

fn entry(subject: &str, sketch: Sketch, method: &str) -> VocabularyEntry {
    VocabularyEntry { subject: subject.into(), image: ImageData::png(sketch.png()), method: Some(method.into()) }
}

/// Twenty-four subjects, each a small sketch paired with a few plain steps.
pub fn demo_vocabulary() -> Vec<VocabularyEntry> {
    vec![
        entry(
            "tree",
            Sketch::default()
                .line(&[(120.0, 225.0), (118.0, 120.0)])
                .curve(&[(118.0, 130.0), (80.0, 80.0), (60.0, 60.0)])
                .curve(&[(119.0, 125.0), (160.0, 75.0), (185.0, 55.0)])
                .line(&[(90.0, 95.0), (70.0, 100.0)])
                .line(&[(150.0, 88.0), (170.0, 95.0)]),
            "Draw a vertical line for the trunk.\nSplit the top of the trunk into two or three branches.\nAdd a few short twigs to each branch.",
        ),
        entry(
            "stickwoman",
            Sketch::default().stick_figure(120.0).closed(&[(120.0, 120.0), (95.0, 175.0), (145.0, 175.0)]),
            "Draw a circle for the head.\nDraw a line down for the body.\nAdd a triangle skirt at the waist.\nDraw two lines down for the legs and two lines out for the arms.",
        ),
        entry(
            "stickman",
            Sketch::default().stick_figure(120.0),
            "Draw a circle for the head.\nDraw a line down for the body.\nDraw two slanted lines for the legs.\nDraw a line across the chest for the arms.",
        ),
        entry(
            "house",
            Sketch::default()
                .closed(&[(50.0, 110.0), (190.0, 110.0), (190.0, 220.0), (50.0, 220.0)])
                .line(&[(40.0, 115.0), (120.0, 40.0), (200.0, 115.0)])
                .closed(&[(105.0, 220.0), (105.0, 165.0), (135.0, 165.0), (135.0, 220.0)])
                .closed(&[(65.0, 130.0), (90.0, 130.0), (90.0, 155.0), (65.0, 155.0)]),
            "Draw a square for the walls.\nPut a triangle roof on top.\nAdd a tall rectangle door and a small square window.",
        ),
        entry(
            "flower",
            Sketch::default()
                .circle(120.0, 80.0, 14.0)
                .circle(120.0, 50.0, 16.0)
                .circle(150.0, 80.0, 16.0)
                .circle(120.0, 110.0, 16.0)
                .circle(90.0, 80.0, 16.0)
                .curve(&[(120.0, 126.0), (115.0, 170.0), (122.0, 225.0)])
                .curve(&[(118.0, 180.0), (90.0, 160.0), (80.0, 170.0)]),
            "Draw a small circle for the heart of the flower.\nDraw petals around it.\nDraw a slightly curved stem down with one leaf.",
        ),
        entry(
            "sun",
            Sketch::default()
                .circle(120.0, 120.0, 45.0)
                .line(&[(120.0, 20.0), (120.0, 60.0)])
                .line(&[(120.0, 180.0), (120.0, 220.0)])
                .line(&[(20.0, 120.0), (60.0, 120.0)])
                .line(&[(180.0, 120.0), (220.0, 120.0)])
                .line(&[(50.0, 50.0), (78.0, 78.0)])
                .line(&[(190.0, 190.0), (162.0, 162.0)]),
            "Draw a circle.\nDraw short straight rays all around it.",
        ),
        entry(
            "cloud",
            Sketch::default().curve(&[
                (40.0, 150.0),
                (45.0, 110.0),
                (85.0, 95.0),
                (110.0, 65.0),
                (155.0, 75.0),
                (175.0, 105.0),
                (205.0, 125.0),
                (195.0, 155.0),
                (40.0, 150.0),
            ]),
            "Draw one wavy closed line with a few round bumps on top and a flatter bottom.",
        ),
        entry(
            "bird",
            Sketch::default()
                .curve(&[(40.0, 120.0), (80.0, 90.0), (120.0, 125.0)])
                .curve(&[(120.0, 125.0), (160.0, 90.0), (200.0, 120.0)]),
            "Draw two arcs meeting in the middle, like a wide letter M.",
        ),
        entry(
            "fish",
            Sketch::default()
                .curve(&[(50.0, 120.0), (110.0, 80.0), (170.0, 120.0), (110.0, 160.0), (50.0, 120.0)])
                .closed(&[(170.0, 120.0), (210.0, 95.0), (210.0, 145.0)])
                .circle(80.0, 112.0, 4.0),
            "Draw an oval body.\nAdd a triangle tail at one end.\nAdd a dot for the eye.",
        ),
        entry(
            "cat",
            Sketch::default()
                .circle(120.0, 80.0, 35.0)
                .line(&[(92.0, 60.0), (95.0, 30.0), (110.0, 47.0)])
                .line(&[(130.0, 47.0), (145.0, 30.0), (148.0, 60.0)])
                .curve(&[(100.0, 112.0), (80.0, 170.0), (95.0, 215.0), (145.0, 215.0), (160.0, 170.0), (140.0, 112.0)])
                .curve(&[(155.0, 205.0), (195.0, 190.0), (200.0, 150.0)]),
            "Draw a round head with two pointed ears.\nDraw a pear-shaped body below.\nAdd a curling tail.",
        ),
        entry(
            "dog",
            Sketch::default()
                .closed(&[(70.0, 110.0), (170.0, 110.0), (170.0, 150.0), (70.0, 150.0)])
                .circle(185.0, 90.0, 22.0)
                .line(&[(80.0, 150.0), (80.0, 200.0)])
                .line(&[(160.0, 150.0), (160.0, 200.0)])
                .line(&[(70.0, 115.0), (45.0, 90.0)]),
            "Draw a long box for the body.\nDraw a round head at the front.\nAdd four straight legs and a tail pointing up.",
        ),
        entry(
            "hare",
            Sketch::default()
                .curve(&[(60.0, 190.0), (70.0, 140.0), (120.0, 130.0), (160.0, 160.0), (150.0, 195.0), (60.0, 190.0)])
                .circle(165.0, 115.0, 20.0)
                .curve(&[(160.0, 96.0), (150.0, 55.0), (158.0, 25.0)])
                .curve(&[(172.0, 96.0), (180.0, 55.0), (192.0, 30.0)]),
            "Draw a rounded body.\nDraw a small round head in front.\nAdd two long ears pointing up.",
        ),
        entry(
            "turtle",
            Sketch::default()
                .curve(&[(50.0, 160.0), (80.0, 95.0), (150.0, 90.0), (190.0, 160.0)])
                .line(&[(50.0, 160.0), (190.0, 160.0)])
                .circle(205.0, 150.0, 14.0)
                .line(&[(75.0, 160.0), (70.0, 185.0)])
                .line(&[(165.0, 160.0), (170.0, 185.0)]),
            "Draw a dome for the shell with a flat bottom.\nAdd a small round head at one side.\nAdd short stubby legs.",
        ),
        entry(
            "boat",
            Sketch::default()
                .line(&[(40.0, 160.0), (200.0, 160.0), (170.0, 200.0), (70.0, 200.0), (40.0, 160.0)])
                .line(&[(120.0, 160.0), (120.0, 40.0)])
                .closed(&[(120.0, 45.0), (180.0, 140.0), (120.0, 140.0)]),
            "Draw a hull as a wide trapezoid.\nDraw a tall mast.\nAdd a triangle sail.",
        ),
        entry(
            "car",
            Sketch::default()
                .closed(&[(40.0, 130.0), (200.0, 130.0), (200.0, 170.0), (40.0, 170.0)])
                .line(&[(70.0, 130.0), (90.0, 95.0), (160.0, 95.0), (180.0, 130.0)])
                .circle(80.0, 175.0, 17.0)
                .circle(165.0, 175.0, 17.0),
            "Draw a long rectangle.\nPut a smaller cabin on top.\nAdd two wheels underneath.",
        ),
        entry(
            "mountain",
            Sketch::default()
                .line(&[(20.0, 200.0), (90.0, 70.0), (130.0, 140.0), (165.0, 90.0), (225.0, 200.0)])
                .line(&[(72.0, 105.0), (90.0, 95.0), (106.0, 100.0)]),
            "Draw a zigzag line with two peaks.\nMark a snow line under the highest peak.",
        ),
        entry(
            "moon",
            Sketch::default()
                .curve(&[(140.0, 40.0), (70.0, 70.0), (70.0, 170.0), (140.0, 200.0)])
                .curve(&[(140.0, 40.0), (105.0, 90.0), (105.0, 150.0), (140.0, 200.0)]),
            "Draw a large curve like the letter C.\nDraw a second, flatter curve inside it joining both tips.",
        ),
        entry(
            "star",
            Sketch::default().closed(&[(120.0, 30.0), (150.0, 200.0), (30.0, 90.0), (210.0, 90.0), (90.0, 200.0)]),
            "Draw five straight lines without lifting the pen, each crossing the shape to the next point.",
        ),
        entry(
            "apple",
            Sketch::default()
                .curve(&[(120.0, 80.0), (60.0, 60.0), (50.0, 160.0), (120.0, 210.0), (190.0, 160.0), (180.0, 60.0), (120.0, 80.0)])
                .line(&[(120.0, 80.0), (125.0, 45.0)])
                .curve(&[(125.0, 55.0), (150.0, 40.0), (165.0, 50.0)]),
            "Draw a round shape with a dip at the top.\nAdd a short stem and one leaf.",
        ),
        entry(
            "heart",
            Sketch::default().curve(&[
                (120.0, 200.0),
                (50.0, 120.0),
                (70.0, 55.0),
                (120.0, 85.0),
                (170.0, 55.0),
                (190.0, 120.0),
                (120.0, 200.0),
            ]),
            "Draw two rounded bumps at the top that meet in a point at the bottom.",
        ),
        entry(
            "mushroom",
            Sketch::default()
                .curve(&[(40.0, 120.0), (80.0, 50.0), (160.0, 50.0), (200.0, 120.0)])
                .line(&[(40.0, 120.0), (200.0, 120.0)])
                .line(&[(100.0, 120.0), (95.0, 205.0), (145.0, 205.0), (140.0, 120.0)]),
            "Draw a dome for the cap with a flat underside.\nDraw a thick short stalk under it.",
        ),
        entry(
            "butterfly",
            Sketch::default()
                .line(&[(120.0, 60.0), (120.0, 190.0)])
                .curve(&[(120.0, 100.0), (60.0, 40.0), (40.0, 110.0), (120.0, 120.0)])
                .curve(&[(120.0, 100.0), (180.0, 40.0), (200.0, 110.0), (120.0, 120.0)])
                .curve(&[(120.0, 130.0), (70.0, 200.0), (120.0, 170.0)])
                .curve(&[(120.0, 130.0), (170.0, 200.0), (120.0, 170.0)]),
            "Draw a straight body.\nAdd two large wings on top and two smaller wings below, mirrored.",
        ),
        entry(
            "snail",
            Sketch::default()
                .curve(&[(120.0, 120.0), (135.0, 110.0), (130.0, 90.0), (105.0, 90.0), (95.0, 120.0), (120.0, 150.0), (160.0, 130.0), (165.0, 90.0), (130.0, 60.0), (85.0, 75.0), (70.0, 120.0), (85.0, 160.0)])
                .line(&[(40.0, 170.0), (210.0, 170.0)])
                .line(&[(200.0, 170.0), (195.0, 120.0)]),
            "Draw a spiral for the shell.\nDraw a long flat body under it.\nAdd a feeler at the front.",
        ),
        entry(
            "tent",
            Sketch::default()
                .line(&[(30.0, 200.0), (120.0, 50.0), (210.0, 200.0), (30.0, 200.0)])
                .line(&[(120.0, 50.0), (120.0, 200.0)])
                .line(&[(120.0, 120.0), (95.0, 200.0)]),
            "Draw a big triangle standing on the ground.\nDraw the door flap as a line down the middle opening at the bottom.",
        ),
    ]
}
