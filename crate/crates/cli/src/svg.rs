//! Minimal static SVG of a simulated orbit: sampled arcs as polylines, jumps
//! as dashed chords along the switching line, the line itself dashed gray.

use hybrid_centers::{OrbitEventKind, OrbitTrace, PlanePoint};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 24.0;

struct Frame {
    min_x: f64,
    min_y: f64,
    scale: f64,
}

impl Frame {
    fn map(&self, p: PlanePoint) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min_x) * self.scale,
            // Flip vertically: SVG y grows downward.
            HEIGHT - MARGIN - (p.y - self.min_y) * self.scale,
        )
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

pub fn render(trace: &OrbitTrace) -> String {
    let mut min_x = -0.1f64;
    let mut max_x = 0.1f64;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut cover = |p: PlanePoint| {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    };
    cover(trace.initial);
    for event in &trace.events {
        match &event.kind {
            OrbitEventKind::Arc(arc) => {
                for &p in &arc.samples {
                    cover(p);
                }
                cover(arc.start);
                cover(arc.end);
            }
            OrbitEventKind::Jump { from_y, to_y } => {
                cover(PlanePoint::new(0.0, *from_y));
                cover(PlanePoint::new(0.0, *to_y));
            }
            OrbitEventKind::Stop(_) => {}
        }
    }
    if !min_y.is_finite() {
        min_y = -1.0;
        max_y = 1.0;
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    let scale = ((WIDTH - 2.0 * MARGIN) / span_x).min((HEIGHT - 2.0 * MARGIN) / span_y);
    let frame = Frame { min_x, min_y, scale };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // The switching line.
    let (lx, _) = frame.map(PlanePoint::new(0.0, min_y));
    out.push_str(&format!(
        "<line x1=\"{x}\" y1=\"{top}\" x2=\"{x}\" y2=\"{bottom}\" stroke=\"#999\" \
         stroke-dasharray=\"2,4\"/>\n",
        x = px(lx),
        top = px(MARGIN),
        bottom = px(HEIGHT - MARGIN),
    ));
    for event in &trace.events {
        match &event.kind {
            OrbitEventKind::Arc(arc) => {
                let pts: Vec<String> = arc
                    .samples
                    .iter()
                    .map(|&p| {
                        let (x, y) = frame.map(p);
                        format!("{},{}", px(x), px(y))
                    })
                    .collect();
                if pts.len() >= 2 {
                    out.push_str(&format!(
                        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" \
                         stroke-width=\"1.5\"/>\n",
                        pts.join(" ")
                    ));
                }
            }
            OrbitEventKind::Jump { from_y, to_y } => {
                let (x1, y1) = frame.map(PlanePoint::new(0.0, *from_y));
                let (_, y2) = frame.map(PlanePoint::new(0.0, *to_y));
                out.push_str(&format!(
                    "<line x1=\"{a}\" y1=\"{b}\" x2=\"{a}\" y2=\"{c}\" stroke=\"#d62728\" \
                     stroke-dasharray=\"5,3\" stroke-width=\"1.2\"/>\n",
                    a = px(x1),
                    b = px(y1),
                    c = px(y2),
                ));
            }
            OrbitEventKind::Stop(_) => {}
        }
    }
    out.push_str("</svg>\n");
    out
}
