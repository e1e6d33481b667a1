//! Closed-form continuous dynamics of one linear center: flow evaluation,
//! chord geometry on the switching line, and time of flight between
//! switching-line points.
//!
//! The coefficient matrix of a center in normal form squares to -mu^2 times
//! the identity (mu the rotation rate), so the flow is evaluated exactly as
//! a rotation-like motion about the equilibrium — no ODE stepping anywhere.

use crate::error::{Error, Result};
use crate::model::{LinearCenter, PlanePoint, Side};

/// One continuous piece of orbit inside a single side, from a switching-line
/// point back to the switching line.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowArc {
    pub center_side: Side,
    pub start: PlanePoint,
    pub end: PlanePoint,
    pub duration: f64,
    /// Evenly spaced points along the arc (including both endpoints) for
    /// rendering; empty when sampling was not requested.
    pub samples: Vec<PlanePoint>,
}

/// Position at time `t` of the solution through `p`.
///
/// With u = p - e (e the equilibrium) and A the coefficient matrix,
/// A^2 = -mu^2 I, so the solution is
/// e + cos(mu t) u + sin(mu t)/mu * A u.
pub fn flow(center: &LinearCenter, p: PlanePoint, t: f64) -> PlanePoint {
    let e = center.equilibrium();
    let ux = p.x - e.x;
    let uy = p.y - e.y;
    let mu = center.rotation_rate();
    let (sin, cos) = (mu * t).sin_cos();
    let (aux, auy) = apply_matrix(center, ux, uy);
    let s = sin / mu;
    PlanePoint::new(e.x + cos * ux + s * aux, e.y + cos * uy + s * auy)
}

/// The coefficient matrix applied to the vector (ux, uy).
fn apply_matrix(center: &LinearCenter, ux: f64, uy: f64) -> (f64, f64) {
    let dv = center.delta.value();
    let s = dv * center.quad_weight();
    (-center.b * ux - s * uy, dv * ux + center.b * uy)
}

/// The other height at which the level set of the conserved quadratic
/// through (0, y) meets the switching line: chord_offset - y. Fixed exactly
/// at the fold point.
pub fn sigma_chord(center: &LinearCenter, y: f64) -> f64 {
    center.chord_offset() - y
}

/// Intersections of the level set through a point with the switching line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaCrossings {
    /// The level set stays strictly on one side.
    Empty,
    /// The level set touches the switching line at the fold point only.
    Tangent(f64),
    /// Two transversal crossings, ascending.
    Pair(f64, f64),
}

impl SigmaCrossings {
    pub fn heights(&self) -> Vec<f64> {
        match *self {
            SigmaCrossings::Empty => vec![],
            SigmaCrossings::Tangent(y) => vec![y],
            SigmaCrossings::Pair(a, b) => vec![a, b],
        }
    }
}

/// Heights where the orbit through `p` meets the switching line: the real
/// roots of delta (4b^2+omega^2) y^2 - 2 d y - H(p) = 0.
pub fn ellipse_sigma_intersections(center: &LinearCenter, p: PlanePoint) -> SigmaCrossings {
    let h = center.first_integral(p);
    let sq = center.quad_weight();
    let dv = center.delta.value();
    // Normalized: y^2 - eta y - delta h / S = 0 with scaled discriminant
    // d^2 + S delta h (nonnegative exactly when the orbit reaches the line).
    let disc = center.d * center.d + sq * dv * h;
    let scale = center.d * center.d + (sq * h).abs();
    let eps = 1e-12 * scale + f64::MIN_POSITIVE;
    if disc.abs() <= eps {
        return SigmaCrossings::Tangent(center.fold_point());
    }
    if disc < 0.0 {
        return SigmaCrossings::Empty;
    }
    let root = disc.sqrt();
    let half = center.d * dv; // S * eta / 2
    // Quadratic-formula evaluation that avoids cancellation: compute the
    // larger-magnitude root directly, the other from the root product.
    let (lo, hi) = if half == 0.0 {
        (-root / sq, root / sq)
    } else {
        let big = (half + half.signum() * root) / sq;
        let product = -dv * h / sq;
        let small = product / big;
        if big < small { (big, small) } else { (small, big) }
    };
    SigmaCrossings::Pair(lo, hi)
}

/// Time along the arc from (0, y_from) through the given side back to the
/// switching line at (0, sigma_chord(y_from)).
///
/// At the fold point the result is the full period when the tangent orbit
/// arcs into the requested side, and 0 otherwise (grazing touch or
/// equilibrium sitting on the line).
pub fn time_of_flight(center: &LinearCenter, y_from: f64, side: Side) -> Result<f64> {
    let hx = center.horizontal_velocity_on_axis(y_from);
    if hx == 0.0 {
        // Tangency: second-order contact decides which side the orbit grazes.
        let vy = center.velocity(PlanePoint::new(0.0, y_from)).y;
        let xdd = -center.delta.value() * center.quad_weight() * vy;
        let visible = match side {
            Side::One => xdd < 0.0,
            Side::Two => xdd > 0.0,
        };
        return Ok(if visible { center.period() } else { 0.0 });
    }
    let entering = match side {
        Side::One => hx < 0.0,
        Side::Two => hx > 0.0,
    };
    if !entering {
        return Err(Error::SideMismatch { side, y: y_from });
    }
    let e = center.equilibrium();
    let mu = center.rotation_rate();
    let ux = -e.x;
    let uy = y_from - e.y;
    let vx = -e.x;
    let vy = sigma_chord(center, y_from) - e.y;
    // Solve v = cos(theta) u + sin(theta) A u / mu for (cos, sin); the
    // matrix [u | Au/mu] has determinant delta * (definite quadratic) / mu,
    // nonzero away from the equilibrium.
    let (aux, auy) = apply_matrix(center, ux, uy);
    let (bx, by) = (aux / mu, auy / mu);
    let det = ux * by - uy * bx;
    let cos = (vx * by - vy * bx) / det;
    let sin = (ux * vy - uy * vx) / det;
    let mut theta = sin.atan2(cos);
    if theta <= 0.0 {
        theta += 2.0 * std::f64::consts::PI;
    }
    Ok(theta / mu)
}

/// Oriented time along the orbit of `center` from `from` to `to`, both on
/// the same level set, in (0, period]; equal points yield the full period.
pub(crate) fn time_between(center: &LinearCenter, from: PlanePoint, to: PlanePoint) -> f64 {
    let e = center.equilibrium();
    let mu = center.rotation_rate();
    let (ux, uy) = (from.x - e.x, from.y - e.y);
    let (vx, vy) = (to.x - e.x, to.y - e.y);
    let (aux, auy) = apply_matrix(center, ux, uy);
    let (bx, by) = (aux / mu, auy / mu);
    let det = ux * by - uy * bx;
    let cos = (vx * by - vy * bx) / det;
    let sin = (ux * vy - uy * vx) / det;
    let mut theta = sin.atan2(cos);
    if theta <= 0.0 {
        theta += 2.0 * std::f64::consts::PI;
    }
    theta / mu
}

/// Build the arc from (0, y_from) through `side`, sampling `sample_count`
/// evenly spaced points (including endpoints; 0 skips sampling).
pub fn sample_arc(
    center: &LinearCenter,
    y_from: f64,
    side: Side,
    sample_count: usize,
) -> Result<FlowArc> {
    let duration = time_of_flight(center, y_from, side)?;
    let start = PlanePoint::new(0.0, y_from);
    let end = if duration == 0.0 {
        start
    } else {
        PlanePoint::new(0.0, sigma_chord(center, y_from))
    };
    let mut samples = Vec::new();
    if sample_count >= 2 && duration > 0.0 {
        samples.reserve(sample_count);
        for k in 0..sample_count {
            let t = duration * k as f64 / (sample_count - 1) as f64;
            let p = if k == 0 {
                start
            } else if k == sample_count - 1 {
                end
            } else {
                flow(center, start, t)
            };
            samples.push(p);
        }
    }
    Ok(FlowArc { center_side: side, start, end, duration, samples })
}
