//! Core data model: the two linear centers, the polynomial reset, and the
//! assembled hybrid system.
//!
//! Each center is stored in the normal form
//!
//! ```text
//! x' = -b x - delta (4 b^2 + omega^2) y + d
//! y' =  delta x + b y + c
//! ```
//!
//! with `omega != 0` and `delta` either +1 or -1. Every such field rotates
//! around a single equilibrium and conserves the quadratic returned by
//! [`LinearCenter::first_integral`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Orientation sign of a center, restricted to +1 / -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl TryFrom<f64> for Sign {
    type Error = Error;
    fn try_from(v: f64) -> Result<Sign> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::InvalidParameter(format!("delta must be 1 or -1, got {v}")))
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        })
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Sign, D::Error> {
        let v = f64::deserialize(d)?;
        Sign::try_from(v).map_err(serde::de::Error::custom)
    }
}

/// Which side of the switching line a field acts on: side 1 is `x < 0`,
/// side 2 is `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }

    pub fn from_index(i: u8) -> Result<Side> {
        match i {
            1 => Ok(Side::One),
            2 => Ok(Side::Two),
            _ => Err(Error::InvalidParameter(format!("side must be 1 or 2, got {i}"))),
        }
    }
}

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> PlanePoint {
        PlanePoint { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for PlanePoint {
    fn from((x, y): (f64, f64)) -> PlanePoint {
        PlanePoint { x, y }
    }
}

/// One linear center in normal form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCenter", into = "RawCenter")]
pub struct LinearCenter {
    pub b: f64,
    pub omega: f64,
    pub delta: Sign,
    pub c: f64,
    pub d: f64,
}

#[derive(Serialize, Deserialize)]
struct RawCenter {
    b: f64,
    omega: f64,
    delta: f64,
    c: f64,
    d: f64,
}

impl TryFrom<RawCenter> for LinearCenter {
    type Error = Error;
    fn try_from(r: RawCenter) -> Result<LinearCenter> {
        LinearCenter::new(r.b, r.omega, Sign::try_from(r.delta)?, r.c, r.d)
    }
}

impl From<LinearCenter> for RawCenter {
    fn from(c: LinearCenter) -> RawCenter {
        RawCenter { b: c.b, omega: c.omega, delta: c.delta.value(), c: c.c, d: c.d }
    }
}

impl LinearCenter {
    pub fn new(b: f64, omega: f64, delta: Sign, c: f64, d: f64) -> Result<LinearCenter> {
        for (name, v) in [("b", b), ("omega", omega), ("c", c), ("d", d)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if omega == 0.0 {
            return Err(Error::InvalidParameter("omega must be nonzero".into()));
        }
        Ok(LinearCenter { b, omega, delta, c, d })
    }

    /// 4 b^2 + omega^2: weight of y in the horizontal velocity and of y^2 in
    /// the conserved quadratic (always positive).
    pub fn quad_weight(&self) -> f64 {
        4.0 * self.b * self.b + self.omega * self.omega
    }

    /// Angular speed of the rotation: sqrt(3 b^2 + omega^2).
    pub fn rotation_rate(&self) -> f64 {
        (3.0 * self.b * self.b + self.omega * self.omega).sqrt()
    }

    /// Time of one full revolution around the equilibrium.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.rotation_rate()
    }

    /// The field evaluated at `p`.
    pub fn velocity(&self, p: PlanePoint) -> PlanePoint {
        let s = self.delta.value() * self.quad_weight();
        PlanePoint {
            x: -self.b * p.x - s * p.y + self.d,
            y: self.delta.value() * p.x + self.b * p.y + self.c,
        }
    }

    /// Conserved quadratic 2cx - 2dy + delta x^2 + 2bxy + delta (4b^2+omega^2) y^2.
    pub fn first_integral(&self, p: PlanePoint) -> f64 {
        let dv = self.delta.value();
        2.0 * self.c * p.x - 2.0 * self.d * p.y
            + dv * p.x * p.x
            + 2.0 * self.b * p.x * p.y
            + dv * self.quad_weight() * p.y * p.y
    }

    /// The unique equilibrium of the field.
    pub fn equilibrium(&self) -> PlanePoint {
        // Solve the 2x2 linear system velocity = 0; the determinant
        // 3 b^2 + omega^2 is always positive.
        let det = 3.0 * self.b * self.b + self.omega * self.omega;
        let dv = self.delta.value();
        let s = dv * self.quad_weight();
        PlanePoint {
            x: (-self.b * self.d - self.c * s) / det,
            y: (dv * self.d + self.b * self.c) / det,
        }
    }

    /// Sum of the two heights at which any level set of the conserved
    /// quadratic meets the switching line; the chord map is
    /// `y -> chord_offset - y`.
    pub fn chord_offset(&self) -> f64 {
        2.0 * self.d * self.delta.value() / self.quad_weight()
    }

    /// Height of the single point on the switching line where the field is
    /// tangent to it (half the chord offset).
    pub fn fold_point(&self) -> f64 {
        self.chord_offset() / 2.0
    }

    /// Horizontal velocity at the point (0, y): decides whether an orbit at
    /// that height moves into x < 0 or x > 0.
    pub fn horizontal_velocity_on_axis(&self, y: f64) -> f64 {
        self.d - self.delta.value() * self.quad_weight() * y
    }

    /// Whether the equilibrium sits on the switching line (within the
    /// absolute/relative tolerance blend `tol`). When it does, it coincides
    /// with the fold point.
    pub fn equilibrium_on_switching_line(&self, tol: f64) -> bool {
        let e = self.equilibrium();
        e.x.abs() <= tol * (1.0 + e.y.abs())
    }
}

/// The reset polynomial applied to the height whenever an orbit reaches the
/// switching line. Coefficients are in ascending order: `coeffs[i]`
/// multiplies y^i. Degree is at least 1 and the leading coefficient is
/// nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawReset", into = "RawReset")]
pub struct ResetPolynomial {
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawReset {
    coeffs: Vec<f64>,
}

impl TryFrom<RawReset> for ResetPolynomial {
    type Error = Error;
    fn try_from(r: RawReset) -> Result<ResetPolynomial> {
        ResetPolynomial::new(r.coeffs)
    }
}

impl From<ResetPolynomial> for RawReset {
    fn from(r: ResetPolynomial) -> RawReset {
        RawReset { coeffs: r.coeffs }
    }
}

impl ResetPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<ResetPolynomial> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidParameter(
                "reset needs degree >= 1 (at least two coefficients)".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("reset coefficients must be finite".into()));
        }
        if *coeffs.last().unwrap() == 0.0 {
            return Err(Error::InvalidParameter("reset leading coefficient must be nonzero".into()));
        }
        Ok(ResetPolynomial { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, y: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * y + c;
        }
        acc
    }

    pub fn derivative_eval(&self, y: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * y + c * i as f64;
        }
        acc
    }

    /// Exact-coefficient copy of the reset.
    pub fn exact(&self) -> Poly {
        Poly::from_f64_coeffs(&self.coeffs)
    }

    /// For degree 1, the (slope, offset) pair of `y -> slope*y + offset`.
    pub fn affine(&self) -> Option<(f64, f64)> {
        if self.degree() == 1 {
            Some((self.coeffs[1], self.coeffs[0]))
        } else {
            None
        }
    }
}

/// The assembled system: the side-1 center, the side-2 center, and the reset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridSystem {
    pub center1: LinearCenter,
    pub center2: LinearCenter,
    pub reset: ResetPolynomial,
}

impl HybridSystem {
    pub fn new(center1: LinearCenter, center2: LinearCenter, reset: ResetPolynomial) -> HybridSystem {
        HybridSystem { center1, center2, reset }
    }

    pub fn center(&self, side: Side) -> &LinearCenter {
        match side {
            Side::One => &self.center1,
            Side::Two => &self.center2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_omega() {
        assert!(LinearCenter::new(0.0, 0.0, Sign::Plus, 1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_degenerate_reset() {
        assert!(ResetPolynomial::new(vec![1.0]).is_err());
        assert!(ResetPolynomial::new(vec![1.0, 0.0]).is_err());
        assert!(ResetPolynomial::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn equilibrium_of_shifted_center() {
        // b=0, omega=1, delta=+1, c=1, d=0 puts the equilibrium at (-1, 0).
        let c = LinearCenter::new(0.0, 1.0, Sign::Plus, 1.0, 0.0).unwrap();
        let e = c.equilibrium();
        assert_eq!((e.x, e.y), (-1.0, 0.0));
        let v = c.velocity(e);
        assert!(v.x.abs() < 1e-15 && v.y.abs() < 1e-15);
    }

    #[test]
    fn equilibrium_can_sit_on_the_switching_line() {
        // c = 0 puts the equilibrium at (0, d*delta/omega^2), which is also
        // the fold point.
        let c = LinearCenter::new(0.0, 2.0, Sign::Minus, 0.0, 3.0).unwrap();
        let e = c.equilibrium();
        assert!(e.x.abs() < 1e-15);
        assert!(c.equilibrium_on_switching_line(1e-9));
        assert!((e.y - c.fold_point()).abs() < 1e-15);
    }

    #[test]
    fn first_integral_gradient_orthogonal_to_field() {
        let c = LinearCenter::new(0.7, 1.3, Sign::Minus, -0.4, 2.1).unwrap();
        let p = PlanePoint::new(-1.3, 0.8);
        let h = 1e-6;
        let hx = (c.first_integral(PlanePoint::new(p.x + h, p.y))
            - c.first_integral(PlanePoint::new(p.x - h, p.y)))
            / (2.0 * h);
        let hy = (c.first_integral(PlanePoint::new(p.x, p.y + h))
            - c.first_integral(PlanePoint::new(p.x, p.y - h)))
            / (2.0 * h);
        let v = c.velocity(p);
        assert!((hx * v.x + hy * v.y).abs() < 1e-6);
    }

    #[test]
    fn chord_offset_matches_level_set_symmetry() {
        let c = LinearCenter::new(0.5, 1.5, Sign::Plus, 0.3, -0.9).unwrap();
        let y = 0.37;
        let partner = c.chord_offset() - y;
        let h1 = c.first_integral(PlanePoint::new(0.0, y));
        let h2 = c.first_integral(PlanePoint::new(0.0, partner));
        assert!((h1 - h2).abs() < 1e-12 * (1.0 + h1.abs()));
    }

    #[test]
    fn reset_eval_and_derivative() {
        let r = ResetPolynomial::new(vec![0.0, -4.0, -4.0]).unwrap();
        assert_eq!(r.degree(), 2);
        assert_eq!(r.eval(-0.5), 1.0); // -4*(-1/2)*(1 - 1/2)
        assert_eq!(r.derivative_eval(0.0), -4.0);
        assert_eq!(r.affine(), None);
        let a = ResetPolynomial::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(a.affine(), Some((2.0, 1.0)));
    }

    #[test]
    fn serde_round_trip_with_sign_as_number() {
        let sys = HybridSystem::new(
            LinearCenter::new(0.0, 1.0, Sign::Plus, 0.0, 0.0).unwrap(),
            LinearCenter::new(0.0, 1.0, Sign::Minus, 0.0, 0.0).unwrap(),
            ResetPolynomial::new(vec![0.0, -4.0, -4.0]).unwrap(),
        );
        let js = serde_json::to_string(&sys).unwrap();
        assert!(js.contains("\"delta\":-1"));
        let back: HybridSystem = serde_json::from_str(&js).unwrap();
        assert_eq!(back, sys);
        let bad = js.replace("\"delta\":-1", "\"delta\":-2");
        assert!(serde_json::from_str::<HybridSystem>(&bad).is_err());
    }
}
