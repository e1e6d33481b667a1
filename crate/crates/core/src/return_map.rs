//! The first return map on the switching line and its branch-domain
//! partition.
//!
//! A height y on the line either rides an arc through side 1 first (when the
//! field enters that side) and lands at chord_offset1 - y, or jumps
//! immediately; the landing is then reset, and the same dichotomy on side 2
//! produces four possible compositions. Each is a polynomial of degree n^2
//! (n the reset degree); their domains partition the line minus finitely
//! many ambiguous heights.
//!
//! The exact layer works over the dyadic rationals the f64 parameters
//! denote, so interval endpoints, branch coefficients, and midpoint
//! classifications are computed without rounding and agree exactly with the
//! f64 views handed to callers.

use num_rational::BigRational;

use crate::error::{BranchCandidate, Error, Result};
use crate::model::{HybridSystem, LinearCenter, PlanePoint, ResetPolynomial, Side};
use crate::poly::Poly;

/// Open interval (lo, hi); endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        debug_assert!(lo < hi);
        Interval { lo, hi }
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo < y && y < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// A point in the interior, used for classification sampling.
    pub fn sample(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }
}

/// How the tangent orbit at the fold relates to the given side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldKind {
    /// The tangent orbit arcs into this side: the fold belongs to the
    /// closure of the entering behavior.
    Visible,
    /// The tangent orbit grazes from the other side.
    Invisible,
    /// The equilibrium itself sits on the switching line at the fold.
    EquilibriumOnSigma,
}

/// The switching line split by the fold of one center into the ray where
/// orbits enter the side and the ray where they leave it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransversalIntervals {
    pub side: Side,
    pub entering: Interval,
    pub leaving: Interval,
    pub fold: f64,
    pub fold_kind: FoldKind,
}

impl TransversalIntervals {
    pub fn entering_contains(&self, y: f64) -> bool {
        self.entering.contains(y)
    }
}

/// Split the line at the fold of `center` according to the sign of the
/// horizontal velocity, and classify the tangency by its second-order
/// contact.
pub fn transversal_intervals(center: &LinearCenter, side: Side) -> TransversalIntervals {
    let fold = center.fold_point();
    let dv = center.delta.value();
    // Horizontal velocity d - delta S y is decreasing in y exactly when
    // delta = +1; orbits enter side 1 where it is negative, side 2 where it
    // is positive.
    let above = Interval::new(fold, f64::INFINITY);
    let below = Interval::new(f64::NEG_INFINITY, fold);
    let (entering, leaving) = match (side, dv > 0.0) {
        (Side::One, true) | (Side::Two, false) => (above, below),
        (Side::One, false) | (Side::Two, true) => (below, above),
    };
    let fold_kind = if center.equilibrium_on_switching_line(1e-9) {
        FoldKind::EquilibriumOnSigma
    } else {
        let vy = center.velocity(PlanePoint::new(0.0, fold)).y;
        let xdd = -dv * center.quad_weight() * vy;
        let visible = match side {
            Side::One => xdd < 0.0,
            Side::Two => xdd > 0.0,
        };
        if visible { FoldKind::Visible } else { FoldKind::Invisible }
    };
    TransversalIntervals { side, entering, leaving, fold, fold_kind }
}

/// One of the four return-map branches: its id, the open intervals of its
/// domain, and the exact expanded polynomial expression.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnBranch {
    pub id: u8,
    pub domain: Vec<Interval>,
    pub expr: Poly,
}

/// The full branch structure of the return map.
#[derive(Debug, Clone)]
pub struct BranchPartition {
    branches: [ReturnBranch; 4],
    boundary_points: Vec<f64>,
    /// Consecutive open intervals covering the line minus the boundary
    /// points, each labeled with its branch id.
    segments: Vec<(Interval, u8)>,
    reset: ResetPolynomial,
    eta1: f64,
    eta2: f64,
    side1: TransversalIntervals,
    side2: TransversalIntervals,
    boundary_tol: f64,
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite parameter")
}

/// The four branch expressions as exact polynomials, in branch order:
/// arc-arc, arc-jump, jump-arc, jump-jump (reset applied after every
/// landing).
pub fn branch_expressions(system: &HybridSystem) -> [Poly; 4] {
    let phi = system.reset.exact();
    let chord1 = chord_poly(&system.center1);
    let chord2 = chord_poly(&system.center2);
    let g = phi.compose(&chord1); // landing of the side-1 arc, reset
    let p1 = phi.compose(&chord2.compose(&g));
    let p2 = phi.compose(&g);
    let p3 = phi.compose(&chord2.compose(&phi));
    let p4 = phi.compose(&phi);
    [p1, p2, p3, p4]
}

/// chord_offset - y with the offset taken as the exact dyadic value of the
/// f64 parameter view.
fn chord_poly(center: &LinearCenter) -> Poly {
    Poly::from_rational_coeffs(vec![exact(center.chord_offset()), exact(-1.0)])
}

/// Build the branch partition: boundary heights are the fold of side 1
/// together with the preimages of the side-2 fold under the relevant
/// landing map, found by exact real-root isolation.
pub fn build_partition(system: &HybridSystem) -> Result<BranchPartition> {
    let side1 = transversal_intervals(&system.center1, Side::One);
    let side2 = transversal_intervals(&system.center2, Side::Two);
    let phi = system.reset.exact();
    let chord1 = chord_poly(&system.center1);
    let g = phi.compose(&chord1);
    let fold2 = exact(side2.fold);
    let eq_arc = g.sub(&Poly::constant(fold2.clone()));
    let eq_jump = phi.sub(&Poly::constant(fold2.clone()));
    if eq_arc.is_zero() || eq_jump.is_zero() {
        return Err(Error::DegenerateReset);
    }

    let fold1 = side1.fold;
    let delta1_plus = system.center1.delta.value() > 0.0;
    let mut points = vec![fold1];
    // Preimage boundaries matter only inside the ray where their landing map
    // is the active one; roots beyond it would split a domain spuriously.
    for r in eq_arc.real_roots() {
        let in_arc_ray = if delta1_plus { r >= fold1 } else { r <= fold1 };
        if in_arc_ray {
            points.push(r);
        }
    }
    for r in eq_jump.real_roots() {
        let in_jump_ray = if delta1_plus { r <= fold1 } else { r >= fold1 };
        if in_jump_ray {
            points.push(r);
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();

    // Classify each open segment between consecutive boundary points by an
    // exact sign evaluation at an interior sample.
    let fold1_exact = exact(fold1);
    let delta2_plus = system.center2.delta.value() > 0.0;
    let mut segments = Vec::with_capacity(points.len() + 1);
    let mut lo = f64::NEG_INFINITY;
    for &p in points.iter().chain(std::iter::once(&f64::INFINITY)) {
        let seg = Interval::new(lo, p);
        let m = exact(seg.sample());
        let arcs_first = if delta1_plus { m > fold1_exact } else { m < fold1_exact };
        let landing = if arcs_first { g.eval_rational(&m) } else { phi.eval_rational(&m) };
        let enters_side2 = if delta2_plus { landing < fold2 } else { landing > fold2 };
        let id = match (arcs_first, enters_side2) {
            (true, true) => 1,
            (true, false) => 2,
            (false, true) => 3,
            (false, false) => 4,
        };
        segments.push((seg, id));
        lo = p;
    }

    let exprs = branch_expressions(system);
    let branches = [1u8, 2, 3, 4].map(|id| ReturnBranch {
        id,
        domain: segments
            .iter()
            .filter(|(_, b)| *b == id)
            .map(|(seg, _)| *seg)
            .collect(),
        expr: exprs[(id - 1) as usize].clone(),
    });

    Ok(BranchPartition {
        branches,
        boundary_points: points,
        segments,
        reset: system.reset.clone(),
        eta1: system.center1.chord_offset(),
        eta2: system.center2.chord_offset(),
        side1,
        side2,
        boundary_tol: 1e-9,
    })
}

impl BranchPartition {
    pub fn branches(&self) -> &[ReturnBranch; 4] {
        &self.branches
    }

    pub fn branch(&self, id: u8) -> &ReturnBranch {
        &self.branches[(id - 1) as usize]
    }

    pub fn boundary_points(&self) -> &[f64] {
        &self.boundary_points
    }

    pub fn transversal(&self, side: Side) -> &TransversalIntervals {
        match side {
            Side::One => &self.side1,
            Side::Two => &self.side2,
        }
    }

    pub fn chord_offset(&self, side: Side) -> f64 {
        match side {
            Side::One => self.eta1,
            Side::Two => self.eta2,
        }
    }

    pub fn reset(&self) -> &ResetPolynomial {
        &self.reset
    }

    pub fn boundary_tol(&self) -> f64 {
        self.boundary_tol
    }

    pub fn with_boundary_tol(mut self, tol: f64) -> BranchPartition {
        self.boundary_tol = tol;
        self
    }

    fn near_boundary(&self, y: f64) -> Option<f64> {
        self.boundary_points
            .iter()
            .copied()
            .find(|&b| (y - b).abs() <= self.boundary_tol * (1.0 + b.abs()))
    }

    fn boundary_error(&self, y: f64, at: f64) -> Error {
        let mut candidates: Vec<BranchCandidate> = Vec::new();
        for (seg, id) in &self.segments {
            if seg.hi == at || seg.lo == at {
                if candidates.iter().all(|c| c.branch != *id) {
                    candidates.push(BranchCandidate {
                        branch: *id,
                        value: self.eval_branch(*id, at),
                    });
                }
            }
        }
        Error::BoundaryPoint { y, candidates }
    }

    /// The branch whose domain interior contains y.
    pub fn branch_at(&self, y: f64) -> Result<u8> {
        if let Some(b) = self.near_boundary(y) {
            return Err(self.boundary_error(y, b));
        }
        for (seg, id) in &self.segments {
            if seg.contains(y) {
                return Ok(*id);
            }
        }
        // y is non-finite or sits exactly on a point the tolerance missed.
        Err(self.boundary_error(y, y))
    }

    /// Stage-wise evaluation of one branch composition. Unlike evaluating
    /// the expanded polynomial, the composed form stays well conditioned at
    /// large heights.
    pub fn eval_branch(&self, id: u8, y: f64) -> f64 {
        let phi = &self.reset;
        match id {
            1 => phi.eval(self.eta2 - phi.eval(self.eta1 - y)),
            2 => phi.eval(phi.eval(self.eta1 - y)),
            3 => phi.eval(self.eta2 - phi.eval(y)),
            _ => phi.eval(phi.eval(y)),
        }
    }

    /// Chain-rule derivative of one branch in composed form.
    pub fn derivative_branch(&self, id: u8, y: f64) -> f64 {
        let phi = &self.reset;
        match id {
            1 => {
                let t = phi.eval(self.eta1 - y);
                phi.derivative_eval(self.eta2 - t) * phi.derivative_eval(self.eta1 - y)
            }
            2 => {
                let t = phi.eval(self.eta1 - y);
                -phi.derivative_eval(t) * phi.derivative_eval(self.eta1 - y)
            }
            3 => {
                let t = phi.eval(y);
                -phi.derivative_eval(self.eta2 - t) * phi.derivative_eval(y)
            }
            _ => {
                let t = phi.eval(y);
                phi.derivative_eval(t) * phi.derivative_eval(y)
            }
        }
    }

    /// Return-map value and active branch at y.
    pub fn eval(&self, y: f64) -> Result<(f64, u8)> {
        let id = self.branch_at(y)?;
        Ok((self.eval_branch(id, y), id))
    }

    /// Derivative of the active branch at y.
    pub fn derivative(&self, y: f64) -> Result<f64> {
        let id = self.branch_at(y)?;
        Ok(self.derivative_branch(id, y))
    }
}

/// Return-map value and branch id at y (domain interiors only).
pub fn eval_return(partition: &BranchPartition, y: f64) -> Result<(f64, u8)> {
    partition.eval(y)
}

/// Derivative of the active branch at y.
pub fn return_derivative(partition: &BranchPartition, y: f64) -> Result<f64> {
    partition.derivative(y)
}

/// For an affine reset a y + b, the constant offsets of the four branches
/// (their slopes are a^2, -a^2, -a^2, a^2 in branch order).
pub fn affine_branch_offsets(system: &HybridSystem) -> Result<[f64; 4]> {
    let (a, b) = system
        .reset
        .affine()
        .ok_or(Error::WrongDegree { expected: 1, actual: system.reset.degree() })?;
    let eta1 = system.center1.chord_offset();
    let eta2 = system.center2.chord_offset();
    Ok([
        b * (1.0 - a) + a * (eta2 - a * eta1),
        b * (1.0 + a) + a * a * eta1,
        b * (1.0 - a) + a * eta2,
        b * (1.0 + a),
    ])
}
