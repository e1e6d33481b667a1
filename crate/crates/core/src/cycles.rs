//! Limit-cycle search and classification on the return map.
//!
//! Periodic orbits of the hybrid system correspond to periodic points of the
//! piecewise-polynomial return map. For an affine reset the unique regular
//! cycle has a closed form; in general, cycles of period k are isolated as
//! real roots of branch compositions restricted to admissible itineraries.

use crate::error::{Error, Result};
use crate::model::HybridSystem;
use crate::poly::Poly;
use crate::return_map::{build_partition, BranchPartition, Interval};

/// Hyperbolic stability of a periodic point under the return map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Nonhyperbolic,
}

/// |multiplier| against 1 with a 1e-9 band for the nonhyperbolic verdict.
pub fn classify(multiplier: f64) -> Stability {
    let m = multiplier.abs();
    if (m - 1.0).abs() <= 1e-9 {
        Stability::Nonhyperbolic
    } else if m < 1.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

/// A periodic orbit of the return map.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCycle {
    /// Number of return-map iterations to close up.
    pub period: usize,
    /// The orbit heights in iteration order; points[0] is the smallest.
    pub points: Vec<f64>,
    /// Branch id used at each iteration.
    pub itinerary: Vec<u8>,
    /// Whether every iteration rides branch 1 (two arcs per turn).
    pub regular: bool,
    /// Derivative of the period-fold composition along the orbit.
    pub multiplier: f64,
    pub classification: Stability,
    /// Set when some orbit point lies within the boundary tolerance of a
    /// branch-domain endpoint; membership there is ambiguous.
    pub boundary_adjacent: bool,
}

/// P(y) - y on the branch containing y.
pub fn displacement(partition: &BranchPartition, y: f64) -> Result<f64> {
    Ok(partition.eval(y)?.0 - y)
}

/// Outcome of the closed-form regular-cycle analysis for an affine reset.
#[derive(Debug, Clone, PartialEq)]
pub enum AffineCycleOutcome {
    Cycle(LimitCycle),
    /// The branch-1 fixed point exists but falls outside the branch-1
    /// domain interior, so no regular cycle passes through it.
    FixedPointOutsideDomain { y: f64 },
    /// |slope| = 1 with nonzero branch-1 offset: displacement never vanishes.
    NeutralNoCycle,
    /// |slope| = 1 with zero branch-1 offset: the whole branch-1 domain
    /// consists of periodic points.
    NeutralContinuum,
}

/// Closed-form regular-cycle analysis for reset degree 1: the branch-1 map
/// is slope^2 y + offset, so the unique fixed-point candidate is
/// offset / (1 - slope^2).
pub fn affine_regular_cycle(system: &HybridSystem) -> Result<AffineCycleOutcome> {
    let (a, _) = system
        .reset
        .affine()
        .ok_or(Error::WrongDegree { expected: 1, actual: system.reset.degree() })?;
    let offsets = crate::return_map::affine_branch_offsets(system)?;
    let beta1 = offsets[0];
    if a.abs() == 1.0 {
        return Ok(if beta1 == 0.0 {
            AffineCycleOutcome::NeutralContinuum
        } else {
            AffineCycleOutcome::NeutralNoCycle
        });
    }
    let y = beta1 / (1.0 - a * a);
    let partition = build_partition(system)?;
    match partition.branch_at(y) {
        Ok(1) => {
            let multiplier = a * a;
            Ok(AffineCycleOutcome::Cycle(LimitCycle {
                period: 1,
                points: vec![y],
                itinerary: vec![1],
                regular: true,
                multiplier,
                classification: classify(multiplier),
                boundary_adjacent: false,
            }))
        }
        _ => Ok(AffineCycleOutcome::FixedPointOutsideDomain { y }),
    }
}

/// Knobs for the general cycle search.
#[derive(Debug, Clone)]
pub struct CycleSearchConfig {
    /// Largest allowed degree of a composed branch polynomial.
    pub degree_cap: usize,
    /// Residual tolerance for accepting a root as periodic (blended with
    /// magnitude).
    pub residual_tol: f64,
    /// Cycles closer than this in cyclic point-set distance are duplicates.
    pub dedup_tol: f64,
}

impl Default for CycleSearchConfig {
    fn default() -> CycleSearchConfig {
        CycleSearchConfig { degree_cap: 4096, residual_tol: 1e-9, dedup_tol: 1e-8 }
    }
}

/// All limit cycles of period up to `max_period`, found by exact root
/// isolation of branch compositions over admissible itineraries, sorted by
/// (period, smallest point).
pub fn find_cycles(
    partition: &BranchPartition,
    max_period: usize,
) -> Result<Vec<LimitCycle>> {
    find_cycles_with(partition, max_period, &CycleSearchConfig::default())
}

pub fn find_cycles_with(
    partition: &BranchPartition,
    max_period: usize,
    config: &CycleSearchConfig,
) -> Result<Vec<LimitCycle>> {
    let reset_degree = partition.reset().degree();
    let branch_degree = reset_degree * reset_degree;
    let critical_points: Vec<Vec<f64>> = (1..=4)
        .map(|id| partition.branch(id).expr.derivative().real_roots())
        .collect();

    let mut found: Vec<LimitCycle> = Vec::new();
    for period in 1..=max_period {
        // Composed degree (n^2)^period against the cap.
        let mut degree: usize = 1;
        for _ in 0..period {
            degree = degree.saturating_mul(branch_degree.max(1));
            if degree > config.degree_cap {
                return Err(Error::DegreeOverflow { degree, cap: config.degree_cap });
            }
        }
        let mut itinerary = Vec::with_capacity(period);
        search_itineraries(
            partition,
            &critical_points,
            period,
            &mut itinerary,
            &mut found,
            config,
        );
    }
    found.sort_by(|a, b| {
        a.period
            .cmp(&b.period)
            .then(a.points[0].partial_cmp(&b.points[0]).unwrap())
    });
    Ok(found)
}

/// Depth-first itinerary enumeration with forward-image pruning: a prefix
/// whose reachable set dies before completing the loop cannot carry a cycle.
fn search_itineraries(
    partition: &BranchPartition,
    critical_points: &[Vec<f64>],
    period: usize,
    itinerary: &mut Vec<u8>,
    found: &mut Vec<LimitCycle>,
    config: &CycleSearchConfig,
) {
    if itinerary.len() == period {
        if let Some(reachable) = propagate(partition, critical_points, itinerary) {
            let start = &partition.branch(itinerary[0]).domain;
            let closes = reachable
                .iter()
                .any(|r| start.iter().any(|s| intervals_overlap(r, s)));
            if closes {
                isolate_itinerary_cycles(partition, itinerary, found, config);
            }
        }
        return;
    }
    for id in 1..=4u8 {
        itinerary.push(id);
        if propagate(partition, critical_points, itinerary).is_some() {
            search_itineraries(partition, critical_points, period, itinerary, found, config);
        }
        itinerary.pop();
    }
}

fn intervals_overlap(a: &Interval, b: &Interval) -> bool {
    a.lo < b.hi && b.lo < a.hi
}

/// Overapproximate the set reachable by following `itinerary` from its first
/// branch domain; None when it dies (no admissible start at all).
fn propagate(
    partition: &BranchPartition,
    critical_points: &[Vec<f64>],
    itinerary: &[u8],
) -> Option<Vec<Interval>> {
    let mut current: Vec<Interval> = partition.branch(itinerary[0]).domain.clone();
    if current.is_empty() {
        return None;
    }
    for w in itinerary.windows(2) {
        let (id, next) = (w[0], w[1]);
        let next_domain = &partition.branch(next).domain;
        let mut advanced: Vec<Interval> = Vec::new();
        for iv in &current {
            let (lo, hi) = branch_image(partition, id, iv, &critical_points[(id - 1) as usize]);
            for target in next_domain {
                let ilo = lo.max(target.lo);
                let ihi = hi.min(target.hi);
                if ilo < ihi {
                    advanced.push(Interval::new(ilo, ihi));
                }
            }
        }
        if advanced.is_empty() {
            return None;
        }
        current = advanced;
    }
    Some(current)
}

/// Image bounds of an open interval under one branch polynomial: extrema
/// occur at endpoints, interior critical points, or at infinity.
fn branch_image(
    partition: &BranchPartition,
    id: u8,
    iv: &Interval,
    criticals: &[f64],
) -> (f64, f64) {
    let expr = &partition.branch(id).expr;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut take = |v: f64| {
        lo = lo.min(v);
        hi = hi.max(v);
    };
    for e in [iv.lo, iv.hi] {
        if e.is_finite() {
            take(partition.eval_branch(id, e));
        } else {
            // Limit at the infinite end from the leading term.
            let coeffs = expr.coeffs();
            let lead = coeffs.last().unwrap();
            let deg = expr.degree();
            let lead_positive = *lead > num_traits::Zero::zero();
            let sign = if e > 0.0 {
                lead_positive
            } else {
                lead_positive == (deg % 2 == 0)
            };
            take(if sign { f64::INFINITY } else { f64::NEG_INFINITY });
        }
    }
    for &c in criticals {
        if iv.contains(c) {
            take(partition.eval_branch(id, c));
        }
    }
    let margin = 1e-9 * (1.0 + lo.abs().min(hi.abs()));
    (lo - margin, hi + margin)
}

/// Solve P_itinerary(y) = y exactly and verify each root's orbit.
fn isolate_itinerary_cycles(
    partition: &BranchPartition,
    itinerary: &[u8],
    found: &mut Vec<LimitCycle>,
    config: &CycleSearchConfig,
) {
    let mut composed = partition.branch(itinerary[0]).expr.clone();
    for &id in &itinerary[1..] {
        composed = partition.branch(id).expr.compose(&composed);
    }
    let equation = composed.sub(&Poly::identity());
    if equation.is_zero() {
        // A continuum of periodic points is not a set of isolated cycles.
        return;
    }
    'roots: for root in equation.real_roots() {
        let period = itinerary.len();
        let mut points = Vec::with_capacity(period);
        let mut boundary_adjacent = false;
        let mut y = root;
        for &expected in itinerary {
            match partition.branch_at(y) {
                Ok(id) if id == expected => {}
                Err(Error::BoundaryPoint { candidates, .. })
                    if candidates.iter().any(|c| c.branch == expected) =>
                {
                    boundary_adjacent = true;
                }
                _ => continue 'roots,
            }
            points.push(y);
            y = partition.eval_branch(expected, y);
        }
        if (y - root).abs() > config.residual_tol * (1.0 + root.abs()) {
            continue;
        }
        if minimal_period(&points, config.residual_tol) < period {
            continue;
        }
        let multiplier: f64 = itinerary
            .iter()
            .zip(&points)
            .map(|(&id, &p)| partition.derivative_branch(id, p))
            .product();
        let mut cycle = LimitCycle {
            period,
            points,
            itinerary: itinerary.to_vec(),
            regular: itinerary.iter().all(|&id| id == 1),
            multiplier,
            classification: classify(multiplier),
            boundary_adjacent,
        };
        canonical_rotation(&mut cycle);
        let duplicate = found.iter().any(|existing| {
            existing.period == cycle.period
                && cyclic_distance(&existing.points, &cycle.points) <= config.dedup_tol
        });
        if !duplicate {
            found.push(cycle);
        }
    }
}

/// Smallest d dividing the period such that the orbit repeats with lag d.
fn minimal_period(points: &[f64], tol: f64) -> usize {
    let k = points.len();
    'next: for d in 1..k {
        if k % d != 0 {
            continue;
        }
        for j in 0..k {
            let a = points[j];
            let b = points[(j + d) % k];
            if (a - b).abs() > tol * (1.0 + a.abs()) {
                continue 'next;
            }
        }
        return d;
    }
    k
}

/// Rotate so that points[0] is the smallest height; keeps output order
/// deterministic.
fn canonical_rotation(cycle: &mut LimitCycle) {
    let mut best = 0;
    for i in 1..cycle.points.len() {
        if cycle.points[i] < cycle.points[best] {
            best = i;
        }
    }
    cycle.points.rotate_left(best);
    cycle.itinerary.rotate_left(best);
}

fn cyclic_distance(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len();
    let mut best = f64::INFINITY;
    for r in 0..k {
        let mut worst: f64 = 0.0;
        for j in 0..k {
            worst = worst.max((a[j] - b[(j + r) % k]).abs());
        }
        best = best.min(worst);
    }
    best
}
