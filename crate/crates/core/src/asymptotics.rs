//! Long-term bounds for return-map orbits and a fate classifier.
//!
//! For an affine contracting reset every orbit is eventually trapped in a
//! symmetric band around the origin of the switching line; for expanding or
//! higher-degree resets there is a threshold beyond which every branch
//! strictly increases magnitude. The classifier iterates the return map and
//! certifies one of these behaviors (or convergence to a known cycle) with
//! finite-window hysteresis.

use crate::cycles::{find_cycles_with, CycleSearchConfig, LimitCycle};
use crate::error::{Error, Result};
use crate::model::HybridSystem;
use crate::return_map::{affine_branch_offsets, branch_expressions, build_partition, BranchPartition};

/// Magnitude beyond which growth is treated as escape without waiting for
/// the full confirmation window (quartic-type cascades overflow f64 long
/// before a 10-step window completes).
const FAST_ESCAPE: f64 = 1e50;

/// Confirmation window for the trapped/escape verdicts.
const STREAK: usize = 10;

/// For an affine contracting reset (|slope| < 1), the radius R such that
/// every orbit satisfies limsup |P^j(y)| <= R: the fixed point of the
/// magnitude recursion |P(y)| <= slope^2 |y| + beta.
pub fn trapping_radius(system: &HybridSystem) -> Result<f64> {
    let (a, _) = system
        .reset
        .affine()
        .ok_or_else(|| Error::WrongRegime("trapping radius needs an affine reset".into()))?;
    if a.abs() >= 1.0 {
        return Err(Error::WrongRegime(format!(
            "trapping radius needs |slope| < 1, got {a}"
        )));
    }
    let beta = max_offset(system)?;
    Ok(beta / (1.0 - a * a))
}

/// Threshold Y0 such that |P(y)| > |y| on every branch whenever |y| > Y0.
///
/// Affine expanding case: beta / (slope^2 - 1). Degree >= 2: beyond the
/// largest-magnitude real root of P_j(y) -+ y over all branches, |P_j(y)|
/// can never equal |y| again, and the leading term dominates, so the
/// strict-growth region is exactly the complement of the root span.
pub fn escape_threshold(system: &HybridSystem) -> Result<f64> {
    if let Some((a, _)) = system.reset.affine() {
        if a.abs() <= 1.0 {
            return Err(Error::WrongRegime(format!(
                "escape threshold needs |slope| > 1 for an affine reset, got {a}"
            )));
        }
        let beta = max_offset(system)?;
        return Ok(beta / (a * a - 1.0));
    }
    let mut bound: f64 = 0.0;
    for expr in branch_expressions(system) {
        for diff in [expr.sub(&crate::poly::Poly::identity()), expr.add(&crate::poly::Poly::identity())] {
            for root in diff.real_roots() {
                bound = bound.max(root.abs());
            }
        }
    }
    // Sanity pass: strict growth just beyond the threshold on both sides.
    let exprs = branch_expressions(system);
    for k in 1..=8 {
        let m = bound + k as f64 * 0.125 * (1.0 + bound);
        for y in [m, -m] {
            for expr in &exprs {
                debug_assert!(expr.eval_f64(y).abs() > y.abs());
            }
        }
    }
    Ok(bound)
}

fn max_offset(system: &HybridSystem) -> Result<f64> {
    let offsets = affine_branch_offsets(system)?;
    Ok(offsets.iter().fold(0.0f64, |m, b| m.max(b.abs())))
}

/// How an orbit of the return map resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FateVerdict {
    /// Magnitude beyond the escape threshold with sustained growth.
    Escape,
    /// Confined to the trapping band over the confirmation window.
    Trapped,
    /// Within tolerance of a known periodic orbit.
    ConvergedToCycle,
    /// Within tolerance of a periodic orbit that never leaves the switching
    /// line (every branch of its itinerary is the jump-jump branch).
    SigmaConfined,
    /// Budget exhausted, or an exact boundary hit made the branch ambiguous.
    Undetermined,
}

/// Outcome of a fate scan, with the certificate data that justified it.
#[derive(Debug, Clone, PartialEq)]
pub struct FateReport {
    pub verdict: FateVerdict,
    /// The trapping radius or escape threshold in force, when one applies.
    pub bound: Option<f64>,
    pub iterations_used: usize,
    /// Trailing iterates (most recent last).
    pub witness: Option<Vec<f64>>,
}

/// Precomputed material for classifying many starts of one system: the
/// branch partition, the regime bounds, and the short-period cycles.
#[derive(Debug, Clone)]
pub struct FateContext {
    partition: BranchPartition,
    cycles: Vec<LimitCycle>,
    trapping: Option<f64>,
    escape: Option<f64>,
    cycle_tol: f64,
}

impl FateContext {
    pub fn new(system: &HybridSystem) -> Result<FateContext> {
        let partition = build_partition(system)?;
        let trapping = trapping_radius(system).ok();
        let escape = escape_threshold(system).ok();
        // Reference cycles up to period 3, capped so the composed degree
        // stays small; higher periods only sharpen ConvergedToCycle.
        let config = CycleSearchConfig { degree_cap: 256, ..Default::default() };
        let n2 = {
            let n = system.reset.degree();
            n * n
        };
        let mut depth = 0;
        let mut degree = 1usize;
        while depth < 3 {
            degree = degree.saturating_mul(n2.max(1));
            if degree > config.degree_cap {
                break;
            }
            depth += 1;
        }
        let cycles = if depth == 0 {
            Vec::new()
        } else {
            find_cycles_with(&partition, depth, &config)?
        };
        Ok(FateContext { partition, cycles, trapping, escape, cycle_tol: 1e-8 })
    }

    /// Same context with a different cycle-matching tolerance.
    pub fn with_cycle_tol(mut self, tol: f64) -> FateContext {
        self.cycle_tol = tol;
        self
    }

    pub fn partition(&self) -> &BranchPartition {
        &self.partition
    }

    pub fn cycles(&self) -> &[LimitCycle] {
        &self.cycles
    }

    pub fn trapping(&self) -> Option<f64> {
        self.trapping
    }

    pub fn escape(&self) -> Option<f64> {
        self.escape
    }

    fn near_cycle(&self, y: f64) -> Option<&LimitCycle> {
        self.cycles.iter().find(|c| {
            c.points
                .iter()
                .any(|p| (y - p).abs() <= self.cycle_tol * (1.0 + p.abs()))
        })
    }
}

/// Iterate the return map from `y` and certify the orbit's fate.
pub fn orbit_fate(ctx: &FateContext, y: f64, max_iter: usize) -> FateReport {
    let mut witness: Vec<f64> = vec![y];
    let mut current = y;
    let mut trapped_streak = 0usize;
    let mut escape_streak = 0usize;
    let report = |verdict: FateVerdict, bound: Option<f64>, used: usize, w: &[f64]| FateReport {
        verdict,
        bound,
        iterations_used: used,
        witness: Some(w[w.len().saturating_sub(16)..].to_vec()),
    };

    for j in 0..=max_iter {
        if let Some(cycle) = ctx.near_cycle(current) {
            let verdict = if cycle.itinerary.iter().all(|&id| id == 4) {
                FateVerdict::SigmaConfined
            } else {
                FateVerdict::ConvergedToCycle
            };
            return report(verdict, None, j, &witness);
        }
        if let Some(radius) = ctx.trapping {
            if current.abs() <= radius + 1e-6 {
                trapped_streak += 1;
                if trapped_streak >= STREAK {
                    return report(FateVerdict::Trapped, Some(radius), j, &witness);
                }
            } else {
                trapped_streak = 0;
            }
        }
        if j == max_iter {
            break;
        }
        let next = match ctx.partition.eval(current) {
            Ok((v, _)) => v,
            Err(_) => return report(FateVerdict::Undetermined, None, j, &witness),
        };
        if !next.is_finite() {
            let verdict = if ctx.escape.is_some() {
                FateVerdict::Escape
            } else {
                FateVerdict::Undetermined
            };
            return report(verdict, ctx.escape, j + 1, &witness);
        }
        if let Some(threshold) = ctx.escape {
            let growing = next.abs() > current.abs();
            if next.abs() > threshold && growing {
                escape_streak += 1;
                if escape_streak >= STREAK || next.abs() > FAST_ESCAPE {
                    witness.push(next);
                    return report(FateVerdict::Escape, Some(threshold), j + 1, &witness);
                }
            } else {
                escape_streak = 0;
            }
        }
        witness.push(next);
        if witness.len() > 64 {
            witness.drain(..witness.len() - 32);
        }
        current = next;
    }
    report(FateVerdict::Undetermined, None, max_iter, &witness)
}
