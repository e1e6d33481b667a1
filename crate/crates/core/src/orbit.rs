//! Global orbit construction: flow arcs joined by reset jumps, entry
//! attempts alternating between the two sides, and detection of orbits that
//! never leave the switching line.
//!
//! The driver realizes the hybrid semantics on the line x = 0: an arc
//! through one side ends on the line and fires the reset unconditionally;
//! after a reset the other side is attempted, entering when the height lies
//! in that side's entering interval (extended through a visible fold) and
//! firing the reset again otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{ellipse_sigma_intersections, flow, sample_arc, time_between, FlowArc, SigmaCrossings};
use crate::model::{HybridSystem, PlanePoint, Side};
use crate::return_map::{transversal_intervals, FoldKind};

/// A point of the switching line together with what the orbit is doing
/// there: attempting to enter `side` (after a reset), or just landed from an
/// arc through `side` with the reset still pending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaState {
    pub y: f64,
    pub side: Side,
    pub arrived_by_arc: bool,
}

impl SigmaState {
    /// Entry attempt at height y on the given side.
    pub fn attempting(y: f64, side: Side) -> SigmaState {
        SigmaState { y, side, arrived_by_arc: false }
    }
}

/// Why a trace emitted its final explicit stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Escape,
    SigmaConfined,
    Equilibrium,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrbitEventKind {
    Arc(FlowArc),
    Jump { from_y: f64, to_y: f64 },
    Stop(StopReason),
}

/// One piece of a global orbit, numbered in concatenation order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitEvent {
    pub index: usize,
    pub kind: OrbitEventKind,
}

/// Why the driver stopped extending the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// Event or time budget exhausted.
    Budget,
    /// Height magnitude left the escape radius.
    Escape,
    /// A jump-only state repeated: the orbit never leaves the line again.
    SigmaConfined,
    /// The orbit reached an equilibrium sitting on the line.
    Equilibrium,
    /// The state returned to the initial state after at least one arc (or a
    /// closed ellipse never meets the line).
    Closed,
}

/// Limits for the orbit driver.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OrbitBudget {
    pub max_events: usize,
    pub max_time: f64,
    /// |y| beyond this terminates as escape.
    pub escape_radius: f64,
    /// Points per rendered arc (0 skips sampling).
    pub arc_samples: usize,
}

impl Default for OrbitBudget {
    fn default() -> OrbitBudget {
        OrbitBudget { max_events: 512, max_time: 1e4, escape_radius: 1e9, arc_samples: 33 }
    }
}

/// An orbit as the ordered concatenation of arcs, jumps, and a possible
/// explicit stop; jumps take no time.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub initial: PlanePoint,
    pub events: Vec<OrbitEvent>,
    pub total_time: f64,
    pub terminated: Termination,
}

/// Resolve one event at a switching-line state: the pending reset after an
/// arc, an entering arc, or a failed-entry reset. Returns the event and the
/// successor state.
pub fn step(
    system: &HybridSystem,
    state: &SigmaState,
    arc_samples: usize,
) -> Result<(OrbitEventKind, SigmaState)> {
    let jump = |y: f64, side: Side| {
        let to = system.reset.eval(y);
        (OrbitEventKind::Jump { from_y: y, to_y: to }, SigmaState::attempting(to, side.other()))
    };
    if state.arrived_by_arc {
        return Ok(jump(state.y, state.side));
    }
    let center = system.center(state.side);
    let equilibrium = center.equilibrium();
    if equilibrium.x == 0.0 && state.y == equilibrium.y {
        return Err(Error::EquilibriumReached { y: state.y });
    }
    let intervals = transversal_intervals(center, state.side);
    let enters = intervals.entering_contains(state.y)
        || (state.y == intervals.fold && intervals.fold_kind == FoldKind::Visible);
    if enters {
        let arc = sample_arc(center, state.y, state.side, arc_samples)?;
        let landing = SigmaState { y: arc.end.y, side: state.side, arrived_by_arc: true };
        Ok((OrbitEventKind::Arc(arc), landing))
    } else {
        Ok(jump(state.y, state.side))
    }
}

/// Drive a global orbit from `q` under default budgets; `which` picks the
/// side attempted first when `q` lies on the switching line.
pub fn global_orbit(system: &HybridSystem, q: PlanePoint, which: Side) -> OrbitTrace {
    global_orbit_with(system, q, which, &OrbitBudget::default())
}

pub fn global_orbit_with(
    system: &HybridSystem,
    q: PlanePoint,
    which: Side,
    budget: &OrbitBudget,
) -> OrbitTrace {
    let mut events: Vec<OrbitEvent> = Vec::new();
    let mut total_time = 0.0f64;
    let push = |events: &mut Vec<OrbitEvent>, kind: OrbitEventKind| {
        let index = events.len();
        events.push(OrbitEvent { index, kind });
    };

    let mut state: SigmaState;
    let mut arcs_seen = 0usize;
    // Entry-attempt states visited since the last arc, for jump-loop
    // detection.
    let mut jump_chain: Vec<(f64, Side)> = Vec::new();

    if q.x != 0.0 {
        // Off-line start: flow inside the side containing q until the line
        // is reached (or never, when the level set misses it).
        let side = if q.x < 0.0 { Side::One } else { Side::Two };
        let center = system.center(side);
        let e = center.equilibrium();
        if (q.x - e.x).abs() + (q.y - e.y).abs() <= 1e-12 * (1.0 + q.x.abs() + q.y.abs()) {
            push(&mut events, OrbitEventKind::Stop(StopReason::Equilibrium));
            return OrbitTrace { initial: q, events, total_time, terminated: Termination::Equilibrium };
        }
        let hit = match ellipse_sigma_intersections(center, q) {
            SigmaCrossings::Empty => None,
            SigmaCrossings::Tangent(y) => Some(y),
            SigmaCrossings::Pair(y1, y2) => {
                let t1 = time_between(center, q, PlanePoint::new(0.0, y1));
                let t2 = time_between(center, q, PlanePoint::new(0.0, y2));
                Some(if t1 <= t2 { y1 } else { y2 })
            }
        };
        match hit {
            None => {
                // Closed ellipse: one full loop, marked closed.
                let arc = partial_arc(center, side, q, q, center.period(), budget.arc_samples);
                total_time += arc.duration;
                push(&mut events, OrbitEventKind::Arc(arc));
                return OrbitTrace { initial: q, events, total_time, terminated: Termination::Closed };
            }
            Some(y_hit) => {
                let target = PlanePoint::new(0.0, y_hit);
                let duration = time_between(center, q, target);
                let arc = partial_arc(center, side, q, target, duration, budget.arc_samples);
                total_time += arc.duration;
                push(&mut events, OrbitEventKind::Arc(arc));
                arcs_seen = 1;
                state = SigmaState { y: y_hit, side, arrived_by_arc: true };
            }
        }
    } else {
        state = SigmaState::attempting(q.y, which);
        jump_chain.push((state.y, state.side));
    }

    let initial_state = state;
    let mut terminated = Termination::Budget;
    while events.len() < budget.max_events && total_time < budget.max_time {
        let (kind, next) = match step(system, &state, budget.arc_samples) {
            Ok(pair) => pair,
            Err(Error::EquilibriumReached { .. }) => {
                push(&mut events, OrbitEventKind::Stop(StopReason::Equilibrium));
                terminated = Termination::Equilibrium;
                break;
            }
            Err(err) => unreachable!("entry test admitted an impossible arc: {err}"),
        };
        match &kind {
            OrbitEventKind::Arc(arc) => {
                total_time += arc.duration;
                arcs_seen += 1;
                jump_chain.clear();
            }
            OrbitEventKind::Jump { .. } => {}
            OrbitEventKind::Stop(_) => unreachable!("step never emits stops"),
        }
        let was_jump = matches!(kind, OrbitEventKind::Jump { .. });
        push(&mut events, kind);
        if !next.y.is_finite() || next.y.abs() > budget.escape_radius {
            push(&mut events, OrbitEventKind::Stop(StopReason::Escape));
            terminated = Termination::Escape;
            break;
        }
        if was_jump {
            let repeat = jump_chain
                .iter()
                .any(|&(y, s)| s == next.side && (y - next.y).abs() <= 1e-12 * (1.0 + y.abs()));
            if repeat {
                push(&mut events, OrbitEventKind::Stop(StopReason::SigmaConfined));
                terminated = Termination::SigmaConfined;
                break;
            }
            jump_chain.push((next.y, next.side));
        }
        if arcs_seen > 0
            && next.side == initial_state.side
            && next.arrived_by_arc == initial_state.arrived_by_arc
            && (next.y - initial_state.y).abs() <= 1e-9 * (1.0 + initial_state.y.abs())
            && events.len() > 1
        {
            terminated = Termination::Closed;
            break;
        }
        state = next;
    }
    OrbitTrace { initial: q, events, total_time, terminated }
}

/// Arc of `center` from an arbitrary start to an arbitrary end along the
/// flow, with evenly spaced samples.
fn partial_arc(
    center: &crate::model::LinearCenter,
    side: Side,
    start: PlanePoint,
    end: PlanePoint,
    duration: f64,
    sample_count: usize,
) -> FlowArc {
    let mut samples = Vec::new();
    if sample_count >= 2 && duration > 0.0 {
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
    FlowArc { center_side: side, start, end, duration, samples }
}

/// Follow one full return-map cycle from height `y` (attempting side one
/// first): at most two arcs and exactly two resets. Returns the landing
/// height and which of the four branch shapes occurred.
pub fn first_return_numeric(system: &HybridSystem, y: f64) -> Result<(f64, u8)> {
    let mut state = SigmaState::attempting(y, Side::One);
    let mut arcs = 0usize;
    let mut first_was_arc = false;
    let mut jumps = 0usize;
    let mut first_event = true;
    while jumps < 2 {
        if !state.arrived_by_arc {
            let intervals = transversal_intervals(system.center(state.side), state.side);
            if state.y == intervals.fold && intervals.fold_kind != FoldKind::EquilibriumOnSigma {
                return Err(Error::BoundaryPoint { y: state.y, candidates: Vec::new() });
            }
        }
        let (kind, next) = step(system, &state, 0)?;
        match kind {
            OrbitEventKind::Arc(_) => {
                arcs += 1;
                if first_event {
                    first_was_arc = true;
                }
            }
            OrbitEventKind::Jump { .. } => jumps += 1,
            OrbitEventKind::Stop(_) => unreachable!("step never emits stops"),
        }
        first_event = false;
        state = next;
    }
    let code = match (first_was_arc, arcs) {
        (true, 2) => 1,
        (true, 1) => 2,
        (false, 1) => 3,
        (false, 0) => 4,
        _ => unreachable!("a return cycle has at most two arcs"),
    };
    Ok((state.y, code))
}

/// Check the structural invariants of a produced trace: events are numbered
/// consecutively, adjacent events agree on their shared line point, stops
/// are final, the total time is the sum of arc durations, and every arc
/// conserves its center's first integral.
pub fn validate_trace(system: &HybridSystem, trace: &OrbitTrace) -> Result<()> {
    let fail = |msg: String| Err(Error::InvalidParameter(msg));
    let mut time = 0.0f64;
    for (i, event) in trace.events.iter().enumerate() {
        if event.index != i {
            return fail(format!("event {i} carries index {}", event.index));
        }
        if let OrbitEventKind::Stop(_) = event.kind {
            if i + 1 != trace.events.len() {
                return fail(format!("stop event at {i} is not final"));
            }
        }
        if let OrbitEventKind::Arc(arc) = &event.kind {
            time += arc.duration;
            let center = system.center(arc.center_side);
            let h0 = center.first_integral(arc.start);
            let scale = 1.0 + h0.abs();
            for p in arc.samples.iter().chain([arc.start, arc.end].iter()) {
                let h = center.first_integral(*p);
                if (h - h0).abs() > 1e-6 * scale {
                    return fail(format!(
                        "arc {i} drifts off its level set: {h0} vs {h} at ({}, {})",
                        p.x, p.y
                    ));
                }
            }
        }
        if i + 1 < trace.events.len() {
            let next = &trace.events[i + 1].kind;
            let handoff = match (&event.kind, next) {
                (OrbitEventKind::Arc(arc), OrbitEventKind::Jump { from_y, .. }) => {
                    Some((arc.end.y, *from_y))
                }
                (OrbitEventKind::Jump { to_y, .. }, OrbitEventKind::Jump { from_y, .. }) => {
                    Some((*to_y, *from_y))
                }
                (OrbitEventKind::Jump { to_y, .. }, OrbitEventKind::Arc(arc)) => {
                    Some((*to_y, arc.start.y))
                }
                _ => None,
            };
            if let Some((out_y, in_y)) = handoff {
                if (out_y - in_y).abs() > 1e-9 * (1.0 + out_y.abs()) {
                    return fail(format!("events {i},{} disagree: {out_y} vs {in_y}", i + 1));
                }
            }
        }
    }
    if (time - trace.total_time).abs() > 1e-9 * (1.0 + time.abs()) {
        return fail(format!("total time {} is not the arc sum {time}", trace.total_time));
    }
    Ok(())
}
