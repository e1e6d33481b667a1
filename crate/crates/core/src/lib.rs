//! Analysis toolkit for planar hybrid systems assembled from two linear
//! centers separated by the vertical switching line x = 0 and glued by a
//! polynomial reset applied whenever an orbit reaches the line.
//!
//! The crate provides:
//!
//! - exact closed-form flow of each linear center and its conserved quadratic
//!   ([`flow`]),
//! - the piecewise-polynomial return map induced on the switching line,
//!   including the partition of the line into its four branch domains
//!   ([`return_map`]),
//! - limit-cycle search and classification over branch itineraries
//!   ([`cycles`]),
//! - long-term bounds: trapping radius in the contracting affine regime and
//!   escape thresholds in the expanding regimes ([`asymptotics`]),
//! - an exact binary-expansion toolkit for the tent map together with a
//!   chaos certificate for the built-in demo system whose return map is the
//!   square of the full logistic map ([`chaos`]),
//! - an event-level orbit engine that records arcs, jumps, and stops
//!   ([`orbit`]),
//! - exact polynomial arithmetic and real-root isolation used by all of the
//!   above ([`poly`]).
//!
//! All floating-point tolerances default to a 1e-9 absolute/relative blend
//! and are configurable on the structures that use them.

pub mod asymptotics;
pub mod chaos;
pub mod cycles;
pub mod error;
pub mod flow;
pub mod model;
pub mod orbit;
pub mod poly;
pub mod return_map;

pub use asymptotics::{escape_threshold, orbit_fate, trapping_radius, FateContext, FateReport, FateVerdict};
pub use chaos::{
    certify_chaos, certify_chaos_with, chaotic_demo_system, dense_orbit_prefix, logistic,
    logistic_periodic_points, tent, tent_exact_iterate, tent_to_logistic, BitString,
    ChaosCertificate, ChaosConfig,
};
pub use cycles::{
    affine_regular_cycle, classify, displacement, find_cycles, find_cycles_with,
    AffineCycleOutcome, CycleSearchConfig, LimitCycle, Stability,
};
pub use error::{BranchCandidate, Error, Result};
pub use flow::{
    ellipse_sigma_intersections, flow, sample_arc, sigma_chord, time_of_flight, FlowArc,
    SigmaCrossings,
};
pub use model::{HybridSystem, LinearCenter, PlanePoint, ResetPolynomial, Side, Sign};
pub use orbit::{
    first_return_numeric, global_orbit, global_orbit_with, step, validate_trace, OrbitBudget,
    OrbitEvent, OrbitEventKind, OrbitTrace, SigmaState, StopReason, Termination,
};
pub use poly::Poly;
pub use return_map::{
    affine_branch_offsets, branch_expressions, build_partition, eval_return, return_derivative,
    transversal_intervals, BranchPartition, FoldKind, Interval, ReturnBranch, TransversalIntervals,
};
