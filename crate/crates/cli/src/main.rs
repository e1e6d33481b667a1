//! Analyze planar systems built from two linear centers joined by a
//! polynomial reset across the switching line: branch partition of the
//! return map, limit-cycle search, long-run fate scans, global-orbit
//! simulation, cobweb data, and the chaos certificate.
//!
//! Structured results print as JSON, series as CSV; identical inputs yield
//! byte-identical output. Exit codes: 0 success, 2 bad spec or flags, 3 an
//! undetermined verdict under --strict.

mod emit;
mod spec;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hybrid_centers::{
    affine_regular_cycle, build_partition, certify_chaos_with, chaotic_demo_system,
    dense_orbit_prefix, find_cycles_with, global_orbit_with, orbit_fate, tent_exact_iterate,
    AffineCycleOutcome, ChaosConfig, CycleSearchConfig, FateContext, FateVerdict, HybridSystem,
    Interval, LimitCycle, OrbitBudget, OrbitEventKind, PlanePoint, Side, Stability, StopReason,
    Termination,
};

use emit::{fmt_float, json_array, json_bool, json_num_array, JsonObject};
use spec::{AnalysisBlock, SpecFile};

const EXIT_ANALYSIS: u8 = 1;
const EXIT_SPEC: u8 = 2;
const EXIT_UNDETERMINED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hybrid-centers",
    version,
    about = "Return maps, limit cycles, and chaos certificates for planar \
             two-center systems with a polynomial reset",
    after_help = "Environment: HYBRID_CENTERS_TOL overrides the default \
                  matching tolerance of the analysis commands."
)]
struct Cli {
    /// Print the canonical form of the parsed spec and exit.
    #[arg(long, global = true)]
    print_spec: bool,
    /// Seed for randomized scans (overrides the spec's analysis block).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exit with status 3 when a verdict comes back undetermined.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the return map's branch partition as JSON.
    Partition { spec: PathBuf },
    /// Find limit cycles up to a period bound (JSON).
    Cycles {
        spec: PathBuf,
        #[arg(long)]
        max_period: Option<usize>,
    },
    /// Classify long-run fate over a grid of initial heights (CSV).
    Fate {
        spec: PathBuf,
        /// Grid of starting heights as lo:hi:count.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Iteration budget per start.
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Drive a global orbit and emit its event trace (CSV).
    Simulate {
        spec: PathBuf,
        /// Initial point as x,y.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// Side to start through when the point lies on the switching line
        /// (1 or 2).
        #[arg(long, default_value_t = 1)]
        which: u8,
        #[arg(long)]
        max_events: Option<usize>,
        #[arg(long)]
        max_time: Option<f64>,
        #[arg(long)]
        escape_radius: Option<f64>,
        /// Points sampled per arc for rendering outputs.
        #[arg(long)]
        arc_samples: Option<usize>,
        /// Write a figure of the arcs and jump chords.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write sampled arc points as CSV rows (t, x, y).
        #[arg(long)]
        points_csv: Option<PathBuf>,
    },
    /// Tabulate the return map for cobweb plots (CSV).
    Cobweb {
        spec: PathBuf,
        /// Height range as lo:hi.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Certify chaos for the built-in demo system (or a supplied spec) and
    /// print the certificate as JSON.
    ChaosDemo {
        spec: Option<PathBuf>,
        /// Write the dense-orbit witness values as CSV rows (step, value).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn spec(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_SPEC, message: message.into() }
    }

    fn analysis(e: hybrid_centers::Error) -> Failure {
        Failure { code: EXIT_ANALYSIS, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let tol = env_tol()?;
    let loaded = match &cli.command {
        Command::Partition { spec }
        | Command::Cycles { spec, .. }
        | Command::Fate { spec, .. }
        | Command::Simulate { spec, .. }
        | Command::Cobweb { spec, .. } => spec::load(spec).map_err(Failure::spec)?,
        Command::ChaosDemo { spec: Some(spec), .. } => spec::load(spec).map_err(Failure::spec)?,
        Command::ChaosDemo { spec: None, .. } => {
            let demo = chaotic_demo_system();
            SpecFile {
                center1: demo.center1,
                center2: demo.center2,
                reset: demo.reset,
                analysis: AnalysisBlock::default(),
            }
        }
    };
    if cli.print_spec {
        println!("{}", spec::canonical_json(&loaded));
        return Ok(ExitCode::SUCCESS);
    }
    let system = loaded.system();
    let analysis = loaded.analysis.clone();
    let tol = tol.or(analysis.tol);
    match cli.command {
        Command::Partition { .. } => cmd_partition(&system, tol),
        Command::Cycles { max_period, .. } => {
            let max_period = max_period.or(analysis.max_period).unwrap_or(3);
            cmd_cycles(&system, max_period, tol)
        }
        Command::Fate { grid, max_iter, .. } => {
            let max_iter = max_iter.or(analysis.max_iter).unwrap_or(1000);
            cmd_fate(&system, &grid, max_iter, tol, cli.strict)
        }
        Command::Simulate { q, which, max_events, max_time, escape_radius, arc_samples, svg, points_csv, .. } => {
            let defaults = OrbitBudget::default();
            let budget = OrbitBudget {
                max_events: max_events.or(analysis.max_events).unwrap_or(defaults.max_events),
                max_time: max_time.or(analysis.max_time).unwrap_or(defaults.max_time),
                escape_radius: escape_radius
                    .or(analysis.escape_radius)
                    .unwrap_or(defaults.escape_radius),
                arc_samples: arc_samples.or(analysis.arc_samples).unwrap_or(defaults.arc_samples),
            };
            cmd_simulate(&system, &q, which, &budget, svg.as_deref(), points_csv.as_deref())
        }
        Command::Cobweb { range, samples, .. } => cmd_cobweb(&system, &range, samples, tol),
        Command::ChaosDemo { csv, .. } => {
            let config = ChaosConfig {
                seed: cli.seed.or(analysis.seed).unwrap_or(ChaosConfig::default().seed),
                ..ChaosConfig::default()
            };
            cmd_chaos_demo(&system, &config, csv.as_deref())
        }
    }
}

fn env_tol() -> Result<Option<f64>, Failure> {
    match std::env::var("HYBRID_CENTERS_TOL") {
        Ok(raw) => {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| Failure::spec(format!("HYBRID_CENTERS_TOL is not a float: {raw:?}")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Failure::spec("HYBRID_CENTERS_TOL must be a positive float"));
            }
            Ok(Some(v))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Failure::spec(format!("HYBRID_CENTERS_TOL: {e}"))),
    }
}

fn interval_json(iv: &Interval) -> String {
    JsonObject::new().num("lo", iv.lo).num("hi", iv.hi).finish()
}

fn stability_str(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
        Stability::Nonhyperbolic => "nonhyperbolic",
    }
}

fn verdict_str(v: FateVerdict) -> &'static str {
    match v {
        FateVerdict::Escape => "escape",
        FateVerdict::Trapped => "trapped",
        FateVerdict::ConvergedToCycle => "converged_to_cycle",
        FateVerdict::SigmaConfined => "sigma_confined",
        FateVerdict::Undetermined => "undetermined",
    }
}

fn cycle_json(c: &LimitCycle) -> String {
    JsonObject::new()
        .field("period", &c.period.to_string())
        .field("points", &json_num_array(c.points.iter().copied()))
        .field("itinerary", &json_array(c.itinerary.iter().map(|id| id.to_string())))
        .field("regular", json_bool(c.regular))
        .num("multiplier", c.multiplier)
        .field("classification", &format!("\"{}\"", stability_str(c.classification)))
        .field("boundary_adjacent", json_bool(c.boundary_adjacent))
        .finish()
}

fn cmd_partition(system: &HybridSystem, tol: Option<f64>) -> Result<ExitCode, Failure> {
    let mut partition = build_partition(system).map_err(Failure::analysis)?;
    if let Some(t) = tol {
        partition = partition.with_boundary_tol(t);
    }
    let branches = json_array(partition.branches().iter().map(|b| {
        JsonObject::new()
            .field("id", &b.id.to_string())
            .field("domain", &json_array(b.domain.iter().map(interval_json)))
            .field("coeffs", &json_num_array(b.expr.to_f64_coeffs()))
            .finish()
    }));
    let out = JsonObject::new()
        .num("eta1", partition.chord_offset(Side::One))
        .num("eta2", partition.chord_offset(Side::Two))
        .field("boundary_points", &json_num_array(partition.boundary_points().iter().copied()))
        .field("branches", &branches)
        .finish();
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_cycles(system: &HybridSystem, max_period: usize, tol: Option<f64>) -> Result<ExitCode, Failure> {
    let partition = build_partition(system).map_err(Failure::analysis)?;
    let mut config = CycleSearchConfig::default();
    if let Some(t) = tol {
        config.residual_tol = t;
    }
    let cycles = find_cycles_with(&partition, max_period, &config).map_err(Failure::analysis)?;
    let affine = if system.reset.degree() == 1 {
        let outcome = affine_regular_cycle(system).map_err(Failure::analysis)?;
        let slope = system.reset.affine().unwrap().0;
        let mut obj = JsonObject::new().num("slope", slope);
        obj = match outcome {
            AffineCycleOutcome::Cycle(cycle) => {
                obj.field("outcome", "\"cycle\"").field("cycle", &cycle_json(&cycle))
            }
            AffineCycleOutcome::FixedPointOutsideDomain { y } => {
                obj.field("outcome", "\"fixed_point_outside_domain\"").num("fixed_point", y)
            }
            AffineCycleOutcome::NeutralNoCycle => obj
                .field("outcome", "\"neutral_no_cycle\"")
                .field("dichotomy", "\"no_regular_periodic_orbits\""),
            AffineCycleOutcome::NeutralContinuum => obj
                .field("outcome", "\"neutral_continuum\"")
                .field("dichotomy", "\"all_branch_one_orbits_periodic\""),
        };
        obj.finish()
    } else {
        "null".into()
    };
    let out = JsonObject::new()
        .field("max_period", &max_period.to_string())
        .field("count", &cycles.len().to_string())
        .field("cycles", &json_array(cycles.iter().map(cycle_json)))
        .field("affine", &affine)
        .finish();
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let fail = || Failure::spec(format!("grid must be lo:hi:count, got {s:?}"));
    if parts.len() != 3 {
        return Err(fail());
    }
    let lo: f64 = parts[0].parse().map_err(|_| fail())?;
    let hi: f64 = parts[1].parse().map_err(|_| fail())?;
    let count: usize = parts[2].parse().map_err(|_| fail())?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(fail());
    }
    Ok((lo, hi, count))
}

fn cmd_fate(
    system: &HybridSystem,
    grid: &str,
    max_iter: usize,
    tol: Option<f64>,
    strict: bool,
) -> Result<ExitCode, Failure> {
    let (lo, hi, count) = parse_grid(grid)?;
    let mut ctx = FateContext::new(system).map_err(Failure::analysis)?;
    if let Some(t) = tol {
        ctx = ctx.with_cycle_tol(t);
    }
    let mut out = String::from("y,verdict,iterations,bound\n");
    let mut any_undetermined = false;
    for i in 0..count {
        let y = if count == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (count - 1) as f64
        };
        let report = orbit_fate(&ctx, y, max_iter);
        any_undetermined |= report.verdict == FateVerdict::Undetermined;
        let bound = report.bound.map(fmt_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(y),
            verdict_str(report.verdict),
            report.iterations_used,
            bound
        ));
    }
    print!("{out}");
    if strict && any_undetermined {
        eprintln!("error: undetermined verdicts in the scan");
        return Ok(ExitCode::from(EXIT_UNDETERMINED));
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_point(s: &str) -> Result<PlanePoint, Failure> {
    let fail = || Failure::spec(format!("point must be x,y with finite floats, got {s:?}"));
    let (x, y) = s.split_once(',').ok_or_else(fail)?;
    let x: f64 = x.trim().parse().map_err(|_| fail())?;
    let y: f64 = y.trim().parse().map_err(|_| fail())?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(fail());
    }
    Ok(PlanePoint::new(x, y))
}

fn termination_str(t: Termination) -> &'static str {
    match t {
        Termination::Budget => "budget",
        Termination::Escape => "escape",
        Termination::SigmaConfined => "sigma_confined",
        Termination::Equilibrium => "equilibrium",
        Termination::Closed => "closed",
    }
}

fn stop_str(r: StopReason) -> &'static str {
    match r {
        StopReason::Escape => "escape",
        StopReason::SigmaConfined => "sigma_confined",
        StopReason::Equilibrium => "equilibrium",
    }
}

fn cmd_simulate(
    system: &HybridSystem,
    q: &str,
    which: u8,
    budget: &OrbitBudget,
    svg_path: Option<&std::path::Path>,
    points_path: Option<&std::path::Path>,
) -> Result<ExitCode, Failure> {
    let q = parse_point(q)?;
    let side = match which {
        1 => Side::One,
        2 => Side::Two,
        other => return Err(Failure::spec(format!("--which must be 1 or 2, got {other}"))),
    };
    let trace = global_orbit_with(system, q, side, budget);

    let mut out = String::from("event_index,kind,t_start,duration,x,y\n");
    let mut t = 0.0;
    for event in &trace.events {
        match &event.kind {
            OrbitEventKind::Arc(arc) => {
                out.push_str(&format!(
                    "{},arc,{},{},{},{}\n",
                    event.index,
                    fmt_float(t),
                    fmt_float(arc.duration),
                    fmt_float(arc.start.x),
                    fmt_float(arc.start.y)
                ));
                t += arc.duration;
            }
            OrbitEventKind::Jump { to_y, .. } => {
                out.push_str(&format!(
                    "{},jump,{},{},{},{}\n",
                    event.index,
                    fmt_float(t),
                    fmt_float(0.0),
                    fmt_float(0.0),
                    fmt_float(*to_y)
                ));
            }
            OrbitEventKind::Stop(reason) => {
                out.push_str(&format!(
                    "{},stop:{},{},{},,\n",
                    event.index,
                    stop_str(*reason),
                    fmt_float(t),
                    fmt_float(0.0)
                ));
            }
        }
    }
    print!("{out}");
    eprintln!(
        "terminated: {} after {} events, total time {}",
        termination_str(trace.terminated),
        trace.events.len(),
        fmt_float(trace.total_time)
    );

    if let Some(path) = points_path {
        let mut rows = String::from("t,x,y\n");
        let mut t0 = 0.0;
        for event in &trace.events {
            if let OrbitEventKind::Arc(arc) = &event.kind {
                let n = arc.samples.len();
                for (i, p) in arc.samples.iter().enumerate() {
                    let ti = if n > 1 {
                        t0 + arc.duration * i as f64 / (n - 1) as f64
                    } else {
                        t0
                    };
                    rows.push_str(&format!(
                        "{},{},{}\n",
                        fmt_float(ti),
                        fmt_float(p.x),
                        fmt_float(p.y)
                    ));
                }
                t0 += arc.duration;
            }
        }
        std::fs::write(path, rows)
            .map_err(|e| Failure::spec(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = svg_path {
        std::fs::write(path, svg::render(&trace))
            .map_err(|e| Failure::spec(format!("{}: {e}", path.display())))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_range(s: &str) -> Result<(f64, f64), Failure> {
    let fail = || Failure::spec(format!("range must be lo:hi with finite floats, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(fail)?;
    let lo: f64 = lo.parse().map_err(|_| fail())?;
    let hi: f64 = hi.parse().map_err(|_| fail())?;
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(fail());
    }
    Ok((lo, hi))
}

fn cmd_cobweb(
    system: &HybridSystem,
    range: &str,
    samples: usize,
    tol: Option<f64>,
) -> Result<ExitCode, Failure> {
    let (lo, hi) = parse_range(range)?;
    if samples < 2 {
        return Err(Failure::spec("--samples must be at least 2"));
    }
    let mut partition = build_partition(system).map_err(Failure::analysis)?;
    if let Some(t) = tol {
        partition = partition.with_boundary_tol(t);
    }
    let mut out = String::from("y,value,branch\n");
    for i in 0..samples {
        let y = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        // Heights on a branch boundary have no single branch; skip them.
        if let Ok((value, branch)) = partition.eval(y) {
            out.push_str(&format!("{},{},{branch}\n", fmt_float(y), fmt_float(value)));
        }
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_chaos_demo(
    system: &HybridSystem,
    config: &ChaosConfig,
    csv_path: Option<&std::path::Path>,
) -> Result<ExitCode, Failure> {
    let cert = certify_chaos_with(system, config);
    let out = JsonObject::new()
        .field("coefficient_match", json_bool(cert.coefficient_match))
        .field("interval_invariant", json_bool(cert.interval_invariant))
        .field("periodic_density_depth", &cert.periodic_density_depth.to_string())
        .field("transitivity_blocks", &cert.transitivity_blocks.to_string())
        .num("sensitivity_estimate", cert.sensitivity_estimate)
        .field("passes", json_bool(cert.passes()))
        .finish();
    println!("{out}");

    if let Some(path) = csv_path {
        let seed = dense_orbit_prefix(config.transitivity_block_len)
            .map_err(Failure::analysis)?;
        let mut rows = String::from("step,value\n");
        for k in 0..seed.len() {
            let iterate = tent_exact_iterate(&seed, k).map_err(Failure::analysis)?;
            rows.push_str(&format!("{k},{}\n", fmt_float(iterate.value())));
        }
        std::fs::write(path, rows)
            .map_err(|e| Failure::spec(format!("{}: {e}", path.display())))?;
    }
    Ok(ExitCode::SUCCESS)
}
