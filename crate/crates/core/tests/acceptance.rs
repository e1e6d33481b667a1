//! Acceptance gate: one test per criterion, each printing a single pass line
//! (visible with `cargo test --test acceptance -- --nocapture`) and asserting
//! both the mathematical claim and its runtime budget.

mod common;

use std::time::Instant;

use hybrid_centers::{
    branch_expressions, build_partition, chaotic_demo_system, dense_orbit_prefix, escape_threshold,
    find_cycles, first_return_numeric, flow, global_orbit_with, logistic, logistic_periodic_points,
    sigma_chord, tent, tent_exact_iterate, tent_to_logistic, trapping_radius, validate_trace,
    HybridSystem, Interval, LinearCenter, OrbitBudget, PlanePoint, Poly, ResetPolynomial, Side,
    Sign, Stability,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn center(b: f64, omega: f64, delta: i32, c: f64, d: f64) -> LinearCenter {
    let sign = if delta > 0 { Sign::Plus } else { Sign::Minus };
    LinearCenter::new(b, omega, sign, c, d).unwrap()
}

fn symmetric_system(reset: Vec<f64>) -> HybridSystem {
    HybridSystem::new(
        center(0.0, 1.0, 1, 0.0, 0.0),
        center(0.0, 1.0, -1, 0.0, 0.0),
        ResetPolynomial::new(reset).unwrap(),
    )
}

/// Interior sample of one domain component, windowed away from both
/// endpoints (and hence from every breakpoint).
fn sample_interior(seg: &Interval, rng: &mut ChaCha8Rng) -> f64 {
    match (seg.lo.is_finite(), seg.hi.is_finite()) {
        (true, true) => seg.lo + (seg.hi - seg.lo) * rng.gen_range(0.05..0.95),
        (true, false) => seg.lo + rng.gen_range(0.1..5.0) * (1.0 + seg.lo.abs() * 1e-3),
        (false, true) => seg.hi - rng.gen_range(0.1..5.0) * (1.0 + seg.hi.abs() * 1e-3),
        (false, false) => rng.gen_range(-5.0..5.0),
    }
}

#[test]
fn criterion_1_demo_return_polynomial_and_partition() {
    let start = Instant::now();
    let system = chaotic_demo_system();
    let expr = &branch_expressions(&system)[0];
    let target = Poly::from_f64_coeffs(&[0.0, 16.0, -80.0, 128.0, -64.0]);
    assert_eq!(expr.coeffs(), target.coeffs(), "first branch expression");

    let partition = build_partition(&system).unwrap();
    let expected = [
        (1u8, vec![(0.0, 1.0)]),
        (2, vec![(1.0, f64::INFINITY)]),
        (3, vec![(-1.0, 0.0)]),
        (4, vec![(f64::NEG_INFINITY, -1.0)]),
    ];
    for (id, segs) in expected {
        let domain = &partition.branch(id).domain;
        assert_eq!(domain.len(), segs.len(), "component count of branch {id}");
        for (seg, (lo, hi)) in domain.iter().zip(segs.iter()) {
            assert_eq!((seg.lo, seg.hi), (*lo, *hi), "branch {id} domain");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 1: pass — demo return polynomial exact, partition (0,1),(1,inf),(-1,0),(-inf,-1) [{elapsed:?}]");
}

#[test]
fn criterion_2_return_map_matches_orbit_walk() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0cea11);
    let mut checked = 0usize;
    let mut systems = 0usize;
    while systems < 100 {
        let system = common::random_system(&mut rng, 3);
        let partition = match build_partition(&system) {
            Ok(p) => p,
            Err(_) => continue,
        };
        systems += 1;
        let mut segments: Vec<Interval> = Vec::new();
        for id in 1..=4u8 {
            segments.extend(partition.branch(id).domain.iter().copied());
        }
        let mut taken = 0usize;
        let mut attempts = 0usize;
        while taken < 100 && attempts < 1000 {
            attempts += 1;
            let seg = segments[rng.gen_range(0..segments.len())];
            let y = sample_interior(&seg, &mut rng);
            let margin = 1e-6 * (1.0 + y.abs());
            if partition.boundary_points().iter().any(|b| (y - b).abs() < margin) {
                continue;
            }
            let (v_map, id_map) = match partition.eval(y) {
                Ok(pair) => pair,
                Err(_) => continue,
            };
            let (v_orbit, id_orbit) = match first_return_numeric(&system, y) {
                Ok(pair) => pair,
                Err(e) => panic!("orbit walk failed at y={y}: {e}"),
            };
            assert_eq!(id_map, id_orbit, "branch id at y={y}");
            assert!(
                (v_map - v_orbit).abs() <= 1e-7 * (1.0 + v_map.abs()),
                "values diverge at y={y}: {v_map} vs {v_orbit}"
            );
            taken += 1;
            checked += 1;
        }
        assert!(taken == 100, "could not draw enough interior samples");
    }
    assert_eq!(checked, 10_000);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("criterion 2: pass — map and orbit walk agree on 10^4 interior samples across 100 systems [{elapsed:?}]");
}

#[test]
fn criterion_3_affine_cycle_dichotomy_and_attraction() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e0e1);
    let mut contracting_checked = 0usize;
    for _ in 0..500 {
        // Slope magnitude in [0.1, 3] with the neutral value excluded by a
        // margin wide enough to keep the convergence budget honorable.
        let a = loop {
            let mag: f64 = rng.gen_range(0.1..3.0);
            if (mag - 1.0).abs() >= 0.05 {
                break if rng.gen_bool(0.5) { mag } else { -mag };
            }
        };
        let b = rng.gen_range(-5.0..5.0);
        let system = HybridSystem::new(
            common::random_center(&mut rng),
            common::random_center(&mut rng),
            ResetPolynomial::new(vec![b, a]).unwrap(),
        );
        let partition = build_partition(&system).unwrap();
        let cycles = find_cycles(&partition, 3).unwrap();
        let regular: Vec<_> = cycles.iter().filter(|c| c.regular).collect();
        assert!(regular.len() <= 1, "several regular cycles for slope {a}");
        if let Some(cycle) = regular.first() {
            assert_eq!(cycle.period, 1, "regular cycle period for slope {a}");
            let expected = if a.abs() < 1.0 { Stability::Stable } else { Stability::Unstable };
            assert_eq!(cycle.classification, expected, "classification for slope {a}");
            let j1 = &partition.branch(1).domain;
            let interior = !cycle.boundary_adjacent
                && j1.iter().any(|seg| seg.contains(cycle.points[0]));
            if a.abs() < 1.0 && interior {
                let target = cycle.points[0];
                let seg = *j1
                    .iter()
                    .find(|seg| seg.contains(target))
                    .expect("fixed point lies in some component");
                for _ in 0..5 {
                    let mut y = sample_interior(&seg, &mut rng);
                    let mut converged = false;
                    for _ in 0..500 {
                        if (y - target).abs() <= 1e-6 {
                            converged = true;
                            break;
                        }
                        match partition.eval(y) {
                            Ok((next, _)) => y = next,
                            Err(_) => break,
                        }
                    }
                    assert!(converged, "start failed to reach the cycle (slope {a}, target {target})");
                }
                contracting_checked += 1;
            }
        }
    }
    assert!(contracting_checked > 20, "the sweep exercised too few contracting cases");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 20.0, "took {elapsed:?}");
    println!("criterion 3: pass — 500 affine systems: at most one regular cycle, period 1, stability by slope, {contracting_checked} attraction checks [{elapsed:?}]");
}

#[test]
fn criterion_4_trapping_and_escape_certificates() {
    let start = Instant::now();
    // (a) contracting: slope 1/2, offset 1, centered chords.
    let contracting = symmetric_system(vec![1.0, 0.5]);
    assert_eq!(trapping_radius(&contracting).unwrap(), 2.0);
    let partition = build_partition(&contracting).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xce47);
    for _ in 0..50 {
        let mut y: f64 = rng.gen_range(-200.0..200.0);
        let band = 2.0 + 1e-6;
        let mut inside_at = None;
        for i in 0..400 {
            if y.abs() <= band {
                inside_at = Some(i);
                break;
            }
            y = partition.eval(y).unwrap().0;
        }
        let entered = inside_at.expect("orbit never entered the trapping band");
        for _ in entered..500 {
            y = partition.eval(y).unwrap().0;
            assert!(y.abs() <= band, "orbit left the trapping band at {y}");
        }
    }
    // (b) expanding: quadratic reset, unit threshold.
    let quartic = symmetric_system(vec![0.0, 0.0, 1.0]);
    assert_eq!(escape_threshold(&quartic).unwrap(), 1.0);
    let partition = build_partition(&quartic).unwrap();
    for _ in 0..50 {
        let magnitude = rng.gen_range(1.0f64..2.0).max(1.0 + 1e-12);
        let mut y = if rng.gen_bool(0.5) { magnitude } else { -magnitude };
        let mut diverged = false;
        for _ in 0..40 {
            y = partition.eval(y).unwrap().0;
            if y.abs() > 1e6 {
                diverged = true;
                break;
            }
        }
        assert!(diverged, "start of magnitude {magnitude} failed to pass 1e6");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("criterion 4: pass — trapping radius 2 traps 50 starts, escape threshold 1 expels 50 starts [{elapsed:?}]");
}

#[test]
fn criterion_5_conjugacy_and_chaos_suite() {
    let start = Instant::now();
    // Conjugacy identity on a 10^4 grid.
    let mut worst = 0.0f64;
    for i in 0..=10_000 {
        let x = i as f64 / 10_000.0;
        let lhs = tent_to_logistic(tent(x).unwrap()).unwrap();
        let rhs = logistic(tent_to_logistic(x).unwrap()).unwrap();
        worst = worst.max((lhs - rhs).abs());
    }
    assert!(worst < 1e-12, "conjugacy defect {worst}");

    // Periodic density through period 8.
    let points = logistic_periodic_points(8);
    let mut gap = points[0];
    for pair in points.windows(2) {
        gap = gap.max(pair[1] - pair[0]);
    }
    gap = gap.max(1.0 - points.last().unwrap());
    assert!(gap < 0.05, "max density gap {gap}");

    // Fixed points of the squared logistic map, exactly.
    let fixed = logistic_periodic_points(2);
    let expected = [0.0, (5.0 - 5.0f64.sqrt()) / 8.0, 0.75, (5.0 + 5.0f64.sqrt()) / 8.0];
    assert_eq!(fixed.len(), 4);
    for (got, want) in fixed.iter().zip(expected.iter()) {
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    // Dense-orbit transitivity witness through exact double-step iteration.
    let seed = dense_orbit_prefix(8).unwrap();
    let mut pos = 0usize;
    let mut len = 2usize;
    while len <= 8 {
        let count = 1usize << (len - 1);
        for _ in 0..count {
            let shifted = tent_exact_iterate(&seed, pos).unwrap();
            let window = &seed.bits()[pos..pos + len];
            assert_eq!(&shifted.bits()[..len], window, "block at {pos} is not an iterate prefix");
            pos += len;
        }
        len += 2;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("criterion 5: pass — conjugacy 1e-12, density gap {gap:.4} at period 8, squared-map fixed points exact, all blocks to length 8 realized [{elapsed:?}]");
}

#[test]
fn criterion_6_invariant_suites() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1471a);

    // First-integral conservation, chord involution, group law, periodicity.
    for _ in 0..200 {
        let c = common::random_center(&mut rng);
        let p = PlanePoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let h0 = c.first_integral(p);
        let scale = 1.0 + h0.abs();
        let t1 = rng.gen_range(0.0..c.period());
        let t2 = rng.gen_range(0.0..c.period());
        let q = flow(&c, p, t1);
        assert!((c.first_integral(q) - h0).abs() <= 1e-8 * scale, "conservation");
        let via_two = flow(&c, q, t2);
        let direct = flow(&c, p, t1 + t2);
        let err = (via_two.x - direct.x).abs() + (via_two.y - direct.y).abs();
        assert!(err <= 1e-8 * (1.0 + direct.x.abs() + direct.y.abs()), "group law: {err}");
        let back = flow(&c, p, c.period());
        let err = (back.x - p.x).abs() + (back.y - p.y).abs();
        assert!(err <= 1e-8 * (1.0 + p.x.abs() + p.y.abs()), "periodicity: {err}");
        let y = rng.gen_range(-10.0..10.0);
        assert!((sigma_chord(&c, sigma_chord(&c, y)) - y).abs() <= 1e-9 * (1.0 + y.abs()));
    }

    // Interval-count bound: each branch domain has at most n components.
    for _ in 0..500 {
        let system = common::random_system(&mut rng, 5);
        let n = system.reset.degree();
        let partition = match build_partition(&system) {
            Ok(p) => p,
            Err(_) => continue,
        };
        for id in 1..=4u8 {
            let components = partition.branch(id).domain.len();
            assert!(
                components <= n,
                "branch {id} of a degree-{n} reset has {components} components"
            );
        }
    }

    // Event-chain validator over a spread of produced traces.
    let mut traces = 0usize;
    let budget = OrbitBudget { max_events: 48, ..Default::default() };
    for _ in 0..60 {
        let system = common::random_system(&mut rng, 3);
        for _ in 0..3 {
            let q = if rng.gen_bool(0.5) {
                PlanePoint::new(0.0, rng.gen_range(-4.0..4.0))
            } else {
                PlanePoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-4.0..4.0))
            };
            let which = if rng.gen_bool(0.5) { Side::One } else { Side::Two };
            let trace = global_orbit_with(&system, q, which, &budget);
            validate_trace(&system, &trace).unwrap();
            traces += 1;
        }
    }
    assert_eq!(traces, 180);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("criterion 6: pass — conservation/involution/group-law sweeps, component bound over 500 systems, {traces} traces validated [{elapsed:?}]");
}
