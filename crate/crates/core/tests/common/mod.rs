//! Shared helpers for the integration suites: seeded random systems and an
//! independent numerical integrator for cross-checking the closed-form flow.

// Compiled once per test binary; not every suite uses every helper.
#![allow(dead_code)]

use hybrid_centers::{HybridSystem, LinearCenter, PlanePoint, ResetPolynomial, Sign};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_center(rng: &mut ChaCha8Rng) -> LinearCenter {
    loop {
        let b = rng.gen_range(-5.0..5.0);
        let omega = rng.gen_range(0.2..5.0);
        let delta = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        let c = rng.gen_range(-5.0..5.0);
        let d = rng.gen_range(-5.0..5.0);
        if let Ok(center) = LinearCenter::new(b, omega, delta, c, d) {
            return center;
        }
    }
}

pub fn random_reset(rng: &mut ChaCha8Rng, max_degree: usize) -> ResetPolynomial {
    let degree = rng.gen_range(1..=max_degree);
    loop {
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-5.0..5.0)).collect();
        if coeffs.last().unwrap().abs() < 0.2 {
            continue;
        }
        if let Ok(reset) = ResetPolynomial::new(coeffs) {
            return reset;
        }
    }
}

pub fn random_system(rng: &mut ChaCha8Rng, max_degree: usize) -> HybridSystem {
    HybridSystem::new(random_center(rng), random_center(rng), random_reset(rng, max_degree))
}

/// Fourth-order Runge-Kutta integration of the center's linear field: an
/// oracle for the closed-form flow that shares none of its trigonometry.
pub fn rk4_flow(center: &LinearCenter, p: PlanePoint, t: f64, steps: usize) -> PlanePoint {
    let h = t / steps as f64;
    let f = |q: PlanePoint| center.velocity(q);
    let mut q = p;
    for _ in 0..steps {
        let k1 = f(q);
        let k2 = f(PlanePoint::new(q.x + 0.5 * h * k1.x, q.y + 0.5 * h * k1.y));
        let k3 = f(PlanePoint::new(q.x + 0.5 * h * k2.x, q.y + 0.5 * h * k2.y));
        let k4 = f(PlanePoint::new(q.x + h * k3.x, q.y + h * k3.y));
        q = PlanePoint::new(
            q.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            q.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        );
    }
    q
}
