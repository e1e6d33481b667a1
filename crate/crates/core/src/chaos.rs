//! Symbolic chaos toolkit: tent map, logistic map, their conjugacy, exact
//! binary-shift iteration, the dense-orbit construction, and a certificate
//! tying the quartic demonstration system's return map to the twice-iterated
//! logistic map.
//!
//! The exact layer works on binary digit strings: one tent step drops the
//! leading digit and complements the remainder when that digit was 1, so
//! long orbits can be followed with no floating-point error at all.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HybridSystem, LinearCenter, ResetPolynomial, Sign};
use crate::poly::Poly;
use crate::return_map::branch_expressions;

/// Hard cap on digit-string length; dense-orbit prefixes for block length 8
/// already need 1252 digits.
const MAX_BITS: usize = 1 << 16;

/// Digit budget used by convenience constructors; enough for 100+ exact
/// double-step iterations.
pub const DEFAULT_PRECISION: usize = 256;

/// Tent map on [0,1]: 2x up to the peak at 1/2, then 2 - 2x back down.
pub fn tent(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain { value: x, domain: "[0, 1]" });
    }
    Ok(if x <= 0.5 { 2.0 * x } else { 2.0 - 2.0 * x })
}

/// Logistic map at the chaotic parameter: 4x(1 - x) on [0,1].
pub fn logistic(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain { value: x, domain: "[0, 1]" });
    }
    Ok(4.0 * x * (1.0 - x))
}

/// The homeomorphism sin^2(pi x / 2) of [0,1] that conjugates the tent map
/// to the logistic map.
pub fn tent_to_logistic(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain { value: x, domain: "[0, 1]" });
    }
    let s = (std::f64::consts::FRAC_PI_2 * x).sin();
    Ok(s * s)
}

/// A finite prefix of a binary expansion 0.s1 s2 s3 ... in [0,1].
///
/// `exact` records that the represented number is exactly the listed digits
/// with an all-zero tail; inexact strings stand for any number sharing the
/// prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BitString {
    bits: Vec<u8>,
    exact: bool,
}

impl BitString {
    pub fn new(bits: Vec<u8>, exact: bool) -> Result<BitString> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter("digit string must be nonempty".into()));
        }
        if bits.len() > MAX_BITS {
            return Err(Error::InvalidParameter(format!(
                "digit string length {} exceeds the {} cap",
                bits.len(),
                MAX_BITS
            )));
        }
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!("digit {bad} is not binary")));
        }
        Ok(BitString { bits, exact })
    }

    /// Leading `digits` binary digits of x; exact when the expansion
    /// terminated within the budget.
    pub fn from_f64(x: f64, digits: usize) -> Result<BitString> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain { value: x, domain: "[0, 1]" });
        }
        let mut bits = Vec::with_capacity(digits.max(1));
        let mut r = x;
        for _ in 0..digits.max(1) {
            r *= 2.0;
            if r >= 1.0 {
                bits.push(1);
                r -= 1.0;
            } else {
                bits.push(0);
            }
        }
        BitString::new(bits, r == 0.0)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// The represented value, assuming a zero tail.
    pub fn value(&self) -> f64 {
        self.bits
            .iter()
            .rev()
            .fold(0.0f64, |acc, &b| (acc + f64::from(b)) / 2.0)
    }

    /// Exact rational value of the listed digits (zero tail).
    pub fn value_rational(&self) -> BigRational {
        let mut num = BigInt::zero();
        for &b in &self.bits {
            num = num * 2 + b;
        }
        let den = BigInt::one() << self.bits.len();
        BigRational::new(num, den)
    }

    /// One tent step in digit arithmetic: drop the leading digit and
    /// complement the rest when it was 1. Complementing an exact string
    /// turns its zero tail into a ones tail, which is renormalized by a
    /// binary increment; if the increment carries all the way out the value
    /// is exactly 1 and is kept as an all-ones (inexact) expansion.
    fn tent_step(&self) -> Result<BitString> {
        if self.bits.len() < 2 {
            return Err(Error::InsufficientPrecision { needed: 2, available: self.bits.len() });
        }
        let lead = self.bits[0];
        let mut rest: Vec<u8> = self.bits[1..].to_vec();
        let mut exact = self.exact;
        if lead == 1 {
            for b in &mut rest {
                *b ^= 1;
            }
            if exact {
                let mut carry = true;
                for b in rest.iter_mut().rev() {
                    if *b == 0 {
                        *b = 1;
                        carry = false;
                        break;
                    }
                    *b = 0;
                }
                if carry {
                    rest.iter_mut().for_each(|b| *b = 1);
                    exact = false;
                }
            }
        }
        BitString::new(rest, exact)
    }
}

/// Apply the tent map `k` times in exact digit arithmetic. Each application
/// consumes one digit, so the string must hold more than `k` digits.
pub fn tent_exact_iterate(s: &BitString, k: usize) -> Result<BitString> {
    if s.len() <= k {
        return Err(Error::InsufficientPrecision { needed: k + 1, available: s.len() });
    }
    let mut current = s.clone();
    for _ in 0..k {
        current = current.tent_step()?;
    }
    Ok(current)
}

/// Even-length blocks of the given length whose last digit is 0, in
/// enumeration order: lengths 2 and 4 follow the reference listing (sorted
/// by number of ones, then numerically); longer lengths extend it
/// lexicographically by displayed pattern.
fn blocks_of_length(len: usize) -> Vec<Vec<u8>> {
    let free = len - 1;
    let mut prefixes: Vec<u64> = (0..(1u64 << free)).collect();
    if len <= 4 {
        prefixes.sort_by_key(|p| (p.count_ones(), *p));
    }
    prefixes
        .into_iter()
        .map(|p| {
            let mut block: Vec<u8> = (0..free)
                .rev()
                .map(|i| ((p >> i) & 1) as u8)
                .collect();
            block.push(0);
            block
        })
        .collect()
}

/// Prefix of the dense orbit seed: the concatenation of every even-length
/// block ending in 0, grouped by length up to `max_block_length`. Because
/// each block ends in 0 at an even position, the double-step shift lands on
/// every block boundary uncomplemented, so each block is a prefix of some
/// iterate of the seed.
pub fn dense_orbit_prefix(max_block_length: usize) -> Result<BitString> {
    if max_block_length < 2 || max_block_length % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "block length must be a positive even integer, got {max_block_length}"
        )));
    }
    let mut bits = Vec::new();
    let mut len = 2;
    while len <= max_block_length {
        for block in blocks_of_length(len) {
            bits.extend_from_slice(&block);
        }
        len += 2;
    }
    BitString::new(bits, false)
}

/// All fixed points of the `period`-fold logistic composition in [0,1],
/// found by a Lipschitz-pruned recursive sign scan (every crossing is
/// transversal because the multiplier magnitude is 2^period), deduplicated
/// at 1e-10 and sorted.
pub fn logistic_periodic_points(period: usize) -> Vec<f64> {
    assert!((1..=12).contains(&period), "period must be in 1..=12");
    let iterate = |x: f64| {
        let mut v = x;
        for _ in 0..period {
            v = 4.0 * v * (1.0 - v);
        }
        v - x
    };
    // |d/dx (f^p(x) - x)| <= 4^p + 1 on [0,1].
    let lipschitz = 4.0f64.powi(period as i32) + 1.0;
    let mut roots = Vec::new();
    scan_roots(&iterate, 0.0, 1.0, iterate(0.0), iterate(1.0), lipschitz, &mut roots);
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10);
    roots
}

fn scan_roots(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    lipschitz: f64,
    out: &mut Vec<f64>,
) {
    if fa == 0.0 {
        out.push(a);
    }
    if fb == 0.0 {
        out.push(b);
    }
    let width = b - a;
    // No root is reachable when the endpoint value exceeds the maximum
    // possible swing across the interval.
    if fa.abs() > lipschitz * width && fb.abs() > lipschitz * width {
        return;
    }
    if width < 1e-9 {
        if fa * fb < 0.0 {
            out.push(bisect(f, a, b, fa));
        }
        return;
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    scan_roots(f, a, mid, fa, fm, lipschitz, out);
    scan_roots(f, mid, b, fm, fb, lipschitz, out);
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let mut sa = fa.signum();
    while b - a > 1e-13 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == sa {
            a = mid;
            sa = fm.signum();
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Knobs for the chaos certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChaosConfig {
    /// Largest period whose points feed the density gap measurement.
    pub density_depth: usize,
    /// Largest even block length for the transitivity witness.
    pub transitivity_block_len: usize,
    /// Trials for the sensitivity estimate.
    pub sensitivity_trials: usize,
    pub seed: u64,
}

impl Default for ChaosConfig {
    fn default() -> ChaosConfig {
        ChaosConfig {
            density_depth: 8,
            transitivity_block_len: 8,
            sensitivity_trials: 32,
            seed: 0x5eed_cafe,
        }
    }
}

/// Evidence that the system's first-branch return map is the twice-iterated
/// logistic map and behaves chaotically on the unit interval of the
/// switching line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChaosCertificate {
    /// The first-branch expression equals 16y - 80y^2 + 128y^3 - 64y^4
    /// coefficient-for-coefficient.
    pub coefficient_match: bool,
    /// The first branch maps [0,1] into [0,1] on a grid.
    pub interval_invariant: bool,
    /// Largest period checked whose points leave gaps below 0.05.
    pub periodic_density_depth: usize,
    /// Largest even block length realized as an iterate prefix of the dense
    /// orbit seed.
    pub transitivity_blocks: usize,
    /// Empirical minimum over trials of the largest separation reached from
    /// 1e-6-close exact starts, measured after the conjugacy.
    pub sensitivity_estimate: f64,
}

impl ChaosCertificate {
    /// The certificate stands only on the two hard clauses; the remaining
    /// fields quantify the density/transitivity/sensitivity evidence.
    pub fn passes(&self) -> bool {
        self.coefficient_match && self.interval_invariant
    }
}

/// The quartic demonstration system: symmetric centers on both sides and
/// reset -4y - 4y^2, whose first-branch return map is the twice-iterated
/// logistic map on [0,1].
pub fn chaotic_demo_system() -> HybridSystem {
    HybridSystem::new(
        LinearCenter::new(0.0, 1.0, Sign::Plus, 0.0, 0.0).unwrap(),
        LinearCenter::new(0.0, 1.0, Sign::Minus, 0.0, 0.0).unwrap(),
        ResetPolynomial::new(vec![0.0, -4.0, -4.0]).unwrap(),
    )
}

pub fn certify_chaos(system: &HybridSystem) -> ChaosCertificate {
    certify_chaos_with(system, &ChaosConfig::default())
}

pub fn certify_chaos_with(system: &HybridSystem, config: &ChaosConfig) -> ChaosCertificate {
    let expr = &branch_expressions(system)[0];
    let target = Poly::from_f64_coeffs(&[0.0, 16.0, -80.0, 128.0, -64.0]);
    let coefficient_match = expr.coeffs() == target.coeffs();

    let mut interval_invariant = true;
    for i in 0..=1000 {
        let y = i as f64 / 1000.0;
        let v = expr.eval_f64(y);
        if !(-1e-9..=1.0 + 1e-9).contains(&v) {
            interval_invariant = false;
            break;
        }
    }

    let mut periodic_density_depth = 0;
    for depth in (1..=config.density_depth).rev() {
        if max_density_gap(depth) < 0.05 {
            periodic_density_depth = depth;
            break;
        }
    }

    let mut transitivity_blocks = 0;
    let mut len = 2;
    while len <= config.transitivity_block_len {
        if verify_transitivity_blocks(len) {
            transitivity_blocks = len;
        } else {
            break;
        }
        len += 2;
    }

    let sensitivity_estimate = sensitivity_estimate(config);

    ChaosCertificate {
        coefficient_match,
        interval_invariant,
        periodic_density_depth,
        transitivity_blocks,
        sensitivity_estimate,
    }
}

fn max_density_gap(period: usize) -> f64 {
    let points = logistic_periodic_points(period);
    let mut prev = 0.0f64;
    let mut gap = 0.0f64;
    for &p in &points {
        gap = gap.max(p - prev);
        prev = p;
    }
    gap.max(1.0 - prev)
}

/// Every enumerated block up to `max_len` must appear as the digit prefix of
/// some iterate of the dense orbit seed. Blocks sit at odd positions with a
/// 0 immediately before them, so the iterate is uncomplemented there.
fn verify_transitivity_blocks(max_len: usize) -> bool {
    let seed = match dense_orbit_prefix(max_len) {
        Ok(s) => s,
        Err(_) => return false,
    };
    // (start index, block) for every block in the concatenation.
    let mut targets = Vec::new();
    let mut pos = 0usize;
    let mut len = 2;
    while len <= max_len {
        for block in blocks_of_length(len) {
            targets.push((pos, block));
            pos += len;
        }
        len += 2;
    }
    let mut current = seed;
    let mut shifted = 0usize;
    for (start, block) in targets {
        while shifted < start {
            current = match current.tent_step() {
                Ok(next) => next,
                Err(_) => return false,
            };
            shifted += 1;
        }
        if current.len() < block.len() || current.bits()[..block.len()] != block[..] {
            return false;
        }
    }
    true
}

/// Minimum over seeded trials of the maximum separation (after the
/// conjugacy) reached by exact tent orbits started 2^-20 apart.
fn sensitivity_estimate(config: &ChaosConfig) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst_best = f64::INFINITY;
    for _ in 0..config.sensitivity_trials.max(1) {
        let bits: Vec<u8> = (0..64).map(|_| rng.gen_range(0..=1u8)).collect();
        let mut flipped = bits.clone();
        flipped[19] ^= 1;
        let mut a = BitString::new(bits, true).unwrap();
        let mut b = BitString::new(flipped, true).unwrap();
        let mut best = 0.0f64;
        for _ in 0..28 {
            let ha = tent_to_logistic(a.value()).unwrap();
            let hb = tent_to_logistic(b.value()).unwrap();
            best = best.max((ha - hb).abs());
            a = a.tent_step().unwrap();
            b = b.tent_step().unwrap();
        }
        worst_best = worst_best.min(best);
    }
    worst_best
}
