//! Exact univariate polynomial arithmetic and real-root isolation.
//!
//! Coefficients are arbitrary-precision rationals, so compositions of branch
//! polynomials and the boundary equations of branch domains are formed
//! without rounding. Real roots are isolated with a Sturm chain built from
//! positively-scaled pseudo-remainders (integer arithmetic throughout), then
//! refined by sign bisection to an absolute width of 1e-14 and snapped to a
//! nearby small-denominator rational when that rational is verified to be an
//! exact root.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial with exact rational coefficients in ascending order
/// (`coeffs[i]` multiplies y^i). The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn from_rational_coeffs(mut coeffs: Vec<BigRational>) -> Poly {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64_coeffs(coeffs: &[f64]) -> Poly {
        let rat = coeffs
            .iter()
            .map(|&c| BigRational::from_float(c).expect("polynomial coefficients must be finite"))
            .collect();
        Poly::from_rational_coeffs(rat)
    }

    pub fn constant(c: BigRational) -> Poly {
        Poly::from_rational_coeffs(vec![c])
    }

    /// The identity polynomial y.
    pub fn identity() -> Poly {
        Poly::from_rational_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with both constants and the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Poly::from_rational_coeffs(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        Poly::from_rational_coeffs(out)
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_rational_coeffs(out)
    }

    pub fn scale(&self, r: &BigRational) -> Poly {
        Poly::from_rational_coeffs(self.coeffs.iter().map(|c| c * r).collect())
    }

    /// self(inner(y)), by Horner over polynomials.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        Poly::from_rational_coeffs(out)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Exact quotient, if `den` divides `self` with zero remainder.
    pub fn div_exact(&self, den: &Poly) -> Option<Poly> {
        if den.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if self.degree() < den.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dd = den.degree();
        let mut quot = vec![BigRational::zero(); self.degree() - dd + 1];
        let lead = den.coeffs.last().unwrap();
        for k in (dd..rem.len()).rev() {
            let q = &rem[k] / lead;
            if !q.is_zero() {
                for (j, dc) in den.coeffs.iter().enumerate() {
                    let idx = k - dd + j;
                    let delta = dc * &q;
                    rem[idx] -= delta;
                }
            }
            quot[k - dd] = q;
        }
        if rem.iter().take(dd).all(|c| c.is_zero()) {
            Some(Poly::from_rational_coeffs(quot))
        } else {
            None
        }
    }

    /// All distinct real roots, ascending. Multiple roots are reported once.
    pub fn real_roots(&self) -> Vec<f64> {
        if self.coeffs.len() <= 1 {
            return Vec::new();
        }
        let ip = IntPoly::from_poly(self);
        let sf = ip.square_free();
        if sf.coeffs.len() <= 1 {
            return Vec::new();
        }
        isolate_and_refine(&sf)
    }

    /// Real roots lying in the closed interval [lo, hi].
    pub fn real_roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.real_roots().into_iter().filter(|r| *r >= lo && *r <= hi).collect()
    }
}

fn big_rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Primitive integer polynomial used for the pseudo-remainder work.
#[derive(Debug, Clone)]
struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    fn from_poly(p: &Poly) -> IntPoly {
        let mut lcm = BigInt::one();
        for c in p.coeffs() {
            lcm = lcm.lcm(c.denom());
        }
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        IntPoly { coeffs }.primitive()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigInt {
        self.coeffs.last().expect("lead of zero polynomial")
    }

    fn trim(mut coeffs: Vec<BigInt>) -> IntPoly {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    /// Divide by the positive content. Signs of all coefficients (and hence
    /// sign evaluations anywhere) are preserved.
    fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly { coeffs: Vec::new() };
        }
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        IntPoly { coeffs: self.coeffs.iter().map(|c| c / &g).collect() }
    }

    fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly { coeffs: Vec::new() };
        }
        IntPoly::trim(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    fn to_poly(&self) -> Poly {
        Poly::from_rational_coeffs(
            self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect(),
        )
    }

    /// Pseudo-remainder scaled so that the result is a strictly positive
    /// multiple of the rational remainder of self by g — safe to use inside
    /// a Sturm chain.
    fn pseudo_rem_pos(&self, g: &IntPoly) -> IntPoly {
        let dg = g.degree();
        let lg = g.lead().clone();
        let lg_abs = lg.abs();
        let lg_sign = if lg.is_negative() { -BigInt::one() } else { BigInt::one() };
        let mut r = self.coeffs.clone();
        loop {
            let rp = IntPoly::trim(r);
            if rp.is_zero() || rp.degree() < dg {
                return rp;
            }
            let dr = rp.degree();
            let lr = rp.lead().clone();
            // r := |lg| * r - sign(lg) * lr * y^(dr-dg) * g, which cancels the
            // leading term while scaling by a positive constant.
            let mut next = vec![BigInt::zero(); dr];
            for (i, c) in rp.coeffs.iter().enumerate().take(dr) {
                next[i] = c * &lg_abs;
            }
            let factor = &lg_sign * &lr;
            for (j, gc) in g.coeffs.iter().enumerate().take(dg) {
                next[dr - dg + j] -= gc * &factor;
            }
            r = next;
        }
    }

    fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.pseudo_rem_pos(&b);
            if r.is_zero() {
                return b;
            }
            a = b;
            b = r.primitive();
        }
    }

    /// The square-free part: same distinct roots, all simple.
    fn square_free(&self) -> IntPoly {
        let der = self.derivative();
        let g = self.gcd(&der);
        if g.degree() == 0 {
            return self.clone();
        }
        let q = self
            .to_poly()
            .div_exact(&g.to_poly())
            .expect("gcd divides the polynomial");
        IntPoly::from_poly(&q)
    }

    /// Sign of the value at the rational point num/den (den > 0).
    fn sign_at(&self, num: &BigInt, den: &BigInt) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let d = self.degree();
        let mut acc = self.coeffs[d].clone();
        let mut dpow = BigInt::one();
        for i in (0..d).rev() {
            dpow *= den;
            acc = acc * num + &self.coeffs[i] * &dpow;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    fn sign_at_rational(&self, x: &BigRational) -> i8 {
        self.sign_at(x.numer(), x.denom())
    }

    /// Integer bound strictly containing every real root.
    fn root_bound(&self) -> BigInt {
        let lead = self.lead().abs();
        let mut max = BigInt::zero();
        for c in self.coeffs.iter().take(self.degree()) {
            let a = c.abs();
            if a > max {
                max = a;
            }
        }
        // ceil(max/lead) + 2 > 1 + max/lead >= Cauchy bound
        max.div_ceil(&lead) + BigInt::from(2)
    }
}

struct SturmChain {
    polys: Vec<IntPoly>,
}

impl SturmChain {
    /// p must be square-free.
    fn new(p: &IntPoly) -> SturmChain {
        let mut polys = vec![p.clone(), p.derivative().primitive()];
        loop {
            let n = polys.len();
            if polys[n - 1].is_zero() {
                polys.pop();
                break;
            }
            let r = polys[n - 2].pseudo_rem_pos(&polys[n - 1]);
            if r.is_zero() {
                break;
            }
            let neg = IntPoly { coeffs: r.coeffs.iter().map(|c| -c).collect() };
            polys.push(neg.primitive());
        }
        SturmChain { polys }
    }

    fn variations_at(&self, x: &BigRational) -> u32 {
        let mut count = 0;
        let mut prev = 0i8;
        for p in &self.polys {
            let s = p.sign_at_rational(x);
            if s == 0 {
                continue;
            }
            if prev != 0 && s != prev {
                count += 1;
            }
            prev = s;
        }
        count
    }
}

/// Width below which an isolating bracket is considered refined.
fn target_width() -> BigRational {
    big_rational(1, 100_000_000_000_000) // 1e-14
}

fn isolate_and_refine(sf: &IntPoly) -> Vec<f64> {
    let chain = SturmChain::new(sf);
    let bound = sf.root_bound();
    let lo = BigRational::from_integer(-bound.clone());
    let hi = BigRational::from_integer(bound);
    let mut exact: Vec<BigRational> = Vec::new();
    let mut brackets: Vec<(BigRational, BigRational)> = Vec::new();

    let vlo = chain.variations_at(&lo);
    let vhi = chain.variations_at(&hi);
    let mut stack = vec![(lo, hi, vlo, vhi)];
    while let Some((a, b, va, vb)) = stack.pop() {
        let count = va.saturating_sub(vb);
        if count == 0 {
            continue;
        }
        if count == 1 {
            brackets.push((a, b));
            continue;
        }
        let mid = (&a + &b) / big_rational(2, 1);
        if sf.sign_at_rational(&mid) == 0 {
            exact.push(mid.clone());
            // Carve out a punctured neighborhood holding only this root, then
            // recurse on both sides of it.
            let mut w = (&b - &a) / big_rational(4, 1);
            loop {
                let l = &mid - &w;
                let r = &mid + &w;
                if sf.sign_at_rational(&l) != 0 && sf.sign_at_rational(&r) != 0 {
                    let vl = chain.variations_at(&l);
                    let vr = chain.variations_at(&r);
                    if vl.saturating_sub(vr) == 1 {
                        stack.push((a, l, va, vl));
                        stack.push((r, b, vr, vb));
                        break;
                    }
                }
                w = w / big_rational(2, 1);
            }
        } else {
            let vm = chain.variations_at(&mid);
            stack.push((a, mid.clone(), va, vm));
            stack.push((mid, b, vm, vb));
        }
    }

    let eps = target_width();
    let mut out: Vec<f64> = exact.iter().filter_map(|r| r.to_f64()).collect();
    for (mut a, mut b) in brackets {
        let mut sa = sf.sign_at_rational(&a);
        debug_assert!(sa != 0 && sf.sign_at_rational(&b) != 0);
        let mut hit_exact = None;
        while &b - &a > eps {
            let mid = (&a + &b) / big_rational(2, 1);
            let sm = sf.sign_at_rational(&mid);
            if sm == 0 {
                hit_exact = Some(mid);
                break;
            }
            if sm == sa {
                a = mid;
                sa = sm;
            } else {
                b = mid;
            }
        }
        let value = match hit_exact {
            Some(r) => r.to_f64().unwrap_or(f64::NAN),
            None => {
                let mid = (&a + &b) / big_rational(2, 1);
                match snap_to_rational(sf, &a, &b, &mid) {
                    Some(r) => r.to_f64().unwrap_or(f64::NAN),
                    None => mid.to_f64().unwrap_or(f64::NAN),
                }
            }
        };
        out.push(value);
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

/// Try the continued-fraction convergents of `mid` with denominator up to
/// 10^6; accept one only if it lies inside the bracket and is verified to be
/// an exact root.
fn snap_to_rational(
    sf: &IntPoly,
    lo: &BigRational,
    hi: &BigRational,
    mid: &BigRational,
) -> Option<BigRational> {
    let qmax = BigInt::from(1_000_000u64);
    let mut num = mid.numer().clone();
    let mut den = mid.denom().clone();
    // Seed with the conventional (-2) and (-1) convergents 0/1 and 1/0.
    let (mut p_prev, mut q_prev) = (BigInt::zero(), BigInt::one());
    let (mut p_cur, mut q_cur) = (BigInt::one(), BigInt::zero());
    while !den.is_zero() {
        let a = num.div_floor(&den);
        let rem = &num - &a * &den;
        num = den;
        den = rem;
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        if q_cur > qmax {
            break;
        }
        let cand = BigRational::new(p_cur.clone(), q_cur.clone());
        if &cand > lo && &cand < hi && sf.sign_at_rational(&cand) == 0 {
            return Some(cand);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[f64]) -> Poly {
        Poly::from_f64_coeffs(coeffs)
    }

    #[test]
    fn arithmetic_and_composition() {
        let p = poly(&[1.0, 2.0]); // 1 + 2y
        let q = poly(&[0.0, 0.0, 1.0]); // y^2
        assert_eq!(p.mul(&q), poly(&[0.0, 0.0, 1.0, 2.0]));
        assert_eq!(q.compose(&p), poly(&[1.0, 4.0, 4.0])); // (1+2y)^2
        assert_eq!(p.compose(&q), poly(&[1.0, 0.0, 2.0])); // 1 + 2y^2
        assert_eq!(q.derivative(), poly(&[0.0, 2.0]));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn division_detects_non_divisors() {
        let p = poly(&[-1.0, 0.0, 1.0]); // (y-1)(y+1)
        let f = poly(&[-1.0, 1.0]); // y - 1
        assert_eq!(p.div_exact(&f), Some(poly(&[1.0, 1.0])));
        assert_eq!(p.div_exact(&poly(&[1.0, 1.0, 1.0])), None);
    }

    #[test]
    fn simple_rational_roots_snap_exactly() {
        let p = poly(&[0.0, -1.0, 0.0, 0.0, 1.0]); // y^4 - y = y(y-1)(y^2+y+1)
        assert_eq!(p.real_roots(), vec![0.0, 1.0]);
        let q = poly(&[0.0, 1.0, 0.0, 0.0, 1.0]); // y^4 + y
        assert_eq!(q.real_roots(), vec![-1.0, 0.0]);
    }

    #[test]
    fn non_dyadic_rational_root_snaps() {
        // (3y - 1)(y^2 - 2) has roots -sqrt(2), 1/3, sqrt(2)
        let p = poly(&[2.0, -6.0, -1.0, 3.0]);
        let roots = p.real_roots();
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[1], 1.0 / 3.0);
        assert!((roots[0] + 2f64.sqrt()).abs() < 1e-12);
        assert!((roots[2] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn multiple_roots_reported_once() {
        // (y-1)^2 (y+2)
        let p = poly(&[2.0, -3.0, 0.0, 1.0]);
        assert_eq!(p.real_roots(), vec![-2.0, 1.0]);
        // (y-1)^3
        let q = poly(&[-1.0, 3.0, -3.0, 1.0]);
        assert_eq!(q.real_roots(), vec![1.0]);
    }

    #[test]
    fn no_real_roots() {
        assert!(poly(&[1.0, 0.0, 1.0]).real_roots().is_empty());
        assert!(poly(&[5.0]).real_roots().is_empty());
        assert!(Poly::zero().real_roots().is_empty());
    }

    #[test]
    fn quartic_with_golden_ratio_roots() {
        // 15y - 80y^2 + 128y^3 - 64y^4 = y (4y-3) (16y^2 - 20y + 5) up to sign
        let p = poly(&[0.0, 15.0, -80.0, 128.0, -64.0]);
        let roots = p.real_roots();
        assert_eq!(roots.len(), 4);
        assert_eq!(roots[0], 0.0);
        let lo = (5.0 - 5f64.sqrt()) / 8.0;
        let hi = (5.0 + 5f64.sqrt()) / 8.0;
        assert!((roots[1] - lo).abs() < 1e-12);
        assert_eq!(roots[2], 0.75);
        assert!((roots[3] - hi).abs() < 1e-12);
    }

    #[test]
    fn close_roots_are_separated() {
        // Roots 1/2 and 1/2 + 2^-23: both dyadic, so the expanded
        // coefficients are exact f64 values and the roots are exact.
        let a = 0.5f64;
        let b = 0.5 + 2f64.powi(-23);
        let p = poly(&[a * b, -(a + b), 1.0]);
        let roots = p.real_roots();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - a).abs() < 1e-12);
        assert!((roots[1] - b).abs() < 1e-12);
    }

    #[test]
    fn roots_within_interval_filter() {
        let p = poly(&[0.0, -1.0, 0.0, 0.0, 1.0]);
        assert_eq!(p.real_roots_in(0.5, 2.0), vec![1.0]);
    }

    #[test]
    fn large_magnitude_roots() {
        // (y - 1e6)(y + 3)
        let p = poly(&[-3e6, 3.0 - 1e6, 1.0]);
        let roots = p.real_roots();
        assert_eq!(roots, vec![-3.0, 1e6]);
    }
}
