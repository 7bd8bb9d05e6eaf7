//! Bessel functions of the first kind J_μ for real order μ ≥ -1/2.
//!
//! Small arguments use the ascending power series summed in double-double
//! arithmetic, which keeps the absolute error at the level of one rounding
//! of the result even where the series terms are much larger than the sum.
//! Large arguments use the Hankel asymptotic expansion truncated at its
//! smallest term. Orders ±1/2 use the elementary closed forms.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use parking_lot::RwLock;

use crate::error::{domain, Error, Result};
use crate::gamma::gamma;
use crate::grid::RadialGrid;

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Order μ of a Bessel function, μ ≥ -1/2.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub fn new(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < -0.5 {
            return domain(format!("Bessel order {mu} must be finite and >= -1/2"));
        }
        Ok(Order(mu))
    }

    /// Order (N - 2)/2 attached to the radial Fourier transform in dimension N.
    pub fn radial(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return domain("dimension must be positive");
        }
        Order::new((dimension as f64 - 2.0) / 2.0)
    }

    pub fn mu(self) -> f64 {
        self.0
    }

    /// The order μ + 1.
    pub fn next(self) -> Order {
        Order(self.0 + 1.0)
    }

    fn is_minus_half(self) -> bool {
        self.0 == -0.5
    }

    fn is_half(self) -> bool {
        self.0 == 0.5
    }

    /// Argument above which the asymptotic expansion is used.
    fn switch_point(self) -> f64 {
        (25.0 + self.0 * self.0).min(40.0)
    }

    /// J_μ(x) for x > 0 without argument validation.
    pub(crate) fn j(self, x: f64) -> f64 {
        if self.is_minus_half() {
            return SQRT_2_OVER_PI * x.cos() / x.sqrt();
        }
        if self.is_half() {
            return SQRT_2_OVER_PI * x.sin() / x.sqrt();
        }
        if x <= self.switch_point() {
            x.powf(self.0) * series_scaled(self.0, x)
        } else {
            hankel_asymptotic(self.0, x)
        }
    }

    /// Λ_μ(x) = x^{-μ} J_μ(x), an entire even function with Λ_μ(0) = 2^{-μ}/Γ(μ+1).
    pub(crate) fn j_scaled(self, x: f64) -> f64 {
        let x = x.abs();
        if self.is_minus_half() {
            return SQRT_2_OVER_PI * x.cos();
        }
        if self.is_half() {
            return if x < 1e-8 {
                SQRT_2_OVER_PI * (1.0 - x * x / 6.0)
            } else {
                SQRT_2_OVER_PI * x.sin() / x
            };
        }
        if x <= self.switch_point() {
            series_scaled(self.0, x)
        } else {
            hankel_asymptotic(self.0, x) * x.powf(-self.0)
        }
    }

    /// x^{1/2} J_μ(x), the normal form used by the lobe quadrature.
    pub(crate) fn sqrt_j(self, x: f64) -> f64 {
        if self.is_minus_half() {
            return SQRT_2_OVER_PI * x.cos();
        }
        if self.is_half() {
            return SQRT_2_OVER_PI * x.sin();
        }
        x.sqrt() * self.j(x)
    }
}

/// J_μ(η) for η > 0.
pub fn bessel_j(order: Order, eta: f64) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return domain(format!("Bessel argument {eta} must be positive"));
    }
    Ok(order.j(eta))
}

/// η^{-μ} J_μ(η) for η ≥ 0; finite at the origin.
pub fn bessel_j_scaled(order: Order, eta: f64) -> Result<f64> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return domain(format!("Bessel argument {eta} must be non-negative"));
    }
    Ok(order.j_scaled(eta))
}

/// J_μ'(η) = μ η^{-1} J_μ(η) - J_{μ+1}(η).
pub fn bessel_j_prime(order: Order, eta: f64) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return domain(format!("Bessel argument {eta} must be positive"));
    }
    Ok(j_prime(order, eta))
}

pub(crate) fn j_prime(order: Order, eta: f64) -> f64 {
    order.mu() / eta * order.j(eta) - order.next().j(eta)
}

// ---------------------------------------------------------------------------
// power series in double-double arithmetic

#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        DoubleDouble { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        DoubleDouble {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        DoubleDouble {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let s = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::two_prod(self.hi, o.hi);
        let lo = p.lo + (self.hi * o.lo + self.lo * o.hi);
        Self::quick_two_sum(p.hi, lo)
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Self::from(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Self::from(-q2)));
        let q3 = r.hi / o.hi;
        Self::quick_two_sum(q1, q2).add(Self::from(q3))
    }

    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Σ_k (-1)^k (x/2)^{2k} / (k! Γ(k+μ+1)) · 2^{-μ}, i.e. x^{-μ} J_μ(x).
fn series_scaled(mu: f64, x: f64) -> f64 {
    let prefactor = 2f64.powf(-mu) / gamma(mu + 1.0);
    if x == 0.0 {
        return prefactor;
    }
    let q = DoubleDouble::two_prod(x, x).mul(DoubleDouble::from(0.25));
    let mut term = DoubleDouble::from(1.0);
    let mut sum = term;
    let mut k = 0.0_f64;
    loop {
        let k1 = k + 1.0;
        let denom = DoubleDouble::from(k1).mul(DoubleDouble::two_sum(k1, mu));
        term = term.mul(q).div(denom).neg();
        sum = sum.add(term);
        k = k1;
        if k * k > q.hi && term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum.to_f64() * prefactor
}

// ---------------------------------------------------------------------------
// Hankel asymptotic expansion

fn hankel_asymptotic(mu: f64, x: f64) -> f64 {
    let four_mu2 = 4.0 * mu * mu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (four_mu2 - odd * odd) / (kf * 8.0 * x);
        let mag = a.abs();
        if mag > last || mag < 1e-18 {
            if mag < 1e-18 {
                add_hankel_term(k, a, &mut p, &mut q);
            }
            break;
        }
        add_hankel_term(k, a, &mut p, &mut q);
        last = mag;
    }
    let phase = (mu / 2.0 + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    // cos(x - phase), sin(x - phase)
    let c = cx * cp + sx * sp;
    let s = sx * cp - cx * sp;
    SQRT_2_OVER_PI / x.sqrt() * (p * c - q * s)
}

fn add_hankel_term(k: usize, a: f64, p: &mut f64, q: &mut f64) {
    // a_k / x^k alternates between the P and Q series with sign (-1)^{⌊k/2⌋}
    let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    if k.is_multiple_of(2) {
        *p += sign * a;
    } else {
        *q += sign * a;
    }
}

// ---------------------------------------------------------------------------
// zeros

const BISECTION_WIDTH: f64 = 1e-6;
const NEWTON_BUDGET: usize = 60;

fn zero_cache() -> &'static RwLock<HashMap<u64, Vec<f64>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Vec<f64>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn mcmahon(order: Order, k: usize) -> f64 {
    let mu = order.mu();
    let b = (k as f64 + mu / 2.0 - 0.25) * PI;
    let m = 4.0 * mu * mu;
    b - (m - 1.0) / (8.0 * b) - 4.0 * (m - 1.0) * (7.0 * m - 31.0) / (3.0 * (8.0 * b).powi(3))
}

/// Next positive zero after `prev` (the (k-1)-th zero, 0 for k = 1).
fn next_zero(order: Order, k: usize, prev: f64) -> Result<f64> {
    if order.is_minus_half() {
        return Ok((k as f64 - 0.5) * PI);
    }
    if order.is_half() {
        return Ok(k as f64 * PI);
    }
    let step = 0.5;
    let f = |x: f64| order.j(x);
    let mut a = prev + step;
    let fa0 = f(a);
    // consecutive zeros are more than 2 apart; a McMahon seed within ±0.6 may skip stepping
    let seed = mcmahon(order, k) - 0.6;
    if order.mu() <= 4.0 && seed > a && seed < prev + 2.0 * PI && f(seed).signum() == fa0.signum() {
        a = seed;
    }
    let mut fa = f(a);
    let mut b = a + step;
    let mut fb = f(b);
    let mut guard = 0;
    while fa.signum() == fb.signum() && fb != 0.0 {
        a = b;
        fa = fb;
        b += step;
        fb = f(b);
        guard += 1;
        if guard > 200 {
            return Err(Error::Convergence {
                iterations: guard,
                at: b,
            });
        }
    }
    if fb == 0.0 {
        return Ok(b);
    }
    while b - a > BISECTION_WIDTH {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..NEWTON_BUDGET {
        let dx = f(x) / j_prime(order, x);
        let next = x - dx;
        if !(next > a - BISECTION_WIDTH && next < b + BISECTION_WIDTH) {
            return Err(Error::Convergence {
                iterations: NEWTON_BUDGET,
                at: x,
            });
        }
        x = next;
        if dx.abs() <= 4.0 * f64::EPSILON * x {
            return Ok(x);
        }
    }
    // Newton stalls at the rounding floor; accept when already converged to the bracket tolerance
    if f(x).abs() < 1e-13 {
        Ok(x)
    } else {
        Err(Error::Convergence {
            iterations: NEWTON_BUDGET,
            at: x,
        })
    }
}

fn ensure_zeros(order: Order, need: impl Fn(&[f64]) -> bool) -> Result<Vec<f64>> {
    let key = order.mu().to_bits();
    {
        let cache = zero_cache().read();
        if let Some(z) = cache.get(&key) {
            if need(z) {
                return Ok(z.clone());
            }
        }
    }
    let mut cache = zero_cache().write();
    let zeros = cache.entry(key).or_default();
    while !need(zeros) {
        let k = zeros.len() + 1;
        let prev = zeros.last().copied().unwrap_or(0.0);
        let z = next_zero(order, k, prev)?;
        zeros.push(z);
    }
    Ok(zeros.clone())
}

/// The k-th positive zero j_{μ,k}, k ≥ 1.
pub fn bessel_zero(order: Order, k: usize) -> Result<f64> {
    if k == 0 {
        return domain("zero index must be >= 1 (j_{mu,0} = 0 by convention)");
    }
    if order.is_minus_half() {
        return Ok((k as f64 - 0.5) * PI);
    }
    if order.is_half() {
        return Ok(k as f64 * PI);
    }
    Ok(ensure_zeros(order, |z| z.len() >= k)?[k - 1])
}

/// All positive zeros below `x_max`, followed by the first zero at or above it.
pub fn zeros_through(order: Order, x_max: f64) -> Result<Vec<f64>> {
    if order.is_minus_half() || order.is_half() {
        let offset = if order.is_half() { 0.0 } else { 0.5 };
        let mut out = Vec::new();
        let mut k = 1;
        loop {
            let z = (k as f64 - offset) * PI;
            out.push(z);
            if z >= x_max {
                return Ok(out);
            }
            k += 1;
        }
    }
    let all = ensure_zeros(order, |z| z.last().is_some_and(|&l| l >= x_max))?;
    let end = all.iter().position(|&z| z >= x_max).map_or(all.len(), |i| i + 1);
    Ok(all[..end].to_vec())
}

/// Maximum over the grid of |J_μ(η) - (μ+1)η^{-1}J_{μ+1}(η) - J'_{μ+1}(η)|.
pub fn verify_recurrence(order: Order, grid: &RadialGrid) -> Result<f64> {
    let up = order.next();
    let mut worst: f64 = 0.0;
    for &eta in grid.points() {
        if !(eta > 0.0) {
            return domain("recurrence check needs positive abscissae");
        }
        let lhs = order.j(eta);
        let rhs = up.mu() / eta * up.j(eta) + j_prime(up, eta);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Phase-corrected leading asymptotic amplitude, exported for tests of the decay bound.
pub fn leading_asymptotic(order: Order, eta: f64) -> f64 {
    (2.0 / (PI * eta)).sqrt() * (eta - order.mu() * FRAC_PI_2 - FRAC_PI_4).cos()
}
