//! Lobe-wise quadrature of ∫₀^∞ W(s) s^{1/2} J_μ(s) ds.
//!
//! The half line is split at the zeros of J_μ. Each lobe has a fixed sign of
//! J_μ, so for W ≥ 0 the integral is an alternating series whose terms can be
//! checked for monotone decrease.

mod rules;

use std::fmt;

use rayon::prelude::*;

use crate::bessel::{bessel_zero, Order};
use crate::error::{Error, Result};

pub use rules::{composite_gauss_legendre, gauss_legendre, integrate, Integral};

/// Panel budget of a single lobe.
const LOBE_PANELS: usize = 4000;
/// Relative slack of the finite-difference monotonicity checks.
const MONOTONE_SLACK: f64 = 1e-12;
/// Relative drop per lobe demanded of a strictly decreasing weight.
const STRICT_DROP: f64 = 1e-14;

/// Declared monotonicity of a weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    StrictlyDecreasing,
    NonIncreasing,
    Unknown,
}

/// A weight W on (0, ∞) together with what is known about it.
pub struct WeightSpec<'a> {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    monotone: Monotonicity,
    small_s_exponent: f64,
    support_start: f64,
    support_end: Option<f64>,
}

impl fmt::Debug for WeightSpec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSpec")
            .field("monotone", &self.monotone)
            .field("small_s_exponent", &self.small_s_exponent)
            .field("support_start", &self.support_start)
            .field("support_end", &self.support_end)
            .finish_non_exhaustive()
    }
}

impl<'a> WeightSpec<'a> {
    /// Weight bounded near 0 (ε = 0) with unknown monotonicity.
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        WeightSpec {
            eval: Box::new(eval),
            monotone: Monotonicity::Unknown,
            small_s_exponent: 0.0,
            support_start: 0.0,
            support_end: None,
        }
    }

    pub fn monotone(mut self, flag: Monotonicity) -> Self {
        self.monotone = flag;
        self
    }

    /// W(s) = O(s^ε) as s → 0.
    pub fn small_s_exponent(mut self, eps: f64) -> Self {
        self.small_s_exponent = eps;
        self
    }

    /// Treat W as zero below `start`.
    pub fn support_start(mut self, start: f64) -> Self {
        self.support_start = start.max(0.0);
        self
    }

    /// Treat W as zero beyond `end`. Used for super-exponentially decaying weights.
    pub fn support(mut self, end: f64) -> Self {
        self.support_end = Some(end);
        self
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotone
    }

    pub fn exponent(&self) -> f64 {
        self.small_s_exponent
    }

    pub fn support_end(&self) -> Option<f64> {
        self.support_end
    }
}

/// One lobe [j_{μ,k}, j_{μ,k+1}] (j_{μ,0} = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lobe {
    pub k: usize,
    pub start: f64,
    pub end: f64,
    pub signed: f64,
    /// M_{μ,k}; equals |signed| for a weight of one sign.
    pub abs: f64,
    /// Quadrature error estimate.
    pub error: f64,
}

/// Why lobe generation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Threshold,
    MaxLobes,
    SupportEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LobeDecomposition {
    pub order: Order,
    pub lobes: Vec<Lobe>,
    /// Bound on the sum of the omitted lobes once M_k is decreasing.
    pub tail_bound: f64,
    pub stop: StopReason,
    /// Whether W dropped by a relative 1e-14 across every lobe where it was positive.
    pub weight_strictly_decreasing: bool,
    /// Violations of the declared monotonicity seen by spot checks.
    pub warnings: Vec<String>,
}

impl LobeDecomposition {
    /// Assemble a decomposition from precomputed lobes.
    pub fn from_lobes(order: Order, lobes: Vec<Lobe>, tail_bound: f64) -> Self {
        LobeDecomposition {
            order,
            lobes,
            tail_bound,
            stop: StopReason::MaxLobes,
            weight_strictly_decreasing: false,
            warnings: Vec::new(),
        }
    }

    pub fn abs_integrals(&self) -> impl Iterator<Item = f64> + '_ {
        self.lobes.iter().map(|l| l.abs)
    }
}

/// Signed lobe sum with its certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingSum {
    pub value: f64,
    pub error_bound: f64,
    /// M_{k+1} ≤ M_k for every k, up to quadrature error.
    pub decreasing: bool,
    /// M_{k+1} < M_k for every k, in floating point.
    pub strictly_decreasing: bool,
    /// Positivity proved up to the reported errors.
    pub certified: bool,
}

/// s_max = η (ln(1/tol))^{1/4}, beyond which e^{-(s/η)^4} < tol.
pub fn truncation_point(eta: f64, tol: f64) -> f64 {
    debug_assert!(eta > 0.0 && tol > 0.0 && tol < 1.0);
    eta * (-tol.ln()).powf(0.25)
}

/// Integral of W(s) s^{1/2} J_μ(s) over [a, b].
fn lobe_integral(order: Order, weight: &WeightSpec<'_>, a: f64, b: f64, tol: f64) -> Result<Integral> {
    integrate(|s| weight.eval(s) * order.sqrt_j(s), a, b, tol, 0.0, LOBE_PANELS)
}

/// First lobe [0, b]: near 0 the integrand behaves like s^{ε+μ+1/2}.
/// A negative exponent a > -1 is removed by s = b u^q with q = 1/(a+1).
fn first_lobe(order: Order, weight: &WeightSpec<'_>, b: f64, tol: f64) -> Result<Integral> {
    let a = weight.small_s_exponent + order.mu() + 0.5;
    let result = if a < 0.0 && a > -1.0 {
        let q = 1.0 / (a + 1.0);
        integrate(
            |u: f64| {
                if u == 0.0 {
                    return 0.0;
                }
                let s = b * u.powf(q);
                weight.eval(s) * order.sqrt_j(s) * b * q * u.powf(q - 1.0)
            },
            0.0,
            1.0,
            tol,
            0.0,
            LOBE_PANELS,
        )
    } else {
        lobe_integral(order, weight, 0.0, b, tol)
    };
    match result {
        Ok(r) if r.value.is_finite() => Ok(r),
        Ok(r) => Err(Error::NonIntegrable(format!(
            "first lobe [0, {b}] evaluated to {} (s^{a} behaviour at 0)",
            r.value
        ))),
        Err(e) => Err(Error::NonIntegrable(format!(
            "first lobe [0, {b}] did not converge with integrand ~ s^{a}: {e}"
        ))),
    }
}

fn monotone_warnings(weight: &WeightSpec<'_>, lo: f64, hi: f64) -> Vec<String> {
    if weight.monotone == Monotonicity::Unknown || !(hi > lo) {
        return Vec::new();
    }
    let n = 256;
    let (a, b) = (lo.ln(), hi.ln());
    let mut prev_s = lo;
    let mut prev = weight.eval(lo);
    let mut out = Vec::new();
    for i in 1..=n {
        let s = (a + (b - a) * i as f64 / n as f64).exp();
        let w = weight.eval(s);
        if w - prev > MONOTONE_SLACK * prev.abs().max(f64::MIN_POSITIVE) {
            out.push(format!(
                "weight declared {:?} increases from {prev:e} at s = {prev_s} to {w:e} at s = {s}",
                weight.monotone
            ));
        }
        prev = w;
        prev_s = s;
    }
    for msg in &out {
        log::warn!("{msg}");
    }
    out
}

fn zero(order: Order, k: usize) -> Result<f64> {
    if k == 0 {
        Ok(0.0)
    } else {
        bessel_zero(order, k)
    }
}

/// Split ∫ W s^{1/2} J_μ at the zeros of J_μ and integrate each lobe.
///
/// Lobes are appended until k_max lobes exist, the support of W ends, or a
/// lobe falls below tol times the running sum of |lobes|.
pub fn decompose_lobes(order: Order, weight: &WeightSpec<'_>, k_max: usize, tol: f64) -> Result<LobeDecomposition> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be positive".into()));
    }
    let end = weight.support_end.unwrap_or(f64::INFINITY);
    let mut lobes: Vec<Lobe> = Vec::new();
    let mut running = 0.0;
    let mut stop = StopReason::MaxLobes;
    let mut batch = 4;
    'outer: while lobes.len() < k_max {
        let first = lobes.len();
        let last = (first + batch).min(k_max);
        // zeros up to last+1, generated sequentially before the parallel section
        let mut bounds = Vec::with_capacity(last - first + 1);
        for k in first..=last {
            let z = zero(order, k)?;
            bounds.push(z);
            if z >= end {
                break;
            }
        }
        let count = bounds.len() - 1;
        let computed: Vec<Result<Lobe>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let k = first + i;
                let a = bounds[i].max(weight.support_start);
                let b = bounds[i + 1].min(end);
                let r = if b <= a {
                    Integral { value: 0.0, error: 0.0, abs_value: 0.0, panels: 0 }
                } else if k == 0 && weight.support_start == 0.0 {
                    first_lobe(order, weight, b, tol)?
                } else {
                    lobe_integral(order, weight, a, b, tol)?
                };
                Ok(Lobe {
                    k,
                    start: a,
                    end: b,
                    signed: r.value,
                    abs: r.value.abs(),
                    error: r.error,
                })
            })
            .collect();
        for lobe in computed {
            let lobe = lobe?;
            // lobes before the support start do not trigger the stop rule
            let below = lobe.k > 0 && running > 0.0 && lobe.abs <= tol * running;
            running += lobe.abs;
            let clipped = lobe.end >= end;
            lobes.push(lobe);
            if below {
                stop = StopReason::Threshold;
                break 'outer;
            }
            if clipped {
                stop = StopReason::SupportEnd;
                break 'outer;
            }
        }
        if count == 0 {
            stop = StopReason::SupportEnd;
            break;
        }
        batch = (batch * 2).min(64);
    }

    let tail_bound = match stop {
        StopReason::SupportEnd => weight.eval(end).abs() * std::f64::consts::PI,
        _ => lobes.last().map_or(0.0, |l| l.abs),
    };
    let weight_strictly_decreasing = lobes.iter().all(|l| {
        let w0 = weight.eval(l.start.max(f64::MIN_POSITIVE));
        let w1 = weight.eval(l.end);
        !(w0 > 0.0) || w0 - w1 >= STRICT_DROP * w0
    });
    let hi = lobes.last().map_or(0.0, |l| l.end);
    let lo = lobes.first().map_or(0.0, |l| l.end) * 1e-3;
    let warnings = monotone_warnings(weight, lo, hi);
    Ok(LobeDecomposition {
        order,
        lobes,
        tail_bound,
        stop,
        weight_strictly_decreasing,
        warnings,
    })
}

/// Σ signed lobe integrals in increasing k, with the alternating-series certificate.
pub fn alternating_sum(d: &LobeDecomposition) -> AlternatingSum {
    let lobes = d.lobes.as_slice();
    let value: f64 = lobes.iter().map(|l| l.signed).sum();
    let quad_error: f64 = lobes.iter().map(|l| l.error).sum();
    let decreasing = lobes
        .windows(2)
        .all(|w| w[1].abs <= w[0].abs + w[0].error + w[1].error);
    let strictly_decreasing = lobes.windows(2).all(|w| w[1].abs < w[0].abs);
    let error_bound = d.tail_bound + quad_error;
    let leading_gap = match lobes {
        [] => false,
        [only] => only.abs > only.error,
        [l0, l1, ..] => l0.abs - l1.abs > l0.error + l1.error,
    };
    let certified = decreasing && leading_gap && value > error_bound;
    AlternatingSum {
        value,
        error_bound,
        decreasing,
        strictly_decreasing,
        certified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn half() -> Order {
        Order::new(0.5).unwrap()
    }

    #[test]
    fn truncation_examples() {
        assert!((truncation_point(1.0, (-16f64).exp()) - 2.0).abs() < 1e-12);
        assert!((truncation_point(2.0, (-1f64).exp()) - 2.0).abs() < 1e-12);
        // (18 ln 10)^{1/4} = 2.53730...
        assert!((truncation_point(1.0, 1e-18) - (18.0 * 10f64.ln()).powf(0.25)).abs() < 1e-14);
        assert!((truncation_point(1.0, 1e-18) - 2.5373013378).abs() < 1e-9);
    }

    #[test]
    fn single_lobe_closed_form() {
        let w = WeightSpec::new(|_| 1.0);
        let r = lobe_integral(half(), &w, PI, 2.0 * PI, 1e-12).unwrap();
        assert!((r.value + 2.0 * (2.0 / PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exponential_weight_lobes_decrease() {
        let w = WeightSpec::new(|s: f64| (-s).exp()).monotone(Monotonicity::StrictlyDecreasing);
        let d = decompose_lobes(half(), &w, 10, 1e-14).unwrap();
        assert_eq!(d.lobes.len(), 10);
        assert!(d.warnings.is_empty());
        assert!(d.weight_strictly_decreasing);
        for pair in d.lobes.windows(2) {
            assert!(pair[1].abs < pair[0].abs);
            assert!(pair[0].signed * pair[1].signed < 0.0);
        }
        let s = alternating_sum(&d);
        assert!(s.certified && s.strictly_decreasing && s.value > 0.0);
        // ∫ e^{-s} sin s ds · √(2/π) = √(2/π)/2
        assert!((s.value - (2.0 / PI).sqrt() / 2.0).abs() <= s.error_bound);
    }

    #[test]
    fn support_start_skips_leading_lobes() {
        let w = WeightSpec::new(|s: f64| s.powi(-3)).support_start(10.0);
        let d = decompose_lobes(half(), &w, 10_000, 1e-12).unwrap();
        assert!(d.lobes.iter().take(3).all(|l| l.signed == 0.0));
        assert_eq!(d.lobes[3].start, 10.0);
        // √(2/π) ∫_10^∞ sin(s) s^{-3} ds by integration by parts to high order
        let direct = integrate(|s: f64| (2.0 / PI).sqrt() * s.sin() * s.powi(-3), 10.0, 10.0 + 2000.0 * PI, 1e-12, 1e-16, 100_000)
            .unwrap()
            .value;
        assert!((alternating_sum(&d).value - direct).abs() < 1e-9);
    }

    #[test]
    fn zero_weight() {
        let w = WeightSpec::new(|_| 0.0);
        let d = decompose_lobes(Order::new(1.3).unwrap(), &w, 50, 1e-10).unwrap();
        assert!(d.lobes.iter().all(|l| l.signed == 0.0));
        let s = alternating_sum(&d);
        assert_eq!(s.value, 0.0);
        assert!(!s.certified);
    }

    #[test]
    fn lobe_sum_matches_direct_quadrature() {
        let s_max = truncation_point(1.0, 1e-30);
        let w = WeightSpec::new(|s: f64| (-s.powi(4)).exp())
            .monotone(Monotonicity::StrictlyDecreasing)
            .support(s_max);
        let d = decompose_lobes(half(), &w, 100, 1e-12).unwrap();
        let s = alternating_sum(&d);
        let direct = integrate(
            |s: f64| (-s.powi(4)).exp() * (2.0 / PI).sqrt() * s.sin(),
            0.0,
            s_max,
            1e-13,
            0.0,
            1000,
        )
        .unwrap();
        assert!((s.value - direct.value).abs() < 1e-8);
        assert!(s.certified);
    }

    #[test]
    fn decreasing_sequence_pairs() {
        let order = half();
        let lobes: Vec<Lobe> = [3.0, 2.0, 1.5, 1.2]
            .iter()
            .enumerate()
            .map(|(k, &m)| Lobe {
                k,
                start: k as f64,
                end: k as f64 + 1.0,
                signed: if k % 2 == 0 { m } else { -m },
                abs: m,
                error: 0.0,
            })
            .collect();
        let s = alternating_sum(&LobeDecomposition::from_lobes(order, lobes, 1.0));
        assert!(s.value >= 1.0 && s.certified);
    }

    #[test]
    fn equal_leading_lobes_are_not_certified() {
        let lobes = vec![
            Lobe { k: 0, start: 0.0, end: 1.0, signed: 1.0, abs: 1.0, error: 0.0 },
            Lobe { k: 1, start: 1.0, end: 2.0, signed: -1.0, abs: 1.0, error: 0.0 },
        ];
        let s = alternating_sum(&LobeDecomposition::from_lobes(half(), lobes, 0.0));
        assert_eq!(s.value, 0.0);
        assert!(!s.certified);
    }

    #[test]
    fn singular_weight_near_zero() {
        // W = s^{-1.5} with μ = 1/2: integrand ~ s^{-0.5}·√(2/π) near 0
        let w = WeightSpec::new(|s: f64| s.powf(-1.5) * (-s).exp()).small_s_exponent(-1.5);
        let d = decompose_lobes(half(), &w, 3, 1e-12).unwrap();
        let direct = integrate(
            |u: f64| {
                // s = u², ds = 2u du, integrand √(2/π) sin(s) s^{-1.5} e^{-s}
                let s = u * u;
                if u == 0.0 {
                    return 2.0 * (2.0 / PI).sqrt();
                }
                (2.0 / PI).sqrt() * s.sin() * s.powf(-1.5) * (-s).exp() * 2.0 * u
            },
            0.0,
            PI.sqrt(),
            1e-13,
            0.0,
            500,
        )
        .unwrap();
        assert!((d.lobes[0].signed - direct.value).abs() < 1e-10);
    }

    #[test]
    fn non_integrable_weight_is_reported() {
        let w = WeightSpec::new(|s: f64| s.powf(-2.5)).small_s_exponent(-2.5);
        assert!(matches!(
            decompose_lobes(half(), &w, 3, 1e-10),
            Err(Error::NonIntegrable(_))
        ));
    }

    #[test]
    fn increasing_weight_declared_monotone_warns() {
        let w = WeightSpec::new(|s: f64| (-(s - 5.0).powi(2)).exp()).monotone(Monotonicity::NonIncreasing);
        let d = decompose_lobes(half(), &w, 6, 1e-10).unwrap();
        assert!(!d.warnings.is_empty());
    }
}
