//! Positivity certificates and negativity witnesses for S(t)|·|^{-β}.

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::Order;
use crate::error::{Error, Result};
use crate::grid::{HermiteTable, RadialGrid};
use crate::kernel::{f_profile_raw, sign_changes, LOBE_TOL, WEIGHT_CUT};
use crate::quad::{alternating_sum, decompose_lobes, truncation_point, Monotonicity, WeightSpec};

use super::profile::{a_limit, a_tilde, check_beta, profile_lobes, profile_sum, BetaRange};

/// Lobe tolerance of the grid scan; witnesses are reconfirmed 100 times tighter.
pub const SCAN_TOL: f64 = 1e-10;
pub const SCAN_POINTS: usize = 2000;
pub const SCAN_MIN: f64 = 1e-3;
pub const SCAN_MAX: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedPositive,
    WitnessNegative,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    LobeMonotonicity,
    N2DerivativeTrick,
    N1MonotoneMap,
    GridScan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub verdict: Verdict,
    pub method: Method,
    /// (η, F(η)) with F(η) < 0 beyond its error bound.
    pub witness: Option<(f64, f64)>,
    /// Analytic threshold of the dimension-specific argument.
    pub beta_0: f64,
    /// Smallest scanned value (η, F(η)).
    pub scan_min: Option<(f64, f64)>,
    pub details: String,
}

/// β₀ = 7/16, 1/2, (N+1)/2 for N = 1, 2, ≥ 3.
pub fn beta_0(n: usize) -> f64 {
    match n {
        1 => 7.0 / 16.0,
        2 => 0.5,
        _ => (n as f64 + 1.0) / 2.0,
    }
}

pub fn scan_grid() -> RadialGrid {
    RadialGrid::log(SCAN_MIN, SCAN_MAX, SCAN_POINTS).expect("valid scan grid")
}

#[derive(Debug, Clone, Copy)]
struct ScanPoint {
    eta: f64,
    value: f64,
    certified: bool,
}

fn scan(n: usize, beta: f64, grid: &RadialGrid, lobe_tol: f64) -> Result<Vec<ScanPoint>> {
    let rows: Vec<Result<ScanPoint>> = grid
        .points()
        .par_iter()
        .map(|&eta| {
            let d = profile_lobes(n, beta, eta, lobe_tol)?;
            let s = alternating_sum(&d);
            Ok(ScanPoint {
                eta,
                value: s.value,
                certified: s.certified && d.warnings.is_empty(),
            })
        })
        .collect();
    rows.into_iter().collect()
}

fn scan_min(points: &[ScanPoint]) -> Option<(f64, f64)> {
    points
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .map(|p| (p.eta, p.value))
}

/// First negative scanned value that is still negative beyond its error at tol/100.
fn reconfirmed_witness(n: usize, beta: f64, points: &[ScanPoint]) -> Result<Option<(f64, f64)>> {
    for p in points.iter().filter(|p| p.value < 0.0) {
        let s = profile_sum(n, beta, p.eta, SCAN_TOL / 100.0)?;
        if s.value < 0.0 && -s.value > s.error_bound {
            return Ok(Some((p.eta, s.value)));
        }
    }
    Ok(None)
}

fn scan_report(n: usize, beta: f64, points: &[ScanPoint], note: &str) -> Result<PositivityReport> {
    let witness = reconfirmed_witness(n, beta, points)?;
    let min = scan_min(points);
    let (verdict, details) = match witness {
        Some((eta, v)) => (
            Verdict::WitnessNegative,
            format!("{note}F({eta}) = {v:e} < 0, reconfirmed at lobe tolerance {:e}", SCAN_TOL / 100.0),
        ),
        None if points.iter().all(|p| p.value > 0.0) => (
            Verdict::Inconclusive,
            format!("{note}F > 0 at all {} scan points but no certificate applies", points.len()),
        ),
        None => (
            Verdict::Inconclusive,
            format!("{note}non-positive scan values did not survive reconfirmation"),
        ),
    };
    Ok(PositivityReport {
        verdict,
        method: Method::GridScan,
        witness,
        beta_0: beta_0(n),
        scan_min: min,
        details,
    })
}

/// Sign of s(1-β+4x)h'(s)/h(s) for h(s) = (1-β+4s⁴)e^{-s⁴}s^{β-2}, x = s⁴.
fn n1_map_numerator(beta: f64, x: f64) -> f64 {
    -16.0 * x * x + (4.0 + 8.0 * beta) * x + (beta - 2.0) * (1.0 - beta)
}

/// N = 1 sine form: F_{1,β}(η) = ∫ W s^{1/2} J_{1/2}(s) ds with W = (1-β+4s⁴/η⁴)E(s/η)s^{β-2}.
fn n1_sine_form(beta: f64, eta: f64, lobe_tol: f64) -> Result<(f64, f64, bool)> {
    let weight = WeightSpec::new(move |s: f64| {
        let x = (s / eta).powi(4);
        (1.0 - beta + 4.0 * x) * (-x).exp() * s.powf(beta - 2.0)
    })
    .small_s_exponent(beta - 2.0)
    .monotone(Monotonicity::StrictlyDecreasing)
    .support(truncation_point(eta, WEIGHT_CUT));
    let d = decompose_lobes(Order::new(0.5)?, &weight, 1_000_000, lobe_tol)?;
    let s = alternating_sum(&d);
    Ok((
        s.value,
        s.error_bound,
        s.certified && d.warnings.is_empty() && d.weight_strictly_decreasing,
    ))
}

fn failed_points<T>(items: &[T], ok: impl Fn(&T) -> bool) -> usize {
    items.iter().filter(|p| !ok(p)).count()
}

/// Certify F_{N,β} > 0 by the argument that fits N and β, or scan for a witness.
pub fn certify_positivity(n: usize, beta: f64) -> Result<PositivityReport> {
    check_beta(n, beta, BetaRange::Open)?;
    let grid = scan_grid();
    let b0 = beta_0(n);
    let points = scan(n, beta, &grid, SCAN_TOL)?;
    let min = scan_min(&points);
    let certified = |method, details: String| PositivityReport {
        verdict: Verdict::CertifiedPositive,
        method,
        witness: None,
        beta_0: b0,
        scan_min: min,
        details,
    };
    if beta <= b0 {
        match n {
            1 => {
                // h' ≤ 0 everywhere iff the quadratic numerator is ≤ 0 for x ≥ 0
                let xs: Vec<f64> = (0..=20_000).map(|i| i as f64 * 1e-3).collect();
                let worst = xs.iter().map(|&x| n1_map_numerator(beta, x)).fold(f64::MIN, f64::max);
                let peak = n1_map_numerator(beta, (1.0 + 2.0 * beta) / 8.0);
                let sine: Vec<Result<(f64, f64, bool)>> =
                    grid.points().par_iter().map(|&eta| n1_sine_form(beta, eta, SCAN_TOL)).collect();
                let sine: Vec<(f64, f64, bool)> = sine.into_iter().collect::<Result<_>>()?;
                let bad = failed_points(&sine, |s| s.2);
                if worst <= 1e-12 && peak <= 1e-12 && bad == 0 {
                    return Ok(certified(
                        Method::N1MonotoneMap,
                        format!(
                            "(1-β+4s⁴)e^(-s⁴)s^(β-2) non-increasing (max numerator {peak:e}); sine-form lobe sums certified at {} points",
                            sine.len()
                        ),
                    ));
                }
                return scan_report(
                    n,
                    beta,
                    &points,
                    &format!("N1 map check failed (numerator max {peak:e}, {bad} uncertified points); "),
                );
            }
            2 => {
                // η^{-β}F_{2,β} decreases because F_{4,β+2} > 0; both limits Ã and A are positive
                let up = scan(4, beta + 2.0, &grid, SCAN_TOL)?;
                let bad = failed_points(&up, |p| p.certified && p.value > 0.0);
                if bad == 0 && a_tilde(2, beta) > 0.0 && a_limit(2, beta) > 0.0 {
                    return Ok(certified(
                        Method::N2DerivativeTrick,
                        format!(
                            "F_(4,β+2) certified positive at {} points, so η^(-β)F_(2,β) decreases from Ã = {} to η^(-β)A",
                            up.len(),
                            a_tilde(2, beta)
                        ),
                    ));
                }
                return scan_report(n, beta, &points, &format!("F_(4,β+2) not certified at {bad} points; "));
            }
            _ => {
                let bad = failed_points(&points, |p| p.certified);
                if bad == 0 {
                    return Ok(certified(
                        Method::LobeMonotonicity,
                        format!(
                            "W = e^(-(s/η)⁴)s^(β-(N+1)/2) strictly decreasing; lobe sums certified at {} points",
                            points.len()
                        ),
                    ));
                }
                return scan_report(n, beta, &points, &format!("{bad} lobe certificates failed; "));
            }
        }
    }
    scan_report(n, beta, &points, "")
}

/// Grid-scan verdict only; no certificate is attempted.
pub fn scan_verdict(n: usize, beta: f64) -> Result<PositivityReport> {
    check_beta(n, beta, BetaRange::Open)?;
    let points = scan(n, beta, &scan_grid(), SCAN_TOL)?;
    scan_report(n, beta, &points, "")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdScan {
    /// Largest β whose scan found no negative value.
    pub largest_positive: Option<f64>,
    /// Smallest β with a reconfirmed negative witness.
    pub smallest_negative: Option<f64>,
    /// Every probed β with its verdict, in probe order.
    pub probes: Vec<(f64, Verdict)>,
}

/// Bisection over β on the grid-scan verdict.
pub fn scan_beta_threshold(n: usize, beta_lo: f64, beta_hi: f64, resolution: f64) -> Result<ThresholdScan> {
    check_beta(n, beta_lo, BetaRange::Open)?;
    check_beta(n, beta_hi, BetaRange::Open)?;
    if !(beta_lo < beta_hi) || !(resolution > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need beta_lo < beta_hi and a positive resolution, got [{beta_lo}, {beta_hi}] / {resolution}"
        )));
    }
    let mut probes = Vec::new();
    let mut probe = |b: f64| -> Result<bool> {
        let v = scan_verdict(n, b)?.verdict;
        probes.push((b, v));
        Ok(v != Verdict::WitnessNegative)
    };
    let lo_positive = probe(beta_lo)?;
    let hi_positive = probe(beta_hi)?;
    if lo_positive && !hi_positive {
        let (mut lo, mut hi) = (beta_lo, beta_hi);
        while hi - lo > resolution {
            let mid = 0.5 * (lo + hi);
            if probe(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let largest_positive = probes
        .iter()
        .filter(|p| p.1 != Verdict::WitnessNegative)
        .map(|p| p.0)
        .fold(None, |m: Option<f64>, b| Some(m.map_or(b, |m| m.max(b))));
    let smallest_negative = probes
        .iter()
        .filter(|p| p.1 == Verdict::WitnessNegative)
        .map(|p| p.0)
        .fold(None, |m: Option<f64>, b| Some(m.map_or(b, |m| m.min(b))));
    Ok(ThresholdScan {
        largest_positive,
        smallest_negative,
        probes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityWitness {
    pub eta: f64,
    /// F_{N,N}(η) by direct quadrature at β = N.
    pub value: f64,
    /// η^N f_N(η) through the kernel module.
    pub kernel_value: f64,
    pub relative_difference: f64,
}

/// η in the first negative region of f_N, with F_{N,N}(η) = η^N f_N(η) < 0.
pub fn negativity_witness(n: usize) -> Result<NegativityWitness> {
    check_beta(n, n as f64, BetaRange::IncludingN)?;
    let zeros = sign_changes(n, 20.0)?;
    if zeros.len() < 2 {
        return Err(Error::InvalidInput(format!("f_{n} has fewer than two sign changes on (0, 20)")));
    }
    let (a, b) = (zeros[0], zeros[1]);
    // minimum of f_N over the first negative region on a coarse grid
    let eta = (1..100)
        .map(|i| a + (b - a) * i as f64 / 100.0)
        .map(|e| (e, f_profile_raw(n, e).map_or(f64::INFINITY, |v| v.0)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|p| p.0)
        .expect("non-empty range");
    let value = profile_sum(n, n as f64, eta, LOBE_TOL)?.value;
    let kernel_value = eta.powi(n as i32) * f_profile_raw(n, eta)?.0;
    Ok(NegativityWitness {
        eta,
        value,
        kernel_value,
        relative_difference: (value - kernel_value).abs() / kernel_value.abs(),
    })
}

/// ψ(s) = s^{(N-1)/2} F[φ](s) tabulated with derivatives.
///
/// Interpolation is cubic Hermite in (ln s, ln ψ), extended by power laws.
#[derive(Debug, Clone)]
pub struct PsiTable {
    s: Vec<f64>,
    psi: Vec<f64>,
    dpsi: Vec<f64>,
    log_table: Option<HermiteTable>,
}

impl PsiTable {
    pub fn new(s: Vec<f64>, psi: Vec<f64>, dpsi: Vec<f64>) -> Result<Self> {
        if s.len() < 2 || psi.len() != s.len() || dpsi.len() != s.len() {
            return Err(Error::InvalidInput("ψ table needs >= 2 samples with matching values and derivatives".into()));
        }
        RadialGrid::new(s.clone())?;
        if !(s[0] > 0.0) {
            return Err(Error::InvalidInput("ψ abscissae must be positive".into()));
        }
        let log_table = if psi.iter().all(|&p| p > 0.0) {
            let grid = RadialGrid::new(s.iter().map(|x| x.ln() - s[0].ln()).collect())?;
            let values = psi.iter().map(|p| p.ln()).collect();
            let slopes = s.iter().zip(&psi).zip(&dpsi).map(|((x, p), d)| x * d / p).collect();
            Some(HermiteTable::new(grid, values, slopes)?)
        } else {
            None
        };
        Ok(PsiTable { s, psi, dpsi, log_table })
    }

    /// Tabulate a closure and its derivative on a grid.
    pub fn from_fn(grid: &RadialGrid, psi: impl Fn(f64) -> f64, dpsi: impl Fn(f64) -> f64) -> Result<Self> {
        let s = grid.points().to_vec();
        let v = s.iter().map(|&x| psi(x)).collect();
        let d = s.iter().map(|&x| dpsi(x)).collect();
        Self::new(s, v, d)
    }

    fn end_slope(&self, i: usize) -> f64 {
        self.s[i] * self.dpsi[i] / self.psi[i]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let table = self.log_table.as_ref().expect("positive table");
        let last = self.s.len() - 1;
        if x <= self.s[0] {
            self.psi[0] * (x / self.s[0]).powf(self.end_slope(0))
        } else if x >= self.s[last] {
            self.psi[last] * (x / self.s[last]).powf(self.end_slope(last))
        } else {
            (table.eval(x.ln() - self.s[0].ln())).exp()
        }
    }
}

/// Positivity of [S(t)φ](x) = |x|^{-(N+1)/2} ∫ ψ(s/|x|) e^{-ts⁴/|x|⁴} s^{1/2} J_{(N-2)/2}(s) ds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem11Report {
    pub report: PositivityReport,
    /// (|x|, t, value, error bound, certified) per sample.
    pub samples: Vec<(f64, f64, f64, f64, bool)>,
}

pub fn certify_theorem11(n: usize, psi: &PsiTable, samples: &[(f64, f64)]) -> Result<Theorem11Report> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("the ψ criterion needs N >= 3, got {n}")));
    }
    if let Some(i) = psi.psi.iter().position(|&p| !(p > 0.0)) {
        return Err(Error::HypothesisViolation {
            condition: 'b',
            at: psi.s[i],
            detail: format!("ψ = {} is not positive", psi.psi[i]),
        });
    }
    if let Some(i) = psi.dpsi.iter().position(|&d| d > 1e-12 * psi.psi.iter().fold(0.0f64, |m, p| m.max(*p))) {
        return Err(Error::HypothesisViolation {
            condition: 'c',
            at: psi.s[i],
            detail: format!("ψ' = {} > 0", psi.dpsi[i]),
        });
    }
    let order = Order::radial(n)?;
    let eps = psi.end_slope(0);
    let rows: Vec<Result<(f64, f64, f64, f64, bool)>> = samples
        .par_iter()
        .map(|&(x, t)| {
            if !(x > 0.0 && t > 0.0) {
                return Err(Error::InvalidInput(format!("sample (|x|, t) = ({x}, {t}) must be positive")));
            }
            let weight = WeightSpec::new(move |s: f64| psi.eval(s / x) * (-t * (s / x).powi(4)).exp())
                .small_s_exponent(eps.min(0.0))
                .monotone(Monotonicity::StrictlyDecreasing)
                .support(truncation_point(x * t.powf(-0.25), WEIGHT_CUT));
            let d = decompose_lobes(order, &weight, 1_000_000, LOBE_TOL)?;
            let s = alternating_sum(&d);
            let scale = x.powf(-(n as f64 + 1.0) / 2.0);
            let ok = s.certified && d.warnings.is_empty() && d.weight_strictly_decreasing;
            Ok((x, t, s.value * scale, s.error_bound * scale, ok))
        })
        .collect();
    let samples: Vec<(f64, f64, f64, f64, bool)> = rows.into_iter().collect::<Result<_>>()?;
    let bad = samples.iter().filter(|r| !r.4).count();
    let min = samples
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .map(|r| (r.0 * r.1.powf(-0.25), r.2));
    let report = PositivityReport {
        verdict: if bad == 0 { Verdict::CertifiedPositive } else { Verdict::Inconclusive },
        method: Method::LobeMonotonicity,
        witness: None,
        beta_0: beta_0(n),
        scan_min: min,
        details: if bad == 0 {
            format!("ψ > 0 and ψ' ≤ 0 on the table; lobe sums certified at {} samples", samples.len())
        } else {
            format!("{bad} of {} samples not certified", samples.len())
        },
    };
    Ok(Theorem11Report { report, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::profile::{c_const, linear_solution};

    #[test]
    fn n1_map_threshold_is_seven_sixteenths() {
        let peak = |b: f64| n1_map_numerator(b, (1.0 + 2.0 * b) / 8.0);
        assert!(peak(7.0 / 16.0).abs() < 1e-15);
        assert!(peak(0.4) < 0.0);
        assert!(peak(0.45) > 0.0);
    }

    #[test]
    fn sine_form_matches_cosine_form() {
        for eta in [0.01, 0.7, 5.0, 80.0] {
            let (sine, _, _) = n1_sine_form(0.3, eta, 1e-13).unwrap();
            let cosine = profile_sum(1, 0.3, eta, 1e-13).unwrap().value;
            assert!((sine - cosine).abs() < 1e-9 * cosine.abs().max(1.0), "eta={eta}");
        }
    }

    #[test]
    fn psi_table_interpolates_power_laws() {
        let grid = RadialGrid::log(1e-2, 1e2, 50).unwrap();
        let t = PsiTable::from_fn(&grid, |s| s.powf(-1.6), |s| -1.6 * s.powf(-2.6)).unwrap();
        for x in [1e-4, 0.3, 7.7, 1e4] {
            assert!((t.eval(x) / x.powf(-1.6) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn theorem11_reproduces_linear_solution() {
        let (n, beta) = (3, 0.4);
        let c = c_const(n, beta);
        let grid = RadialGrid::log(1e-3, 1e3, 80).unwrap();
        let e = (n as f64 - 1.0) / 2.0 + beta - n as f64;
        let psi = PsiTable::from_fn(&grid, |s| c * s.powf(e), |s| c * e * s.powf(e - 1.0)).unwrap();
        let samples = [(0.5, 0.1), (1.0, 1.0), (3.0, 0.2)];
        let r = certify_theorem11(n, &psi, &samples).unwrap();
        assert_eq!(r.report.verdict, Verdict::CertifiedPositive);
        for &(x, t, v, _, _) in &r.samples {
            let u = linear_solution(n, beta, x, t).unwrap();
            assert!((v - u).abs() < 1e-8 * u, "{x} {t}");
        }
    }

    #[test]
    fn theorem11_hypotheses() {
        let grid = RadialGrid::log(0.1, 10.0, 20).unwrap();
        let rising = PsiTable::from_fn(&grid, |s| 1.0 + s, |_| 1.0).unwrap();
        assert!(matches!(
            certify_theorem11(3, &rising, &[(1.0, 1.0)]),
            Err(Error::HypothesisViolation { condition: 'c', .. })
        ));
        let constant = PsiTable::from_fn(&grid, |_| 2.0, |_| 0.0).unwrap();
        let r = certify_theorem11(3, &constant, &[(1.0, 1.0), (2.0, 0.5)]).unwrap();
        assert_eq!(r.report.verdict, Verdict::CertifiedPositive);
        let negative = PsiTable::from_fn(&grid, |_| -1.0, |_| 0.0).unwrap();
        assert!(matches!(
            certify_theorem11(3, &negative, &[(1.0, 1.0)]),
            Err(Error::HypothesisViolation { condition: 'b', .. })
        ));
    }
}
